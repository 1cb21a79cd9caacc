//! Small numerically stable building blocks shared by the closed forms.

/// `1 - exp(-s) cos(a)` without cancellation when both `s` and `a` are small.
#[inline]
pub fn one_minus_damped_cos(s: f64, a: f64) -> f64 {
    let h = (0.5 * a).sin();
    -(-s).exp_m1() + (-s).exp() * 2.0 * h * h
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > 0.0 && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
