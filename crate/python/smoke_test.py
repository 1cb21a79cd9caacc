"""Smoke test for the wva_sql extension module."""

import math

import wva_sql as w


def main():
    pulse = w.Pulse.fiducial()
    sel = w.Selection.noise_fiducial()

    ell_sql = w.sql_displacement(pulse)
    assert abs(ell_sql - 7.2614e-18) < 1e-21, ell_sql
    intensity = w.measurement_intensity(pulse, sel.theta)
    assert abs(intensity - 1.1329) < 1e-3, intensity

    d = w.minimum_displacement(pulse, sel)
    assert d["ell_min"] >= d["ell_sql"]

    b = w.noise_budget(pulse, sel)
    assert abs(b["shot"] + b["radiation_pressure"] - b["total"]) <= 1e-12 * b["total"]

    e2 = math.exp(-2.0)
    assert abs(w.ratio_curve(1.0, w.Squeeze.uniform(1.0, 0.0, math.pi)) / e2 - 1) < 1e-12
    assert abs(w.ratio_curve(1.0, w.Squeeze.uniform(1.0, 0.0, 0.0)) / math.cosh(2.0) - 1) < 1e-12
    opt = w.optimize_angles(pulse, sel, 1.0)
    assert abs(opt["rs2_min"] / e2 - 1) < 1e-6

    x, rho = w.photon_distribution(pulse, w.Selection.figure_fiducial(), normalized=True)
    assert len(x) == len(rho) and min(rho) >= 0.0

    unit = pulse.at_intensity(sel.theta, 1.0)
    mc = w.monte_carlo(unit, sel, n_pulses=5000, seed=7)
    analytic = w.noise_budget(unit, sel)["total"]
    assert abs(mc["variance"] - analytic) < 4 * mc["std_error"], (mc, analytic)
    assert mc == w.monte_carlo(unit, sel, n_pulses=5000, seed=7)

    try:
        w.Selection(1e-3)
    except ValueError:
        pass
    else:
        raise AssertionError("selection without ell or phi accepted")

    report = w.verify(mc_pulses=2000)
    assert report["passed"], [c for c in report["checks"] if not c["passed"]]

    print(f"ell_sql = {ell_sql:.4e} m, I = {intensity:.4f}, verify passed ({len(report['checks'])} checks)")


if __name__ == "__main__":
    main()
