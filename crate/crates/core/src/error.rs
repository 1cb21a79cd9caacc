use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Pre- and post-selected states are orthogonal, so every conditional
    /// moment is undefined.
    #[error("post-selection is singular (theta = {theta}): no photons reach the dark port")]
    PostSelectionSingular { theta: f64 },

    #[error("weak-regime expansion disagrees with the exact moments by {residual:.3e} (limit {limit:.1e}); phi is too large relative to theta")]
    WeakRegimeViolation { residual: f64, limit: f64 },

    #[error("quadrature did not converge: successive estimates {previous:e} and {current:e}")]
    QuadratureNonConvergence { previous: f64, current: f64 },

    #[error("every one of the {excluded} simulated pulses produced zero photons")]
    EmptyPostSelection { excluded: usize },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
