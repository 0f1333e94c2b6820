use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fractional order must lie in (0, 1), got {0}")]
    InvalidOrder(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("grid mismatch between fields ({a} vs {b})")]
    GridMismatch { a: String, b: String },

    #[error("mean {mean:.3e} exceeds tolerance {limit:.3e}; mass is not conserved")]
    MeanTooLarge { mean: f64, limit: f64 },

    #[error("insufficient trajectory samples: {0}")]
    InsufficientSamples(String),

    #[error("Mittag-Leffler evaluation did not converge (alpha={alpha}, beta={beta}, z={z})")]
    ConvergenceFailure { alpha: f64, beta: f64, z: f64 },

    #[error("non-finite values at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("implicit solve residual {residual:.3e} at step {step} exceeds 1e-10")]
    SolverResidual { step: usize, residual: f64 },

    #[error("negative history energy {value:e} at step {step}: {detail}")]
    NegativeHistoryEnergy { step: usize, value: f64, detail: String },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
