use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed state spec: {0}")]
    MalformedSpec(String),

    #[error("invalid state spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("thermal threshold is unbounded for eta = 1")]
    Unbounded,

    #[error("Fock truncation too small: dim {dim} leaves tail mass {tail_mass:e} (tolerance {tolerance:e})")]
    Truncation {
        dim: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("|beta|^2 = {beta_sq} exceeds the evaluation guard {limit} for dimension {dim}")]
    Overflow { beta_sq: f64, limit: f64, dim: usize },

    #[error("distribution is singular at s = {s} (effective smoothing {width} <= 0)")]
    Singular { s: f64, width: f64 },

    #[error("quadrature did not converge (residual estimate {residual:e})")]
    Quadrature { residual: f64 },

    #[error("characteristic function violates Phi(-b) = conj(Phi(b)) by {deviation:e}")]
    Symmetry { deviation: f64 },

    #[error("no positive compensated witness: nbar = {nbar} exceeds the bound {bound} (eta a^2 - nbar (1 - eta) = {a2_eff})")]
    WitnessCondition { nbar: f64, bound: f64, a2_eff: f64 },

    #[error("nbar = {nbar} is at or above the thermal threshold {threshold}")]
    AboveThreshold { nbar: f64, threshold: f64 },

    #[error("reconstruction series diverges: |base| = {ratio}")]
    Divergent { ratio: f64 },

    #[error("grid step {step} too coarse; the fastest phase needs step <= {max_step}")]
    GridTooCoarse { step: f64, max_step: f64 },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves (divergence, threshold
    /// violations, truncation), false for rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. }
                | Error::Overflow { .. }
                | Error::Singular { .. }
                | Error::Quadrature { .. }
                | Error::Symmetry { .. }
                | Error::WitnessCondition { .. }
                | Error::AboveThreshold { .. }
                | Error::Divergent { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
