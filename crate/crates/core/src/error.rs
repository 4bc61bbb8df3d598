use thiserror::Error;

pub type Result<T> = std::result::Result<T, FloqError>;

#[derive(Debug, Error)]
pub enum FloqError {
    #[error("sector is empty: {0}")]
    EmptySector(String),

    #[error("dimension {dim} exceeds the limit of {limit}")]
    SizeLimit { dim: usize, limit: usize },

    #[error("configuration {0} is not in the sector")]
    NotInSector(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("static part is not diagonal in the working basis; rotate to the polariton frame first")]
    NonDiagonalStatic,

    #[error("rotating-frame Hamiltonian is not periodic: defect {defect:.3e} (tolerance {tolerance:.3e})")]
    PeriodicityViolation { defect: f64, tolerance: f64 },

    #[error("quadrature did not converge: estimated error {error:.3e} > {tolerance:.3e}")]
    QuadratureNotConverged { error: f64, tolerance: f64 },

    #[error("propagator did not converge: defect {defect:.3e} at {steps} steps")]
    NotConverged { defect: f64, steps: usize },

    #[error("Krylov exponential failed: residual {residual:.3e}")]
    KrylovBreakdown { residual: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("cut {cut} out of range for {sites} sites")]
    CutOutOfRange { cut: usize, sites: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FloqError {
    pub(crate) fn param(field: &str, message: impl Into<String>) -> Self {
        FloqError::InvalidParameter {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        FloqError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for failures of a numerical convergence check.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            FloqError::NotConverged { .. }
                | FloqError::QuadratureNotConverged { .. }
                | FloqError::KrylovBreakdown { .. }
                | FloqError::PeriodicityViolation { .. }
        )
    }

    pub fn is_config(&self) -> bool {
        matches!(
            self,
            FloqError::Config { .. }
                | FloqError::InvalidParameter { .. }
                | FloqError::InvalidConfiguration(_)
                | FloqError::EmptySector(_)
                | FloqError::CutOutOfRange { .. }
        )
    }
}
