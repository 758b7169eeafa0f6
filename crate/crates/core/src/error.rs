use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Variants map onto the failure modes named by the
/// public operation contracts (invalid inputs, shape mismatches, infeasible
/// models, document validation).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid document field `{key}`: {reason}")]
    InvalidDocument { key: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("model infeasible: no indicator configuration admits a feasible flow")]
    ModelInfeasible,

    #[error("invalid reference point: {0}")]
    InvalidReference(String),

    #[error("front mismatch: {0}")]
    FrontMismatch(String),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("instance too large for enumeration: {size} binary variables exceeds bound {max}")]
    EnumerationBound { size: usize, max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
