use alloc::string::String;

/// Everything that can go wrong in the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {0}: the Voronoi pipeline is two-dimensional")]
    UnsupportedDimension(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("Voronoi cell of point {0} is unbounded")]
    UnboundedCell(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid process spec: {0}")]
    InvalidSpec(String),
    #[error("rejected process spec: {0}")]
    RejectedSpec(String),
    #[error("operation only supports {0} processes")]
    UnsupportedProcess(&'static str),
    #[error("invalid conductance law: {0}")]
    InvalidLaw(String),
    #[error("unsupported conductance law: {0}")]
    UnsupportedLaw(String),
    #[error("point {0} is not interior-valid; enlarge the sampling window")]
    BoundaryContamination(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("locality violation: {0}")]
    LocalityViolation(String),
    #[error("invalid combination: {0}")]
    InvalidCombination(String),
}

pub type Result<T> = core::result::Result<T, Error>;
