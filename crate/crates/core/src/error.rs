use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the fiber (|w - center| = {distance} >= {radius})")]
    OutsideFiber { distance: f64, radius: f64 },
    #[error("point lies outside the unit ball (|w| = {0})")]
    OutsideBall(f64),
    #[error("the zero section has no logarithm")]
    ZeroSection,
    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),
    #[error("cannot add exact scalars with pi powers {0} and {1}")]
    MixedPiPower(i32, i32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid metric jet: {0}")]
    InvalidJet(String),
    #[error("singular Gram matrix")]
    SingularGram,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
