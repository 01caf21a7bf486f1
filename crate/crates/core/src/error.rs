use thiserror::Error;

/// Everything that can go wrong while evaluating or transforming surfaces.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point ({x}, {y}) lies outside the model domain (1 + κ/4 (x² + y²) must be positive)")]
    DomainViolation { x: f64, y: f64 },
    #[error("point ({x}, {y}) lies outside the evaluation window")]
    OutOfWindow { x: f64, y: f64 },
    #[error("surface is not spacelike at ({x}, {y}): ω̃² = {omega_sq:e} below margin {margin:e}")]
    SpacelikeViolation { x: f64, y: f64, omega_sq: f64, margin: f64 },
    #[error("twin relations are not integrable: loop residual {loop_residual:e} exceeds {tolerance:e}")]
    IntegrabilityFailure { loop_residual: f64, tolerance: f64 },
    #[error("isometry does not preserve the time orientation")]
    NotTimeOrientationPreserving,
    #[error("isometry reverses the space orientation")]
    OrientationReversing,
    #[error("re-graphing Newton iteration diverged at target ({x}, {y})")]
    RegraphDivergence { x: f64, y: f64 },
    #[error("unsupported window: {0}")]
    UnsupportedWindow(String),
    #[error("{0} is a parametrized patch, not a graph")]
    NotAGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GeomError {
    fn from(e: serde_json::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}
