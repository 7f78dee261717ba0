use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible parameters: {0}")]
    InadmissibleParams(String),

    #[error("weight is singular at the origin (exponent {exponent})")]
    SingularAtOrigin { exponent: f64 },

    #[error("quadrature calibration failed: {0}")]
    QuadratureFailure(String),

    #[error("Gram matrix is ill-conditioned: {0}")]
    GramFailure(String),

    #[error("operator matrix is not self-adjoint: max |D - D^T| = {defect:e}")]
    SelfAdjointnessDefect { defect: f64 },

    #[error("projection residual {residual:e} exceeds {limit:e}")]
    ProjectionResidualTooLarge { residual: f64, limit: f64 },

    #[error("Paley functional is infinite")]
    InfinitePaleyFunctional,

    #[error("exponent out of range: {0}")]
    ExponentOutOfRange(String),

    #[error("multiplier bound is infinite; the theorem gives no information")]
    BoundInfinite,

    #[error("Picard iteration did not converge after {iterations} iterations (last difference {last_diff:e})")]
    NoConvergence { iterations: usize, last_diff: f64 },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("invalid specification `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable label used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InadmissibleParams(_) => "InadmissibleParams",
            Error::SingularAtOrigin { .. } => "SingularAtOrigin",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::GramFailure(_) => "GramFailure",
            Error::SelfAdjointnessDefect { .. } => "SelfAdjointnessDefect",
            Error::ProjectionResidualTooLarge { .. } => "ProjectionResidualTooLarge",
            Error::InfinitePaleyFunctional => "InfinitePaleyFunctional",
            Error::ExponentOutOfRange(_) => "ExponentOutOfRange",
            Error::BoundInfinite => "BoundInfinite",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::InvalidSpec { .. } => "InvalidSpec",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
        }
    }
}
