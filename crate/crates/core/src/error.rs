use thiserror::Error;

pub type Result<T> = std::result::Result<T, GkError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GkError {
    #[error("invalid parameter for {model}: {message}")]
    InvalidParameter { model: String, message: String },

    #[error("unknown spectrum model `{0}`")]
    UnknownModel(String),

    #[error("malformed model spec `{spec}`: {message}")]
    ModelSpec { spec: String, message: String },

    #[error("index {index} out of range for {model} (largest allowed index {max})")]
    IndexOutOfRange { model: String, index: usize, max: usize },

    #[error("nonlinearity is undefined at n = 0")]
    ZeroIndex,

    #[error("|z| = {modulus} is outside the convergence radius {radius} of {model} ({branch})")]
    OutsideRadius { model: String, branch: String, modulus: f64, radius: f64 },

    #[error("tail tolerance {tolerance:e} not reached below the cutoff cap {cap}")]
    TruncationCap { tolerance: f64, cap: usize },

    #[error("spectrum {model} failed validation: {message}")]
    InvalidSpectrum { model: String, message: String },

    #[error("state has zero norm: {0}")]
    ZeroNorm(String),

    #[error("model mismatch: `{left}` vs `{right}`")]
    ModelMismatch { left: String, right: String },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error:e} after depth {depth}")]
    QuadratureNonConvergence { estimate: f64, error: f64, depth: usize },

    #[error("matrix exponential overflow (norm {0})")]
    ExpOverflow(f64),

    #[error("boundary leakage {leakage:e} exceeds {tolerance:e}; retry with cutoff >= {suggested_cutoff}")]
    BoundaryLeakage { leakage: f64, tolerance: f64, suggested_cutoff: usize },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for GkError {
    fn from(e: std::io::Error) -> Self {
        GkError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GkError {
    fn from(e: serde_json::Error) -> Self {
        GkError::Parse(e.to_string())
    }
}
