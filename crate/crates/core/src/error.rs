use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angular momentum domain error: {0}")]
    Domain(String),

    #[error("level ordering error: upper {upper} MHz is not above lower {lower} MHz")]
    Ordering { upper: f64, lower: f64 },

    #[error("polarization direction is the zero vector")]
    ZeroVector,

    #[error("field {0} has zero total amplitude")]
    ZeroField(usize),

    #[error("invalid loop levels: {0}")]
    InvalidLevels(String),

    #[error("field {field} at {freq} MHz is not resonant with its transition at {target} MHz")]
    NotResonant { field: usize, freq: f64, target: f64 },

    #[error("field {field} at {freq} MHz is resonant with more than one level pair")]
    ResonanceAmbiguity { field: usize, freq: f64 },

    #[error("loop is not closed: closure residual {residual:e} MHz exceeds tolerance {tol:e} MHz")]
    NotClosed { residual: f64, tol: f64 },

    #[error("loop is open: |Omega{index}| = {magnitude:e} MHz is not above tolerance {tol:e} MHz")]
    ZeroRabi { index: usize, magnitude: f64, tol: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("out of range: {0}")]
    Range(String),
}
