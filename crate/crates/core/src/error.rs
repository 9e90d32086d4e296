use thiserror::Error;

/// Errors raised by the Loewner laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {re} + {im}i lies strictly inside the slit above {x} of height {height}")]
    InsideSlit { re: f64, im: f64, x: f64, height: f64 },

    #[error("invalid driving function: {0}")]
    InvalidDriver(String),

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("step size underflow at t = {t} (gap {gap:e})")]
    StepUnderflow { t: f64, gap: f64 },

    #[error("trace vertices {index} and {next} are {gap} apart, above the allowed {limit}; increase the step count", next = index + 1)]
    TraceTooCoarse { index: usize, gap: f64, limit: f64 },

    #[error("discontinuous junction: {left} vs {right}")]
    Discontinuous { left: f64, right: f64 },

    #[error("curve vertex {index} maps onto the real axis (capacity step {dt:e}); curve touches back or is too coarse")]
    NonPositiveCapacity { index: usize, dt: f64 },

    #[error("curve vertex {index} maps below the real axis (imaginary part {im:e})")]
    BranchFailure { index: usize, im: f64 },

    #[error("level {level} exceeds the cap {cap} for {kind}")]
    LevelCap { kind: &'static str, level: u32, cap: u32 },

    #[error("target angle {theta} outside the admissible window (0, {window}]")]
    OutsideWindow { theta: f64, window: f64 },

    #[error("base family: {0}")]
    BaseFamily(String),

    #[error("point {index} could not be visited within tolerance {tol} (distance {distance:e})")]
    NotVisited { index: usize, distance: f64, tol: f64 },

    #[error("point {x} is not captured at the end of the driver (outcome: {outcome})")]
    NotCaptured { x: f64, outcome: String },

    #[error("iteration cap reached: {0}")]
    IterationCap(String),

    #[error("insufficient overlap: {0}")]
    InsufficientOverlap(String),

    #[error("{context}: line {line}: {message}")]
    Parse { context: String, line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
