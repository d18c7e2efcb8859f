use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0}")]
    Domain(String),
    #[error("no solitary wave: {0}")]
    NoSolitaryWave(String),
    #[error("negative radicand {value:e} at x = {x}")]
    NegativeRadicand { x: f64, value: f64 },
    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("degenerate asymptotic direction at lambda = {re}{im:+}i")]
    DegenerateDirection { re: f64, im: f64 },
    #[error("bracket does not straddle the target: {0}")]
    NoCrossing(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
