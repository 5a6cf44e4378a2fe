use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension N = {0} is below 5")]
    DimensionTooSmall(i64),
    #[error("p = {p} is not above the Serrin exponent N/(N-4) = {bound}")]
    BelowSerrin { p: f64, bound: f64 },
    #[error("p = {p} is not below the Sobolev exponent (N+4)/(N-4) = {bound}")]
    AboveSobolev { p: f64, bound: f64 },
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shooting bracket failure: {0}")]
    Bracket(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("t = {t} outside the profile grid [{lo}, {hi}]")]
    OutOfGrid { t: f64, lo: f64, hi: f64 },
    #[error("overflow at t = {0}")]
    Overflow(f64),
    #[error("seed exponent {0} is not an indicial root (residual {1:e})")]
    NotARoot(String, f64),
    #[error("pole of the gamma function at {0}")]
    Pole(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("lambda too large: {0}")]
    LambdaTooLarge(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
