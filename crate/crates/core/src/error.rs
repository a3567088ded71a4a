use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated ({invariant}): {detail}")]
    Invariant { invariant: &'static str, detail: String },

    #[error("no weight stored for exponent {exponent:?}")]
    MissingWeight { exponent: Vec<u32> },

    #[error("weight is not an absolute value: phi({sum:?}) = {lhs} > phi({s:?}) * phi({t:?}) = {rhs}")]
    NotSubmultiplicative { s: Vec<u32>, t: Vec<u32>, sum: Vec<u32>, lhs: f64, rhs: f64 },

    #[error("region has no sample points")]
    EmptyRegion,

    #[error("not nonnegative at point {point:?}: value {value} (tolerance {tolerance})")]
    NonMembership { point: Vec<f64>, value: f64, tolerance: f64 },

    #[error("point {point:?} lies in K_M but a({point:?}) = {value} < 0")]
    ModuleContradiction { point: Vec<f64>, value: f64 },

    #[error("norm of a is {norm}, which is not below the radius {radius}")]
    RadiusViolation { norm: f64, radius: f64 },

    #[error(
        "least-squares fit is rank deficient at degree {degree}: rank {rank} of {columns}, condition {condition:e}"
    )]
    RankDeficient { degree: u32, rank: usize, columns: usize, condition: f64 },

    #[error("no sample point is separated from the given points by more than {resolution}")]
    NoSeparatedPoint { resolution: f64 },

    #[error("degree budget exhausted: moments up to degree {degree} cannot test 2d-powers with d = {d}")]
    DegreeBudget { degree: u32, d: u32 },

    #[error("iteration cap of {0} reached")]
    IterationCap(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
