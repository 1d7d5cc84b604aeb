use alloc::string::String;
use core::fmt;

/// Failure modes shared by every algorithm in the crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// The caller handed in something malformed (bad weight, endpoint, parameter).
    InvalidInput(String),
    /// A dense routine was asked to work on a matrix larger than its cap.
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    /// A randomized routine exhausted its retry budget, or a precondition on
    /// the input's density was not met.
    Degenerate(String),
    /// A numerical step failed (singular system, no feasible step found).
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(s) => write!(f, "invalid input: {s}"),
            Error::CapExceeded { what, n, cap } => {
                write!(f, "{what}: size {n} exceeds dense cap {cap}")
            }
            Error::Degenerate(s) => write!(f, "degenerate input: {s}"),
            Error::Numerical(s) => write!(f, "numerical failure: {s}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
