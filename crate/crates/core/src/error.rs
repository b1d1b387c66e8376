use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// A Rényi/Tsallis order outside the supported integer range.
    Order { order: i64, min: i64 },
    /// Evaluation requested at a pole of a partial-fraction expansion.
    Pole,
    /// The requested tolerance cannot be met at the working precision.
    Precision { requested_tol: String, working_digits: u32, required_digits: u32 },
    /// Adaptive subdivision hit its depth limit before meeting the tolerance.
    NoConvergence { max_depth: u32 },
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Order { order, min } if *order == 1 => write!(
                f,
                "order error: order k={order} is the Shannon limit, which has no closed form here; use k >= {min}"
            ),
            Error::Order { order, min } => write!(f, "order error: order k={order} not supported; use k >= {min}"),
            Error::Pole => f.write_str("evaluation point is a pole of the expansion"),
            Error::Precision { requested_tol, working_digits, required_digits } => write!(
                f,
                "precision error: tolerance {requested_tol} is unattainable with {working_digits} working digits; \
                 use at least {required_digits} digits"
            ),
            Error::NoConvergence { max_depth } => {
                write!(f, "quadrature did not converge within {max_depth} bisection levels")
            }
            Error::Parse(s) => write!(f, "cannot parse `{s}`"),
        }
    }
}

impl core::error::Error for Error {}
