use thiserror::Error;

use crate::convexity::Witness;
use crate::expr::{EvalError, ParseError};

/// Which of the two scales of a rectangle an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "first (x) scale"),
            Axis::Y => write!(f, "second (y) scale"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time scale is empty")]
    EmptyScale,
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("{0} is not a member of the time scale")]
    NotInScale(f64),
    #[error("{point} is outside {set}")]
    NotInKSet { point: f64, set: &'static str },
    #[error("bad window [{a}, {b}]")]
    BadWindow { a: f64, b: f64 },
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("convexity hypothesis failed: {0}")]
    HypothesisFailed(Witness),
    #[error("midpoint {midpoint} is not a member of the {axis}")]
    MidpointNotInScale { axis: Axis, midpoint: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
