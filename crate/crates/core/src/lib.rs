//! Calculus on time scales and Hermite–Hadamard inequality checks for
//! functions of one and two variables.

pub mod calculus;
pub mod cli;
pub mod convexity;
pub mod error;
pub mod exact;
pub mod expr;
pub mod function;
pub mod inequalities;
pub mod quadrature;
pub mod rectangle;
pub mod report;
pub mod timescale;

pub use calculus::{Alpha, Rule};
pub use error::{Axis, Error, Result};
pub use function::{RealFunction1D, RealFunction2D};
pub use inequalities::{ChainId, ChainReport, VerifyOptions};
pub use quadrature::QuadratureConfig;
pub use rectangle::RectangleDomain;
pub use timescale::TimeScale;
