//! Evaluatable real functions of one and two variables.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::expr::{self, EvalError, Expr, Var};

type Eval1 = dyn Fn(f64) -> Result<f64> + Send + Sync;
type Eval2 = dyn Fn(f64, f64) -> Result<f64> + Send + Sync;

fn finite(value: f64, at: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::Domain { op: "evaluation", operand: at }.into())
    }
}

#[derive(Clone)]
pub struct RealFunction1D {
    label: String,
    eval: Arc<Eval1>,
}

impl RealFunction1D {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(move |t| finite(f(t), t)),
        }
    }

    pub fn fallible(label: impl Into<String>, f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    /// Wraps an expression in `x`; fails if it mentions `y`.
    pub fn from_expr(label: impl Into<String>, e: Expr) -> Result<Self> {
        if e.free_variables().contains(&Var::Y) {
            return Err(EvalError::MissingVariable(Var::Y).into());
        }
        Ok(Self::fallible(label, move |t| Ok(e.evaluate(t, None)?)))
    }

    pub fn parse(source: &str) -> Result<Self> {
        Self::from_expr(source, expr::parse(source)?)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Result<f64> {
        (self.eval)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for RealFunction1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFunction1D({})", self.label)
    }
}

#[derive(Clone)]
pub struct RealFunction2D {
    label: String,
    eval: Arc<Eval2>,
}

impl RealFunction2D {
    pub fn new(label: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(move |x, y| finite(f(x, y), x)),
        }
    }

    pub fn fallible(label: impl Into<String>, f: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    pub fn from_expr(label: impl Into<String>, e: Expr) -> Self {
        Self::fallible(label, move |x, y| Ok(e.evaluate(x, Some(y))?))
    }

    pub fn parse(source: &str) -> Result<Self> {
        Ok(Self::from_expr(source, expr::parse(source)?))
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        (self.eval)(x, y)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The section u ↦ f(u, y).
    pub fn section_x(&self, y: f64) -> RealFunction1D {
        let inner = self.eval.clone();
        RealFunction1D::fallible(format!("{}(·, {y})", self.label), move |u| inner(u, y))
    }

    /// The section v ↦ f(x, v).
    pub fn section_y(&self, x: f64) -> RealFunction1D {
        let inner = self.eval.clone();
        RealFunction1D::fallible(format!("{}({x}, ·)", self.label), move |v| inner(x, v))
    }
}

impl fmt::Debug for RealFunction2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFunction2D({})", self.label)
    }
}
