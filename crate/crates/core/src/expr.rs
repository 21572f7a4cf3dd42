//! A small expression language for functions of `x` and `y`.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          right-associative
//! atom    := number | 'x' | 'y' | call | '(' expr ')'
//! call    := name '(' expr (',' expr)* ')'
//! ```
//!
//! Known calls: `exp`, `log`, `abs`, `sqrt` (one argument) and `max`, `min`
//! (two arguments). Names are case-sensitive.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<&'static str> },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {found} (byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable {0:?} has no value")]
    MissingVariable(Var),
    #[error("domain error in {op} at operand {operand}")]
    Domain { op: &'static str, operand: f64 },
}

pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: source.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(&["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            expected: expected.to_vec(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        const EXPECTED: &[&str] = &["number", "variable", "function call", "'('", "'-'"];
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax(&["')'"]));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => Err(self.syntax(EXPECTED)),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.syntax(&["digit"]));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.syntax(&["exponent digits"]));
            }
            debug_assert!(mark > start);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| ParseError::Syntax { offset: start, expected: vec!["number"] })
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match name {
            "x" => return Ok(Expr::Var(Var::X)),
            "y" => return Ok(Expr::Var(Var::Y)),
            _ => {}
        }
        let arity = match name {
            "exp" | "log" | "abs" | "sqrt" => 1,
            "max" | "min" => 2,
            _ => {
                return Err(ParseError::UnknownIdentifier {
                    name: name.to_string(),
                    offset: start,
                })
            }
        };
        if !self.eat(b'(') {
            return Err(self.syntax(&["'('"]));
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.syntax(&["','", "')'"]));
        }
        if args.len() != arity {
            return Err(ParseError::Arity {
                name: name.to_string(),
                expected: arity,
                found: args.len(),
                offset: start,
            });
        }
        let mut args = args.into_iter().map(Box::new);
        let first = args.next().expect("arity >= 1");
        Ok(match name {
            "exp" => Expr::Call(Func::Exp, first),
            "log" => Expr::Call(Func::Log, first),
            "abs" => Expr::Call(Func::Abs, first),
            "sqrt" => Expr::Call(Func::Sqrt, first),
            "max" => Expr::Max(first, args.next().expect("arity 2")),
            _ => Expr::Min(first, args.next().expect("arity 2")),
        })
    }
}

fn checked(op: &'static str, operand: f64, value: f64) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::Domain { op, operand })
    }
}

impl Expr {
    pub fn evaluate(&self, x: f64, y: Option<f64>) -> Result<f64, EvalError> {
        use Expr::*;
        match self {
            Num(v) => Ok(*v),
            Var(crate::expr::Var::X) => Ok(x),
            Var(crate::expr::Var::Y) => y.ok_or(EvalError::MissingVariable(crate::expr::Var::Y)),
            Neg(e) => Ok(-e.evaluate(x, y)?),
            Add(a, b) => {
                let (a, b) = (a.evaluate(x, y)?, b.evaluate(x, y)?);
                checked("+", a, a + b)
            }
            Sub(a, b) => {
                let (a, b) = (a.evaluate(x, y)?, b.evaluate(x, y)?);
                checked("-", a, a - b)
            }
            Mul(a, b) => {
                let (a, b) = (a.evaluate(x, y)?, b.evaluate(x, y)?);
                checked("*", a, a * b)
            }
            Div(a, b) => {
                let (a, b) = (a.evaluate(x, y)?, b.evaluate(x, y)?);
                if b == 0.0 {
                    return Err(EvalError::Domain { op: "/", operand: b });
                }
                checked("/", b, a / b)
            }
            Pow(a, b) => {
                let (a, b) = (a.evaluate(x, y)?, b.evaluate(x, y)?);
                if a < 0.0 && b.fract() != 0.0 {
                    return Err(EvalError::Domain { op: "^", operand: a });
                }
                if a == 0.0 && b < 0.0 {
                    return Err(EvalError::Domain { op: "^", operand: a });
                }
                let v = if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                    a.powi(b as i32)
                } else {
                    a.powf(b)
                };
                checked("^", a, v)
            }
            Call(f, e) => {
                let v = e.evaluate(x, y)?;
                match f {
                    Func::Exp => checked("exp", v, v.exp()),
                    Func::Log if v <= 0.0 => Err(EvalError::Domain { op: "log", operand: v }),
                    Func::Log => Ok(v.ln()),
                    Func::Abs => Ok(v.abs()),
                    Func::Sqrt if v < 0.0 => Err(EvalError::Domain { op: "sqrt", operand: v }),
                    Func::Sqrt => Ok(v.sqrt()),
                }
            }
            Max(a, b) => Ok(a.evaluate(x, y)?.max(b.evaluate(x, y)?)),
            Min(a, b) => Ok(a.evaluate(x, y)?.min(b.evaluate(x, y)?)),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        use Expr::*;
        match self {
            Num(_) => {}
            Var(v) => {
                out.insert(*v);
            }
            Neg(e) | Call(_, e) => e.collect_vars(out),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) | Max(a, b) | Min(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// Fully parenthesized rendering that reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            // `{:?}` on f64 is the shortest round-trip form; wrap it so a
            // literal exponent like 1e-7 never meets a neighbouring operator.
            Num(v) => {
                let s = format!("{v:?}");
                if s.contains('e') {
                    write!(f, "({s})")
                } else {
                    write!(f, "{s}")
                }
            }
            Var(crate::expr::Var::X) => write!(f, "x"),
            Var(crate::expr::Var::Y) => write!(f, "y"),
            Neg(e) => write!(f, "(-{e})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, b) => write!(f, "({a} ^ {b})"),
            Call(func, e) => write!(f, "{}({e})", func.name()),
            Max(a, b) => write!(f, "max({a}, {b})"),
            Min(a, b) => write!(f, "min({a}, {b})"),
        }
    }
}
