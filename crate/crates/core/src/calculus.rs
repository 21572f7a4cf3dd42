//! Δ, ∇ and ◇α derivatives and integrals on a time-scale window.
//!
//! Integrals are evaluated by walking the window's pieces left to right: each
//! dense piece contributes its Riemann integral, and each gap between
//! consecutive pieces contributes `f(left end) · gap` (Δ) or
//! `f(right end) · gap` (∇). On a purely discrete window this is the exact
//! weighted sum over right- or left-scattered points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::RealFunction1D;
use crate::quadrature::{self, QuadratureConfig};
use crate::timescale::TimeScale;

/// Weight of the Δ part in a ◇α combination, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub const ZERO: Alpha = Alpha(0.0);
    pub const HALF: Alpha = Alpha(0.5);
    pub const ONE: Alpha = Alpha(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Alpha(value))
        } else {
            Err(Error::BadParam(format!("alpha must lie in [0, 1], got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// α·delta + (1 − α)·nabla, computing only the sides that carry weight.
    pub fn combine(self, delta: impl FnOnce() -> Result<f64>, nabla: impl FnOnce() -> Result<f64>) -> Result<f64> {
        if self.0 == 1.0 {
            delta()
        } else if self.0 == 0.0 {
            nabla()
        } else {
            Ok(self.0 * delta()? + (1.0 - self.0) * nabla()?)
        }
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which one-sided calculus an integral or derivative uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Delta,
    Nabla,
}

/// Integral of an arbitrary fallible integrand under a pure Δ or ∇ rule.
///
/// `a > b` reverses the sign; `a == b` gives zero.
pub fn integrate_with<F>(ts: &TimeScale, f: F, a: f64, b: f64, rule: Rule, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let a = ts.snap(a)?;
    let b = ts.snap(b)?;
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-integrate_with(ts, f, b, a, rule, cfg)?);
    }
    let segs = ts.atoms_in(a, b)?;
    let mut total = 0.0;
    for (i, seg) in segs.iter().enumerate() {
        if seg.is_dense() {
            total += quadrature::integrate(&f, seg.lo(), seg.hi(), cfg)?;
        }
        if let Some(next) = segs.get(i + 1) {
            let gap = next.lo() - seg.hi();
            let at = match rule {
                Rule::Delta => seg.hi(),
                Rule::Nabla => next.lo(),
            };
            total += gap * f(at)?;
        }
    }
    Ok(total)
}

/// ◇α integral of an arbitrary fallible integrand.
pub fn diamond_integrate_with<F>(ts: &TimeScale, f: F, a: f64, b: f64, alpha: Alpha, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    alpha.combine(
        || integrate_with(ts, &f, a, b, Rule::Delta, cfg),
        || integrate_with(ts, &f, a, b, Rule::Nabla, cfg),
    )
}

pub fn delta_integral(ts: &TimeScale, f: &RealFunction1D, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    integrate_with(ts, |t| f.eval(t), a, b, Rule::Delta, cfg)
}

pub fn nabla_integral(ts: &TimeScale, f: &RealFunction1D, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    integrate_with(ts, |t| f.eval(t), a, b, Rule::Nabla, cfg)
}

pub fn diamond_alpha_integral(
    ts: &TimeScale,
    f: &RealFunction1D,
    a: f64,
    b: f64,
    alpha: Alpha,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    diamond_integrate_with(ts, |t| f.eval(t), a, b, alpha, cfg)
}

/// The ◇α centroid (1/(b−a)) ∫_a^b t ◇α t of the window.
pub fn t_alpha(ts: &TimeScale, a: f64, b: f64, alpha: Alpha, cfg: &QuadratureConfig) -> Result<f64> {
    let a = ts.snap(a)?;
    let b = ts.snap(b)?;
    if a >= b {
        return Err(Error::BadWindow { a, b });
    }
    Ok(diamond_integrate_with(ts, Ok, a, b, alpha, cfg)? / (b - a))
}

// Stabilized one-sided derivatives never get tighter than this relative
// level; finite-difference cancellation makes rel_tol=1e-10 unreachable for
// functions of moderate magnitude.
const DERIVATIVE_TOL_FLOOR: f64 = 1e-9;
const MAX_RICHARDSON_ROWS: usize = 18;

/// Limit of (f(t + dir·h) − f(t)) / (dir·h) as h → 0⁺, by Richardson
/// extrapolation of halving step sizes. `room` bounds the first step so that
/// every sample stays inside the dense piece.
fn one_sided_limit(f: &RealFunction1D, t: f64, dir: f64, room: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let ft = f.eval(t)?;
    let h0 = room.min(0.1 * t.abs().max(1.0));
    let tol_rel = cfg.rel_tol.max(DERIVATIVE_TOL_FLOOR);

    let mut prev_row: Vec<f64> = Vec::new();
    let mut history: Vec<f64> = Vec::new();
    let mut best = f64::NAN;
    let mut best_err = f64::INFINITY;
    let mut h = h0;
    for k in 0..MAX_RICHARDSON_ROWS {
        let q = (f.eval(t + dir * h)? - ft) / (dir * h);
        let mut row = Vec::with_capacity(k + 1);
        row.push(q);
        let mut factor = 1.0;
        for j in 1..=k {
            factor *= 2.0;
            let r = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (factor - 1.0);
            let err = (r - row[j - 1]).abs().max((r - prev_row[j - 1]).abs());
            if err <= best_err {
                best_err = err;
                best = r;
            }
            row.push(r);
        }
        if k == 0 {
            best = q;
        }
        history.push(best);
        let n = history.len();
        if n >= 3 {
            let scale = ft.abs().max(best.abs()).max(1.0);
            let (x, y, z) = (history[n - 3], history[n - 2], history[n - 1]);
            let spread = (x - y).abs().max((y - z).abs()).max((x - z).abs());
            if spread <= tol_rel * scale {
                return Ok(z);
            }
        }
        // Higher orders are amplifying noise; the estimate will not improve.
        if k >= 2 && (row[k] - prev_row[k - 1]).abs() > 2.0 * best_err && best_err <= tol_rel * best.abs().max(ft.abs()).max(1.0) {
            return Ok(best);
        }
        prev_row = row;
        h *= 0.5;
    }
    Err(Error::NumericFailure(format!(
        "derivative at {t} did not stabilize (last estimate {best}, error {best_err:e})"
    )))
}

fn in_k_set(ts: &TimeScale, t: f64, rule: Rule) -> Result<()> {
    let reduced = match rule {
        Rule::Delta => ts.restrict_k(),
        Rule::Nabla => ts.restrict_sub_k(),
    };
    let set = match rule {
        Rule::Delta => "T^k",
        Rule::Nabla => "T_k",
    };
    match reduced {
        Ok(r) if r.contains(t) => Ok(()),
        Ok(_) | Err(Error::EmptyScale) => Err(Error::NotInKSet { point: t, set }),
        Err(e) => Err(e),
    }
}

/// Δ derivative at `t ∈ 𝕋^k`.
pub fn delta_derivative(ts: &TimeScale, f: &RealFunction1D, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let t = ts.snap(t)?;
    in_k_set(ts, t, Rule::Delta)?;
    let sigma = ts.sigma(t)?;
    if sigma > t {
        return Ok((f.eval(sigma)? - f.eval(t)?) / (sigma - t));
    }
    let piece = ts.piece_of(t)?;
    if t < piece.hi() {
        one_sided_limit(f, t, 1.0, piece.hi() - t, cfg)
    } else {
        // Left-dense maximum: only points to the left are near.
        one_sided_limit(f, t, -1.0, t - piece.lo(), cfg)
    }
}

/// ∇ derivative at `t ∈ 𝕋_k`.
pub fn nabla_derivative(ts: &TimeScale, f: &RealFunction1D, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let t = ts.snap(t)?;
    in_k_set(ts, t, Rule::Nabla)?;
    let rho = ts.rho(t)?;
    if rho < t {
        return Ok((f.eval(t)? - f.eval(rho)?) / (t - rho));
    }
    let piece = ts.piece_of(t)?;
    if t > piece.lo() {
        one_sided_limit(f, t, -1.0, t - piece.lo(), cfg)
    } else {
        one_sided_limit(f, t, 1.0, piece.hi() - t, cfg)
    }
}

/// ◇α derivative at `t ∈ 𝕋^k_k`: α·f^Δ(t) + (1 − α)·f^∇(t).
pub fn diamond_alpha_derivative(
    ts: &TimeScale,
    f: &RealFunction1D,
    t: f64,
    alpha: Alpha,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let delta = delta_derivative(ts, f, t, cfg)?;
    let nabla = nabla_derivative(ts, f, t, cfg)?;
    Ok(alpha.value() * delta + (1.0 - alpha.value()) * nabla)
}
