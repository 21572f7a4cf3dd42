//! Hermite–Hadamard chains on time scales.
//!
//! Each verifier evaluates every member of one inequality chain, compares
//! consecutive members, and returns a [`ChainReport`]. The convexity
//! hypothesis is checked first (unless disabled) so that a reported
//! violation always means a numerical or implementation problem rather than
//! a function outside the theorem's class.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{diamond_integrate_with, t_alpha, Alpha};
use crate::convexity::{check_convex_1d, check_convex_coordinates, Witness};
use crate::error::{Axis, Error, Result};
use crate::function::{RealFunction1D, RealFunction2D};
use crate::quadrature::QuadratureConfig;
use crate::rectangle::{double_integral, RectangleDomain};
use crate::timescale::TimeScale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainId {
    #[serde(rename = "DINU_1D")]
    Dinu1d,
    #[serde(rename = "MR1")]
    Mr1,
    #[serde(rename = "MR2")]
    Mr2,
    #[serde(rename = "MR3")]
    Mr3,
    #[serde(rename = "DRAGOMIR_R")]
    DragomirR,
    #[serde(rename = "GRID_EXAMPLE")]
    GridExample,
}

impl ChainId {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainId::Dinu1d => "DINU_1D",
            ChainId::Mr1 => "MR1",
            ChainId::Mr2 => "MR2",
            ChainId::Mr3 => "MR3",
            ChainId::DragomirR => "DRAGOMIR_R",
            ChainId::GridExample => "GRID_EXAMPLE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub left: String,
    pub right: String,
    pub satisfied: bool,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "A3")]
    pub a3: f64,
    #[serde(rename = "A4")]
    pub a4: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub checked: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl Hypothesis {
    fn unchecked() -> Self {
        Self {
            checked: false,
            passed: false,
            witness: None,
        }
    }

    fn passed() -> Self {
        Self {
            checked: true,
            passed: true,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub chain_id: ChainId,
    pub alpha: f64,
    pub t_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficients: Option<Coefficients>,
    pub members: Vec<Member>,
    pub verdicts: Vec<Verdict>,
    pub hypothesis: Hypothesis,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl ChainReport {
    /// True when the chain was evaluated and every comparison holds.
    pub fn all_satisfied(&self) -> bool {
        self.error.is_none() && self.verdicts.iter().all(|v| v.satisfied)
    }

    pub fn hypothesis_failed(&self) -> bool {
        self.hypothesis.checked && !self.hypothesis.passed
    }

    pub fn member(&self, i: usize) -> f64 {
        self.members[i].value
    }

    /// A report that carries an error in place of chain members.
    pub fn failed(chain_id: ChainId, alpha: f64, function: Option<String>, err: &Error) -> Self {
        let hypothesis = match err {
            Error::HypothesisFailed(w) => Hypothesis {
                checked: true,
                passed: false,
                witness: Some(w.clone()),
            },
            _ => Hypothesis::unchecked(),
        };
        Self {
            chain_id,
            alpha,
            t_alpha: None,
            s_alpha: None,
            coefficients: None,
            members: Vec::new(),
            verdicts: Vec::new(),
            hypothesis,
            tolerance: 0.0,
            function,
            notes: Vec::new(),
            error: Some(err.to_string()),
        }
    }
}

/// Comparison slack allowed between `left ≤ right`.
pub fn verdict_tolerance(left: f64, right: f64) -> f64 {
    1e-9f64.max(1e-8 * left.abs().max(right.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub quadrature: QuadratureConfig,
    pub check_hypothesis: bool,
    /// Overrides the convexity checker's default tolerance.
    pub convexity_tol: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            check_hypothesis: true,
            convexity_tol: None,
        }
    }
}

fn member(label: &str, value: f64) -> Member {
    Member {
        label: label.to_string(),
        value,
    }
}

struct Chain {
    members: Vec<Member>,
    verdicts: Vec<Verdict>,
    tolerance: f64,
}

fn chain(members: Vec<Member>) -> Chain {
    let mut tolerance: f64 = 0.0;
    let verdicts = members
        .windows(2)
        .map(|w| {
            let tol = verdict_tolerance(w[0].value, w[1].value);
            tolerance = tolerance.max(tol);
            let slack = w[1].value - w[0].value;
            Verdict {
                left: w[0].label.clone(),
                right: w[1].label.clone(),
                satisfied: w[0].value <= w[1].value + tol,
                slack,
            }
        })
        .collect();
    Chain {
        members,
        verdicts,
        tolerance,
    }
}

fn report(id: ChainId, alpha: Alpha, label: &str, c: Chain, hypothesis: Hypothesis) -> ChainReport {
    ChainReport {
        chain_id: id,
        alpha: alpha.value(),
        t_alpha: None,
        s_alpha: None,
        coefficients: None,
        members: c.members,
        verdicts: c.verdicts,
        hypothesis,
        tolerance: c.tolerance,
        function: Some(label.to_string()),
        notes: Vec::new(),
        error: None,
    }
}

fn hypothesis_1d(ts: &TimeScale, f: &RealFunction1D, a: f64, b: f64, opts: &VerifyOptions) -> Result<Hypothesis> {
    if !opts.check_hypothesis {
        return Ok(Hypothesis::unchecked());
    }
    let v = check_convex_1d(ts, f, a, b, opts.convexity_tol)?;
    match v.witness {
        Some(w) if !v.convex => Err(Error::HypothesisFailed(w)),
        _ => Ok(Hypothesis::passed()),
    }
}

fn hypothesis_2d(r: &RectangleDomain, f: &RealFunction2D, opts: &VerifyOptions) -> Result<Hypothesis> {
    if !opts.check_hypothesis {
        return Ok(Hypothesis::unchecked());
    }
    let (vx, vy) = check_convex_coordinates(r, f, opts.convexity_tol)?;
    for v in [vx, vy] {
        if let (false, Some(w)) = (v.convex, v.witness) {
            return Err(Error::HypothesisFailed(w));
        }
    }
    Ok(Hypothesis::passed())
}

/// f(t_α) ≤ (1/(b−a)) ∫_a^b f ◇α ≤ ((b−t_α) f(a) + (t_α−a) f(b)) / (b−a).
pub fn verify_dinu_1d(
    ts: &TimeScale,
    f: &RealFunction1D,
    a: f64,
    b: f64,
    alpha: Alpha,
    opts: &VerifyOptions,
) -> Result<ChainReport> {
    let (a, b) = ts.window(a, b)?;
    if a >= b {
        return Err(Error::BadWindow { a, b });
    }
    let hyp = hypothesis_1d(ts, f, a, b, opts)?;
    let cfg = &opts.quadrature;
    let ta = t_alpha(ts, a, b, alpha, cfg)?;
    let len = b - a;
    let mean = diamond_integrate_with(ts, |t| f.eval(t), a, b, alpha, cfg)? / len;
    let ends = ((b - ta) * f.eval(a)? + (ta - a) * f.eval(b)?) / len;
    let c = chain(vec![
        member("f(t_α)", f.eval(ta)?),
        member("(1/(b-a)) ∫ f(x) ◇x", mean),
        member("((b-t_α) f(a) + (t_α-a) f(b)) / (b-a)", ends),
    ]);
    let mut rep = report(ChainId::Dinu1d, alpha, f.label(), c, hyp);
    rep.t_alpha = Some(ta);
    Ok(rep)
}

/// Shared quantities for the two-variable chains.
struct Rect<'a> {
    r: &'a RectangleDomain,
    f: &'a RealFunction2D,
    alpha: Alpha,
    cfg: &'a QuadratureConfig,
    ta: f64,
    sa: f64,
}

impl<'a> Rect<'a> {
    fn new(r: &'a RectangleDomain, f: &'a RealFunction2D, alpha: Alpha, cfg: &'a QuadratureConfig) -> Result<Self> {
        let (a, b) = r.x_window();
        let (c, d) = r.y_window();
        Ok(Self {
            r,
            f,
            alpha,
            cfg,
            ta: t_alpha(r.t1(), a, b, alpha, cfg)?,
            sa: t_alpha(r.t2(), c, d, alpha, cfg)?,
        })
    }

    /// (1/(b−a)) ∫_a^b g(x) ◇α x
    fn mean_x(&self, g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let (a, b) = self.r.x_window();
        Ok(diamond_integrate_with(self.r.t1(), g, a, b, self.alpha, self.cfg)? / (b - a))
    }

    /// (1/(d−c)) ∫_c^d g(y) ◇α y
    fn mean_y(&self, g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let (c, d) = self.r.y_window();
        Ok(diamond_integrate_with(self.r.t2(), g, c, d, self.alpha, self.cfg)? / (d - c))
    }

    fn f(&self, x: f64, y: f64) -> Result<f64> {
        self.f.eval(x, y)
    }

    fn mr1_members(&self) -> Result<Vec<Member>> {
        let (a, b) = self.r.x_window();
        let (c, d) = self.r.y_window();
        let (ta, sa) = (self.ta, self.sa);
        let left = 0.5 * (self.mean_x(|x| self.f(x, sa))? + self.mean_y(|y| self.f(ta, y))?);
        let middle = double_integral(self.r, self.f, self.alpha, self.cfg)? / self.r.area();
        // mean_x/mean_y already divide by one side length each.
        let right = 0.5
            * (self.mean_x(|x| Ok((d - sa) * self.f(x, c)? + (sa - c) * self.f(x, d)?))? / (d - c)
                + self.mean_y(|y| Ok((b - ta) * self.f(a, y)? + (ta - a) * self.f(b, y)?))? / (b - a));
        Ok(vec![
            member("1/2 [ (1/(b-a)) ∫ f(x,s_α) ◇x + (1/(d-c)) ∫ f(t_α,y) ◇y ]", left),
            member("(1/((b-a)(d-c))) ∫∫ f(x,y) ◇x ◇y", middle),
            member(
                "(1/(2(b-a)(d-c))) [ ∫ ((d-s_α) f(x,c) + (s_α-c) f(x,d)) ◇x + ∫ ((b-t_α) f(a,y) + (t_α-a) f(b,y)) ◇y ]",
                right,
            ),
        ])
    }

    fn midpoints(&self) -> Result<(f64, f64)> {
        let (a, b) = self.r.x_window();
        let (c, d) = self.r.y_window();
        let mx = 0.5 * (a + b);
        let my = 0.5 * (c + d);
        let mx = self
            .r
            .t1()
            .snap(mx)
            .map_err(|_| Error::MidpointNotInScale { axis: Axis::X, midpoint: mx })?;
        let my = self
            .r
            .t2()
            .snap(my)
            .map_err(|_| Error::MidpointNotInScale { axis: Axis::Y, midpoint: my })?;
        Ok((mx, my))
    }

    fn mr2_members(&self) -> Result<Vec<Member>> {
        let (mx, my) = self.midpoints()?;
        let lhs = self.f(mx, self.sa)? + self.f(self.ta, my)?;
        let rhs = self.mean_x(|x| self.f(x, my))? + self.mean_y(|y| self.f(mx, y))?;
        Ok(vec![
            member("f((a+b)/2, s_α) + f(t_α, (c+d)/2)", lhs),
            member("(1/(b-a)) ∫ f(x,(c+d)/2) ◇x + (1/(d-c)) ∫ f((a+b)/2,y) ◇y", rhs),
        ])
    }

    fn coefficients(&self) -> Coefficients {
        let (a, b) = self.r.x_window();
        let (c, d) = self.r.y_window();
        let left = (b - self.ta) / (b - a);
        let right = (self.ta - a) / (b - a);
        let low = (d - self.sa) / (d - c);
        let high = (self.sa - c) / (d - c);
        Coefficients {
            a1: left + low,
            a2: left + high,
            a3: right + low,
            a4: right + high,
        }
    }

    fn mr3_members(&self) -> Result<(Vec<Member>, Coefficients)> {
        let (a, b) = self.r.x_window();
        let (c, d) = self.r.y_window();
        let lhs = self.mean_x(|x| Ok(self.f(x, c)? + self.f(x, d)?))? + self.mean_y(|y| Ok(self.f(a, y)? + self.f(b, y)?))?;
        let k = self.coefficients();
        let rhs = k.a1 * self.f(a, c)? + k.a2 * self.f(a, d)? + k.a3 * self.f(b, c)? + k.a4 * self.f(b, d)?;
        Ok((
            vec![
                member("(1/(b-a)) ∫ [f(x,c)+f(x,d)] ◇x + (1/(d-c)) ∫ [f(a,y)+f(b,y)] ◇y", lhs),
                member("A1 f(a,c) + A2 f(a,d) + A3 f(b,c) + A4 f(b,d)", rhs),
            ],
            k,
        ))
    }

    fn finish(&self, id: ChainId, members: Vec<Member>, hyp: Hypothesis) -> ChainReport {
        let mut rep = report(id, self.alpha, self.f.label(), chain(members), hyp);
        rep.t_alpha = Some(self.ta);
        rep.s_alpha = Some(self.sa);
        rep
    }
}

/// The three-member chain: section means ≤ double mean ≤ weighted boundary means.
pub fn verify_mr1(r: &RectangleDomain, f: &RealFunction2D, alpha: Alpha, opts: &VerifyOptions) -> Result<ChainReport> {
    let hyp = hypothesis_2d(r, f, opts)?;
    let ctx = Rect::new(r, f, alpha, &opts.quadrature)?;
    Ok(ctx.finish(ChainId::Mr1, ctx.mr1_members()?, hyp))
}

/// Midpoint-line inequality; both window midpoints must be scale members.
pub fn verify_mr2(r: &RectangleDomain, f: &RealFunction2D, alpha: Alpha, opts: &VerifyOptions) -> Result<ChainReport> {
    let ctx = Rect::new(r, f, alpha, &opts.quadrature)?;
    ctx.midpoints()?;
    let hyp = hypothesis_2d(r, f, opts)?;
    Ok(ctx.finish(ChainId::Mr2, ctx.mr2_members()?, hyp))
}

/// Boundary means ≤ A₁f(a,c) + A₂f(a,d) + A₃f(b,c) + A₄f(b,d).
pub fn verify_mr3(r: &RectangleDomain, f: &RealFunction2D, alpha: Alpha, opts: &VerifyOptions) -> Result<ChainReport> {
    let hyp = hypothesis_2d(r, f, opts)?;
    let ctx = Rect::new(r, f, alpha, &opts.quadrature)?;
    let (members, k) = ctx.mr3_members()?;
    let mut rep = ctx.finish(ChainId::Mr3, members, hyp);
    rep.coefficients = Some(k);
    Ok(rep)
}

/// The integer-grid example on ℤ × ℤ, [0, 2] × [1, 3]:
///
/// f(0,2) + f(1,1) + f(1,3) + f(2,2) ≤ f(0,1) + f(0,3) + f(2,1) + f(2,3).
///
/// Both sides are evaluated literally; the boundary inequality at α = 1 is
/// evaluated through the general machinery and checked against its expanded
/// closed forms, so the two routes must agree before a verdict is issued.
pub fn verify_grid_example(f: &RealFunction2D, opts: &VerifyOptions) -> Result<ChainReport> {
    let r = RectangleDomain::new(TimeScale::integers(0, 2)?, (0.0, 2.0), TimeScale::integers(1, 3)?, (1.0, 3.0))?;
    let hyp = hypothesis_2d(&r, f, opts)?;
    let ctx = Rect::new(&r, f, Alpha::ONE, &opts.quadrature)?;
    let (mr3, k) = ctx.mr3_members()?;

    let v = |x: f64, y: f64| f.eval(x, y);
    let lhs = v(0.0, 2.0)? + v(1.0, 1.0)? + v(1.0, 3.0)? + v(2.0, 2.0)?;
    let rhs = v(0.0, 1.0)? + v(0.0, 3.0)? + v(2.0, 1.0)? + v(2.0, 3.0)?;

    let expanded_lhs =
        v(0.0, 1.0)? + 0.5 * (v(0.0, 2.0)? + v(0.0, 3.0)? + v(1.0, 1.0)? + v(1.0, 3.0)? + v(2.0, 1.0)? + v(2.0, 2.0)?);
    let expanded_rhs = 1.5 * v(0.0, 1.0)? + v(0.0, 3.0)? + v(2.0, 1.0)? + 0.5 * v(2.0, 3.0)?;
    let agree = |p: f64, q: f64| (p - q).abs() <= 1e-12 * p.abs().max(q.abs()).max(1.0);
    if !agree(mr3[0].value, expanded_lhs) || !agree(mr3[1].value, expanded_rhs) {
        return Err(Error::NumericFailure(format!(
            "boundary-inequality members ({}, {}) disagree with their expansions ({expanded_lhs}, {expanded_rhs})",
            mr3[0].value, mr3[1].value
        )));
    }

    let mut rep = ctx.finish(
        ChainId::GridExample,
        vec![
            member("f(0,2) + f(1,1) + f(1,3) + f(2,2)", lhs),
            member("f(0,1) + f(0,3) + f(2,1) + f(2,3)", rhs),
        ],
        hyp,
    );
    rep.coefficients = Some(k);
    rep.notes.push(format!(
        "boundary form at alpha=1: {} <= {}",
        mr3[0].value, mr3[1].value
    ));
    Ok(rep)
}

/// The five-member chain on the real rectangle [a, b] × [c, d], spliced
/// from the three two-variable chains at α = ½:
/// midpoint ≤ mid-line means ≤ double mean ≤ boundary means ≤ corner average.
pub fn verify_dragomir_r(f: &RealFunction2D, a: f64, b: f64, c: f64, d: f64, opts: &VerifyOptions) -> Result<ChainReport> {
    if !(a < b) {
        return Err(Error::BadWindow { a, b });
    }
    if !(c < d) {
        return Err(Error::BadWindow { a: c, b: d });
    }
    let r = RectangleDomain::new(TimeScale::interval(a, b)?, (a, b), TimeScale::interval(c, d)?, (c, d))?;
    let hyp = hypothesis_2d(&r, f, opts)?;
    let ctx = Rect::new(&r, f, Alpha::HALF, &opts.quadrature)?;
    let mr1 = ctx.mr1_members()?;
    let mr2 = ctx.mr2_members()?;
    let (mr3, _) = ctx.mr3_members()?;
    let members = vec![
        member("f((a+b)/2, (c+d)/2)", 0.5 * mr2[0].value),
        member("1/2 [ (1/(b-a)) ∫ f(x,(c+d)/2) dx + (1/(d-c)) ∫ f((a+b)/2,y) dy ]", mr1[0].value),
        member("(1/((b-a)(d-c))) ∫∫ f(x,y) dx dy", mr1[1].value),
        member(
            "(1/(4(b-a))) ∫ [f(x,c)+f(x,d)] dx + (1/(4(d-c))) ∫ [f(a,y)+f(b,y)] dy",
            mr1[2].value,
        ),
        member("(f(a,c) + f(a,d) + f(b,c) + f(b,d)) / 4", 0.25 * mr3[1].value),
    ];
    Ok(ctx.finish(ChainId::DragomirR, members, hyp))
}

/// MR1–MR3 for one α; errors are kept per chain.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub alpha: Alpha,
    pub mr1: Result<ChainReport>,
    pub mr2: Result<ChainReport>,
    pub mr3: Result<ChainReport>,
}

impl SweepEntry {
    pub fn reports(&self) -> [&Result<ChainReport>; 3] {
        [&self.mr1, &self.mr2, &self.mr3]
    }
}

/// Runs MR1–MR3 for each α (in parallel), returning entries in input order.
pub fn alpha_sweep(r: &RectangleDomain, f: &RealFunction2D, alphas: &[Alpha], opts: &VerifyOptions) -> Vec<SweepEntry> {
    alphas
        .par_iter()
        .map(|&alpha| SweepEntry {
            alpha,
            mr1: verify_mr1(r, f, alpha, opts),
            mr2: verify_mr2(r, f, alpha, opts),
            mr3: verify_mr3(r, f, alpha, opts),
        })
        .collect()
}
