//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use tscalc_core::timescale::Segment;
use tscalc_core::TimeScale;

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// `n` sorted points whose gaps are multiples of 1/16 in [1/16, 2].
pub fn random_points(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut t = rng.gen_range(-48..=48) as f64 / 16.0;
    let mut out = vec![t];
    for _ in 1..n {
        t += rng.gen_range(1..=32) as f64 / 16.0;
        out.push(t);
    }
    out
}

/// `n` evenly spaced points k·h, h ∈ {1/4, 1/2, 1}.
pub fn random_grid(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let h = *[0.25, 0.5, 1.0].choose(rng).unwrap();
    let k0: i32 = rng.gen_range(-6..=6);
    (0..n as i32).map(|k| (k0 + k) as f64 * h).collect()
}

/// A discrete scale with `lo..=hi` atoms, half the time an even grid.
pub fn random_discrete(rng: &mut impl Rng, lo: usize, hi: usize) -> (TimeScale, Vec<f64>) {
    let n = rng.gen_range(lo..=hi);
    let pts = if rng.gen_bool(0.5) { random_grid(rng, n) } else { random_points(rng, n) };
    (TimeScale::points(pts.clone()).unwrap(), pts)
}

fn coef(rng: &mut impl Rng, lo: f64, hi: f64) -> String {
    let v = (rng.gen_range(lo..hi) * 1000.0).round() / 1000.0;
    format!("({v})")
}

/// One convex term in x (and y when `two_d`): a quadratic with nonnegative
/// leading coefficients, a max of two affine maps, or exp of an affine map.
pub fn convex_term(rng: &mut impl Rng, two_d: bool) -> String {
    match rng.gen_range(0..3) {
        0 => {
            let mut s = format!("{}*x^2 + {}*x", coef(rng, 0.0, 2.0), coef(rng, -3.0, 3.0));
            if two_d {
                s += &format!(
                    " + {}*y^2 + {}*x*y + {}*y",
                    coef(rng, 0.0, 2.0),
                    coef(rng, -2.0, 2.0),
                    coef(rng, -3.0, 3.0)
                );
            }
            s + &format!(" + {}", coef(rng, -5.0, 5.0))
        }
        1 => {
            let mut affine = || {
                let mut s = format!("{}*x + {}", coef(rng, -3.0, 3.0), coef(rng, -5.0, 5.0));
                if two_d {
                    s += &format!(" + {}*y", coef(rng, -3.0, 3.0));
                }
                s
            };
            let p = affine();
            let q = affine();
            format!("max({p}, {q})")
        }
        _ => {
            let mut s = format!("{}*x + {}", coef(rng, -0.4, 0.4), coef(rng, -1.0, 1.0));
            if two_d {
                s += &format!(" + {}*y", coef(rng, -0.4, 0.4));
            }
            format!("{}*exp({s})", coef(rng, 0.1, 2.0))
        }
    }
}

/// A sum of one to four convex terms.
pub fn convex_expr(rng: &mut impl Rng, two_d: bool) -> String {
    let n = rng.gen_range(1..=4);
    (0..n).map(|_| format!("({})", convex_term(rng, two_d))).collect::<Vec<_>>().join(" + ")
}

/// Σ f(t_i)·(t_{i+1} − t_i) over consecutive points, left to right.
pub fn sum_delta(pts: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    pts.windows(2).fold(0.0, |acc, w| acc + (w[1] - w[0]) * f(w[0]))
}

/// Σ f(t_{i+1})·(t_{i+1} − t_i) over consecutive points, left to right.
pub fn sum_nabla(pts: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    pts.windows(2).fold(0.0, |acc, w| acc + (w[1] - w[0]) * f(w[1]))
}

/// Composite 5-point Gauss–Legendre rule with `panels` equal panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let c = lo + (k as f64 + 0.5) * h;
        total += 0.5 * h * X.iter().zip(W).map(|(x, w)| w * f(c + 0.5 * h * x)).sum::<f64>();
    }
    total
}

/// Smooth test integrands with closed-form antiderivatives.
#[derive(Debug, Clone, Copy)]
pub enum Smooth {
    /// c0 + c1 t + c2 t² + c3 t³
    Poly([f64; 4]),
    /// c·exp(p t)
    Exp { c: f64, p: f64 },
    /// c·sin(p t)
    Sin { c: f64, p: f64 },
}

impl Smooth {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Smooth::Poly(c) => c[0] + t * (c[1] + t * (c[2] + t * c[3])),
            Smooth::Exp { c, p } => c * (p * t).exp(),
            Smooth::Sin { c, p } => c * (p * t).sin(),
        }
    }

    pub fn antiderivative(&self, t: f64) -> f64 {
        match *self {
            Smooth::Poly(c) => t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0))),
            Smooth::Exp { c, p } => c * (p * t).exp() / p,
            Smooth::Sin { c, p } => -c * (p * t).cos() / p,
        }
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        match rng.gen_range(0..3) {
            0 => Smooth::Poly([0; 4].map(|_| rng.gen_range(-2.0..2.0))),
            1 => Smooth::Exp {
                c: rng.gen_range(-2.0..2.0),
                p: rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            },
            _ => Smooth::Sin {
                c: rng.gen_range(-2.0..2.0),
                p: rng.gen_range(0.2..3.0),
            },
        }
    }

    pub fn function(self) -> tscalc_core::RealFunction1D {
        tscalc_core::RealFunction1D::new(format!("{self:?}"), move |t| self.eval(t))
    }
}

/// A random scale from one of six families: ℤ, hℤ, scattered points,
/// an interval, an interval–points–interval union, or a 2^k scale.
pub fn random_scale(rng: &mut impl Rng) -> (String, TimeScale) {
    match rng.gen_range(0..6) {
        0 => {
            let lo = rng.gen_range(-5..5);
            ("Z".into(), TimeScale::integers(lo, lo + rng.gen_range(2..15)).unwrap())
        }
        1 => {
            let h = if rng.gen_bool(0.5) { 0.1 } else { 0.25 };
            let k0 = rng.gen_range(-10..10) as f64;
            let n = rng.gen_range(2..25) as f64;
            (format!("{h}Z"), TimeScale::h_grid(h, k0 * h, (k0 + n) * h).unwrap())
        }
        2 => {
            let n = rng.gen_range(2..15);
            ("points".into(), TimeScale::points(random_points(rng, n)).unwrap())
        }
        3 => {
            let lo = rng.gen_range(-3.0..3.0);
            ("interval".into(), TimeScale::interval(lo, lo + rng.gen_range(0.5..4.0)).unwrap())
        }
        4 => {
            let lo = rng.gen_range(-2.0..2.0);
            let hi = lo + rng.gen_range(0.3..2.0);
            let p = hi + rng.gen_range(0.2..1.0);
            let q = p + rng.gen_range(0.2..1.0);
            let lo2 = q + rng.gen_range(0.2..1.0);
            let segs = [
                Segment::Interval { lo, hi },
                Segment::Point(p),
                Segment::Point(q),
                Segment::Interval { lo: lo2, hi: lo2 + rng.gen_range(0.3..2.0) },
            ];
            ("union".into(), TimeScale::from_segments(segs).unwrap())
        }
        _ => ("2^Z".into(), TimeScale::q_scale(2.0, rng.gen_range(-3..0), rng.gen_range(1..4)).unwrap()),
    }
}

/// Points of the scale usable as window ends, in increasing order.
pub fn window_points(ts: &TimeScale) -> Vec<f64> {
    let mut out = Vec::new();
    for seg in ts.pieces() {
        match *seg {
            Segment::Point(p) => out.push(p),
            Segment::Interval { lo, hi } => out.extend([lo, lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0, hi]),
        }
    }
    out
}
