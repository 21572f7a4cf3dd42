//! End-to-end acceptance checks, one test per criterion. Each writes a
//! single PASS/FAIL line straight to stderr, so it shows up without
//! `--nocapture`, and fails the test on any miss.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{rel_close, sum_delta, sum_nabla, Smooth};
use tscalc_core::calculus::{delta_integral, diamond_alpha_integral, diamond_integrate_with, nabla_integral, t_alpha};
use tscalc_core::exact::{self, ratio};
use tscalc_core::expr::{parse, Expr, ParseError, Var};
use tscalc_core::inequalities::{
    verify_dinu_1d, verify_dragomir_r, verify_mr1, verify_mr2, verify_mr3, verify_grid_example, ChainReport,
};
use tscalc_core::rectangle::{darboux_report, iterated_integral, Order, Partition, ALPHA_DISCREPANCY_NOTE};
use tscalc_core::report::{from_json, to_json};
use tscalc_core::timescale::Segment;
use tscalc_core::{Alpha, QuadratureConfig, RealFunction1D, RealFunction2D, RectangleDomain, Rule, TimeScale, VerifyOptions};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn report(n: u32, name: &str, limit: Option<Duration>, body: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let mut outcome = body();
    let took = start.elapsed();
    if let (Ok(_), Some(limit)) = (&outcome, limit) {
        if took > limit {
            outcome = Err(format!("took {took:.2?}, limit {limit:?}"));
        }
    }
    let line = match &outcome {
        Ok(detail) => format!("criterion {n} ({name}): PASS in {took:.2?} - {detail}\n"),
        Err(why) => format!("criterion {n} ({name}): FAIL in {took:.2?} - {why}\n"),
    };
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    if let Err(why) = outcome {
        panic!("criterion {n} failed: {why}");
    }
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn f2(src: &str) -> RealFunction2D {
    RealFunction2D::parse(src).unwrap()
}

fn verdicts_hold(r: &ChainReport, min_slack: f64) -> Result<(), String> {
    for v in &r.verdicts {
        ensure!(
            v.satisfied && v.slack >= min_slack,
            "{:?} alpha={} f={:?}: {} <= {} fails (slack {:e})",
            r.chain_id,
            r.alpha,
            r.function,
            v.left,
            v.right,
            v.slack
        );
    }
    Ok(())
}

#[test]
fn criterion_1_integer_grid_example() {
    report(1, "integer-grid example", Some(Duration::from_secs(1)), || {
        let t1 = TimeScale::integers(0, 2).map_err(|e| e.to_string())?;
        let t2 = TimeScale::integers(1, 3).map_err(|e| e.to_string())?;
        let ta = exact::t_alpha(&t1, 0.0, 2.0, Alpha::ONE).map_err(|e| e.to_string())?;
        let sa = exact::t_alpha(&t2, 1.0, 3.0, Alpha::ONE).map_err(|e| e.to_string())?;
        ensure!(ta == ratio(1, 2) && sa == ratio(3, 2), "t1 = {ta}, s1 = {sa}");
        let k = exact::corner_coefficients(&t1, (0.0, 2.0), &t2, (1.0, 3.0), Alpha::ONE).map_err(|e| e.to_string())?;
        ensure!(
            k == [ratio(3, 2), ratio(1, 1), ratio(1, 1), ratio(1, 2)],
            "coefficients {k:?}"
        );
        // The floating-point path must land on the same dyadic values exactly.
        let rep = verify_mr3(
            &RectangleDomain::new(t1, (0.0, 2.0), t2, (1.0, 3.0)).map_err(|e| e.to_string())?,
            &f2("x^2+y^2"),
            Alpha::ONE,
            &opts(),
        )
        .map_err(|e| e.to_string())?;
        let c = rep.coefficients.unwrap();
        ensure!(
            (c.a1, c.a2, c.a3, c.a4, rep.t_alpha, rep.s_alpha) == (1.5, 1.0, 1.0, 0.5, Some(0.5), Some(1.5)),
            "float path {c:?}"
        );

        let oracle = |f: &dyn Fn(f64, f64) -> f64| {
            (
                f(0.0, 2.0) + f(1.0, 1.0) + f(1.0, 3.0) + f(2.0, 2.0),
                f(0.0, 1.0) + f(0.0, 3.0) + f(2.0, 1.0) + f(2.0, 3.0),
            )
        };
        let cases: [(&str, &dyn Fn(f64, f64) -> f64); 4] = [
            ("x^2+y^2", &|x, y| x * x + y * y),
            ("(x+y)^2", &|x, y| (x + y) * (x + y)),
            ("exp(x+y)", &|x, y| (x + y).exp()),
            ("max(x,y)", &|x: f64, y: f64| x.max(y)),
        ];
        for (src, f) in cases {
            let rep = verify_grid_example(&f2(src), &opts()).map_err(|e| format!("{src}: {e}"))?;
            let (l, r) = oracle(f);
            ensure!(
                rel_close(rep.member(0), l, 1e-15) && rel_close(rep.member(1), r, 1e-15),
                "{src}: members {:?} vs oracle ({l}, {r})",
                rep.members
            );
            verdicts_hold(&rep, 0.0)?;
        }
        let rep = verify_grid_example(&f2("x+y"), &opts()).map_err(|e| e.to_string())?;
        ensure!(rep.verdicts[0].satisfied && rep.verdicts[0].slack.abs() <= 1e-12, "x+y slack {}", rep.verdicts[0].slack);
        Ok(format!(
            "t1=1/2 s1=3/2 A=(3/2,1,1,1/2) exact; 4 functions ordered; x+y slack {}",
            rep.verdicts[0].slack
        ))
    });
}

#[test]
fn criterion_2_half_weight_first_moment() {
    report(2, "first moment at alpha=1/2", Some(Duration::from_secs(5)), || {
        let union = TimeScale::from_segments([
            Segment::Interval { lo: 0.0, hi: 1.0 },
            Segment::Point(1.5),
            Segment::Point(2.0),
            Segment::Interval { lo: 2.5, hi: 3.0 },
        ])
        .map_err(|e| e.to_string())?;
        let families: Vec<(&str, TimeScale, Vec<(f64, f64)>)> = vec![
            ("Z", TimeScale::integers(-5, 12).unwrap(), vec![(-5.0, 12.0), (0.0, 1.0), (2.0, 7.0), (-3.0, 3.0)]),
            ("0.1Z", TimeScale::h_grid(0.1, 0.0, 3.0).unwrap(), vec![(0.0, 3.0), (0.3, 1.7), (1.0, 1.1)]),
            ("0.25Z", TimeScale::h_grid(0.25, -2.0, 2.0).unwrap(), vec![(-2.0, 2.0), (-0.75, 1.5)]),
            ("2^Z", TimeScale::q_scale(2.0, -3, 8).unwrap(), vec![(0.125, 256.0), (1.0, 2.0), (0.5, 32.0)]),
            ("interval", TimeScale::interval(-1.0, 4.0).unwrap(), vec![(-1.0, 4.0), (0.3, 2.9)]),
            ("union", union, vec![(0.0, 3.0), (0.5, 2.0), (1.5, 2.75), (0.0, 1.5), (1.0, 2.5)]),
        ];
        let mut checked = 0;
        for (name, ts, windows) in &families {
            for &(a, b) in windows {
                let m = diamond_integrate_with(ts, Ok, a, b, Alpha::HALF, &cfg()).map_err(|e| e.to_string())?;
                let want = (b * b - a * a) / 2.0;
                ensure!(rel_close(m, want, 1e-9), "{name} [{a}, {b}]: {m} vs {want}");
                let ta = t_alpha(ts, a, b, Alpha::HALF, &cfg()).map_err(|e| e.to_string())?;
                ensure!(rel_close(ta, (a + b) / 2.0, 1e-9), "{name} [{a}, {b}]: t = {ta}");
                checked += 1;
            }
        }
        Ok(format!("{checked} windows over 6 scale families"))
    });
}

#[test]
fn criterion_3_real_rectangle_chain() {
    report(3, "five-member chain on the real rectangle", None, || {
        let rep = verify_dragomir_r(&f2("x^2+y^2"), 0.0, 1.0, 0.0, 1.0, &opts()).map_err(|e| e.to_string())?;
        let want = [0.5, 7.0 / 12.0, 2.0 / 3.0, 5.0 / 6.0, 1.0];
        ensure!(rep.members.len() == 5 && rep.verdicts.len() == 4, "shape");
        for (m, w) in rep.members.iter().zip(want) {
            ensure!(rel_close(m.value, w, 1e-8), "{} = {} vs {w}", m.label, m.value);
        }
        verdicts_hold(&rep, -1e-9)?;
        for (src, rect) in [("2 + 3*x - y", (0.0, 1.0, 0.0, 1.0)), ("-1.5*x + 0.25*y + 4", (-2.0, 3.0, 1.0, 5.0))] {
            let rep = verify_dragomir_r(&f2(src), rect.0, rect.1, rect.2, rect.3, &opts()).map_err(|e| e.to_string())?;
            let first = rep.member(0);
            ensure!(
                rep.members.iter().all(|m| rel_close(m.value, first, 1e-8)),
                "{src}: members {:?}",
                rep.members
            );
        }
        Ok("members [1/2, 7/12, 2/3, 5/6, 1] within 1e-8; affine members equal".into())
    });
}

#[test]
fn criterion_4_random_chain_cases() {
    report(4, "randomized chain property suite", Some(Duration::from_secs(60)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c4a1);
        let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
        let cases = 240;
        let (mut reports, mut mr2_runs) = (0, 0);
        let mut worst: f64 = f64::INFINITY;
        for case in 0..cases {
            // Every third case uses odd-sized even grids so both window
            // midpoints are scale members.
            let ((t1, p1), (t2, p2)) = if case % 3 == 0 {
                let mut grid = || {
                    let n = 2 * rng.gen_range(1..=9) + 1;
                    let p = common::random_grid(&mut rng, n);
                    (TimeScale::points(p.clone()).unwrap(), p)
                };
                (grid(), grid())
            } else {
                (common::random_discrete(&mut rng, 3, 20), common::random_discrete(&mut rng, 3, 20))
            };
            let alpha = Alpha::new(alphas[case % alphas.len()]).unwrap();
            let src1 = common::convex_expr(&mut rng, false);
            let src2 = common::convex_expr(&mut rng, true);
            let g = RealFunction1D::parse(&src1).map_err(|e| format!("{src1}: {e}"))?;
            let f = RealFunction2D::parse(&src2).map_err(|e| format!("{src2}: {e}"))?;
            let (a, b) = (p1[0], p1[p1.len() - 1]);
            let (c, d) = (p2[0], p2[p2.len() - 1]);
            let r = RectangleDomain::new(t1.clone(), (a, b), t2.clone(), (c, d)).map_err(|e| e.to_string())?;

            let mut run = Vec::new();
            run.push(verify_dinu_1d(&t1, &g, a, b, alpha, &opts()));
            run.push(verify_mr1(&r, &f, alpha, &opts()));
            run.push(verify_mr3(&r, &f, alpha, &opts()));
            if t1.contains((a + b) / 2.0) && t2.contains((c + d) / 2.0) {
                run.push(verify_mr2(&r, &f, alpha, &opts()));
                mr2_runs += 1;
            }
            for rep in run {
                let rep = rep.map_err(|e| format!("case {case} ({src1} | {src2}): {e}"))?;
                verdicts_hold(&rep, -1e-9).map_err(|e| format!("case {case}: {e}"))?;
                worst = rep.verdicts.iter().fold(worst, |w, v| w.min(v.slack));
                reports += 1;
            }
        }
        ensure!(mr2_runs >= cases / 3, "only {mr2_runs} cases had member midpoints");
        Ok(format!("{cases} cases, {reports} reports ({mr2_runs} with midpoint chain), min slack {worst:e}"))
    });
}

struct Case {
    name: String,
    ts: TimeScale,
    f: Smooth,
    g: Smooth,
    alpha: Alpha,
    c: f64,
    a: f64,
    b: f64,
    t: f64,
}

fn draw_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (name, ts) = common::random_scale(&mut rng);
    let pts = common::window_points(&ts);
    let mut idx = [0; 3].map(|_| rng.gen_range(0..pts.len()));
    idx.sort();
    Case {
        name,
        f: Smooth::random(&mut rng),
        g: Smooth::random(&mut rng),
        alpha: Alpha::new(*[0.0, 0.3, 0.5, 0.8, 1.0, rng.gen_range(0.0..1.0)].get(rng.gen_range(0..6)).unwrap()).unwrap(),
        c: rng.gen_range(-3.0..3.0),
        a: pts[idx[0]],
        b: pts[idx[1]],
        t: pts[idx[2]],
        ts,
    }
}

fn run_property(cases: u32, prop: impl Fn(&Case) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&any::<u64>(), |seed| prop(&draw_case(seed))).map_err(|e| e.to_string())
}

fn int(c: &Case, f: Smooth, a: f64, b: f64) -> Result<f64, TestCaseError> {
    diamond_alpha_integral(&c.ts, &f.function(), a, b, c.alpha, &cfg()).map_err(|e| TestCaseError::fail(e.to_string()))
}

fn int_fn(c: &Case, f: impl Fn(f64) -> f64 + Send + Sync + 'static, a: f64, b: f64) -> Result<f64, TestCaseError> {
    diamond_alpha_integral(&c.ts, &RealFunction1D::new("h", f), a, b, c.alpha, &cfg())
        .map_err(|e| TestCaseError::fail(e.to_string()))
}

fn tol(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

#[test]
fn criterion_5_integral_invariants() {
    report(5, "integral-calculus invariants", None, || {
        let n = 96;
        run_property(n, |c| {
            let fd = delta_integral(&c.ts, &c.f.function(), c.a, c.t, &cfg()).unwrap();
            let fn_ = nabla_integral(&c.ts, &c.f.function(), c.a, c.t, &cfg()).unwrap();
            let w = c.alpha.value();
            let want = if w == 1.0 { fd } else if w == 0.0 { fn_ } else { w * fd + (1.0 - w) * fn_ };
            prop_assert_eq!(int(c, c.f, c.a, c.t)?, want, "{}", c.name);
            Ok(())
        })
        .map_err(|e| format!("alpha-affinity: {e}"))?;

        run_property(n, |c| {
            let (f, g) = (c.f, c.g);
            let sum = int_fn(c, move |t| f.eval(t) + g.eval(t), c.a, c.t)?;
            let (i, j) = (int(c, f, c.a, c.t)?, int(c, g, c.a, c.t)?);
            prop_assert!((sum - (i + j)).abs() <= tol(i.abs() + j.abs()), "{}: {sum} vs {i} + {j}", c.name);
            let k = c.c;
            let scaled = int_fn(c, move |t| k * f.eval(t), c.a, c.t)?;
            prop_assert!((scaled - k * i).abs() <= tol((k * i).abs()), "{}: {scaled} vs {k}*{i}", c.name);
            Ok(())
        })
        .map_err(|e| format!("linearity: {e}"))?;

        run_property(n, |c| {
            let whole = int(c, c.f, c.a, c.t)?;
            let (p, q) = (int(c, c.f, c.a, c.b)?, int(c, c.f, c.b, c.t)?);
            prop_assert!((whole - (p + q)).abs() <= tol(p.abs() + q.abs()), "{}: {whole} vs {p} + {q}", c.name);
            Ok(())
        })
        .map_err(|e| format!("additivity: {e}"))?;

        run_property(n, |c| {
            prop_assert_eq!(int(c, c.f, c.t, c.a)?, -int(c, c.f, c.a, c.t)?);
            prop_assert_eq!(int(c, c.f, c.b, c.b)?, 0.0);
            Ok(())
        })
        .map_err(|e| format!("sign reversal / empty window: {e}"))?;

        run_property(n, |c| {
            let f = c.f;
            let sq = int_fn(c, move |t| f.eval(t) * f.eval(t), c.a, c.t)?;
            prop_assert!(sq >= 0.0, "{}: integral of f^2 is {sq}", c.name);
            let lower = int(c, f, c.a, c.t)?;
            let upper = int_fn(c, move |t| f.eval(t) + 0.5 + t * t, c.a, c.t)?;
            prop_assert!(lower <= upper + 1e-12, "{}: {lower} > {upper}", c.name);
            Ok(())
        })
        .map_err(|e| format!("monotonicity: {e}"))?;

        // Direct summation on Z and hZ, interval scales against closed forms
        // and an independent Gauss–Legendre rule.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..n {
            let f = Smooth::random(&mut rng);
            let lo = rng.gen_range(-6..4);
            let hi = lo + rng.gen_range(1..12);
            let z = TimeScale::integers(lo - 2, hi + 2).unwrap();
            let pts: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();
            let (a, b) = (lo as f64, hi as f64);
            let d = delta_integral(&z, &f.function(), a, b, &cfg()).unwrap();
            let nb = nabla_integral(&z, &f.function(), a, b, &cfg()).unwrap();
            ensure!(d == pts[..pts.len() - 1].iter().fold(0.0, |s, &t| s + f.eval(t)), "Z delta sum {f:?}");
            ensure!(nb == pts[1..].iter().fold(0.0, |s, &t| s + f.eval(t)), "Z nabla sum {f:?}");

            for h in [0.25, 0.1] {
                let g = TimeScale::h_grid(h, (lo - 2) as f64 * h, (hi + 2) as f64 * h).unwrap();
                let hp: Vec<f64> = (lo..=hi).map(|k| k as f64 * h).collect();
                let d = delta_integral(&g, &f.function(), hp[0], hp[hp.len() - 1], &cfg()).unwrap();
                let nb = nabla_integral(&g, &f.function(), hp[0], hp[hp.len() - 1], &cfg()).unwrap();
                let naive_d = hp[..hp.len() - 1].iter().fold(0.0, |s, &t| s + f.eval(t) * h);
                let naive_n = hp[1..].iter().fold(0.0, |s, &t| s + f.eval(t) * h);
                if h == 0.25 {
                    ensure!(d == naive_d && nb == naive_n, "0.25Z sums {f:?}: {d} vs {naive_d}");
                } else {
                    ensure!(rel_close(d, naive_d, 1e-12) && rel_close(nb, naive_n, 1e-12), "0.1Z sums {f:?}");
                    ensure!(d == sum_delta(&hp, |t| f.eval(t)) && nb == sum_nabla(&hp, |t| f.eval(t)), "0.1Z gap sums");
                }
            }

            let (a, b) = (rng.gen_range(-3.0..0.0), rng.gen_range(0.5..3.0));
            let i = TimeScale::interval(a, b).unwrap();
            let closed = f.antiderivative(b) - f.antiderivative(a);
            let gl = common::gauss_legendre(|t| f.eval(t), a, b, 64);
            for alpha in [Alpha::ZERO, Alpha::new(0.37).unwrap(), Alpha::ONE] {
                let v = diamond_alpha_integral(&i, &f.function(), a, b, alpha, &cfg()).unwrap();
                ensure!(rel_close(v, closed, 1e-9) && rel_close(v, gl, 1e-9), "interval {f:?}: {v} vs {closed} / {gl}");
            }
        }
        Ok(format!(
            "{n} cases each: affinity, linearity, additivity, reversal, empty window, monotonicity; summation and quadrature oracles agree"
        ))
    });
}

#[test]
fn criterion_6_darboux_on_discrete_windows() {
    report(6, "Darboux diagnostic", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut checked = 0;
        for case in 0..60 {
            let (t1, p1) = common::random_discrete(&mut rng, 2, 12);
            let (t2, p2) = common::random_discrete(&mut rng, 2, 12);
            let src = common::convex_expr(&mut rng, true);
            let f = f2(&src);
            let (a, b) = (p1[0], p1[p1.len() - 1]);
            let (c, d) = (p2[0], p2[p2.len() - 1]);
            let r = RectangleDomain::new(t1, (a, b), t2, (c, d)).unwrap();
            let alpha = Alpha::new([0.0, 0.5, 1.0, 0.3][case % 4]).unwrap();
            let rep = darboux_report(&r, &f, &Partition::AtomLevel, alpha, &cfg()).map_err(|e| e.to_string())?;
            let dd = iterated_integral(&r, &f, Rule::Delta, Rule::Delta, Order::XThenY, &cfg()).unwrap();
            ensure!(
                rep.bounds.lower == rep.bounds.upper && rep.bounds.lower == dd && rep.delta_delta == dd,
                "case {case}: L={} U={} dd={dd}",
                rep.bounds.lower,
                rep.bounds.upper
            );
            ensure!(rep.bounds.partition_atoms == (p1.len() - 1) * (p2.len() - 1), "cell count");
            let oracle = p2.windows(2).fold(0.0, |s, yw| {
                s + (yw[1] - yw[0]) * p1.windows(2).fold(0.0, |t, xw| t + (xw[1] - xw[0]) * f.eval(xw[0], yw[0]).unwrap())
            });
            ensure!(dd == oracle, "case {case}: dd {dd} vs summation {oracle}");
            match alpha.value() {
                v if v == 1.0 => ensure!(rep.note.is_none(), "note at alpha=1"),
                _ => ensure!(rep.note.as_deref() == Some(ALPHA_DISCREPANCY_NOTE), "missing note at alpha={alpha}"),
            }
            checked += 1;
        }
        Ok(format!("{checked} discrete windows: lower == upper == delta-delta bit-for-bit; note present iff alpha != 1"))
    });
}

/// One-rule chain members computed from scratch: `rule` decides the
/// evaluation point of each gap on both axes.
struct PureChain {
    mr1: [f64; 3],
    mr2: Option<[f64; 2]>,
    mr3: [f64; 2],
    coeffs: [f64; 4],
}

fn pure_chain_discrete(p1: &[f64], p2: &[f64], f: &dyn Fn(f64, f64) -> f64, delta: bool) -> PureChain {
    let int = |pts: &[f64], g: &dyn Fn(f64) -> f64| if delta { sum_delta(pts, g) } else { sum_nabla(pts, g) };
    let (a, b) = (p1[0], p1[p1.len() - 1]);
    let (c, d) = (p2[0], p2[p2.len() - 1]);
    let ta = int(p1, &|t| t) / (b - a);
    let sa = int(p2, &|s| s) / (d - c);
    let mx = |g: &dyn Fn(f64) -> f64| int(p1, g) / (b - a);
    let my = |g: &dyn Fn(f64) -> f64| int(p2, g) / (d - c);
    let double = int(p2, &|y| int(p1, &|x| f(x, y))) / ((b - a) * (d - c));
    let m1 = 0.5 * (mx(&|x| f(x, sa)) + my(&|y| f(ta, y)));
    let m3 = (mx(&|x| (d - sa) * f(x, c) + (sa - c) * f(x, d)) / (d - c)
        + my(&|y| (b - ta) * f(a, y) + (ta - a) * f(b, y)) / (b - a))
        / 2.0;
    let (xm, ym) = ((a + b) / 2.0, (c + d) / 2.0);
    let mr2 = (p1.contains(&xm) && p2.contains(&ym))
        .then(|| [f(xm, sa) + f(ta, ym), mx(&|x| f(x, ym)) + my(&|y| f(xm, y))]);
    let (l, r) = ((b - ta) / (b - a), (ta - a) / (b - a));
    let (lo, hi) = ((d - sa) / (d - c), (sa - c) / (d - c));
    let coeffs = [l + lo, l + hi, r + lo, r + hi];
    let lhs3 = mx(&|x| f(x, c) + f(x, d)) + my(&|y| f(a, y) + f(b, y));
    let rhs3 = coeffs[0] * f(a, c) + coeffs[1] * f(a, d) + coeffs[2] * f(b, c) + coeffs[3] * f(b, d);
    PureChain {
        mr1: [m1, double, m3],
        mr2,
        mr3: [lhs3, rhs3],
        coeffs,
    }
}

fn compare(label: &str, got: &ChainReport, want: &[f64]) -> Result<(), String> {
    ensure!(got.members.len() == want.len(), "{label}: member count");
    for (m, w) in got.members.iter().zip(want) {
        ensure!(rel_close(m.value, *w, 1e-9), "{label}: {} = {} vs {w}", m.label, m.value);
    }
    Ok(())
}

#[test]
fn criterion_7_corollary_specializations() {
    report(7, "specializations at alpha in {0, 1/2, 1}", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut runs = 0;
        for case in 0..40 {
            let (t1, p1) = common::random_discrete(&mut rng, 3, 12);
            let (t2, p2) = common::random_discrete(&mut rng, 3, 12);
            let src = common::convex_expr(&mut rng, true);
            let f = f2(&src);
            let fv = |x: f64, y: f64| f.eval(x, y).unwrap();
            let r = RectangleDomain::new(t1, (p1[0], p1[p1.len() - 1]), t2, (p2[0], p2[p2.len() - 1])).unwrap();
            for (alpha, delta) in [(Alpha::ONE, true), (Alpha::ZERO, false)] {
                let want = pure_chain_discrete(&p1, &p2, &fv, delta);
                let label = format!("case {case} alpha={alpha} {src}");
                compare(&label, &verify_mr1(&r, &f, alpha, &opts()).map_err(|e| e.to_string())?, &want.mr1)?;
                let mr3 = verify_mr3(&r, &f, alpha, &opts()).map_err(|e| e.to_string())?;
                compare(&label, &mr3, &want.mr3)?;
                let k = mr3.coefficients.unwrap();
                for (g, w) in [k.a1, k.a2, k.a3, k.a4].iter().zip(want.coeffs) {
                    ensure!(rel_close(*g, w, 1e-9), "{label}: coefficient {g} vs {w}");
                }
                match (verify_mr2(&r, &f, alpha, &opts()), want.mr2) {
                    (Ok(rep), Some(w)) => compare(&label, &rep, &w)?,
                    (Err(_), None) => {}
                    (got, w) => return Err(format!("{label}: midpoint chain {got:?} vs {w:?}")),
                }
                runs += 1;
            }
        }

        // On interval scales both rules reduce to the Riemann integral. The
        // integrands are smooth so the fixed Gauss–Legendre oracle is accurate.
        for (src, rect) in [
            ("x^2+y^2", (0.0, 1.0, 0.0, 1.0)),
            ("exp(0.5*x - 0.25*y) + (x+y)^2", (-1.0, 2.0, 0.5, 3.0)),
            ("sqrt(1 + (x - y)^2) + x*y + y^2", (0.0, 2.0, -1.0, 1.0)),
        ] {
            let (a, b, c, d) = rect;
            let f = f2(src);
            let fv = |x: f64, y: f64| f.eval(x, y).unwrap();
            let gl = |g: &dyn Fn(f64) -> f64, lo: f64, hi: f64| common::gauss_legendre(g, lo, hi, 256);
            let (xm, ym) = ((a + b) / 2.0, (c + d) / 2.0);
            let mx = |g: &dyn Fn(f64) -> f64| gl(g, a, b) / (b - a);
            let my = |g: &dyn Fn(f64) -> f64| gl(g, c, d) / (d - c);
            let double = gl(&|y| gl(&|x| fv(x, y), a, b), c, d) / ((b - a) * (d - c));
            let mr1 = [
                0.5 * (mx(&|x| fv(x, ym)) + my(&|y| fv(xm, y))),
                double,
                0.25 * (mx(&|x| fv(x, c) + fv(x, d)) + my(&|y| fv(a, y) + fv(b, y))),
            ];
            let mr2 = [2.0 * fv(xm, ym), mx(&|x| fv(x, ym)) + my(&|y| fv(xm, y))];
            let mr3 = [
                mx(&|x| fv(x, c) + fv(x, d)) + my(&|y| fv(a, y) + fv(b, y)),
                fv(a, c) + fv(a, d) + fv(b, c) + fv(b, d),
            ];
            let r = RectangleDomain::new(TimeScale::interval(a, b).unwrap(), (a, b), TimeScale::interval(c, d).unwrap(), (c, d))
                .unwrap();
            for alpha in [Alpha::ZERO, Alpha::ONE] {
                let label = format!("{src} alpha={alpha}");
                compare(&label, &verify_mr1(&r, &f, alpha, &opts()).map_err(|e| e.to_string())?, &mr1)?;
                compare(&label, &verify_mr2(&r, &f, alpha, &opts()).map_err(|e| e.to_string())?, &mr2)?;
                compare(&label, &verify_mr3(&r, &f, alpha, &opts()).map_err(|e| e.to_string())?, &mr3)?;
                runs += 1;
            }
        }

        // Corner weights at alpha = 1/2 on every scale family.
        let mut worst: f64 = 0.0;
        for _ in 0..60 {
            let (_, t1) = common::random_scale(&mut rng);
            let (_, t2) = common::random_scale(&mut rng);
            let (x, y) = (common::window_points(&t1), common::window_points(&t2));
            let r = RectangleDomain::new(t1, (x[0], x[x.len() - 1]), t2, (y[0], y[y.len() - 1])).unwrap();
            let k = verify_mr3(&r, &f2("x^2+y^2"), Alpha::HALF, &opts()).map_err(|e| e.to_string())?.coefficients.unwrap();
            for v in [k.a1, k.a2, k.a3, k.a4] {
                worst = worst.max((v - 1.0).abs());
            }
        }
        ensure!(worst <= 1e-12, "alpha=1/2 corner weights off by {worst:e}");
        Ok(format!("{runs} alpha in {{0,1}} runs match one-rule chains within 1e-9; alpha=1/2 weights within {worst:e} of 1"))
    });
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

#[test]
fn criterion_8_parser_and_report_round_trip() {
    report(8, "parser conformance and JSON round trip", None, || {
        use Expr::{Add, Max, Mul, Neg, Num, Pow, Sub};
        let (x, y) = (Expr::Var(Var::X), Expr::Var(Var::Y));
        let expected = [
            ("x^2 + y^2", Add(b(Pow(b(x.clone()), b(Num(2.0)))), b(Pow(b(y.clone()), b(Num(2.0)))))),
            (
                "max(x, 2*y) - 1",
                Sub(b(Max(b(x.clone()), b(Mul(b(Num(2.0)), b(y.clone()))))), b(Num(1.0))),
            ),
            ("-x^2", Neg(b(Pow(b(x.clone()), b(Num(2.0)))))),
            ("2^3^2", Pow(b(Num(2.0)), b(Pow(b(Num(3.0)), b(Num(2.0)))))),
        ];
        for (src, want) in expected {
            let got = parse(src).map_err(|e| format!("{src}: {e}"))?;
            ensure!(got == want, "{src}: {got:?}");
        }
        for (src, v) in [("2+3*4", 14.0), ("2^3^2", 512.0), ("x^2+y^2", 5.0), ("-x^2", -1.0)] {
            let got = parse(src).unwrap().evaluate(1.0, Some(2.0)).unwrap();
            ensure!(got == v, "{src} evaluates to {got}");
        }
        for (src, offset) in [("x + * y", 4), ("(x", 2), ("x y", 2), ("", 0), ("3 +", 3), ("max(x,)", 6)] {
            match parse(src) {
                Err(ParseError::Syntax { offset: o, .. }) if o == offset => {}
                other => return Err(format!("{src:?}: {other:?}, wanted syntax error at {offset}")),
            }
        }

        let mut reports = vec![
            verify_grid_example(&f2("exp(x+y)"), &opts()).unwrap(),
            verify_dragomir_r(&f2("x^2+y^2"), 0.0, 1.0, 0.0, 1.0, &opts()).unwrap(),
            verify_dinu_1d(&TimeScale::h_grid(0.1, 0.0, 2.0).unwrap(), &RealFunction1D::parse("exp(x)").unwrap(), 0.0, 2.0, Alpha::new(0.3).unwrap(), &opts()).unwrap(),
        ];
        let z = TimeScale::integers(0, 4).unwrap();
        let r = RectangleDomain::new(z.clone(), (0.0, 4.0), z, (0.0, 4.0)).unwrap();
        let err = verify_mr1(&r, &f2("-(x^2)"), Alpha::ONE, &opts()).unwrap_err();
        reports.push(ChainReport::failed(tscalc_core::ChainId::Mr1, 1.0, Some("-(x^2)".into()), &err));
        let mut values = 0;
        let text = to_json(&reports);
        let back = from_json(&text).map_err(|e| e.to_string())?;
        ensure!(back == reports, "round trip changed the reports");
        for (p, q) in reports.iter().zip(&back) {
            for (m, n) in p.members.iter().zip(&q.members) {
                ensure!(m.value.to_bits() == n.value.to_bits(), "{} not bit-exact", m.label);
                values += 1;
            }
        }
        Ok(format!("AST shapes, evaluation, 6 syntax offsets; {values} member values round-trip bit-exactly"))
    });
}
