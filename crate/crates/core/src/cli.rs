//! Batch runner behind the `tscalc verify` command.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::Alpha;
use crate::error::{Error, Result};
use crate::expr::{self, Expr, Var};
use crate::function::{RealFunction1D, RealFunction2D};
use crate::inequalities::{
    verify_dinu_1d, verify_dragomir_r, verify_mr1, verify_mr2, verify_mr3, verify_grid_example, ChainId, ChainReport,
    VerifyOptions,
};
use crate::quadrature::QuadratureConfig;
use crate::rectangle::RectangleDomain;
use crate::report::OutputFormat;
use crate::timescale::{ScaleSpec, TimeScale};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainName {
    Dinu1d,
    Mr1,
    Mr2,
    Mr3,
    DragomirR,
    #[serde(alias = "paper_example")]
    GridExample,
}

impl ChainName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "dinu1d" => ChainName::Dinu1d,
            "mr1" => ChainName::Mr1,
            "mr2" => ChainName::Mr2,
            "mr3" => ChainName::Mr3,
            "dragomir_r" => ChainName::DragomirR,
            "grid_example" | "paper_example" => ChainName::GridExample,
            _ => return None,
        })
    }

    fn id(self) -> ChainId {
        match self {
            ChainName::Dinu1d => ChainId::Dinu1d,
            ChainName::Mr1 => ChainId::Mr1,
            ChainName::Mr2 => ChainId::Mr2,
            ChainName::Mr3 => ChainId::Mr3,
            ChainName::DragomirR => ChainId::DragomirR,
            ChainName::GridExample => ChainId::GridExample,
        }
    }

    /// Chains whose value does not depend on α run once per function.
    fn uses_alpha(self) -> bool {
        !matches!(self, ChainName::DragomirR | ChainName::GridExample)
    }

    fn two_dimensional(self) -> bool {
        matches!(self, ChainName::Mr1 | ChainName::Mr2 | ChainName::Mr3 | ChainName::DragomirR)
    }
}

fn yes() -> bool {
    true
}

/// A run configuration, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scale1: Option<ScaleSpec>,
    #[serde(default)]
    pub scale2: Option<ScaleSpec>,
    /// `[a, b]` or `[a, b, c, d]`; missing bounds default to the scale extremes.
    #[serde(default)]
    pub window: Option<Vec<f64>>,
    #[serde(default)]
    pub functions: Vec<String>,
    /// Defaults to `[0.5]`.
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    #[serde(default)]
    pub chains: Option<Vec<ChainName>>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default = "yes")]
    pub check_hypothesis: bool,
    #[serde(default)]
    pub allow_hypothesis_failure: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scale1: None,
            scale2: None,
            window: None,
            functions: Vec::new(),
            alphas: None,
            chains: None,
            quadrature: QuadratureConfig::default(),
            output: OutputFormat::default(),
            check_hypothesis: true,
            allow_hypothesis_failure: false,
        }
    }
}

fn config_error(path: impl Into<String>, message: impl ToString) -> Error {
    Error::Config {
        path: path.into(),
        message: message.to_string(),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "config".to_string() } else { path };
            config_error(path, e.into_inner())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Parses a scale from a JSON spec or a shorthand such as `integers:0:5`,
/// `h_grid:0.25:0:2`, `q_scale:2:0:4`, `interval:0:1` or `points:0,1.5,2`.
pub fn parse_scale_arg(s: &str) -> std::result::Result<ScaleSpec, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("expected KIND:ARGS, got {s:?}"))?;
    let nums = |n: usize| -> std::result::Result<Vec<f64>, String> {
        let v = rest
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if v.len() != n {
            return Err(format!("{kind} takes {n} arguments, got {}", v.len()));
        }
        Ok(v)
    };
    let int = |v: f64| -> std::result::Result<i64, String> {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            Ok(v as i64)
        } else {
            Err(format!("{v} is not an integer"))
        }
    };
    match kind {
        "integers" => {
            let v = nums(2)?;
            Ok(ScaleSpec::Integers { lo: int(v[0])?, hi: int(v[1])? })
        }
        "h_grid" => {
            let v = nums(3)?;
            Ok(ScaleSpec::HGrid { h: v[0], lo: v[1], hi: v[2] })
        }
        "q_scale" => {
            let v = nums(3)?;
            let k = |x: f64| int(x).and_then(|k| i32::try_from(k).map_err(|e| e.to_string()));
            Ok(ScaleSpec::QScale { q: v[0], kmin: k(v[1])?, kmax: k(v[2])? })
        }
        "interval" => {
            let v = nums(2)?;
            Ok(ScaleSpec::Interval { lo: v[0], hi: v[1] })
        }
        "points" => {
            let values = rest
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(ScaleSpec::Points { values })
        }
        other => Err(format!("unknown scale kind {other:?}")),
    }
}

/// Everything `run` needs, checked and built.
struct Plan {
    t1: Option<TimeScale>,
    t2: Option<TimeScale>,
    x: (f64, f64),
    y: (f64, f64),
    functions: Vec<(String, Expr)>,
    alphas: Vec<Alpha>,
    chains: Vec<ChainName>,
    opts: VerifyOptions,
}

fn default_chains(t1: &TimeScale, t2: Option<&TimeScale>, x: (f64, f64), y: (f64, f64)) -> Vec<ChainName> {
    let Some(t2) = t2 else {
        return vec![ChainName::Dinu1d];
    };
    let mut chains = vec![ChainName::Mr1];
    if t1.contains(0.5 * (x.0 + x.1)) && t2.contains(0.5 * (y.0 + y.1)) {
        chains.push(ChainName::Mr2);
    }
    chains.push(ChainName::Mr3);
    if t1.is_single_interval() && t2.is_single_interval() {
        chains.push(ChainName::DragomirR);
    }
    chains
}

fn window_of(ts: &TimeScale, lo: Option<f64>, hi: Option<f64>, index: usize) -> Result<(f64, f64)> {
    let snap = |v: Option<f64>, i: usize, default: f64| match v {
        None => Ok(default),
        Some(v) => ts.snap(v).map_err(|e| config_error(format!("window[{i}]"), e)),
    };
    let a = snap(lo, index, ts.min())?;
    let b = snap(hi, index + 1, ts.max())?;
    if a >= b {
        return Err(config_error("window", format!("need {a} < {b}")));
    }
    Ok((a, b))
}

fn plan(cfg: &RunConfig) -> Result<Plan> {
    cfg.quadrature.validate().map_err(|e| config_error("quadrature", e))?;
    let alphas = cfg
        .alphas
        .clone()
        .unwrap_or_else(|| vec![0.5])
        .into_iter()
        .enumerate()
        .map(|(i, a)| Alpha::new(a).map_err(|e| config_error(format!("alphas[{i}]"), e)))
        .collect::<Result<Vec<_>>>()?;

    let build = |spec: &Option<ScaleSpec>, path: &str| -> Result<Option<TimeScale>> {
        spec.as_ref()
            .map(|s| s.build().map_err(|e| config_error(path, e)))
            .transpose()
    };
    let t1 = build(&cfg.scale1, "scale1")?;
    let t2 = build(&cfg.scale2, "scale2")?;

    let window = cfg.window.clone().unwrap_or_default();
    if !matches!(window.len(), 0 | 2 | 4) {
        return Err(config_error("window", format!("expected 2 or 4 numbers, got {}", window.len())));
    }
    let at = |i: usize| window.get(i).copied();
    let x = match &t1 {
        Some(t1) => window_of(t1, at(0), at(1), 0)?,
        None => (0.0, 0.0),
    };
    let y = match &t2 {
        Some(t2) => window_of(t2, at(2), at(3), 2)?,
        None if window.len() == 4 => return Err(config_error("scale2", "a second window needs a second scale")),
        None => (0.0, 0.0),
    };

    if cfg.functions.is_empty() {
        return Err(config_error("functions", "at least one function is required"));
    }
    let functions = cfg
        .functions
        .iter()
        .enumerate()
        .map(|(i, s)| {
            expr::parse(s)
                .map(|e| (s.trim().to_string(), e))
                .map_err(|e| config_error(format!("functions[{i}]"), e))
        })
        .collect::<Result<Vec<_>>>()?;

    let chains = match (&cfg.chains, &t1) {
        (Some(c), _) => c.clone(),
        (None, Some(t1)) => default_chains(t1, t2.as_ref(), x, y),
        (None, None) => return Err(config_error("scale1", "missing")),
    };
    for (i, &c) in chains.iter().enumerate() {
        let path = format!("chains[{i}]");
        if c != ChainName::GridExample && t1.is_none() {
            return Err(config_error("scale1", "missing"));
        }
        if c.two_dimensional() && t2.is_none() {
            return Err(config_error(path, "this chain needs scale2"));
        }
        if c == ChainName::DragomirR {
            let single = |t: &Option<TimeScale>| t.as_ref().is_some_and(TimeScale::is_single_interval);
            if !single(&t1) || !single(&t2) {
                return Err(config_error(path, "dragomir_r needs both scales to be single intervals"));
            }
        }
        if c == ChainName::Dinu1d {
            if let Some(j) = functions.iter().position(|(_, e)| e.free_variables().contains(&Var::Y)) {
                return Err(config_error(format!("functions[{j}]"), "dinu1d needs functions of x only"));
            }
        }
    }

    Ok(Plan {
        t1,
        t2,
        x,
        y,
        functions,
        alphas,
        chains,
        opts: VerifyOptions {
            quadrature: cfg.quadrature,
            check_hypothesis: cfg.check_hypothesis,
            convexity_tol: None,
        },
    })
}

struct Job {
    function: usize,
    chain: ChainName,
    alpha: Alpha,
}

fn execute(p: &Plan, rect: Option<&RectangleDomain>, job: &Job) -> ChainReport {
    let (label, e) = &p.functions[job.function];
    let alpha = job.alpha;
    let result = (|| match job.chain {
        ChainName::Dinu1d => {
            let f = RealFunction1D::from_expr(label.clone(), e.clone())?;
            let t1 = p.t1.as_ref().expect("checked in plan");
            verify_dinu_1d(t1, &f, p.x.0, p.x.1, alpha, &p.opts)
        }
        chain => {
            let f = RealFunction2D::from_expr(label.clone(), e.clone());
            match chain {
                ChainName::Mr1 => verify_mr1(rect.expect("checked in plan"), &f, alpha, &p.opts),
                ChainName::Mr2 => verify_mr2(rect.expect("checked in plan"), &f, alpha, &p.opts),
                ChainName::Mr3 => verify_mr3(rect.expect("checked in plan"), &f, alpha, &p.opts),
                ChainName::DragomirR => verify_dragomir_r(&f, p.x.0, p.x.1, p.y.0, p.y.1, &p.opts),
                ChainName::GridExample => verify_grid_example(&f, &p.opts),
                ChainName::Dinu1d => unreachable!(),
            }
        }
    })();
    result.unwrap_or_else(|err| ChainReport::failed(job.chain.id(), alpha.value(), Some(label.clone()), &err))
}

/// Validates the configuration and evaluates every (function, chain, α)
/// combination. Only configuration problems are returned as errors; failures
/// inside a single chain are recorded in its report.
pub fn run(cfg: &RunConfig) -> Result<Vec<ChainReport>> {
    let p = plan(cfg)?;
    let rect = match (&p.t1, &p.t2) {
        (Some(t1), Some(t2)) if p.chains.iter().any(|c| c.two_dimensional()) => {
            Some(RectangleDomain::new(t1.clone(), p.x, t2.clone(), p.y).map_err(|e| config_error("window", e))?)
        }
        _ => None,
    };
    let mut jobs = Vec::new();
    for function in 0..p.functions.len() {
        for &chain in &p.chains {
            if chain.uses_alpha() {
                jobs.extend(p.alphas.iter().map(|&alpha| Job { function, chain, alpha }));
            } else {
                let alpha = if chain == ChainName::GridExample { Alpha::ONE } else { Alpha::HALF };
                jobs.push(Job { function, chain, alpha });
            }
        }
    }
    Ok(jobs.par_iter().map(|j| execute(&p, rect.as_ref(), j)).collect())
}

/// 0 when every report holds, 1 otherwise. Hypothesis failures count as
/// passing only when `allow_hypothesis_failure` is set.
pub fn exit_status(reports: &[ChainReport], allow_hypothesis_failure: bool) -> i32 {
    let ok = reports
        .iter()
        .all(|r| r.all_satisfied() || (allow_hypothesis_failure && r.hypothesis_failed()));
    if ok {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}
