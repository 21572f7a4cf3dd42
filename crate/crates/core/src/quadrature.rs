//! Adaptive 15-point Gauss–Kronrod quadrature for the dense parts of a scale.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 40,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::BadParam("quadrature tolerances must be positive".into()));
        }
        if self.max_depth < 1 {
            return Err(Error::BadParam("max_depth must be at least 1".into()));
        }
        Ok(())
    }
}

// Positive Kronrod abscissae, largest first; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One G7K15 panel: (Kronrod estimate, |Kronrod − Gauss|).
fn gk15<F>(f: &mut F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

const MAX_PANELS: usize = 20_000;

struct Panel {
    lo: f64,
    hi: f64,
    est: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so runs are repeatable.
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Integrates `f` over [lo, hi], repeatedly bisecting the panel with the
/// largest error estimate until the summed estimate fits
/// max(abs_tol, rel_tol·|I|).
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return Ok(-integrate(f, hi, lo, cfg)?);
    }
    let (est, err) = gk15(&mut f, lo, hi)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { lo, hi, est, err, depth: 0 });
    let (mut total, mut total_err) = (est, err);
    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= target {
            return Ok(sum_by_position(&heap));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let splittable = worst.depth < cfg.max_depth && mid > worst.lo && mid < worst.hi && heap.len() < MAX_PANELS;
        if !splittable {
            // Noise-level disagreement is not a convergence failure.
            if total_err <= 64.0 * f64::EPSILON * total.abs().max(cfg.abs_tol) * (heap.len() + 1) as f64 {
                heap.push(worst);
                return Ok(sum_by_position(&heap));
            }
            return Err(Error::NumericFailure(format!(
                "quadrature on [{lo}, {hi}] did not converge (error estimate {total_err:e})"
            )));
        }
        total -= worst.est;
        total_err -= worst.err;
        for (a, b) in [(worst.lo, mid), (mid, worst.hi)] {
            let (est, err) = gk15(&mut f, a, b)?;
            total += est;
            total_err += err;
            heap.push(Panel { lo: a, hi: b, est, err, depth: worst.depth + 1 });
        }
    }
}

fn sum_by_position(heap: &BinaryHeap<Panel>) -> f64 {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    panels.into_iter().map(|p| p.est).sum()
}
