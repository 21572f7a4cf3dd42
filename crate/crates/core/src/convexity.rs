//! Sampled convexity checks on time-scale windows.
//!
//! Convexity is tested in three-point chord form on scale points only:
//! every scattered atom of the window plus [`DENSE_SAMPLES`] evenly spaced
//! points per dense piece. Passing is a necessary condition for convexity of
//! the function on the enclosing real interval.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};
use crate::function::{RealFunction1D, RealFunction2D};
use crate::rectangle::RectangleDomain;
use crate::timescale::{Segment, TimeScale};

pub const DENSE_SAMPLES: usize = 65;

/// A chord violation: f(y) lies above the chord through (x, f(x)), (z, f(z)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub triple: [f64; 3],
    pub violation: f64,
    /// For two-variable checks, the section that failed and its fixed
    /// coordinate. `axis = x` means the section u ↦ f(u, at).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub section: Option<Section>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub axis: Axis,
    pub at: f64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.triple;
        write!(f, "chord violated at ({x}, {y}, {z}) by {:e}", self.violation)?;
        if let Some(s) = self.section {
            match s.axis {
                Axis::X => write!(f, " in section f(., {})", s.at)?,
                Axis::Y => write!(f, " in section f({}, .)", s.at)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub convex: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

/// Sorted sample points of T ∩ [a, b] used by the checks.
pub fn sample_points(ts: &TimeScale, a: f64, b: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for seg in ts.atoms_in(a, b)? {
        match seg {
            Segment::Point(p) => out.push(p),
            Segment::Interval { lo, hi } => {
                let n = DENSE_SAMPLES - 1;
                out.extend((0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64));
            }
        }
    }
    out.dedup();
    Ok(out)
}

fn default_tolerance(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1e-9 * (1.0 + scale)
}

/// Worst chord excess over all ordered triples of (points, values).
fn worst_triple(points: &[f64], values: &[f64]) -> (f64, Option<[f64; 3]>) {
    let n = points.len();
    let mut worst = 0.0;
    let mut at = None;
    for i in 0..n {
        for k in i + 2..n {
            let (x, z) = (points[i], points[k]);
            let (fx, fz) = (values[i], values[k]);
            let span = z - x;
            for j in i + 1..k {
                let y = points[j];
                let chord = ((z - y) * fx + (y - x) * fz) / span;
                let excess = values[j] - chord;
                if excess > worst {
                    worst = excess;
                    at = Some([x, y, z]);
                }
            }
        }
    }
    (worst, at)
}

fn verdict(worst: f64, at: Option<[f64; 3]>, tol: f64, section: Option<Section>) -> ConvexityVerdict {
    let convex = worst <= tol;
    ConvexityVerdict {
        convex,
        worst_violation: worst,
        tolerance: tol,
        witness: if convex {
            None
        } else {
            at.map(|triple| Witness {
                triple,
                violation: worst,
                section,
            })
        },
    }
}

/// Chord-form convexity of `f` on T ∩ [a, b]. `tol = None` uses
/// 1e−9·(1 + max sampled |f|).
pub fn check_convex_1d(ts: &TimeScale, f: &RealFunction1D, a: f64, b: f64, tol: Option<f64>) -> Result<ConvexityVerdict> {
    let (a, b) = ts.window(a, b)?;
    if a >= b {
        return Err(Error::BadWindow { a, b });
    }
    let pts = sample_points(ts, a, b)?;
    let vals = pts.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>>>()?;
    let tol = tol.unwrap_or_else(|| default_tolerance(&vals));
    let (worst, at) = worst_triple(&pts, &vals);
    Ok(verdict(worst, at, tol, None))
}

/// Convexity of every x-section f(·, y) and every y-section f(x, ·) over the
/// sample points of the rectangle. Joint convexity is not checked.
pub fn check_convex_coordinates(
    r: &RectangleDomain,
    f: &RealFunction2D,
    tol: Option<f64>,
) -> Result<(ConvexityVerdict, ConvexityVerdict)> {
    let (a, b) = r.x_window();
    let (c, d) = r.y_window();
    let xs = sample_points(r.t1(), a, b)?;
    let ys = sample_points(r.t2(), c, d)?;
    // grid[j][i] = f(xs[i], ys[j])
    let grid = ys
        .iter()
        .map(|&y| xs.iter().map(|&x| f.eval(x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let tol = tol.unwrap_or_else(|| default_tolerance(&grid.concat()));

    let mut x_worst = (0.0, None, None);
    for (j, row) in grid.iter().enumerate() {
        let (w, at) = worst_triple(&xs, row);
        if w > x_worst.0 {
            x_worst = (w, at, Some(Section { axis: Axis::X, at: ys[j] }));
        }
    }
    let mut y_worst = (0.0, None, None);
    let mut column = vec![0.0; ys.len()];
    for (i, &x) in xs.iter().enumerate() {
        for (j, row) in grid.iter().enumerate() {
            column[j] = row[i];
        }
        let (w, at) = worst_triple(&ys, &column);
        if w > y_worst.0 {
            y_worst = (w, at, Some(Section { axis: Axis::Y, at: x }));
        }
    }
    Ok((
        verdict(x_worst.0, x_worst.1, tol, x_worst.2),
        verdict(y_worst.0, y_worst.1, tol, y_worst.2),
    ))
}
