//! Bounded time scales and their point topology.
//!
//! A [`TimeScale`] is a finite union of closed intervals and isolated points,
//! kept in canonical form: sorted, pairwise disjoint, with a strictly positive
//! gap between consecutive pieces. Everything else in the crate (jump
//! operators, integration, convexity sampling) walks this piece list.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute membership slack at magnitude `t`.
pub fn membership_eps(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

/// One connected component of a time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Point(f64),
    Interval { lo: f64, hi: f64 },
}

impl Segment {
    pub fn lo(&self) -> f64 {
        match *self {
            Segment::Point(p) => p,
            Segment::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> f64 {
        match *self {
            Segment::Point(p) => p,
            Segment::Interval { hi, .. } => hi,
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Segment::Interval { .. })
    }

    fn from_bounds(lo: f64, hi: f64) -> Segment {
        if hi - lo <= membership_eps(hi) {
            Segment::Point(lo)
        } else {
            Segment::Interval { lo, hi }
        }
    }
}

/// Serializable description of a time scale, as accepted by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleSpec {
    Integers { lo: i64, hi: i64 },
    HGrid { h: f64, lo: f64, hi: f64 },
    QScale { q: f64, kmin: i32, kmax: i32 },
    Interval { lo: f64, hi: f64 },
    Union { parts: Vec<ScaleSpec> },
    Points { values: Vec<f64> },
}

impl ScaleSpec {
    pub fn build(&self) -> Result<TimeScale> {
        TimeScale::from_spec(self)
    }
}

/// Behaviour of a point on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideClass {
    Scattered,
    Dense,
    /// The point is the extreme of the scale on this side.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub left: SideClass,
    pub right: SideClass,
}

impl PointClass {
    pub fn is_isolated(&self) -> bool {
        self.left == SideClass::Scattered && self.right == SideClass::Scattered
    }

    pub fn is_dense(&self) -> bool {
        self.left == SideClass::Dense && self.right == SideClass::Dense
    }

    pub fn right_scattered(&self) -> bool {
        self.right == SideClass::Scattered
    }

    pub fn left_scattered(&self) -> bool {
        self.left == SideClass::Scattered
    }
}

impl std::fmt::Display for PointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_isolated() {
            return write!(f, "isolated");
        }
        if self.is_dense() {
            return write!(f, "dense");
        }
        let side = |c: SideClass| match c {
            SideClass::Scattered => "scattered",
            SideClass::Dense => "dense",
            SideClass::Boundary => "boundary",
        };
        write!(f, "left-{} and right-{}", side(self.left), side(self.right))
    }
}

/// A nonempty bounded closed subset of the reals in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    pieces: Vec<Segment>,
}

impl TimeScale {
    /// Builds the canonical form of an arbitrary list of segments.
    pub fn from_segments(segments: impl IntoIterator<Item = Segment>) -> Result<Self> {
        let mut segs: Vec<Segment> = segments.into_iter().collect();
        for s in &segs {
            if !s.lo().is_finite() || !s.hi().is_finite() {
                return Err(Error::BadParam("segment endpoints must be finite".into()));
            }
            if s.lo() > s.hi() {
                return Err(Error::BadParam(format!(
                    "interval [{}, {}] has lo > hi",
                    s.lo(),
                    s.hi()
                )));
            }
        }
        if segs.is_empty() {
            return Err(Error::EmptyScale);
        }
        segs.sort_by(|p, q| p.lo().total_cmp(&q.lo()).then(p.hi().total_cmp(&q.hi())));

        let mut pieces: Vec<Segment> = Vec::with_capacity(segs.len());
        for s in segs {
            match pieces.last_mut() {
                Some(last) if s.lo() - last.hi() < membership_eps(s.lo()) => {
                    let lo = last.lo();
                    let hi = last.hi().max(s.hi());
                    *last = if last.is_dense() || s.is_dense() || hi - lo > membership_eps(hi) {
                        Segment::from_bounds(lo, hi)
                    } else {
                        Segment::Point(lo)
                    };
                }
                _ => pieces.push(s),
            }
        }
        Ok(TimeScale { pieces })
    }

    pub fn from_spec(spec: &ScaleSpec) -> Result<Self> {
        match spec {
            ScaleSpec::Integers { lo, hi } => Self::integers(*lo, *hi),
            ScaleSpec::HGrid { h, lo, hi } => Self::h_grid(*h, *lo, *hi),
            ScaleSpec::QScale { q, kmin, kmax } => Self::q_scale(*q, *kmin, *kmax),
            ScaleSpec::Interval { lo, hi } => Self::interval(*lo, *hi),
            ScaleSpec::Points { values } => Self::points(values.iter().copied()),
            ScaleSpec::Union { parts } => {
                let mut segs = Vec::new();
                for part in parts {
                    match Self::from_spec(part) {
                        Ok(ts) => segs.extend(ts.pieces),
                        Err(Error::EmptyScale) => {}
                        Err(e) => return Err(e),
                    }
                }
                Self::from_segments(segs)
            }
        }
    }

    /// ℤ ∩ [lo, hi].
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyScale);
        }
        Self::from_segments((lo..=hi).map(|k| Segment::Point(k as f64)))
    }

    /// hℤ ∩ [lo, hi]; grid points are computed as `k * h`.
    pub fn h_grid(h: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::BadParam(format!("grid step h must be positive, got {h}")));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::BadParam("grid window must be finite".into()));
        }
        let kmin = (lo / h - 1e-9).ceil() as i64;
        let kmax = (hi / h + 1e-9).floor() as i64;
        let pts: Vec<Segment> = (kmin..=kmax)
            .map(|k| k as f64 * h)
            .filter(|&t| t >= lo - membership_eps(lo) && t <= hi + membership_eps(hi))
            .map(Segment::Point)
            .collect();
        Self::from_segments(pts)
    }

    /// {q^k : kmin ≤ k ≤ kmax}.
    pub fn q_scale(q: f64, kmin: i32, kmax: i32) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::BadParam(format!("q must exceed 1, got {q}")));
        }
        if kmin > kmax {
            return Err(Error::EmptyScale);
        }
        Self::from_segments((kmin..=kmax).map(|k| Segment::Point(q.powi(k))))
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyScale);
        }
        Self::from_segments([Segment::from_bounds(lo, hi)])
    }

    pub fn points(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::from_segments(values.into_iter().map(Segment::Point))
    }

    pub fn pieces(&self) -> &[Segment] {
        &self.pieces
    }

    pub fn min(&self) -> f64 {
        self.pieces[0].lo()
    }

    pub fn max(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi()
    }

    /// True when the scale has no dense component.
    pub fn is_discrete(&self) -> bool {
        self.pieces.iter().all(|s| !s.is_dense())
    }

    /// True when the scale is a single closed interval of positive length.
    pub fn is_single_interval(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].is_dense()
    }

    /// Index of the piece containing `t` and the member value `t` snaps to.
    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if !t.is_finite() {
            return None;
        }
        let eps = membership_eps(t);
        // First piece whose upper end is not left of t.
        let i = self.pieces.partition_point(|s| s.hi() < t - eps);
        let s = self.pieces.get(i)?;
        if t < s.lo() - eps {
            return None;
        }
        Some((i, t.clamp(s.lo(), s.hi())))
    }

    /// The piece of the scale that contains `t`.
    pub fn piece_of(&self, t: f64) -> Result<Segment> {
        self.locate(t).map(|(i, _)| self.pieces[i]).ok_or(Error::NotInScale(t))
    }

    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_some()
    }

    /// Returns the member `t` denotes, absorbing rounding within the
    /// membership tolerance.
    pub fn snap(&self, t: f64) -> Result<f64> {
        self.locate(t).map(|(_, v)| v).ok_or(Error::NotInScale(t))
    }

    /// Forward jump σ(t).
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let (i, t) = self.locate(t).ok_or(Error::NotInScale(t))?;
        let s = self.pieces[i];
        if t < s.hi() {
            return Ok(t);
        }
        Ok(self.pieces.get(i + 1).map_or(t, |n| n.lo()))
    }

    /// Backward jump ρ(t).
    pub fn rho(&self, t: f64) -> Result<f64> {
        let (i, t) = self.locate(t).ok_or(Error::NotInScale(t))?;
        let s = self.pieces[i];
        if t > s.lo() {
            return Ok(t);
        }
        Ok(if i == 0 { t } else { self.pieces[i - 1].hi() })
    }

    /// Forward and backward graininess (σ(t) − t, t − ρ(t)).
    pub fn graininess(&self, t: f64) -> Result<(f64, f64)> {
        let t0 = self.snap(t)?;
        Ok((self.sigma(t0)? - t0, t0 - self.rho(t0)?))
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let t = self.snap(t)?;
        let (mu, nu) = self.graininess(t)?;
        let right = if mu > 0.0 {
            SideClass::Scattered
        } else if t < self.max() {
            SideClass::Dense
        } else {
            SideClass::Boundary
        };
        let left = if nu > 0.0 {
            SideClass::Scattered
        } else if t > self.min() {
            SideClass::Dense
        } else {
            SideClass::Boundary
        };
        Ok(PointClass { left, right })
    }

    /// 𝕋^k: drops a left-scattered maximum.
    ///
    /// A one-point scale has no point at which a derivative is determined,
    /// so it reduces to the empty set here.
    pub fn restrict_k(&self) -> Result<TimeScale> {
        if self.pieces.len() == 1 && !self.pieces[0].is_dense() {
            return Err(Error::EmptyScale);
        }
        let last = self.pieces[self.pieces.len() - 1];
        if last.is_dense() {
            return Ok(self.clone());
        }
        Ok(TimeScale {
            pieces: self.pieces[..self.pieces.len() - 1].to_vec(),
        })
    }

    /// 𝕋_k: drops a right-scattered minimum.
    pub fn restrict_sub_k(&self) -> Result<TimeScale> {
        if self.pieces.len() == 1 && !self.pieces[0].is_dense() {
            return Err(Error::EmptyScale);
        }
        if self.pieces[0].is_dense() {
            return Ok(self.clone());
        }
        Ok(TimeScale {
            pieces: self.pieces[1..].to_vec(),
        })
    }

    /// 𝕋^k_k = 𝕋^k ∩ 𝕋_k.
    pub fn restrict_kk(&self) -> Result<TimeScale> {
        self.restrict_k()?.restrict_sub_k()
    }

    /// Snaps a window to members and checks ordering.
    pub fn window(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let a = self.snap(a)?;
        let b = self.snap(b)?;
        if a > b {
            return Err(Error::BadWindow { a, b });
        }
        Ok((a, b))
    }

    /// The pieces of the scale clipped to the window [a, b], in order.
    pub fn atoms_in(&self, a: f64, b: f64) -> Result<Vec<Segment>> {
        let (a, b) = self.window(a, b)?;
        if a == b {
            return Ok(vec![Segment::Point(a)]);
        }
        Ok(self
            .pieces
            .iter()
            .filter(|s| s.hi() >= a && s.lo() <= b)
            .map(|s| Segment::from_bounds(s.lo().max(a), s.hi().min(b)))
            .collect())
    }

    /// Every member of the window that is an isolated point or an endpoint of
    /// a dense piece, i.e. the points at which the scale has structure.
    pub fn scattered_points(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for s in self.atoms_in(a, b)? {
            out.push(s.lo());
            if s.is_dense() {
                out.push(s.hi());
            }
        }
        Ok(out)
    }

    pub fn to_spec(&self) -> ScaleSpec {
        let parts = self
            .pieces
            .iter()
            .map(|s| match *s {
                Segment::Point(p) => ScaleSpec::Points { values: vec![p] },
                Segment::Interval { lo, hi } => ScaleSpec::Interval { lo, hi },
            })
            .collect();
        ScaleSpec::Union { parts }
    }
}
