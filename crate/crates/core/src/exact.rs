//! Exact rational arithmetic for purely discrete windows.
//!
//! Every `f64` is a dyadic rational, so a discrete window's points and the
//! weight α convert to [`BigRational`] without loss. The centroid and the
//! corner coefficients then follow with zero rounding error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::calculus::Alpha;
use crate::error::{Error, Result};
use crate::timescale::TimeScale;

pub fn to_rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::BadParam(format!("{v} is not a finite number")))
}

fn discrete_points(ts: &TimeScale, a: f64, b: f64) -> Result<Vec<BigRational>> {
    let segs = ts.atoms_in(a, b)?;
    if segs.iter().any(|s| s.is_dense()) {
        return Err(Error::BadParam(
            "exact arithmetic needs a window without dense pieces".into(),
        ));
    }
    segs.iter().map(|s| to_rational(s.lo())).collect()
}

/// ∫_a^b t ◇α t on a discrete window, exactly.
pub fn first_moment(ts: &TimeScale, a: f64, b: f64, alpha: Alpha) -> Result<BigRational> {
    let pts = discrete_points(ts, a, b)?;
    let w = to_rational(alpha.value())?;
    let one_minus = BigRational::one() - &w;
    let mut total = BigRational::zero();
    for pair in pts.windows(2) {
        let gap = &pair[1] - &pair[0];
        total += (&w * &pair[0] + &one_minus * &pair[1]) * gap;
    }
    Ok(total)
}

/// t_α = (1/(b−a)) ∫_a^b t ◇α t, exactly.
pub fn t_alpha(ts: &TimeScale, a: f64, b: f64, alpha: Alpha) -> Result<BigRational> {
    let (a, b) = ts.window(a, b)?;
    if a >= b {
        return Err(Error::BadWindow { a, b });
    }
    Ok(first_moment(ts, a, b, alpha)? / (to_rational(b)? - to_rational(a)?))
}

/// Corner weights (A₁, A₂, A₃, A₄) of the boundary inequality, exactly.
pub fn corner_coefficients(
    t1: &TimeScale,
    (a, b): (f64, f64),
    t2: &TimeScale,
    (c, d): (f64, f64),
    alpha: Alpha,
) -> Result<[BigRational; 4]> {
    let ta = t_alpha(t1, a, b, alpha)?;
    let sa = t_alpha(t2, c, d, alpha)?;
    let (a, b, c, d) = (to_rational(a)?, to_rational(b)?, to_rational(c)?, to_rational(d)?);
    let left = (&b - &ta) / (&b - &a);
    let right = (&ta - &a) / (&b - &a);
    let low = (&d - &sa) / (&d - &c);
    let high = (&sa - &c) / (&d - &c);
    Ok([&left + &low, &left + &high, &right + &low, &right + &high])
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
