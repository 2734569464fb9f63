use thiserror::Error;

use super::expr::{EvalError, Expr};
use crate::scalar::Scalar;

/// Number of sample points used for the monotonicity check.
pub const MONOTONE_SAMPLES: usize = 64;
pub const MAX_BISECTIONS: usize = 200;
pub const INVERSION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvertError {
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("not strictly monotone on [{lo}, {hi}] (checked at 64 points): f({x0})={f0}, f({x1})={f1}, f({x2})={f2}")]
    NotMonotone {
        lo: f64,
        hi: f64,
        x0: f64,
        x1: f64,
        x2: f64,
        f0: f64,
        f1: f64,
        f2: f64,
    },
    #[error("target {y} outside range [{min}, {max}]")]
    OutOfRange { y: f64, min: f64, max: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Geometrically spaced sample points covering `[lo, hi]`, endpoints included.
pub fn sample_points<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    let ratio = (hi / lo).ln() / T::from_index(count - 1);
    let mut pts: Vec<T> = (0..count)
        .map(|i| lo * (ratio * T::from_index(i)).exp())
        .collect();
    pts[0] = lo;
    pts[count - 1] = hi;
    pts
}

/// Samples `e` at 64 points of `[lo, hi]` and reports its direction when the
/// sampled values are strictly monotone.
pub fn check_monotone<T: Scalar>(e: &Expr, lo: T, hi: T) -> Result<Direction, InvertError> {
    if !(lo > T::zero() && lo < hi && hi.is_finite()) {
        return Err(InvertError::InvalidBracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let xs = sample_points(lo, hi, MONOTONE_SAMPLES);
    let fs = xs.iter().map(|&x| e.eval(x)).collect::<Result<Vec<T>, _>>()?;
    let dir = if fs[1] > fs[0] {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    for i in 1..fs.len() {
        let ok = match dir {
            Direction::Increasing => fs[i] > fs[i - 1],
            Direction::Decreasing => fs[i] < fs[i - 1],
        };
        if !ok {
            let j = i.saturating_sub(2);
            let k = (j + 2).min(fs.len() - 1);
            return Err(InvertError::NotMonotone {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
                x0: xs[j].as_f64(),
                x1: xs[j + 1].as_f64(),
                x2: xs[k].as_f64(),
                f0: fs[j].as_f64(),
                f1: fs[j + 1].as_f64(),
                f2: fs[k].as_f64(),
            });
        }
    }
    Ok(dir)
}

/// Solves `e(x) = y` on `[lo, hi]` by bisection after a sampled monotonicity check.
///
/// The returned `x` satisfies `|e(x) - y| <= 1e-13 * max(1, |y|)` unless the
/// bracket collapses to adjacent floats first, in which case the closer
/// endpoint is returned.
pub fn invert_monotone<T: Scalar>(e: &Expr, y: T, lo: T, hi: T) -> Result<T, InvertError> {
    let dir = check_monotone(e, lo, hi)?;
    bisect(e, y, lo, hi, dir)
}

/// Bisection without the monotonicity check; `dir` must describe `e` on `[lo, hi]`.
pub(crate) fn bisect<T: Scalar>(e: &Expr, y: T, lo: T, hi: T, dir: Direction) -> Result<T, InvertError> {
    let (f_lo, f_hi) = (e.eval(lo)?, e.eval(hi)?);
    let (min, max) = (f_lo.min(f_hi), f_lo.max(f_hi));
    if !(y >= min && y <= max) {
        return Err(InvertError::OutOfRange {
            y: y.as_f64(),
            min: min.as_f64(),
            max: max.as_f64(),
        });
    }
    let tol = T::lit(INVERSION_TOL).max(T::epsilon() * T::lit(8.0)) * T::one().max(y.abs());
    if (f_lo - y).abs() <= tol {
        return Ok(lo);
    }
    if (f_hi - y).abs() <= tol {
        return Ok(hi);
    }
    // orient so that g(a) < y < g(b) with g increasing
    let (mut a, mut b) = match dir {
        Direction::Increasing => (lo, hi),
        Direction::Decreasing => (hi, lo),
    };
    let two = T::lit(2.0);
    for _ in 0..MAX_BISECTIONS {
        let mid = a + (b - a) / two;
        if mid == a || mid == b {
            break;
        }
        let fm = e.eval(mid)?;
        if (fm - y).abs() <= tol {
            return Ok(mid);
        }
        if fm < y {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (fa, fb) = (e.eval(a)?, e.eval(b)?);
    Ok(if (fa - y).abs() <= (fb - y).abs() { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genparse::parse_generator;

    #[test]
    fn square_root_of_nine() {
        let e = parse_generator("x^2").unwrap();
        let x = invert_monotone(&e, 9.0f64, 0.1, 10.0).unwrap();
        assert!((x - 3.0).abs() < 1e-10);
    }

    #[test]
    fn log_inverts_to_one() {
        let e = parse_generator("log(x)").unwrap();
        let x = invert_monotone(&e, 0.0f64, 0.1, 10.0).unwrap();
        assert!((x - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decreasing_generator() {
        let e = parse_generator("1/x").unwrap();
        assert_eq!(check_monotone(&e, 0.5f64, 4.0).unwrap(), Direction::Decreasing);
        let x = invert_monotone(&e, 0.25f64, 0.5, 8.0).unwrap();
        assert!((x - 4.0).abs() < 1e-10);
    }

    #[test]
    fn turning_point_is_detected() {
        // derivative 2x - 1 changes sign at 0.5
        let e = parse_generator("x^2 - x").unwrap();
        let err = invert_monotone(&e, -0.1f64, 0.1, 1.0).unwrap_err();
        let InvertError::NotMonotone { x0, x2, .. } = err else {
            panic!("expected monotonicity failure, got {err:?}");
        };
        assert!(x0 < 0.5 && 0.5 < x2);
    }

    #[test]
    fn target_out_of_range() {
        let e = parse_generator("x").unwrap();
        assert!(matches!(
            invert_monotone(&e, 20.0f64, 1.0, 10.0),
            Err(InvertError::OutOfRange { .. })
        ));
    }

    #[test]
    fn residual_within_contract() {
        let e = parse_generator("exp(x) + x^3").unwrap();
        for &y in &[3.0f64, 10.5, 150.0] {
            let x = invert_monotone(&e, y, 0.01, 6.0).unwrap();
            assert!((e.eval(x).unwrap() - y).abs() <= 1e-13 * y.max(1.0));
        }
    }
}
