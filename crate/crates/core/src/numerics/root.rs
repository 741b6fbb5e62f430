//! Bracketed root finding for monotone scalar functions.
//!
//! Every indifference equation in this crate has the form `f(b) = 0` with
//! `f` continuous and strictly decreasing in the payment `b`. Bisection is
//! therefore exact up to the requested tolerance and needs no derivative,
//! which matters because utilities and sharing rules may have kinks.

use crate::error::{Error, Result};

/// Default absolute tolerance on the root.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

/// Default number of geometric bracket expansions.
pub const DEFAULT_MAX_EXPANSIONS: u32 = 60;

/// A closed search interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "bracket requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Options for [`solve_monotone_root_with`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub abs_tol: f64,
    pub max_expansions: u32,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_ABS_TOL,
            max_expansions: DEFAULT_MAX_EXPANSIONS,
        }
    }
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_nan() {
        return Err(Error::NonFinite { at: x, value: v });
    }
    Ok(v)
}

/// Finds the zero of a continuous, strictly decreasing `f`.
///
/// The bracket starts at `hint ± 1` and each side that has not yet crossed
/// zero is pushed outward with doubling offsets. Negative roots are allowed.
pub fn solve_monotone_root<F: FnMut(f64) -> f64>(f: F, hint: f64, abs_tol: f64) -> Result<f64> {
    solve_monotone_root_with(
        f,
        hint,
        RootOptions {
            abs_tol,
            ..RootOptions::default()
        },
    )
}

pub fn solve_monotone_root_with<F: FnMut(f64) -> f64>(
    mut f: F,
    hint: f64,
    opts: RootOptions,
) -> Result<f64> {
    if !(opts.abs_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "abs_tol must be positive, got {}",
            opts.abs_tol
        )));
    }
    if !hint.is_finite() {
        return Err(Error::NonFinite {
            at: hint,
            value: hint,
        });
    }

    let mut step = 1.0;
    let mut lo = hint - step;
    let mut hi = hint + step;
    let mut f_lo = eval(&mut f, lo)?;
    let mut f_hi = eval(&mut f, hi)?;
    let mut expansions = 0;
    while !(f_lo >= 0.0 && f_hi <= 0.0) {
        if expansions == opts.max_expansions {
            return Err(Error::BracketFailure {
                lo,
                hi,
                expansions,
            });
        }
        expansions += 1;
        step *= 2.0;
        if f_lo < 0.0 {
            // the root lies below lo; the old lo becomes a valid upper end
            hi = lo;
            f_hi = f_lo;
            lo = hint - step;
            f_lo = eval(&mut f, lo)?;
        } else {
            lo = hi;
            f_lo = f_hi;
            hi = hint + step;
            f_hi = eval(&mut f, hi)?;
        }
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    bisect_decreasing(f, Bracket { lo, hi }, opts.abs_tol)
}

/// Bisects a strictly decreasing `f` on a bracket where `f(lo) ≥ 0 ≥ f(hi)`.
///
/// Fails with [`Error::BracketFailure`] when the endpoint signs do not
/// straddle zero.
pub fn bisect_decreasing<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: Bracket,
    abs_tol: f64,
) -> Result<f64> {
    let Bracket { mut lo, mut hi } = bracket;
    let f_lo = eval(&mut f, lo)?;
    let f_hi = eval(&mut f, hi)?;
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::BracketFailure {
            lo,
            hi,
            expansions: 0,
        });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    // 200 halvings exhaust f64 resolution for any finite bracket
    for _ in 0..200 {
        if hi - lo <= 2.0 * abs_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = eval(&mut f, mid)?;
        if v == 0.0 {
            return Ok(mid);
        } else if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverts a nondecreasing map `g` on `[lo, hi]`: returns `x` with `g(x) = target`.
pub fn invert_increasing<G: FnMut(f64) -> f64>(
    mut g: G,
    target: f64,
    bracket: Bracket,
    abs_tol: f64,
) -> Result<f64> {
    bisect_decreasing(|x| target - g(x), bracket, abs_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-10;

    #[test]
    fn identity_root() {
        let b = solve_monotone_root(|b| -b, 5.0, TOL).unwrap();
        assert!(b.abs() <= TOL);
    }

    #[test]
    fn shifted_linear_root() {
        let b = solve_monotone_root(|b| 0.5 - b, 0.0, TOL).unwrap();
        assert!((b - 0.5).abs() <= TOL);
    }

    #[test]
    fn bernoulli_expectation_root() {
        // E[X - b] for X ~ Bernoulli(0.5), written out over the two atoms
        let f = |b: f64| 0.5 * (0.0 - b) + 0.5 * (1.0 - b);
        let b = solve_monotone_root(f, 3.0, TOL).unwrap();
        assert!((b - 0.5).abs() <= TOL);
    }

    #[test]
    fn far_negative_root() {
        let b = solve_monotone_root(|b| -1e6 - b, 0.0, TOL).unwrap();
        assert!((b + 1e6).abs() <= 1e-6);
    }

    #[test]
    fn kinked_function() {
        // POSC-style kink at b = 0.3
        let f = |b: f64| 0.3 - b - 0.5 * (0.3f64 - b).max(0.0);
        let b = solve_monotone_root(f, 10.0, TOL).unwrap();
        assert!((b - 0.3).abs() <= TOL);
    }

    #[test]
    fn no_root_fails() {
        let err = solve_monotone_root(|b| 1.0 + (-b).exp(), 0.0, TOL).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn nan_is_reported() {
        let err = solve_monotone_root(|_| f64::NAN, 0.0, TOL).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        let err = bisect_decreasing(|b| -b, Bracket::new(1.0, 2.0).unwrap(), TOL).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn invert_increasing_map() {
        let x = invert_increasing(|x| x * x, 0.25, Bracket::new(0.0, 1.0).unwrap(), 1e-12).unwrap();
        assert!((x - 0.5).abs() < 1e-11);
    }

    #[test]
    fn bracket_requires_order() {
        assert!(Bracket::new(1.0, 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn root_residual_within_tolerance_ball(
                root in -500.0f64..500.0,
                slope in 0.01f64..100.0,
                cubic in 0.0f64..2.0,
                hint in -50.0f64..50.0,
            ) {
                let f = move |b: f64| -slope * (b - root) - cubic * (b - root).powi(3);
                let b = solve_monotone_root(f, hint, TOL).unwrap();
                prop_assert!((b - root).abs() <= TOL);
                let variation = f(b - TOL) - f(b + TOL);
                prop_assert!(f(b).abs() <= variation);
            }
        }
    }
}
