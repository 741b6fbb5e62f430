//! Conditional laws of the value `X₁` and exact expectations over them.

use crate::error::{Error, Result};
use crate::numerics::quadrature::standard_rule;
use crate::numerics::RunningStats;

/// A one-dimensional law for the value of the resource to buyer 1.
///
/// Expectations are exact for the atomic variants and use split
/// Gauss–Legendre quadrature for the continuous ones.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueLaw {
    Point(f64),
    /// `hi` with probability `p_hi`, else `lo`.
    TwoPoint { lo: f64, hi: f64, p_hi: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `offset + scale · S` where `S` is a sum of `terms` iid uniform(0,1).
    ScaledIrwinHall { offset: f64, scale: f64, terms: u32 },
    /// Equal-weight mixture, e.g. from nested sampling of the opponents.
    Mixture(Vec<ValueLaw>),
}

impl ValueLaw {
    pub fn bernoulli(p: f64) -> Self {
        ValueLaw::TwoPoint {
            lo: 0.0,
            hi: 1.0,
            p_hi: p.clamp(0.0, 1.0),
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        if hi > lo {
            ValueLaw::Uniform { lo, hi }
        } else {
            ValueLaw::Point(lo)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            ValueLaw::Point(x) => (*x, *x),
            ValueLaw::TwoPoint { lo, hi, .. } => (lo.min(*hi), lo.max(*hi)),
            ValueLaw::Uniform { lo, hi } => (*lo, *hi),
            ValueLaw::ScaledIrwinHall {
                offset,
                scale,
                terms,
            } => {
                let end = offset + scale * *terms as f64;
                (offset.min(end), offset.max(end))
            }
            ValueLaw::Mixture(parts) => parts.iter().map(|p| p.support()).fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(a, b), (lo, hi)| (a.min(lo), b.max(hi)),
            ),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ValueLaw::Point(x) => *x,
            ValueLaw::TwoPoint { lo, hi, p_hi } => lo + p_hi * (hi - lo),
            ValueLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            ValueLaw::ScaledIrwinHall {
                offset,
                scale,
                terms,
            } => offset + scale * 0.5 * *terms as f64,
            ValueLaw::Mixture(parts) => {
                parts.iter().map(|p| p.mean()).sum::<f64>() / parts.len() as f64
            }
        }
    }

    /// `E[g(X)]`. `kinks` lists points where `g` is not smooth; continuous
    /// laws split their quadrature there.
    pub fn expect(&self, g: &dyn Fn(f64) -> f64, kinks: &[f64]) -> Result<f64> {
        let v = match self {
            ValueLaw::Point(x) => g(*x),
            ValueLaw::TwoPoint { lo, hi, p_hi } => {
                let a = if *p_hi < 1.0 { (1.0 - p_hi) * g(*lo) } else { 0.0 };
                let b = if *p_hi > 0.0 { p_hi * g(*hi) } else { 0.0 };
                a + b
            }
            ValueLaw::Uniform { lo, hi } => {
                standard_rule().integrate_split(g, *lo, *hi, kinks)? / (hi - lo)
            }
            ValueLaw::ScaledIrwinHall {
                offset,
                scale,
                terms,
            } => irwin_hall_expect(g, *offset, *scale, *terms, kinks)?,
            ValueLaw::Mixture(parts) => self::mixture_stats(parts, g, kinks)?.mean(),
        };
        if !v.is_finite() {
            return Err(Error::NonFinite {
                at: self.mean(),
                value: v,
            });
        }
        Ok(v)
    }

    /// Expectation together with its Monte Carlo standard error; the error
    /// is zero for every variant except [`ValueLaw::Mixture`].
    pub fn expect_with_stderr(&self, g: &dyn Fn(f64) -> f64, kinks: &[f64]) -> Result<(f64, f64)> {
        match self {
            ValueLaw::Mixture(parts) => {
                let s = mixture_stats(parts, g, kinks)?;
                Ok((s.mean(), s.stderr()))
            }
            other => Ok((other.expect(g, kinks)?, 0.0)),
        }
    }

    /// Inverse CDF at `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            ValueLaw::Point(x) => *x,
            ValueLaw::TwoPoint { lo, hi, p_hi } => {
                if u < *p_hi {
                    *hi
                } else {
                    *lo
                }
            }
            ValueLaw::Uniform { lo, hi } => lo + u * (hi - lo),
            ValueLaw::ScaledIrwinHall {
                offset,
                scale,
                terms,
            } => {
                if *terms == 0 || *scale == 0.0 {
                    return *offset;
                }
                let m = *terms as f64;
                let mut lo = 0.0;
                let mut hi = m;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if irwin_hall_cdf(*terms, mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                offset + scale * 0.5 * (lo + hi)
            }
            ValueLaw::Mixture(parts) => {
                let k = parts.len();
                let idx = ((u * k as f64) as usize).min(k - 1);
                let inner = u * k as f64 - idx as f64;
                parts[idx].quantile(inner.clamp(0.0, 1.0 - f64::EPSILON))
            }
        }
    }
}

fn mixture_stats(parts: &[ValueLaw], g: &dyn Fn(f64) -> f64, kinks: &[f64]) -> Result<RunningStats> {
    if parts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut s = RunningStats::new();
    for p in parts {
        s.push(p.expect(g, kinks)?);
    }
    Ok(s)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Density of a sum of `m ≥ 1` iid uniform(0,1) variables.
pub fn irwin_hall_pdf(m: u32, s: f64) -> f64 {
    if s < 0.0 || s > m as f64 {
        return 0.0;
    }
    let mut acc = 0.0;
    for k in 0..=m {
        let t = s - k as f64;
        if t <= 0.0 {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(m, k) * t.powi(m as i32 - 1);
    }
    (acc / factorial(m - 1)).max(0.0)
}

pub fn irwin_hall_cdf(m: u32, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= m as f64 {
        return 1.0;
    }
    let mut acc = 0.0;
    for k in 0..=m {
        let t = s - k as f64;
        if t <= 0.0 {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(m, k) * t.powi(m as i32);
    }
    (acc / factorial(m)).clamp(0.0, 1.0)
}

fn irwin_hall_expect(
    g: &dyn Fn(f64) -> f64,
    offset: f64,
    scale: f64,
    terms: u32,
    kinks: &[f64],
) -> Result<f64> {
    if terms == 0 || scale == 0.0 {
        return Ok(g(offset));
    }
    if terms == 1 {
        let (a, b) = (offset, offset + scale);
        return ValueLaw::uniform(a.min(b), a.max(b)).expect(g, kinks);
    }
    let m = terms as f64;
    // the density is a different polynomial on each unit interval
    let mut breaks: Vec<f64> = (1..terms).map(|k| k as f64).collect();
    breaks.extend(kinks.iter().map(|k| (k - offset) / scale));
    standard_rule().integrate_split(
        |s| g(offset + scale * s) * irwin_hall_pdf(terms, s),
        0.0,
        m,
        &breaks,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_expectation_is_exact() {
        let law = ValueLaw::bernoulli(0.3);
        assert!((law.expect(&|x| x, &[]).unwrap() - 0.3).abs() < 1e-15);
        assert!((law.expect(&|x| (x - 0.5f64).max(0.0), &[]).unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn uniform_kinked_expectation() {
        let law = ValueLaw::uniform(0.0, 2.0);
        // E[(X - 0.5)^+] = 1.5² / 4
        let v = law.expect(&|x| (x - 0.5f64).max(0.0), &[0.5]).unwrap();
        assert!((v - 0.5625).abs() < 1e-14);
    }

    #[test]
    fn degenerate_uniform_is_a_point() {
        assert_eq!(ValueLaw::uniform(0.0, 0.0), ValueLaw::Point(0.0));
    }

    #[test]
    fn irwin_hall_density_integrates_to_one() {
        for m in 1..=6 {
            let law = ValueLaw::ScaledIrwinHall {
                offset: 0.0,
                scale: 1.0,
                terms: m,
            };
            let mass = law.expect(&|_| 1.0, &[]).unwrap();
            let mean = law.expect(&|x| x, &[]).unwrap();
            let var = law.expect(&|x| (x - m as f64 / 2.0).powi(2), &[]).unwrap();
            assert!((mass - 1.0).abs() < 1e-13, "m={m}");
            assert!((mean - m as f64 / 2.0).abs() < 1e-13);
            assert!((var - m as f64 / 12.0).abs() < 1e-13);
        }
    }

    #[test]
    fn irwin_hall_quantile_inverts_cdf() {
        let law = ValueLaw::ScaledIrwinHall {
            offset: 1.0,
            scale: 0.5,
            terms: 3,
        };
        let q = law.quantile(0.5);
        assert!((q - 1.75).abs() < 1e-12);
    }

    #[test]
    fn mixture_reports_spread() {
        let law = ValueLaw::Mixture(vec![ValueLaw::Point(0.0), ValueLaw::Point(1.0)]);
        let (m, se) = law.expect_with_stderr(&|x| x, &[]).unwrap();
        assert_eq!(m, 0.5);
        assert!(se > 0.0);
        assert_eq!(law.quantile(0.2), 0.0);
        assert_eq!(law.quantile(0.7), 1.0);
    }
}
