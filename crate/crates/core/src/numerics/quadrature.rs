//! Gauss–Legendre quadrature on bounded intervals.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Stop threshold for [`integrate_adaptive`].
pub const ADAPTIVE_TOL: f64 = 1e-10;

const MAX_ADAPTIVE_NODES: usize = 4096;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_n`, starting from the
    /// Chebyshev-like guess `cos(π(i - 1/4)/(n + 1/2))`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[m - 1] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`, failing on the first non-finite sample.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * x;
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { at: t, value: v });
            }
            acc += w * v;
        }
        Ok(acc * half)
    }

    /// Integrates over `[a, b]` after splitting at every break point that
    /// falls strictly inside the interval. Piecewise-smooth integrands
    /// with known kinks keep full Gauss–Legendre accuracy this way.
    pub fn integrate_split<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> Result<f64> {
        if breaks.iter().all(|&c| c <= a || c >= b) {
            return self.integrate(f, a, b);
        }
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut acc = 0.0;
        let mut left = a;
        for c in cuts.into_iter().chain(std::iter::once(b)) {
            if c > left {
                acc += self.integrate(&mut f, left, c)?;
            }
            left = c;
        }
        Ok(acc)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 24-point rule used by the model expectation kernels.
pub fn standard_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(24).expect("24-point rule"))
}

/// Fixed-order Gauss–Legendre estimate of `∫_a^b f`.
pub fn integrate_1d<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> Result<f64> {
    if nodes < 2 {
        return Err(Error::InvalidParameter(format!(
            "integrate_1d needs at least 2 nodes, got {nodes}"
        )));
    }
    GaussLegendre::new(nodes)?.integrate(f, a, b)
}

/// Doubles the node count from `nodes` until successive estimates differ by
/// less than [`ADAPTIVE_TOL`].
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    nodes: usize,
) -> Result<f64> {
    let mut n = nodes.max(2);
    let mut prev = integrate_1d(&mut f, a, b, n)?;
    while n < MAX_ADAPTIVE_NODES {
        n *= 2;
        let next = integrate_1d(&mut f, a, b, n)?;
        if (next - prev).abs() < ADAPTIVE_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_identity() {
        let v = integrate_1d(|t| t, 0.0, 1.0, 2).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrates_parabola() {
        let v = integrate_1d(|t| t * (1.0 - t), 0.0, 1.0, 2).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_rational() {
        // θ(1-θ)/(1-θ/2) = 2θ + 2 - 2/(1-θ/2), integrated analytically
        let exact = 3.0 - 4.0 * std::f64::consts::LN_2;
        let v = integrate_adaptive(|t| t * (1.0 - t) / (1.0 - 0.5 * t), 0.0, 1.0, 4).unwrap();
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 3, 7, 24, 64, 257] {
            let rule = GaussLegendre::new(n).unwrap();
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let err = integrate_1d(|t| 1.0 / (t - t), 0.0, 1.0, 4).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn too_few_nodes() {
        assert!(integrate_1d(|t| t, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn split_handles_kink() {
        let rule = standard_rule();
        let v = rule
            .integrate_split(|x| (x - 0.3f64).max(0.0), 0.0, 1.0, &[0.3])
            .unwrap();
        assert!((v - 0.245).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn exact_for_polynomials_up_to_degree_2n_minus_1(
                nodes in 2usize..12,
                coeffs in proptest::collection::vec(-3.0f64..3.0, 24),
                a in -1.0f64..0.0,
                b in 0.1f64..1.0,
            ) {
                let degree = 2 * nodes - 1;
                let c = &coeffs[..=degree];
                let poly = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
                let anti = |x: f64| {
                    c.iter().enumerate().map(|(k, ck)| ck * x.powi(k as i32 + 1) / (k as f64 + 1.0)).sum::<f64>()
                };
                let exact = anti(b) - anti(a);
                let est = integrate_1d(poly, a, b, nodes).unwrap();
                prop_assert!((est - exact).abs() <= 1e-12 * exact.abs().max(1.0), "{} vs {}", est, exact);
            }
        }
    }
}
