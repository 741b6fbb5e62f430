//! Piecewise-linear interpolation on monotone tables.

use crate::error::{Error, Result};

/// A table of `(x, y)` nodes with strictly increasing `x` and nondecreasing `y`.
///
/// Linear interpolation between nodes preserves monotonicity and is exact at
/// the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidGrid(format!(
                "{} abscissae but {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes".into()));
        }
        if let Some(v) = xs.iter().chain(&ys).find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite node value {v}")));
        }
        if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "abscissae must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(w) = ys.windows(2).find(|w| w[1] < w[0]) {
            return Err(Error::InvalidGrid(format!(
                "ordinates must not decrease ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { xs, ys })
    }

    /// Samples `f` at `nodes` equally spaced points of `[lo, hi]`.
    pub fn sample<F: FnMut(f64) -> Result<f64>>(lo: f64, hi: f64, nodes: usize, mut f: F) -> Result<Self> {
        let xs = uniform_nodes(lo, hi, nodes)?;
        let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn eval(&self, query: f64) -> Result<f64> {
        let (lo, hi) = (self.x_min(), self.x_max());
        if !(query >= lo && query <= hi) {
            return Err(Error::OutOfRange { query, lo, hi });
        }
        Ok(self.eval_unchecked(query))
    }

    /// Like [`eval`](Self::eval) but clamps the query into range.
    pub fn eval_clamped(&self, query: f64) -> f64 {
        self.eval_unchecked(query.clamp(self.x_min(), self.x_max()))
    }

    fn eval_unchecked(&self, q: f64) -> f64 {
        let i = self.xs.partition_point(|&x| x <= q);
        if i == 0 {
            return self.ys[0];
        }
        if i == self.xs.len() {
            return self.ys[i - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        let t = (q - x0) / (x1 - x0);
        y0 + t * (y1 - y0)
    }
}

/// `nodes` equally spaced points from `lo` to `hi` inclusive.
pub fn uniform_nodes(lo: f64, hi: f64, nodes: usize) -> Result<Vec<f64>> {
    if nodes < 2 {
        return Err(Error::InvalidGrid(format!("need at least two nodes, got {nodes}")));
    }
    if !(lo < hi) {
        return Err(Error::InvalidGrid(format!("empty range [{lo}, {hi}]")));
    }
    let h = (hi - lo) / (nodes - 1) as f64;
    let mut xs: Vec<f64> = (0..nodes).map(|i| lo + h * i as f64).collect();
    xs[nodes - 1] = hi;
    Ok(xs)
}

/// Convenience wrapper: interpolate a table given as `(x, y)` pairs.
pub fn monotone_interpolate(grid: &[(f64, f64)], query: f64) -> Result<f64> {
    let (xs, ys) = grid.iter().copied().unzip();
    MonotoneGrid::new(xs, ys)?.eval(query)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_of_unit_segment() {
        assert_eq!(monotone_interpolate(&[(0.0, 0.0), (1.0, 1.0)], 0.5).unwrap(), 0.5);
    }

    #[test]
    fn exact_at_nodes() {
        assert_eq!(monotone_interpolate(&[(0.0, 0.0), (1.0, 2.0)], 0.0).unwrap(), 0.0);
        assert_eq!(monotone_interpolate(&[(0.0, 0.0), (1.0, 2.0)], 1.0).unwrap(), 2.0);
    }

    #[test]
    fn refined_parabola() {
        let g = MonotoneGrid::sample(0.0, 1.0, 512, |y| Ok(y * y)).unwrap();
        assert!((g.eval(0.5).unwrap() - 0.25).abs() < 1e-4);
    }

    #[test]
    fn out_of_range() {
        let err = monotone_interpolate(&[(0.0, 0.0), (1.0, 1.0)], 1.5).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
    }

    #[test]
    fn rejects_decreasing_values() {
        assert!(MonotoneGrid::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(MonotoneGrid::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn interpolation_preserves_order(
                incs in proptest::collection::vec(0.0f64..1.0, 2..40),
                q1 in 0.0f64..1.0,
                q2 in 0.0f64..1.0,
            ) {
                let n = incs.len();
                let xs = uniform_nodes(0.0, 1.0, n).unwrap();
                let ys: Vec<f64> = incs.iter().scan(0.0, |s, d| { *s += d; Some(*s) }).collect();
                let g = MonotoneGrid::new(xs, ys).unwrap();
                let (a, b) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
                prop_assert!(g.eval(a).unwrap() <= g.eval(b).unwrap());
            }
        }
    }
}
