//! Symmetric interdependent-values information structures.
//!
//! Buyer 1 is the reference buyer throughout: a signal profile lists buyer
//! 1's signal first, and the order statistics `Z` are the opponents'
//! signals sorted from highest to lowest. Every equilibrium equation in the
//! crate consumes one of two conditional laws of `X₁`: given
//! `(Y₁ = y₁, Z₁ = z₁)` for the second price auction, or given
//! `(Y₁ = y₁, Z = z)` for the English auction.

mod builtin;
mod law;

pub use builtin::{BuiltinModel, ModelKind};
pub use law::{irwin_hall_cdf, irwin_hall_pdf, ValueLaw};

use crate::error::{Error, Result};
use crate::numerics::{uniform_nodes, RandomStream};

/// One draw of all `N` signals; index 0 is buyer 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalProfile(Vec<f64>);

impl SignalProfile {
    pub fn new(signals: Vec<f64>) -> Result<Self> {
        if signals.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a signal profile needs at least two buyers, got {}",
                signals.len()
            )));
        }
        Ok(Self(signals))
    }

    /// Checks every entry against the model's signal interval as well.
    pub fn for_model(model: &dyn InfoModel, signals: Vec<f64>) -> Result<Self> {
        if signals.len() != model.n_buyers() {
            return Err(Error::InvalidParameter(format!(
                "model `{}` has {} buyers but the profile has {}",
                model.name(),
                model.n_buyers(),
                signals.len()
            )));
        }
        let (lo, hi) = model.signal_interval();
        if let Some(y) = signals.iter().find(|y| !(**y >= lo && **y <= hi)) {
            return Err(Error::OutOfRange { query: *y, lo, hi });
        }
        Self::new(signals)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the highest signal; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, y) in self.0.iter().enumerate().skip(1) {
            if *y > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// The profile seen from buyer `i`: its own signal first, then the
    /// opponents sorted descending.
    pub fn from_viewpoint(&self, i: usize) -> (f64, OrderStats) {
        let opponents: Vec<f64> = self
            .0
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, y)| *y)
            .collect();
        (self.0[i], OrderStats::from_unsorted(opponents))
    }
}

/// Opponent signals sorted descending: `z₁ ≥ z₂ ≥ … ≥ z_{N−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStats(Vec<f64>);

impl OrderStats {
    /// Accepts an already sorted (descending) vector.
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::EmptyInput);
        }
        if z.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(format!(
                "order statistics must be sorted descending: {z:?}"
            )));
        }
        Ok(Self(z))
    }

    pub fn from_unsorted(mut z: Vec<f64>) -> Self {
        z.sort_by(|a, b| b.total_cmp(a));
        Self(z)
    }

    pub fn top(&self) -> f64 {
        self.0[0]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How the pair oracle `E[g(X₁) | Y₁, Z₁]` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    ClosedForm,
    /// Nested sampling of the opponents given `Z₁ = z₁`, `n_inner` draws.
    MonteCarlo { n_inner: usize },
}

/// A symmetric information structure `(X, Y)` with bounded supports.
///
/// Implementors supply signal sampling and the law of `X₁` given a full
/// signal profile. The pair law given `(Y₁, Z₁)` is needed only when
/// `N ≥ 3`; it comes either from [`InfoModel::pair_law_closed`] or from
/// nested sampling via [`InfoModel::sample_opponents_given_top`].
pub trait InfoModel: Send + Sync {
    fn name(&self) -> &str;

    fn n_buyers(&self) -> usize;

    fn signal_interval(&self) -> (f64, f64);

    fn value_interval(&self) -> (f64, f64);

    /// Writes one profile of `n_buyers()` signals into `out`.
    fn sample_signals_into(&self, stream: &mut RandomStream, out: &mut [f64]);

    /// Law of `X₁` given the whole profile, buyer 1 first.
    fn value_law(&self, profile: &[f64]) -> ValueLaw;

    fn pair_law_closed(&self, _y1: f64, _z1: f64) -> Option<ValueLaw> {
        None
    }

    /// Draws the `N − 1` opponent signals given `Y₁ = y₁` and `Z₁ = z₁`:
    /// one opponent pinned at `z₁`, the rest from their law below `z₁`.
    /// Returns `false` when the model has no such sampler.
    fn sample_opponents_given_top(
        &self,
        _y1: f64,
        _z1: f64,
        _stream: &mut RandomStream,
        _out: &mut [f64],
    ) -> bool {
        false
    }

    fn oracle_kind(&self) -> OracleKind {
        OracleKind::ClosedForm
    }

    /// Law of `X₁` given `Y₁ = y₁, Z₁ = z₁`.
    fn pair_law(&self, y1: f64, z1: f64) -> Result<ValueLaw> {
        match self.oracle_kind() {
            OracleKind::ClosedForm => {
                if self.n_buyers() == 2 {
                    return Ok(self.value_law(&[y1, z1]));
                }
                if let Some(law) = self.pair_law_closed(y1, z1) {
                    return Ok(law);
                }
                nested_pair_law(self, y1, z1, DEFAULT_INNER_DRAWS)
            }
            OracleKind::MonteCarlo { n_inner } => nested_pair_law(self, y1, z1, n_inner),
        }
    }

    /// Law of `X₁` given `Y₁ = y₁, Z = z`.
    fn full_law(&self, y1: f64, z: &OrderStats) -> Result<ValueLaw> {
        if z.len() + 1 != self.n_buyers() {
            return Err(Error::InvalidParameter(format!(
                "model `{}` expects {} order statistics, got {}",
                self.name(),
                self.n_buyers() - 1,
                z.len()
            )));
        }
        let mut profile = Vec::with_capacity(self.n_buyers());
        profile.push(y1);
        profile.extend_from_slice(z.as_slice());
        Ok(self.value_law(&profile))
    }
}

const DEFAULT_INNER_DRAWS: usize = 4096;

/// Nested Monte Carlo pair law built from the samplers alone: opponents
/// given `Z₁ = z₁`, then one value draw per opponent profile. The stream is
/// keyed by the conditioning point so repeated calls (and every
/// root-finding step) see the same draws.
fn nested_pair_law<M: InfoModel + ?Sized>(
    model: &M,
    y1: f64,
    z1: f64,
    n_inner: usize,
) -> Result<ValueLaw> {
    let n = model.n_buyers();
    let mut stream = RandomStream::new(y1.to_bits(), z1.to_bits());
    let mut profile = vec![0.0; n];
    let mut parts = Vec::with_capacity(n_inner);
    for _ in 0..n_inner.max(1) {
        profile[0] = y1;
        if n == 2 {
            profile[1] = z1;
        } else if !model.sample_opponents_given_top(y1, z1, &mut stream, &mut profile[1..]) {
            return Err(Error::OracleUnavailable(model.name().to_string()));
        }
        let u = stream.uniform();
        parts.push(ValueLaw::Point(model.value_law(&profile).quantile(u)));
    }
    Ok(ValueLaw::Mixture(parts))
}

/// `count` iid signal profiles.
pub fn sample_signals(
    model: &dyn InfoModel,
    stream: &mut RandomStream,
    count: usize,
) -> Vec<SignalProfile> {
    let n = model.n_buyers();
    (0..count)
        .map(|_| {
            let mut y = vec![0.0; n];
            model.sample_signals_into(stream, &mut y);
            SignalProfile(y)
        })
        .collect()
}

/// One draw of `X₁` given the profile.
pub fn sample_value_given_signals(
    model: &dyn InfoModel,
    y: &SignalProfile,
    stream: &mut RandomStream,
) -> f64 {
    model.value_law(y.as_slice()).quantile(stream.uniform())
}

/// `E[g(X₁) | Y₁ = y₁, Z₁ = z₁]`.
pub fn cond_expect_pair(
    model: &dyn InfoModel,
    g: &dyn Fn(f64) -> f64,
    y1: f64,
    z1: f64,
) -> Result<f64> {
    model.pair_law(y1, z1)?.expect(g, &[])
}

/// `E[g(X₁) | Y₁ = y₁, Z = z]`.
pub fn cond_expect_full(
    model: &dyn InfoModel,
    g: &dyn Fn(f64) -> f64,
    y1: f64,
    z: &OrderStats,
) -> Result<f64> {
    model.full_law(y1, z)?.expect(g, &[])
}

type TestFunction = Box<dyn Fn(f64) -> f64>;

/// One monotonicity failure found by [`check_positive_dependence`].
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceViolation {
    pub test_function: String,
    /// `"y1"` or `"z1"`.
    pub direction: &'static str,
    pub y1: f64,
    pub z1: f64,
    /// Change in the conditional expectation along `direction`.
    pub delta: f64,
}

/// Result of a finite positive-dependence check.
///
/// The check is necessarily partial: it covers the listed test functions
/// on the listed grid only.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceReport {
    pub test_functions: Vec<String>,
    pub grid_resolution: usize,
    pub violations: Vec<DependenceViolation>,
}

impl DependenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates `E[h(X₁) | Y₁ = y₁, Z₁ = z₁]` on a `grid_resolution²` grid for
/// `h = identity` and `h = min(x, c)` at the quartiles of the value range,
/// and flags every place where it decreases in `y₁` or `z₁`. The identity
/// must also increase strictly in `y₁`. Sampled oracles get a 4-stderr
/// allowance.
pub fn check_positive_dependence(
    model: &dyn InfoModel,
    grid_resolution: usize,
) -> Result<DependenceReport> {
    let (ylo, yhi) = model.signal_interval();
    let (xlo, xhi) = model.value_interval();
    let grid = uniform_nodes(ylo, yhi, grid_resolution.max(2))?;

    let mut tests: Vec<(String, TestFunction)> =
        vec![("identity".to_string(), Box::new(|x| x))];
    for q in [0.25, 0.5, 0.75] {
        let c = xlo + q * (xhi - xlo);
        tests.push((format!("min(x, {c})"), Box::new(move |x: f64| x.min(c))));
    }

    const EXACT_SLACK: f64 = 1e-12;
    let mut violations = Vec::new();
    for (label, h) in &tests {
        let strict = label == "identity";
        let mut table = vec![vec![(0.0, 0.0); grid.len()]; grid.len()];
        for (i, &y1) in grid.iter().enumerate() {
            for (j, &z1) in grid.iter().enumerate() {
                table[i][j] = model.pair_law(y1, z1)?.expect_with_stderr(h.as_ref(), &[])?;
            }
        }
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                let (v, se) = table[i][j];
                if i + 1 < grid.len() {
                    let (v2, se2) = table[i + 1][j];
                    let slack = EXACT_SLACK + 4.0 * (se * se + se2 * se2).sqrt();
                    let delta = v2 - v;
                    let bad = if strict && se == 0.0 && se2 == 0.0 {
                        delta <= 0.0
                    } else {
                        delta < -slack
                    };
                    if bad {
                        violations.push(DependenceViolation {
                            test_function: label.clone(),
                            direction: "y1",
                            y1: grid[i],
                            z1: grid[j],
                            delta,
                        });
                    }
                }
                if j + 1 < grid.len() {
                    let (v2, se2) = table[i][j + 1];
                    let slack = EXACT_SLACK + 4.0 * (se * se + se2 * se2).sqrt();
                    let delta = v2 - v;
                    if delta < -slack {
                        violations.push(DependenceViolation {
                            test_function: label.clone(),
                            direction: "z1",
                            y1: grid[i],
                            z1: grid[j],
                            delta,
                        });
                    }
                }
            }
        }
    }
    Ok(DependenceReport {
        test_functions: tests.into_iter().map(|(l, _)| l).collect(),
        grid_resolution: grid.len(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_stats_must_descend() {
        assert!(OrderStats::new(vec![0.2, 0.5]).is_err());
        let z = OrderStats::from_unsorted(vec![0.2, 0.5, 0.1]);
        assert_eq!(z.as_slice(), &[0.5, 0.2, 0.1]);
    }

    #[test]
    fn argmax_breaks_ties_low() {
        let p = SignalProfile::new(vec![0.3, 0.7, 0.7]).unwrap();
        assert_eq!(p.argmax(), 1);
    }

    #[test]
    fn viewpoint_sorts_opponents() {
        let p = SignalProfile::new(vec![0.3, 0.9, 0.6]).unwrap();
        let (y, z) = p.from_viewpoint(1);
        assert_eq!(y, 0.9);
        assert_eq!(z.as_slice(), &[0.6, 0.3]);
    }

    #[test]
    fn profile_needs_two_buyers() {
        assert!(SignalProfile::new(vec![0.5]).is_err());
    }
}
