//! Money utilities of weakly risk-averse buyers, normalized so `u(0) = 0`.

use crate::error::{Error, Result};

const CONCAVITY_SLACK: f64 = 1e-12;

/// A concave, increasing von Neumann–Morgenstern utility of money.
#[derive(Debug, Clone, PartialEq)]
pub enum Utility {
    /// Risk neutral: `u(x) = x`.
    Linear,
    /// Constant absolute risk aversion: `u(x) = A(1 − e^{−c x})`.
    Cara { scale: f64, aversion: f64 },
    /// Piecewise-linear table, extended linearly beyond its end nodes.
    Tabulated(TabulatedUtility),
}

impl Utility {
    pub fn cara(scale: f64, aversion: f64) -> Result<Self> {
        if !(scale > 0.0 && aversion > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "CARA utility needs A > 0 and c > 0, got A = {scale}, c = {aversion}"
            )));
        }
        Ok(Utility::Cara { scale, aversion })
    }

    /// A tabulated utility; rejected unless it passes [`verify_utility`] on
    /// its own nodes.
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        let table = TabulatedUtility::from_points(points)?;
        let u = Utility::Tabulated(table);
        let report = verify_utility(&u, &u.natural_grid())?;
        if !report.passed() {
            return Err(Error::InvalidParameter(format!(
                "utility table rejected: {}",
                report.violations.join("; ")
            )));
        }
        Ok(u)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Utility::Linear => x,
            Utility::Cara { scale, aversion } => -scale * (-aversion * x).exp_m1(),
            Utility::Tabulated(t) => t.eval(x),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Utility::Linear)
    }

    /// Money levels where `u` is not differentiable.
    pub fn kinks(&self) -> &[f64] {
        match self {
            Utility::Tabulated(t) => t.interior_nodes(),
            _ => &[],
        }
    }

    /// A grid covering the interesting money range of this utility.
    pub fn natural_grid(&self) -> Vec<f64> {
        match self {
            Utility::Tabulated(t) => t.nodes().to_vec(),
            _ => (-40..=40).map(|i| i as f64 * 0.05).collect(),
        }
    }
}

/// Piecewise-linear utility table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedUtility {
    xs: Vec<f64>,
    us: Vec<f64>,
}

impl TabulatedUtility {
    /// Builds a table without any shape check, so arbitrary tables can be
    /// fed to [`verify_utility`].
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let (xs, us): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        if xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(
                "utility table needs at least two strictly increasing money levels".into(),
            ));
        }
        if xs.iter().chain(&us).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("utility table has non-finite entries".into()));
        }
        Ok(Self { xs, us })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    fn interior_nodes(&self) -> &[f64] {
        &self.xs[1..self.xs.len() - 1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (xs, us) = (&self.xs, &self.us);
        let n = xs.len();
        let i = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (i0, i1) = (i - 1, i);
        let slope = (us[i1] - us[i0]) / (xs[i1] - xs[i0]);
        us[i0] + slope * (x - xs[i0])
    }
}

/// Shape check of a utility on a money grid.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityReport {
    pub violations: Vec<String>,
}

impl UtilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `u(0) = 0`, strict increase between adjacent grid points, and
/// concavity on every consecutive triple (middle value at least the chord).
pub fn verify_utility(u: &Utility, grid: &[f64]) -> Result<UtilityReport> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("utility check needs at least two points".into()));
    }
    let mut violations = Vec::new();
    let u0 = u.eval(0.0);
    if u0.abs() > CONCAVITY_SLACK {
        violations.push(format!("u(0) = {u0}, expected 0"));
    }
    let vals: Vec<f64> = grid.iter().map(|&x| u.eval(x)).collect();
    for i in 0..grid.len() - 1 {
        if !(vals[i + 1] > vals[i]) {
            violations.push(format!(
                "not increasing between {} and {} ({} -> {})",
                grid[i],
                grid[i + 1],
                vals[i],
                vals[i + 1]
            ));
        }
    }
    for i in 1..grid.len().saturating_sub(1) {
        let (a, b, c) = (grid[i - 1], grid[i], grid[i + 1]);
        let t = (b - a) / (c - a);
        let chord = vals[i - 1] + t * (vals[i + 1] - vals[i - 1]);
        if vals[i] < chord - CONCAVITY_SLACK {
            violations.push(format!("not concave at {b}: u = {} < chord {chord}", vals[i]));
        }
    }
    Ok(UtilityReport { violations })
}
