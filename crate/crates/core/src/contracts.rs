//! Ex-post sharing rules `φ` applied to the preliminary profit `w = x − b`.

use std::fmt;

use crate::error::{Error, Result};

const SLACK: f64 = 1e-12;

/// The second-stage payment rule agreed before the auction.
#[derive(Debug, Clone, PartialEq)]
pub enum SharingContract {
    /// No second stage: `φ ≡ 0`.
    OneTime,
    /// Profit-only sharing: `φ(w) = α·max(0, w)`.
    Posc { alpha: f64 },
    /// Profit-and-loss sharing: `φ(w) = α·w`.
    Plsc { alpha: f64 },
    /// Continuous piecewise-linear `φ`.
    General(PiecewiseLinear),
}

/// Continuous piecewise-linear function given by its breakpoints. Outside
/// the table it continues with the slope of the first/last segment.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    ws: Vec<f64>,
    phis: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        let (ws, phis): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        if ws.len() < 2 {
            return Err(Error::InvalidGrid("a sharing table needs at least two breakpoints".into()));
        }
        if ws.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("sharing breakpoints must increase strictly".into()));
        }
        if ws.iter().chain(&phis).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("sharing table has non-finite entries".into()));
        }
        Ok(Self { ws, phis })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.ws
    }

    pub fn values(&self) -> &[f64] {
        &self.phis
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.ws
            .windows(2)
            .zip(self.phis.windows(2))
            .map(|(w, p)| (p[1] - p[0]) / (w[1] - w[0]))
            .collect()
    }

    pub fn eval(&self, w: f64) -> f64 {
        let n = self.ws.len();
        let i = self.ws.partition_point(|&v| v <= w).clamp(1, n - 1);
        let (w0, w1) = (self.ws[i - 1], self.ws[i]);
        let (p0, p1) = (self.phis[i - 1], self.phis[i]);
        p0 + (p1 - p0) / (w1 - w0) * (w - w0)
    }

    /// The same shape with every value multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            ws: self.ws.clone(),
            phis: self.phis.iter().map(|p| p * k).collect(),
        }
    }
}

impl SharingContract {
    pub fn posc(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SharingContract::Posc { alpha })
    }

    pub fn plsc(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SharingContract::Plsc { alpha })
    }

    pub fn general(points: &[(f64, f64)]) -> Result<Self> {
        Ok(SharingContract::General(PiecewiseLinear::new(points)?))
    }

    /// `φ(w)`.
    #[inline]
    pub fn payment(&self, w: f64) -> f64 {
        match self {
            SharingContract::OneTime => 0.0,
            SharingContract::Posc { alpha } => alpha * w.max(0.0),
            SharingContract::Plsc { alpha } => alpha * w,
            SharingContract::General(pl) => pl.eval(w),
        }
    }

    /// What the winner keeps: `w − φ(w)`.
    #[inline]
    pub fn retained(&self, w: f64) -> f64 {
        w - self.payment(w)
    }

    /// Preliminary-profit levels where `φ` has a kink.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            SharingContract::Posc { .. } => vec![0.0],
            SharingContract::General(pl) => pl.breakpoints().to_vec(),
            _ => Vec::new(),
        }
    }

    /// Share fraction for the two parametric families.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            SharingContract::Posc { alpha } | SharingContract::Plsc { alpha } => Some(*alpha),
            SharingContract::OneTime => Some(0.0),
            SharingContract::General(_) => None,
        }
    }

    /// Short name used in reports and CSV output.
    pub fn kind_name(&self) -> &'static str {
        match self {
            SharingContract::OneTime => "one_time",
            SharingContract::Posc { .. } => "posc",
            SharingContract::Plsc { .. } => "plsc",
            SharingContract::General(_) => "general",
        }
    }
}

impl fmt::Display for SharingContract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SharingContract::OneTime => write!(f, "one_time"),
            SharingContract::Posc { alpha } => write!(f, "posc({alpha})"),
            SharingContract::Plsc { alpha } => write!(f, "plsc({alpha})"),
            SharingContract::General(pl) => {
                write!(f, "general[{} breakpoints]", pl.breakpoints().len())
            }
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "share fraction must lie in [0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Outcome of [`check_admissible`], one flag per admissibility property.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// (i) `φ` nondecreasing and `w − φ(w)` increasing.
    pub monotone: bool,
    /// (ii) `φ(0) = 0`.
    pub zero_at_origin: bool,
    /// (ii) finite stand-in for `φ(w) → ∞`: `φ(w_max) > 0` and a positive
    /// terminal slope. A finite table cannot prove the limit itself.
    pub unbounded_proxy: bool,
    /// (iii) no jump larger than the local slope allows.
    pub continuous: bool,
    pub violations: Vec<String>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.monotone && self.zero_at_origin && self.unbounded_proxy && self.continuous
    }

    /// Enough for the indifference equation to have a unique root.
    pub fn solvable(&self) -> bool {
        self.monotone && self.zero_at_origin && self.continuous
    }
}

/// Checks the admissibility properties on `grid` (sorted preliminary
/// profits). Piecewise-linear contracts are also checked exactly on their
/// segment slopes.
pub fn check_admissible(contract: &SharingContract, grid: &[f64]) -> Result<AdmissibilityReport> {
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("admissibility check needs at least two points".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("admissibility grid must increase strictly".into()));
    }
    let mut violations = Vec::new();
    let mut monotone = true;
    let mut continuous = true;

    let max_slope = marginal_slope_bound(contract).max(0.0);
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (pa, pb) = (contract.payment(a), contract.payment(b));
        if pb < pa - SLACK {
            monotone = false;
            violations.push(format!("(i) phi decreases on [{a}, {b}]"));
        }
        if !((b - pb) - (a - pa) > 0.0) {
            monotone = false;
            violations.push(format!("(i) w - phi(w) does not increase on [{a}, {b}]"));
        }
        if (pb - pa).abs() > max_slope * (b - a) + SLACK {
            continuous = false;
            violations.push(format!("(iii) jump on [{a}, {b}]"));
        }
    }
    if let SharingContract::General(pl) = contract {
        for (k, s) in pl.slopes().iter().enumerate() {
            let (a, b) = (pl.breakpoints()[k], pl.breakpoints()[k + 1]);
            if *s < 0.0 {
                monotone = false;
                violations.push(format!("(i) segment [{a}, {b}] has negative slope {s}"));
            }
            if *s >= 1.0 {
                monotone = false;
                violations.push(format!("(i) segment [{a}, {b}] has slope {s} >= 1"));
            }
        }
    }

    let phi0 = contract.payment(0.0);
    let zero_at_origin = phi0.abs() <= SLACK;
    if !zero_at_origin {
        violations.push(format!("(ii) phi(0) = {phi0}"));
    }

    let w_max = *grid.last().expect("non-empty");
    let terminal_slope = terminal_slope(contract);
    let unbounded_proxy = contract.payment(w_max) > 0.0 && terminal_slope > 0.0;
    if !unbounded_proxy {
        violations.push(format!(
            "(ii) phi({w_max}) = {} with terminal slope {terminal_slope}: no growth without bound",
            contract.payment(w_max)
        ));
    }

    Ok(AdmissibilityReport {
        monotone,
        zero_at_origin,
        unbounded_proxy,
        continuous,
        violations,
    })
}

fn terminal_slope(contract: &SharingContract) -> f64 {
    match contract {
        SharingContract::OneTime => 0.0,
        SharingContract::Posc { alpha } | SharingContract::Plsc { alpha } => *alpha,
        SharingContract::General(pl) => *pl.slopes().last().expect("two breakpoints"),
    }
}

/// Smallest `α'` with every secant slope of `φ` at most `α'`.
pub fn marginal_slope_bound(contract: &SharingContract) -> f64 {
    match contract {
        SharingContract::OneTime => 0.0,
        SharingContract::Posc { alpha } | SharingContract::Plsc { alpha } => *alpha,
        // secants of a piecewise-linear function are averages of its slopes
        SharingContract::General(pl) => pl.slopes().into_iter().fold(f64::NEG_INFINITY, f64::max),
    }
}
