//! Hidden effort by the winning buyer.
//!
//! After winning, the buyer can raise the resource's value from `X` to
//! `X + e` at private cost `c(e)`. The seller cannot observe `e`, so the
//! sharing contract shapes the effort incentive:
//!
//! * Under PLSC the winner keeps `(1−α)(X + e − b) − c(e)`, so effort does
//!   not depend on `X` and the bid absorbs the constant gain `κ(α)`.
//! * Under POSC with effort chosen after seeing `X` (quadratic cost only),
//!   effort depends on the preliminary profit `w = X − b`, and bids solve
//!   `E[π(α, X − b)] = 0` for the maximized profit `π`.

use crate::auctions::{run_blocks, PairedDifference, PairedReport, RevenueBreakdown, StageStats};
use crate::equilibrium::{bid_plsc_with_gain, solve_indifference, BidFunction, DEFAULT_GRID_NODES};
use crate::error::{Error, Result};
use crate::info_model::{InfoModel, SignalProfile, ValueLaw};
use crate::numerics::quadrature::standard_rule;
use crate::numerics::{MonotoneGrid, RandomStream, RunningStats};
use crate::preferences::Utility;

/// Forward-difference step for exact revenue curves.
pub const DEFAULT_STEP_EXACT: f64 = 1e-3;
/// Forward-difference step for Monte Carlo revenue curves.
pub const DEFAULT_STEP_MC: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum CostKind {
    /// `c(e) = γe²`.
    Quadratic { gamma: f64 },
    /// Marginal cost tabulated on effort levels and interpolated linearly;
    /// `c(e) = ∫ c'` from the lower end of the table.
    Marginal(MonotoneGrid),
}

/// Cost of effort on the feasible interval `[e_lo, e_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    kind: CostKind,
    e_lo: f64,
    e_hi: f64,
}

impl CostFunction {
    /// Quadratic cost on the default interval `[0, max(1, 1/γ)]`.
    pub fn quadratic(gamma: f64) -> Result<Self> {
        Self::quadratic_on(gamma, 0.0, default_effort_cap(gamma))
    }

    pub fn quadratic_on(gamma: f64, e_lo: f64, e_hi: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "quadratic cost needs γ > 0, got {gamma}"
            )));
        }
        Self::checked(CostKind::Quadratic { gamma }, e_lo, e_hi)
    }

    /// Cost from a marginal-cost table `(e, c'(e))`. Marginal cost must be
    /// nonnegative and nondecreasing, which makes `c` increasing and convex.
    pub fn from_marginal_table(points: &[(f64, f64)]) -> Result<Self> {
        let (es, mcs): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        if mcs.iter().any(|&m| m < 0.0) {
            return Err(Error::InvalidParameter("marginal cost must be nonnegative".into()));
        }
        let grid = MonotoneGrid::new(es, mcs)?;
        let (lo, hi) = (grid.x_min(), grid.x_max());
        Self::checked(CostKind::Marginal(grid), lo, hi)
    }

    fn checked(kind: CostKind, e_lo: f64, e_hi: f64) -> Result<Self> {
        if !(0.0 <= e_lo && e_lo < e_hi && e_hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "effort interval must satisfy 0 ≤ e_lo < e_hi, got [{e_lo}, {e_hi}]"
            )));
        }
        let c = Self { kind, e_lo, e_hi };
        let (inf, sup) = (c.marginal(e_lo), c.marginal(e_hi));
        if !(inf < 1.0 && 1.0 < sup) {
            return Err(Error::InvalidParameter(format!(
                "marginal cost must cross 1 inside the effort interval, got c' from {inf} to {sup}"
            )));
        }
        Ok(c)
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    pub fn effort_interval(&self) -> (f64, f64) {
        (self.e_lo, self.e_hi)
    }

    /// `γ` for quadratic costs.
    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            CostKind::Quadratic { gamma } => Some(gamma),
            CostKind::Marginal(_) => None,
        }
    }

    pub fn cost(&self, e: f64) -> f64 {
        match &self.kind {
            CostKind::Quadratic { gamma } => gamma * e * e,
            CostKind::Marginal(g) => {
                let (xs, ys) = (g.xs(), g.ys());
                let mut total = 0.0;
                for i in 1..xs.len() {
                    if e <= xs[i - 1] {
                        break;
                    }
                    let right = e.min(xs[i]);
                    let mid = g.eval_clamped(right);
                    total += 0.5 * (ys[i - 1] + mid) * (right - xs[i - 1]);
                }
                total
            }
        }
    }

    pub fn marginal(&self, e: f64) -> f64 {
        match &self.kind {
            CostKind::Quadratic { gamma } => 2.0 * gamma * e,
            CostKind::Marginal(g) => g.eval_clamped(e),
        }
    }

    /// Smallest feasible effort with `c'(e) ≥ m`, or `e_hi` if none.
    fn marginal_inverse(&self, m: f64) -> f64 {
        match &self.kind {
            CostKind::Quadratic { gamma } => (m / (2.0 * gamma)).clamp(self.e_lo, self.e_hi),
            CostKind::Marginal(g) => {
                let (xs, ys) = (g.xs(), g.ys());
                if m <= ys[0] {
                    return xs[0];
                }
                match ys.iter().position(|&y| y >= m) {
                    None => self.e_hi,
                    Some(i) => {
                        let t = (m - ys[i - 1]) / (ys[i] - ys[i - 1]);
                        xs[i - 1] + t * (xs[i] - xs[i - 1])
                    }
                }
            }
        }
    }
}

/// Upper end of the default effort interval for quadratic costs.
pub fn default_effort_cap(gamma: f64) -> f64 {
    1.0f64.max(1.0 / gamma)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "share fraction must lie in [0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("γ must be positive, got {gamma}")));
    }
    Ok(())
}

/// `e(α) = argmax_E (1−α)e − c(e)`. The stationary point and both ends of
/// the interval are compared; ties go to the smaller effort.
pub fn optimal_effort_plsc(cost: &CostFunction, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let objective = |e: f64| (1.0 - alpha) * e - cost.cost(e);
    let (lo, hi) = cost.effort_interval();
    let mut candidates = [lo, cost.marginal_inverse(1.0 - alpha), hi];
    candidates.sort_by(f64::total_cmp);
    let mut best = candidates[0];
    let mut best_val = objective(best);
    for &e in &candidates[1..] {
        let v = objective(e);
        if v > best_val {
            best = e;
            best_val = v;
        }
    }
    Ok(best)
}

/// `κ(α) = (1−α)e(α) − c(e(α))`, the winner's net gain from effort.
pub fn effort_gain(cost: &CostFunction, alpha: f64) -> Result<f64> {
    let e = optimal_effort_plsc(cost, alpha)?;
    Ok((1.0 - alpha) * e - cost.cost(e))
}

/// PLSC bid with anticipated effort: solves
/// `E[u((1−α)(X₁ − b) + κ(α)) | Y₁ = y₁, Z₁ = z₁] = 0`.
pub fn bid_plsc_pa(
    model: &dyn InfoModel,
    u: &Utility,
    cost: &CostFunction,
    alpha: f64,
    y1: f64,
    z1: f64,
) -> Result<f64> {
    let gain = effort_gain(cost, alpha)?;
    bid_plsc_with_gain(&model.pair_law(y1, z1)?, u, alpha, gain)
}

/// Effort under POSC when the winner sees `w = x − b` first.
pub fn optimal_effort_posc_expost(gamma: f64, alpha: f64, w: f64) -> f64 {
    let full = 1.0 / (2.0 * gamma);
    let shared = (1.0 - alpha) / (2.0 * gamma);
    if w <= -full {
        full
    } else if w < -shared {
        -w
    } else {
        shared
    }
}

/// `π(α, w)`: the winner's profit after choosing effort optimally.
pub fn max_profit_posc_pa(gamma: f64, alpha: f64, w: f64) -> f64 {
    let e = optimal_effort_posc_expost(gamma, alpha, w);
    let gross = w + e;
    gross - alpha * gross.max(0.0) - gamma * e * e
}

/// POSC bid with ex-post effort for risk-neutral buyers:
/// the root of `b ↦ E[π(α, X₁ − b) | Y₁ = y₁, Z₁ = z₁]`.
pub fn bid_posc_pa(model: &dyn InfoModel, gamma: f64, alpha: f64, y1: f64, z1: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    posc_pa_bid_for_law(&model.pair_law(y1, z1)?, gamma, alpha)
}

fn posc_pa_bid_for_law(law: &ValueLaw, gamma: f64, alpha: f64) -> Result<f64> {
    let kinks = [-1.0 / (2.0 * gamma), -(1.0 - alpha) / (2.0 * gamma)];
    solve_indifference(law, &Utility::Linear, |w| max_profit_posc_pa(gamma, alpha, w), &kinks)
}

/// A contract under hidden effort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaContract {
    Plsc { alpha: f64 },
    /// POSC with effort chosen after the value is seen; risk-neutral
    /// buyers and quadratic cost.
    PoscExpost { alpha: f64 },
}

impl PaContract {
    pub fn alpha(&self) -> f64 {
        match *self {
            PaContract::Plsc { alpha } | PaContract::PoscExpost { alpha } => alpha,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PaContract::Plsc { .. } => "plsc_pa",
            PaContract::PoscExpost { .. } => "posc_pa",
        }
    }
}

/// Everything needed to simulate one PA contract.
struct PreparedPa {
    contract: PaContract,
    strategy: BidFunction,
    /// PLSC effort; POSC effort depends on the draw.
    effort: f64,
    gamma: f64,
}

impl PreparedPa {
    fn new(model: &dyn InfoModel, u: &Utility, cost: &CostFunction, contract: PaContract) -> Result<Self> {
        let alpha = contract.alpha();
        check_alpha(alpha)?;
        let (lo, hi) = model.signal_interval();
        let label = format!("{} / {}({alpha})", model.name(), contract.kind_name());
        match contract {
            PaContract::Plsc { alpha } => {
                let gain = effort_gain(cost, alpha)?;
                let strategy = BidFunction::tabulate(lo, hi, DEFAULT_GRID_NODES, label, |y| {
                    bid_plsc_with_gain(&model.pair_law(y, y)?, u, alpha, gain)
                })?;
                Ok(Self {
                    contract,
                    strategy,
                    effort: optimal_effort_plsc(cost, alpha)?,
                    gamma: f64::NAN,
                })
            }
            PaContract::PoscExpost { alpha } => {
                let gamma = posc_pa_gamma(u, cost)?;
                let strategy = BidFunction::tabulate(lo, hi, DEFAULT_GRID_NODES, label, |y| {
                    posc_pa_bid_for_law(&model.pair_law(y, y)?, gamma, alpha)
                })?;
                Ok(Self {
                    contract,
                    strategy,
                    effort: f64::NAN,
                    gamma,
                })
            }
        }
    }

    /// `(stage1, stage2)` seller revenue for one draw.
    fn revenue(&self, model: &dyn InfoModel, signals: &SignalProfile, value_u: f64) -> (f64, f64) {
        let winner = signals.argmax();
        let (y, z) = signals.from_viewpoint(winner);
        let payment = self.strategy.bid(z.top());
        let mut profile = vec![y];
        profile.extend_from_slice(z.as_slice());
        let x = model.value_law(&profile).quantile(value_u);
        let w = x - payment;
        match self.contract {
            PaContract::Plsc { alpha } => (payment, alpha * (w + self.effort)),
            PaContract::PoscExpost { alpha } => {
                let e = optimal_effort_posc_expost(self.gamma, alpha, w);
                (payment, alpha * (w + e).max(0.0))
            }
        }
    }
}

fn posc_pa_gamma(u: &Utility, cost: &CostFunction) -> Result<f64> {
    if !u.is_linear() {
        return Err(Error::InvalidParameter(
            "POSC with ex-post effort is implemented for risk-neutral buyers only".into(),
        ));
    }
    cost.gamma().ok_or_else(|| {
        Error::InvalidParameter("POSC with ex-post effort needs a quadratic cost".into())
    })
}

/// Revenue of several PA contracts on common random numbers.
pub fn compare_pa_paired(
    model: &dyn InfoModel,
    u: &Utility,
    cost: &CostFunction,
    contracts: &[PaContract],
    n: u64,
    stream: &RandomStream,
) -> Result<PairedReport> {
    if contracts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let prepared = contracts
        .iter()
        .map(|&c| PreparedPa::new(model, u, cost, c))
        .collect::<Result<Vec<_>>>()?;
    let k = contracts.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();

    let blocks = run_blocks(n, stream, |s, count| {
        let mut arms = vec![StageStats::default(); k];
        let mut diffs = vec![RunningStats::default(); pairs.len()];
        let mut totals = vec![0.0; k];
        let mut y = vec![0.0; model.n_buyers()];
        for _ in 0..count {
            model.sample_signals_into(s, &mut y);
            let value_u = s.uniform();
            let signals = SignalProfile::new(y.clone())?;
            for (i, p) in prepared.iter().enumerate() {
                let (s1, s2) = p.revenue(model, &signals, value_u);
                arms[i].push(s1, s2);
                totals[i] = s1 + s2;
            }
            for (d, &(a, b)) in diffs.iter_mut().zip(&pairs) {
                d.push(totals[b] - totals[a]);
            }
        }
        Ok((arms, diffs))
    })?;

    let mut arm_stats = vec![StageStats::default(); k];
    let mut diff_stats = vec![RunningStats::default(); pairs.len()];
    for (arms, diffs) in &blocks {
        for (acc, s) in arm_stats.iter_mut().zip(arms) {
            acc.merge(s);
        }
        for (acc, s) in diff_stats.iter_mut().zip(diffs) {
            acc.merge(s);
        }
    }
    Ok(PairedReport {
        arms: contracts
            .iter()
            .zip(&arm_stats)
            .map(|(c, s)| (format!("{}({})", c.kind_name(), c.alpha()), s.breakdown()))
            .collect(),
        differences: pairs
            .iter()
            .zip(&diff_stats)
            .map(|(&(a, b), s)| PairedDifference {
                a,
                b,
                mean: s.mean(),
                stderr: s.stderr(),
            })
            .collect(),
    })
}

/// Monte Carlo PLSC revenue with hidden effort. Stage 2 includes the
/// seller's share `αe(α)` of the effort-generated value.
pub fn revenue_plsc_pa(
    model: &dyn InfoModel,
    u: &Utility,
    cost: &CostFunction,
    alpha: f64,
    n: u64,
    stream: &RandomStream,
) -> Result<RevenueBreakdown> {
    let r = compare_pa_paired(model, u, cost, &[PaContract::Plsc { alpha }], n, stream)?;
    Ok(r.arms[0].1)
}

/// Monte Carlo POSC revenue with ex-post effort.
pub fn revenue_posc_pa(
    model: &dyn InfoModel,
    cost: &CostFunction,
    alpha: f64,
    n: u64,
    stream: &RandomStream,
) -> Result<RevenueBreakdown> {
    let r = compare_pa_paired(
        model,
        &Utility::Linear,
        cost,
        &[PaContract::PoscExpost { alpha }],
        n,
        stream,
    )?;
    Ok(r.arms[0].1)
}

/// Exact PLSC revenue with hidden effort for the two-buyer model with
/// `X | y ~ U[0, y₁ + y₂]` and risk-neutral buyers. For quadratic cost
/// with an interior optimum this is `1/3 + 1/(4γ) + α/6 − α²/(4γ)`.
pub fn revenue_plsc_pa_example2(cost: &CostFunction, alpha: f64) -> Result<RevenueBreakdown> {
    let e = optimal_effort_plsc(cost, alpha)?;
    let gain = effort_gain(cost, alpha)?;
    // bids are E[X | y, z] + κ/(1−α); E[min Y] = 1/3, E[X₁ | win] = 1/2
    let stage1 = 1.0 / 3.0 + gain / (1.0 - alpha);
    let stage2 = alpha * (0.5 + e - stage1);
    Ok(RevenueBreakdown::exact(stage1, stage2))
}

/// The Example 2 PLSC revenue polynomial.
pub fn plsc_pa_example2_formula(gamma: f64, alpha: f64) -> f64 {
    1.0 / 3.0 + 1.0 / (4.0 * gamma) + alpha / 6.0 - alpha * alpha / (4.0 * gamma)
}

/// POSC revenue with ex-post effort for the same two-buyer model, by
/// quadrature over the order statistics `z < y` (joint density 2).
///
/// Given the bid `s(z)`, the seller's share is `α[x − c]⁺` with
/// `c = s − (1−α)/(2γ)`, whose mean over `X ~ U[0, L]` is available in
/// closed form.
pub fn revenue_posc_pa_example2(gamma: f64, alpha: f64) -> Result<RevenueBreakdown> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    let shared = (1.0 - alpha) / (2.0 * gamma);
    let rule = standard_rule();
    let panels = 16;
    let (mut stage1, mut stage2) = (0.0, 0.0);
    for panel in 0..panels {
        let (a, b) = (panel as f64 / panels as f64, (panel + 1) as f64 / panels as f64);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (t, wt) in rule.nodes().iter().zip(rule.weights()) {
            let z = mid + half * t;
            let s = posc_pa_bid_for_law(&ValueLaw::uniform(0.0, 2.0 * z), gamma, alpha)?;
            let c = s - shared;
            let share = |y: f64| {
                let l = y + z;
                let integral = if c <= 0.0 {
                    0.5 * l * l - c * l
                } else if c < l {
                    0.5 * (l - c) * (l - c)
                } else {
                    0.0
                };
                alpha * integral / l
            };
            let inner = rule.integrate_split(share, z, 1.0, &[c - z])?;
            stage1 += wt * half * 2.0 * (1.0 - z) * s;
            stage2 += wt * half * 2.0 * inner;
        }
    }
    Ok(RevenueBreakdown::exact(stage1, stage2))
}

/// Forward difference `(R(h) − R(0))/h` of a revenue curve.
pub fn derivative_at_zero<F: FnMut(f64) -> Result<f64>>(mut curve: F, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    Ok((curve(h)? - curve(0.0)?) / h)
}

/// Paired Monte Carlo forward difference of PLSC revenue at `α = 0`:
/// mean and standard error of `(R(h) − R(0))/h` on common draws.
pub fn derivative_at_zero_mc(
    model: &dyn InfoModel,
    u: &Utility,
    cost: &CostFunction,
    h: f64,
    n: u64,
    stream: &RandomStream,
) -> Result<PairedDifference> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParameter(format!("step must lie in (0, 1), got {h}")));
    }
    let rep = compare_pa_paired(
        model,
        u,
        cost,
        &[PaContract::Plsc { alpha: 0.0 }, PaContract::Plsc { alpha: h }],
        n,
        stream,
    )?;
    let d = &rep.differences[0];
    Ok(PairedDifference {
        a: 0,
        b: 1,
        mean: d.mean / h,
        stderr: d.stderr / h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{bid_plsc_sp, bid_posc_sp};
    use crate::info_model::BuiltinModel;

    #[test]
    fn plsc_effort_examples() {
        let c1 = CostFunction::quadratic(1.0).unwrap();
        assert!((optimal_effort_plsc(&c1, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((optimal_effort_plsc(&c1, 0.5).unwrap() - 0.25).abs() < 1e-15);
        let c2 = CostFunction::quadratic(2.0).unwrap();
        assert!(optimal_effort_plsc(&c2, 0.999_999).unwrap() < 1e-6);
        assert!((effort_gain(&c1, 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((effort_gain(&c1, 0.5).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn effort_clamped_to_interval() {
        let c = CostFunction::quadratic_on(1.0, 0.3, 2.0).unwrap();
        assert_eq!(optimal_effort_plsc(&c, 0.8).unwrap(), 0.3);
        assert!(effort_gain(&c, 0.8).unwrap() < 0.0);
    }

    #[test]
    fn cost_validation() {
        assert!(CostFunction::quadratic(0.0).is_err());
        // sup c' = 2·0.4 < 1
        assert!(CostFunction::quadratic_on(1.0, 0.0, 0.4).is_err());
        assert!(CostFunction::from_marginal_table(&[(0.0, 0.0), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn marginal_table_matches_quadratic() {
        // c'(e) = 2e is linear, so the table reproduces γ = 1 exactly
        let t = CostFunction::from_marginal_table(&[(0.0, 0.0), (0.5, 1.0), (1.0, 2.0)]).unwrap();
        let q = CostFunction::quadratic(1.0).unwrap();
        for e in [0.0, 0.2, 0.5, 0.9] {
            assert!((t.cost(e) - q.cost(e)).abs() < 1e-15);
        }
        for a in [0.0, 0.3, 0.7] {
            let et = optimal_effort_plsc(&t, a).unwrap();
            let eq = optimal_effort_plsc(&q, a).unwrap();
            assert!((et - eq).abs() < 1e-15);
        }
    }

    #[test]
    fn plsc_pa_bids() {
        let m = BuiltinModel::example2_pa();
        let c = CostFunction::quadratic(1.0).unwrap();
        let b = bid_plsc_pa(&m, &Utility::Linear, &c, 0.5, 0.4, 0.4).unwrap();
        assert!((b - 0.525).abs() < 1e-10);
        let b = bid_plsc_pa(&m, &Utility::Linear, &c, 0.0, 0.6, 0.2).unwrap();
        assert!((b - 0.65).abs() < 1e-10);
        let near_one = 1.0 - 1e-9;
        let a = bid_plsc_pa(&m, &Utility::Linear, &c, near_one, 0.6, 0.2).unwrap();
        let s = bid_plsc_sp(&m, &Utility::Linear, near_one, 0.6, 0.2).unwrap();
        assert!((a - s).abs() < 1e-6);
    }

    #[test]
    fn posc_expost_branches() {
        assert_eq!(optimal_effort_posc_expost(1.0, 0.5, 0.0), 0.25);
        assert_eq!(optimal_effort_posc_expost(1.0, 0.5, -0.3), 0.3);
        assert_eq!(optimal_effort_posc_expost(1.0, 0.5, -0.8), 0.5);
        assert!((max_profit_posc_pa(1.0, 0.5, 0.0) - 0.0625).abs() < 1e-15);
        assert!((max_profit_posc_pa(1.0, 0.5, -0.3) + 0.09).abs() < 1e-15);
    }

    #[test]
    fn posc_pa_profit_is_continuous() {
        for gamma in [0.25, 1.0, 4.0] {
            for alpha in [0.1, 0.5, 0.9] {
                for w in [-1.0 / (2.0 * gamma), -(1.0 - alpha) / (2.0 * gamma)] {
                    let l = max_profit_posc_pa(gamma, alpha, w - 1e-12);
                    let r = max_profit_posc_pa(gamma, alpha, w + 1e-12);
                    assert!((l - r).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn posc_pa_bid_fixtures() {
        let m = BuiltinModel::example2_pa();
        let b = bid_posc_pa(&m, 1.0, 0.5, 0.4, 0.4).unwrap();
        assert!((b - 0.5103029812133978).abs() < 1e-9, "{b}");
        let b = bid_posc_pa(&m, 100.0, 0.5, 0.4, 0.4).unwrap();
        assert!((b - 0.33335146917692465).abs() < 1e-9, "{b}");
        let s = bid_posc_sp(&m, &Utility::Linear, 0.5, 0.4, 0.4).unwrap();
        assert!((b - s).abs() < 1e-2);
        let c = CostFunction::quadratic(1.0).unwrap();
        let p0 = bid_posc_pa(&m, 1.0, 0.0, 0.7, 0.3).unwrap();
        let l0 = bid_plsc_pa(&m, &Utility::Linear, &c, 0.0, 0.7, 0.3).unwrap();
        assert!((p0 - l0).abs() < 1e-10);
    }

    #[test]
    fn plsc_pa_closed_form() {
        let c = CostFunction::quadratic(1.0).unwrap();
        let r0 = revenue_plsc_pa_example2(&c, 0.0).unwrap();
        assert!((r0.total - 0.583_333_333_333_333).abs() < 1e-12);
        let r = revenue_plsc_pa_example2(&c, 1.0 / 3.0).unwrap();
        assert!((r.total - 0.611_111_111_111_111).abs() < 1e-12);
        for gamma in [0.25, 0.5, 1.0, 2.0] {
            let c = CostFunction::quadratic(gamma).unwrap();
            for alpha in [0.0, 0.2, 0.6, 0.9] {
                let r = revenue_plsc_pa_example2(&c, alpha).unwrap();
                assert!((r.total - plsc_pa_example2_formula(gamma, alpha)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn posc_pa_quadrature_fixtures() {
        let r = revenue_posc_pa_example2(1.0, 0.3).unwrap();
        assert!((r.total - 0.6126427650560943).abs() < 1e-7, "{r:?}");
        let r0 = revenue_posc_pa_example2(1.0, 0.0).unwrap();
        assert!((r0.total - 0.583_333_333_333_333).abs() < 1e-7, "{r0:?}");
        let r = revenue_posc_pa_example2(0.25, 0.1).unwrap();
        assert!((r.total - 1.3400003927).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn derivative_of_known_curve() {
        let d = derivative_at_zero(|a| Ok(2.0 + 0.7 * a - 3.0 * a * a), 1e-6).unwrap();
        assert!((d - 0.7).abs() < 1e-5);
        let d = derivative_at_zero(|a| Ok(plsc_pa_example2_formula(1.0, a)), DEFAULT_STEP_EXACT).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-3);
    }

    #[test]
    fn plsc_pa_monte_carlo_matches_closed_form() {
        let m = BuiltinModel::example2_pa();
        let c = CostFunction::quadratic(1.0).unwrap();
        let r = revenue_plsc_pa(&m, &Utility::Linear, &c, 0.3, 100_000, &RandomStream::new(3, 0)).unwrap();
        let exact = plsc_pa_example2_formula(1.0, 0.3);
        assert!((r.total - exact).abs() < 3.0 * r.stderr_total, "{r:?} vs {exact}");
    }

    #[test]
    fn posc_pa_needs_risk_neutral_quadratic() {
        let m = BuiltinModel::example2_pa();
        let c = CostFunction::quadratic(1.0).unwrap();
        let cara = Utility::cara(1.0, 1.0).unwrap();
        let s = RandomStream::new(1, 0);
        assert!(compare_pa_paired(&m, &cara, &c, &[PaContract::PoscExpost { alpha: 0.3 }], 10, &s).is_err());
        let t = CostFunction::from_marginal_table(&[(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert!(revenue_posc_pa(&m, &t, 0.3, 10, &s).is_err());
    }
}
