//! Symmetric equilibrium bids from the winner's indifference equations.
//!
//! A bid is the auction payment `b` that leaves the winner with zero expected
//! utility given what winning reveals:
//!
//! ```text
//! E[u(net(X₁ − b)) | conditioning] = 0
//! ```
//!
//! where `net(w) = w − φ(w)` is what the winner keeps of the preliminary
//! profit. The left side is continuous and strictly decreasing in `b`, so the
//! root is unique and bisection finds it.

use rayon::prelude::*;

use crate::contracts::{check_admissible, SharingContract};
use crate::error::{Error, Result};
use crate::info_model::{InfoModel, OrderStats, ValueLaw};
use crate::numerics::root::{invert_increasing, solve_monotone_root};
use crate::numerics::{uniform_nodes, Bracket, MonotoneGrid};
use crate::preferences::Utility;

/// Root tolerance for every bid solve.
pub const BID_TOL: f64 = 1e-11;

/// Nodes used when tabulating a diagonal bid function.
pub const DEFAULT_GRID_NODES: usize = 512;

/// Largest decrease between adjacent tabulated bids that is attributed to
/// solver tolerance rather than a genuinely non-monotone strategy.
const MONOTONE_SLACK: f64 = 1e-8;

/// Solves `E[u(net(X − b))] = 0` for `b` under `law`.
///
/// `w_kinks` are preliminary-profit levels where `net` bends; kinks of `u`
/// are mapped back through `net` here.
pub fn solve_indifference<N>(law: &ValueLaw, u: &Utility, net: N, w_kinks: &[f64]) -> Result<f64>
where
    N: Fn(f64) -> f64,
{
    let mut kinks_w: Vec<f64> = w_kinks.to_vec();
    for &m in u.kinks() {
        kinks_w.push(solve_monotone_root(|w| m - net(w), m, BID_TOL)?);
    }

    let mut failure: Option<Error> = None;
    let mut kinks_x = Vec::with_capacity(kinks_w.len());
    let root = solve_monotone_root(
        |b| {
            kinks_x.clear();
            kinks_x.extend(kinks_w.iter().map(|w| b + w));
            match law.expect(&|x| u.eval(net(x - b)), &kinks_x) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        law.mean(),
        BID_TOL,
    );
    match (root, failure) {
        (_, Some(e)) => Err(e),
        (r, None) => r,
    }
}

fn posc_bid(law: &ValueLaw, u: &Utility, alpha: f64) -> Result<f64> {
    solve_indifference(law, u, |w| w - alpha * w.max(0.0), &[0.0])
}

fn plsc_bid(law: &ValueLaw, u: &Utility, alpha: f64, gain: f64) -> Result<f64> {
    solve_indifference(law, u, |w| (1.0 - alpha) * w + gain, &[])
}

fn general_bid(law: &ValueLaw, u: &Utility, contract: &SharingContract) -> Result<f64> {
    solve_indifference(law, u, |w| contract.retained(w), &contract.kinks())
}

/// Bid under any supported contract given a conditional law.
pub fn bid_for_law(law: &ValueLaw, u: &Utility, contract: &SharingContract) -> Result<f64> {
    match contract {
        SharingContract::OneTime => posc_bid(law, u, 0.0),
        SharingContract::Posc { alpha } => posc_bid(law, u, *alpha),
        SharingContract::Plsc { alpha } => plsc_bid(law, u, *alpha, 0.0),
        SharingContract::General(_) => general_bid(law, u, contract),
    }
}

/// `s(α, y₁, z₁)`: second price bid under a profit-only sharing contract.
/// May be negative.
pub fn bid_posc_sp(model: &dyn InfoModel, u: &Utility, alpha: f64, y1: f64, z1: f64) -> Result<f64> {
    check_alpha(alpha)?;
    posc_bid(&model.pair_law(y1, z1)?, u, alpha)
}

/// `t(α, y₁, z₁)`: second price bid under a profit-and-loss sharing contract.
pub fn bid_plsc_sp(model: &dyn InfoModel, u: &Utility, alpha: f64, y1: f64, z1: f64) -> Result<f64> {
    check_alpha(alpha)?;
    plsc_bid(&model.pair_law(y1, z1)?, u, alpha, 0.0)
}

/// Same root as [`bid_plsc_sp`] but with a constant `gain` added to the
/// winner's retained profit, as when optimal hidden effort is anticipated.
pub fn bid_plsc_with_gain(law: &ValueLaw, u: &Utility, alpha: f64, gain: f64) -> Result<f64> {
    check_alpha(alpha)?;
    plsc_bid(law, u, alpha, gain)
}

/// `s(y₁, z₁; φ)` for a general sharing rule, after checking that the rule
/// makes the indifference equation well posed on the model's profit range.
pub fn bid_general_sp(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    y1: f64,
    z1: f64,
) -> Result<f64> {
    ensure_solvable(model, contract)?;
    general_bid(&model.pair_law(y1, z1)?, u, contract)
}

/// Admissibility on a grid spanning every preliminary profit the model can
/// produce, padded by one unit on each side.
pub fn ensure_solvable(model: &dyn InfoModel, contract: &SharingContract) -> Result<()> {
    let (xlo, xhi) = model.value_interval();
    let span = xhi - xlo + 1.0;
    let grid = uniform_nodes(-span, span, 401)?;
    let report = check_admissible(contract, &grid)?;
    if !report.solvable() {
        return Err(Error::InadmissibleContract(report.violations.join("; ")));
    }
    Ok(())
}

/// Second price bid for any contract: dispatches to the dedicated solver.
pub fn bid_sp(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    y1: f64,
    z1: f64,
) -> Result<f64> {
    match contract {
        SharingContract::OneTime => bid_posc_sp(model, u, 0.0, y1, z1),
        SharingContract::Posc { alpha } => bid_posc_sp(model, u, *alpha, y1, z1),
        SharingContract::Plsc { alpha } => bid_plsc_sp(model, u, *alpha, y1, z1),
        SharingContract::General(_) => bid_general_sp(model, u, contract, y1, z1),
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

/// A tabulated symmetric strategy `y ↦ β(y)`.
#[derive(Debug, Clone)]
pub struct BidFunction {
    grid: MonotoneGrid,
    label: String,
}

impl BidFunction {
    /// Tabulates `bid` on `nodes` equally spaced signals of `[lo, hi]`, in
    /// parallel. Fails if the result decreases by more than solver noise.
    pub fn tabulate<F>(lo: f64, hi: f64, nodes: usize, label: impl Into<String>, bid: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let ys = uniform_nodes(lo, hi, nodes)?;
        let mut bs = ys.par_iter().map(|&y| bid(y)).collect::<Result<Vec<f64>>>()?;
        for i in 1..bs.len() {
            if bs[i] < bs[i - 1] {
                if bs[i] < bs[i - 1] - MONOTONE_SLACK {
                    return Err(Error::InvalidGrid(format!(
                        "equilibrium bids decrease from {} to {} between signals {} and {}",
                        bs[i - 1],
                        bs[i],
                        ys[i - 1],
                        ys[i]
                    )));
                }
                bs[i] = bs[i - 1];
            }
        }
        Ok(Self {
            grid: MonotoneGrid::new(ys, bs)?,
            label: label.into(),
        })
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        self.grid.eval(y)
    }

    /// Evaluation with the signal clamped into the tabulated range.
    #[inline]
    pub fn bid(&self, y: f64) -> f64 {
        self.grid.eval_clamped(y)
    }

    pub fn signals(&self) -> &[f64] {
        self.grid.xs()
    }

    pub fn bids(&self) -> &[f64] {
        self.grid.ys()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `β(y) = bid(y, y)` tabulated on `grid_nodes` signals.
pub fn equilibrium_strategy_sp(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    grid_nodes: usize,
) -> Result<BidFunction> {
    if grid_nodes < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two grid nodes, got {grid_nodes}"
        )));
    }
    if let SharingContract::General(_) = contract {
        ensure_solvable(model, contract)?;
    }
    let (lo, hi) = model.signal_interval();
    BidFunction::tabulate(lo, hi, grid_nodes, format!("{} / {contract}", model.name()), |y| {
        bid_for_law(&model.pair_law(y, y)?, u, contract)
    })
}

/// English auction bid given buyer 1's signal and all opponent signals.
pub fn bid_eng(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    y1: f64,
    z: &OrderStats,
) -> Result<f64> {
    if let SharingContract::General(_) = contract {
        return Err(Error::InvalidParameter(
            "the English auction supports one-time, POSC and PLSC contracts".into(),
        ));
    }
    bid_for_law(&model.full_law(y1, z)?, u, contract)
}

/// Drop price of a buyer with signal `y` while `k_active` buyers remain and
/// the signals `q_so_far` of the dropped buyers have been inferred.
pub fn english_strategy(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    k_active: usize,
    y: f64,
    q_so_far: &[f64],
) -> Result<f64> {
    let n = model.n_buyers();
    if k_active < 2 || k_active > n {
        return Err(Error::InvalidParameter(format!(
            "active buyers must be in [2, {n}], got {k_active}"
        )));
    }
    if q_so_far.len() + k_active != n {
        return Err(Error::InvalidParameter(format!(
            "{k_active} active buyers need {} inferred signals, got {}",
            n - k_active,
            q_so_far.len()
        )));
    }
    bid_eng(model, u, contract, y, &active_profile(y, k_active, q_so_far))
}

/// Opponent order statistics when `k_active` buyers (including buyer 1)
/// share signal `y` and the rest are the inferred `q`.
fn active_profile(y: f64, k_active: usize, q: &[f64]) -> OrderStats {
    let mut z = vec![y; k_active - 1];
    z.extend_from_slice(q);
    OrderStats::from_unsorted(z)
}

/// Recovers dropped-out buyers' signals from the observed drop prices
/// `p₁ ≤ p₂ ≤ …`. The k-th inferred signal solves the drop price equation
/// with `N − k + 1` copies of the unknown signal and the earlier inferences.
pub fn invert_drop_prices(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    observed_prices: &[f64],
) -> Result<Vec<f64>> {
    let n = model.n_buyers();
    if observed_prices.len() >= n {
        return Err(Error::InvalidParameter(format!(
            "at most {} drop prices in a {n}-buyer auction, got {}",
            n - 1,
            observed_prices.len()
        )));
    }
    if observed_prices.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("drop prices must be nondecreasing".into()));
    }
    let (lo, hi) = model.signal_interval();
    let bracket = Bracket::new(lo, hi)?;
    let mut q: Vec<f64> = Vec::with_capacity(observed_prices.len());
    for (k, &p) in observed_prices.iter().enumerate() {
        let active = n - k;
        let signal = invert_drop_price(model, u, contract, active, &q, p, bracket)?;
        q.push(signal);
    }
    Ok(q)
}

/// One step of the drop-price recursion.
pub(crate) fn invert_drop_price(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    active: usize,
    q: &[f64],
    price: f64,
    bracket: Bracket,
) -> Result<f64> {
    let mut failure = None;
    let r = invert_increasing(
        |b| match english_strategy(model, u, contract, active, b, q) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        price,
        bracket,
        1e-13,
    );
    match failure {
        Some(e) => Err(e),
        None => r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info_model::BuiltinModel;

    fn ex1_posc(alpha: f64, y1: f64, z1: f64) -> f64 {
        let s = 2.0 * y1 + z1;
        (1.0 - alpha) * s / (3.0 - alpha * s)
    }

    #[test]
    fn posc_example1_closed_form() {
        let m = BuiltinModel::example1();
        let b = bid_posc_sp(&m, &Utility::Linear, 0.5, 0.6, 0.3).unwrap();
        assert!((b - 1.0 / 3.0).abs() < 1e-10);
        let b = bid_posc_sp(&m, &Utility::Linear, 0.9, 0.05, 0.05).unwrap();
        assert!((b - ex1_posc(0.9, 0.05, 0.05)).abs() < 1e-9);
        assert!((b - 0.005236).abs() < 1e-6);
    }

    #[test]
    fn one_time_is_conditional_mean() {
        let m = BuiltinModel::example2_pa();
        let b = bid_posc_sp(&m, &Utility::Linear, 0.0, 0.7, 0.2).unwrap();
        assert!((b - 0.45).abs() < 1e-10);
    }

    #[test]
    fn plsc_example1_is_conditional_mean() {
        let m = BuiltinModel::example1();
        for alpha in [0.0, 0.3, 0.9] {
            let b = bid_plsc_sp(&m, &Utility::Linear, alpha, 0.6, 0.3).unwrap();
            assert!((b - 0.5).abs() < 1e-10);
        }
        let a = bid_plsc_sp(&m, &Utility::Linear, 0.0, 0.4, 0.8).unwrap();
        let b = bid_posc_sp(&m, &Utility::Linear, 0.0, 0.4, 0.8).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn plsc_bid_rises_with_alpha_under_cara() {
        // value uniform on [0, 1]: example2_pa at y = (0.5, 0.5)
        let m = BuiltinModel::example2_pa();
        let u = Utility::cara(1.0, 1.0).unwrap();
        let b0 = bid_plsc_sp(&m, &u, 0.0, 0.5, 0.5).unwrap();
        let b5 = bid_plsc_sp(&m, &u, 0.5, 0.5, 0.5).unwrap();
        assert!(b5 > b0 + 1e-6, "{b0} {b5}");
        // CARA certainty equivalent: -(1/c) ln E[e^{-c(1-α)(X-b)}] = 0
        let ce = |a: f64| {
            let k = 1.0 - a;
            ((1.0 - (-k).exp()) / k).ln()
        };
        assert!((b0 + ce(0.0)).abs() < 1e-9, "{b0}");
        assert!((b5 + ce(0.5) / 0.5).abs() < 1e-9, "{b5}");
    }

    #[test]
    fn general_specializations() {
        let m = BuiltinModel::example1();
        let u = Utility::cara(1.0, 1.0).unwrap();
        for alpha in [0.2, 0.6] {
            for (y1, z1) in [(0.3, 0.1), (0.8, 0.75)] {
                let posc = bid_posc_sp(&m, &u, alpha, y1, z1).unwrap();
                let plsc = bid_plsc_sp(&m, &u, alpha, y1, z1).unwrap();
                let gp = bid_general_sp(&m, &u, &SharingContract::posc(alpha).unwrap(), y1, z1).unwrap();
                let gl = bid_general_sp(&m, &u, &SharingContract::plsc(alpha).unwrap(), y1, z1).unwrap();
                let table =
                    SharingContract::general(&[(-1.0, 0.0), (0.0, 0.0), (1.0, alpha)]).unwrap();
                let gt = bid_general_sp(&m, &u, &table, y1, z1).unwrap();
                assert!((posc - gp).abs() < 1e-10);
                assert!((plsc - gl).abs() < 1e-10);
                assert!((posc - gt).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn general_rejects_inadmissible() {
        let m = BuiltinModel::example1();
        let steep = SharingContract::general(&[(-1.0, -1.5), (0.0, 0.0), (1.0, 1.5)]).unwrap();
        let err = bid_general_sp(&m, &Utility::Linear, &steep, 0.5, 0.5).unwrap_err();
        assert!(matches!(err, Error::InadmissibleContract(_)));
    }

    #[test]
    fn general_bid_between_zero_and_mean() {
        let m = BuiltinModel::example1();
        let phi = SharingContract::general(&[(-1.0, -0.1), (0.0, 0.0), (0.5, 0.25), (1.0, 0.3)]).unwrap();
        for (y1, z1) in [(0.2, 0.1), (0.5, 0.5), (0.9, 0.4)] {
            let b = bid_general_sp(&m, &Utility::Linear, &phi, y1, z1).unwrap();
            let mean = (2.0 * y1 + z1) / 3.0;
            assert!(b > 0.0 && b <= mean + 1e-12, "{b} vs {mean}");
        }
    }

    #[test]
    fn diagonal_strategies() {
        let m = BuiltinModel::example1();
        let plsc = equilibrium_strategy_sp(&m, &Utility::Linear, &SharingContract::plsc(0.4).unwrap(), 33).unwrap();
        for (y, b) in plsc.signals().iter().zip(plsc.bids()) {
            assert!((y - b).abs() < 1e-9);
        }
        let posc = equilibrium_strategy_sp(&m, &Utility::Linear, &SharingContract::posc(0.5).unwrap(), 33).unwrap();
        for (y, b) in posc.signals().iter().zip(posc.bids()) {
            assert!((1.5 * y / (3.0 - 1.5 * y) - b).abs() < 1e-9);
        }
    }

    #[test]
    fn english_reduces_to_second_price_for_two_buyers() {
        let m = BuiltinModel::example1();
        let u = Utility::cara(1.0, 1.0).unwrap();
        let c = SharingContract::posc(0.3).unwrap();
        let z = OrderStats::new(vec![0.4]).unwrap();
        let a = bid_eng(&m, &u, &c, 0.7, &z).unwrap();
        let b = bid_sp(&m, &u, &c, 0.7, 0.4).unwrap();
        assert!((a - b).abs() < 1e-12);
        let s = english_strategy(&m, &u, &c, 2, 0.6, &[]).unwrap();
        assert!((s - bid_sp(&m, &u, &c, 0.6, 0.6).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn english_common_value_points() {
        let m = BuiltinModel::common_value_avg(3).unwrap();
        let z = OrderStats::new(vec![0.6, 0.3]).unwrap();
        for c in [SharingContract::plsc(0.4).unwrap(), SharingContract::posc(0.5).unwrap()] {
            let b = bid_eng(&m, &Utility::Linear, &c, 0.9, &z).unwrap();
            assert!((b - 0.6).abs() < 1e-10);
        }
        let c = SharingContract::plsc(0.3).unwrap();
        let s = english_strategy(&m, &Utility::Linear, &c, 3, 0.5, &[]).unwrap();
        assert!((s - 0.5).abs() < 1e-10);
        let s = english_strategy(&m, &Utility::Linear, &c, 2, 0.8, &[0.2]).unwrap();
        assert!((s - 0.6).abs() < 1e-10);
    }

    #[test]
    fn drop_price_round_trip() {
        let m = BuiltinModel::common_value_avg(3).unwrap();
        let u = Utility::cara(1.0, 1.0).unwrap();
        let c = SharingContract::plsc(0.3).unwrap();
        // buyers with signals 0.2 and 0.55 drop first and second
        let p1 = english_strategy(&m, &u, &c, 3, 0.2, &[]).unwrap();
        let p2 = english_strategy(&m, &u, &c, 2, 0.55, &[0.2]).unwrap();
        let q = invert_drop_prices(&m, &u, &c, &[p1, p2]).unwrap();
        assert!((q[0] - 0.2).abs() < 1e-8);
        assert!((q[1] - 0.55).abs() < 1e-8);
    }

    #[test]
    fn drop_price_outside_signal_range() {
        let m = BuiltinModel::common_value_avg(3).unwrap();
        let c = SharingContract::plsc(0.3).unwrap();
        let err = invert_drop_prices(&m, &Utility::Linear, &c, &[1.5]).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn strategy_argument_checks() {
        let m = BuiltinModel::common_value_avg(3).unwrap();
        let c = SharingContract::plsc(0.3).unwrap();
        assert!(english_strategy(&m, &Utility::Linear, &c, 1, 0.5, &[0.1, 0.2]).is_err());
        assert!(english_strategy(&m, &Utility::Linear, &c, 2, 0.5, &[]).is_err());
        assert!(equilibrium_strategy_sp(&m, &Utility::Linear, &c, 1).is_err());
    }
}
