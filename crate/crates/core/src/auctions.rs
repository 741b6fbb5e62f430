//! The two-stage mechanism: an auction followed by a profit-sharing stage.
//!
//! Seller revenue is booked in two parts. Stage 1 is the auction payment,
//! stage 2 the sharing payment `φ(x₁ − b)` collected after the value is
//! realized.

use std::fmt;

use rayon::prelude::*;

use crate::contracts::SharingContract;
use crate::equilibrium::{
    bid_eng, english_strategy, equilibrium_strategy_sp, invert_drop_price, BidFunction,
    DEFAULT_GRID_NODES,
};
use crate::error::{Error, Result};
use crate::info_model::{InfoModel, OrderStats, SignalProfile};
use crate::numerics::{integrate_adaptive, Bracket, RandomStream, RunningStats};
use crate::preferences::Utility;

/// Samples simulated per parallel block.
pub const BLOCK_SIZE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuctionFormat {
    SecondPrice,
    English,
}

impl AuctionFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            AuctionFormat::SecondPrice => "second_price",
            AuctionFormat::English => "english",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "second_price" | "sp" => Ok(AuctionFormat::SecondPrice),
            "english" | "eng" => Ok(AuctionFormat::English),
            other => Err(Error::InvalidParameter(format!("unknown auction format `{other}`"))),
        }
    }
}

impl fmt::Display for AuctionFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one run of the mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionOutcome {
    pub winner_index: usize,
    /// May be negative under profit-only sharing.
    pub auction_payment: f64,
    pub realized_value: f64,
    pub sharing_payment: f64,
    pub buyer_total_profit: f64,
}

impl AuctionOutcome {
    pub fn preliminary_profit(&self) -> f64 {
        self.realized_value - self.auction_payment
    }

    pub fn seller_revenue(&self) -> f64 {
        self.auction_payment + self.sharing_payment
    }
}

/// Expected seller revenue split by stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevenueBreakdown {
    pub stage1: f64,
    pub stage2: f64,
    pub total: f64,
    /// Standard error of `total`; zero for exact evaluations.
    pub stderr_total: f64,
    /// Monte Carlo sample count; zero for exact evaluations.
    pub n_samples: u64,
}

impl RevenueBreakdown {
    pub fn exact(stage1: f64, stage2: f64) -> Self {
        Self {
            stage1,
            stage2,
            total: stage1 + stage2,
            stderr_total: 0.0,
            n_samples: 0,
        }
    }
}

/// Per-stage running moments, merged block by block.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageStats {
    pub stage1: RunningStats,
    pub stage2: RunningStats,
    pub total: RunningStats,
}

impl StageStats {
    pub fn push(&mut self, stage1: f64, stage2: f64) {
        self.stage1.push(stage1);
        self.stage2.push(stage2);
        self.total.push(stage1 + stage2);
    }

    pub fn merge(&mut self, other: &Self) {
        self.stage1.merge(&other.stage1);
        self.stage2.merge(&other.stage2);
        self.total.merge(&other.total);
    }

    pub fn breakdown(&self) -> RevenueBreakdown {
        RevenueBreakdown {
            stage1: self.stage1.mean(),
            stage2: self.stage2.mean(),
            total: self.total.mean(),
            stderr_total: self.total.stderr(),
            n_samples: self.total.count(),
        }
    }
}

/// Applies the sharing stage to a winner who paid `payment`.
pub fn settle(
    contract: &SharingContract,
    winner_index: usize,
    payment: f64,
    realized_value: f64,
) -> AuctionOutcome {
    let sharing_payment = contract.payment(realized_value - payment);
    AuctionOutcome {
        winner_index,
        auction_payment: payment,
        realized_value,
        sharing_payment,
        buyer_total_profit: realized_value - payment - sharing_payment,
    }
}

/// Draws the winner's value from its conditional law using one uniform.
fn winner_value(model: &dyn InfoModel, signals: &SignalProfile, winner: usize, value_u: f64) -> f64 {
    let (y, z) = signals.from_viewpoint(winner);
    let mut profile = Vec::with_capacity(signals.len());
    profile.push(y);
    profile.extend_from_slice(z.as_slice());
    model.value_law(&profile).quantile(value_u)
}

/// Second price auction at given signals; `value_u` is the uniform that
/// fixes the winner's realized value.
pub fn second_price_at(
    model: &dyn InfoModel,
    strategy: &BidFunction,
    contract: &SharingContract,
    signals: &SignalProfile,
    value_u: f64,
) -> AuctionOutcome {
    let winner = signals.argmax();
    let (_, z) = signals.from_viewpoint(winner);
    let payment = strategy.bid(z.top());
    let x = winner_value(model, signals, winner, value_u);
    settle(contract, winner, payment, x)
}

/// One second price auction with freshly drawn signals and value.
pub fn run_second_price(
    model: &dyn InfoModel,
    strategy: &BidFunction,
    contract: &SharingContract,
    stream: &mut RandomStream,
) -> Result<AuctionOutcome> {
    let (signals, value_u) = draw(model, stream)?;
    Ok(second_price_at(model, strategy, contract, &signals, value_u))
}

fn draw(model: &dyn InfoModel, stream: &mut RandomStream) -> Result<(SignalProfile, f64)> {
    let mut y = vec![0.0; model.n_buyers()];
    model.sample_signals_into(stream, &mut y);
    let value_u = stream.uniform();
    Ok((SignalProfile::new(y)?, value_u))
}

/// The English auction payment computed from the signals directly: the
/// runner-up drops at `s(z₁; z₁, z₂, …)`, the bid of a buyer with the
/// runner-up signal who assumes the winner shares it.
pub fn english_payment(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    signals: &SignalProfile,
) -> Result<(usize, f64)> {
    let winner = signals.argmax();
    let (_, losers) = signals.from_viewpoint(winner);
    let z1 = losers.top();
    let mut z = losers.as_slice().to_vec();
    z[0] = z1;
    let payment = bid_eng(model, u, contract, z1, &OrderStats::new(z)?)?;
    Ok((winner, payment))
}

/// English auction outcome via the direct payment formula.
pub fn english_payment_direct(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    signals: &SignalProfile,
    value_u: f64,
) -> Result<AuctionOutcome> {
    let (winner, payment) = english_payment(model, u, contract, signals)?;
    let x = winner_value(model, signals, winner, value_u);
    Ok(settle(contract, winner, payment, x))
}

/// Record of a clock auction: who dropped when, and the inferences made.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockTrace {
    pub outcome: AuctionOutcome,
    /// `(buyer, reported drop price)` in drop order.
    pub drops: Vec<(usize, f64)>,
    /// Signals inferred from the drop prices, in drop order.
    pub inferred: Vec<f64>,
    pub ticks: u64,
}

/// Discretized ascending clock.
///
/// The price rises in steps of `price_step`. A buyer leaves at the first
/// tick above its current drop price; the exit is reported at the midpoint
/// of the tick interval in which it happened, and everyone infers the
/// leaver's signal from that reported price. The last buyer standing pays
/// the final reported exit price. Reporting midpoints keeps each exit within
/// half a step of the continuous-clock price.
pub fn run_english_clock(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    signals: &SignalProfile,
    price_step: f64,
    value_u: f64,
) -> Result<ClockTrace> {
    if !(price_step > 0.0 && price_step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "price step must be positive, got {price_step}"
        )));
    }
    let n = signals.len();
    if n != model.n_buyers() {
        return Err(Error::InvalidParameter(format!(
            "{} signals for a {}-buyer model",
            n,
            model.n_buyers()
        )));
    }
    let y = signals.as_slice();
    let (xlo, xhi) = model.value_interval();
    let ceiling = xhi + 1.0 + (xhi - xlo);
    let (slo, shi) = model.signal_interval();
    let bracket = Bracket::new(slo, shi)?;

    let mut active: Vec<usize> = (0..n).collect();
    let mut q: Vec<f64> = Vec::new();
    let mut drops = Vec::new();
    let mut thresholds = drop_thresholds(model, u, contract, y, &active, &q)?;
    let start = thresholds.iter().copied().fold(xlo, f64::min) - price_step;
    let mut tick: u64 = 0;

    loop {
        tick += 1;
        let price = start + tick as f64 * price_step;
        if price > ceiling {
            return Err(Error::NonTermination { price });
        }
        let leaving: Vec<usize> = active
            .iter()
            .zip(&thresholds)
            .filter(|(_, &t)| price > t)
            .map(|(&i, _)| i)
            .collect();
        if leaving.is_empty() {
            continue;
        }
        let reported = price - 0.5 * price_step;
        if leaving.len() == active.len() {
            // simultaneous exit of everyone left: lowest index keeps the item
            let winner = leaving[0];
            for &i in &leaving[1..] {
                drops.push((i, reported));
            }
            return finish(model, contract, signals, winner, reported, value_u, drops, q, tick);
        }
        let k = active.len();
        let signal = infer_signal(model, u, contract, k, &q, reported, bracket)?;
        for &i in &leaving {
            drops.push((i, reported));
            q.push(signal);
        }
        active.retain(|i| !leaving.contains(i));
        if active.len() == 1 {
            return finish(model, contract, signals, active[0], reported, value_u, drops, q, tick);
        }
        thresholds = drop_thresholds(model, u, contract, y, &active, &q)?;
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    model: &dyn InfoModel,
    contract: &SharingContract,
    signals: &SignalProfile,
    winner: usize,
    payment: f64,
    value_u: f64,
    drops: Vec<(usize, f64)>,
    inferred: Vec<f64>,
    ticks: u64,
) -> Result<ClockTrace> {
    let x = winner_value(model, signals, winner, value_u);
    Ok(ClockTrace {
        outcome: settle(contract, winner, payment, x),
        drops,
        inferred,
        ticks,
    })
}

fn drop_thresholds(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    y: &[f64],
    active: &[usize],
    q: &[f64],
) -> Result<Vec<f64>> {
    active
        .iter()
        .map(|&i| english_strategy(model, u, contract, active.len(), y[i], q))
        .collect()
}

/// Inverts a reported exit price. Midpoint reporting can place the price
/// just outside the range of drop prices; such exits map to the nearest
/// end of the signal interval.
fn infer_signal(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    active: usize,
    q: &[f64],
    price: f64,
    bracket: Bracket,
) -> Result<f64> {
    if price <= english_strategy(model, u, contract, active, bracket.lo, q)? {
        return Ok(bracket.lo);
    }
    if price >= english_strategy(model, u, contract, active, bracket.hi, q)? {
        return Ok(bracket.hi);
    }
    invert_drop_price(model, u, contract, active, q, price, bracket)
}

/// One mechanism variant under comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub contract: SharingContract,
    pub format: AuctionFormat,
}

impl Arm {
    pub fn new(contract: SharingContract, format: AuctionFormat) -> Self {
        Self { contract, format }
    }

    pub fn label(&self) -> String {
        format!("{} / {}", self.contract, self.format)
    }
}

/// An arm ready to be evaluated on a draw.
struct PreparedArm<'a> {
    arm: &'a Arm,
    strategy: Option<BidFunction>,
}

impl PreparedArm<'_> {
    fn new<'a>(model: &dyn InfoModel, u: &Utility, arm: &'a Arm) -> Result<PreparedArm<'a>> {
        let strategy = match arm.format {
            AuctionFormat::SecondPrice => Some(equilibrium_strategy_sp(
                model,
                u,
                &arm.contract,
                DEFAULT_GRID_NODES,
            )?),
            AuctionFormat::English => {
                if let SharingContract::General(_) = arm.contract {
                    return Err(Error::InvalidParameter(
                        "the English auction supports one-time, POSC and PLSC contracts".into(),
                    ));
                }
                None
            }
        };
        Ok(PreparedArm { arm, strategy })
    }

    fn outcome(
        &self,
        model: &dyn InfoModel,
        u: &Utility,
        signals: &SignalProfile,
        value_u: f64,
    ) -> Result<AuctionOutcome> {
        match &self.strategy {
            Some(s) => Ok(second_price_at(model, s, &self.arm.contract, signals, value_u)),
            None => english_payment_direct(model, u, &self.arm.contract, signals, value_u),
        }
    }
}

/// Runs `n` samples in blocks of [`BLOCK_SIZE`], block `i` on
/// `stream.derive(i)`, in parallel. Results come back in block order, so
/// merging them sequentially is deterministic.
pub fn run_blocks<T, F>(n: u64, stream: &RandomStream, block: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RandomStream, usize) -> Result<T> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let size = BLOCK_SIZE as u64;
    let blocks = n.div_ceil(size);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = size.min(n - b * size) as usize;
            let mut s = stream.derive(b);
            block(&mut s, count)
        })
        .collect()
}

/// Monte Carlo revenue of one contract in one format.
pub fn estimate_revenue(
    model: &dyn InfoModel,
    u: &Utility,
    contract: &SharingContract,
    format: AuctionFormat,
    n: u64,
    stream: &RandomStream,
) -> Result<RevenueBreakdown> {
    let arm = Arm::new(contract.clone(), format);
    let report = compare_arms_paired(model, u, std::slice::from_ref(&arm), n, stream)?;
    Ok(report.arms[0].1)
}

/// Paired difference `arms[b] − arms[a]` of total revenue.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDifference {
    pub a: usize,
    pub b: usize,
    pub mean: f64,
    pub stderr: f64,
}

impl PairedDifference {
    pub fn t_stat(&self) -> f64 {
        if self.stderr > 0.0 {
            self.mean / self.stderr
        } else if self.mean == 0.0 {
            0.0
        } else {
            self.mean.signum() * f64::INFINITY
        }
    }

    /// True when `arms[b]` does not fall short of `arms[a]` by more than
    /// `k` paired standard errors.
    pub fn b_not_below_a(&self, k: f64) -> bool {
        self.mean >= -k * self.stderr
    }
}

/// Revenue of several arms on common random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedReport {
    pub arms: Vec<(String, RevenueBreakdown)>,
    /// Every pair `a < b`.
    pub differences: Vec<PairedDifference>,
}

impl PairedReport {
    pub fn difference(&self, a: usize, b: usize) -> Option<PairedDifference> {
        if let Some(d) = self.differences.iter().find(|d| d.a == a && d.b == b) {
            return Some(d.clone());
        }
        self.differences
            .iter()
            .find(|d| d.a == b && d.b == a)
            .map(|d| PairedDifference {
                a,
                b,
                mean: -d.mean,
                stderr: d.stderr,
            })
    }
}

struct BlockStats {
    arms: Vec<StageStats>,
    diffs: Vec<RunningStats>,
}

/// Evaluates every arm on the same signal and value draws.
pub fn compare_arms_paired(
    model: &dyn InfoModel,
    u: &Utility,
    arms: &[Arm],
    n: u64,
    stream: &RandomStream,
) -> Result<PairedReport> {
    if arms.is_empty() {
        return Err(Error::EmptyInput);
    }
    let prepared = arms
        .iter()
        .map(|a| PreparedArm::new(model, u, a))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..arms.len())
        .flat_map(|a| (a + 1..arms.len()).map(move |b| (a, b)))
        .collect();

    let blocks = run_blocks(n, stream, |s, count| {
        let mut out = BlockStats {
            arms: vec![StageStats::default(); arms.len()],
            diffs: vec![RunningStats::default(); pairs.len()],
        };
        let mut totals = vec![0.0; arms.len()];
        for _ in 0..count {
            let (signals, value_u) = draw(model, s)?;
            for (k, p) in prepared.iter().enumerate() {
                let o = p.outcome(model, u, &signals, value_u)?;
                out.arms[k].push(o.auction_payment, o.sharing_payment);
                totals[k] = o.seller_revenue();
            }
            for (d, &(a, b)) in out.diffs.iter_mut().zip(&pairs) {
                d.push(totals[b] - totals[a]);
            }
        }
        Ok(out)
    })?;

    let mut arm_stats = vec![StageStats::default(); arms.len()];
    let mut diff_stats = vec![RunningStats::default(); pairs.len()];
    for b in &blocks {
        for (acc, s) in arm_stats.iter_mut().zip(&b.arms) {
            acc.merge(s);
        }
        for (acc, s) in diff_stats.iter_mut().zip(&b.diffs) {
            acc.merge(s);
        }
    }
    Ok(PairedReport {
        arms: arms
            .iter()
            .zip(&arm_stats)
            .map(|(a, s)| (a.label(), s.breakdown()))
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

/// Contracts compared in one auction format on common random numbers.
pub fn compare_contracts_paired(
    model: &dyn InfoModel,
    u: &Utility,
    contracts: &[SharingContract],
    format: AuctionFormat,
    n: u64,
    seed: u64,
) -> Result<PairedReport> {
    if contracts.len() < 2 {
        return Err(Error::InvalidParameter(
            "a comparison needs at least two contracts".into(),
        ));
    }
    let arms: Vec<Arm> = contracts.iter().map(|c| Arm::new(c.clone(), format)).collect();
    compare_arms_paired(model, u, &arms, n, &RandomStream::new(seed, 0))
}

/// Exact revenue of the two-buyer Bernoulli example with risk-neutral
/// buyers.
///
/// Under PLSC bids equal signals, so stage 1 is `E[min(Y₁, Y₂)] = 1/3` and
/// stage 2 is `α·2/9`. Under POSC the bid is
/// `β(θ) = (1−α)·3θ/(3 − 3αθ)` and the stage revenues reduce to
///
/// ```text
/// stage1 = 2(1−α) ∫₀¹ θ(1−θ)/(1−αθ) dθ
/// stage2 = 5α/9 − (2α(1−α)/3) ∫₀¹ θ(1−θ)(1+2θ)/(1−αθ) dθ
/// ```
pub fn revenue_closed_form_example1(contract: &SharingContract) -> Result<RevenueBreakdown> {
    match contract {
        SharingContract::OneTime => Ok(RevenueBreakdown::exact(1.0 / 3.0, 0.0)),
        SharingContract::Plsc { alpha } => Ok(RevenueBreakdown::exact(1.0 / 3.0, 2.0 * alpha / 9.0)),
        SharingContract::Posc { alpha } => {
            let a = *alpha;
            let i1 = integrate_adaptive(|t| t * (1.0 - t) / (1.0 - a * t), 0.0, 1.0, 16)?;
            let i2 =
                integrate_adaptive(|t| t * (1.0 - t) * (1.0 + 2.0 * t) / (1.0 - a * t), 0.0, 1.0, 16)?;
            let stage1 = 2.0 * (1.0 - a) * i1;
            let stage2 = 5.0 * a / 9.0 - 2.0 * a * (1.0 - a) / 3.0 * i2;
            Ok(RevenueBreakdown::exact(stage1, stage2))
        }
        SharingContract::General(_) => Err(Error::InvalidParameter(
            "closed-form revenue covers one-time, POSC and PLSC contracts".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info_model::BuiltinModel;

    fn profile(y: &[f64]) -> SignalProfile {
        SignalProfile::new(y.to_vec()).unwrap()
    }

    #[test]
    fn forced_second_price_plsc() {
        let m = BuiltinModel::example1();
        let c = SharingContract::plsc(0.5).unwrap();
        let s = equilibrium_strategy_sp(&m, &Utility::Linear, &c, 65).unwrap();
        let o = second_price_at(&m, &s, &c, &profile(&[0.8, 0.2]), 0.1);
        assert_eq!(o.winner_index, 0);
        assert!((o.auction_payment - 0.2).abs() < 1e-10);
        // success probability 0.6, u = 0.1 lands on the success atom
        assert_eq!(o.realized_value, 1.0);
        assert!((o.sharing_payment - 0.4).abs() < 1e-10);
    }

    #[test]
    fn forced_second_price_posc() {
        let m = BuiltinModel::example1();
        let c = SharingContract::posc(0.5).unwrap();
        let s = equilibrium_strategy_sp(&m, &Utility::Linear, &c, 513).unwrap();
        let o = second_price_at(&m, &s, &c, &profile(&[0.2, 0.8]), 0.1);
        assert_eq!(o.winner_index, 1);
        let b = 0.3 / 2.7;
        assert!((o.auction_payment - b).abs() < 1e-6);
        assert!((o.sharing_payment - 0.5 * (1.0 - o.auction_payment)).abs() < 1e-12);
        let lose = second_price_at(&m, &s, &c, &profile(&[0.2, 0.8]), 0.99);
        assert_eq!(lose.realized_value, 0.0);
        assert_eq!(lose.sharing_payment, 0.0);
    }

    #[test]
    fn one_time_never_shares() {
        let m = BuiltinModel::example2_pa();
        let c = SharingContract::OneTime;
        let s = equilibrium_strategy_sp(&m, &Utility::Linear, &c, 33).unwrap();
        let mut st = RandomStream::new(5, 0);
        for _ in 0..100 {
            let o = run_second_price(&m, &s, &c, &mut st).unwrap();
            assert_eq!(o.sharing_payment, 0.0);
        }
    }

    #[test]
    fn english_direct_common_value() {
        let m = BuiltinModel::common_value_avg(3).unwrap();
        let y = profile(&[0.9, 0.6, 0.3]);
        for c in [SharingContract::plsc(0.4).unwrap(), SharingContract::OneTime] {
            let o = english_payment_direct(&m, &Utility::Linear, &c, &y, 0.5).unwrap();
            assert_eq!(o.winner_index, 0);
            assert!((o.auction_payment - 0.5).abs() < 1e-10);
            assert!((o.realized_value - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn clock_matches_direct_payment() {
        let m = BuiltinModel::common_value_avg(3).unwrap();
        let c = SharingContract::plsc(0.3).unwrap();
        let y = profile(&[0.9, 0.6, 0.3]);
        let t = run_english_clock(&m, &Utility::Linear, &c, &y, 1e-4, 0.5).unwrap();
        assert_eq!(t.outcome.winner_index, 0);
        assert!((t.outcome.auction_payment - 0.5).abs() <= 1e-4);
        assert_eq!(t.drops.len(), 2);
        assert_eq!(t.drops[0].0, 2);
    }

    #[test]
    fn clock_two_buyers_pays_lower_signal() {
        let m = BuiltinModel::example1();
        let c = SharingContract::plsc(0.5).unwrap();
        let t = run_english_clock(&m, &Utility::Linear, &c, &profile(&[0.35, 0.7]), 1e-4, 0.5).unwrap();
        assert_eq!(t.outcome.winner_index, 1);
        assert!((t.outcome.auction_payment - 0.35).abs() <= 1e-4);
    }

    #[test]
    fn clock_equal_signals() {
        let m = BuiltinModel::common_value_avg(3).unwrap();
        let c = SharingContract::plsc(0.3).unwrap();
        let t = run_english_clock(&m, &Utility::Linear, &c, &profile(&[0.4, 0.4, 0.4]), 1e-3, 0.5)
            .unwrap();
        assert_eq!(t.outcome.winner_index, 0);
        let prices: Vec<f64> = t.drops.iter().map(|d| d.1).collect();
        assert!(prices.iter().all(|p| (p - 0.4).abs() <= 1e-3));
        assert!((t.outcome.auction_payment - 0.4).abs() <= 1e-3);
    }

    #[test]
    fn clock_rejects_bad_step() {
        let m = BuiltinModel::example1();
        let y = profile(&[0.3, 0.5]);
        let c = SharingContract::OneTime;
        assert!(run_english_clock(&m, &Utility::Linear, &c, &y, 0.0, 0.5).is_err());
    }

    #[test]
    fn conservation_per_outcome() {
        let o = settle(&SharingContract::posc(0.3).unwrap(), 0, 0.4, 0.1);
        let sum = o.auction_payment + o.sharing_payment + o.buyer_total_profit;
        assert!((sum - o.realized_value).abs() < 1e-15);
        assert_eq!(o.sharing_payment, 0.0);
    }

    #[test]
    fn closed_form_example1() {
        let p = revenue_closed_form_example1(&SharingContract::plsc(0.75).unwrap()).unwrap();
        assert!((p.total - 0.5).abs() < 1e-15);
        let p0 = revenue_closed_form_example1(&SharingContract::posc(0.0).unwrap()).unwrap();
        assert!((p0.total - 1.0 / 3.0).abs() < 1e-12);
        let p5 = revenue_closed_form_example1(&SharingContract::posc(0.5).unwrap()).unwrap();
        assert!((p5.stage1 - 0.227_411_277_760_218_8).abs() < 1e-12);
        assert!((p5.stage2 - 0.199_379_490_755_373_3).abs() < 1e-12);
        assert!((p5.total - 0.426_790_768_515_592).abs() < 1e-12);
    }

    #[test]
    fn estimates_are_reproducible() {
        let m = BuiltinModel::example1();
        let c = SharingContract::posc(0.5).unwrap();
        let s = RandomStream::new(11, 3);
        let a = estimate_revenue(&m, &Utility::Linear, &c, AuctionFormat::SecondPrice, 10_000, &s).unwrap();
        let b = estimate_revenue(&m, &Utility::Linear, &c, AuctionFormat::SecondPrice, 10_000, &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_samples, 10_000);
        assert!((a.total - (a.stage1 + a.stage2)).abs() < 1e-12);
    }

    #[test]
    fn plsc_revenue_monte_carlo() {
        let m = BuiltinModel::example1();
        let c = SharingContract::plsc(0.5).unwrap();
        let r = estimate_revenue(
            &m,
            &Utility::Linear,
            &c,
            AuctionFormat::SecondPrice,
            200_000,
            &RandomStream::new(1, 0),
        )
        .unwrap();
        let exact = 1.0 / 3.0 + 1.0 / 9.0;
        assert!((r.total - exact).abs() < 3.0 * r.stderr_total, "{r:?}");
    }

    #[test]
    fn paired_ranking_plsc_over_posc() {
        let m = BuiltinModel::example1();
        let rep = compare_contracts_paired(
            &m,
            &Utility::Linear,
            &[SharingContract::posc(0.5).unwrap(), SharingContract::plsc(0.5).unwrap()],
            AuctionFormat::SecondPrice,
            100_000,
            7,
        )
        .unwrap();
        let d = rep.difference(0, 1).unwrap();
        assert!(d.t_stat() > 3.0, "{d:?}");
        assert!((rep.difference(1, 0).unwrap().mean + d.mean).abs() < 1e-15);
    }

    #[test]
    fn format_names_round_trip() {
        for f in [AuctionFormat::SecondPrice, AuctionFormat::English] {
            assert_eq!(AuctionFormat::parse(f.as_str()).unwrap(), f);
        }
        assert!(AuctionFormat::parse("dutch").is_err());
    }
}
