//! The verification suite: every module invariant as a pass/fail line.

use std::fmt;
use std::time::Instant;

use psclab::auctions::{english_payment, second_price_at};
use psclab::info_model::check_positive_dependence;
use psclab::principal_agent::{
    compare_pa_paired, derivative_at_zero, derivative_at_zero_mc, effort_gain, max_profit_posc_pa,
    optimal_effort_plsc, optimal_effort_posc_expost, plsc_pa_example2_formula,
    revenue_plsc_pa_example2, revenue_posc_pa_example2, DEFAULT_STEP_EXACT, DEFAULT_STEP_MC,
};
use psclab::{
    bid_eng, bid_general_sp, bid_plsc_sp, bid_posc_sp, check_admissible, compare_arms_paired,
    english_strategy, equilibrium_strategy_sp, invert_drop_prices, revenue_closed_form_example1,
    run_english_clock, verify_utility, Arm, AuctionFormat, BuiltinModel, CostFunction, InfoModel,
    OracleKind, OrderStats, PaContract, RandomStream, SharingContract, SignalProfile, Utility,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::output::render_csv;
use crate::sweep::sweep_alpha;

type Outcome = psclab::Result<(bool, String)>;

/// Slack for inequalities between solver outputs.
pub const SOLVER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Reduced sample sizes and grids.
    Fast,
    /// Full grids, larger samples and the Monte Carlo ranking checks.
    All,
}

impl Scope {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fast" => Some(Scope::Fast),
            "all" => Some(Scope::All),
            _ => None,
        }
    }

    fn pick<T>(self, fast: T, all: T) -> T {
        match self {
            Scope::Fast => fast,
            Scope::All => all,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<58} {:>7.2}s  {}", self.name, self.seconds, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub scope: Scope,
    pub lines: Vec<CheckLine>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| !l.passed).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        write!(
            f,
            "{} of {} checks passed in {:.1}s",
            self.lines.len() - self.failures(),
            self.lines.len(),
            self.seconds
        )
    }
}

struct Suite {
    lines: Vec<CheckLine>,
}

impl Suite {
    fn run(&mut self, name: &str, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.lines.push(CheckLine {
            name: name.to_string(),
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
}

/// Runs the suite. `tamper` adds a contract with slope 1.5 to the
/// admissibility check, which must then fail.
pub fn verify_suite(scope: Scope, tamper: bool) -> VerifyReport {
    let start = Instant::now();
    let mut s = Suite { lines: Vec::new() };
    let n = scope.pick(20_000, 200_000);

    s.run("preferences: utility shape", check_utilities);
    s.run("contracts: admissibility of shipped rules", || check_contracts(tamper));
    s.run("info_model: positive dependence of built-ins", || {
        check_dependence(scope.pick(8, 16))
    });
    s.run("info_model: nested sampling vs closed form", || {
        check_nested_oracle(scope.pick(4, 16))
    });
    s.run("equilibrium: example1 POSC bid closed form", || {
        let report = posc_closed_form_grid(scope.pick(6, 16), &alpha_grid(scope.pick(4, 8), 0.7))?;
        Ok((report.max_error <= SOLVER_SLACK, report.to_string()))
    });
    s.run("equilibrium: second price bid monotonicity and bounds", || {
        let r = second_price_lemma_suite(scope.pick(5, 16), &alpha_grid(scope.pick(3, 8), 0.7))?;
        Ok((r.passed(), r.to_string()))
    });
    s.run("equilibrium: English bid monotonicity", || {
        let r = english_lemma_suite(scope.pick(4, 8), &alpha_grid(scope.pick(2, 4), 0.6))?;
        Ok((r.passed(), r.to_string()))
    });
    s.run("equilibrium: general solver specializes", check_specialization);
    s.run("equilibrium: drop prices invert the English strategy", || {
        check_drop_prices(scope.pick(10, 60))
    });
    s.run("auctions: example1 closed-form revenue", check_example1_closed_form);
    s.run("auctions: outcome accounting identity", check_accounting);
    s.run("auctions: example1 Monte Carlo vs closed form", || check_example1_mc(n));
    s.run("auctions: English clock vs direct payment", || {
        check_clock(scope.pick(20, 200), scope.pick(1e-3, 1e-4))
    });
    s.run("auctions: English equals second price for N=2", check_two_buyer_english);
    s.run("principal_agent: effort policy and winner profit", check_effort);
    s.run("principal_agent: PLSC closed form and optimum", check_plsc_pa_closed_form);
    s.run("principal_agent: PLSC Monte Carlo vs closed form", || check_plsc_pa_mc(n));
    s.run("principal_agent: POSC fixtures and interior optimum", check_posc_pa_closed_form);
    s.run("cli: sweep output is deterministic", check_sweep_determinism);
    if scope == Scope::All {
        s.run("auctions: paired ranking on example1 (3 stderr)", || check_ranking(n));
        s.run("auctions: English not below second price under PLSC", || {
            check_english_ranking(100_000)
        });
        s.run("auctions: general rule between one-time and PLSC", || {
            check_general_bracket(100_000)
        });
        s.run("principal_agent: POSC beats one-time payment", || check_posc_pa_gain(1_000_000));
        s.run("principal_agent: POSC above PLSC at gamma 0.25", || check_reversal(400_000));
        s.run("principal_agent: derivative at zero (Monte Carlo)", || {
            check_derivative_mc(200_000)
        });
    }
    VerifyReport {
        scope,
        lines: s.lines,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// `count` evenly spaced share fractions from 0 to `top`.
pub fn alpha_grid(count: usize, top: f64) -> Vec<f64> {
    if count < 2 {
        return vec![0.0];
    }
    (0..count).map(|k| top * k as f64 / (count - 1) as f64).collect()
}

/// Cell midpoints of `[0, 1]`.
pub fn midpoint_grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| (i as f64 + 0.5) / count as f64).collect()
}

fn pass_if(ok: bool, detail: impl Into<String>) -> Outcome {
    Ok((ok, detail.into()))
}

fn check_utilities() -> Outcome {
    let grid: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
    let us = [
        ("linear", Utility::Linear),
        ("cara(1,1)", Utility::cara(1.0, 1.0)?),
        ("cara(2,0.5)", Utility::cara(2.0, 0.5)?),
        (
            "tabulated",
            Utility::tabulated(&[(-2.0, -3.0), (0.0, 0.0), (1.0, 1.0), (2.0, 1.5)])?,
        ),
    ];
    let mut bad = Vec::new();
    for (name, u) in &us {
        if !verify_utility(u, &grid)?.passed() {
            bad.push(*name);
        }
    }
    pass_if(bad.is_empty(), format!("{} utilities, failing: {bad:?}", us.len()))
}

fn check_contracts(tamper: bool) -> Outcome {
    let grid: Vec<f64> = (0..=400).map(|i| -2.0 + 0.01 * i as f64).collect();
    let mut rules = vec![
        ("posc(0.5)", SharingContract::posc(0.5)?),
        ("plsc(0.5)", SharingContract::plsc(0.5)?),
        (
            "general(max slope 0.4)",
            SharingContract::general(&[(-1.0, -0.1), (0.0, 0.0), (0.25, 0.05), (0.5, 0.15), (1.0, 0.35)])?,
        ),
    ];
    if tamper {
        rules.push((
            "general(slope 1.5)",
            SharingContract::general(&[(-1.0, -1.5), (0.0, 0.0), (1.0, 1.5)])?,
        ));
    }
    let mut bad = Vec::new();
    for (name, c) in &rules {
        if !check_admissible(c, &grid)?.admissible() {
            bad.push(*name);
        }
    }
    pass_if(bad.is_empty(), format!("{} rules, inadmissible: {bad:?}", rules.len()))
}

fn builtin_models() -> psclab::Result<Vec<BuiltinModel>> {
    Ok(vec![
        BuiltinModel::example1(),
        BuiltinModel::example2_pa(),
        BuiltinModel::common_value_avg(3)?,
        BuiltinModel::common_value_avg(4)?,
        BuiltinModel::private_values(3)?,
    ])
}

fn check_dependence(res: usize) -> Outcome {
    let mut bad = Vec::new();
    let models = builtin_models()?;
    for m in &models {
        if !check_positive_dependence(m, res)?.passed() {
            bad.push(m.name().to_string());
        }
    }
    pass_if(bad.is_empty(), format!("{} models on a {res}x{res} grid, failing: {bad:?}", models.len()))
}

/// Compares nested sampling with the closed-form pair law. Cells are
/// independent 3-stderr checks, so about 0.3% of them miss by chance: the
/// check allows one miss per 64 cells (at least one) and none beyond 4.5.
fn check_nested_oracle(res: usize) -> Outcome {
    let grid = midpoint_grid(res);
    let allowed = (res * res).div_ceil(64);
    let mut worst: f64 = 0.0;
    let mut exceed = 0;
    for closed in [BuiltinModel::example1(), BuiltinModel::example2_pa()] {
        let nested = closed.clone().with_oracle(OracleKind::MonteCarlo { n_inner: 4096 });
        for &y1 in &grid {
            for &z1 in &grid {
                let exact = closed.pair_law(y1, z1)?.mean();
                let (est, se) = nested.pair_law(y1, z1)?.expect_with_stderr(&|x| x, &[])?;
                let dev = (est - exact).abs() / se;
                worst = worst.max(dev);
                exceed += usize::from(dev > 3.0);
            }
        }
    }
    pass_if(
        exceed <= 2 * allowed && worst <= 4.5,
        format!("{exceed} cells beyond 3 stderr (allowed {}), worst {worst:.2}", 2 * allowed),
    )
}

/// Largest gap between the solver and `(1−α)(2y₁+z₁)/(3−α(2y₁+z₁))`.
#[derive(Debug, Clone)]
pub struct ClosedFormReport {
    pub points: usize,
    pub max_error: f64,
}

impl fmt::Display for ClosedFormReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} points, max |error| {:.2e}", self.points, self.max_error)
    }
}

pub fn posc_closed_form_grid(res: usize, alphas: &[f64]) -> psclab::Result<ClosedFormReport> {
    let m = BuiltinModel::example1();
    let grid = midpoint_grid(res);
    let cells: Vec<(f64, f64, f64)> = grid
        .iter()
        .flat_map(|&y| grid.iter().flat_map(move |&z| alphas.iter().map(move |&a| (y, z, a))))
        .collect();
    let errors = cells
        .par_iter()
        .map(|&(y, z, a)| {
            let s = 2.0 * y + z;
            let exact = (1.0 - a) * s / (3.0 - a * s);
            Ok((bid_posc_sp(&m, &Utility::Linear, a, y, z)? - exact).abs())
        })
        .collect::<psclab::Result<Vec<f64>>>()?;
    Ok(ClosedFormReport {
        points: cells.len(),
        max_error: errors.into_iter().fold(0.0, f64::max),
    })
}

/// Inequalities checked by a lemma suite, with the failures found.
#[derive(Debug, Clone, Default)]
pub struct LemmaReport {
    pub checks: usize,
    pub violations: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} inequalities, {} violations", self.checks, self.violations.len())?;
        if let Some(v) = self.violations.first() {
            write!(f, " (first: {v})")?;
        }
        Ok(())
    }
}

fn utilities() -> psclab::Result<Vec<(&'static str, Utility)>> {
    Ok(vec![("linear", Utility::Linear), ("cara(1,1)", Utility::cara(1.0, 1.0)?)])
}

/// Second price bids on a `res × res × alphas` grid for example1 and
/// common_value_avg(3), linear and CARA(1,1) utilities:
///
/// * POSC increasing in `y₁`, nondecreasing in `z₁`, decreasing in `α`;
/// * PLSC positive, increasing in `y₁`, nondecreasing in `α`;
/// * `POSC ≤ PLSC ≤ E[X₁ | y₁, z₁]`.
pub fn second_price_lemma_suite(res: usize, alphas: &[f64]) -> psclab::Result<LemmaReport> {
    let grid = midpoint_grid(res);
    let mut report = LemmaReport::default();
    for m in [BuiltinModel::example1(), BuiltinModel::common_value_avg(3)?] {
        for (uname, u) in utilities()? {
            let idx: Vec<(usize, usize, usize)> = (0..res)
                .flat_map(|i| (0..res).flat_map(move |j| (0..alphas.len()).map(move |k| (i, j, k))))
                .collect();
            let solved = idx
                .par_iter()
                .map(|&(i, j, k)| {
                    let (y, z, a) = (grid[i], grid[j], alphas[k]);
                    Ok((
                        bid_posc_sp(&m, &u, a, y, z)?,
                        bid_plsc_sp(&m, &u, a, y, z)?,
                        m.pair_law(y, z)?.mean(),
                    ))
                })
                .collect::<psclab::Result<Vec<_>>>()?;
            let at = |i: usize, j: usize, k: usize| solved[(i * res + j) * alphas.len() + k];
            let tag = |i: usize, j: usize, k: usize| {
                format!("{} {uname} y1={:.4} z1={:.4} α={}", m.name(), grid[i], grid[j], alphas[k])
            };
            for &(i, j, k) in &idx {
                let (s, t, mean) = at(i, j, k);
                report.expect(s <= t + SOLVER_SLACK, || format!("POSC above PLSC at {}", tag(i, j, k)));
                report.expect(t <= mean + SOLVER_SLACK, || format!("PLSC above E[X] at {}", tag(i, j, k)));
                report.expect(t > 0.0, || format!("PLSC not positive at {}", tag(i, j, k)));
                if i + 1 < res {
                    let (s2, t2, _) = at(i + 1, j, k);
                    report.expect(s2 > s - SOLVER_SLACK, || format!("POSC falls in y1 at {}", tag(i, j, k)));
                    report.expect(t2 > t - SOLVER_SLACK, || format!("PLSC falls in y1 at {}", tag(i, j, k)));
                }
                if j + 1 < res {
                    let (s2, _, _) = at(i, j + 1, k);
                    report.expect(s2 >= s - SOLVER_SLACK, || format!("POSC falls in z1 at {}", tag(i, j, k)));
                }
                if k + 1 < alphas.len() {
                    let (s2, t2, _) = at(i, j, k + 1);
                    report.expect(s2 < s + SOLVER_SLACK, || format!("POSC rises in α at {}", tag(i, j, k)));
                    report.expect(t2 >= t - SOLVER_SLACK, || format!("PLSC falls in α at {}", tag(i, j, k)));
                }
            }
        }
    }
    Ok(report)
}

/// English bids on common_value_avg(3): increasing in `y₁` and
/// nondecreasing in each opponent signal, for POSC and PLSC.
pub fn english_lemma_suite(res: usize, alphas: &[f64]) -> psclab::Result<LemmaReport> {
    let m = BuiltinModel::common_value_avg(3)?;
    let grid = midpoint_grid(res);
    let mut report = LemmaReport::default();
    for (uname, u) in utilities()? {
        for &a in alphas {
            for c in [SharingContract::posc(a)?, SharingContract::plsc(a)?] {
                // (y1, z1, z2) with z1 ≥ z2
                let idx: Vec<(usize, usize, usize)> = (0..res)
                    .flat_map(|i| (0..res).flat_map(move |j| (0..=j).map(move |k| (i, j, k))))
                    .collect();
                let bids = idx
                    .par_iter()
                    .map(|&(i, j, k)| {
                        let z = OrderStats::new(vec![grid[j], grid[k]])?;
                        bid_eng(&m, &u, &c, grid[i], &z)
                    })
                    .collect::<psclab::Result<Vec<f64>>>()?;
                let find = |i: usize, j: usize, k: usize| {
                    idx.iter().position(|&p| p == (i, j, k)).map(|p| bids[p])
                };
                for (p, &(i, j, k)) in idx.iter().enumerate() {
                    let b = bids[p];
                    let tag = || format!("{uname} {c} y1={:.3} z=({:.3}, {:.3})", grid[i], grid[j], grid[k]);
                    if let Some(up) = find(i + 1, j, k) {
                        report.expect(up > b - SOLVER_SLACK, || format!("falls in y1 at {}", tag()));
                    }
                    if let Some(up) = find(i, j + 1, k) {
                        report.expect(up >= b - SOLVER_SLACK, || format!("falls in z1 at {}", tag()));
                    }
                    if let Some(up) = find(i, j, k + 1) {
                        report.expect(up >= b - SOLVER_SLACK, || format!("falls in z2 at {}", tag()));
                    }
                }
            }
        }
    }
    Ok(report)
}

fn check_specialization() -> Outcome {
    let m = BuiltinModel::example1();
    let mut worst: f64 = 0.0;
    for (_, u) in utilities()? {
        for &a in &[0.0, 0.3, 0.7] {
            for &(y, z) in &[(0.2, 0.1), (0.5, 0.5), (0.9, 0.4)] {
                let posc = SharingContract::posc(a)?;
                let plsc = SharingContract::plsc(a)?;
                worst = worst.max((bid_general_sp(&m, &u, &posc, y, z)? - bid_posc_sp(&m, &u, a, y, z)?).abs());
                worst = worst.max((bid_general_sp(&m, &u, &plsc, y, z)? - bid_plsc_sp(&m, &u, a, y, z)?).abs());
            }
        }
    }
    pass_if(worst <= 1e-10, format!("max |general − dedicated| {worst:.2e}"))
}

fn check_drop_prices(profiles: usize) -> Outcome {
    let m = BuiltinModel::common_value_avg(3)?;
    let u = Utility::cara(1.0, 1.0)?;
    let mut s = RandomStream::new(41, 0);
    let mut worst: f64 = 0.0;
    for i in 0..profiles {
        let a = 0.8 * s.uniform();
        let c = if i % 2 == 0 { SharingContract::posc(a)? } else { SharingContract::plsc(a)? };
        let (x, y) = (s.uniform_in(0.01, 0.99), s.uniform_in(0.01, 0.99));
        let (q1, q2) = (x.min(y), x.max(y));
        let p1 = english_strategy(&m, &u, &c, 3, q1, &[])?;
        let p2 = english_strategy(&m, &u, &c, 2, q2, &[q1])?;
        let q = invert_drop_prices(&m, &u, &c, &[p1, p2])?;
        worst = worst.max((q[0] - q1).abs()).max((q[1] - q2).abs());
    }
    pass_if(worst <= 1e-8, format!("{profiles} profiles, max |q − q*| {worst:.2e}"))
}

/// Reference revenue of POSC at α = 0.5 on example1, from an independent
/// quadrature of the two stage integrals.
const EXAMPLE1_POSC_HALF: (f64, f64) = (0.2274112777602188, 0.1993794907553733);

fn check_example1_closed_form() -> Outcome {
    let mut notes = Vec::new();
    let posc = revenue_closed_form_example1(&SharingContract::posc(0.5)?)?;
    let fixture_err = (posc.stage1 - EXAMPLE1_POSC_HALF.0)
        .abs()
        .max((posc.stage2 - EXAMPLE1_POSC_HALF.1).abs());
    if fixture_err > 1e-9 {
        notes.push(format!("POSC(0.5) off by {fixture_err:.2e}"));
    }
    let (mut prev_posc, mut prev_plsc) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut prev_s1, mut prev_s2) = (f64::INFINITY, f64::NEG_INFINITY);
    for a in alpha_grid(10, 0.9) {
        let p = revenue_closed_form_example1(&SharingContract::posc(a)?)?;
        let l = revenue_closed_form_example1(&SharingContract::plsc(a)?)?;
        if (l.total - (1.0 / 3.0 + 2.0 * a / 9.0)).abs() > 1e-9 {
            notes.push(format!("PLSC formula at α={a}"));
        }
        if p.total < prev_posc - 1e-9 || l.total.partial_cmp(&prev_plsc) != Some(std::cmp::Ordering::Greater) || l.total < p.total - 1e-9 {
            notes.push(format!("ranking at α={a}"));
        }
        if p.stage1 > prev_s1 + 1e-9 || p.stage2 < prev_s2 - 1e-9 {
            notes.push(format!("POSC stage shape at α={a}"));
        }
        (prev_posc, prev_plsc, prev_s1, prev_s2) = (p.total, l.total, p.stage1, p.stage2);
    }
    pass_if(notes.is_empty(), if notes.is_empty() { "10 share fractions".into() } else { notes.join("; ") })
}

fn check_accounting() -> Outcome {
    let m = BuiltinModel::example2_pa();
    let u = Utility::cara(1.0, 1.0)?;
    let mut s = RandomStream::new(9, 0);
    let mut worst: f64 = 0.0;
    for c in [
        SharingContract::OneTime,
        SharingContract::posc(0.4)?,
        SharingContract::plsc(0.4)?,
        SharingContract::general(&[(-1.0, -0.1), (0.0, 0.0), (1.0, 0.35)])?,
    ] {
        let strategy = equilibrium_strategy_sp(&m, &u, &c, 65)?;
        for _ in 0..500 {
            let mut y = vec![0.0; 2];
            m.sample_signals_into(&mut s, &mut y);
            let o = second_price_at(&m, &strategy, &c, &SignalProfile::new(y)?, s.uniform());
            worst = worst.max((o.auction_payment + o.sharing_payment + o.buyer_total_profit - o.realized_value).abs());
        }
    }
    pass_if(worst < 1e-12, format!("max |payments + profit − value| {worst:.2e}"))
}

fn check_example1_mc(n: u64) -> Outcome {
    let m = BuiltinModel::example1();
    let arms = [
        Arm::new(SharingContract::posc(0.5)?, AuctionFormat::SecondPrice),
        Arm::new(SharingContract::plsc(0.5)?, AuctionFormat::SecondPrice),
    ];
    let rep = compare_arms_paired(&m, &Utility::Linear, &arms, n, &RandomStream::new(11, 0))?;
    let mut worst: f64 = 0.0;
    for (arm, (_, r)) in arms.iter().zip(&rep.arms) {
        let exact = revenue_closed_form_example1(&arm.contract)?;
        worst = worst.max((r.total - exact.total).abs() / r.stderr_total);
    }
    pass_if(worst <= 3.0, format!("n = {n}, worst deviation {worst:.2} stderr"))
}

/// Clock auctions against the direct payment on random common_value_avg(3)
/// profiles under CARA(1,1).
pub fn clock_vs_direct(profiles: usize, step: f64, seed: u64) -> psclab::Result<(usize, f64)> {
    let m = BuiltinModel::common_value_avg(3)?;
    let u = Utility::cara(1.0, 1.0)?;
    let mut s = RandomStream::new(seed, 0);
    let mut cases = Vec::with_capacity(profiles);
    for i in 0..profiles {
        let mut y = vec![0.0; 3];
        m.sample_signals_into(&mut s, &mut y);
        let a = 0.8 * s.uniform();
        let c = if i % 2 == 0 { SharingContract::posc(a)? } else { SharingContract::plsc(a)? };
        cases.push((c, SignalProfile::new(y)?));
    }
    let results = cases
        .par_iter()
        .map(|(c, p)| {
            let (winner, direct) = english_payment(&m, &u, c, p)?;
            let clock = run_english_clock(&m, &u, c, p, step, 0.5)?;
            Ok((clock.outcome.winner_index == winner, (clock.outcome.auction_payment - direct).abs()))
        })
        .collect::<psclab::Result<Vec<_>>>()?;
    let mismatched = results.iter().filter(|r| !r.0).count();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((mismatched, worst))
}

fn check_clock(profiles: usize, step: f64) -> Outcome {
    let (mismatched, worst) = clock_vs_direct(profiles, step, 31)?;
    pass_if(
        mismatched == 0 && worst <= step,
        format!("{profiles} profiles at step {step}: max |clock − direct| {worst:.2e}, winner mismatches {mismatched}"),
    )
}

fn check_two_buyer_english() -> Outcome {
    let m = BuiltinModel::example1();
    let mut worst: f64 = 0.0;
    for (_, u) in utilities()? {
        for c in [SharingContract::posc(0.4)?, SharingContract::plsc(0.4)?] {
            for &(y1, y2) in &[(0.3, 0.8), (0.9, 0.2), (0.55, 0.45)] {
                let p = SignalProfile::new(vec![y1, y2])?;
                let (_, eng) = english_payment(&m, &u, &c, &p)?;
                let low = y1.min(y2);
                let sp = match c {
                    SharingContract::Posc { alpha } => bid_posc_sp(&m, &u, alpha, low, low)?,
                    SharingContract::Plsc { alpha } => bid_plsc_sp(&m, &u, alpha, low, low)?,
                    _ => unreachable!(),
                };
                worst = worst.max((eng - sp).abs());
            }
        }
    }
    pass_if(worst <= 1e-10, format!("max |English − second price| {worst:.2e}"))
}

fn check_effort() -> Outcome {
    let mut notes = Vec::new();
    let branches = [(0.0, 0.25), (-0.3, 0.3), (-0.8, 0.5)];
    for (w, e) in branches {
        if optimal_effort_posc_expost(1.0, 0.5, w) != e {
            notes.push(format!("branch at w={w}"));
        }
    }
    if (max_profit_posc_pa(1.0, 0.5, 0.0) - 0.0625).abs() > 1e-15
        || (max_profit_posc_pa(1.0, 0.5, -0.3) + 0.09).abs() > 1e-15
    {
        notes.push("profit examples".into());
    }
    let mut checks = 0;
    for gamma in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let cost = CostFunction::quadratic(gamma)?;
        let (mut prev_e, mut prev_k) = (f64::INFINITY, f64::INFINITY);
        for a in alpha_grid(20, 0.95) {
            let e = optimal_effort_plsc(&cost, a)?;
            let k = effort_gain(&cost, a)?;
            if e > prev_e || k > prev_k || k < 0.0 {
                notes.push(format!("e or κ not monotone at γ={gamma}, α={a}"));
            }
            (prev_e, prev_k) = (e, k);
            let mut prev_pi = f64::NEG_INFINITY;
            for i in 0..=60 {
                let w = -3.0 + 0.1 * i as f64;
                checks += 2;
                if optimal_effort_posc_expost(gamma, a, w) < e {
                    notes.push(format!("dominance at γ={gamma}, α={a}, w={w}"));
                }
                let pi = max_profit_posc_pa(gamma, a, w);
                if pi.partial_cmp(&prev_pi) != Some(std::cmp::Ordering::Greater) {
                    notes.push(format!("profit not increasing at γ={gamma}, α={a}, w={w}"));
                }
                prev_pi = pi;
            }
        }
    }
    let detail = match notes.first() {
        None => format!("3 branches, {checks} grid inequalities"),
        Some(first) => format!("{} failures, first: {first}", notes.len()),
    };
    pass_if(notes.is_empty(), detail)
}

/// Closed-form PLSC revenue with hidden effort: formula agreement on a
/// (γ, α) grid, the α = γ/3 optimum at γ = 1 and the slope at zero.
fn check_plsc_pa_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for gamma in [0.5, 1.0, 2.0, 4.0] {
        let cost = CostFunction::quadratic(gamma)?;
        for a in alpha_grid(10, 0.9) {
            let r = revenue_plsc_pa_example2(&cost, a)?;
            worst = worst.max((r.total - plsc_pa_example2_formula(gamma, a)).abs());
        }
    }
    let cost = CostFunction::quadratic(1.0)?;
    let argmax = plsc_pa_argmax(&cost, 0.01)?;
    let slope = derivative_at_zero(|a| Ok(revenue_plsc_pa_example2(&cost, a)?.total), DEFAULT_STEP_EXACT)?;
    pass_if(
        worst <= 1e-9 && (argmax - 1.0 / 3.0).abs() <= 0.01 && (slope - 1.0 / 6.0).abs() <= 1e-3,
        format!("max formula error {worst:.2e}, argmax {argmax:.2}, slope at 0 {slope:.5}"),
    )
}

/// Grid argmax of the closed-form PLSC revenue with hidden effort.
pub fn plsc_pa_argmax(cost: &CostFunction, spacing: f64) -> psclab::Result<f64> {
    let steps = (0.99 / spacing).round() as usize;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=steps {
        let a = i as f64 * spacing;
        let r = revenue_plsc_pa_example2(cost, a)?.total;
        if r > best.0 {
            best = (r, a);
        }
    }
    Ok(best.1)
}

fn check_plsc_pa_mc(n: u64) -> Outcome {
    let m = BuiltinModel::example2_pa();
    let mut worst: f64 = 0.0;
    for (g, gamma) in [0.5, 1.0].into_iter().enumerate() {
        let cost = CostFunction::quadratic(gamma)?;
        let contracts: Vec<PaContract> = [0.0, 0.3, 0.6].iter().map(|&alpha| PaContract::Plsc { alpha }).collect();
        let rep = compare_pa_paired(&m, &Utility::Linear, &cost, &contracts, n, &RandomStream::new(21, g as u64))?;
        for (c, (_, r)) in contracts.iter().zip(&rep.arms) {
            worst = worst.max((r.total - plsc_pa_example2_formula(gamma, c.alpha())).abs() / r.stderr_total);
        }
    }
    pass_if(worst <= 3.0, format!("n = {n}, worst deviation {worst:.2} stderr"))
}

/// Reference POSC revenues with ex-post effort, from an independent
/// quadrature oracle: (γ, α, total).
pub const POSC_PA_FIXTURES: [(f64, f64, f64); 3] = [
    (1.0, 0.0, 0.5833333333333334),
    (1.0, 0.3, 0.6126427650560943),
    (0.25, 0.1, 1.3400003927),
];

/// Share fraction with the largest quadrature POSC revenue with hidden
/// effort on `alphas`.
pub fn posc_pa_argmax(gamma: f64, alphas: &[f64]) -> psclab::Result<f64> {
    let totals = alphas
        .par_iter()
        .map(|&a| revenue_posc_pa_example2(gamma, a).map(|r| r.total))
        .collect::<psclab::Result<Vec<f64>>>()?;
    let best = totals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| alphas[i])
        .unwrap_or(0.0);
    Ok(best)
}

fn check_posc_pa_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for (gamma, a, total) in POSC_PA_FIXTURES {
        worst = worst.max((revenue_posc_pa_example2(gamma, a)?.total - total).abs());
    }
    let argmax = posc_pa_argmax(0.25, &alpha_grid(20, 0.95))?;
    pass_if(
        worst <= 1e-7 && argmax < 0.95,
        format!("max fixture error {worst:.2e}, argmax at γ=0.25: {argmax:.2}"),
    )
}

fn check_sweep_determinism() -> Outcome {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
alphas = [0.0, 0.5]
n_samples = 3000
seed = 5
[model]
name = "example1"
[[contracts]]
kind = "posc"
[[contracts]]
kind = "plsc"
"#,
        "builtin",
    )
    .map_err(|e| psclab::Error::InvalidParameter(e.to_string()))?;
    let run = || -> psclab::Result<String> {
        let rows = sweep_alpha(&cfg).map_err(|e| psclab::Error::InvalidParameter(e.to_string()))?;
        Ok(render_csv(&rows))
    };
    let (a, b) = (run()?, run()?);
    pass_if(a == b, format!("{} bytes", a.len()))
}

fn check_ranking(n: u64) -> Outcome {
    let m = BuiltinModel::example1();
    let mut notes = Vec::new();
    let mut checked = 0;
    for (i, a) in alpha_grid(10, 0.9).into_iter().enumerate().skip(1) {
        let gap = revenue_closed_form_example1(&SharingContract::plsc(a)?)?.total
            - revenue_closed_form_example1(&SharingContract::posc(a)?)?.total;
        let arms = [
            Arm::new(SharingContract::OneTime, AuctionFormat::SecondPrice),
            Arm::new(SharingContract::posc(a)?, AuctionFormat::SecondPrice),
            Arm::new(SharingContract::plsc(a)?, AuctionFormat::SecondPrice),
        ];
        let rep = compare_arms_paired(&m, &Utility::Linear, &arms, n, &RandomStream::new(13, i as u64))?;
        let pairs = [(0, 1), (1, 2)];
        for (lo, hi) in pairs {
            let d = rep.difference(lo, hi).expect("pair exists");
            let needs_t = hi == 2 && gap > 0.005;
            let ok = if needs_t { d.t_stat() > 3.0 } else { d.b_not_below_a(3.0) };
            checked += 1;
            if !ok {
                notes.push(format!("α={a}: arm {hi} vs {lo}, t = {:.2}", d.t_stat()));
            }
        }
    }
    pass_if(notes.is_empty(), if notes.is_empty() { format!("{checked} paired comparisons, n = {n}") } else { notes.join("; ") })
}

/// Paired `R_eng − R_sp` for PLSC on common_value_avg(3).
pub fn english_vs_second_price(alpha: f64, n: u64, seed: u64) -> psclab::Result<psclab::auctions::PairedDifference> {
    let m = BuiltinModel::common_value_avg(3)?;
    let c = SharingContract::plsc(alpha)?;
    let arms = [Arm::new(c.clone(), AuctionFormat::SecondPrice), Arm::new(c, AuctionFormat::English)];
    let rep = compare_arms_paired(&m, &Utility::Linear, &arms, n, &RandomStream::new(seed, 0))?;
    Ok(rep.difference(0, 1).expect("pair exists"))
}

fn check_english_ranking(n: u64) -> Outcome {
    let mut notes = Vec::new();
    for a in [0.25, 0.5] {
        let d = english_vs_second_price(a, n, 17)?;
        notes.push(format!("α={a}: {:+.2} stderr", d.t_stat()));
        if !d.b_not_below_a(3.0) {
            return pass_if(false, notes.join(", "));
        }
    }
    pass_if(true, notes.join(", "))
}

/// The admissible rule with maximum slope 0.4 used by the bracket check.
pub fn slope_04_rule() -> psclab::Result<SharingContract> {
    SharingContract::general(&[(-1.0, -0.1), (0.0, 0.0), (0.25, 0.05), (0.5, 0.15), (1.0, 0.35)])
}

/// Paired `R(φ) − R(0)` and `R_plsc(0.4) − R(φ)` on example1.
pub fn general_bracket(n: u64, seed: u64) -> psclab::Result<(psclab::auctions::PairedDifference, psclab::auctions::PairedDifference)> {
    let m = BuiltinModel::example1();
    let arms = [
        Arm::new(SharingContract::OneTime, AuctionFormat::SecondPrice),
        Arm::new(slope_04_rule()?, AuctionFormat::SecondPrice),
        Arm::new(SharingContract::plsc(0.4)?, AuctionFormat::SecondPrice),
    ];
    let rep = compare_arms_paired(&m, &Utility::Linear, &arms, n, &RandomStream::new(seed, 0))?;
    Ok((rep.difference(0, 1).expect("pair"), rep.difference(1, 2).expect("pair")))
}

fn check_general_bracket(n: u64) -> Outcome {
    let (low, high) = general_bracket(n, 19)?;
    pass_if(
        low.b_not_below_a(3.0) && high.b_not_below_a(3.0),
        format!("R(φ) − R(0): {:+.2} stderr, R_plsc(0.4) − R(φ): {:+.2} stderr", low.t_stat(), high.t_stat()),
    )
}

/// Paired POSC revenue with ex-post effort at `alpha` minus the α = 0
/// revenue, on example2_pa with quadratic cost.
pub fn posc_pa_gain(gamma: f64, alpha: f64, n: u64, seed: u64) -> psclab::Result<psclab::auctions::PairedDifference> {
    let cost = CostFunction::quadratic(gamma)?;
    let rep = compare_pa_paired(
        &BuiltinModel::example2_pa(),
        &Utility::Linear,
        &cost,
        &[PaContract::PoscExpost { alpha: 0.0 }, PaContract::PoscExpost { alpha }],
        n,
        &RandomStream::new(seed, 0),
    )?;
    Ok(rep.difference(0, 1).expect("pair"))
}

fn check_posc_pa_gain(n: u64) -> Outcome {
    let d = posc_pa_gain(1.0, 0.3, n, 23)?;
    pass_if(d.t_stat() > 3.0, format!("γ=1, α=0.3: +{:.5} (t = {:.1})", d.mean, d.t_stat()))
}

fn check_reversal(n: u64) -> Outcome {
    let cost = CostFunction::quadratic(0.25)?;
    let m = BuiltinModel::example2_pa();
    let mut best = f64::NEG_INFINITY;
    for (i, a) in [0.5, 0.7, 0.9].into_iter().enumerate() {
        let rep = compare_pa_paired(
            &m,
            &Utility::Linear,
            &cost,
            &[PaContract::Plsc { alpha: a }, PaContract::PoscExpost { alpha: a }],
            n,
            &RandomStream::new(29, i as u64),
        )?;
        best = best.max(rep.difference(0, 1).expect("pair").t_stat());
    }
    pass_if(best > 3.0, format!("largest POSC − PLSC t-statistic {best:.1}"))
}

fn check_derivative_mc(n: u64) -> Outcome {
    let m = BuiltinModel::example2_pa();
    let cost = CostFunction::quadratic(1.0)?;
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, u) in utilities()? {
        let d = derivative_at_zero_mc(&m, &u, &cost, DEFAULT_STEP_MC, n, &RandomStream::new(37, 0))?;
        ok &= d.mean > 0.0 && d.t_stat() > 3.0;
        notes.push(format!("{name}: {:.4} (t = {:.1})", d.mean, d.t_stat()));
    }
    pass_if(ok, notes.join(", "))
}
