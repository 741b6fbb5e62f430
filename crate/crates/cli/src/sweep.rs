//! α sweeps over contracts and auction formats.

use psclab::principal_agent::{
    compare_pa_paired, revenue_plsc_pa_example2, revenue_posc_pa_example2,
};
use psclab::{
    compare_arms_paired, revenue_closed_form_example1, Arm, AuctionFormat, ModelKind, PaContract,
    RandomStream, RevenueBreakdown, SharingContract,
};

use crate::config::{ContractSpec, ExperimentConfig, PaKind};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Estimator {
    ClosedForm,
    Mc,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::ClosedForm => "closed_form",
            Estimator::Mc => "mc",
        }
    }
}

/// One cell of a revenue curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub contract: String,
    pub alpha: f64,
    pub format: String,
    pub stage1: f64,
    pub stage2: f64,
    pub total: f64,
    /// Zero for closed-form rows.
    pub stderr: f64,
    /// Zero for closed-form rows.
    pub n: u64,
    pub estimator: Estimator,
}

impl SweepRow {
    fn new(contract: &str, alpha: f64, format: &str, r: &RevenueBreakdown, estimator: Estimator) -> Self {
        Self {
            contract: contract.to_string(),
            alpha,
            format: format.to_string(),
            stage1: r.stage1,
            stage2: r.stage2,
            total: r.total,
            stderr: r.stderr_total,
            n: r.n_samples,
            estimator,
        }
    }
}

/// Row labels; repeated kinds get their list position appended.
fn contract_labels(specs: &[ContractSpec]) -> Vec<String> {
    let kind = |s: &ContractSpec| match s {
        ContractSpec::OneTime {} => "one_time",
        ContractSpec::Posc {} => "posc",
        ContractSpec::Plsc {} => "plsc",
        ContractSpec::General { .. } => "general",
    };
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let k = kind(s);
            if specs.iter().filter(|t| kind(t) == k).count() > 1 {
                format!("{k}_{i}")
            } else {
                k.to_string()
            }
        })
        .collect()
}

/// Revenue curves for every configured contract and format. Monte Carlo
/// cells at one α share their draws (stream `(seed, α index)`). Closed-form
/// rows are added for the two-buyer Bernoulli example with risk-neutral
/// buyers, where the English and second price auctions coincide.
pub fn sweep_alpha(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let model = cfg.build_model()?;
    let u = cfg.build_utility()?;
    let formats = cfg.build_formats()?;
    let labels = contract_labels(&cfg.contracts);
    let closed = model.kind() == ModelKind::Example1 && u.is_linear();

    // (contract, α index, format, estimator) keys keep the output ordered
    let mut keyed = Vec::new();
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        let contracts = (0..cfg.contracts.len())
            .map(|i| cfg.contract_at(i, alpha))
            .collect::<Result<Vec<_>, _>>()?;
        let mut arms = Vec::new();
        for (ci, c) in contracts.iter().enumerate() {
            for (fi, &f) in formats.iter().enumerate() {
                arms.push((ci, fi, Arm::new(c.clone(), f)));
            }
        }
        let list: Vec<Arm> = arms.iter().map(|(_, _, a)| a.clone()).collect();
        let report = compare_arms_paired(&model, &u, &list, cfg.n_samples, &RandomStream::new(cfg.seed, ai as u64))?;
        for ((ci, fi, arm), (_, r)) in arms.iter().zip(&report.arms) {
            let row = SweepRow::new(&labels[*ci], alpha, arm.format.as_str(), r, Estimator::Mc);
            keyed.push(((*ci, ai, *fi, Estimator::Mc), row));
            if closed && !matches!(arm.contract, SharingContract::General(_)) {
                let exact = revenue_closed_form_example1(&arm.contract)?;
                let row = SweepRow::new(&labels[*ci], alpha, arm.format.as_str(), &exact, Estimator::ClosedForm);
                keyed.push(((*ci, ai, *fi, Estimator::ClosedForm), row));
            }
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

/// Revenue curves under hidden effort. Closed-form rows are produced for
/// `example2_pa` with risk-neutral buyers (POSC additionally needs a
/// quadratic cost).
pub fn pa_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let model = cfg.build_model()?;
    let u = cfg.build_utility()?;
    let cost = cfg.build_cost()?;
    let kinds = cfg.pa_kinds()?;
    let closed = model.kind() == ModelKind::Example2Pa && u.is_linear();
    let format = AuctionFormat::SecondPrice.as_str();

    let mut keyed = Vec::new();
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        let contracts: Vec<PaContract> = kinds
            .iter()
            .map(|k| match k {
                PaKind::Plsc => PaContract::Plsc { alpha },
                PaKind::Posc => PaContract::PoscExpost { alpha },
            })
            .collect();
        let report = compare_pa_paired(&model, &u, &cost, &contracts, cfg.n_samples, &RandomStream::new(cfg.seed, ai as u64))?;
        for (ci, (c, (_, r))) in contracts.iter().zip(&report.arms).enumerate() {
            keyed.push(((ci, ai, Estimator::Mc), SweepRow::new(c.kind_name(), alpha, format, r, Estimator::Mc)));
            let exact = match c {
                PaContract::Plsc { .. } if closed => Some(revenue_plsc_pa_example2(&cost, alpha)?),
                PaContract::PoscExpost { .. } if closed => match cost.gamma() {
                    Some(g) => Some(revenue_posc_pa_example2(g, alpha)?),
                    None => None,
                },
                _ => None,
            };
            if let Some(exact) = exact {
                let row = SweepRow::new(c.kind_name(), alpha, format, &exact, Estimator::ClosedForm);
                keyed.push(((ci, ai, Estimator::ClosedForm), row));
            }
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

/// Row with the largest total among those matching `keep`.
pub fn argmax_row(rows: &[SweepRow], keep: impl Fn(&SweepRow) -> bool) -> Option<&SweepRow> {
    rows.iter()
        .filter(|r| keep(r))
        .max_by(|a, b| a.total.total_cmp(&b.total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(text, "inline").unwrap()
    }

    #[test]
    fn example1_rows_are_ordered_and_complete() {
        let c = cfg(r#"
alphas = [0.0, 0.5]
n_samples = 2000
[model]
name = "example1"
[[contracts]]
kind = "posc"
[[contracts]]
kind = "plsc"
"#);
        let rows = sweep_alpha(&c).unwrap();
        assert_eq!(rows.len(), 8);
        let keys: Vec<_> = rows.iter().map(|r| (r.contract.as_str(), r.alpha, r.estimator)).collect();
        assert_eq!(keys[0], ("posc", 0.0, Estimator::ClosedForm));
        assert_eq!(keys[1], ("posc", 0.0, Estimator::Mc));
        assert_eq!(keys[4], ("plsc", 0.0, Estimator::ClosedForm));
        // the contracts coincide at α = 0
        assert!((rows[0].total - rows[4].total).abs() < 1e-12);
        assert_eq!(rows[1].total, rows[5].total);
        assert!((rows[6].total - (1.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn no_closed_form_under_risk_aversion() {
        let c = cfg(r#"
alphas = [0.3]
n_samples = 500
[model]
name = "example1"
[utility]
kind = "cara"
scale = 1.0
aversion = 1.0
[[contracts]]
kind = "posc"
[[contracts]]
kind = "general"
shape = [[-1.0, -0.5], [0.0, 0.0], [1.0, 1.0]]
"#);
        let rows = sweep_alpha(&c).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.estimator == Estimator::Mc));
    }

    #[test]
    fn repeated_kinds_get_distinct_labels() {
        let specs = vec![ContractSpec::Posc {}, ContractSpec::Posc {}, ContractSpec::Plsc {}];
        assert_eq!(contract_labels(&specs), ["posc_0", "posc_1", "plsc"]);
    }

    #[test]
    fn pa_sweep_includes_both_estimators() {
        let c = cfg(r#"
alphas = [0.0, 0.3]
n_samples = 3000
seed = 4
[model]
name = "example2_pa"
[pa]
gamma = 1.0
"#);
        let rows = pa_sweep(&c).unwrap();
        assert_eq!(rows.len(), 8);
        let best = argmax_row(&rows, |r| r.contract == "plsc_pa" && r.estimator == Estimator::ClosedForm).unwrap();
        assert_eq!(best.alpha, 0.3);
        assert_eq!(rows[0].contract, "plsc_pa");
        assert_eq!(rows[4].contract, "posc_pa");
    }
}
