//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use psclab::equilibrium::ensure_solvable;
use psclab::principal_agent::default_effort_cap;
use psclab::{AuctionFormat, BuiltinModel, CostFunction, SharingContract, Utility};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub utility: UtilitySpec,
    #[serde(default)]
    pub contracts: Vec<ContractSpec>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    pub alphas: Vec<f64>,
    pub n_samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_true")]
    pub plot: bool,
    pub pa: Option<PaSpec>,
}

fn default_formats() -> Vec<String> {
    vec!["second_price".into()]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub buyers: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilitySpec {
    #[default]
    Linear,
    Cara { scale: f64, aversion: f64 },
    Tabulated { points: Vec<[f64; 2]> },
}

/// A contract family. General rules are given as a shape and scaled by the
/// swept share fraction.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContractSpec {
    OneTime {},
    Posc {},
    Plsc {},
    General { shape: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaSpec {
    #[serde(default = "default_cost")]
    pub cost: String,
    pub gamma: Option<f64>,
    pub e_lo: Option<f64>,
    pub e_hi: Option<f64>,
    /// Marginal-cost table for `cost = "marginal_table"`.
    pub marginal: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_timing")]
    pub timing: String,
    #[serde(default = "default_pa_contracts")]
    pub contracts: Vec<String>,
}

fn default_cost() -> String {
    "quadratic".into()
}

fn default_timing() -> String {
    "after_value".into()
}

fn default_pa_contracts() -> Vec<String> {
    vec!["plsc".into(), "posc".into()]
}

/// Contract kinds under hidden effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaKind {
    Plsc,
    Posc,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<(Self, Vec<u8>), ConfigError> {
        let bytes = std::fs::read(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8_lossy(&bytes);
        let cfg = Self::from_toml_str(&text, &path.display().to_string())?;
        Ok((cfg, bytes))
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.build_model()?;
        self.build_utility()?;
        if self.alphas.is_empty() {
            return Err(ConfigError::invalid("alphas", "at least one share fraction is required"));
        }
        for (i, a) in self.alphas.iter().enumerate() {
            if !(0.0..1.0).contains(a) {
                return Err(ConfigError::invalid(format!("alphas[{i}]"), format!("{a} is outside [0, 1)")));
            }
        }
        if self.n_samples == 0 {
            return Err(ConfigError::invalid("n_samples", "must be at least 1"));
        }
        self.build_formats()?;
        if self.pa.is_none() && self.contracts.is_empty() {
            return Err(ConfigError::invalid("contracts", "list at least one contract or add a [pa] block"));
        }
        let model = self.build_model()?;
        for (i, _) in self.contracts.iter().enumerate() {
            for &a in &self.alphas {
                let c = self.contract_at(i, a)?;
                ensure_solvable(&model, &c)
                    .map_err(|e| ConfigError::invalid(format!("contracts[{i}]"), format!("at α = {a}: {e}")))?;
            }
        }
        if let Some(pa) = &self.pa {
            self.build_cost()?;
            if pa.timing != "after_value" {
                return Err(ConfigError::invalid(
                    "pa.timing",
                    format!("only `after_value` is supported, got `{}`", pa.timing),
                ));
            }
            if self.pa_kinds()?.contains(&PaKind::Posc) {
                if pa.cost != "quadratic" {
                    return Err(ConfigError::invalid("pa.contracts", "posc needs a quadratic cost"));
                }
                if !matches!(self.utility, UtilitySpec::Linear) {
                    return Err(ConfigError::invalid("pa.contracts", "posc needs a linear utility"));
                }
            }
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<BuiltinModel, ConfigError> {
        BuiltinModel::by_name(&self.model.name, self.model.buyers)
            .map_err(|e| ConfigError::invalid("model.name", e.to_string()))
    }

    pub fn build_utility(&self) -> Result<Utility, ConfigError> {
        let u = match &self.utility {
            UtilitySpec::Linear => Ok(Utility::Linear),
            UtilitySpec::Cara { scale, aversion } => Utility::cara(*scale, *aversion),
            UtilitySpec::Tabulated { points } => {
                let pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
                Utility::tabulated(&pts)
            }
        };
        u.map_err(|e| ConfigError::invalid("utility", e.to_string()))
    }

    pub fn build_formats(&self) -> Result<Vec<AuctionFormat>, ConfigError> {
        if self.formats.is_empty() {
            return Err(ConfigError::invalid("formats", "at least one auction format is required"));
        }
        self.formats
            .iter()
            .enumerate()
            .map(|(i, f)| {
                AuctionFormat::parse(f).map_err(|e| ConfigError::invalid(format!("formats[{i}]"), e.to_string()))
            })
            .collect()
    }

    /// Contract `i` at share fraction `alpha`.
    pub fn contract_at(&self, i: usize, alpha: f64) -> Result<SharingContract, ConfigError> {
        let field = format!("contracts[{i}]");
        let c = match &self.contracts[i] {
            ContractSpec::OneTime {} => Ok(SharingContract::OneTime),
            ContractSpec::Posc {} => SharingContract::posc(alpha),
            ContractSpec::Plsc {} => SharingContract::plsc(alpha),
            ContractSpec::General { shape } => {
                let pts: Vec<(f64, f64)> = shape.iter().map(|p| (p[0], alpha * p[1])).collect();
                SharingContract::general(&pts)
            }
        };
        c.map_err(|e| ConfigError::invalid(field, e.to_string()))
    }

    pub fn build_cost(&self) -> Result<CostFunction, ConfigError> {
        let pa = self
            .pa
            .as_ref()
            .ok_or_else(|| ConfigError::invalid("pa", "no [pa] block"))?;
        let cost = match pa.cost.as_str() {
            "quadratic" => {
                let gamma = pa
                    .gamma
                    .ok_or_else(|| ConfigError::invalid("pa.gamma", "quadratic cost needs γ"))?;
                let e_lo = pa.e_lo.unwrap_or(0.0);
                let e_hi = pa.e_hi.unwrap_or_else(|| default_effort_cap(gamma));
                CostFunction::quadratic_on(gamma, e_lo, e_hi)
            }
            "marginal_table" => {
                let table = pa.marginal.as_ref().ok_or_else(|| {
                    ConfigError::invalid("pa.marginal", "table cost needs `marginal` points")
                })?;
                let pts: Vec<(f64, f64)> = table.iter().map(|p| (p[0], p[1])).collect();
                CostFunction::from_marginal_table(&pts)
            }
            other => {
                return Err(ConfigError::invalid("pa.cost", format!("unknown cost kind `{other}`")));
            }
        };
        cost.map_err(|e| ConfigError::invalid("pa", e.to_string()))
    }

    pub fn pa_kinds(&self) -> Result<Vec<PaKind>, ConfigError> {
        let pa = self
            .pa
            .as_ref()
            .ok_or_else(|| ConfigError::invalid("pa", "no [pa] block"))?;
        if pa.contracts.is_empty() {
            return Err(ConfigError::invalid("pa.contracts", "list at least one contract"));
        }
        pa.contracts
            .iter()
            .enumerate()
            .map(|(i, c)| match c.as_str() {
                "plsc" => Ok(PaKind::Plsc),
                "posc" => Ok(PaKind::Posc),
                other => Err(ConfigError::invalid(
                    format!("pa.contracts[{i}]"),
                    format!("unknown contract `{other}`, expected plsc or posc"),
                )),
            })
            .collect()
    }
}
