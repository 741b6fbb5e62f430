//! Artifact directory: `sweep.csv`, `plot.svg` and `manifest.json`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::sweep::{pa_sweep, sweep_alpha, SweepRow};
use crate::{plot, CliError};

pub const CSV_HEADER: &str = "contract,alpha,format,stage1,stage2,total,stderr,n,estimator";
pub const CSV_NAME: &str = "sweep.csv";
pub const PLOT_NAME: &str = "plot.svg";
pub const MANIFEST_NAME: &str = "manifest.json";

/// Formats a money amount with 12 significant digits in plain decimal
/// notation.
pub fn format_money(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let mut magnitude = x.abs().log10().floor() as i32;
    let mut s = format!("{x:.*}", (11 - magnitude).clamp(0, 40) as usize);
    // rounding can carry into a new leading digit (9.99… → 10.0…)
    if s.trim_start_matches('-').parse::<f64>().is_ok_and(|r| r >= 10f64.powi(magnitude + 1)) {
        magnitude += 1;
        s = format!("{x:.*}", (11 - magnitude).clamp(0, 40) as usize);
    }
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.contract,
            r.alpha,
            r.format,
            format_money(r.stage1),
            format_money(r.stage2),
            format_money(r.total),
            format_money(r.stderr),
            r.n,
            r.estimator.as_str()
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Contracts,
    PrincipalAgent,
}

impl SweepKind {
    fn as_str(self) -> &'static str {
        match self {
            SweepKind::Contracts => "sweep",
            SweepKind::PrincipalAgent => "pa-sweep",
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_samples: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_path: String,
    pub config_sha256: String,
    pub seed: u64,
    pub n_samples: u64,
    pub rows: usize,
    pub wall_time_s: f64,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub rows: Vec<SweepRow>,
    pub manifest: Manifest,
}

/// Runs a sweep described by the configuration at `config_path` and writes
/// its artifacts. On failure every file this call created is removed.
pub fn run_experiment(config_path: &Path, kind: SweepKind, overrides: &Overrides) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let (mut cfg, bytes) = ExperimentConfig::from_path(config_path)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(n) = overrides.n_samples {
        cfg.n_samples = n;
    }
    if let Some(dir) = &overrides.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate()?;

    let rows = match kind {
        SweepKind::Contracts => {
            if cfg.contracts.is_empty() {
                return Err(crate::ConfigError::Invalid {
                    field: "contracts".into(),
                    message: "the contract sweep needs at least one contract".into(),
                }
                .into());
            }
            sweep_alpha(&cfg)?
        }
        SweepKind::PrincipalAgent => {
            if cfg.pa.is_none() {
                return Err(crate::ConfigError::Invalid {
                    field: "pa".into(),
                    message: "the principal-agent sweep needs a [pa] block".into(),
                }
                .into());
            }
            pa_sweep(&cfg)?
        }
    };

    let mut writer = ArtifactWriter::new(&cfg.output_dir)?;
    let result = (|| {
        writer.write(CSV_NAME, render_csv(&rows).as_bytes())?;
        if cfg.plot {
            writer.write(PLOT_NAME, plot::render_svg(&rows)?.as_bytes())?;
        }
        let mut files = writer.created.iter().map(|p| file_name(p)).collect::<Vec<_>>();
        files.push(MANIFEST_NAME.into());
        let manifest = Manifest {
            tool: "psclab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: kind.as_str().into(),
            config_path: config_path.display().to_string(),
            config_sha256: hex(&Sha256::digest(&bytes)),
            seed: cfg.seed,
            n_samples: cfg.n_samples,
            rows: rows.len(),
            wall_time_s: start.elapsed().as_secs_f64(),
            files,
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        writer.write(MANIFEST_NAME, json.as_bytes())?;
        Ok(manifest)
    })();
    match result {
        Ok(manifest) => Ok(RunSummary {
            output_dir: cfg.output_dir.clone(),
            rows,
            manifest,
        }),
        Err(e) => {
            writer.rollback();
            Err(e)
        }
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Tracks what it creates so a failed run can be undone.
struct ArtifactWriter {
    dir: PathBuf,
    made_dir: bool,
    created: Vec<PathBuf>,
}

impl ArtifactWriter {
    fn new(dir: &Path) -> Result<Self, CliError> {
        let made_dir = !dir.exists();
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            made_dir,
            created: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        self.created.push(path.clone());
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
    }

    fn rollback(&self) {
        for p in &self.created {
            let _ = std::fs::remove_file(p);
        }
        if self.made_dir {
            let _ = std::fs::remove_dir(&self.dir);
        }
    }
}
