//! Configuration-driven runner for the asymptospec analyses and experiments.

// `!(a <= b)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod expectations;
pub mod registry;
pub mod run;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub use config::{parse_config, parse_config_str, RunConfig, Verb};
pub use error::CliError;
use table::Table;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Bundled run configurations, checked by `check-all`.
pub const BUNDLED_CONFIGS: &[(&str, &str)] = &[
    ("delta_powers", include_str!("../configs/delta_powers.toml")),
    ("eps_power", include_str!("../configs/eps_power.toml")),
    ("eps_log", include_str!("../configs/eps_log.toml")),
    ("dissipative", include_str!("../configs/dissipative.toml")),
    ("sqrt_exp_delta", include_str!("../configs/sqrt_exp_delta.toml")),
    ("sqrt_exp_ddelta", include_str!("../configs/sqrt_exp_ddelta.toml")),
    ("log_growth_m1", include_str!("../configs/log_growth_m1.toml")),
    ("log_growth_m2", include_str!("../configs/log_growth_m2.toml")),
    ("blowup", include_str!("../configs/blowup.toml")),
    ("strength", include_str!("../configs/strength.toml")),
    ("sum_law", include_str!("../configs/sum_law.toml")),
    ("wavefront_delta", include_str!("../configs/wavefront_delta.toml")),
    ("wavefront_smooth", include_str!("../configs/wavefront_smooth.toml")),
    ("properties", include_str!("../configs/properties.toml")),
];

/// The JSON summary of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tool: &'static str,
    pub version: &'static str,
    pub verb: String,
    pub analysis: String,
    pub config: RunConfig,
    /// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set.
    pub generated_unix: u64,
    pub operations: Vec<&'static str>,
    pub files: Vec<String>,
    pub tables: Vec<Table>,
    pub expectations: Vec<expectations::Outcome>,
    pub passed: bool,
}

impl Summary {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

/// File stem: the configured stem, else the experiment name or analysis kind.
pub fn stem(cfg: &RunConfig) -> String {
    cfg.output.stem.clone().unwrap_or_else(|| match &cfg.analysis {
        config::Analysis::Experiment(e) => e.name().to_string(),
        a => a.kind().to_string(),
    })
}

/// Output directory: the explicit choice, else the config's, else `asymptospec-out`.
pub fn out_dir(explicit: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("asymptospec-out"))
}

/// Runs `cfg` in memory and checks the bundled expectations.
pub fn evaluate(cfg: &RunConfig) -> Result<Summary, CliError> {
    let out = run::execute(cfg)?;
    let registry = expectations::bundled()?;
    let checks = expectations::evaluate_all(&registry, cfg, &out.tables);
    Ok(Summary {
        tool: "asymptospec",
        version: VERSION,
        verb: cfg.analysis.verb().to_string(),
        analysis: expectations::analysis_key(&cfg.analysis),
        config: cfg.clone(),
        generated_unix: timestamp(),
        operations: out.operations,
        files: Vec::new(),
        passed: checks.iter().all(|c| c.passed),
        expectations: checks,
        tables: out.tables,
    })
}

/// Runs `cfg` and writes the CSV tables, column files and `<stem>.json` into `dir`.
pub fn run_to_dir(cfg: &RunConfig, dir: &Path) -> Result<Summary, CliError> {
    let mut s = evaluate(cfg)?;
    let stem = stem(cfg);
    s.files = table::write_tables(dir, &stem, &s.tables)?;
    let json_name = format!("{stem}.json");
    s.files.push(json_name.clone());
    let body = serde_json::to_string_pretty(&s).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    table::write(&dir.join(json_name), &body)?;
    Ok(s)
}
