//! Command-line front end for `rotfric-core`: scenario files, sweeps written
//! as CSV, and the discrete-bath verification run.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;
pub mod verify;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use config::{ScenarioConfig, UnitsConfig, VerifyConfig};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const ALL_POINTS_FAILED: u8 = 2;
    pub const VERIFICATION_FAILED: u8 = 3;
}

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "ROTFRIC_THREADS";

/// Thread count requested through [`THREADS_ENV`], if any.
pub fn requested_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => {
            let n: usize = s
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV}={s:?} is not a thread count"))?;
            anyhow::ensure!(n >= 1, "{THREADS_ENV} must be >= 1");
            Ok(Some(n))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Outcome of `run`, with the CSV already written.
#[derive(Debug)]
pub struct RunOutcome {
    pub output: PathBuf,
    pub summary: String,
    pub warnings: Vec<String>,
    pub all_failed: bool,
}

/// Load, validate, execute and write. Errors returned here are validation
/// or I/O problems; numerical failures are recorded per point.
pub fn run_config(path: &Path, output_override: Option<&Path>) -> Result<RunOutcome> {
    let cfg = ScenarioConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let scenario = run::Scenario::build(&cfg, base)?;
    let mut warnings = Vec::new();
    if let Some(w) = scenario.body.regime_warning() {
        warnings.push(w);
    }
    let table = run::execute(&scenario);
    let csv = run::render_csv(&table, &cfg, cfg.output.precision)?;
    let output = match output_override {
        Some(p) => p.to_path_buf(),
        None if cfg.output.path.is_absolute() => cfg.output.path.clone(),
        None => base.join(&cfg.output.path),
    };
    std::fs::write(&output, csv).with_context(|| format!("writing {}", output.display()))?;
    Ok(RunOutcome {
        output,
        summary: table.summary.clone(),
        warnings,
        all_failed: table.all_failed(),
    })
}

/// The parts of a scenario file the verification run reads; anything else
/// in the file is ignored.
#[derive(Debug, Deserialize)]
struct VerifyFile {
    #[serde(default)]
    units: UnitsConfig,
    verify: Option<VerifyConfig>,
}

pub fn load_verify(path: &Path) -> Result<(UnitsConfig, VerifyConfig)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let f: VerifyFile = toml::from_str(&text).context("config parse error")?;
    let v = f.verify.unwrap_or_default();
    v.validate()?;
    Ok((f.units, v))
}
