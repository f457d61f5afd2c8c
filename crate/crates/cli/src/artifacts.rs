//! Atomic file output and the JSON run summary.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lrl_core::experiments::{all_pass, RuleOutcome};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SUMMARY_SCHEMA: &str = "lrl-summary/1";

/// Keys of the config echo that do not influence results.
const NON_RESULT_KEYS: [&str; 3] = ["out", "threads", "cache"];

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn config_hash(config: &Value) -> String {
    let mut relevant = config.clone();
    if let Value::Object(map) = &mut relevant {
        for k in NON_RESULT_KEYS {
            map.remove(k);
        }
    }
    let mut h = Sha256::new();
    h.update(relevant.to_string().as_bytes());
    format!("{:x}", h.finalize())
}

#[derive(Serialize)]
pub struct Summary<'a> {
    pub schema: &'static str,
    pub experiment: &'a str,
    pub version: &'static str,
    pub config: &'a Value,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub results: Value,
    pub rules: &'a [RuleOutcome],
    pub pass: bool,
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
}

pub struct Outputs {
    pub dir: PathBuf,
    pub experiment: String,
}

impl Outputs {
    pub fn csv_path(&self) -> PathBuf {
        self.dir.join(format!("{}.csv", self.experiment))
    }

    pub fn summary_path(&self) -> PathBuf {
        self.dir.join(format!("{}.summary.json", self.experiment))
    }

    /// Writes `<experiment>.csv` and `<experiment>.summary.json`; returns
    /// whether every rule passed.
    #[allow(clippy::too_many_arguments)]
    pub fn emit(
        &self,
        config: &Value,
        seed: Option<u64>,
        csv: &str,
        results: Value,
        rules: &[RuleOutcome],
        wall_time_s: f64,
    ) -> Result<bool> {
        write_atomic(&self.csv_path(), csv.as_bytes())?;
        let pass = all_pass(rules);
        let summary = Summary {
            schema: SUMMARY_SCHEMA,
            experiment: &self.experiment,
            version: crate::VERSION,
            config,
            config_hash: config_hash(config),
            seed,
            results,
            rules,
            pass,
            artifacts: vec![self.csv_path().display().to_string()],
            wall_time_s,
        };
        let mut json = serde_json::to_string_pretty(&summary)?;
        json.push('\n');
        write_atomic(&self.summary_path(), json.as_bytes())?;
        Ok(pass)
    }
}
