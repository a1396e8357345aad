use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{Config, ConfigError};
use crate::experiments::{self, CsvFile};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed_override: Option<u64>,
    pub validate_only: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) => 3,
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: &'static str,
    pub seed: u64,
    /// Written files, manifest last. Empty for `validate_only`.
    pub files: Vec<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads and validates the config; unless `validate_only`, runs the
/// experiment and writes its CSVs plus `manifest.json` into `out`.
pub fn run_experiment(opts: &RunOptions) -> Result<RunSummary, RunError> {
    let raw = fs::read(&opts.config).map_err(ConfigError::Io)?;
    let text = std::str::from_utf8(&raw).map_err(|e| ConfigError::Field {
        path: String::new(),
        message: format!("config is not UTF-8: {e}"),
    })?;
    let mut cfg = Config::from_json_str(text)?;
    if let Some(seed) = opts.seed_override {
        cfg.set_seed(seed);
    }
    if opts.validate_only {
        return Ok(RunSummary {
            experiment: cfg.experiment(),
            seed: cfg.seed(),
            files: Vec::new(),
        });
    }
    let start = Instant::now();
    let outputs = experiments::run(&cfg)?;
    let wall = start.elapsed().as_secs_f64();
    let files = write_outputs(&opts.out, &cfg, &raw, &outputs, wall)?;
    Ok(RunSummary {
        experiment: cfg.experiment(),
        seed: cfg.seed(),
        files,
    })
}

fn write_outputs(out: &Path, cfg: &Config, raw: &[u8], outputs: &[CsvFile], wall: f64) -> anyhow::Result<Vec<PathBuf>> {
    use anyhow::Context;
    fs::create_dir_all(out).with_context(|| format!("cannot create output directory {}", out.display()))?;
    let mut files = Vec::new();
    for f in outputs {
        let p = out.join(&f.name);
        fs::write(&p, &f.bytes).with_context(|| format!("cannot write {}", p.display()))?;
        files.push(p);
    }
    let manifest = json!({
        "experiment": cfg.experiment(),
        "seed": cfg.seed(),
        "config": cfg.to_value(),
        "config_sha256": sha256_hex(raw),
        "library_version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": wall,
        "outputs": outputs
            .iter()
            .map(|f| json!({"file": f.name, "sha256": sha256_hex(&f.bytes)}))
            .collect::<Vec<_>>(),
    });
    let p = out.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))?;
    files.push(p);
    Ok(files)
}
