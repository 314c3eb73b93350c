//! Command-line plumbing: configuration, figure data, sweep archives and the
//! self-test.

pub mod config;
pub mod figures;
pub mod output;
pub mod selftest;

use std::path::{Path, PathBuf};

pub use config::{ConfigError, RunConfig};
pub use figures::{reproduce, Figure, FigureBundle, FigureRow};
pub use selftest::{run_selftest, SelftestReport};

use crate::explore::{self, ExploreError};
use crate::model::ModelError;
use crate::schemes::SchemeError;

/// Environment variable that sets the worker thread count.
pub const THREADS_ENV: &str = "MHQ_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SELFTEST: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Runtime(String),
    #[error("selftest failed")]
    Selftest,
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Selftest => EXIT_SELFTEST,
            _ => EXIT_CONFIG,
        }
    }
}

impl From<ModelError> for AppError {
    fn from(e: ModelError) -> Self {
        AppError::Config(ConfigError { file: None, line: None, field: None, message: e.to_string() })
    }
}

impl From<SchemeError> for AppError {
    fn from(e: SchemeError) -> Self {
        AppError::Runtime(e.to_string())
    }
}

impl From<ExploreError> for AppError {
    fn from(e: ExploreError) -> Self {
        AppError::Config(ConfigError::field("sweep", e.to_string()))
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub steps: Option<usize>,
}

pub fn load_config(path: Option<&Path>, o: &Overrides) -> Result<RunConfig, AppError> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &o.out {
        cfg.out = Some(out.clone());
    }
    cfg.seed = o.seed.unwrap_or(cfg.seed);
    cfg.shots = o.shots.or(cfg.shots);
    cfg.steps = o.steps.or(cfg.steps);
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> Result<(), AppError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| AppError::Config(ConfigError::field(THREADS_ENV, format!("expected a positive integer, got {raw:?}"))))?;
    // A second initialization (e.g. in tests) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn cmd_reproduce(cfg: &RunConfig, figure: Figure) -> Result<Vec<PathBuf>, AppError> {
    let bundle = reproduce(cfg, figure)?;
    output::write_figure(&out_dir(cfg), &bundle)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, AppError> {
    let sc = cfg.sweep_config();
    let out = explore::sweep(&sc)?;
    output::write_sweep(&out_dir(cfg), &sc, &out)
}
