//! File writers. Floats use Rust's shortest round-trip formatting, so output
//! is byte-stable for a fixed config and seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::figures::{FigureBundle, FigureRow};
use super::AppError;
use crate::explore::{SweepConfig, SweepOutput};

pub const CSV_HEADER: &str = "t_us,series,value,stderr";

pub fn figure_csv(rows: &[FigureRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let se = r.stderr.map(|x| x.to_string()).unwrap_or_default();
        writeln!(s, "{},{},{},{}", r.t_us, r.series, r.value, se).expect("string write");
    }
    s
}

fn write(path: &Path, contents: &str) -> Result<(), AppError> {
    fs::write(path, contents).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), AppError> {
    fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("{}: {e}", dir.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

/// Writes `<fig>.csv` and `<fig>_meta.json`; returns both paths.
pub fn write_figure(dir: &Path, bundle: &FigureBundle) -> Result<Vec<PathBuf>, AppError> {
    ensure_dir(dir)?;
    let name = bundle.figure.name();
    let csv = dir.join(format!("{name}.csv"));
    let meta = dir.join(format!("{name}_meta.json"));
    write(&csv, &figure_csv(&bundle.rows))?;
    write(&meta, &pretty(&bundle.meta))?;
    Ok(vec![csv, meta])
}

pub const SWEEP_HEADER: &str =
    "set,variant,omega1,omega2,phi1,phi2,a,b,phi_a,phi_b,min_req,min_w,min_w_over_omega_norm,max_aleph,window_end_us";

pub fn sweep_csv(out: &SweepOutput) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in &out.records {
        for v in &r.variants {
            let p = &v.params;
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.set,
                v.kind.name(),
                p.omega1,
                p.omega2,
                p.phi1,
                p.phi2,
                r.state.a,
                r.state.b,
                r.state.phi_a,
                r.state.phi_b,
                v.min_req,
                v.min_w,
                v.min_w / v.omega_norm(),
                v.max_aleph,
                v.window_end
            )
            .expect("string write");
        }
    }
    s
}

pub fn sweep_summary_json(cfg: &SweepConfig, out: &SweepOutput) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "frequency_convention": match cfg.unit {
            crate::model::FrequencyUnit::MhzTimes2pi => "omega interval in MHz, multiplied by 2π",
            crate::model::FrequencyUnit::MhzPlain => "omega interval in MHz, used as rad/µs without 2π",
            crate::model::FrequencyUnit::AngularRadPerUs => "omega interval in rad/µs",
        },
        "parameters_unit": "rad/µs",
        "skipped_sets": out.skipped,
        "summary": out.summary,
    })
}

/// Writes `sweep_records.csv` and `sweep_summary.json`.
pub fn write_sweep(dir: &Path, cfg: &SweepConfig, out: &SweepOutput) -> Result<Vec<PathBuf>, AppError> {
    ensure_dir(dir)?;
    let csv = dir.join("sweep_records.csv");
    let summary = dir.join("sweep_summary.json");
    write(&csv, &sweep_csv(out))?;
    write(&summary, &pretty(&sweep_summary_json(cfg, out)))?;
    Ok(vec![csv, summary])
}
