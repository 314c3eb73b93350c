//! Time-series data behind the three figure targets.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::AppError;
use crate::analysis::{
    argmax, argmin, avg_work_mhq, avg_work_tpm, extraction_peak_ratio, negativity, negativity_bound,
};
use crate::explore::time_window;
use crate::model::{energy_basis, initial_state, DriveParams, Label};
use crate::propagate::{propagator_closed, propagator_stepped};
use crate::qmath::{Ket, Operator};
use crate::schemes::{
    derive_seed, kdq_at, mhq_reconstruct, ConditionalSet, LinearFunctional, MhqTable, ShotConfig, Snapshot,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Measured distributions: `p^END_f`, `p(f|i)`, `p(f|ī)`.
    Fig2,
    /// Quasiprobabilities `z_{if}` and negativity.
    Fig3,
    /// Average work from the MHQ and the TPM tables.
    Fig4,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

/// One CSV row: `t_us,series,value,stderr`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub t_us: f64,
    pub series: String,
    pub value: f64,
    /// Propagated shot-noise standard error; absent for exact runs.
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FigureBundle {
    pub figure: Figure,
    pub rows: Vec<FigureRow>,
    pub meta: Value,
}

impl FigureBundle {
    /// Values of one series in grid order.
    pub fn series(&self, name: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.series == name).map(|r| r.value).collect()
    }
}

/// Per-time measurements, exact or shot-noise sampled.
struct Point {
    t: f64,
    used: ConditionalSet,
    z: MhqTable,
    aleph_kd: f64,
}

/// Everything a figure needs that does not depend on the target.
struct Run {
    params: DriveParams,
    xi: Ket,
    times: Vec<f64>,
    shots: Option<u64>,
    points: Vec<Point>,
}

fn prepare(cfg: &RunConfig) -> Result<Run, AppError> {
    let params = cfg.drive_params()?;
    let basis0 = energy_basis(0.0, &params)?;
    let xi = initial_state(&cfg.state_spec(), &basis0)?;
    let times = cfg.times()?;
    let points = times
        .par_iter()
        .enumerate()
        .map(|(k, &t)| -> Result<Point, AppError> {
            let snap = Snapshot::new(t, &params)?;
            let exact = ConditionalSet::measure(&xi, &snap)?;
            let used = match cfg.shots {
                Some(shots) => exact.with_shot_noise(ShotConfig { shots, seed: derive_seed(cfg.seed, k as u64) })?,
                None => exact,
            };
            let z = mhq_reconstruct(&used.compose());
            let aleph_kd = negativity(&kdq_at(&xi.density(), &snap));
            Ok(Point { t, used, z, aleph_kd })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Run { params, xi, times, shots: cfg.shots, points })
}

impl Point {
    fn stderr(&self, shots: Option<u64>, l: &LinearFunctional) -> Option<f64> {
        shots.map(|n| self.used.stderr_of(n, l))
    }

    /// Linearized functional of `ℵ = Σ|z| − 1` around the measured table.
    fn aleph_functional(&self) -> LinearFunctional {
        let mut l = LinearFunctional::default();
        for i in 0..3 {
            for f in 0..3 {
                let s = if self.z.z[i][f] < 0.0 { -1.0 } else { 1.0 };
                l.add_scaled(s, &self.used.mhq_functional(i, f));
            }
        }
        l
    }
}

fn row(t: f64, series: String, value: f64, stderr: Option<f64>) -> FigureRow {
    FigureRow { t_us: t, series, value, stderr }
}

fn unit_functional(slot: impl FnOnce(&mut LinearFunctional)) -> LinearFunctional {
    let mut l = LinearFunctional::default();
    slot(&mut l);
    l
}

fn fig2_rows(run: &Run) -> Vec<FigureRow> {
    let mut rows = Vec::new();
    for pt in &run.points {
        for f in Label::ALL {
            let fi = f.index();
            let l = unit_functional(|l| l.end[fi] = 1.0);
            rows.push(row(pt.t, format!("p_end:{f}"), pt.used.end[fi], pt.stderr(run.shots, &l)));
        }
        for i in Label::ALL {
            for f in Label::ALL {
                let (ii, fi) = (i.index(), f.index());
                let l = unit_functional(|l| l.given[ii][fi] = 1.0);
                rows.push(row(pt.t, format!("p_given:{i}:{f}"), pt.used.given[ii][fi], pt.stderr(run.shots, &l)));
            }
        }
        for i in Label::ALL {
            for f in Label::ALL {
                let (ii, fi) = (i.index(), f.index());
                let l = unit_functional(|l| l.given_not[ii][fi] = 1.0);
                let v = pt.used.given_not[ii][fi];
                rows.push(row(pt.t, format!("p_given_not:{i}:{f}"), v, pt.stderr(run.shots, &l)));
            }
        }
    }
    rows
}

fn fig3_rows(run: &Run) -> Vec<FigureRow> {
    let mut rows = Vec::new();
    for pt in &run.points {
        for i in Label::ALL {
            for f in Label::ALL {
                let l = pt.used.mhq_functional(i.index(), f.index());
                rows.push(row(pt.t, format!("z:{i}:{f}"), pt.z.get(i, f), pt.stderr(run.shots, &l)));
            }
        }
        let mut minus = LinearFunctional::default();
        for f in 0..3 {
            let s = if pt.z.z[2][f] < 0.0 { -1.0 } else { 1.0 };
            minus.add_scaled(s, &pt.used.mhq_functional(2, f));
        }
        let minus_abs: f64 = pt.z.z[2].iter().map(|x| x.abs()).sum();
        rows.push(row(pt.t, "minus_row_abs".into(), minus_abs, pt.stderr(run.shots, &minus)));
        rows.push(row(pt.t, "aleph".into(), negativity(&pt.z), pt.stderr(run.shots, &pt.aleph_functional())));
        rows.push(row(pt.t, "aleph_kd".into(), pt.aleph_kd, None));
        rows.push(row(pt.t, "aleph_bound".into(), negativity_bound(), None));
        rows.push(row(pt.t, "zero".into(), 0.0, None));
    }
    rows
}

fn fig4_rows(run: &Run) -> Vec<FigureRow> {
    let omega = run.params.omega_eff();
    let mut rows = Vec::new();
    for pt in &run.points {
        let tables = pt.used.compose();
        let w = avg_work_mhq(&pt.z);
        let w_tpm = avg_work_tpm(&tables);
        let se_w = pt.stderr(run.shots, &pt.used.work_mhq_functional());
        let se_tpm = pt.stderr(run.shots, &pt.used.work_tpm_functional());
        rows.push(row(pt.t, "w_mhq".into(), w, se_w));
        rows.push(row(pt.t, "w_tpm".into(), w_tpm, se_tpm));
        rows.push(row(pt.t, "w_mhq_over_omega".into(), w / omega, se_w.map(|s| s / omega)));
        rows.push(row(pt.t, "w_tpm_over_omega".into(), w_tpm / omega, se_tpm.map(|s| s / omega)));
    }
    rows
}

fn tomography(xi: &Ket) -> Value {
    let rho = xi.density();
    let part = |m: &Operator, f: fn(&crate::qmath::C64) -> f64| -> Vec<Vec<f64>> {
        (0..3).map(|i| m.row(i).iter().map(f).collect()).collect()
    };
    json!({
        "basis": ["|+1>", "|0>", "|-1>"],
        "re": part(&rho, |x| x.re),
        "im": part(&rho, |x| x.im),
    })
}

fn at(run: &Run, k: Option<usize>) -> Value {
    match k {
        Some(k) => json!(run.times[k]),
        None => Value::Null,
    }
}

fn figure_meta(cfg: &RunConfig, run: &Run, figure: Figure) -> Result<Value, AppError> {
    let aleph: Vec<f64> = run.points.iter().map(|p| negativity(&p.z)).collect();
    let k_peak = argmax(&aleph);
    let mut meta = json!({
        "figure": figure.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "params_rad_per_us": run.params,
        "omega_eff_rad_per_us": run.params.omega_eff(),
        "window_us": time_window(&run.params),
        "frequency_convention": "MHz values are ordinary frequencies multiplied by 2π unless units say otherwise",
        "points": run.times.len(),
        "shots": run.shots,
        "seed": cfg.seed,
        "columns": ["t_us", "series", "value", "stderr"],
        "aleph_peak": { "value": k_peak.map(|k| aleph[k]), "t_us": at(run, k_peak) },
    });
    let extra = match figure {
        Figure::Fig2 => {
            let basis0 = energy_basis(0.0, &run.params)?;
            let pops: Vec<f64> = Label::ALL.iter().map(|l| run.xi.overlap_prob(basis0.vector(*l))).collect();
            json!({ "populations": pops, "tomography": tomography(&run.xi) })
        }
        Figure::Fig3 => {
            let zmp: Vec<f64> = run.points.iter().map(|p| p.z.get(Label::Minus, Label::Plus)).collect();
            let k_min = argmin(&zmp);
            let mut negative_cells = Vec::new();
            for i in Label::ALL {
                for f in Label::ALL {
                    let low = run.points.iter().map(|p| p.z.get(i, f)).fold(f64::INFINITY, f64::min);
                    if low < -1e-9 {
                        negative_cells.push(json!({ "i": i, "f": f, "min": low }));
                    }
                }
            }
            let positive = aleph.iter().filter(|&&a| a > 1e-3).count();
            json!({
                "z_minus_plus_min": { "value": k_min.map(|k| zmp[k]), "t_us": at(run, k_min) },
                "cells_below_minus_1e-9": negative_cells,
                "fraction_aleph_above_1e-3": positive as f64 / aleph.len() as f64,
                "aleph_bound": negativity_bound(),
            })
        }
        Figure::Fig4 => {
            let w: Vec<f64> = run.points.iter().map(|p| avg_work_mhq(&p.z)).collect();
            let w_tpm: Vec<f64> = run.points.iter().map(|p| avg_work_tpm(&p.used.compose())).collect();
            let (kw, kt) = (argmin(&w), argmin(&w_tpm));
            let omega = run.params.omega_eff();
            json!({
                "min_w_mhq": { "value": kw.map(|k| w[k]), "over_omega": kw.map(|k| w[k] / omega), "t_us": at(run, kw) },
                "min_w_tpm": { "value": kt.map(|k| w_tpm[k]), "over_omega": kt.map(|k| w_tpm[k] / omega), "t_us": at(run, kt) },
                "extraction_peak_ratio": extraction_peak_ratio(&w, &w_tpm),
            })
        }
    };
    merge(&mut meta, extra);
    if let Some(steps) = cfg.steps {
        let worst = run
            .times
            .par_iter()
            .map(|&t| {
                let closed = propagator_closed(t, &run.params).u;
                let stepped = propagator_stepped(t, &run.params, steps).expect("steps > 0").u;
                (&closed - &stepped).frobenius_norm()
            })
            .reduce(|| 0.0, f64::max);
        merge(&mut meta, json!({ "propagator_check": { "steps": steps, "max_frobenius_deviation": worst } }));
    }
    Ok(meta)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn reproduce(cfg: &RunConfig, figure: Figure) -> Result<FigureBundle, AppError> {
    let run = prepare(cfg)?;
    let rows = match figure {
        Figure::Fig2 => fig2_rows(&run),
        Figure::Fig3 => fig3_rows(&run),
        Figure::Fig4 => fig4_rows(&run),
    };
    if let Some(bad) = rows.iter().find(|r| !r.value.is_finite() || r.stderr.is_some_and(|s| !s.is_finite())) {
        return Err(AppError::Runtime(format!("non-finite value in series {} at t = {}", bad.series, bad.t_us)));
    }
    let meta = figure_meta(cfg, &run, figure)?;
    Ok(FigureBundle { figure, rows, meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(points: usize) -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.grid.points = points;
        cfg
    }

    #[test]
    fn fig3_starts_classical() {
        let b = reproduce(&small(21), Figure::Fig3).unwrap();
        let p = [0.7654, 0.0009, 0.2338].map(|x| x / 1.0001);
        let first: Vec<&FigureRow> = b.rows.iter().filter(|r| r.t_us == 0.0).collect();
        for r in &first {
            if let Some(rest) = r.series.strip_prefix("z:") {
                let (i, f) = rest.split_once(':').unwrap();
                let expect = if i == f { p[["+", "0", "-"].iter().position(|x| *x == i).unwrap()] } else { 0.0 };
                assert!((r.value - expect).abs() < 1e-12, "{}", r.series);
            }
        }
        assert!(b.series("aleph")[0].abs() < 1e-12);
        assert!(b.series("z:-:+").iter().any(|&x| x < 0.0));
        assert!(b.rows.iter().all(|r| r.stderr.is_none()));
    }

    #[test]
    fn one_row_per_time_and_series() {
        for (fig, per) in [(Figure::Fig2, 21), (Figure::Fig3, 14), (Figure::Fig4, 4)] {
            let b = reproduce(&small(11), fig).unwrap();
            assert_eq!(b.rows.len(), 11 * per);
            let mut keys: Vec<(u64, &str)> = b.rows.iter().map(|r| (r.t_us.to_bits(), r.series.as_str())).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), b.rows.len());
        }
    }

    #[test]
    fn fig4_work_differs_at_the_negativity_peak() {
        let b = reproduce(&small(101), Figure::Fig4).unwrap();
        let k = b.meta["aleph_peak"]["t_us"].as_f64().unwrap();
        let t = b.series("w_mhq");
        let times: Vec<f64> = b.rows.iter().filter(|r| r.series == "w_mhq").map(|r| r.t_us).collect();
        let idx = times.iter().position(|&x| x == k).unwrap();
        assert!((t[idx] - b.series("w_tpm")[idx]).abs() > 0.1);
        assert!(b.meta["extraction_peak_ratio"].as_f64().unwrap() > 1.0);
    }

    #[test]
    fn shot_noise_adds_stderr() {
        let mut cfg = small(5);
        cfg.shots = Some(10_000);
        cfg.seed = 3;
        let a = reproduce(&cfg, Figure::Fig3).unwrap();
        assert!(a.rows.iter().filter(|r| r.series.starts_with("z:")).all(|r| r.stderr.is_some()));
        let b = reproduce(&cfg, Figure::Fig3).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn fig2_meta_has_tomography() {
        let b = reproduce(&small(3), Figure::Fig2).unwrap();
        let pops = b.meta["populations"].as_array().unwrap();
        assert!((pops[0].as_f64().unwrap() - 0.7654 / 1.0001).abs() < 1e-12);
        let re = &b.meta["tomography"]["re"];
        let trace: f64 = (0..3).map(|k| re[k][k].as_f64().unwrap()).sum();
        assert!((trace - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stepped_check_is_recorded() {
        let mut cfg = small(3);
        cfg.steps = Some(2000);
        let b = reproduce(&cfg, Figure::Fig4).unwrap();
        let dev = b.meta["propagator_check"]["max_frobenius_deviation"].as_f64().unwrap();
        assert!(dev < 1e-4);
    }
}
