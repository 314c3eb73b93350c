//! Random-parameter survey of negativity and work extraction.
//!
//! Each set draws a pure state and a drive, then adds two equal-phase twins
//! (`φ₁ = φ₂ = φ₁^R` and `φ₁ = φ₂ = φ₂^R`) that keep the Rabi frequencies.
//! For every variant the quasiprobability table is scanned on a grid inside
//! `(0, T)` with `T = 2π/√(2(Ω₁² + Ω₂²) + φ₁²)`.

use std::f64::consts::TAU;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::negativity_bound;
use crate::model::{energy_basis, hamiltonian_tilde, DriveParams, FrequencyUnit, ModelError, DIM};
use crate::qmath::{cis, herm_eig, inner, Ket, Operator, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExploreError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_sets: usize,
    /// Grid points per window.
    pub n_time: usize,
    pub seed: u64,
    /// Rabi-frequency interval, in `unit`.
    pub omega_min: f64,
    pub omega_max: f64,
    /// Phase rates are drawn from `[−k·Ω, k·Ω]`.
    pub phi_factor: f64,
    pub unit: FrequencyUnit,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_sets: 1000,
            n_time: 200,
            seed: 0,
            omega_min: 1.0,
            omega_max: 20.0,
            phi_factor: 2.0,
            unit: FrequencyUnit::MhzTimes2pi,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExploreError> {
        let bad = |m: &str| Err(ExploreError::InvalidConfig(m.into()));
        if self.n_sets == 0 {
            return bad("n_sets must be at least 1");
        }
        if self.n_time == 0 {
            return bad("n_time must be at least 1");
        }
        if !(self.omega_min.is_finite() && self.omega_max.is_finite()) {
            return bad("omega interval must be finite");
        }
        if !(self.omega_min > 0.0 && self.omega_min < self.omega_max) {
            return bad("omega interval must satisfy 0 < omega_min < omega_max");
        }
        if !(self.phi_factor.is_finite() && self.phi_factor > 0.0) {
            return bad("phi_factor must be positive");
        }
        Ok(())
    }
}

/// Parameters of `a e^{jφa}|+1⟩ + b e^{jφb}|0⟩ + √(1 − a² − b²)|−1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDraw {
    pub a: f64,
    pub b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl StateDraw {
    pub fn ket(&self) -> Ket {
        let c = (1.0 - self.a * self.a - self.b * self.b).max(0.0).sqrt();
        Ket::normalized(vec![cis(self.phi_a) * self.a, cis(self.phi_b) * self.b, C64::new(c, 0.0)])
            .expect("unit amplitudes")
    }
}

/// `a ~ U[0,1]`, `b ~ U[0, √(1 − a²)]`, phases `~ U[0, 2π)`. Not Haar-uniform.
pub fn random_pure_state(rng: &mut ChaCha8Rng) -> StateDraw {
    let a: f64 = rng.random_range(0.0..=1.0);
    let b_max = (1.0 - a * a).max(0.0).sqrt();
    let b = if b_max > 0.0 { rng.random_range(0.0..=b_max) } else { 0.0 };
    StateDraw { a, b, phi_a: rng.random_range(0.0..TAU), phi_b: rng.random_range(0.0..TAU) }
}

/// Uniform draws `Ω_k ∈ [min, max]`, `φ_k ∈ [−kΩ_k, kΩ_k]`, converted to rad/µs.
pub fn random_params(rng: &mut ChaCha8Rng, cfg: &SweepConfig) -> DriveParams {
    let mut draw = || {
        let omega = cfg.unit.to_angular(rng.random_range(cfg.omega_min..=cfg.omega_max));
        let phi = rng.random_range(-cfg.phi_factor * omega..=cfg.phi_factor * omega);
        (omega, phi)
    };
    let (omega1, phi1) = draw();
    let (omega2, phi2) = draw();
    DriveParams { omega1, omega2, phi1, phi2 }
}

/// The two equal-phase variants `φ₁ = φ₂ = φ₁^R` and `φ₁ = φ₂ = φ₂^R`.
pub fn twins(p: &DriveParams) -> [DriveParams; 2] {
    [
        DriveParams { phi2: p.phi1, ..*p },
        DriveParams { phi1: p.phi2, ..*p },
    ]
}

/// `T = 2π/√(2(Ω₁² + Ω₂²) + φ₁²)`, a period of the dynamics when `φ₂ = φ₁`.
pub fn time_window(p: &DriveParams) -> f64 {
    TAU / (2.0 * (p.omega1 * p.omega1 + p.omega2 * p.omega2) + p.phi1 * p.phi1).sqrt()
}

/// `t_k = k·T/(n + 1)` for `k = 1..=n`: `n` points strictly inside `(0, T)`.
pub fn interior_grid(end: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| end * k as f64 / (n + 1) as f64).collect()
}

type Block = [[C64; 3]; 3];

/// Kirkwood-Dirac table of a fixed state and drive as an explicit function
/// of time.
///
/// In the static frame `U†Ξ_f(t)U = e^{jtH̃} Π_f e^{−jtH̃}`, so in the
/// eigenbasis `{|k⟩}` of `H̃`
/// `q_{if}(t) = Σ_{kl} ⟨l|ρΠ_i|k⟩⟨k|Π_f|l⟩ e^{j(λ_k − λ_l)t}`.
#[derive(Debug, Clone)]
pub struct TableKernel {
    freqs: [f64; 3],
    // coeff[i][f][k][l]
    coeff: [[Block; 3]; 3],
    pub energies: [f64; 3],
}

impl TableKernel {
    pub fn new(psi: &Ket, params: &DriveParams) -> Result<Self, ModelError> {
        let basis0 = energy_basis(0.0, params)?;
        let es = herm_eig(&hamiltonian_tilde(params))?;
        let rho = psi.density();
        let in_eigenbasis = |m: &Operator| -> Block {
            let mv: [Vec<C64>; 3] = [0, 1, 2].map(|k| m.apply(&es.vectors[k]).expect("3x3"));
            [0, 1, 2].map(|l| [0, 1, 2].map(|k| inner(&es.vectors[l], &mv[k])))
        };
        let rho_pi = [0, 1, 2].map(|i| in_eigenbasis(&(&rho * &basis0.projectors[i])));
        let pi_f = [0, 1, 2].map(|f| in_eigenbasis(&basis0.projectors[f]));
        let mut coeff = [[[[C64::new(0.0, 0.0); 3]; 3]; 3]; 3];
        for i in 0..DIM {
            for f in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        coeff[i][f][k][l] = rho_pi[i][l][k] * pi_f[f][k][l];
                    }
                }
            }
        }
        Ok(Self { freqs: [es.values[0], es.values[1], es.values[2]], coeff, energies: basis0.energies })
    }

    pub fn table(&self, t: f64) -> [[C64; 3]; 3] {
        let ph = self.freqs.map(|x| cis(x * t));
        let mut q = [[C64::new(0.0, 0.0); 3]; 3];
        for (i, row) in q.iter_mut().enumerate() {
            for (f, cell) in row.iter_mut().enumerate() {
                let c = &self.coeff[i][f];
                for k in 0..DIM {
                    for l in 0..DIM {
                        *cell += c[k][l] * ph[k] * ph[l].conj();
                    }
                }
            }
        }
        q
    }

    /// `(min Re q, ⟨W⟩, ℵ)` at time `t`, using the real table for `ℵ`.
    pub fn summary(&self, t: f64) -> (f64, f64, f64) {
        let q = self.table(t);
        let mut min_req = f64::INFINITY;
        let mut w = 0.0;
        let mut abs_sum = 0.0;
        for i in 0..DIM {
            for f in 0..DIM {
                let z = q[i][f].re;
                min_req = min_req.min(z);
                w += z * (self.energies[f] - self.energies[i]);
                abs_sum += z.abs();
            }
        }
        (min_req, w, abs_sum - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Original,
    TwinPhi1,
    TwinPhi2,
}

impl VariantKind {
    pub const ALL: [VariantKind; 3] = [VariantKind::Original, VariantKind::TwinPhi1, VariantKind::TwinPhi2];

    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Original => "original",
            VariantKind::TwinPhi1 => "twin_phi1",
            VariantKind::TwinPhi2 => "twin_phi2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub kind: VariantKind,
    pub params: DriveParams,
    pub min_req: f64,
    pub min_w: f64,
    pub max_aleph: f64,
    pub window_end: f64,
}

impl VariantResult {
    /// `√(Ω₁² + Ω₂²)` of this variant.
    pub fn omega_norm(&self) -> f64 {
        self.params.omega1.hypot(self.params.omega2)
    }
}

pub fn scan_variant(
    kind: VariantKind,
    psi: &Ket,
    params: &DriveParams,
    n_time: usize,
) -> Result<VariantResult, ModelError> {
    let kernel = TableKernel::new(psi, params)?;
    let window_end = time_window(params);
    let mut out = VariantResult {
        kind,
        params: *params,
        min_req: f64::INFINITY,
        min_w: f64::INFINITY,
        max_aleph: f64::NEG_INFINITY,
        window_end,
    };
    for t in interior_grid(window_end, n_time) {
        let (min_req, w, aleph) = kernel.summary(t);
        out.min_req = out.min_req.min(min_req);
        out.min_w = out.min_w.min(w);
        out.max_aleph = out.max_aleph.max(aleph);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub set: usize,
    pub state: StateDraw,
    pub variants: [VariantResult; 3],
}

/// The RNG of set `index`: one ChaCha stream per set, so the draws do not
/// depend on scheduling.
pub fn set_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// One set; `None` if any variant is numerically degenerate.
pub fn sweep_set(cfg: &SweepConfig, index: usize) -> Option<SweepRecord> {
    let mut rng = set_rng(cfg.seed, index);
    let state = random_pure_state(&mut rng);
    let params = random_params(&mut rng, cfg);
    let psi = state.ket();
    let [t1, t2] = twins(&params);
    let all = [params, t1, t2];
    let mut variants = Vec::with_capacity(3);
    for (kind, p) in VariantKind::ALL.into_iter().zip(&all) {
        let v = scan_variant(kind, &psi, p, cfg.n_time).ok()?;
        if ![v.min_req, v.min_w, v.max_aleph].iter().all(|x| x.is_finite()) {
            return None;
        }
        variants.push(v);
    }
    Some(SweepRecord { set: index, state, variants: variants.try_into().expect("three variants") })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremePoint {
    pub set: usize,
    pub kind: VariantKind,
    pub value: f64,
    pub equal_phases: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n_sets: usize,
    pub n_records: usize,
    pub n_skipped: usize,
    pub unit: FrequencyUnit,
    pub aleph_bound: f64,
    /// Variants whose `max ℵ` exceeds the bound by more than 1e-9.
    pub bound_violations: usize,
    /// Share of sets whose original drive reaches `max ℵ > 1e-9`.
    pub fraction_positive_aleph: f64,
    pub median_min_w_twins: f64,
    pub median_min_w_originals: f64,
    pub twins_lower_median: bool,
    /// Share of equal-phase twins among the lowest 10% of `min⟨W⟩` values.
    pub lowest_decile_twin_share: f64,
    pub global_max_aleph: Option<ExtremePoint>,
    pub global_max_at_unequal_phases: bool,
    pub global_min_w: Option<ExtremePoint>,
    /// Variants with `min Re q < −1e-12` but `max ℵ ≤ 0`.
    pub consistency_violations: usize,
}

fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn summarize(cfg: &SweepConfig, records: &[SweepRecord]) -> SweepSummary {
    let bound = negativity_bound();
    let all: Vec<(usize, &VariantResult)> =
        records.iter().flat_map(|r| r.variants.iter().map(move |v| (r.set, v))).collect();
    let is_twin = |v: &VariantResult| v.kind != VariantKind::Original;

    let mut twin_w: Vec<f64> = all.iter().filter(|(_, v)| is_twin(v)).map(|(_, v)| v.min_w).collect();
    let mut orig_w: Vec<f64> = all.iter().filter(|(_, v)| !is_twin(v)).map(|(_, v)| v.min_w).collect();
    let median_min_w_twins = median(&mut twin_w);
    let median_min_w_originals = median(&mut orig_w);

    let mut by_w: Vec<&(usize, &VariantResult)> = all.iter().collect();
    by_w.sort_by(|a, b| a.1.min_w.total_cmp(&b.1.min_w).then(a.0.cmp(&b.0)));
    let decile = (by_w.len() / 10).max(1).min(by_w.len());
    let lowest_decile_twin_share = if by_w.is_empty() {
        f64::NAN
    } else {
        by_w[..decile].iter().filter(|(_, v)| is_twin(v)).count() as f64 / decile as f64
    };

    let point = |(set, v): &(usize, &VariantResult), value: f64| ExtremePoint {
        set: *set,
        kind: v.kind,
        value,
        equal_phases: v.params.has_equal_phases(),
    };
    let global_max_aleph = all
        .iter()
        .max_by(|a, b| a.1.max_aleph.total_cmp(&b.1.max_aleph).then(b.0.cmp(&a.0)))
        .map(|x| point(x, x.1.max_aleph));
    let global_min_w = all.iter().min_by(|a, b| a.1.min_w.total_cmp(&b.1.min_w)).map(|x| point(x, x.1.min_w));

    let originals_positive = records.iter().filter(|r| r.variants[0].max_aleph > 1e-9).count();
    SweepSummary {
        n_sets: cfg.n_sets,
        n_records: records.len(),
        n_skipped: cfg.n_sets - records.len(),
        unit: cfg.unit,
        aleph_bound: bound,
        bound_violations: all.iter().filter(|(_, v)| v.max_aleph > bound + 1e-9).count(),
        fraction_positive_aleph: if records.is_empty() {
            f64::NAN
        } else {
            originals_positive as f64 / records.len() as f64
        },
        median_min_w_twins,
        median_min_w_originals,
        twins_lower_median: median_min_w_twins < median_min_w_originals,
        lowest_decile_twin_share,
        global_max_at_unequal_phases: global_max_aleph.is_some_and(|p| !p.equal_phases),
        global_max_aleph,
        global_min_w,
        consistency_violations: all.iter().filter(|(_, v)| v.min_req < -1e-12 && v.max_aleph <= 0.0).count(),
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<usize>,
    pub summary: SweepSummary,
}

/// Runs every set in parallel; the output is independent of thread count.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepOutput, ExploreError> {
    cfg.validate()?;
    let results: Vec<(usize, Option<SweepRecord>)> =
        (0..cfg.n_sets).into_par_iter().map(|k| (k, sweep_set(cfg, k))).collect();
    let mut records = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (k, r) in results {
        match r {
            Some(r) => records.push(r),
            None => skipped.push(k),
        }
    }
    let summary = summarize(cfg, &records);
    Ok(SweepOutput { records, skipped, summary })
}
