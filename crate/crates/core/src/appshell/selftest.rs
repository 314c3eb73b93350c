//! Invariant checks of every module at reduced sample counts.

use std::f64::consts::TAU;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    avg_work_mhq, classical_decomposition, energy_change, negativity, negativity_bound, s_stat, uniform_grid,
};
use crate::explore::{sweep, time_window, SweepConfig};
use crate::model::{energy_basis, hamiltonian_rot, initial_state, DriveParams, InitialStateSpec, KET_ZERO};
use crate::propagate::self_test_closed_form;
use crate::qmath::{herm_eig, unitary_exp, Ket, Operator, C64};
use crate::schemes::{
    gate_to_zero, kdq_at, mhq_reconstruct, mhq_reconstruct_with, shot_noise_sample, ConditionalSet,
    ReconstructionWeights, Snapshot,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            s += &format!("{mark} {:<28} {:>6} ms  {}\n", c.name, c.millis, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        s += &format!("{} checks, {failed} failed\n", self.checks.len());
        s
    }
}

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_ket(rng: &mut ChaCha8Rng) -> Ket {
    Ket::normalized((0..3).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .expect("nonzero draw")
}

fn random_params(rng: &mut ChaCha8Rng) -> DriveParams {
    let w1 = TAU * rng.random_range(1.0..20.0);
    let w2 = TAU * rng.random_range(1.0..20.0);
    DriveParams { omega1: w1, omega2: w2, phi1: rng.random_range(-2.0 * w1..2.0 * w1), phi2: rng.random_range(-2.0 * w2..2.0 * w2) }
}

fn reference() -> (DriveParams, Ket) {
    let p = DriveParams::nv_reference();
    let b0 = energy_basis(0.0, &p).expect("reference spectrum is gapped");
    (p, initial_state(&InitialStateSpec::nv_reference(), &b0).expect("reference state is valid"))
}

fn eigensolver() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = Operator::from_fn(3, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = (&a + &a.adjoint()).scale_real(0.5);
        let es = herm_eig(&h).map_err(|e| e.to_string())?;
        worst = worst.max(es.reconstruct().max_abs_diff(&h));
    }
    ensure(worst <= 1e-12, format!("max reconstruction error {worst:.2e}"))
}

fn exponential() -> Check {
    let h = hamiltonian_rot(0.03, &DriveParams::nv_reference());
    let u = unitary_exp(&h, 0.7).map_err(|e| e.to_string())?;
    let split = &unitary_exp(&h, 0.3).map_err(|e| e.to_string())? * &unitary_exp(&h, 0.4).map_err(|e| e.to_string())?;
    let (defect, group) = (u.unitarity_defect(), u.max_abs_diff(&split));
    ensure(defect <= 1e-10 && group <= 1e-9, format!("unitarity {defect:.2e}, group law {group:.2e}"))
}

fn spectrum() -> Check {
    let p = DriveParams::nv_reference();
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let b = energy_basis(0.01 * k as f64, &p).map_err(|e| e.to_string())?;
        let w = p.omega_eff();
        worst = worst.max((b.energies[0] - w).abs()).max(b.energies[1].abs()).max((b.energies[2] + w).abs());
    }
    ensure(worst <= 1e-10 * p.omega_eff(), format!("max eigenvalue error {worst:.2e}"))
}

fn propagator() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = self_test_closed_form(&DriveParams::nv_reference(), 0).map_err(|e| e.to_string())?;
    for s in 0..2 {
        worst = worst.max(self_test_closed_form(&random_params(&mut rng), s + 1).map_err(|e| e.to_string())?);
    }
    Ok(format!("closed vs stepped {worst:.2e}"))
}

fn reconstruction(weights: ReconstructionWeights) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (p, psi, t) = (random_params(&mut rng), random_ket(&mut rng), rng.random_range(0.0..0.2));
        let snap = Snapshot::new(t, &p).map_err(|e| e.to_string())?;
        let tables = ConditionalSet::measure(&psi, &snap).map_err(|e| e.to_string())?.compose();
        let z = mhq_reconstruct_with(&tables, weights);
        let q = kdq_at(&psi.density(), &snap).real_part();
        for i in 0..3 {
            for f in 0..3 {
                worst = worst.max((z.z[i][f] - q.z[i][f]).abs());
            }
        }
    }
    ensure(worst <= 1e-9, format!("max |z - Re q| {worst:.2e}"))
}

fn marginals() -> Check {
    let (p, xi) = reference();
    let s_expect = (0.7654 + 0.0009) / 1.0001;
    let mut worst: f64 = 0.0;
    for t in uniform_grid(time_window(&p), 40) {
        let tables = ConditionalSet::measure(&xi, &Snapshot::new(t, &p).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .compose();
        let z = mhq_reconstruct(&tables);
        let (rows, cols) = (z.row_sums(), z.column_sums());
        for k in 0..3 {
            worst = worst.max((rows[k] - tables.p_init[k]).abs()).max((cols[k] - tables.p_end[k]).abs());
        }
        worst = worst.max((s_stat(&z) - s_expect).abs());
    }
    ensure(worst <= 1e-10, format!("max marginal deviation {worst:.2e}"))
}

fn negativity_bounds() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut peak: f64 = 0.0;
    let mut at_zero: f64 = 0.0;
    for _ in 0..100 {
        let (p, psi) = (random_params(&mut rng), random_ket(&mut rng));
        let rho = psi.density();
        at_zero = at_zero.max(negativity(&kdq_at(&rho, &Snapshot::new(0.0, &p).map_err(|e| e.to_string())?)).abs());
        let snap = Snapshot::new(rng.random_range(0.0..0.3), &p).map_err(|e| e.to_string())?;
        let q = kdq_at(&rho, &snap);
        peak = peak.max(negativity(&q)).max(negativity(&q.real_part()));
    }
    ensure(
        peak <= negativity_bound() + 1e-9 && at_zero <= 1e-9,
        format!("max aleph {peak:.4}, max |aleph(0)| {at_zero:.2e}"),
    )
}

fn work() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (p, psi, t) = (random_params(&mut rng), random_ket(&mut rng), rng.random_range(0.0..0.3));
        let snap = Snapshot::new(t, &p).map_err(|e| e.to_string())?;
        let z = mhq_reconstruct(&ConditionalSet::measure(&psi, &snap).map_err(|e| e.to_string())?.compose());
        let w = avg_work_mhq(&z);
        let d = classical_decomposition(&z).map_err(|e| e.to_string())?;
        let scale = p.omega_eff();
        worst = worst.max((d.work() - w).abs() / scale).max((energy_change(&psi.density(), &snap) - w).abs() / scale);
    }
    ensure(worst <= 1e-10, format!("max relative work mismatch {worst:.2e}"))
}

fn shot_noise() -> Check {
    let one_hot = (0..20).all(|s| {
        shot_noise_sample([0.2, 0.3, 0.5], 1, s).map(|f| f.iter().filter(|&&x| x == 1.0).count() == 1).unwrap_or(false)
    });
    let n = 200;
    let mean = (0..n).map(|s| shot_noise_sample([0.5, 0.5, 0.0], 10_000, s).map(|f| f[0]).unwrap_or(f64::NAN)).sum::<f64>()
        / n as f64;
    // standard error of the mean is 0.5/√(10⁴·200) ≈ 3.5e-4
    ensure(one_hot && (mean - 0.5).abs() < 5.0 * 3.6e-4, format!("one-hot {one_hot}, mean {mean:.5}"))
}

fn gates() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let zero = Ket::basis(3, KET_ZERO).density();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let xi = random_ket(&mut rng).density();
        let r = gate_to_zero(&xi).map_err(|e| e.to_string())?;
        worst = worst.max(xi.conjugate_by(&r).map_err(|e| e.to_string())?.max_abs_diff(&zero)).max(r.unitarity_defect());
    }
    ensure(worst <= 1e-10, format!("max gate error {worst:.2e}"))
}

fn sweep_contract() -> Check {
    let cfg = SweepConfig { n_sets: 16, n_time: 50, seed: 7, ..SweepConfig::default() };
    let a = sweep(&cfg).map_err(|e| e.to_string())?;
    let b = sweep(&cfg).map_err(|e| e.to_string())?;
    let bound_ok = a.summary.bound_violations == 0 && a.summary.consistency_violations == 0;
    ensure(
        a.records == b.records && bound_ok,
        format!("{} records, reproducible {}, bounds ok {bound_ok}", a.records.len(), a.records == b.records),
    )
}

/// Runs every check. `weights` is the reconstruction under test; anything
/// other than the default should make the run fail.
pub fn run_selftest(weights: ReconstructionWeights) -> SelftestReport {
    type Named = (&'static str, Box<dyn Fn() -> Check>);
    let checks: Vec<Named> = vec![
        ("qmath.eigensolver", Box::new(eigensolver)),
        ("qmath.unitary_exp", Box::new(exponential)),
        ("model.spectrum", Box::new(spectrum)),
        ("propagate.closed_form", Box::new(propagator)),
        ("schemes.gates", Box::new(gates)),
        ("schemes.reconstruction", Box::new(move || reconstruction(weights))),
        ("schemes.shot_noise", Box::new(shot_noise)),
        ("analysis.marginals", Box::new(marginals)),
        ("analysis.negativity_bound", Box::new(negativity_bounds)),
        ("analysis.work_identities", Box::new(work)),
        ("explore.sweep_contract", Box::new(sweep_contract)),
    ];
    let checks = checks
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { name, passed, detail, millis: start.elapsed().as_millis() }
        })
        .collect();
    SelftestReport { checks }
}
