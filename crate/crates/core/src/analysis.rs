//! Negativity and work statistics of quasiprobability tables.

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{hamiltonian_rot, DriveParams, Label};
use crate::qmath::{Ket, Operator};
use crate::schemes::{
    kdq_at, mhq_reconstruct, ConditionalSet, KdqTable, MhqTable, QuasiTable, SchemeError, SchemeTables, Snapshot,
    Table,
};

/// Upper bound `√d − 1` of the negativity for `d = 3`.
pub fn negativity_bound() -> f64 {
    3f64.sqrt() - 1.0
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("quasiprobability table is identically zero")]
    DegenerateTable,
}

/// `ℵ = −1 + Σ|q_{if}|`: complex modulus for KD tables, absolute value for real ones.
pub fn negativity(q: &impl QuasiTable) -> f64 {
    q.modulus_sum() - 1.0
}

/// `‖z‖ = Σ|z_{if}|`.
pub fn total_negativity(z: &MhqTable) -> f64 {
    z.modulus_sum()
}

/// `Σ_f z_{+f} + z_{0f}`, which equals `p_+ + p_0` at every time.
pub fn s_stat(z: &MhqTable) -> f64 {
    z.z[Label::Plus.index()].iter().chain(&z.z[Label::Zero.index()]).sum()
}

/// `⟨W⟩ = Σ z_{if}(E_f(t) − E_i(0))`.
pub fn avg_work_mhq(z: &MhqTable) -> f64 {
    weighted_work(&z.z, &z.e_init, &z.e_final)
}

/// `⟨W⟩_TPM = Σ p^TPM_{if}(E_f(t) − E_i(0))`.
pub fn avg_work_tpm(tables: &SchemeTables) -> f64 {
    weighted_work(&tables.p_tpm, &tables.e_init, &tables.e_final)
}

fn weighted_work(table: &Table, e_init: &[f64; 3], e_final: &[f64; 3]) -> f64 {
    let mut w = 0.0;
    for i in 0..3 {
        for f in 0..3 {
            w += table[i][f] * (e_final[f] - e_init[i]);
        }
    }
    w
}

/// `Tr[UρU† H(t)] − Tr[ρ H(0)]`, the average energy change without any table.
pub fn energy_change(rho: &Operator, snap: &Snapshot) -> f64 {
    let evolved = rho.conjugate_by(&snap.u).expect("3x3");
    let after = evolved.trace_product(&hamiltonian_rot(snap.t, &snap.params)).expect("3x3").re;
    let before = rho.trace_product(&hamiltonian_rot(0.0, &snap.params)).expect("3x3").re;
    after - before
}

/// `⟨W⟩` read as a classical process: weights `μ = |z|/‖z‖` over transitions
/// whose energies are rescaled by `‖z‖ sgn(z_{if})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalDecomposition {
    pub mu: Table,
    /// `+1` for strictly positive entries, `−1` otherwise.
    pub signs: [[i8; 3]; 3],
    pub z_norm: f64,
    pub e_init: [f64; 3],
    pub e_final: [f64; 3],
}

impl ClassicalDecomposition {
    /// `(Ē_i(0), Ē_f(t))` for the transition `i → f`.
    pub fn effective_energies(&self, i: usize, f: usize) -> (f64, f64) {
        let scale = self.z_norm * self.signs[i][f] as f64;
        (scale * self.e_init[i], scale * self.e_final[f])
    }

    /// `Σ μ_{if}(Ē_f(t) − Ē_i(0))`.
    pub fn work(&self) -> f64 {
        let mut w = 0.0;
        for i in 0..3 {
            for f in 0..3 {
                let (ei, ef) = self.effective_energies(i, f);
                w += self.mu[i][f] * (ef - ei);
            }
        }
        w
    }
}

pub fn classical_decomposition(z: &MhqTable) -> Result<ClassicalDecomposition, AnalysisError> {
    let z_norm = total_negativity(z);
    if z_norm == 0.0 {
        return Err(AnalysisError::DegenerateTable);
    }
    Ok(ClassicalDecomposition {
        mu: z.z.map(|row| row.map(|x| x.abs() / z_norm)),
        signs: z.z.map(|row| row.map(|x| if x > 0.0 { 1 } else { -1 })),
        z_norm,
        e_init: z.e_init,
        e_final: z.e_final,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkStats {
    pub t: f64,
    pub w_mhq: f64,
    pub w_tpm: f64,
    pub negativity: f64,
    pub total_negativity: f64,
    pub s_stat: f64,
}

impl WorkStats {
    pub fn from_tables(tables: &SchemeTables) -> Self {
        let z = mhq_reconstruct(tables);
        Self {
            t: tables.t,
            w_mhq: avg_work_mhq(&z),
            w_tpm: avg_work_tpm(tables),
            negativity: negativity(&z),
            total_negativity: total_negativity(&z),
            s_stat: s_stat(&z),
        }
    }
}

/// `min⟨W⟩ / min⟨W⟩_TPM`, defined only when both minima are negative.
pub fn extraction_peak_ratio(w_mhq: &[f64], w_tpm: &[f64]) -> Option<f64> {
    let min_w = w_mhq.iter().copied().fold(f64::INFINITY, f64::min);
    let min_tpm = w_tpm.iter().copied().fold(f64::INFINITY, f64::min);
    (min_w < 0.0 && min_tpm < 0.0).then(|| min_w / min_tpm)
}

/// Index of the smallest value; first one wins ties.
pub fn argmin(xs: &[f64]) -> Option<usize> {
    xs.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(k, _)| k)
}

/// Index of the largest value; first one wins ties.
pub fn argmax(xs: &[f64]) -> Option<usize> {
    xs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))).map(|(k, _)| k)
}

/// Everything computed about one grid time.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub conditionals: ConditionalSet,
    pub tables: SchemeTables,
    pub z: MhqTable,
    pub kdq: KdqTable,
    pub stats: WorkStats,
}

impl GridPoint {
    pub fn t(&self) -> f64 {
        self.tables.t
    }
}

pub fn grid_point(xi: &Ket, t: f64, params: &DriveParams) -> Result<GridPoint, SchemeError> {
    let snap = Snapshot::new(t, params)?;
    let conditionals = ConditionalSet::measure(xi, &snap)?;
    let tables = conditionals.compose();
    Ok(GridPoint {
        z: mhq_reconstruct(&tables),
        kdq: kdq_at(&xi.density(), &snap),
        stats: WorkStats::from_tables(&tables),
        conditionals,
        tables,
    })
}

/// Evaluates [`grid_point`] at every time, in parallel, preserving order.
pub fn scan(xi: &Ket, times: &[f64], params: &DriveParams) -> Result<Vec<GridPoint>, SchemeError> {
    times.par_iter().map(|&t| grid_point(xi, t, params)).collect()
}

/// `k·T/n` for `k = 0..=n`.
pub fn uniform_grid(end: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|k| end * k as f64 / intervals as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{energy_basis, initial_state, InitialStateSpec};
    use crate::explore::time_window;
    use crate::qmath::C64;
    use crate::schemes::scheme_tables;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn reference() -> (DriveParams, Ket) {
        let p = DriveParams::nv_reference();
        let b0 = energy_basis(0.0, &p).unwrap();
        (p, initial_state(&InitialStateSpec::nv_reference(), &b0).unwrap())
    }

    fn random_case(rng: &mut ChaCha8Rng) -> (DriveParams, Ket, f64) {
        let w1 = TAU * rng.random_range(1.0..20.0);
        let w2 = TAU * rng.random_range(1.0..20.0);
        let p = DriveParams::new(w1, w2, rng.random_range(-2.0 * w1..2.0 * w1), rng.random_range(-2.0 * w2..2.0 * w2))
            .unwrap();
        let psi = Ket::normalized(
            (0..3).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect(),
        )
        .unwrap();
        (p, psi, rng.random_range(0.0..0.3))
    }

    fn table(z: Table) -> MhqTable {
        MhqTable { t: 0.0, z, e_init: [1.0, 0.0, -1.0], e_final: [1.0, 0.0, -1.0] }
    }

    #[test]
    fn classical_table_has_no_negativity() {
        let z = table([[0.5, 0.0, 0.0], [0.0, 0.2, 0.0], [0.0, 0.0, 0.3]]);
        assert_eq!(negativity(&z), 0.0);
        assert_eq!(total_negativity(&z), 1.0);
    }

    #[test]
    fn single_negative_entry() {
        let z = table([[0.5, 0.0, 0.0], [0.0, 0.3, 0.0], [-0.1, 0.0, 0.3]]);
        assert!((total_negativity(&z) - 1.2).abs() < 1e-15);
        assert!((negativity(&z) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn decomposition_of_positive_table() {
        let z = table([[0.2, 0.1, 0.05], [0.05, 0.3, 0.05], [0.05, 0.1, 0.1]]);
        let d = classical_decomposition(&z).unwrap();
        assert!(d.signs.iter().flatten().all(|&s| s == 1));
        for i in 0..3 {
            for f in 0..3 {
                assert!((d.mu[i][f] - z.z[i][f]).abs() < 1e-15);
            }
        }
        assert_eq!(classical_decomposition(&table([[0.0; 3]; 3])), Err(AnalysisError::DegenerateTable));
    }

    #[test]
    fn work_identities_on_random_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let (p, psi, t) = random_case(&mut rng);
            let snap = Snapshot::new(t, &p).unwrap();
            let tables = ConditionalSet::measure(&psi, &snap).unwrap().compose();
            let z = mhq_reconstruct(&tables);
            let w = avg_work_mhq(&z);
            let d = classical_decomposition(&z).unwrap();
            let scale = p.omega_eff();
            assert!((d.work() - w).abs() <= 1e-12 * scale.max(1.0));
            assert!((energy_change(&psi.density(), &snap) - w).abs() <= 1e-10 * scale.max(1.0));
            let mu_sum: f64 = d.mu.iter().flatten().sum();
            assert!((mu_sum - 1.0).abs() <= 1e-12);
            for i in 0..3 {
                for f in 0..3 {
                    let back = d.mu[i][f] * d.z_norm * d.signs[i][f] as f64;
                    assert!((back - z.z[i][f]).abs() <= 1e-10);
                }
            }
            assert!(negativity(&z) <= negativity_bound() + 1e-9);
            assert!(negativity(&kdq_at(&psi.density(), &snap)) <= negativity_bound() + 1e-9);
        }
    }

    #[test]
    fn no_work_at_zero_time() {
        let (p, xi) = reference();
        let tables = scheme_tables(&xi, 0.0, &p).unwrap();
        assert!(avg_work_mhq(&mhq_reconstruct(&tables)).abs() < 1e-12);
        assert!(avg_work_tpm(&tables).abs() < 1e-12);
        assert!(negativity(&mhq_reconstruct(&tables)).abs() < 1e-12);
    }

    #[test]
    fn single_downward_transition_costs_two_omega() {
        let omega = 3.0;
        let tables = SchemeTables {
            t: 0.1,
            p_tpm: [[0.0, 0.0, 1.0], [0.0; 3], [0.0; 3]],
            p_wtpm: [[0.0; 3]; 3],
            p_end: [0.0; 3],
            p_init: [1.0, 0.0, 0.0],
            e_init: [omega, 0.0, -omega],
            e_final: [omega, 0.0, -omega],
        };
        assert_eq!(avg_work_tpm(&tables), -2.0 * omega);
    }

    #[test]
    fn commuting_state_has_tpm_work() {
        let p = DriveParams::nv_reference();
        let b0 = energy_basis(0.0, &p).unwrap();
        let mut rho = Operator::zeros(3);
        for (k, w) in [0.6, 0.1, 0.3].iter().enumerate() {
            rho = &rho + &b0.projectors[k].scale_real(*w);
        }
        for k in 1..20 {
            let snap = Snapshot::new(0.01 * k as f64, &p).unwrap();
            let z = kdq_at(&rho, &snap).real_part();
            let tpm = crate::schemes::tpm_table(&rho, &snap);
            let w_tpm = weighted_work(&tpm, &z.e_init, &z.e_final);
            assert!((avg_work_mhq(&z) - w_tpm).abs() <= 1e-12 * p.omega_eff());
        }
    }

    #[test]
    fn s_statistic_is_constant() {
        let (p, xi) = reference();
        let expect = (0.7654 + 0.0009) / 1.0001;
        for k in 0..40 {
            let z = mhq_reconstruct(&scheme_tables(&xi, 0.005 * k as f64, &p).unwrap());
            assert!((s_stat(&z) - expect).abs() <= 1e-10);
        }
        let minus = Ket::new(energy_basis(0.0, &p).unwrap().vector(Label::Minus).to_vec()).unwrap();
        let z = mhq_reconstruct(&scheme_tables(&minus, 0.07, &p).unwrap());
        assert!(s_stat(&z).abs() <= 1e-10);
    }

    #[test]
    fn negativity_decomposes_through_the_minus_row() {
        let (p, xi) = reference();
        for pt in scan(&xi, &uniform_grid(time_window(&p), 40), &p).unwrap() {
            let z = &pt.z;
            let minus_row: f64 = z.z[2].iter().map(|x| x.abs()).sum();
            assert!((negativity(z) - (-1.0 + s_stat(z) + minus_row)).abs() <= 1e-10);
        }
    }

    #[test]
    fn negative_cell_extracts_work() {
        let (p, xi) = reference();
        let pts = scan(&xi, &uniform_grid(time_window(&p), 100), &p).unwrap();
        let pt = pts.iter().min_by(|a, b| a.z.get(Label::Minus, Label::Plus).total_cmp(&b.z.get(Label::Minus, Label::Plus))).unwrap();
        let d = classical_decomposition(&pt.z).unwrap();
        let (ei, ef) = d.effective_energies(2, 0);
        assert_eq!(d.signs[2][0], -1);
        assert!(pt.z.e_final[0] - pt.z.e_init[2] > 0.0);
        assert!(d.mu[2][0] * (ef - ei) < 0.0);
    }

    #[test]
    fn extraction_ratio_requires_two_negative_minima() {
        assert_eq!(extraction_peak_ratio(&[-4.0, 1.0], &[-1.0, 0.5]), Some(4.0));
        assert_eq!(extraction_peak_ratio(&[-4.0, 1.0], &[0.0, 0.5]), None);
        assert_eq!(extraction_peak_ratio(&[0.1], &[-1.0]), None);
    }

    #[test]
    fn arg_extrema_prefer_the_first_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmin(&[2.0, -1.0, -1.0]), Some(1));
        assert_eq!(argmin(&[]), None);
    }
}
