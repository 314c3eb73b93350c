//! Measurement schemes and quasiprobability tables.
//!
//! Every scheme is assembled from conditional probabilities
//! `p(f|ψ) = Tr[U|ψ⟩⟨ψ|U† Ξ_f(t)]` on prepared pure states, the way the
//! experiment measures them:
//!
//! * END: `ψ = ξ`, giving `p^END_f`.
//! * TPM: `ψ = E_i(0)`, giving `p^TPM_{if} = p_i p(f|i)`.
//! * wTPM: additionally `ψ = ξ̄_i`, the normalized projection of `ξ` onto
//!   the complement of `E_i(0)`, giving
//!   `p^wTPM_{if} = p_i p(f|i) + (1 − p_i) p(f|ī)`.
//!
//! The real part of the Kirkwood-Dirac table then follows from
//! `z_{if} = p^TPM_{if} − ½(p^wTPM_{if} − p^END_f)`.

mod gate;
mod noise;
mod protocol;

pub use gate::gate_to_zero;
pub use noise::{derive_seed, multinomial_counts, shot_noise_sample, LinearFunctional, ShotConfig};
pub use protocol::{run_protocol, Scheme};

use serde::Serialize;

use crate::model::{energy_basis, DriveParams, EnergyBasis, Label, ModelError, DIM};
use crate::propagate::propagator_closed;
use crate::qmath::{inner, norm2, Ket, Operator, C64};
use crate::tol;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemeError {
    #[error("state is not normalized (norm {norm})")]
    UnnormalizedState { norm: f64 },
    #[error("complement of level {label} is undefined: population {p} is numerically one")]
    DegenerateComplement { label: Label, p: f64 },
    #[error("operator is not a rank-one projector")]
    NotRankOne,
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Table = [[f64; 3]; 3];

/// Evolution operator and energy bases at `0` and `t` for one drive.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub params: DriveParams,
    pub u: Operator,
    pub basis0: EnergyBasis,
    pub basis_t: EnergyBasis,
}

impl Snapshot {
    pub fn new(t: f64, params: &DriveParams) -> Result<Self, SchemeError> {
        Ok(Self {
            t,
            params: *params,
            u: propagator_closed(t, params).u,
            basis0: energy_basis(0.0, params)?,
            basis_t: energy_basis(t, params)?,
        })
    }

    /// `p(f|ψ)` for `f = +, 0, −`.
    pub fn conditional(&self, psi: &Ket) -> Result<[f64; 3], SchemeError> {
        require_normalized(psi.amplitudes())?;
        let evolved = psi.evolve(&self.u);
        Ok([0, 1, 2].map(|f| evolved.overlap_prob(&self.basis_t.vectors[f])))
    }

    /// `Ξ_f(t)` pulled back to time zero: `U† Ξ_f U`.
    fn heisenberg_projectors(&self) -> [Operator; 3] {
        let ud = self.u.adjoint();
        [0, 1, 2].map(|f| &(&ud * &self.basis_t.projectors[f]) * &self.u)
    }
}

fn require_normalized(amps: &[C64]) -> Result<(), SchemeError> {
    let norm = norm2(amps);
    if (norm - 1.0).abs() > tol::STATE_NORM {
        return Err(SchemeError::UnnormalizedState { norm });
    }
    Ok(())
}

/// `p(f|ψ) = Tr[U|ψ⟩⟨ψ|U† Ξ_f(t)]`.
pub fn conditional_prob(psi: &Ket, t: f64, params: &DriveParams) -> Result<[f64; 3], SchemeError> {
    Snapshot::new(t, params)?.conditional(psi)
}

/// `|ξ̄_i⟩ ∝ (I − Π_i)|ξ⟩`, normalized by `√(1 − p_i)`.
pub fn complement_state(psi: &Ket, label: Label, basis0: &EnergyBasis) -> Result<Ket, SchemeError> {
    require_normalized(psi.amplitudes())?;
    let e = basis0.vector(label);
    let c = inner(e, psi.amplitudes());
    let p = c.norm_sqr();
    if 1.0 - p < tol::COMPLEMENT {
        return Err(SchemeError::DegenerateComplement { label, p });
    }
    let rest: Vec<C64> = psi.amplitudes().iter().zip(e).map(|(x, y)| x - c * y).collect();
    Ok(Ket::normalized(rest).expect("complement has norm √(1 − p_i) > 0"))
}

/// `p_i = Tr[ρ Π_i(0)]`.
pub fn populations(psi: &Ket, basis0: &EnergyBasis) -> [f64; 3] {
    [0, 1, 2].map(|i| psi.overlap_prob(&basis0.vectors[i]))
}

/// The seven conditional distributions the experiment measures at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalSet {
    pub t: f64,
    /// `p_i`, known from the preparation.
    pub p_init: [f64; 3],
    /// `p(f|ξ)`
    pub end: [f64; 3],
    /// `given[i][f] = p(f|i)`
    pub given: Table,
    /// `given_not[i][f] = p(f|ī)`; equal to `end` when `1 − p_i` vanishes.
    pub given_not: Table,
    pub e_init: [f64; 3],
    pub e_final: [f64; 3],
}

impl ConditionalSet {
    /// Exact (noiseless) conditional probabilities for pure `psi`.
    pub fn measure(psi: &Ket, snap: &Snapshot) -> Result<Self, SchemeError> {
        let mut given = [[0.0; 3]; 3];
        let mut given_not = [[0.0; 3]; 3];
        for label in Label::ALL {
            let i = label.index();
            let prepared = Ket::new(snap.basis0.vectors[i].clone()).expect("unit eigenvector");
            given[i] = snap.conditional(&prepared)?;
        }
        let end = snap.conditional(psi)?;
        for label in Label::ALL {
            let i = label.index();
            given_not[i] = match complement_state(psi, label, &snap.basis0) {
                Ok(rest) => snap.conditional(&rest)?,
                // ξ is E_i itself: the complement carries weight 1 − p_i = 0
                // and any distribution composes to the same table.
                Err(SchemeError::DegenerateComplement { .. }) => end,
                Err(e) => return Err(e),
            };
        }
        Ok(Self {
            t: snap.t,
            p_init: populations(psi, &snap.basis0),
            end,
            given,
            given_not,
            e_init: snap.basis0.energies,
            e_final: snap.basis_t.energies,
        })
    }

    /// Combines the conditionals into the three scheme tables.
    pub fn compose(&self) -> SchemeTables {
        let mut p_tpm = [[0.0; 3]; 3];
        let mut p_wtpm = [[0.0; 3]; 3];
        for i in 0..DIM {
            let pi = self.p_init[i];
            for f in 0..DIM {
                p_tpm[i][f] = pi * self.given[i][f];
                p_wtpm[i][f] = pi * self.given[i][f] + (1.0 - pi) * self.given_not[i][f];
            }
        }
        SchemeTables {
            t: self.t,
            p_tpm,
            p_wtpm,
            p_end: self.end,
            p_init: self.p_init,
            e_init: self.e_init,
            e_final: self.e_final,
        }
    }
}

/// TPM, wTPM and END distributions at one time, with the energy ladders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeTables {
    pub t: f64,
    pub p_tpm: Table,
    pub p_wtpm: Table,
    pub p_end: [f64; 3],
    pub p_init: [f64; 3],
    pub e_init: [f64; 3],
    pub e_final: [f64; 3],
}

/// All three tables for pure `psi`, by the experimental composition.
pub fn scheme_tables(psi: &Ket, t: f64, params: &DriveParams) -> Result<SchemeTables, SchemeError> {
    let snap = Snapshot::new(t, params)?;
    Ok(ConditionalSet::measure(psi, &snap)?.compose())
}

fn evolve_and_measure(rho: &Operator, pulled_back: &[Operator; 3]) -> [f64; 3] {
    [0, 1, 2].map(|f| rho.trace_product(&pulled_back[f]).expect("3x3").re)
}

/// `p^END_f = Tr[UρU† Ξ_f]`; `rho` may be mixed.
pub fn epm_table(rho: &Operator, snap: &Snapshot) -> [f64; 3] {
    evolve_and_measure(rho, &snap.heisenberg_projectors())
}

/// `p^TPM_{if} = Tr[U Π_iρΠ_i U† Ξ_f]`; `rho` may be mixed.
pub fn tpm_table(rho: &Operator, snap: &Snapshot) -> Table {
    let pulled = snap.heisenberg_projectors();
    [0, 1, 2].map(|i| {
        let pi = &snap.basis0.projectors[i];
        evolve_and_measure(&(&(pi * rho) * pi), &pulled)
    })
}

/// `p^wTPM_{if} = Tr[U ρ_NS,i U† Ξ_f]` with the non-selective state
/// `ρ_NS,i = Π_iρΠ_i + (I − Π_i)ρ(I − Π_i)`.
pub fn wtpm_table(rho: &Operator, snap: &Snapshot) -> Table {
    let pulled = snap.heisenberg_projectors();
    let id = Operator::identity(DIM);
    [0, 1, 2].map(|i| {
        let pi = &snap.basis0.projectors[i];
        let qi = &id - pi;
        let ns = &(&(pi * rho) * pi) + &(&(&qi * rho) * &qi);
        evolve_and_measure(&ns, &pulled)
    })
}

/// Coefficients of `z = a·p^TPM + b·p^wTPM + c·p^END`. Only the default
/// `(1, −½, ½)` reconstructs the Margenau-Hill table; the other values exist
/// so self-tests can verify that a corrupted reconstruction gets caught.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionWeights {
    pub tpm: f64,
    pub wtpm: f64,
    pub end: f64,
}

impl Default for ReconstructionWeights {
    fn default() -> Self {
        Self { tpm: 1.0, wtpm: -0.5, end: 0.5 }
    }
}

/// Quasiprobability tables share this view for negativity calculations.
pub trait QuasiTable {
    fn time(&self) -> f64;
    /// `Σ_{if} |q_{if}|` (complex modulus or absolute value).
    fn modulus_sum(&self) -> f64;
}

/// Real (Margenau-Hill) quasiprobability table `z_{if} = Re q_{if}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MhqTable {
    pub t: f64,
    pub z: Table,
    pub e_init: [f64; 3],
    pub e_final: [f64; 3],
}

impl MhqTable {
    pub fn row_sums(&self) -> [f64; 3] {
        self.z.map(|row| row.iter().sum())
    }

    pub fn column_sums(&self) -> [f64; 3] {
        [0, 1, 2].map(|f| self.z.iter().map(|row| row[f]).sum())
    }

    pub fn total(&self) -> f64 {
        self.z.iter().flatten().sum()
    }

    pub fn get(&self, i: Label, f: Label) -> f64 {
        self.z[i.index()][f.index()]
    }

    /// Smallest entry and where it sits.
    pub fn min_entry(&self) -> (f64, Label, Label) {
        let mut best = (f64::INFINITY, Label::Plus, Label::Plus);
        for i in Label::ALL {
            for f in Label::ALL {
                let v = self.get(i, f);
                if v < best.0 {
                    best = (v, i, f);
                }
            }
        }
        best
    }
}

impl QuasiTable for MhqTable {
    fn time(&self) -> f64 {
        self.t
    }

    fn modulus_sum(&self) -> f64 {
        self.z.iter().flatten().map(|x| x.abs()).sum()
    }
}

/// `z_{if} = p^TPM_{if} − ½(p^wTPM_{if} − p^END_f)`.
pub fn mhq_reconstruct(tables: &SchemeTables) -> MhqTable {
    mhq_reconstruct_with(tables, ReconstructionWeights::default())
}

pub fn mhq_reconstruct_with(tables: &SchemeTables, w: ReconstructionWeights) -> MhqTable {
    let z = [0, 1, 2].map(|i| {
        [0, 1, 2].map(|f| w.tpm * tables.p_tpm[i][f] + w.wtpm * tables.p_wtpm[i][f] + w.end * tables.p_end[f])
    });
    MhqTable { t: tables.t, z, e_init: tables.e_init, e_final: tables.e_final }
}

/// Complex Kirkwood-Dirac table `q_{if} = Tr[ρ Π_i(0) U† Ξ_f(t) U]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KdqTable {
    pub t: f64,
    pub q: [[C64; 3]; 3],
    pub e_init: [f64; 3],
    pub e_final: [f64; 3],
}

impl KdqTable {
    pub fn real_part(&self) -> MhqTable {
        MhqTable {
            t: self.t,
            z: self.q.map(|row| row.map(|x| x.re)),
            e_init: self.e_init,
            e_final: self.e_final,
        }
    }

    pub fn total(&self) -> C64 {
        self.q.iter().flatten().sum()
    }
}

impl QuasiTable for KdqTable {
    fn time(&self) -> f64 {
        self.t
    }

    fn modulus_sum(&self) -> f64 {
        self.q.iter().flatten().map(|x| x.norm()).sum()
    }
}

/// Kirkwood-Dirac table evaluated directly from its definition.
pub fn kdq_direct(rho: &Operator, t: f64, params: &DriveParams) -> Result<KdqTable, SchemeError> {
    Ok(kdq_at(rho, &Snapshot::new(t, params)?))
}

pub fn kdq_at(rho: &Operator, snap: &Snapshot) -> KdqTable {
    let pulled = snap.heisenberg_projectors();
    let q = [0, 1, 2].map(|i| {
        let rho_pi = rho * &snap.basis0.projectors[i];
        [0, 1, 2].map(|f| rho_pi.trace_product(&pulled[f]).expect("3x3"))
    });
    KdqTable { t: snap.t, q, e_init: snap.basis0.energies, e_final: snap.basis_t.energies }
}
