//! Gate-level simulation of a single measurement scheme.
//!
//! Each run starts in `|0⟩`, prepares the input state with the inverse of
//! its readout gate, evolves under the drive, and reads out `f` by rotating
//! `E_f(t)` onto `|0⟩` and recording the `|0⟩` population. This mirrors the
//! way the table composition in the parent module is measured, and both see
//! the same shot-noise streams for a given seed.

use serde::{Deserialize, Serialize};

use super::noise::{end_seed, given_not_seed, given_seed, shot_noise_sample, ShotConfig};
use super::{complement_state, gate_to_zero, populations, SchemeError, Snapshot};
use crate::model::{Label, KET_ZERO};
use crate::qmath::Ket;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Final energy only: `p^END_f`.
    End,
    /// Row `i` of the TPM table: `p_i p(f|i)`.
    Tpm(Label),
    /// Row `i` of the wTPM table: `p_i p(f|i) + (1 − p_i) p(f|ī)`.
    Wtpm(Label),
}

/// `p(f|ψ)` through prepare, evolve and rotate-to-`|0⟩` readout.
fn gate_conditional(psi: &Ket, snap: &Snapshot) -> Result<[f64; 3], SchemeError> {
    let prep = gate_to_zero(&psi.density())?.adjoint();
    let evolved = Ket::basis(crate::model::DIM, KET_ZERO).evolve(&prep).evolve(&snap.u);
    let mut out = [0.0; 3];
    for f in Label::ALL {
        let readout = gate_to_zero(snap.basis_t.projector(f))?;
        out[f.index()] = evolved.evolve(&readout).amplitudes()[KET_ZERO].norm_sqr();
    }
    Ok(out)
}

fn sampled(
    psi: &Ket,
    snap: &Snapshot,
    shots: Option<ShotConfig>,
    seed_of: impl Fn(u64) -> u64,
) -> Result<[f64; 3], SchemeError> {
    let exact = gate_conditional(psi, snap)?;
    match shots {
        None => Ok(exact),
        Some(cfg) => shot_noise_sample(exact, cfg.shots, seed_of(cfg.seed)),
    }
}

/// Outcome distribution of one scheme for initial state `xi` at `snap.t`.
pub fn run_protocol(
    xi: &Ket,
    scheme: Scheme,
    snap: &Snapshot,
    shots: Option<ShotConfig>,
) -> Result<[f64; 3], SchemeError> {
    match scheme {
        Scheme::End => sampled(xi, snap, shots, end_seed),
        Scheme::Tpm(label) => {
            let i = label.index();
            let pi = populations(xi, &snap.basis0)[i];
            let level = Ket::new(snap.basis0.vectors[i].clone()).expect("unit eigenvector");
            let row = sampled(&level, snap, shots, |s| given_seed(s, i))?;
            Ok(row.map(|x| pi * x))
        }
        Scheme::Wtpm(label) => {
            let i = label.index();
            let pi = populations(xi, &snap.basis0)[i];
            let level = Ket::new(snap.basis0.vectors[i].clone()).expect("unit eigenvector");
            let given = sampled(&level, snap, shots, |s| given_seed(s, i))?;
            if 1.0 - pi < crate::tol::COMPLEMENT {
                return Ok(given.map(|x| pi * x));
            }
            let rest = complement_state(xi, label, &snap.basis0)?;
            let given_not = sampled(&rest, snap, shots, |s| given_not_seed(s, i))?;
            Ok([0, 1, 2].map(|f| pi * given[f] + (1.0 - pi) * given_not[f]))
        }
    }
}
