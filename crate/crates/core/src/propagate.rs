//! Time-evolution operator of the driven qutrit, computed two independent ways.
//!
//! The closed form moves to the frame generated by
//! `D = φ₁|+1⟩⟨+1| + φ₂|−1⟩⟨−1|`, where the Hamiltonian is the static `H̃`:
//!
//! ```text
//! U(t) = exp(−j t D) · exp(−j t H̃)
//! ```
//!
//! The stepped form is a midpoint product of short-time exponentials of the
//! lab-frame `H(t)` and knows nothing about that frame. It is the oracle
//! the closed form is checked against.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::{frame_generator, hamiltonian_rot, hamiltonian_tilde, DriveParams};
use crate::qmath::{cis, unitary_exp, Operator};
use crate::tol;

/// Midpoint steps per characteristic period used by oracle runs.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropagateError {
    #[error("stepped propagator needs at least one step")]
    ZeroSteps,
    #[error("closed-form propagator disagrees with the stepped product at t = {t} µs (deviation {deviation:.3e})")]
    ClosedFormMismatch { t: f64, deviation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Closed,
    Stepped(usize),
}

#[derive(Debug, Clone)]
pub struct PropagatorResult {
    pub t: f64,
    pub u: Operator,
    pub method: Method,
}

/// `U(t) = exp(−jtD)·exp(−jtH̃)`.
pub fn propagator_closed(t: f64, params: &DriveParams) -> PropagatorResult {
    let d = frame_generator(params);
    let frame = Operator::diag(&[0, 1, 2].map(|k| cis(-t * d[(k, k)].re)));
    let static_part = unitary_exp(&hamiltonian_tilde(params), t).expect("H̃ is Hermitian");
    PropagatorResult { t, u: &frame * &static_part, method: Method::Closed }
}

/// `U(t) ≈ Π_{k=n..1} exp(−jΔt H(t_k))` with `t_k = (k − ½)Δt`, `Δt = t/n`.
pub fn propagator_stepped(
    t: f64,
    params: &DriveParams,
    n_steps: usize,
) -> Result<PropagatorResult, PropagateError> {
    if n_steps == 0 {
        return Err(PropagateError::ZeroSteps);
    }
    let dt = t / n_steps as f64;
    let mut u = Operator::identity(crate::model::DIM);
    for k in 1..=n_steps {
        let tk = (k as f64 - 0.5) * dt;
        let step = unitary_exp(&hamiltonian_rot(tk, params), dt).expect("H(t) is Hermitian");
        u = &step * &u;
    }
    Ok(PropagatorResult { t, u, method: Method::Stepped(n_steps) })
}

/// Time scale `2π/‖H̃‖_F` over which the dynamics completes about one cycle.
pub fn characteristic_period(params: &DriveParams) -> f64 {
    std::f64::consts::TAU / hamiltonian_tilde(params).frobenius_norm()
}

/// Compares the closed form with the stepped product at three seeded
/// times inside one characteristic period. Returns the largest Frobenius
/// deviation.
pub fn self_test_closed_form(params: &DriveParams, seed: u64) -> Result<f64, PropagateError> {
    let period = characteristic_period(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let t = period * rng.random_range(0.05..1.0);
        let closed = propagator_closed(t, params).u;
        let stepped = propagator_stepped(t, params, DEFAULT_STEPS_PER_PERIOD)?.u;
        let deviation = (&closed - &stepped).frobenius_norm();
        if deviation > tol::CLOSED_FORM_SELF_TEST {
            return Err(PropagateError::ClosedFormMismatch { t, deviation });
        }
        worst = worst.max(deviation);
    }
    Ok(worst)
}
