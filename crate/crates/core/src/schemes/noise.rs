//! Finite-repetition readout noise.
//!
//! A conditional distribution `p(f|ψ)` measured with `N` repetitions is
//! modelled as multinomial frequencies. Each of the seven conditionals of a
//! [`ConditionalSet`] draws from its own ChaCha stream, so the noisy tables
//! and the single-scheme protocol runs see identical samples.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::{ConditionalSet, SchemeError, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
}

/// A child seed tied to `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.random()
}

const END_STREAM: u64 = 0;
const GIVEN_STREAM: u64 = 1;
const GIVEN_NOT_STREAM: u64 = 4;

pub(crate) fn end_seed(seed: u64) -> u64 {
    derive_seed(seed, END_STREAM)
}

pub(crate) fn given_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, GIVEN_STREAM + i as u64)
}

pub(crate) fn given_not_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, GIVEN_NOT_STREAM + i as u64)
}

fn clean_distribution(p: &[f64]) -> Result<Vec<f64>, SchemeError> {
    if p.is_empty() || p.iter().any(|x| !x.is_finite() || *x < -1e-9) {
        return Err(SchemeError::InvalidDistribution(format!("{p:?}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SchemeError::InvalidDistribution(format!("{p:?} sums to {sum}")));
    }
    Ok(p.iter().map(|x| x.max(0.0) / sum).collect())
}

/// Multinomial counts by sequential conditional binomials.
pub fn multinomial_counts<R: Rng + ?Sized>(
    p: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>, SchemeError> {
    let p = clean_distribution(p)?;
    let mut counts = vec![0u64; p.len()];
    let mut left = shots;
    let mut mass = 1.0;
    for (k, &pk) in p.iter().enumerate() {
        if k + 1 == p.len() {
            counts[k] = left;
            break;
        }
        if left == 0 {
            break;
        }
        let ratio = if mass > 0.0 { (pk / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(left, ratio).expect("ratio lies in [0, 1]").sample(rng);
        counts[k] = draw;
        left -= draw;
        mass -= pk;
    }
    Ok(counts)
}

/// Relative frequencies of `shots` draws from `p`; deterministic in `seed`.
pub fn shot_noise_sample(p: [f64; 3], shots: u64, seed: u64) -> Result<[f64; 3], SchemeError> {
    if shots == 0 {
        return Err(SchemeError::InvalidDistribution("shots must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = multinomial_counts(&p, shots, &mut rng)?;
    Ok([0, 1, 2].map(|k| counts[k] as f64 / shots as f64))
}

/// Weights of a linear functional of the conditional distributions.
#[derive(Debug, Clone, Default)]
pub struct LinearFunctional {
    pub end: [f64; 3],
    pub given: Table,
    pub given_not: Table,
}

impl LinearFunctional {
    /// `self += c·other`.
    pub fn add_scaled(&mut self, c: f64, other: &LinearFunctional) {
        for f in 0..3 {
            self.end[f] += c * other.end[f];
            for i in 0..3 {
                self.given[i][f] += c * other.given[i][f];
                self.given_not[i][f] += c * other.given_not[i][f];
            }
        }
    }
}

impl ConditionalSet {
    /// Replaces every conditional distribution by its shot-noise estimate.
    pub fn with_shot_noise(&self, cfg: ShotConfig) -> Result<ConditionalSet, SchemeError> {
        let mut out = self.clone();
        out.end = shot_noise_sample(self.end, cfg.shots, end_seed(cfg.seed))?;
        for i in 0..3 {
            out.given[i] = shot_noise_sample(self.given[i], cfg.shots, given_seed(cfg.seed, i))?;
            // ξ̄_i is undefined when p_i = 1; its weight (1 − p_i) is then zero
            // and the exact row is kept.
            if 1.0 - self.p_init[i] >= crate::tol::COMPLEMENT {
                out.given_not[i] =
                    shot_noise_sample(self.given_not[i], cfg.shots, given_not_seed(cfg.seed, i))?;
            }
        }
        Ok(out)
    }

    /// Standard error of `Σ c·p` when each distribution is estimated from
    /// `shots` multinomial draws: `Var = Σ_d (Σ_f c_f² p_f − (Σ_f c_f p_f)²)/N`.
    pub fn stderr_of(&self, shots: u64, l: &LinearFunctional) -> f64 {
        fn var(p: &[f64; 3], c: &[f64; 3]) -> f64 {
            let m1: f64 = p.iter().zip(c).map(|(p, c)| p * c).sum();
            let m2: f64 = p.iter().zip(c).map(|(p, c)| p * c * c).sum();
            (m2 - m1 * m1).max(0.0)
        }
        let mut total = var(&self.end, &l.end);
        for i in 0..3 {
            total += var(&self.given[i], &l.given[i]) + var(&self.given_not[i], &l.given_not[i]);
        }
        (total / shots as f64).sqrt()
    }

    /// Functional for `z_{if} = ½p_i p(f|i) − ½(1 − p_i)p(f|ī) + ½p^END_f`.
    pub fn mhq_functional(&self, i: usize, f: usize) -> LinearFunctional {
        let mut l = LinearFunctional::default();
        l.given[i][f] = 0.5 * self.p_init[i];
        l.given_not[i][f] = -0.5 * (1.0 - self.p_init[i]);
        l.end[f] = 0.5;
        l
    }

    /// Binomially propagated standard errors of the reconstructed table.
    pub fn mhq_stderr(&self, shots: u64) -> Table {
        [0, 1, 2].map(|i| [0, 1, 2].map(|f| self.stderr_of(shots, &self.mhq_functional(i, f))))
    }

    /// Functional for the Margenau-Hill average work `Σ z_{if}(E_f − E_i)`.
    pub fn work_mhq_functional(&self) -> LinearFunctional {
        let mut l = LinearFunctional::default();
        for i in 0..3 {
            for f in 0..3 {
                l.add_scaled(self.e_final[f] - self.e_init[i], &self.mhq_functional(i, f));
            }
        }
        l
    }

    /// Functional for the TPM average work `Σ p_i p(f|i)(E_f − E_i)`.
    pub fn work_tpm_functional(&self) -> LinearFunctional {
        let mut l = LinearFunctional::default();
        for i in 0..3 {
            for f in 0..3 {
                l.given[i][f] = self.p_init[i] * (self.e_final[f] - self.e_init[i]);
            }
        }
        l
    }
}
