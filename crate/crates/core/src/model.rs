//! Physical ingredients of the driven spin qutrit.
//!
//! Matrix indices follow the spin projections `(|+1⟩, |0⟩, |−1⟩)` as
//! `(0, 1, 2)`. Energy labels follow the instantaneous eigenvalues in
//! descending order, `(+, 0, −)`, so table cell `[2][0]` is always the
//! `− → +` transition.
//!
//! Units: `ħ = 1`, time in µs, frequencies and energies in rad/µs.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qmath::{cis, herm_eig, re, Ket, Operator, QMathError, C64};
use crate::tol;

/// Hilbert-space dimension of the qutrit.
pub const DIM: usize = 3;

/// Matrix index of `|+1⟩`.
pub const KET_PLUS_ONE: usize = 0;
/// Matrix index of `|0⟩`, the state the optical readout reports on.
pub const KET_ZERO: usize = 1;
/// Matrix index of `|−1⟩`.
pub const KET_MINUS_ONE: usize = 2;

/// Converts an ordinary frequency in MHz to an angular frequency in rad/µs.
pub fn angular_from_mhz(mhz: f64) -> f64 {
    TAU * mhz
}

/// How a frequency written in a config file maps to rad/µs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FrequencyUnit {
    /// Already angular, rad/µs.
    #[serde(rename = "angular_rad_per_us")]
    AngularRadPerUs,
    /// Ordinary frequency in MHz, multiplied by 2π.
    #[default]
    #[serde(rename = "mhz_times_2pi")]
    MhzTimes2pi,
    /// MHz taken as rad/µs without the 2π factor.
    #[serde(rename = "mhz_plain")]
    MhzPlain,
}

impl FrequencyUnit {
    pub fn to_angular(self, x: f64) -> f64 {
        match self {
            FrequencyUnit::MhzTimes2pi => angular_from_mhz(x),
            FrequencyUnit::AngularRadPerUs | FrequencyUnit::MhzPlain => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid drive parameters: {0}")]
    InvalidParams(String),
    #[error("Gell-Mann index {0} is not supported (expected 1, 2, 6 or 7)")]
    UnsupportedIndex(u8),
    #[error("spectrum is nearly degenerate (gap {gap:.3e} vs norm {norm:.3e}); energy labels are unstable")]
    NearDegenerateSpectrum { gap: f64, norm: f64 },
    #[error("invalid initial state: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Math(#[from] QMathError),
}

/// Energy label of an instantaneous eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "-")]
    Minus,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Plus, Label::Zero, Label::Minus];

    pub fn index(self) -> usize {
        match self {
            Label::Plus => 0,
            Label::Zero => 1,
            Label::Minus => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Label::Plus => "+",
            Label::Zero => "0",
            Label::Minus => "-",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Rabi frequencies and phase sweep rates of the two microwave drives.
///
/// Drive 1 couples `|0⟩ ↔ |+1⟩`, drive 2 couples `|0⟩ ↔ |−1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub omega1: f64,
    pub omega2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl DriveParams {
    pub fn new(omega1: f64, omega2: f64, phi1: f64, phi2: f64) -> Result<Self, ModelError> {
        let p = Self { omega1, omega2, phi1, phi2 };
        p.validate()?;
        Ok(p)
    }

    /// Equal Rabi frequencies and equal phase rates.
    pub fn equal(omega: f64, phi: f64) -> Result<Self, ModelError> {
        Self::new(omega, omega, phi, phi)
    }

    /// The NV-centre drive: `Ω = 2π·2.219 MHz`, `φ = 1.09·Ω` on both
    /// transitions.
    pub fn nv_reference() -> Self {
        let omega = angular_from_mhz(2.219);
        Self { omega1: omega, omega2: omega, phi1: 1.09 * omega, phi2: 1.09 * omega }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [self.omega1, self.omega2, self.phi1, self.phi2];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::InvalidParams(format!("non-finite value in {self:?}")));
        }
        if self.omega1 <= 0.0 || self.omega2 <= 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "Rabi frequencies must be positive (omega1 = {}, omega2 = {})",
                self.omega1, self.omega2
            )));
        }
        Ok(())
    }

    pub fn has_equal_phases(&self) -> bool {
        self.phi1 == self.phi2
    }

    /// `√((Ω₁² + Ω₂²)/2)`: the instantaneous eigenvalues are `(+Ω_eff, 0, −Ω_eff)`.
    pub fn omega_eff(&self) -> f64 {
        ((self.omega1 * self.omega1 + self.omega2 * self.omega2) / 2.0).sqrt()
    }
}

/// The Gell-Mann matrices `λ₁, λ₂, λ₆, λ₇`, the only ones the drive uses.
pub fn gell_mann(k: u8) -> Result<Operator, ModelError> {
    let o = re(0.0);
    let l = re(1.0);
    let i = C64::new(0.0, 1.0);
    let rows = match k {
        1 => [[o, l, o], [l, o, o], [o, o, o]],
        2 => [[o, -i, o], [i, o, o], [o, o, o]],
        6 => [[o, o, o], [o, o, l], [o, l, o]],
        7 => [[o, o, o], [o, o, -i], [o, i, o]],
        _ => return Err(ModelError::UnsupportedIndex(k)),
    };
    Ok(Operator::from_rows(&rows))
}

/// Spin-1 transition operators for the two drives.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub sx1: Operator,
    pub sy1: Operator,
    pub sx2: Operator,
    pub sy2: Operator,
    /// `|+1⟩⟨+1|`
    pub sz1: Operator,
    /// `−|−1⟩⟨−1|`
    pub sz2: Operator,
}

pub fn spin_ops() -> SpinOps {
    let gm = |k| gell_mann(k).expect("supported index").scale_real(FRAC_1_SQRT_2);
    SpinOps {
        sx1: gm(1),
        sy1: gm(2),
        sx2: gm(6),
        sy2: gm(7),
        sz1: Operator::diag_real(&[1.0, 0.0, 0.0]),
        sz2: Operator::diag_real(&[0.0, 0.0, -1.0]),
    }
}

/// Rotating-frame Hamiltonian
/// `H(t) = Ω₁(Sx1 cos φ₁t + Sy1 sin φ₁t) + Ω₂(Sx2 cos φ₂t − Sy2 sin φ₂t)`.
pub fn hamiltonian_rot(t: f64, params: &DriveParams) -> Operator {
    // Entry form of the expression above: H[0][1] = (Ω₁/√2)e^{−jφ₁t},
    // H[2][1] = (Ω₂/√2)e^{−jφ₂t}, Hermitian partners, zero diagonal.
    let mut h = Operator::zeros(DIM);
    let a = cis(-params.phi1 * t) * (params.omega1 * FRAC_1_SQRT_2);
    let b = cis(-params.phi2 * t) * (params.omega2 * FRAC_1_SQRT_2);
    h[(KET_PLUS_ONE, KET_ZERO)] = a;
    h[(KET_ZERO, KET_PLUS_ONE)] = a.conj();
    h[(KET_MINUS_ONE, KET_ZERO)] = b;
    h[(KET_ZERO, KET_MINUS_ONE)] = b.conj();
    h
}

/// Generator `D = φ₁|+1⟩⟨+1| + φ₂|−1⟩⟨−1|` of the frame in which the drive
/// is static: `H(t) = e^{−jtD} H(0) e^{+jtD}`.
pub fn frame_generator(params: &DriveParams) -> Operator {
    Operator::diag_real(&[params.phi1, 0.0, params.phi2])
}

/// Time-independent Hamiltonian `H̃ = Ω₁Sx1 − φ₁Sz1 + Ω₂Sx2 + φ₂Sz2`.
pub fn hamiltonian_tilde(params: &DriveParams) -> Operator {
    let s = spin_ops();
    let mut h = s.sx1.scale_real(params.omega1);
    h = &h - &s.sz1.scale_real(params.phi1);
    h = &h + &s.sx2.scale_real(params.omega2);
    &h + &s.sz2.scale_real(params.phi2)
}

/// Instantaneous eigenbasis of `H(t)` labelled `(+, 0, −)`.
#[derive(Debug, Clone)]
pub struct EnergyBasis {
    pub t: f64,
    /// Eigenvalues in descending order.
    pub energies: [f64; 3],
    /// Unit eigenvectors. Each is rephased so its `|+1⟩` amplitude is
    /// real-positive; when that amplitude vanishes the eigensolver's gauge is
    /// kept.
    pub vectors: [Vec<C64>; 3],
    /// `Ξ_k = |E_k⟩⟨E_k|`.
    pub projectors: [Operator; 3],
}

impl EnergyBasis {
    /// Diagonalizes an arbitrary 3×3 Hermitian operator into labelled levels.
    pub fn from_hamiltonian(t: f64, h: &Operator) -> Result<Self, ModelError> {
        let es = herm_eig(h)?;
        let norm = h.frobenius_norm();
        let gap = es.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap < tol::NEAR_DEGENERATE_GAP * norm || norm == 0.0 {
            return Err(ModelError::NearDegenerateSpectrum { gap, norm });
        }
        let energies = [es.values[2], es.values[1], es.values[0]];
        let vectors = [2, 1, 0].map(|k| {
            let mut v = es.vectors[k].clone();
            let lead = v[KET_PLUS_ONE];
            if lead.norm() > 1e-9 {
                let rot = lead.conj() / lead.norm();
                v.iter_mut().for_each(|x| *x *= rot);
                v[KET_PLUS_ONE] = re(v[KET_PLUS_ONE].re);
            }
            v
        });
        let projectors = [0, 1, 2].map(|k| Operator::ket_bra(&vectors[k]));
        Ok(Self { t, energies, vectors, projectors })
    }

    pub fn projector(&self, label: Label) -> &Operator {
        &self.projectors[label.index()]
    }

    pub fn vector(&self, label: Label) -> &[C64] {
        &self.vectors[label.index()]
    }

    pub fn energy(&self, label: Label) -> f64 {
        self.energies[label.index()]
    }
}

/// `herm_eig(H(t))` repackaged with `(+, 0, −)` labels.
pub fn energy_basis(t: f64, params: &DriveParams) -> Result<EnergyBasis, ModelError> {
    EnergyBasis::from_hamiltonian(t, &hamiltonian_rot(t, params))
}

/// `|ξ⟩ = Σ_i √p_i e^{2πj a_i} |E_i(0)⟩` with `i` running over `(+, 0, −)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialStateSpec {
    /// Populations of `|E_+(0)⟩, |E_0(0)⟩, |E_−(0)⟩`; renormalized on use.
    pub p: [f64; 3],
    /// Phases in cycles.
    pub a: [f64; 3],
}

impl InitialStateSpec {
    /// The state prepared in the NV-centre experiment. Its populations sum to
    /// 1.0001 and are renormalized on use.
    pub fn nv_reference() -> Self {
        Self { p: [0.7654, 0.0009, 0.2338], a: [0.0073, 0.2787, 0.0002] }
    }

    pub fn raw_sum(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.p.iter().chain(&self.a).any(|x| !x.is_finite()) {
            return Err(ModelError::InvalidSpec("non-finite population or phase".into()));
        }
        if let Some(bad) = self.p.iter().find(|&&x| x < 0.0) {
            return Err(ModelError::InvalidSpec(format!("negative population {bad}")));
        }
        if self.raw_sum() <= 0.0 {
            return Err(ModelError::InvalidSpec("populations sum to zero".into()));
        }
        Ok(())
    }

    /// Populations divided by their sum.
    pub fn normalized_p(&self) -> Result<[f64; 3], ModelError> {
        self.validate()?;
        let s = self.raw_sum();
        Ok(self.p.map(|x| x / s))
    }
}

/// Builds `|ξ⟩` on the `t = 0` energy basis.
pub fn initial_state(spec: &InitialStateSpec, basis0: &EnergyBasis) -> Result<Ket, ModelError> {
    let p = spec.normalized_p()?;
    let mut amps = vec![re(0.0); DIM];
    for k in 0..DIM {
        let c = cis(2.0 * PI * spec.a[k]) * p[k].sqrt();
        for (x, v) in amps.iter_mut().zip(&basis0.vectors[k]) {
            *x += c * v;
        }
    }
    Ok(Ket::normalized(amps).expect("populations sum to one"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::unitary_exp;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(rng: &mut ChaCha8Rng) -> DriveParams {
        DriveParams::new(
            rng.random_range(1.0..120.0),
            rng.random_range(1.0..120.0),
            rng.random_range(-200.0..200.0),
            rng.random_range(-200.0..200.0),
        )
        .unwrap()
    }

    #[test]
    fn gell_mann_entries() {
        let l1 = gell_mann(1).unwrap();
        assert_eq!(l1, Operator::from_real_rows(&[[0., 1., 0.], [1., 0., 0.], [0., 0., 0.]]));
        let l7 = gell_mann(7).unwrap();
        let i = C64::new(0.0, 1.0);
        let o = re(0.0);
        assert_eq!(l7, Operator::from_rows(&[[o, o, o], [o, o, -i], [o, i, o]]));
        for k in [1, 2, 6, 7] {
            let l = gell_mann(k).unwrap();
            assert!(l.is_hermitian());
            assert_eq!(l.trace(), re(0.0));
            assert_eq!((&l * &l).trace(), re(2.0));
        }
        assert_eq!(gell_mann(3), Err(ModelError::UnsupportedIndex(3)));
    }

    #[test]
    fn spin_operator_entries() {
        let s = spin_ops();
        assert!((s.sx1[(0, 1)] - re(FRAC_1_SQRT_2)).norm() < 1e-16);
        assert_eq!(s.sz2, Operator::diag_real(&[0.0, 0.0, -1.0]));
        // [Sx1, Sy1] = j·diag(1, −1, 0)
        let comm = s.sx1.commutator(&s.sy1).unwrap();
        let expect = Operator::diag(&[C64::new(0.0, 1.0), C64::new(0.0, -1.0), re(0.0)]);
        assert!(comm.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn hamiltonian_matches_spin_operator_form() {
        let s = spin_ops();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let t = rng.random_range(-1.0..1.0);
            let (c1, s1) = ((p.phi1 * t).cos(), (p.phi1 * t).sin());
            let (c2, s2) = ((p.phi2 * t).cos(), (p.phi2 * t).sin());
            let drive1 = &s.sx1.scale_real(c1) + &s.sy1.scale_real(s1);
            let drive2 = &s.sx2.scale_real(c2) - &s.sy2.scale_real(s2);
            let expect = &drive1.scale_real(p.omega1) + &drive2.scale_real(p.omega2);
            assert!(hamiltonian_rot(t, &p).max_abs_diff(&expect) <= 1e-12);
        }
    }

    #[test]
    fn hamiltonian_at_zero_time() {
        let omega = 3.0;
        let p = DriveParams::equal(omega, 5.0).unwrap();
        let k = omega * FRAC_1_SQRT_2;
        let expect = Operator::from_real_rows(&[[0., k, 0.], [k, 0., k], [0., k, 0.]]);
        assert!(hamiltonian_rot(0.0, &p).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn hamiltonian_is_a_frame_rotation_of_its_initial_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let t = rng.random_range(-0.5..0.5);
            let v = unitary_exp(&frame_generator(&p), t).unwrap();
            let expect = hamiltonian_rot(0.0, &p).conjugate_by(&v).unwrap();
            assert!(hamiltonian_rot(t, &p).max_abs_diff(&expect) <= 1e-12);
        }
    }

    #[test]
    fn equal_drive_spectrum_is_plus_zero_minus_omega() {
        let p = DriveParams::nv_reference();
        let omega = p.omega1;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let t = rng.random_range(0.0..3.0);
            let b = energy_basis(t, &p).unwrap();
            assert!((b.energies[0] - omega).abs() <= 1e-10);
            assert!(b.energies[1].abs() <= 1e-10);
            assert!((b.energies[2] + omega).abs() <= 1e-10);
        }
    }

    #[test]
    fn energy_basis_is_complete_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let t = rng.random_range(0.0..2.0);
            let b = energy_basis(t, &p).unwrap();
            let h = hamiltonian_rot(t, &p);
            let mut sum = Operator::zeros(3);
            for k in 0..3 {
                sum = &sum + &b.projectors[k];
                for l in 0..3 {
                    let prod = &b.projectors[k] * &b.projectors[l];
                    let expect = if k == l { b.projectors[k].clone() } else { Operator::zeros(3) };
                    assert!(prod.max_abs_diff(&expect) <= 1e-10);
                }
                let e = b.projectors[k].trace_product(&h).unwrap();
                assert!((e.re - b.energies[k]).abs() <= 1e-9);
            }
            assert!(sum.max_abs_diff(&Operator::identity(3)) <= 1e-10);
            let w = p.omega_eff();
            assert!((b.energies[0] - w).abs() <= 1e-9 && (b.energies[2] + w).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_level_projector_is_static_for_equal_drives() {
        let p = DriveParams::nv_reference();
        let expect = Operator::from_real_rows(&[[0.5, 0., -0.5], [0., 0., 0.], [-0.5, 0., 0.5]]);
        for k in 0..50 {
            let b = energy_basis(0.013 * k as f64, &p).unwrap();
            assert!(b.projector(Label::Zero).max_abs_diff(&expect) <= 1e-10);
        }
    }

    #[test]
    fn closed_form_bright_states_are_eigenvectors() {
        // ½(|+1⟩ ± √2 e^{jφt}|0⟩ + |−1⟩) with eigenvalue ±Ω.
        let p = DriveParams::nv_reference();
        let (omega, phi) = (p.omega1, p.phi1);
        for k in 0..20 {
            let t = 0.01 * k as f64;
            let h = hamiltonian_rot(t, &p);
            for sign in [1.0, -1.0] {
                let v = [re(0.5), cis(phi * t) * (sign * FRAC_1_SQRT_2), re(0.5)];
                let hv = h.apply(&v).unwrap();
                let resid: f64 =
                    hv.iter().zip(&v).map(|(a, b)| (a - b * (sign * omega)).norm_sqr()).sum();
                assert!(resid.sqrt() <= 1e-10);
                assert!((crate::qmath::norm2(&v) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hamiltonian_is_periodic_for_equal_phases() {
        let p = DriveParams::equal(2.0, 7.5).unwrap();
        let period = TAU / 7.5;
        for k in 0..30 {
            let t = 0.037 * k as f64;
            assert!(hamiltonian_rot(t, &p).max_abs_diff(&hamiltonian_rot(t + period, &p)) <= 1e-10);
        }
    }

    #[test]
    fn tilde_hamiltonian() {
        let p0 = DriveParams::new(2.0, 3.0, 0.0, 0.0).unwrap();
        assert!(hamiltonian_tilde(&p0).max_abs_diff(&hamiltonian_rot(0.0, &p0)) < 1e-15);
        let p = DriveParams::new(2.0, 3.0, 0.7, -1.3).unwrap();
        let h = hamiltonian_tilde(&p);
        assert_eq!([h[(0, 0)].re, h[(1, 1)].re, h[(2, 2)].re], [-0.7, 0.0, 1.3]);
        assert_eq!(h, &hamiltonian_rot(0.0, &p) - &frame_generator(&p));
    }

    #[test]
    fn tilde_spectrum_matches_characteristic_polynomial() {
        // Equal drives: det(H̃ − λ) = −(λ + φ)(λ² + φλ − Ω²), so the roots are
        // −φ and (−φ ± √(φ² + 4Ω²))/2.
        for &(omega, phi) in &[(1.0, 0.3), (13.9, 15.2), (5.0, -8.0), (2.0, 0.0)] {
            let p = DriveParams::equal(omega, phi).unwrap();
            let es = herm_eig(&hamiltonian_tilde(&p)).unwrap();
            let disc = (phi * phi + 4.0 * omega * omega).sqrt();
            let mut roots = [-phi, (-phi + disc) / 2.0, (-phi - disc) / 2.0];
            roots.sort_by(f64::total_cmp);
            for (a, b) in es.values.iter().zip(roots) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + omega + phi.abs()));
            }
        }
    }

    #[test]
    fn initial_state_reproduces_populations() {
        let p = DriveParams::nv_reference();
        let b0 = energy_basis(0.0, &p).unwrap();
        let spec = InitialStateSpec::nv_reference();
        let xi = initial_state(&spec, &b0).unwrap();
        let rho = xi.density();
        assert!((rho.trace() - re(1.0)).norm() <= 1e-12);
        let probs: Vec<f64> = b0.projectors.iter().map(|pi| rho.trace_product(pi).unwrap().re).collect();
        assert!((probs[2] - 0.2338 / 1.0001).abs() <= 1e-10);
        let norm = spec.normalized_p().unwrap();
        for k in 0..3 {
            assert!((probs[k] - norm[k]).abs() <= 1e-10);
        }
        // tomography in the H(0) basis: |ρ_if| = √(p_i p_f)
        for i in 0..3 {
            for f in 0..3 {
                let elem = crate::qmath::inner(&b0.vectors[i], &rho.apply(&b0.vectors[f]).unwrap());
                assert!((elem.norm() - (norm[i] * norm[f]).sqrt()).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn single_component_state_is_the_eigenprojector() {
        let p = DriveParams::nv_reference();
        let b0 = energy_basis(0.0, &p).unwrap();
        let spec = InitialStateSpec { p: [1.0, 0.0, 0.0], a: [0.3, 0.1, 0.9] };
        let rho = initial_state(&spec, &b0).unwrap().density();
        assert!(rho.max_abs_diff(b0.projector(Label::Plus)) <= 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(DriveParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(DriveParams::new(1.0, f64::NAN, 0.0, 0.0).is_err());
        let bad = InitialStateSpec { p: [0.5, -0.1, 0.6], a: [0.0; 3] };
        let b0 = energy_basis(0.0, &DriveParams::nv_reference()).unwrap();
        assert!(matches!(initial_state(&bad, &b0), Err(ModelError::InvalidSpec(_))));
    }

    #[test]
    fn degenerate_spectrum_is_flagged() {
        let h = Operator::diag_real(&[1.0, 1.0, -1.0]);
        assert!(matches!(
            EnergyBasis::from_hamiltonian(0.0, &h),
            Err(ModelError::NearDegenerateSpectrum { .. })
        ));
    }
}
