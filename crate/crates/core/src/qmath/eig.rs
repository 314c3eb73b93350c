//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use std::cmp::Ordering;

use super::{cis, Operator, QMathError, C64};
use crate::tol;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
///
/// Each eigenvector carries a fixed phase: its largest-magnitude component
/// is real and positive (the first such component on exact ties). Eigenvalues
/// that agree to within [`tol::EIGEN_TIE`] are reported at their mean and
/// ordered by the lexicographic order of their gauge-fixed vectors, so
/// identical input always produces identical output.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector belonging to `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `|v_k⟩⟨v_k|`.
    pub fn projector(&self, k: usize) -> Operator {
        Operator::ket_bra(&self.vectors[k])
    }

    /// `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> C64) -> Operator {
        let n = self.dim();
        let mut out = Operator::zeros(n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            for i in 0..n {
                let wi = w * v[i];
                for j in 0..n {
                    out[(i, j)] += wi * v[j].conj();
                }
            }
        }
        out
    }

    /// `Σ_k λ_k |v_k⟩⟨v_k|`.
    pub fn reconstruct(&self) -> Operator {
        self.spectral_map(|l| C64::new(l, 0.0))
    }
}

/// Diagonalizes a Hermitian operator.
pub fn herm_eig(m: &Operator) -> Result<EigenSystem, QMathError> {
    m.require_hermitian()?;
    let n = m.dim();
    // Symmetrize exactly so the rotations never see a stray anti-Hermitian part.
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    let mut v = Operator::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= f64::EPSILON * 1e-2 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut col = v.column(k);
            fix_phase(&mut col);
            (a[(k, k)].re, col)
        })
        .collect();

    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let tie = tol::EIGEN_TIE * (1.0 + scale);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= tie {
            end += 1;
        }
        if end - start > 1 {
            // A tied group is reported at its mean so the values stay sorted
            // after reordering by eigenvector.
            let group = &mut pairs[start..end];
            let mean = group.iter().map(|p| p.0).sum::<f64>() / group.len() as f64;
            group.iter_mut().for_each(|p| p.0 = mean);
            group.sort_by(|x, y| lexicographic(&x.1, &y.1));
        }
        start = end;
    }

    let (values, vectors) = pairs.into_iter().unzip();
    Ok(EigenSystem { values, vectors })
}

fn off_diagonal_norm(a: &Operator) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `J = P·R`, where `P` rephases column `q` so the pivot
/// becomes real and `R` is the classical real Jacobi rotation.
fn rotate(a: &mut Operator, v: &mut Operator, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = cis(-apq.arg());
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    // signum(0) is +1 in Rust, so θ = 0 gives the 45° rotation as intended.
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.dim();

    // A ← A·J and V ← V·J
    for k in 0..n {
        for m in [&mut *a, &mut *v] {
            let xp = m[(k, p)];
            let xq = m[(k, q)];
            m[(k, p)] = xp * c - xq * phase * s;
            m[(k, q)] = xp * s + xq * phase * c;
        }
    }
    // A ← J†·A
    let phase_c = phase.conj();
    for k in 0..n {
        let xp = a[(p, k)];
        let xq = a[(q, k)];
        a[(p, k)] = xp * c - xq * phase_c * s;
        a[(q, k)] = xp * s + xq * phase_c * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Rotates `v` so that its largest-magnitude component is real-positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|x| x.norm() >= max * (1.0 - 1e-9)).unwrap_or(0);
    let rot = v[pivot].conj() / v[pivot].norm();
    for x in v.iter_mut() {
        *x *= rot;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::testutil::*;
    use crate::qmath::{inner, norm2, re};

    fn check_system(m: &Operator, es: &EigenSystem) {
        let norm = m.frobenius_norm();
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
        for (lambda, vec) in es.values.iter().zip(&es.vectors) {
            let mv = m.apply(vec).unwrap();
            let resid: Vec<C64> = mv.iter().zip(vec).map(|(a, b)| a - b * lambda).collect();
            assert!(norm2(&resid) <= tol::EIGEN_RESIDUAL * norm.max(1e-300), "residual {}", norm2(&resid));
        }
        for i in 0..es.dim() {
            for j in 0..es.dim() {
                let ip = inner(&es.vectors[i], &es.vectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - re(expect)).norm() <= 1e-10);
            }
        }
        assert!(es.reconstruct().max_abs_diff(m) <= 1e-10 * (1.0 + norm));
    }

    #[test]
    fn diagonal_input_gives_permuted_identity() {
        let m = Operator::diag_real(&[1.0, 0.0, -1.0]);
        let es = herm_eig(&m).unwrap();
        assert_eq!(es.values, vec![-1.0, 0.0, 1.0]);
        assert_eq!(es.vectors[0], vec![re(0.0), re(0.0), re(1.0)]);
        assert_eq!(es.vectors[1], vec![re(0.0), re(1.0), re(0.0)]);
        assert_eq!(es.vectors[2], vec![re(1.0), re(0.0), re(0.0)]);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = rng(11);
        for _ in 0..1000 {
            let m = random_hermitian(&mut rng, 3, 5.0);
            let es = herm_eig(&m).unwrap();
            check_system(&m, &es);
        }
    }

    #[test]
    fn larger_dimensions_work_too() {
        let mut rng = rng(12);
        for dim in [1, 2, 4, 6] {
            let m = random_hermitian(&mut rng, dim, 1.0);
            check_system(&m, &herm_eig(&m).unwrap());
        }
    }

    #[test]
    fn gauge_puts_largest_component_on_real_axis() {
        let mut rng = rng(3);
        let m = random_hermitian(&mut rng, 3, 1.0);
        for v in herm_eig(&m).unwrap().vectors {
            let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let pivot = v.iter().find(|x| x.norm() >= max * (1.0 - 1e-9)).unwrap();
            assert_eq!(pivot.im, 0.0);
            assert!(pivot.re > 0.0);
        }
    }

    #[test]
    fn degenerate_spectrum_is_deterministic() {
        // Eigenvalues (2, 2, -1): the repeated pair must come out identically
        // on every call.
        let v = [re(1.0 / 3f64.sqrt()), C64::new(0.0, 1.0 / 3f64.sqrt()), re(1.0 / 3f64.sqrt())];
        let p = Operator::ket_bra(&v);
        let m = &Operator::identity(3).scale_real(2.0) - &p.scale_real(3.0);
        let first = herm_eig(&m).unwrap();
        check_system(&m, &first);
        for _ in 0..5 {
            assert_eq!(herm_eig(&m).unwrap(), first);
        }
        assert!((first.values[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_perturbations_leave_the_decomposition_alone() {
        let mut rng = rng(99);
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, 3, 1.0);
            let d = random_hermitian(&mut rng, 3, 1e-15);
            let a = herm_eig(&m).unwrap();
            let b = herm_eig(&(&m + &d)).unwrap();
            for k in 0..3 {
                assert!((a.values[k] - b.values[k]).abs() < 1e-12);
                // same vector up to a global phase
                assert!((inner(&a.vectors[k], &b.vectors[k]).norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = Operator::identity(3);
        m[(0, 1)] = re(1.0);
        assert!(matches!(herm_eig(&m), Err(QMathError::NonHermitianInput { .. })));
        let mut bad = Operator::identity(3);
        bad[(1, 1)] = re(f64::NAN);
        assert_eq!(herm_eig(&bad), Err(QMathError::NonFinite));
    }

    #[test]
    fn zero_matrix() {
        let es = herm_eig(&Operator::zeros(3)).unwrap();
        assert_eq!(es.values, vec![0.0; 3]);
        check_system(&Operator::zeros(3), &es);
    }
}
