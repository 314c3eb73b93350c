//! Dense complex linear algebra for small Hermitian and unitary matrices.
//!
//! The dimension is a runtime value, but every physical object in this crate
//! is 3×3. Nothing here is tuned for large matrices.

mod eig;
mod expm;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

pub use eig::{herm_eig, EigenSystem};
pub use expm::unitary_exp;

use crate::tol;

/// Errors raised by the linear-algebra kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QMathError {
    #[error("operator is not Hermitian (max |M - M†| = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("non-finite entry in operator")]
    NonFinite,
}

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `e^{jθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// A `dim × dim` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds an operator from nested rows. Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), dim, "row {i} has length {} (expected {dim})", row.len());
            row[j]
        })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| re(rows[i].as_ref()[j]))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        m
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        assert_eq!(v.len(), w.len(), "outer product of vectors with different lengths");
        Self::from_fn(v.len(), |i, j| v[i] * w[j].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn ket_bra(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(re(c))
    }

    /// `a·A + b·B`.
    pub fn mix(a: C64, lhs: &Operator, b: C64, rhs: &Operator) -> Result<Self, QMathError> {
        check_dims(lhs.dim, rhs.dim)?;
        Ok(Self {
            dim: lhs.dim,
            data: lhs.data.iter().zip(&rhs.data).map(|(&x, &y)| a * x + b * y).collect(),
        })
    }

    pub fn checked_mul(&self, rhs: &Operator) -> Result<Self, QMathError> {
        check_dims(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// `Tr[A·B]` without forming the product.
    pub fn trace_product(&self, rhs: &Operator) -> Result<C64, QMathError> {
        check_dims(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * rhs.data[k * n + i];
            }
        }
        Ok(acc)
    }

    /// `A·v`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>, QMathError> {
        check_dims(self.dim, v.len())?;
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect())
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, rhs: &Operator) -> Result<Self, QMathError> {
        let ab = self.checked_mul(rhs)?;
        let ba = rhs.checked_mul(self)?;
        Ok(&ab - &ba)
    }

    /// `U·A·U†`.
    pub fn conjugate_by(&self, u: &Operator) -> Result<Self, QMathError> {
        u.checked_mul(self)?.checked_mul(&u.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Operator) -> f64 {
        assert_eq!(self.dim, rhs.dim, "max_abs_diff on operators of different dimension");
        self.data.iter().zip(&rhs.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= tol::HERMITIAN * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().checked_mul(self).expect("square").max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= tol::UNITARY
    }

    /// Hermitian, idempotent and of trace 1 or 2 (rank one or its complement).
    pub fn is_projector(&self) -> bool {
        if !self.is_hermitian() {
            return false;
        }
        let sq = self.checked_mul(self).expect("square");
        if sq.max_abs_diff(self) > tol::PROJECTOR {
            return false;
        }
        let tr = self.trace();
        tr.im.abs() <= tol::PROJECTOR
            && [1.0, 2.0].iter().any(|&r| (tr.re - r).abs() <= tol::PROJECTOR)
    }

    /// Rejects NaN/Inf and, when asked, non-Hermitian input.
    pub(crate) fn require_hermitian(&self) -> Result<(), QMathError> {
        if !self.is_finite() {
            return Err(QMathError::NonFinite);
        }
        if !self.is_hermitian() {
            return Err(QMathError::NonHermitianInput { deviation: self.hermiticity_defect() });
        }
        Ok(())
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), QMathError> {
    if left == right {
        Ok(())
    } else {
        Err(QMathError::DimensionMismatch { left, right })
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

// The operator-overload forms panic on a dimension mismatch; use the
// `checked_*` methods where the dimensions are not known statically.
impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.checked_mul(rhs).expect("operator dimensions must agree")
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        Operator::mix(re(1.0), self, re(1.0), rhs).expect("operator dimensions must agree")
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        Operator::mix(re(1.0), self, re(-1.0), rhs).expect("operator dimensions must agree")
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for x in self.row(i) {
                write!(f, "{:>+.6}{:>+.6}i  ", x.re, x.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Euclidean norm of a complex vector.
pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product of vectors with different lengths");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A unit-norm pure state `|ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket(Vec<C64>);

impl Ket {
    /// Wraps `amps` if its norm is one within [`tol::STATE_NORM`].
    pub fn new(amps: Vec<C64>) -> Option<Self> {
        ((norm2(&amps) - 1.0).abs() <= tol::STATE_NORM).then_some(Self(amps))
    }

    /// Rescales `amps` to unit norm; `None` for the zero vector.
    pub fn normalized(amps: Vec<C64>) -> Option<Self> {
        let n = norm2(&amps);
        if !(n > 0.0 && n.is_finite()) {
            return None;
        }
        Some(Self(amps.into_iter().map(|x| x / n).collect()))
    }

    /// The computational basis state `|k⟩` of a `dim`-level system.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = re(1.0);
        Self(v)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> Operator {
        Operator::ket_bra(&self.0)
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_prob(&self, other: &[C64]) -> f64 {
        inner(&self.0, other).norm_sqr()
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, a: &Operator) -> C64 {
        inner(&self.0, &a.apply(&self.0).expect("state and operator dimensions must agree"))
    }

    /// `A|ψ⟩`, which stays normalized only when `A` is unitary.
    pub fn evolve(&self, u: &Operator) -> Self {
        Self(u.apply(&self.0).expect("state and operator dimensions must agree"))
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_operator(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Operator {
        Operator::from_fn(dim, |_, _| {
            C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
        })
    }

    pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Operator {
        let a = random_operator(rng, dim, scale);
        (&a + &a.adjoint()).scale_real(0.5)
    }
}
