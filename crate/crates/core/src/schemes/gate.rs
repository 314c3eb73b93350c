use std::f64::consts::PI;

use super::SchemeError;
use crate::model::KET_ZERO;
use crate::qmath::{cis, norm2, Operator, C64};
use crate::tol;

/// Special-unitary gate `R` with `R Ξ R† = |0⟩⟨0|` for a rank-one projector `Ξ`.
///
/// Built as the Householder reflection that sends the projector's vector to
/// `|0⟩`, multiplied by `e^{jπ/d}` to bring its determinant from −1 to +1.
pub fn gate_to_zero(xi: &Operator) -> Result<Operator, SchemeError> {
    let n = xi.dim();
    let tr = xi.trace();
    if !xi.is_projector() || (tr.re - 1.0).abs() > tol::PROJECTOR {
        return Err(SchemeError::NotRankOne);
    }
    // Any nonzero column of |v⟩⟨v| is v up to a scalar; take the largest.
    let col = (0..n)
        .map(|j| xi.column(j))
        .max_by(|a, b| norm2(a).total_cmp(&norm2(b)))
        .expect("dimension is positive");
    let len = norm2(&col);
    let v: Vec<C64> = col.iter().map(|x| x / len).collect();

    let pivot = v[KET_ZERO];
    let phase = if pivot.norm() > 0.0 { pivot / pivot.norm() } else { C64::new(1.0, 0.0) };
    let mut w = v;
    w[KET_ZERO] += phase;
    let w_norm_sq: f64 = w.iter().map(|x| x.norm_sqr()).sum();

    let reflection = Operator::from_fn(n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        C64::new(id, 0.0) - w[i] * w[j].conj() * (2.0 / w_norm_sq)
    });
    Ok(reflection.scale(cis(PI / n as f64)))
}
