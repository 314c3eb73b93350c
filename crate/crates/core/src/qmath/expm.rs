use super::{cis, herm_eig, Operator, QMathError};

/// `exp(-j·t·M)` for Hermitian `M`, built from its spectral decomposition.
pub fn unitary_exp(m: &Operator, t: f64) -> Result<Operator, QMathError> {
    if t == 0.0 {
        m.require_hermitian()?;
        return Ok(Operator::identity(m.dim()));
    }
    let es = herm_eig(m)?;
    Ok(es.spectral_map(|lambda| cis(-lambda * t)))
}
