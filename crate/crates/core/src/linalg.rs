//! Thin wrappers around faer's dense complex decompositions.

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `log det` kept as modulus and phase so large or tiny determinants do not overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_modulus: f64,
    pub phase: f64,
}

impl LogDet {
    pub fn value(&self) -> Complex64 {
        if self.log_modulus == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_modulus.exp(), self.phase)
    }
}

fn check_finite(m: MatRef<'_, Complex64>, what: &'static str) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(what));
            }
        }
    }
    Ok(())
}

fn permutation_is_odd(forward: &[usize]) -> bool {
    let mut seen = vec![false; forward.len()];
    let mut transpositions = 0usize;
    for start in 0..forward.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = forward[i];
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 1
}

/// Determinant through partially pivoted LU, accumulating logarithms of the pivots.
pub fn log_det(m: MatRef<'_, Complex64>) -> Result<LogDet> {
    assert_eq!(m.nrows(), m.ncols());
    check_finite(m, "determinant input")?;
    if m.nrows() == 0 {
        return Ok(LogDet { log_modulus: 0.0, phase: 0.0 });
    }
    let lu = m.partial_piv_lu();
    let u = lu.U();
    let mut log_modulus = 0.0;
    let mut phase = 0.0;
    for i in 0..u.nrows() {
        let p = u[(i, i)];
        let a = p.norm();
        if a == 0.0 {
            return Ok(LogDet { log_modulus: f64::NEG_INFINITY, phase: 0.0 });
        }
        log_modulus += a.ln();
        phase += p.arg();
    }
    if permutation_is_odd(lu.P().arrays().0) {
        phase += std::f64::consts::PI;
    }
    if !log_modulus.is_finite() {
        return Err(Error::NonFinite("log determinant"));
    }
    Ok(LogDet { log_modulus, phase: phase.rem_euclid(2.0 * std::f64::consts::PI) })
}

/// Singular values in non-increasing order.
pub fn singular_values(m: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    check_finite(m, "singular value input")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    m.singular_values().map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Smallest singular value and its right singular vector.
pub fn smallest_singular_pair(m: MatRef<'_, Complex64>) -> Result<(f64, Vec<Complex64>)> {
    check_finite(m, "singular value input")?;
    let svd = m.svd().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let k = s.nrows() - 1;
    let v = svd.V();
    Ok((s[k].re, (0..v.nrows()).map(|i| v[(i, k)]).collect()))
}

/// `I + m` for a square matrix.
pub fn identity_plus(m: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| if i == j { m[(i, j)] + 1.0 } else { m[(i, j)] })
}
