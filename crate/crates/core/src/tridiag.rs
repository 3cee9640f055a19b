//! Symmetric tridiagonal kernels: elimination and inertia counts.

use crate::error::{Error, Result};

/// Solves `T x = rhs` for the symmetric tridiagonal `T` with diagonal `diag`
/// and off-diagonal `off` (`off[i]` couples rows `i` and `i+1`).
///
/// Plain Thomas elimination; every pivot must satisfy
/// `|pivot| ≥ 1e−14 · (row scale)`.
pub fn solve(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n.max(1));
    debug_assert_eq!(rhs.len(), n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    for i in 0..n {
        let scale = diag[i].abs()
            + if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        if i > 0 {
            pivot = diag[i] - off[i - 1] * c[i - 1];
        }
        if !(pivot.abs() >= 1e-14 * scale) || !pivot.is_finite() {
            return Err(Error::Singular { row: i, pivot });
        }
        c[i] = if i + 1 < n { off[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - if i > 0 { off[i - 1] * d[i - 1] } else { 0.0 }) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Number of negative pivots in the `LDLᵀ` factorization of the symmetric
/// tridiagonal matrix with the given diagonal, i.e. its negative inertia.
pub fn negative_count(diag: impl Fn(usize) -> f64, off: &[f64], n: usize) -> usize {
    let mut count = 0;
    let mut q = 0.0;
    for i in 0..n {
        q = if i == 0 {
            diag(0)
        } else {
            let prev = if q == 0.0 { f64::MIN_POSITIVE * 1e10 } else { q };
            diag(i) - off[i - 1] * off[i - 1] / prev
        };
        if q < 0.0 {
            count += 1;
        }
    }
    count
}
