//! Two scalar facts used by the diagonal-measure argument, exposed as numeric
//! checks: the operator-convexity bound for averages and the double-average
//! defect bound.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Smallest eigenvalue of `(1/n)Σ|A_k|² − |(1/n)ΣA_k|²`, where `|A|² = A*A`.
///
/// The operator inequality says this is never negative.
pub fn psd_average_bound_defect(mats: &[ComplexMatrix]) -> Result<f64> {
    let first = mats.first().ok_or(Error::EmptyInput("psd_average_bound_defect"))?;
    let dim = first.rows();
    for a in mats {
        if !a.is_square() || a.rows() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: a.rows().max(a.cols()) });
        }
    }
    let weight = Complex64::new(1.0 / mats.len() as f64, 0.0);
    let mut mean = ComplexMatrix::zeros(dim, dim);
    let mut mean_sq = ComplexMatrix::zeros(dim, dim);
    for a in mats {
        mean.axpy(weight, a);
        mean_sq.axpy(weight, &(&a.adjoint() * a));
    }
    let gap = &mean_sq - &(&mean.adjoint() * &mean);
    Ok(gap.hermitian_eigenvalues().first().copied().unwrap_or(0.0))
}

fn check_length(seq: &[Complex64], n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || seq.len() < n + m {
        return Err(Error::InsufficientLength { len: seq.len(), n, m });
    }
    Ok(())
}

/// `|(1/(MN)) Σ_{n'<N} Σ_{m'<M} a_{m'+n'} − (1/N) Σ_{n'<N} a_{n'}|`.
pub fn double_average_defect(seq: &[Complex64], n: usize, m: usize) -> Result<f64> {
    check_length(seq, n, m)?;
    let mut double = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..m {
            double += seq[i + j];
        }
    }
    let double = double / (n * m) as f64;
    let single: Complex64 = seq[..n].iter().sum::<Complex64>() / n as f64;
    Ok((double - single).norm())
}

/// `((M−1)(M+2)/(MN)) · sup_k |a_k|`.
pub fn double_average_bound(seq: &[Complex64], n: usize, m: usize) -> Result<f64> {
    check_length(seq, n, m)?;
    let sup = seq.iter().map(|a| a.norm()).fold(0.0, f64::max);
    Ok(((m - 1) * (m + 2)) as f64 / (m * n) as f64 * sup)
}
