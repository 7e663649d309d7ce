//! Dense least-squares fitting on sampled function values.

use crate::error::Error;
use nalgebra::{DMatrix, DVector};

/// Result of a least-squares solve `min ‖A c − y‖₂`.
#[derive(Debug, Clone)]
pub struct LsFit {
    pub coeffs: Vec<f64>,
    /// Numerical rank at the relative threshold used by the solve.
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl LsFit {
    pub fn full_rank(&self) -> bool {
        self.rank == self.coeffs.len()
    }
}

/// Relative singular-value cutoff: columns are treated as dependent when the
/// spectrum drops by ten orders of magnitude.
const RANK_CUTOFF: f64 = 1e-10;

/// Solve `min ‖A c − y‖₂` by SVD, where `A`'s columns are the sampled basis
/// functions. Rank-deficient systems return the minimum-norm solution with
/// `rank` reporting the deficiency.
pub fn least_squares(columns: &[Vec<f64>], rhs: &[f64]) -> crate::Result<LsFit> {
    let ncols = columns.len();
    let nrows = rhs.len();
    if ncols == 0 || nrows == 0 {
        return Err(Error::Precondition("empty least-squares system".to_string()));
    }
    if columns.iter().any(|c| c.len() != nrows) {
        return Err(Error::Precondition(
            "least-squares column length mismatch".to_string(),
        ));
    }
    if nrows < ncols {
        return Err(Error::Precondition(format!(
            "least-squares system underdetermined: {nrows} rows, {ncols} columns"
        )));
    }
    let a = DMatrix::from_fn(nrows, ncols, |i, j| columns[j][i]);
    let y = DVector::from_column_slice(rhs);
    let svd = a.svd(true, true);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let eps = singular_values[0] * RANK_CUTOFF;
    let rank = singular_values.iter().filter(|&&s| s > eps).count();
    let coeffs = svd
        .solve(&y, eps)
        .map_err(|e| Error::Precondition(format!("SVD solve failed: {e}")))?;
    Ok(LsFit {
        coeffs: coeffs.iter().copied().collect(),
        rank,
        singular_values,
    })
}
