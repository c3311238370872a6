//! Dense least squares for the small design matrices of a curve fit.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of `min |A x - b|` for several right-hand sides sharing `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution {
    /// One coefficient vector per right-hand side.
    pub columns: Vec<Vec<f64>>,
    /// Numerical rank of `A`.
    pub rank: usize,
    /// Ratio of largest to smallest singular value.
    pub condition: f64,
}

impl LstsqSolution {
    pub fn rank_deficient(&self, cols: usize) -> bool {
        self.rank < cols
    }
}

/// Minimum-norm least-squares solution through the singular value
/// decomposition. Singular values below `max(m, n) * eps * sigma_max` count
/// as zero.
pub fn lstsq(a: &[f64], rows: usize, cols: usize, rhs: &[&[f64]]) -> Result<LstsqSolution> {
    if a.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            got: a.len(),
        });
    }
    for b in rhs {
        if b.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: b.len(),
            });
        }
    }
    let m = DMatrix::from_row_slice(rows, cols, a);
    let svd = m.svd(true, true);
    let sigma = &svd.singular_values;
    let s_max = sigma.max();
    let tol = rows.max(cols) as f64 * f64::EPSILON * s_max;
    let rank = sigma.iter().filter(|&&s| s > tol).count();
    let s_min = sigma.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };

    let mut columns = Vec::with_capacity(rhs.len());
    for b in rhs {
        let b = DVector::from_column_slice(b);
        let x = svd
            .solve(&b, tol)
            .map_err(|_| Error::DimensionMismatch { expected: rows, got: b.len() })?;
        columns.push(x.iter().copied().collect());
    }
    Ok(LstsqSolution {
        columns,
        rank,
        condition,
    })
}
