//! Dense linear solves backed by nalgebra's LU decomposition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol;

/// Solves `m x = b`, rejecting the result if the max-norm residual is above
/// [`tol::LINEAR_RESIDUAL`].
pub fn solve(m: &DMatrix<f64>, b: &[f64], what: &'static str) -> Result<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    let x = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::LinearSolve {
            what,
            residual: f64::INFINITY,
        })?;
    let residual = (m * &x - &rhs).amax();
    if !(residual < tol::LINEAR_RESIDUAL) {
        return Err(Error::LinearSolve { what, residual });
    }
    Ok(x.iter().copied().collect())
}

/// Solves `m x = b` for several right-hand sides sharing one factorisation.
pub fn solve_many(m: &DMatrix<f64>, rhs: &[Vec<f64>], what: &'static str) -> Result<Vec<Vec<f64>>> {
    let lu = m.clone().lu();
    rhs.iter()
        .map(|b| {
            let b = DVector::from_column_slice(b);
            let x = lu.solve(&b).ok_or(Error::LinearSolve {
                what,
                residual: f64::INFINITY,
            })?;
            let residual = (m * &x - &b).amax();
            if !(residual < tol::LINEAR_RESIDUAL) {
                return Err(Error::LinearSolve { what, residual });
            }
            Ok(x.iter().copied().collect())
        })
        .collect()
}
