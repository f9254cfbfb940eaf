//! Dense complex linear algebra.
//!
//! Everything here is a pure function of its inputs. Tolerances are explicit
//! parameters; the `DEFAULT_*` constants are the values used when a caller
//! has no reason to pick its own.

mod eigen;
mod lu;
mod matrix;

use std::ops::Range;

use num_complex::Complex64 as C64;
use thiserror::Error;

pub use eigen::{herm_eigs, herm_eigvals, min_eig, op_norm, HermEigenResult};
pub use lu::{det, inverse, inverse_with, solve, Lu};
pub use matrix::{CMatrix, MatrixJson};

/// Relative symmetry tolerance accepted by [`herm_eigs`].
pub const DEFAULT_HERM_TOL: f64 = 1e-10;
/// Pivots below `PIVOT_TOL * ‖A‖∞` count as zero.
pub const PIVOT_TOL: f64 = 1e-13;
/// Inversions with a 1-norm condition estimate above this fail.
pub const COND_CAP: f64 = 1e12;
/// Sweep limit for the Jacobi eigen-solver.
pub const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative asymmetry {asym:.3e})")]
    NotHermitian { asym: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is singular or ill-conditioned (condition estimate {cond:.3e})")]
    Singular { cond: f64 },
    #[error("singular pencil in Cayley transform (condition estimate {cond:.3e})")]
    SingularPencil { cond: f64 },
    #[error("the eliminated block is singular")]
    SingularBlock,
}

pub(crate) fn require_square(a: &CMatrix) -> Result<usize, LinalgError> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}

fn pencil_error(e: LinalgError) -> LinalgError {
    match e {
        LinalgError::Singular { cond } => LinalgError::SingularPencil { cond },
        other => other,
    }
}

/// `φ(X) = i (I + X)(I - X)^{-1}`.
pub fn matrix_cayley(x: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = require_square(x)?;
    let id = CMatrix::identity(n);
    let inv = inverse(&(&id - x)).map_err(pencil_error)?;
    Ok((&id + x).scale(C64::new(0.0, 1.0)) * inv)
}

/// `φ^{-1}(W) = (W - iI)(W + iI)^{-1}`.
pub fn matrix_cayley_inv(w: &CMatrix) -> Result<CMatrix, LinalgError> {
    let n = require_square(w)?;
    let ii = CMatrix::identity(n).scale(C64::new(0.0, 1.0));
    let inv = inverse(&(w + &ii)).map_err(pencil_error)?;
    Ok((w - &ii) * inv)
}

/// Schur complement `A - B D^{-1} C` where `D` is the principal block on the
/// indices in `eliminate` and `A` the principal block on the rest.
pub fn schur_complement(m: &CMatrix, eliminate: Range<usize>) -> Result<CMatrix, LinalgError> {
    let n = require_square(m)?;
    if eliminate.end > n || eliminate.start > eliminate.end {
        return Err(LinalgError::Shape(format!(
            "block {eliminate:?} outside a {n}x{n} matrix"
        )));
    }
    let keep: Vec<usize> = (0..n).filter(|i| !eliminate.contains(i)).collect();
    let elim: Vec<usize> = eliminate.collect();
    let a = m.submatrix(&keep, &keep);
    if elim.is_empty() {
        return Ok(a);
    }
    let b = m.submatrix(&keep, &elim);
    let c = m.submatrix(&elim, &keep);
    let d = m.submatrix(&elim, &elim);
    let dinv_c = solve(&d, &c).map_err(|_| LinalgError::SingularBlock)?;
    Ok(&a - &(&b * &dinv_c))
}

/// Positive definiteness by the smallest Hermitian eigenvalue.
pub fn is_positive_definite(a: &CMatrix, margin: f64) -> Result<bool, LinalgError> {
    Ok(min_eig(a)? > margin)
}

/// `‖A‖₁ · ‖A^{-1}‖₁`, or infinity when `A` is singular.
pub fn condition_estimate(a: &CMatrix) -> f64 {
    match inverse_with(a, f64::INFINITY) {
        Ok(inv) => a.norm_one() * inv.norm_one(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests;
