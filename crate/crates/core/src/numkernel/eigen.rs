use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{require_square, CMatrix, LinalgError, DEFAULT_HERM_TOL, MAX_JACOBI_SWEEPS};

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HermEigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the unit eigenvector for `eigenvalues[j]`.
    pub eigenvectors: CMatrix,
    /// `max_j ‖A v_j - λ_j v_j‖` against the input matrix.
    pub residual: f64,
}

/// Cyclic complex Jacobi. Fails with `NotHermitian` when
/// `‖A - A*‖_F > tol · ‖A‖_F`.
pub fn herm_eigs(a: &CMatrix, tol: f64) -> Result<HermEigenResult, LinalgError> {
    let n = require_square(a)?;
    let scale = a.norm_fro();
    let asym = (a - &a.adjoint()).norm_fro();
    if asym > tol * scale {
        return Err(LinalgError::NotHermitian {
            asym: if scale > 0.0 { asym / scale } else { asym },
        });
    }
    let mut m = a.re_part();
    let mut v = CMatrix::identity(n);
    jacobi(&mut m, &mut v, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let mut residual: f64 = 0.0;
    for (c, &lam) in eigenvalues.iter().enumerate() {
        let col = eigenvectors.column(c);
        let av = a.matvec(&col);
        let r = av
            .iter()
            .zip(&col)
            .map(|(x, y)| (x - y * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r);
    }
    Ok(HermEigenResult {
        eigenvalues,
        eigenvectors,
        residual,
    })
}

fn off_norm_sq(m: &CMatrix, n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi(m: &mut CMatrix, v: &mut CMatrix, n: usize) -> Result<(), LinalgError> {
    let total = m.norm_fro();
    if total == 0.0 || n < 2 {
        return Ok(());
    }
    let target = (f64::EPSILON * total).powi(2);
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_norm_sq(m, n) <= target {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(m, v, n, p, q);
            }
        }
    }
    if off_norm_sq(m, n) <= target * 1e4 {
        return Ok(());
    }
    Err(LinalgError::NoConvergence {
        sweeps: MAX_JACOBI_SWEEPS,
    })
}

/// Annihilates `m[p][q]` with `G = D R`, where `D` removes the phase of the
/// pivot and `R` is the classical real rotation.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, n: usize, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = C64::new(0.0, 0.0);
        m[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();
    // Columns p, q of G.
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = e * (-s);
    let g_qq = e * c;
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * g_pp + akq * g_qp;
        m[(k, q)] = akp * g_pq + akq * g_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        m[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
}

/// Eigenvalues only, symmetrising the input first (no symmetry check).
pub fn herm_eigvals(a: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    Ok(herm_eigs(&a.re_part(), DEFAULT_HERM_TOL)?.eigenvalues)
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eig(a: &CMatrix) -> Result<f64, LinalgError> {
    let ev = herm_eigvals(a)?;
    Ok(ev.first().copied().unwrap_or(f64::INFINITY))
}

/// Largest singular value, `sqrt(λ_max(A* A))`.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    // Work with the smaller Gram matrix.
    let g = if a.rows() < a.cols() {
        a * &a.adjoint()
    } else {
        &a.adjoint() * a
    };
    match herm_eigvals(&g) {
        Ok(ev) => ev.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}
