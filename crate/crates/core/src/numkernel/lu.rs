use num_complex::Complex64 as C64;

use super::{require_square, CMatrix, LinalgError, COND_CAP, PIVOT_TOL};

/// Partial-pivot LU factorisation `P A = L U`, packed in one matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    /// Smallest pivot modulus relative to `‖A‖∞`.
    pub min_rel_pivot: f64,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self, LinalgError> {
        let n = require_square(a)?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.norm_inf();
        let mut min_rel_pivot = f64::INFINITY;
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            min_rel_pivot = min_rel_pivot.min(if scale > 0.0 { best / scale } else { 0.0 });
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let p = lu[(k, k)];
            if p == C64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / p;
                lu[(i, k)] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        if n == 0 {
            min_rel_pivot = 1.0;
        }
        Ok(Lu {
            lu,
            perm,
            sign,
            min_rel_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn det(&self) -> C64 {
        let mut d = C64::new(self.sign, 0.0);
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        d
    }

    pub fn is_singular(&self) -> bool {
        self.min_rel_pivot < PIVOT_TOL
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix, LinalgError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinalgError::Shape(format!(
                "right-hand side has {} rows, expected {n}",
                b.rows()
            )));
        }
        if self.is_singular() {
            return Err(LinalgError::Singular {
                cond: f64::INFINITY,
            });
        }
        let mut x = CMatrix::zeros(n, b.cols());
        let mut y = vec![C64::new(0.0, 0.0); n];
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = b[(self.perm[i], c)];
                for (j, yj) in y.iter().enumerate().take(i) {
                    s -= self.lu[(i, j)] * yj;
                }
                y[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Determinant by partial-pivot LU; triangular inputs use the diagonal
/// product directly so they are exact.
pub fn det(a: &CMatrix) -> C64 {
    assert!(a.is_square(), "det of a non-square matrix");
    if a.is_upper_triangular() || a.is_lower_triangular() {
        return (0..a.rows()).map(|i| a[(i, i)]).product();
    }
    Lu::new(a)
        .map(|lu| lu.det())
        .unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// Solves `A X = B`, rejecting singular or badly conditioned `A`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    let lu = Lu::new(a)?;
    lu.solve(b)
}

/// Inverse with the default condition cap.
pub fn inverse(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    inverse_with(a, COND_CAP)
}

/// Inverse failing when `‖A‖₁‖A^{-1}‖₁ > cond_cap`.
pub fn inverse_with(a: &CMatrix, cond_cap: f64) -> Result<CMatrix, LinalgError> {
    let n = require_square(a)?;
    let lu = Lu::new(a)?;
    let inv = lu.solve(&CMatrix::identity(n))?;
    let cond = a.norm_one() * inv.norm_one();
    if !cond.is_finite() || cond > cond_cap {
        return Err(LinalgError::Singular { cond });
    }
    Ok(inv)
}
