//! Cayley-type transforms and the structured matrices they act on.
//!
//! Scalar and matrix Cayley maps, the Lie-ball/Lorentz-tube maps `Φₙ`, the
//! skew-symmetric map `ψ`, the exceptional 27-variable blocks, and the
//! [`StructureMap`] family used by pencils.

mod exceptional;
mod structure;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numkernel::{inverse, matrix_cayley, CMatrix, LinalgError};

pub use exceptional::{
    assemble_x, block_cayley_2x2, build_omega, build_x_zeta, build_y, clifford_violations, eta,
    eta_inv, generator_t, generators_t, omega_blk, read_t27_pattern, t_matrix, OmegaSelector,
    EXC_DIM, EXC_VARS,
};
pub use structure::{skew_coords, skew_from_coords, CartanBlock, CartanKind, StructureMap};

/// Distance to a pole below which a rational map is reported as undefined.
pub const POLE_TOL: f64 = 1e-12;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CayleyError {
    #[error("point lies on a pole of the map")]
    Pole,
    #[error("first coordinate is too close to 1")]
    PoleAtOne,
    #[error("element is not invertible (u₁² - Σuⱼ² = 0)")]
    NotInvertible,
    #[error("matrix is not skew-symmetric (asymmetry {asym:.3e})")]
    NotSkew { asym: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("matrix does not carry the expected block pattern (residual {residual:.3e})")]
    PatternViolation { residual: f64 },
    #[error("structure map is not linear in its variables")]
    NotLinear,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_len(v: &[C64], n: usize) -> Result<(), CayleyError> {
    if v.len() == n {
        Ok(())
    } else {
        Err(CayleyError::DimMismatch {
            expected: n,
            got: v.len(),
        })
    }
}

/// `φ(z) = i(1+z)/(1-z)`.
pub fn phi(z: C64) -> Result<C64, CayleyError> {
    if (ONE - z).norm() < POLE_TOL {
        return Err(CayleyError::Pole);
    }
    Ok(I * (ONE + z) / (ONE - z))
}

/// `φ⁻¹(w) = (w-i)/(w+i)`.
pub fn phi_inv(w: C64) -> Result<C64, CayleyError> {
    if (w + I).norm() < POLE_TOL {
        return Err(CayleyError::Pole);
    }
    Ok((w - I) / (w + I))
}

/// Element of `ℂⁿ` under the spin-factor product
/// `(uv)₁ = Σ uⱼvⱼ`, `(uv)ⱼ = u₁vⱼ + uⱼv₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanVector(pub Vec<C64>);

impl JordanVector {
    /// The neutral element `e = (1, 0, …, 0)`.
    pub fn unit(n: usize) -> Self {
        let mut v = vec![ZERO; n];
        v[0] = ONE;
        JordanVector(v)
    }

    /// Basis vector `f_j` (zero-based index).
    pub fn basis(n: usize, j: usize) -> Self {
        let mut v = vec![ZERO; n];
        v[j] = ONE;
        JordanVector(v)
    }

    pub fn mul(&self, other: &JordanVector) -> JordanVector {
        let (u, v) = (&self.0, &other.0);
        assert_eq!(u.len(), v.len(), "length mismatch in Jordan product");
        let mut out = Vec::with_capacity(u.len());
        out.push(u.iter().zip(v).map(|(a, b)| a * b).sum());
        for j in 1..u.len() {
            out.push(u[0] * v[j] + u[j] * v[0]);
        }
        JordanVector(out)
    }

    /// `u₁² - u₂² - … - uₙ²`.
    pub fn quadratic_form(&self) -> C64 {
        self.0[0] * self.0[0] - self.0[1..].iter().map(|x| x * x).sum::<C64>()
    }

    pub fn inv(&self) -> Result<JordanVector, CayleyError> {
        let q = self.quadratic_form();
        if q.norm() < POLE_TOL {
            return Err(CayleyError::NotInvertible);
        }
        let mut out: Vec<C64> = self.0.iter().map(|x| -x / q).collect();
        out[0] = self.0[0] / q;
        Ok(JordanVector(out))
    }

    pub fn scale(&self, s: C64) -> JordanVector {
        JordanVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &JordanVector) -> JordanVector {
        JordanVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

fn sum_sq(v: &[C64]) -> C64 {
    v.iter().map(|x| x * x).sum()
}

/// `Φₙ(z) = (i(1 - Σzⱼ²), 2z₂, …, 2zₙ) / ((1-z₁)² + Σ_{j≥2} zⱼ²)`.
pub fn phi_n(z: &[C64]) -> Result<Vec<C64>, CayleyError> {
    if z.is_empty() {
        return Err(CayleyError::DimMismatch {
            expected: 1,
            got: 0,
        });
    }
    let tail = sum_sq(&z[1..]);
    let d = (ONE - z[0]).powu(2) + tail;
    if d.norm() < POLE_TOL {
        return Err(CayleyError::Pole);
    }
    let mut w = Vec::with_capacity(z.len());
    w.push(I * (ONE - z[0] * z[0] - tail) / d);
    w.extend(z[1..].iter().map(|x| 2.0 * x / d));
    Ok(w)
}

/// `Φₙ⁻¹(w) = (1 + w₁² - Σ_{j≥2} wⱼ², -2w₂, …, -2wₙ) / ((w₁+i)² - Σ_{j≥2} wⱼ²)`.
pub fn phi_n_inv(w: &[C64]) -> Result<Vec<C64>, CayleyError> {
    if w.is_empty() {
        return Err(CayleyError::DimMismatch {
            expected: 1,
            got: 0,
        });
    }
    let tail = sum_sq(&w[1..]);
    let d = (w[0] + I).powu(2) - tail;
    if d.norm() < POLE_TOL {
        return Err(CayleyError::Pole);
    }
    let mut z = Vec::with_capacity(w.len());
    z.push((ONE + w[0] * w[0] - tail) / d);
    z.extend(w[1..].iter().map(|x| -2.0 * x / d));
    Ok(z)
}

/// `Φₙ` through the Jordan product: `i·[-(ie + iž)(iž - ie)⁻¹]` with
/// `ž = (z₁, -iz₂, …, -izₙ)`.
pub fn phi_n_jordan(z: &[C64]) -> Result<Vec<C64>, CayleyError> {
    let n = z.len();
    let mut zc = z.to_vec();
    for x in zc.iter_mut().skip(1) {
        *x *= -I;
    }
    let zc = JordanVector(zc);
    let e = JordanVector::unit(n);
    let num = e.add(&zc).scale(I);
    let den = zc.add(&e.scale(-ONE)).scale(I);
    let v = num.mul(&den.inv().map_err(|_| CayleyError::Pole)?);
    Ok(v.0.iter().map(|x| -I * x).collect())
}

/// `P(z₁, z₂) = [[z₁, -z₂], [z₂, z₁]]`.
pub fn build_p2(z1: C64, z2: C64) -> CMatrix {
    CMatrix::new(2, 2, vec![z1, -z2, z2, z1]).expect("finite entries")
}

/// Result of linking `Φ₂` to the matrix Cayley transform of `P(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Phi2Link {
    pub w: [C64; 2],
    /// `max |φ(P(z)) - [[w₁, -iw₂], [iw₂, w₁]]|`.
    pub residual: f64,
}

pub fn phi2_pencil_link(z1: C64, z2: C64) -> Result<Phi2Link, CayleyError> {
    let f = matrix_cayley(&build_p2(z1, z2))?;
    let w = phi_n(&[z1, z2])?;
    let residual = f.max_abs_diff(&build_w(&w));
    Ok(Phi2Link {
        w: [w[0], w[1]],
        residual,
    })
}

/// `W(w)`: `w₁` on the diagonal, first row `-iwⱼ`, first column `iwⱼ`.
pub fn build_w(w: &[C64]) -> CMatrix {
    let n = w.len();
    CMatrix::from_fn(n, n, |r, c| match (r, c) {
        (r, c) if r == c => w[0],
        (0, c) => -I * w[c],
        (r, 0) => I * w[r],
        _ => ZERO,
    })
}

/// `Q(z) = φ⁻¹(W(Φₙ(z)))`, assembled from its closed form.
pub fn build_q(z: &[C64]) -> Result<CMatrix, CayleyError> {
    let n = z.len();
    let den = ONE - z[0];
    if den.norm() < POLE_TOL {
        return Err(CayleyError::PoleAtOne);
    }
    let tail = sum_sq(&z[1..]);
    Ok(CMatrix::from_fn(n, n, |r, c| match (r, c) {
        (0, 0) => z[0],
        (0, c) => -z[c],
        (r, 0) => z[r],
        (r, c) if r == c => z[0] - (tail - z[r] * z[r]) / den,
        (r, c) => z[r] * z[c] / den,
    }))
}

/// `(S_r(z), T_r(z))`; `T_1 = Q(z)P₊(z)` as polynomials.
pub fn build_sr_tr(z: &[C64], r: f64) -> (CMatrix, CMatrix) {
    let n = z.len();
    let rz = C64::new(r, 0.0) - z[0];
    let tail = sum_sq(&z[1..]);
    let s = CMatrix::from_fn(n, n, |a, b| match (a, b) {
        (0, 0) => ONE,
        (a, b) if a == b => rz,
        _ => ZERO,
    });
    let t = CMatrix::from_fn(n, n, |a, b| match (a, b) {
        (0, 0) => z[0],
        (0, b) => -z[b] * rz,
        (a, 0) => z[a],
        (a, b) if a == b => z[0] * rz - (tail - z[a] * z[a]),
        (a, b) => z[a] * z[b],
    });
    (s, t)
}

/// `(P₊(z), P₋(z))` with `P₊ = 1 ⊕ (1-z₁)I` and `P₋ = Q(z)P₊(z)`, both polynomial.
pub fn build_ppm(z: &[C64]) -> (CMatrix, CMatrix) {
    build_sr_tr(z, 1.0)
}

/// `M(z) = ‖z‖²I + zz* - z̄zᵀ`.
pub fn build_m(z: &[C64]) -> CMatrix {
    let n = z.len();
    let nz: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    CMatrix::from_fn(n, n, |a, b| {
        let d = if a == b { C64::new(nz, 0.0) } else { ZERO };
        d + z[a] * z[b].conj() - z[a].conj() * z[b]
    })
}

/// `J = [[0, I], [-I, 0]]` of size `2n`.
pub fn symplectic_j(n: usize) -> CMatrix {
    CMatrix::from_fn(2 * n, 2 * n, |a, b| {
        if b == a + n {
            ONE
        } else if a == b + n {
            -ONE
        } else {
            ZERO
        }
    })
}

/// Skewness residual `max|Z + Zᵀ|` relative to `max(1, max|Z|)`.
pub fn skew_residual(z: &CMatrix) -> f64 {
    (z + &z.transpose()).max_abs() / z.max_abs().max(1.0)
}

fn require_skew(z: &CMatrix) -> Result<usize, CayleyError> {
    if !z.is_square() || !z.rows().is_multiple_of(2) {
        return Err(CayleyError::DimMismatch {
            expected: z.rows() + z.rows() % 2,
            got: z.cols(),
        });
    }
    let asym = skew_residual(z);
    if asym > 1e-10 {
        return Err(CayleyError::NotSkew { asym });
    }
    Ok(z.rows() / 2)
}

/// `ψ(Z) = i(-J + Z)(I - JZ)⁻¹` on skew-symmetric `Z`.
pub fn psi(z: &CMatrix) -> Result<CMatrix, CayleyError> {
    let n = require_skew(z)?;
    let j = symplectic_j(n);
    let id = CMatrix::identity(2 * n);
    let inv = inverse(&(&id - &(&j * z))).map_err(pencil)?;
    Ok((&(z - &j) * &inv).scale(I))
}

/// `ψ⁻¹(W) = (iI + WJ)⁻¹(W + iJ)`.
pub fn psi_inv(w: &CMatrix) -> Result<CMatrix, CayleyError> {
    let n = require_skew(w)?;
    let j = symplectic_j(n);
    let id = CMatrix::identity(2 * n);
    let inv = inverse(&(&id.scale(I) + &(w * &j))).map_err(pencil)?;
    Ok(&inv * &(w + &j.scale(I)))
}

fn pencil(e: LinalgError) -> CayleyError {
    match e {
        LinalgError::Singular { cond } => CayleyError::Linalg(LinalgError::SingularPencil { cond }),
        other => CayleyError::Linalg(other),
    }
}

#[cfg(test)]
mod tests;
