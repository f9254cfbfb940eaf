//! The 8×8 matrices `Y(ω)` and the 17×17 blocks of the exceptional tube.
//!
//! A 27-vector is laid out as `(w₁₁, w₁₂[8], w₁₃[8], w₂₂, w₂₃[8], w₃₃)`,
//! i.e. indices `0`, `1..9`, `9..17`, `17`, `18..26`, `26`. The bounded-side
//! vector `ζ = (w₁, x, y, w₂, z, w₃)` uses the same layout.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{check_len, CayleyError, ONE, POLE_TOL, ZERO};
use crate::numkernel::{inverse, matrix_cayley, matrix_cayley_inv, CMatrix};

pub const EXC_VARS: usize = 27;
pub const EXC_DIM: usize = 17;

/// Signed one-based variable index of each entry of `Y(ω)`.
const Y_TABLE: [[i8; 8]; 8] = [
    [1, 2, 3, 4, 5, 6, 7, 8],
    [2, -1, -4, 3, -6, 5, 8, -7],
    [3, 4, -1, -2, -7, -8, 5, 6],
    [4, -3, 2, -1, -8, 7, -6, 5],
    [5, 6, 7, 8, -1, -2, -3, -4],
    [6, -5, 8, -7, 2, -1, 4, -3],
    [7, -8, -5, 6, 3, -4, -1, 2],
    [8, 7, -6, -5, 4, 3, -2, -1],
];

/// Integer matrix `T_j` (zero-based `j`) with `Y(ω) = Σ ωⱼ Tⱼ`.
pub fn generator_t(j: usize) -> [[i8; 8]; 8] {
    let mut t = [[0i8; 8]; 8];
    for (r, row) in Y_TABLE.iter().enumerate() {
        for (c, &e) in row.iter().enumerate() {
            if e.unsigned_abs() as usize == j + 1 {
                t[r][c] = e.signum();
            }
        }
    }
    t
}

pub fn generators_t() -> [[[i8; 8]; 8]; 8] {
    std::array::from_fn(generator_t)
}

/// Pairs `(j, k)` violating `TₖᵀTⱼ + TⱼᵀTₖ = 2δⱼₖI` in integer arithmetic.
pub fn clifford_violations() -> Vec<(usize, usize)> {
    let t = generators_t();
    let mut bad = Vec::new();
    for j in 0..8 {
        for k in 0..8 {
            let ok = (0..8).all(|a| {
                (0..8).all(|b| {
                    let s: i32 = (0..8)
                        .map(|m| {
                            t[k][m][a] as i32 * t[j][m][b] as i32
                                + t[j][m][a] as i32 * t[k][m][b] as i32
                        })
                        .sum();
                    s == if j == k && a == b { 2 } else { 0 }
                })
            });
            if !ok {
                bad.push((j, k));
            }
        }
    }
    bad
}

pub fn t_matrix(j: usize) -> CMatrix {
    let t = generator_t(j);
    CMatrix::from_fn(8, 8, |r, c| C64::new(t[r][c] as f64, 0.0))
}

/// `Y(ω)` for `ω ∈ ℂ⁸`.
pub fn build_y(w: &[C64]) -> CMatrix {
    assert_eq!(w.len(), 8, "Y(ω) needs 8 entries");
    CMatrix::from_fn(8, 8, |r, c| {
        let e = Y_TABLE[r][c];
        let v = w[e.unsigned_abs() as usize - 1];
        if e < 0 {
            -v
        } else {
            v
        }
    })
}

/// `[[s, uᵀ, vᵀ], [u, t₁I₈, Yb], [v, Ybᵀ, t₂I₈]]`.
pub fn omega_blk(s: C64, u: &[C64], v: &[C64], t1: C64, yb: &CMatrix, t2: C64) -> CMatrix {
    let mut m = CMatrix::zeros(EXC_DIM, EXC_DIM);
    m[(0, 0)] = s;
    for i in 0..8 {
        m[(0, 1 + i)] = u[i];
        m[(1 + i, 0)] = u[i];
        m[(0, 9 + i)] = v[i];
        m[(9 + i, 0)] = v[i];
        m[(1 + i, 1 + i)] = t1;
        m[(9 + i, 9 + i)] = t2;
        for j in 0..8 {
            m[(1 + i, 9 + j)] = yb[(i, j)];
            m[(9 + j, 1 + i)] = yb[(i, j)];
        }
    }
    m
}

struct Parts<'a> {
    w11: C64,
    w12: &'a [C64],
    w13: &'a [C64],
    w22: C64,
    w23: &'a [C64],
    w33: C64,
}

fn parts(w: &[C64]) -> Parts<'_> {
    Parts {
        w11: w[0],
        w12: &w[1..9],
        w13: &w[9..17],
        w22: w[17],
        w23: &w[18..26],
        w33: w[26],
    }
}

/// The three 17×17 summands `Ω₁(w), Ω₂(w), Ω₃(w)`.
///
/// `Ω₃` uses the off-diagonal block `Y(w₁₂)T₁`; with that block its
/// positivity verdict agrees with `Ω₁` and `Ω₂`.
pub fn build_omega(w: &[C64]) -> Result<[CMatrix; 3], CayleyError> {
    check_len(w, EXC_VARS)?;
    let p = parts(w);
    let t1 = t_matrix(0);
    let o1 = omega_blk(p.w11, p.w12, p.w13, p.w22, &build_y(p.w23), p.w33);
    let o2 = omega_blk(p.w22, p.w12, p.w23, p.w11, &(&t1 * &build_y(p.w13)), p.w33);
    let o3 = omega_blk(p.w33, p.w23, p.w13, p.w22, &(&build_y(p.w12) * &t1), p.w11);
    Ok([o1, o2, o3])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSelector {
    One,
    Two,
    Three,
    /// `Ω₁ ⊕ Ω₂ ⊕ Ω₃`.
    All,
}

impl OmegaSelector {
    pub fn dim(self) -> usize {
        match self {
            OmegaSelector::All => 3 * EXC_DIM,
            _ => EXC_DIM,
        }
    }

    pub fn select(self, w: &[C64]) -> Result<CMatrix, CayleyError> {
        let [a, b, c] = build_omega(w)?;
        Ok(match self {
            OmegaSelector::One => a,
            OmegaSelector::Two => b,
            OmegaSelector::Three => c,
            OmegaSelector::All => CMatrix::block_diag(&[a, b, c]),
        })
    }
}

/// `X = [[w, ψᵀ], [ψ, Z - ψψᵀ/(1-w)]]`.
pub fn assemble_x(w: C64, psi: &[C64], z: &CMatrix) -> Result<CMatrix, CayleyError> {
    let m = psi.len();
    if z.rows() != m || z.cols() != m {
        return Err(CayleyError::DimMismatch {
            expected: m,
            got: z.rows(),
        });
    }
    let den = ONE - w;
    if den.norm() < POLE_TOL {
        return Err(CayleyError::PoleAtOne);
    }
    Ok(CMatrix::from_fn(m + 1, m + 1, |r, c| match (r, c) {
        (0, 0) => w,
        (0, c) => psi[c - 1],
        (r, 0) => psi[r - 1],
        (r, c) => z[(r - 1, c - 1)] - psi[r - 1] * psi[c - 1] / den,
    }))
}

/// `X(ζ)`: `Ω₁(ζ)` minus the rank-one correction `vvᵀ/(1-w₁)`, `v = (0, x, y)`.
pub fn build_x_zeta(zeta: &[C64]) -> Result<CMatrix, CayleyError> {
    check_len(zeta, EXC_VARS)?;
    let o1 = build_omega(zeta)?[0].clone();
    let z = o1.block(1, 1, 16, 16);
    assemble_x(zeta[0], &zeta[1..17], &z)
}

/// Closed form of `φ(X)` for `X` assembled by [`assemble_x`].
pub fn block_cayley_2x2(w: C64, psi: &[C64], z: &CMatrix) -> Result<CMatrix, CayleyError> {
    let m = psi.len();
    if z.rows() != m || z.cols() != m {
        return Err(CayleyError::DimMismatch {
            expected: m,
            got: z.rows(),
        });
    }
    let den = ONE - w;
    if den.norm() < POLE_TOL {
        return Err(CayleyError::PoleAtOne);
    }
    let i = C64::new(0.0, 1.0);
    let r = inverse(&(&CMatrix::identity(m) - z)).map_err(super::pencil)?;
    let rpsi: Vec<C64> = (0..m)
        .map(|a| (0..m).map(|b| r[(a, b)] * psi[b]).sum())
        .collect();
    let psir: Vec<C64> = (0..m)
        .map(|b| (0..m).map(|a| psi[a] * r[(a, b)]).sum())
        .collect();
    let quad: C64 = psi.iter().zip(&rpsi).map(|(a, b)| a * b).sum();
    let fz = matrix_cayley(z)?;
    let corner = 2.0 * i / den;
    Ok(CMatrix::from_fn(m + 1, m + 1, |a, b| match (a, b) {
        (0, 0) => i * (ONE + w) / den + corner / den * quad,
        (0, b) => corner * psir[b - 1],
        (a, 0) => corner * rpsi[a - 1],
        (a, b) => fz[(a - 1, b - 1)],
    }))
}

/// Reads the 27 coordinates of a matrix in the `Ω₁` pattern.
/// Returns the coordinates and `max|W - Ω₁(read)|`.
pub fn read_t27_pattern(w: &CMatrix) -> Result<(Vec<C64>, f64), CayleyError> {
    if w.rows() != EXC_DIM || w.cols() != EXC_DIM {
        return Err(CayleyError::DimMismatch {
            expected: EXC_DIM,
            got: w.rows(),
        });
    }
    let mut out = vec![ZERO; EXC_VARS];
    out[0] = w[(0, 0)];
    for i in 0..8 {
        out[1 + i] = (w[(0, 1 + i)] + w[(1 + i, 0)]) / 2.0;
        out[9 + i] = (w[(0, 9 + i)] + w[(9 + i, 0)]) / 2.0;
        out[18 + i] = w[(1, 9 + i)];
    }
    out[17] = (1..9).map(|i| w[(i, i)]).sum::<C64>() / 8.0;
    out[26] = (9..17).map(|i| w[(i, i)]).sum::<C64>() / 8.0;
    let residual = w.max_abs_diff(&build_omega(&out)?[0]);
    Ok((out, residual))
}

/// `η(w)`: the `ζ` with `X(ζ) = φ⁻¹(Ω₁(w))`, plus the pattern residual
/// `max|φ⁻¹(Ω₁(w)) - X(ζ)|`.
pub fn eta(w: &[C64]) -> Result<(Vec<C64>, f64), CayleyError> {
    check_len(w, EXC_VARS)?;
    let x = matrix_cayley_inv(&build_omega(w)?[0])?;
    let w1 = x[(0, 0)];
    let den = ONE - w1;
    if den.norm() < POLE_TOL {
        return Err(CayleyError::PoleAtOne);
    }
    let v: Vec<C64> = (0..17)
        .map(|i| {
            if i == 0 {
                ZERO
            } else {
                (x[(0, i)] + x[(i, 0)]) / 2.0
            }
        })
        .collect();
    let lifted = CMatrix::from_fn(EXC_DIM, EXC_DIM, |a, b| {
        if a == 0 || b == 0 {
            x[(a, b)]
        } else {
            x[(a, b)] + v[a] * v[b] / den
        }
    });
    let (zeta, _) = read_t27_pattern(&lifted)?;
    let residual = x.max_abs_diff(&build_x_zeta(&zeta)?);
    Ok((zeta, residual))
}

/// `η⁻¹(ζ)`: the coordinates of `φ(X(ζ))`, plus the pattern residual.
pub fn eta_inv(zeta: &[C64]) -> Result<(Vec<C64>, f64), CayleyError> {
    let f = matrix_cayley(&build_x_zeta(zeta)?)?;
    read_t27_pattern(&f)
}
