//! Pointwise checks of the identities linking bounded-side determinants to
//! the constructed tube-side pencils.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::build::{lieball_disc_det, lorentz2_disc_det, polydisk_disc_det, skew_disc_det};
use super::{DetRep, DetRepError};
use crate::cayley::{phi_inv, phi_n_inv, psi_inv, skew_from_coords, symplectic_j};
use crate::numkernel::{det, CMatrix};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainResidual {
    /// Bounded-side value with cleared denominators.
    pub lhs: C64,
    /// The representation evaluated at the tube point.
    pub rhs: C64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|)`.
    pub rel: f64,
}

impl ChainResidual {
    fn new(lhs: C64, rhs: C64) -> Self {
        let scale = lhs.norm().max(rhs.norm());
        let rel = if scale == 0.0 {
            0.0
        } else {
            (lhs - rhs).norm() / scale
        };
        ChainResidual { lhs, rhs, rel }
    }
}

fn lorentz_d(w: &[C64]) -> C64 {
    (w[0] + I).powu(2) - w[1..].iter().map(|x| x * x).sum::<C64>()
}

/// `det(I - K Z_N(φ⁻¹(w)))·Π(wⱼ+i)^{Nⱼ}` against `det(I-K)·det(A₀ + Z_N(w))`.
pub fn halfplane_chain(
    k: &CMatrix,
    n: &[usize],
    rep: &DetRep,
    w: &[C64],
) -> Result<ChainResidual, DetRepError> {
    let z: Vec<C64> = w.iter().map(|&x| phi_inv(x)).collect::<Result<_, _>>()?;
    let clear: C64 = w
        .iter()
        .zip(n)
        .map(|(&x, &m)| (x + I).powu(m as u32))
        .product();
    let lhs = polydisk_disc_det(k, n, &z)? * clear;
    Ok(ChainResidual::new(lhs, rep.eval(w)?))
}

/// `det(I - K(P(z)⊗I_k))·D^k` at `z = Φ₂⁻¹(w)`, `D = (w₁+i)² - w₂²`,
/// against the two-variable Lorentz representation.
pub fn lorentz2_chain(k: &CMatrix, rep: &DetRep, w: &[C64]) -> Result<ChainResidual, DetRepError> {
    let z = phi_n_inv(w)?;
    let mult = (k.rows() / 2) as u32;
    let lhs = lorentz2_disc_det(k, &z)? * lorentz_d(w).powu(mult);
    Ok(ChainResidual::new(lhs, rep.eval(w)?))
}

/// `det(P₊⊗I - K(P₋⊗I))·D^{nk}` at `z = Φₙ⁻¹(w)` against the `n`-variable
/// Lorentz representation.
pub fn lorentzn_chain(
    k: &CMatrix,
    n: usize,
    mult: usize,
    rep: &DetRep,
    w: &[C64],
) -> Result<ChainResidual, DetRepError> {
    let z = phi_n_inv(w)?;
    let lhs = lieball_disc_det(k, &z, mult)? * lorentz_d(w).powu((n * mult) as u32);
    Ok(ChainResidual::new(lhs, rep.eval(w)?))
}

/// `det(I - K(ψ⁻¹(W)⊗I_N))·det(iI + WJ)^N` against the skew representation,
/// with `W` given by its strictly upper coordinates.
pub fn skew_chain(
    k: &CMatrix,
    n: usize,
    mult: usize,
    rep: &DetRep,
    w: &[C64],
) -> Result<ChainResidual, DetRepError> {
    let wm = skew_from_coords(2 * n, w);
    let z = psi_inv(&wm)?;
    let clear =
        det(&(&CMatrix::identity(2 * n).scale(I) + &(&wm * &symplectic_j(n)))).powu(mult as u32);
    let lhs = skew_disc_det(k, &z, mult)? * clear;
    Ok(ChainResidual::new(lhs, rep.eval(w)?))
}
