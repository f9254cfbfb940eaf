use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConstructionPath, DetRep, DetRepError, Prefactor, Provenance};
use crate::cayley::{build_p2, build_ppm, build_q, symplectic_j, StructureMap};
use crate::domains::{sample, DomainSpec, SampleRegion};
use crate::mvpoly::{interpolate_fn, MultiPoly, NodeFamily};
use crate::numkernel::{
    det, herm_eigs, inverse, matrix_cayley, op_norm, CMatrix, DEFAULT_HERM_TOL,
};

/// Eigenvalue band joining the eigenvalue-1 cluster, and the reducing-subspace
/// residual bound relative to `max(1, ‖K‖)`.
pub const SPLIT_TOL: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

fn require_square(k: &CMatrix, n: usize) -> Result<(), DetRepError> {
    if k.rows() != n || k.cols() != n {
        return Err(DetRepError::DimMismatch {
            expected: n,
            got: k.rows(),
        });
    }
    Ok(())
}

fn require_strict(k: &CMatrix) -> Result<f64, DetRepError> {
    let norm = op_norm(k);
    if norm >= 1.0 {
        return Err(DetRepError::NotContraction { norm });
    }
    Ok(norm)
}

fn provenance(path: ConstructionPath, k: &CMatrix) -> Option<Provenance> {
    Some(Provenance {
        path,
        contraction: Some(k.clone()),
    })
}

/// Disc-side data `det(I - K Z_N(z))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscForm {
    pub k: CMatrix,
    pub n: Vec<usize>,
}

impl DiscForm {
    pub fn eval(&self, z: &[C64]) -> Result<C64, DetRepError> {
        polydisk_disc_det(&self.k, &self.n, z)
    }
}

/// `det(I - K Z_N(z))`.
pub fn polydisk_disc_det(k: &CMatrix, n: &[usize], z: &[C64]) -> Result<C64, DetRepError> {
    let zn = StructureMap::DiagonalZn { n: n.to_vec() }.apply(z)?;
    require_square(k, zn.rows())?;
    Ok(det(&(&CMatrix::identity(zn.rows()) - &(k * &zn))))
}

/// Coefficients of `det(I - K Z_N(z))` by interpolation with per-variable degrees `N`.
pub fn polydisk_rep_from_contraction(
    k: &CMatrix,
    n: &[usize],
) -> Result<(MultiPoly, DiscForm), DetRepError> {
    require_square(k, n.iter().sum())?;
    require_strict(k)?;
    let form = DiscForm {
        k: k.clone(),
        n: n.to_vec(),
    };
    let degrees: Vec<u32> = n.iter().map(|&x| x as u32).collect();
    let f = |z: &[C64]| form.eval(z).unwrap_or(C64::new(f64::NAN, f64::NAN));
    let poly = interpolate_fn(f, &degrees, NodeFamily::UnitCircle, 1.0)?;
    Ok((poly, form))
}

/// `(I - K*)⁻¹(I - K*K)(I - K)⁻¹`.
pub fn im_a0_factored(k: &CMatrix) -> Result<CMatrix, DetRepError> {
    let id = CMatrix::identity(k.rows());
    let inv = inverse(&(&id - k))?;
    let mid = &id - &(&k.adjoint() * k);
    Ok(&(&inv.adjoint() * &mid) * &inv)
}

/// `A₀ = i(I+K)(I-K)⁻¹`, `Aⱼ` the coordinate projections of `Z_N`, prefactor
/// `det(I-K)`: the represented polynomial is `p̃(φ⁻¹(w))·Π(wⱼ+i)^{Nⱼ}` for
/// `p̃ = det(I - K Z_N)`.
pub fn cayley_push_halfplane(k: &CMatrix, n: &[usize]) -> Result<DetRep, DetRepError> {
    let dim = n.iter().sum();
    require_square(k, dim)?;
    require_strict(k)?;
    let a0 = matrix_cayley(k)?;
    let scale = det(&(&CMatrix::identity(dim) - k));
    let mut rep = DetRep::new(a0, StructureMap::DiagonalZn { n: n.to_vec() });
    rep.prefactor = Prefactor::scalar(scale);
    rep.provenance = provenance(ConstructionPath::Halfplane, k);
    Ok(rep)
}

/// `det(I - K(P(z) ⊗ I_k))`.
pub fn lorentz2_disc_det(k: &CMatrix, z: &[C64]) -> Result<C64, DetRepError> {
    if z.len() != 2 {
        return Err(DetRepError::DimMismatch {
            expected: 2,
            got: z.len(),
        });
    }
    let mult = k.rows() / 2;
    require_square(k, 2 * mult)?;
    let p = build_p2(z[0], z[1]).kron_identity(mult);
    Ok(det(&(&CMatrix::identity(2 * mult) - &(k * &p))))
}

/// Two-variable Lorentz pencil `det(A₀ + W(w) ⊗ I_k)` with `A₀ = φ(K)` and
/// prefactor `det(I-K)`.
pub fn lorentz2_rep_from_contraction(k: &CMatrix) -> Result<DetRep, DetRepError> {
    if !k.rows().is_multiple_of(2) || k.rows() == 0 {
        return Err(DetRepError::DimMismatch {
            expected: k.rows() + 1,
            got: k.rows(),
        });
    }
    let mult = k.rows() / 2;
    require_square(k, 2 * mult)?;
    require_strict(k)?;
    let a0 = matrix_cayley(k)?;
    let scale = det(&(&CMatrix::identity(2 * mult) - k));
    let mut rep = DetRep::new(a0, StructureMap::LorentzW { n: 2, k: mult });
    rep.k = mult;
    rep.prefactor = Prefactor::scalar(scale);
    rep.provenance = provenance(ConstructionPath::Lorentz2, k);
    Ok(rep)
}

/// Unitary split `K = U(I ⊕ K̃)U*` at eigenvalue 1.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSplit {
    /// Dimension of the eigenvalue-1 subspace.
    pub cluster: usize,
    /// Orthonormal basis of the complement, `nk × m`.
    pub v: CMatrix,
    /// `V*KV`.
    pub k_tilde: CMatrix,
    /// `max(‖(K-I)U₁‖, ‖(K*-I)U₁‖)` on the cluster basis `U₁`.
    pub residual: f64,
}

/// Eigenvalue-1 subspace of a contraction read from the kernel of
/// `I - (K+K*)/2`, which is positive semidefinite for `‖K‖ ≤ 1`.
pub fn split_eigenvalue_one(k: &CMatrix) -> Result<EigenSplit, DetRepError> {
    let n = k.rows();
    require_square(k, n)?;
    let id = CMatrix::identity(n);
    let h = &id - &k.re_part();
    let eig = herm_eigs(&h, DEFAULT_HERM_TOL)?;
    let cluster = eig
        .eigenvalues
        .iter()
        .take_while(|&&x| x < SPLIT_TOL)
        .count();
    if cluster == 0 {
        return Ok(EigenSplit {
            cluster,
            v: id,
            k_tilde: k.clone(),
            residual: 0.0,
        });
    }
    let u1 = eig.eigenvectors.block(0, 0, n, cluster);
    let r1 = (&(k - &id) * &u1).max_abs();
    let r2 = (&(&k.adjoint() - &id) * &u1).max_abs();
    let residual = r1.max(r2);
    if residual > SPLIT_TOL * op_norm(k).max(1.0) {
        return Err(DetRepError::SplitFailure { residual });
    }
    let v = eig.eigenvectors.block(0, cluster, n, n - cluster);
    let k_tilde = &(&v.adjoint() * k) * &v;
    Ok(EigenSplit {
        cluster,
        v,
        k_tilde,
        residual,
    })
}

/// `n`-variable Lorentz representation
/// `(2i)^{nk-m}(2i)^{(n-1)k}det(I-K̃)·(w₁+i)^k·det(A₀ + V*(W(w)⊗I_k)V)` with
/// `A₀ = i(I-K̃)⁻¹(I+K̃)`; it equals `det(P₊⊗I - K(P₋⊗I))` at `z = Φₙ⁻¹(w)`
/// times `((w₁+i)² - Σ_{j≥2}wⱼ²)^{nk}`.
pub fn lorentzn_rep_from_contraction(
    k: &CMatrix,
    n: usize,
    mult: usize,
) -> Result<DetRep, DetRepError> {
    if n < 2 || mult == 0 {
        return Err(DetRepError::DimMismatch {
            expected: 2,
            got: n,
        });
    }
    let nk = n * mult;
    require_square(k, nk)?;
    let norm = op_norm(k);
    if norm > 1.0 + SPLIT_TOL {
        return Err(DetRepError::NotContraction { norm });
    }
    let split = split_eigenvalue_one(k)?;
    let m = nk - split.cluster;
    let id = CMatrix::identity(m);
    let inv = inverse(&(&id - &split.k_tilde))?;
    let a0 = (&inv * &(&id + &split.k_tilde)).scale(I);
    let two_i = C64::new(0.0, 2.0);
    let scale = two_i.powu((nk - m + (n - 1) * mult) as u32) * det(&(&id - &split.k_tilde));
    let mut rep = DetRep::new(a0, StructureMap::LorentzW { n, k: mult });
    rep.k = mult;
    rep.v = if split.cluster == 0 {
        None
    } else {
        Some(split.v)
    };
    rep.prefactor = Prefactor {
        c_re: scale.re,
        c_im: scale.im,
        w1_plus_i_pow: mult as u32,
    };
    rep.provenance = provenance(ConstructionPath::LorentzN, k);
    Ok(rep)
}

/// `det(I - K(Z ⊗ I_N))` for a skew-symmetric `2n×2n` matrix `Z`.
pub fn skew_disc_det(k: &CMatrix, z: &CMatrix, mult: usize) -> Result<C64, DetRepError> {
    let dim = z.rows() * mult;
    require_square(k, dim)?;
    Ok(det(
        &(&CMatrix::identity(dim) - &(k * &z.kron_identity(mult)))
    ))
}

/// Skew pencil `det(A₀ + (ZJ ⊗ I_N))` with `A₀ = i(I+ĴK)⁻¹(I-ĴK)`,
/// `Ĵ = J ⊗ I_N`, and prefactor `det(I+ĴK)`.
pub fn skew_rep_from_contraction(
    k: &CMatrix,
    n: usize,
    mult: usize,
) -> Result<DetRep, DetRepError> {
    if n == 0 || mult == 0 {
        return Err(DetRepError::DimMismatch {
            expected: 1,
            got: 0,
        });
    }
    let dim = 2 * n * mult;
    require_square(k, dim)?;
    require_strict(k)?;
    let jk = &symplectic_j(n).kron_identity(mult) * k;
    let id = CMatrix::identity(dim);
    let plus = &id + &jk;
    let a0 = (&inverse(&plus)? * &(&id - &jk)).scale(I);
    let mut rep = DetRep::new(a0, StructureMap::SkewZj { n, mult });
    rep.k = mult;
    rep.prefactor = Prefactor::scalar(det(&plus));
    rep.provenance = provenance(ConstructionPath::Skew, k);
    Ok(rep)
}

/// `det(P₊(z)⊗I_k - K(P₋(z)⊗I_k))`.
pub fn lieball_disc_det(k: &CMatrix, z: &[C64], mult: usize) -> Result<C64, DetRepError> {
    let (pp, pm) = build_ppm(z);
    let (pp, pm) = (pp.kron_identity(mult), pm.kron_identity(mult));
    require_square(k, pp.rows())?;
    Ok(det(&(&pp - &(k * &pm))))
}

/// Sampled nonvanishing of the Lie-ball pencil.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieBallCheck {
    pub samples: usize,
    pub seed: u64,
    /// `min |det(P₊⊗I - K(P₋⊗I))|`.
    pub min_abs_det: f64,
    /// `min |det(I - K(Q⊗I))|`.
    pub min_abs_reduced: f64,
    /// Relative error of `det(P₊⊗I - K(P₋⊗I)) = (1-z₁)^{(n-1)k} det(I - K(Q⊗I))`.
    pub max_factorization_err: f64,
    /// Largest `‖Q(z)‖` over the samples.
    pub max_q_norm: f64,
    pub nonvanishing: bool,
}

pub fn lieball_pencil_check(
    k: &CMatrix,
    n: usize,
    mult: usize,
    samples: usize,
    seed: u64,
) -> Result<LieBallCheck, DetRepError> {
    require_square(k, n * mult)?;
    require_strict(k)?;
    let pts = sample(
        &DomainSpec::LieBall { n },
        samples,
        seed,
        SampleRegion::Interior,
    )?;
    let id = CMatrix::identity(n * mult);
    let rows: Vec<Result<(f64, f64, f64, f64), DetRepError>> = pts
        .par_iter()
        .map(|z| {
            let full = lieball_disc_det(k, z, mult)?;
            let q = build_q(z)?;
            let reduced = det(&(&id - &(k * &q.kron_identity(mult))));
            let pref = (C64::new(1.0, 0.0) - z[0]).powu(((n - 1) * mult) as u32);
            let fac = pref * reduced;
            let err = (full - fac).norm() / full.norm().max(fac.norm()).max(f64::MIN_POSITIVE);
            Ok((full.norm(), reduced.norm(), err, op_norm(&q)))
        })
        .collect();
    let mut out = LieBallCheck {
        samples,
        seed,
        min_abs_det: f64::INFINITY,
        min_abs_reduced: f64::INFINITY,
        max_factorization_err: 0.0,
        max_q_norm: 0.0,
        nonvanishing: true,
    };
    for r in rows {
        let (a, b, e, q) = r?;
        out.min_abs_det = out.min_abs_det.min(a);
        out.min_abs_reduced = out.min_abs_reduced.min(b);
        out.max_factorization_err = out.max_factorization_err.max(e);
        out.max_q_norm = out.max_q_norm.max(q);
    }
    out.nonvanishing = out.min_abs_det > 0.0 && out.min_abs_reduced > 0.0;
    Ok(out)
}
