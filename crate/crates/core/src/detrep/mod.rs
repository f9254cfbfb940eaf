//! Determinantal representations: construction from contractions, polynomial
//! extraction, and verification of claimed representations.
//!
//! A [`DetRep`] represents the polynomial
//! `c · (w₁ + i)^e · det(A₀ + V*(L(w))V)` where `L` is the structure map and
//! `V` defaults to the identity.

mod build;
mod chains;
mod verify;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{CayleyError, StructureMap};
use crate::domains::DomainError;
use crate::mvpoly::{interpolate_fn, MultiPoly, NodeFamily, PolyError};
use crate::numkernel::{det, herm_eigvals, min_eig, CMatrix, LinalgError};

pub use build::{
    cayley_push_halfplane, im_a0_factored, lieball_disc_det, lieball_pencil_check,
    lorentz2_disc_det, lorentz2_rep_from_contraction, lorentzn_rep_from_contraction,
    polydisk_disc_det, polydisk_rep_from_contraction, skew_disc_det, skew_rep_from_contraction,
    split_eigenvalue_one, DiscForm, EigenSplit, LieBallCheck, SPLIT_TOL,
};
pub use chains::{halfplane_chain, lorentz2_chain, lorentzn_chain, skew_chain, ChainResidual};
pub use verify::{verify_rep, NamedCheck, RepVerdict, RepVerification, VerifyOptions, IM_A0_TOL};

/// Largest tensor grid used when extracting coefficients.
pub const MAX_EXTRACT_POINTS: usize = 250_000;
/// `‖V*V - I‖` accepted for an isometry.
pub const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetRepError {
    #[error("matrix is not a strict contraction (norm {norm:.6})")]
    NotContraction { norm: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("eigenvalue-1 subspace is not reducing (residual {residual:.3e})")]
    SplitFailure { residual: f64 },
    #[error("extraction grid of {points} points exceeds the limit")]
    TooLarge { points: usize },
    #[error("structure map is not linear")]
    NotLinear,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Scalar data multiplying the pencil determinant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prefactor {
    pub c_re: f64,
    pub c_im: f64,
    /// Exponent `e` of `(w₁ + i)^e`.
    pub w1_plus_i_pow: u32,
}

impl Prefactor {
    pub fn scalar(c: C64) -> Self {
        Prefactor {
            c_re: c.re,
            c_im: c.im,
            w1_plus_i_pow: 0,
        }
    }

    pub fn c(&self) -> C64 {
        C64::new(self.c_re, self.c_im)
    }

    pub fn eval(&self, w: &[C64]) -> C64 {
        if self.w1_plus_i_pow == 0 {
            return self.c();
        }
        self.c() * (w[0] + C64::new(0.0, 1.0)).powu(self.w1_plus_i_pow)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionPath {
    Halfplane,
    Lorentz2,
    LorentzN,
    Skew,
    /// Supplied from outside the constructors.
    External,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub path: ConstructionPath,
    /// The contraction the representation was built from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<CMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetRep {
    #[serde(default = "schema_tag")]
    pub schema: String,
    #[serde(rename = "A0")]
    pub a0: CMatrix,
    pub structure: StructureMap,
    pub k: usize,
    #[serde(rename = "V")]
    pub v: Option<CMatrix>,
    pub prefactor: Prefactor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn schema_tag() -> String {
    crate::SCHEMA.to_string()
}

impl DetRep {
    /// Representation with `V = I`, unit prefactor and external provenance.
    pub fn new(a0: CMatrix, structure: StructureMap) -> Self {
        DetRep {
            schema: schema_tag(),
            a0,
            structure,
            k: 1,
            v: None,
            prefactor: Prefactor::scalar(C64::new(1.0, 0.0)),
            provenance: None,
        }
    }

    pub fn nvars(&self) -> usize {
        self.structure.nvars()
    }

    /// Side length of the compressed pencil.
    pub fn size(&self) -> usize {
        self.a0.rows()
    }

    /// Checks shapes and, when present, `V*V = I`.
    pub fn validate(&self) -> Result<(), DetRepError> {
        self.structure.validate()?;
        if !self.structure.is_linear() {
            return Err(DetRepError::NotLinear);
        }
        if !self.a0.is_square() {
            return Err(DetRepError::DimMismatch {
                expected: self.a0.rows(),
                got: self.a0.cols(),
            });
        }
        let d = self.structure.dim();
        match &self.v {
            None if self.a0.rows() != d => Err(DetRepError::DimMismatch {
                expected: d,
                got: self.a0.rows(),
            }),
            Some(v) if v.rows() != d || v.cols() != self.a0.rows() => {
                Err(DetRepError::DimMismatch {
                    expected: d,
                    got: v.rows(),
                })
            }
            _ => Ok(()),
        }
    }

    /// `max|V*V - I|`, zero without `V`.
    pub fn isometry_error(&self) -> f64 {
        match &self.v {
            None => 0.0,
            Some(v) => (&v.adjoint() * v).max_abs_diff(&CMatrix::identity(v.cols())),
        }
    }

    /// `λ_min(Im A₀)`.
    pub fn im_a0_min_eig(&self) -> Result<f64, DetRepError> {
        Ok(min_eig(&self.a0.im_part())?)
    }

    fn compress(&self, m: &CMatrix) -> CMatrix {
        match &self.v {
            None => m.clone(),
            Some(v) => &(&v.adjoint() * m) * v,
        }
    }

    /// `A₀ + V*L(w)V`.
    pub fn pencil(&self, w: &[C64]) -> Result<CMatrix, DetRepError> {
        let l = self.structure.apply(w)?;
        Ok(&self.a0 + &self.compress(&l))
    }

    /// Coefficient matrices `V*AⱼV`.
    pub fn coefficient_matrices(&self) -> Result<Vec<CMatrix>, DetRepError> {
        Ok(self
            .structure
            .coefficients()?
            .iter()
            .map(|a| self.compress(a))
            .collect())
    }

    /// `det(A₀ + V*L(w)V)` without the prefactor.
    pub fn pencil_det(&self, w: &[C64]) -> Result<C64, DetRepError> {
        Ok(det(&self.pencil(w)?))
    }

    /// The represented polynomial at `w`.
    pub fn eval(&self, w: &[C64]) -> Result<C64, DetRepError> {
        Ok(self.prefactor.eval(w) * self.pencil_det(w)?)
    }

    /// Per-variable degree bounds: the rank of each `V*AⱼV`, plus the
    /// prefactor exponent on the first variable.
    pub fn degree_bounds(&self) -> Result<Vec<u32>, DetRepError> {
        let mut out = Vec::new();
        for a in self.coefficient_matrices()? {
            let g = &a.adjoint() * &a;
            let ev = herm_eigvals(&g)?;
            let top = ev.last().copied().unwrap_or(0.0);
            out.push(ev.iter().filter(|&&x| x > 1e-20 + 1e-12 * top).count() as u32);
        }
        if let Some(first) = out.first_mut() {
            *first += self.prefactor.w1_plus_i_pow;
        }
        Ok(out)
    }

    /// Explicit coefficients of the represented polynomial by interpolation on
    /// a unit-circle grid.
    pub fn extract(&self) -> Result<MultiPoly, DetRepError> {
        self.validate()?;
        let degrees = self.degree_bounds()?;
        let points: usize = degrees.iter().map(|&d| d as usize + 1).product();
        if points > MAX_EXTRACT_POINTS {
            return Err(DetRepError::TooLarge { points });
        }
        let f = |w: &[C64]| self.eval(w).unwrap_or(C64::new(f64::NAN, f64::NAN));
        Ok(interpolate_fn(f, &degrees, NodeFamily::UnitCircle, 1.0)?)
    }
}

#[cfg(test)]
mod tests;
