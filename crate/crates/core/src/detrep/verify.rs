use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DetRep, DetRepError, ISOMETRY_TOL};
use crate::cayley::StructureMap;
use crate::mvpoly::MultiPoly;
use crate::numkernel::{condition_estimate, min_eig, CMatrix};
use crate::randmat;

/// Lower bound accepted for `λ_min(Im A₀)`.
pub const IM_A0_TOL: f64 = -1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// Relative identity tolerance before condition scaling.
    pub id_tol: f64,
    /// Compare coefficients of `p·q` with the extracted pencil polynomial.
    pub compare_coefficients: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 256,
            seed: 0,
            id_tol: 1e-8,
            compare_coefficients: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
}

impl NamedCheck {
    fn new(name: &str, passed: bool, value: f64) -> Self {
        NamedCheck {
            name: name.to_string(),
            passed,
            value,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepVerification {
    pub schema: String,
    pub identity_max_rel_err: f64,
    /// Worst ratio of relative error to the per-sample tolerance.
    pub identity_worst_ratio: f64,
    #[serde(rename = "A0_im_min_eig")]
    pub a0_im_min_eig: f64,
    pub structure_checks: Vec<NamedCheck>,
    pub coefficient_max_err: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub verdict: RepVerdict,
}

/// Checks a claimed representation `p·q = prefactor·det(pencil)`.
/// Failures, including evaluation errors, are reported in the verdict.
pub fn verify_rep(
    p: &MultiPoly,
    q: &MultiPoly,
    rep: &DetRep,
    opts: &VerifyOptions,
) -> RepVerification {
    let mut checks = Vec::new();
    let shape_ok = rep.validate().is_ok();
    checks.push(NamedCheck::new("shape", shape_ok, 0.0));
    let d = rep.nvars();
    let nvars_ok = p.nvars() == d && q.nvars() == d;
    checks.push(NamedCheck::new("nvars", nvars_ok, d as f64));

    let a0_im_min_eig = rep.im_a0_min_eig().unwrap_or(f64::NAN);
    checks.push(NamedCheck::new(
        "im_a0_psd",
        a0_im_min_eig >= IM_A0_TOL,
        a0_im_min_eig,
    ));
    let iso = rep.isometry_error();
    checks.push(NamedCheck::new("isometry", iso <= ISOMETRY_TOL, iso));
    if shape_ok {
        if let StructureMap::DiagonalZn { .. } = rep.structure {
            checks.extend(projection_checks(rep));
        }
    }

    let (identity_max_rel_err, identity_worst_ratio) = if shape_ok && nvars_ok {
        sampled_identity(p, q, rep, opts)
    } else {
        (f64::NAN, f64::NAN)
    };
    checks.push(NamedCheck::new(
        "identity",
        identity_worst_ratio <= 1.0,
        identity_max_rel_err,
    ));

    let mut coefficient_max_err = None;
    if opts.compare_coefficients && shape_ok && nvars_ok {
        match rep.extract() {
            Ok(ext) => {
                let pq = p * q;
                let scale = pq
                    .max_abs_coeff()
                    .max(ext.max_abs_coeff())
                    .max(f64::MIN_POSITIVE);
                let err = pq.max_coeff_diff(&ext) / scale;
                checks.push(NamedCheck::new("coefficients", err <= opts.id_tol, err));
                coefficient_max_err = Some(err);
            }
            Err(DetRepError::TooLarge { .. }) => {}
            Err(_) => checks.push(NamedCheck::new("coefficients", false, f64::NAN)),
        }
    }

    let verdict = if checks.iter().all(|c| c.passed) {
        RepVerdict::Pass
    } else {
        RepVerdict::Fail
    };
    RepVerification {
        schema: crate::SCHEMA.to_string(),
        identity_max_rel_err,
        identity_worst_ratio,
        a0_im_min_eig,
        structure_checks: checks,
        coefficient_max_err,
        samples: opts.samples,
        seed: opts.seed,
        verdict,
    }
}

/// `Aⱼ` are 0/1 diagonal projections, positive semidefinite, summing to `I`.
fn projection_checks(rep: &DetRep) -> Vec<NamedCheck> {
    let Ok(coeffs) = rep.coefficient_matrices() else {
        return vec![NamedCheck::new("projections", false, f64::NAN)];
    };
    let n = rep.size();
    let mut proj_err: f64 = 0.0;
    let mut min_psd = f64::INFINITY;
    let mut sum = CMatrix::zeros(n, n);
    for a in &coeffs {
        proj_err = proj_err
            .max((&(a * a) - a).max_abs())
            .max((&a.adjoint() - a).max_abs());
        min_psd = min_psd.min(min_eig(a).unwrap_or(f64::NAN));
        sum = &sum + a;
    }
    let sum_err = sum.max_abs_diff(&CMatrix::identity(n));
    vec![
        NamedCheck::new("projections", proj_err == 0.0, proj_err),
        NamedCheck::new("a_j_psd", min_psd >= 0.0, min_psd),
        NamedCheck::new("projection_sum", sum_err == 0.0, sum_err),
    ]
}

/// Max relative error and max error-to-tolerance ratio over the samples.
/// The tolerance at a point is `max(id_tol, 10·κ(pencil)·ε)` relative to
/// `max(|lhs|, |rhs|, Σ|c||z^a| of p times that of q)`, so coefficient rounding
/// near a zero of `p·q` is not mistaken for a mismatch.
fn sampled_identity(
    p: &MultiPoly,
    q: &MultiPoly,
    rep: &DetRep,
    opts: &VerifyOptions,
) -> (f64, f64) {
    let d = rep.nvars();
    let rows: Vec<(f64, f64)> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = randmat::stream(opts.seed, i as u64);
            let z = randmat::complex_vec(&mut rng, d);
            let eval = || -> Result<(C64, C64, f64, f64), DetRepError> {
                let lhs = p.eval(&z)? * q.eval(&z)?;
                let eval_abs = p.eval_abs(&z)? * q.eval_abs(&z)?;
                let pencil = rep.pencil(&z)?;
                let rhs = rep.prefactor.eval(&z) * crate::numkernel::det(&pencil);
                Ok((lhs, rhs, eval_abs, condition_estimate(&pencil)))
            };
            match eval() {
                Ok((lhs, rhs, eval_abs, kappa)) => {
                    let diff = (lhs - rhs).norm();
                    let scale = lhs.norm().max(rhs.norm());
                    let rel = if scale == 0.0 { 0.0 } else { diff / scale };
                    let tol = opts.id_tol.max(10.0 * kappa * f64::EPSILON) * scale.max(eval_abs);
                    (rel, if diff == 0.0 { 0.0 } else { diff / tol })
                }
                Err(_) => (f64::NAN, f64::INFINITY),
            }
        })
        .collect();
    rows.iter()
        .fold((0.0, 0.0), |(a, b), &(r, t)| (nan_max(a, r), nan_max(b, t)))
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
