//! Batched identity checks over seeded random inputs.
//!
//! Each check evaluates one identity on many samples in parallel and reports
//! the largest error against a fixed tolerance. Evaluation errors count as
//! failures. Agreement checks report the number of disagreements and use
//! tolerance 0.

use std::fmt::Display;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{
    assemble_x, block_cayley_2x2, build_p2, build_x_zeta, build_y, clifford_violations, eta,
    eta_inv, phi, phi2_pencil_link, phi_inv, phi_n, phi_n_inv, phi_n_jordan, psi, psi_inv,
    t_matrix, JordanVector, EXC_DIM, EXC_VARS,
};
use crate::detrep::{
    cayley_push_halfplane, halfplane_chain, lorentz2_chain, lorentz2_rep_from_contraction,
    lorentzn_chain, lorentzn_rep_from_contraction, skew_chain, skew_rep_from_contraction,
};
use crate::domains::{
    in_exceptional_tube, in_lie_ball, lie_ball_shell_point, sample, t27_predicates, t27_schur_step,
    DomainSpec, LieBallMethod, SampleRegion,
};
use crate::numkernel::{det, matrix_cayley, matrix_cayley_inv, op_norm, CMatrix};
use crate::randmat;

/// Tolerance of the 8×8 identities.
pub const Y_TOL: f64 = 1e-12;
/// Tolerance of the transform round trips and closed forms.
pub const ROUNDTRIP_TOL: f64 = 1e-10;
/// Relative tolerance of the determinant factorization.
pub const FACTOR_TOL: f64 = 1e-9;
/// Pattern residual accepted for `φ(X(ζ))`.
pub const PATTERN_TOL: f64 = 1e-9;
/// Relative tolerance of the bounded-to-tube identity chains.
pub const CHAIN_TOL: f64 = 1e-8;
/// Eigenvalue band excluded from positivity comparisons.
pub const T27_BAND: f64 = 1e-8;
/// Margin band excluded from Lie-ball membership comparisons.
pub const LIE_BAND: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuiteError {
    #[error(
        "unknown suite {0:?}; expected clifford, t27, lieball, roundtrips, proofchains or all"
    )]
    UnknownSuite(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Clifford,
    T27,
    Lieball,
    Roundtrips,
    Proofchains,
    All,
}

impl SuiteName {
    pub const EACH: [SuiteName; 5] = [
        SuiteName::Clifford,
        SuiteName::T27,
        SuiteName::Lieball,
        SuiteName::Roundtrips,
        SuiteName::Proofchains,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Clifford => "clifford",
            SuiteName::T27 => "t27",
            SuiteName::Lieball => "lieball",
            SuiteName::Roundtrips => "roundtrips",
            SuiteName::Proofchains => "proofchains",
            SuiteName::All => "all",
        }
    }
}

impl FromStr for SuiteName {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clifford" => Ok(SuiteName::Clifford),
            "t27" => Ok(SuiteName::T27),
            "lieball" => Ok(SuiteName::Lieball),
            "roundtrips" => Ok(SuiteName::Roundtrips),
            "proofchains" => Ok(SuiteName::Proofchains),
            "all" => Ok(SuiteName::All),
            other => Err(SuiteError::UnknownSuite(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub name: String,
    pub samples: usize,
    /// Samples skipped inside an exclusion band.
    pub excluded: usize,
    /// Samples whose evaluation failed.
    pub errors: usize,
    pub max_err: f64,
    pub tol: f64,
    pub passed: bool,
    /// First evaluation error, if any.
    pub first_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: SuiteName,
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
    pub passed: bool,
}

type Sample = Result<Option<f64>, String>;

fn err<E: Display>(e: E) -> String {
    e.to_string()
}

/// Runs `f` on `0..samples`. `Ok(None)` marks an excluded sample.
fn check<F>(name: &str, samples: usize, tol: f64, f: F) -> SuiteCheck
where
    F: Fn(u64) -> Sample + Sync,
{
    let rows: Vec<Sample> = (0..samples as u64).into_par_iter().map(&f).collect();
    let mut max_err: f64 = 0.0;
    let (mut excluded, mut errors, mut first_error) = (0, 0, None);
    for r in rows {
        match r {
            Ok(Some(e)) if e.is_nan() => {
                errors += 1;
                first_error.get_or_insert_with(|| "NaN error".to_string());
            }
            Ok(Some(e)) => max_err = max_err.max(e),
            Ok(None) => excluded += 1,
            Err(m) => {
                errors += 1;
                first_error.get_or_insert(m);
            }
        }
    }
    SuiteCheck {
        name: name.to_string(),
        samples,
        excluded,
        errors,
        max_err,
        tol,
        passed: errors == 0 && max_err <= tol,
        first_error,
    }
}

fn disagree(same: bool) -> Sample {
    Ok(Some(if same { 0.0 } else { 1.0 }))
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(1.0)
}

fn rel_vec(a: &[C64], b: &[C64]) -> f64 {
    let d = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    d / b.iter().map(|x| x.norm()).fold(1.0, f64::max)
}

pub fn run_suite(name: SuiteName, seed: u64) -> SuiteReport {
    let checks = match name {
        SuiteName::Clifford => clifford(seed),
        SuiteName::T27 => t27(seed),
        SuiteName::Lieball => lieball(seed),
        SuiteName::Roundtrips => roundtrips(seed),
        SuiteName::Proofchains => proofchains(seed),
        SuiteName::All => SuiteName::EACH
            .iter()
            .flat_map(|&s| run_suite(s, seed).checks)
            .collect(),
    };
    SuiteReport {
        schema: crate::SCHEMA.to_string(),
        suite: name,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// `TₖᵀTⱼ + TⱼᵀTₖ = 2δⱼₖI₈` in integers, `Y(w)ᵀY(w) = Y(w)Y(w)ᵀ = (Σwⱼ²)I₈`
/// and `Y(w)v = T₁Y(v)w`.
pub fn clifford(seed: u64) -> Vec<SuiteCheck> {
    let bad = clifford_violations().len();
    let relations = SuiteCheck {
        name: "clifford_relations".into(),
        samples: 64,
        excluded: 0,
        errors: 0,
        max_err: bad as f64,
        tol: 0.0,
        passed: bad == 0,
        first_error: None,
    };
    let yw = check("yw_identity", 1000, Y_TOL, |i| {
        let mut rng = randmat::stream(seed, i);
        let w = randmat::complex_vec(&mut rng, 8);
        let y = build_y(&w);
        let s: C64 = w.iter().map(|x| x * x).sum();
        let target = CMatrix::identity(8).scale(s);
        let scale = w.iter().map(|x| x.norm_sqr()).sum::<f64>().max(1.0);
        let e1 = (&y.transpose() * &y).max_abs_diff(&target);
        let e2 = (&y * &y.transpose()).max_abs_diff(&target);
        Ok(Some(e1.max(e2) / scale))
    });
    let t1 = t_matrix(0);
    let switch = check("switch_identity", 1000, Y_TOL, |i| {
        let mut rng = randmat::stream(seed ^ 0x5717c4, i);
        let w = randmat::complex_vec(&mut rng, 8);
        let v = randmat::complex_vec(&mut rng, 8);
        let lhs = build_y(&w).matvec(&v);
        let rhs = (&t1 * &build_y(&v)).matvec(&w);
        let scale = (w.iter().map(|x| x.norm_sqr()).sum::<f64>()
            * v.iter().map(|x| x.norm_sqr()).sum::<f64>())
        .sqrt();
        let d = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(Some(d / scale.max(1.0)))
    });
    vec![relations, yw, switch]
}

/// Real 27-vector mixing positive and indefinite forms.
pub fn t27_real_sample(seed: u64, i: u64) -> Vec<f64> {
    let mut rng = randmat::stream(seed, i);
    let mut y: Vec<f64> = randmat::real_vec(&mut rng, EXC_VARS)
        .into_iter()
        .map(|x| 0.4 * x)
        .collect();
    for k in [0, 17, 26] {
        y[k] = randmat::uniform(&mut rng, -0.2, 3.0);
    }
    y
}

/// Random `ζ` with `‖X(ζ)‖ < 0.95`.
pub fn interior_zeta(seed: u64, i: u64) -> Vec<C64> {
    let mut rng = randmat::stream(seed, i);
    loop {
        let z: Vec<C64> = randmat::complex_vec(&mut rng, EXC_VARS)
            .iter()
            .map(|x| x * 0.15)
            .collect();
        if build_x_zeta(&z)
            .map(|x| op_norm(&x) < 0.95)
            .unwrap_or(false)
        {
            return z;
        }
    }
}

/// The exceptional-domain identities: three equivalent positivity tests,
/// the Schur-complement step, the factorization of `det(I - X(ζ))`, the
/// closed form of the 2×2 block Cayley transform, and the tube pattern of
/// `φ(X(ζ))`.
pub fn t27(seed: u64) -> Vec<SuiteCheck> {
    let three_way = check("t27_three_way", 1000, 0.0, |i| {
        let m = t27_predicates(&t27_real_sample(seed, i)).map_err(err)?;
        if m.iter().any(|v| v.abs() < T27_BAND) {
            return Ok(None);
        }
        disagree(m.iter().all(|&v| v > 0.0) || m.iter().all(|&v| v < 0.0))
    });
    let schur = check("t27_schur_switch", 1000, Y_TOL, |i| {
        let mut y = t27_real_sample(seed ^ 0x5c4, i);
        y[26] = y[26].abs() + 0.1;
        let s = t27_schur_step(&y).map_err(err)?;
        Ok(Some(rel(&s.second, &s.switched)))
    });
    let factor = check("det_i_minus_x_factorization", 1000, FACTOR_TOL, |i| {
        let mut rng = randmat::stream(seed ^ 0xde7, i);
        let z: Vec<C64> = randmat::complex_vec(&mut rng, EXC_VARS)
            .iter()
            .map(|x| x * 0.5)
            .collect();
        let x = build_x_zeta(&z).map_err(err)?;
        let lhs = det(&(&CMatrix::identity(EXC_DIM) - &x));
        let one = C64::new(1.0, 0.0);
        let zz: C64 = z[18..26].iter().map(|v| v * v).sum();
        let rhs = (one - z[0]) * ((one - z[17]) * (one - z[26]) - zz).powu(8);
        Ok(Some((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE)))
    });
    let block = check("block_cayley_closed_form", 1000, ROUNDTRIP_TOL, |i| {
        let mut rng = randmat::stream(seed ^ 0xb10c, i);
        let m = 1 + (i as usize % 6);
        let zm = randmat::contraction(&mut rng, m, m, 0.5);
        let p: Vec<C64> = randmat::complex_vec(&mut rng, m)
            .iter()
            .map(|x| x * 0.3)
            .collect();
        let w = randmat::complex_normal(&mut rng) * 0.4;
        let x = assemble_x(w, &p, &zm).map_err(err)?;
        let direct = matrix_cayley(&x).map_err(err)?;
        let closed = block_cayley_2x2(w, &p, &zm).map_err(err)?;
        Ok(Some(rel(&closed, &direct)))
    });
    let pattern = check("cayley_of_x_pattern", 1000, PATTERN_TOL, |i| {
        let z = interior_zeta(seed ^ 0x71, i);
        let w = matrix_cayley(&build_x_zeta(&z).map_err(err)?).map_err(err)?;
        let m = in_exceptional_tube(&w).map_err(err)?;
        let (_, residual) = eta_inv(&z).map_err(err)?;
        Ok(Some(if m.inside { residual } else { f64::INFINITY }))
    });
    vec![three_way, schur, factor, block, pattern]
}

/// Four Lie-ball characterizations agree off the margin band for
/// `n = 2..=6`; for `n = 2` also `‖P(z₁, z₂)‖ < 1`.
pub fn lieball(seed: u64) -> Vec<SuiteCheck> {
    lieball_with(seed, 10_000)
}

pub fn lieball_with(seed: u64, per_n: usize) -> Vec<SuiteCheck> {
    let mut out = Vec::new();
    for n in 2..=6usize {
        let name = format!("lieball_four_way_n{n}");
        out.push(check(&name, per_n, 0.0, |i| {
            let mut rng = randmat::stream(seed.wrapping_add(n as u64), i);
            let level = randmat::uniform(&mut rng, 0.3, 1.7);
            let z = lie_ball_shell_point(&mut rng, n, level);
            let base = in_lie_ball(&z, LieBallMethod::EigFormula).map_err(err)?;
            if base.margin.abs() < LIE_BAND {
                return Ok(None);
            }
            let mut same = true;
            for m in LieBallMethod::ALL {
                let r = in_lie_ball(&z, m).map_err(err)?;
                if r.margin.abs() < LIE_BAND {
                    return Ok(None);
                }
                same &= r.inside == base.inside;
            }
            if n == 2 {
                same &= (op_norm(&build_p2(z[0], z[1])) < 1.0) == base.inside;
            }
            disagree(same)
        }));
    }
    out
}

/// Round trips of the scalar, matrix, skew and Lie-ball maps, the Jordan
/// form of `Φₙ`, the `η` round trip, and the nonassociativity witness.
pub fn roundtrips(seed: u64) -> Vec<SuiteCheck> {
    let disc = DomainSpec::PolyDisk { d: 1 };
    let scalar = check("phi_round_trip", 1000, ROUNDTRIP_TOL, |i| {
        let z = sample(&disc, 1, seed.wrapping_add(i), SampleRegion::Interior).map_err(err)?[0][0];
        let back = phi_inv(phi(z).map_err(err)?).map_err(err)?;
        Ok(Some((back - z).norm()))
    });
    let matrix = check("matrix_cayley_round_trip", 1000, ROUNDTRIP_TOL, |i| {
        let mut rng = randmat::stream(seed ^ 0xca1, i);
        let m = 1 + (i as usize % 6);
        let x = randmat::contraction(&mut rng, m, m, 0.9);
        let back = matrix_cayley_inv(&matrix_cayley(&x).map_err(err)?).map_err(err)?;
        Ok(Some(rel(&back, &x)))
    });
    let skew = check("psi_round_trip", 1000, ROUNDTRIP_TOL, |i| {
        let mut rng = randmat::stream(seed ^ 0x5e3, i);
        let n = 1 + (i as usize % 3);
        let z = randmat::skew_contraction(&mut rng, 2 * n, 0.9);
        let back = psi_inv(&psi(&z).map_err(err)?).map_err(err)?;
        Ok(Some(rel(&back, &z)))
    });
    let lie_pts = |n: usize, i: u64| -> Result<Vec<C64>, String> {
        Ok(sample(
            &DomainSpec::LieBall { n },
            1,
            seed.wrapping_add(1000 * n as u64 + i),
            SampleRegion::Interior,
        )
        .map_err(err)?
        .remove(0))
    };
    let phi2 = check("phi2_matrix_link", 1000, ROUNDTRIP_TOL, |i| {
        let z = lie_pts(2, i)?;
        Ok(Some(phi2_pencil_link(z[0], z[1]).map_err(err)?.residual))
    });
    let phin = check("phi_n_round_trip", 1000, ROUNDTRIP_TOL, |i| {
        let n = 2 + (i as usize % 5);
        let z = lie_pts(n, i)?;
        let back = phi_n_inv(&phi_n(&z).map_err(err)?).map_err(err)?;
        Ok(Some(rel_vec(&back, &z)))
    });
    let jordan = check("phi_n_jordan_form", 1000, ROUNDTRIP_TOL, |i| {
        let n = 2 + (i as usize % 5);
        let z = lie_pts(n, i)?;
        let a = phi_n(&z).map_err(err)?;
        let b = phi_n_jordan(&z).map_err(err)?;
        Ok(Some(rel_vec(&b, &a)))
    });
    let eta_rt = check("eta_round_trip", 1000, ROUNDTRIP_TOL, |i| {
        let z = interior_zeta(seed ^ 0xe7a, i);
        let (w, _) = eta_inv(&z).map_err(err)?;
        let (back, _) = eta(&w).map_err(err)?;
        Ok(Some(rel_vec(&back, &z)))
    });
    let nonassoc = {
        let f2 = JordanVector::basis(3, 1);
        let f3 = JordanVector::basis(3, 2);
        let left = f3.mul(&f2).mul(&f2);
        let right = f3.mul(&f2.mul(&f2));
        let ok = left.0.iter().all(|x| *x == C64::new(0.0, 0.0)) && right == f3;
        SuiteCheck {
            name: "jordan_nonassociativity".into(),
            samples: 1,
            excluded: 0,
            errors: 0,
            max_err: if ok { 0.0 } else { 1.0 },
            tol: 0.0,
            passed: ok,
            first_error: None,
        }
    };
    vec![scalar, matrix, skew, phi2, phin, jordan, eta_rt, nonassoc]
}

/// The bounded-side determinants against the constructed pencils at tube
/// points: half-plane, two-variable and `n`-variable Lorentz, skew.
pub fn proofchains(seed: u64) -> Vec<SuiteCheck> {
    let halfplane = check("halfplane_chain", 1000, CHAIN_TOL, |i| {
        let cfg = i / 50;
        let mut rng = randmat::stream(seed ^ 0xff, cfg);
        let d = 1 + (cfg as usize % 3);
        let n: Vec<usize> = (0..d).map(|j| 1 + (cfg as usize + j) % 3).collect();
        let size: usize = n.iter().sum();
        let k = randmat::contraction(&mut rng, size, size, 0.9);
        let rep = cayley_push_halfplane(&k, &n).map_err(err)?;
        let w = sample(
            &DomainSpec::HalfPlaneTube { d },
            1,
            seed.wrapping_add(i),
            SampleRegion::Interior,
        )
        .map_err(err)?;
        Ok(Some(halfplane_chain(&k, &n, &rep, &w[0]).map_err(err)?.rel))
    });
    let lorentz2 = check("lorentz2_chain", 1000, CHAIN_TOL, |i| {
        let cfg = i / 100;
        let mult = 1 + (cfg as usize % 3);
        let mut rng = randmat::stream(seed ^ 0x12, cfg);
        let k = randmat::contraction(&mut rng, 2 * mult, 2 * mult, 0.9);
        let rep = lorentz2_rep_from_contraction(&k).map_err(err)?;
        let w = sample(
            &DomainSpec::LorentzTube { n: 2 },
            1,
            seed.wrapping_add(i),
            SampleRegion::Interior,
        )
        .map_err(err)?;
        Ok(Some(lorentz2_chain(&k, &rep, &w[0]).map_err(err)?.rel))
    });
    let lorentzn = check("lorentzn_chain", 1200, CHAIN_TOL, |i| {
        let cfg = i / 100;
        let n = 2 + (cfg as usize % 4);
        let mult = 1 + (cfg as usize % 3);
        let nk = n * mult;
        let mut rng = randmat::stream(seed ^ 0xf2, cfg);
        let k = if cfg % 2 == 0 {
            randmat::contraction(&mut rng, nk, nk, 0.9)
        } else {
            let u = randmat::unitary(&mut rng, nk);
            let inner = randmat::contraction(&mut rng, nk - 1, nk - 1, 0.8);
            &(&u * &CMatrix::block_diag(&[CMatrix::identity(1), inner])) * &u.adjoint()
        };
        let rep = lorentzn_rep_from_contraction(&k, n, mult).map_err(err)?;
        let w = sample(
            &DomainSpec::LorentzTube { n },
            1,
            seed.wrapping_add(i),
            SampleRegion::Interior,
        )
        .map_err(err)?;
        Ok(Some(
            lorentzn_chain(&k, n, mult, &rep, &w[0]).map_err(err)?.rel,
        ))
    });
    let skew = check("skew_chain", 600, CHAIN_TOL, |i| {
        let cfg = i / 100;
        let n = 1 + (cfg as usize % 3);
        let mult = 1 + (cfg as usize % 2);
        let dim = 2 * n * mult;
        let mut rng = randmat::stream(seed ^ 0x5c, cfg);
        let k = randmat::contraction(&mut rng, dim, dim, 0.9);
        let rep = skew_rep_from_contraction(&k, n, mult).map_err(err)?;
        let w = sample(
            &DomainSpec::SkewDomain { n },
            1,
            seed.wrapping_add(i),
            SampleRegion::Interior,
        )
        .map_err(err)?;
        Ok(Some(skew_chain(&k, n, mult, &rep, &w[0]).map_err(err)?.rel))
    });
    vec![halfplane, lorentz2, lorentzn, skew]
}
