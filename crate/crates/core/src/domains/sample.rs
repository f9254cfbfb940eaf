use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lie_norm_sq, DomainError, DomainSpec, MARGIN_TOL};
use crate::cayley::{eta_inv, psi, skew_coords, CartanBlock, CartanKind};
use crate::numkernel::CMatrix;
use crate::randmat;

/// Minimal margin of interior samples.
pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-3;
/// Upper end of the margin window for near-boundary samples.
const NEAR_BOUNDARY_MAX: f64 = 0.05;
const MAX_TRIES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleRegion {
    /// Margin at least [`DEFAULT_MARGIN_FLOOR`].
    Interior,
    /// Margin in `(0, 0.05]`.
    NearBoundary,
}

/// `count` deterministic points of `spec`; point `i` depends only on `(seed, i)`.
pub fn sample(
    spec: &DomainSpec,
    count: usize,
    seed: u64,
    region: SampleRegion,
) -> Result<Vec<Vec<C64>>, DomainError> {
    spec.validate()?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = randmat::stream(seed, i as u64);
            match region {
                SampleRegion::Interior => interior(spec, &mut rng),
                SampleRegion::NearBoundary => near_boundary(spec, &mut rng),
            }
        })
        .collect()
}

fn margin_of(spec: &DomainSpec, p: &[C64]) -> f64 {
    spec.contains(p)
        .map(|r| r.margin)
        .unwrap_or(f64::NEG_INFINITY)
}

fn interior<R: Rng>(spec: &DomainSpec, rng: &mut R) -> Result<Vec<C64>, DomainError> {
    for _ in 0..MAX_TRIES {
        let p = candidate(spec, rng)?;
        if margin_of(spec, &p) >= DEFAULT_MARGIN_FLOOR {
            return Ok(p);
        }
    }
    Err(DomainError::InvalidSpec(
        "interior sampler did not reach the margin floor".into(),
    ))
}

fn candidate<R: Rng>(spec: &DomainSpec, rng: &mut R) -> Result<Vec<C64>, DomainError> {
    let floor = DEFAULT_MARGIN_FLOOR;
    Ok(match spec {
        DomainSpec::PolyDisk { d } => (0..*d)
            .map(|_| {
                let r = (1.0 - 2.0 * floor) * randmat::uniform(rng, 0.0, 1.0).sqrt();
                C64::from_polar(r, randmat::uniform(rng, 0.0, std::f64::consts::TAU))
            })
            .collect(),
        DomainSpec::HalfPlaneTube { d } => (0..*d)
            .map(|_| {
                C64::new(
                    2.0 * randmat::normal(rng),
                    randmat::log_uniform(rng, 2.0 * floor, 10.0),
                )
            })
            .collect(),
        DomainSpec::LieBall { n } => {
            let level = (1.0 - 2.0 * floor) * randmat::uniform(rng, 0.0, 1.0);
            lie_ball_shell_point(rng, *n, level)
        }
        DomainSpec::LorentzCone { n } => cone_point(rng, *n)
            .into_iter()
            .map(|x| C64::new(x, 0.0))
            .collect(),
        DomainSpec::LorentzTube { n } => cone_point(rng, *n)
            .into_iter()
            .map(|y| C64::new(2.0 * randmat::normal(rng), y))
            .collect(),
        DomainSpec::MatrixUhp { l } => {
            let h = randmat::hermitian(rng, *l);
            let b = randmat::matrix(rng, *l, *l);
            let p = pd_matrix(rng, b);
            (&h + &p.scale(C64::new(0.0, 1.0))).data().to_vec()
        }
        DomainSpec::SiegelUhp { s } => {
            let x = randmat::real_matrix(rng, *s, *s);
            let x = (&x + &x.transpose()).scale(C64::new(0.5, 0.0));
            let b = randmat::real_matrix(rng, *s, *s);
            let p = pd_matrix(rng, b);
            let z = &x + &p.scale(C64::new(0.0, 1.0));
            CartanBlock {
                kind: CartanKind::Symmetric,
                size: *s,
                mult: 1,
            }
            .coords(&z)
        }
        DomainSpec::SkewDomain { n } => {
            let norm = randmat::uniform(rng, 0.05, 0.95);
            let z = randmat::skew_contraction(rng, 2 * n, norm);
            skew_coords(&psi(&z)?)
        }
        DomainSpec::CartanProduct { factors } => {
            let mut out = Vec::with_capacity(spec.nvars());
            for f in factors {
                out.extend(interior(f, rng)?);
            }
            out
        }
        DomainSpec::BoundedExceptional27 {} => exceptional_candidate(rng),
        DomainSpec::ExceptionalTube27 {} => {
            let z = interior(&DomainSpec::BoundedExceptional27 {}, rng)?;
            eta_inv(&z)?.0
        }
    })
}

fn exceptional_candidate<R: Rng>(rng: &mut R) -> Vec<C64> {
    let scale = randmat::log_uniform(rng, 0.01, 0.3);
    randmat::complex_vec(rng, crate::cayley::EXC_VARS)
        .into_iter()
        .map(|x| x * scale)
        .collect()
}

/// `BB*/l + tI` with `t` log-uniform in `[2·floor, 1)`.
fn pd_matrix<R: Rng>(rng: &mut R, b: CMatrix) -> CMatrix {
    let l = b.rows() as f64;
    let t = randmat::log_uniform(rng, 2.0 * DEFAULT_MARGIN_FLOOR, 1.0);
    &(&b * &b.adjoint()).scale(C64::new(1.0 / l, 0.0))
        + &CMatrix::identity(b.rows()).scale(C64::new(t, 0.0))
}

/// Point of the open Lorentz cone with `x₁ - ‖x_{2..n}‖ ≥ 0.05`.
fn cone_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let scale = randmat::log_uniform(rng, 0.1, 3.0);
    let tail: Vec<f64> = randmat::real_vec(rng, n - 1)
        .into_iter()
        .map(|x| x * scale)
        .collect();
    let rho = tail.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut x = vec![rho + randmat::log_uniform(rng, 0.05, 2.0)];
    x.extend(tail);
    x
}

/// A point `z ∈ ℂⁿ` with `‖z‖² + sqrt(‖z‖⁴ - |Σzⱼ²|²) = level`.
pub fn lie_ball_shell_point<R: Rng + ?Sized>(rng: &mut R, n: usize, level: f64) -> Vec<C64> {
    let u = randmat::complex_vec(rng, n);
    let f = lie_norm_sq(&u);
    let s = (level / f).sqrt();
    u.into_iter().map(|x| x * s).collect()
}

/// Walks along the ray `t·p` from an interior `p` until the margin lands in
/// `(m/2, m]` for a log-uniform target `m ≤ 0.05`.
fn near_boundary<R: Rng>(spec: &DomainSpec, rng: &mut R) -> Result<Vec<C64>, DomainError> {
    for _ in 0..100 {
        let p = interior(spec, rng)?;
        let target = randmat::log_uniform(rng, 1e-4, NEAR_BOUNDARY_MAX);
        let at = |t: f64| {
            let q: Vec<C64> = p.iter().map(|x| x * t).collect();
            let m = margin_of(spec, &q);
            (q, m)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        if at(0.0).1 > 0.0 {
            lo = 2.0;
            let mut found = false;
            for _ in 0..60 {
                if at(lo).1 <= 0.0 {
                    found = true;
                    break;
                }
                hi = lo;
                lo *= 2.0;
            }
            if !found {
                continue;
            }
        }
        // Invariant: margin(lo) ≤ 0 < margin(hi).
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (q, m) = at(mid);
            if m > 0.5 * target && m <= target && m > MARGIN_TOL {
                return Ok(q);
            }
            if m <= 0.5 * target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (q, m) = at(hi);
        if m > MARGIN_TOL && m <= NEAR_BOUNDARY_MAX {
            return Ok(q);
        }
    }
    Err(DomainError::InvalidSpec(
        "near-boundary sampler did not converge".into(),
    ))
}

/// Diagnostic probe of `e^{iθ}`-invariance of the bounded exceptional domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationProbe {
    pub samples: usize,
    pub theta: f64,
    /// Points whose membership changed under `ζ ↦ e^{iθ}ζ`.
    pub disagreements: usize,
    pub max_margin_change: f64,
}

/// Compares membership of `ζ` and `e^{iθ}ζ` on near-boundary samples.
/// Agreement is evidence only; it proves nothing about invariance.
pub fn rotation_probe(count: usize, seed: u64, theta: f64) -> Result<RotationProbe, DomainError> {
    let spec = DomainSpec::BoundedExceptional27 {};
    let pts = sample(&spec, count, seed, SampleRegion::NearBoundary)?;
    let rot = C64::from_polar(1.0, theta);
    let results: Vec<(bool, f64)> = pts
        .par_iter()
        .map(|p| {
            let a = margin_of(&spec, p);
            let q: Vec<C64> = p.iter().map(|x| x * rot).collect();
            let b = margin_of(&spec, &q);
            ((a > MARGIN_TOL) != (b > MARGIN_TOL), (a - b).abs())
        })
        .collect();
    Ok(RotationProbe {
        samples: count,
        theta,
        disagreements: results.iter().filter(|r| r.0).count(),
        max_margin_change: results.iter().map(|r| r.1).fold(0.0, f64::max),
    })
}
