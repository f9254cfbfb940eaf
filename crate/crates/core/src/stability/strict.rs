use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{polish_min_abs, StabilityError};
use crate::cayley::{phi, skew_from_coords, symplectic_j, CartanBlock, CartanKind};
use crate::domains::{sample, DomainSpec, SampleRegion};
use crate::mvpoly::{MobiusDirection, MultiPoly};
use crate::numkernel::{det, CMatrix};
use crate::randmat;

/// Radii of the far-field schedule; radius 1 is the raw sample set.
pub const FAR_FIELD_RADII: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
/// Relative threshold below which a sampled infimum is read as zero.
const EQUIV_TOL: f64 = 1e-8;
/// A per-radius minimum below this fraction of the previous one counts as decay.
const DECAY_FACTOR: f64 = 0.5;
const POLISH_STARTS: usize = 16;

const I: C64 = C64::new(0.0, 1.0);

/// Lower-bound weight of a strictness condition. Exponents left as `None`
/// are read from the polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum WeightKind {
    /// Weight 1.
    None,
    /// `Π|zⱼ + i|^{nⱼ}` on the half-plane tube.
    HalfPlaneProduct { n: Option<Vec<u32>> },
    /// `Π|det(Z_q + iI)|^{t_q}` over the factors of a matrix or Siegel
    /// upper half-space product.
    CartanDet { t: Option<Vec<u32>> },
    /// `|det(W - iJ)|^t` on the skew domain.
    SkewDet { t: Option<u32> },
    /// `|(1 - a)² + Σ_{j≥2} bⱼ²|^{-total}` on the Lorentz tube, with
    /// `a = (1 + w₁² - Σwⱼ²)/D`, `bⱼ = -2wⱼ/D`, `D = (w₁+i)² - Σwⱼ²`.
    LorentzRational { total: Option<u32> },
}

/// Total degree of `p` in the variables `range`.
fn block_degree(p: &MultiPoly, range: std::ops::Range<usize>) -> u32 {
    p.terms()
        .keys()
        .map(|e| e[range.clone()].iter().sum::<u32>())
        .max()
        .unwrap_or(0)
}

fn cartan_factors(spec: &DomainSpec) -> Result<Vec<DomainSpec>, StabilityError> {
    let factors = match spec {
        DomainSpec::CartanProduct { factors } => factors.clone(),
        other => vec![other.clone()],
    };
    for f in &factors {
        if !matches!(
            f,
            DomainSpec::MatrixUhp { .. } | DomainSpec::SiegelUhp { .. }
        ) {
            return Err(StabilityError::InvalidInput(
                "cartan_det weight needs matrix or Siegel upper half-spaces".into(),
            ));
        }
    }
    Ok(factors)
}

fn factor_matrix(f: &DomainSpec, z: &[C64]) -> CMatrix {
    match f {
        DomainSpec::MatrixUhp { l } => CMatrix::from_fn(*l, *l, |a, b| z[a * l + b]),
        DomainSpec::SiegelUhp { s } => CartanBlock {
            kind: CartanKind::Symmetric,
            size: *s,
            mult: 1,
        }
        .matrix(z),
        _ => unreachable!("checked by cartan_factors"),
    }
}

impl WeightKind {
    /// Fills unset exponents from `p` and checks compatibility with `spec`.
    pub fn resolve(&self, p: &MultiPoly, spec: &DomainSpec) -> Result<WeightKind, StabilityError> {
        let bad = |m: &str| Err(StabilityError::InvalidInput(m.to_string()));
        let total = p.total_degree();
        Ok(match self {
            WeightKind::None => WeightKind::None,
            WeightKind::HalfPlaneProduct { n } => {
                let DomainSpec::HalfPlaneTube { d } = spec else {
                    return bad("half_plane_product weight needs a half-plane tube");
                };
                let n = n.clone().unwrap_or_else(|| p.multidegree().per_var);
                if n.len() != *d {
                    return bad("exponent count differs from the number of variables");
                }
                WeightKind::HalfPlaneProduct { n: Some(n) }
            }
            WeightKind::CartanDet { t } => {
                let factors = cartan_factors(spec)?;
                let t = match t {
                    Some(t) => t.clone(),
                    None => {
                        let mut off = 0;
                        factors
                            .iter()
                            .map(|f| {
                                let r = off..off + f.nvars();
                                off = r.end;
                                block_degree(p, r)
                            })
                            .collect()
                    }
                };
                if t.len() != factors.len() {
                    return bad("exponent count differs from the number of factors");
                }
                WeightKind::CartanDet { t: Some(t) }
            }
            WeightKind::SkewDet { t } => {
                if !matches!(spec, DomainSpec::SkewDomain { .. }) {
                    return bad("skew_det weight needs the skew domain");
                }
                WeightKind::SkewDet {
                    t: Some(t.unwrap_or(total)),
                }
            }
            WeightKind::LorentzRational { total: t } => {
                if !matches!(spec, DomainSpec::LorentzTube { .. }) {
                    return bad("lorentz_rational weight needs the Lorentz tube");
                }
                WeightKind::LorentzRational {
                    total: Some(t.unwrap_or_else(|| p.multidegree().per_var.iter().sum())),
                }
            }
        })
    }

    /// Weight at `z`; exponents must be resolved.
    pub fn eval(&self, spec: &DomainSpec, z: &[C64]) -> f64 {
        match self {
            WeightKind::None => 1.0,
            WeightKind::HalfPlaneProduct { n } => {
                let n = n.as_deref().unwrap_or(&[]);
                z.iter()
                    .zip(n)
                    .map(|(x, &k)| (x + I).norm().powi(k as i32))
                    .product()
            }
            WeightKind::CartanDet { t } => {
                let Ok(factors) = cartan_factors(spec) else {
                    return f64::NAN;
                };
                let t = t.as_deref().unwrap_or(&[]);
                let mut off = 0;
                let mut w = 1.0;
                for (f, &tq) in factors.iter().zip(t) {
                    let m = factor_matrix(f, &z[off..off + f.nvars()]);
                    off += f.nvars();
                    let shifted = &m + &CMatrix::identity(m.rows()).scale(I);
                    w *= det(&shifted).norm().powi(tq as i32);
                }
                w
            }
            WeightKind::SkewDet { t } => {
                let DomainSpec::SkewDomain { n } = spec else {
                    return f64::NAN;
                };
                let wm = skew_from_coords(2 * n, z);
                det(&(&wm - &symplectic_j(*n).scale(I)))
                    .norm()
                    .powi(t.unwrap_or(0) as i32)
            }
            WeightKind::LorentzRational { total } => {
                let tail: C64 = z[1..].iter().map(|x| x * x).sum();
                let d = (z[0] + I).powu(2) - tail;
                let a = (1.0 + z[0] * z[0] - tail) / d;
                let base =
                    (1.0 - a).powu(2) + z[1..].iter().map(|x| (-2.0 * x / d).powu(2)).sum::<C64>();
                base.norm().powi(-(total.unwrap_or(0) as i32))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusMin {
    pub radius: f64,
    pub min: f64,
    pub argmin: Vec<C64>,
}

/// `epsilon_hat` is a minimum over samples, hence an upper bound on the
/// best constant of the weighted lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrictnessEstimate {
    pub schema: String,
    pub epsilon_hat: f64,
    pub argmin: Vec<C64>,
    pub weight_kind: WeightKind,
    pub per_radius: Vec<RadiusMin>,
    /// The far-field minimum keeps shrinking with the radius.
    pub decaying: bool,
    pub samples_per_radius: usize,
    pub seed: u64,
}

/// `min |p(z)| / weight(z)` over `points`.
fn weighted_min(
    p: &MultiPoly,
    spec: &DomainSpec,
    weight: &WeightKind,
    points: &[Vec<C64>],
) -> Result<(f64, Vec<C64>), StabilityError> {
    let vals: Vec<Result<(f64, usize), StabilityError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, z)| {
            let w = weight.eval(spec, z);
            if !(w.is_finite() && w > 0.0) {
                return Err(StabilityError::WeightPole { point: z.clone() });
            }
            Ok((p.eval(z)?.norm() / w, i))
        })
        .collect();
    let mut best = (f64::INFINITY, usize::MAX);
    for v in vals {
        let v = v?;
        if v.0 < best.0 {
            best = v;
        }
    }
    let arg = points.get(best.1).cloned().unwrap_or_default();
    Ok((best.0, arg))
}

/// Far-field copy of `z`: tube points scale by `radius`; on the half-plane
/// tube a seeded nonempty subset of coordinates is scaled.
fn far_field(spec: &DomainSpec, z: &[C64], radius: f64, mask: &[bool]) -> Vec<C64> {
    match spec {
        DomainSpec::HalfPlaneTube { .. } => z
            .iter()
            .zip(mask)
            .map(|(x, &m)| if m { x * radius } else { *x })
            .collect(),
        _ => z.iter().map(|x| x * radius).collect(),
    }
}

fn scaling_masks(d: usize, count: usize, seed: u64) -> Vec<Vec<bool>> {
    (0..count)
        .map(|i| {
            let mut rng = randmat::stream(seed ^ 0x5eed_fa11, i as u64);
            let mut m: Vec<bool> = (0..d)
                .map(|_| randmat::uniform(&mut rng, 0.0, 1.0) < 0.5)
                .collect();
            if !m.iter().any(|&b| b) {
                let k = ((randmat::uniform(&mut rng, 0.0, 1.0) * d as f64) as usize).min(d - 1);
                m[k] = true;
            }
            m
        })
        .collect()
}

/// Minimum of `|p|/weight` over interior samples and their far-field copies
/// at every radius of [`FAR_FIELD_RADII`]. Bounded domains use radius 1 only.
pub fn strictness_estimate(
    p: &MultiPoly,
    spec: &DomainSpec,
    weight: &WeightKind,
    n_samples: usize,
    seed: u64,
) -> Result<StrictnessEstimate, StabilityError> {
    if p.nvars() != spec.nvars() {
        return Err(StabilityError::InvalidInput(
            "variable count differs from the domain".into(),
        ));
    }
    let weight = weight.resolve(p, spec)?;
    let base = sample(spec, n_samples, seed, SampleRegion::Interior)?;
    let masks = scaling_masks(spec.nvars(), n_samples, seed);
    let radii: &[f64] = if spec.is_bounded() {
        &FAR_FIELD_RADII[..1]
    } else {
        &FAR_FIELD_RADII
    };
    let mut per_radius = Vec::new();
    for &r in radii {
        let pts: Vec<Vec<C64>> = base
            .iter()
            .zip(&masks)
            .map(|(z, m)| far_field(spec, z, r, m))
            .collect();
        let (min, argmin) = weighted_min(p, spec, &weight, &pts)?;
        per_radius.push(RadiusMin {
            radius: r,
            min,
            argmin,
        });
    }
    let best = per_radius
        .iter()
        .min_by(|a, b| a.min.total_cmp(&b.min))
        .expect("at least one radius");
    let decaying = match per_radius.as_slice() {
        [.., prev, last] => last.min < DECAY_FACTOR * prev.min,
        _ => false,
    };
    Ok(StrictnessEstimate {
        schema: crate::SCHEMA.to_string(),
        epsilon_hat: best.min,
        argmin: best.argmin.clone(),
        weight_kind: weight.clone(),
        decaying,
        per_radius,
        samples_per_radius: n_samples,
        seed,
    })
}

/// `p(w) = p̃(φ⁻¹(w)) Π(wⱼ+i)^{nⱼ} / (2i)^{Σnⱼ}`, the half-plane polynomial
/// whose disc-side form is `p̃`.
pub fn pull_back_to_halfplane(p_tilde: &MultiPoly, n: &[u32]) -> Result<MultiPoly, StabilityError> {
    let cleared = p_tilde.mobius_substitute(n, MobiusDirection::HalfPlaneToDisc)?;
    let total: u32 = n.iter().sum();
    Ok(cleared.scale(C64::new(0.0, 2.0).powu(total).inv()))
}

/// Weighted minimum of the pulled-back polynomial against the disc-side
/// minimum on matched samples `w = φ(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CayleyBridge {
    pub schema: String,
    /// `min |p(w)| / Π|wⱼ+i|^{nⱼ}` over the transported samples.
    pub epsilon_hat: f64,
    /// `min |p̃(z)|` over the disc samples.
    pub disc_min: f64,
    /// `2^{-Σnⱼ}`.
    pub factor: f64,
    /// `|epsilon_hat - factor·disc_min| / (factor·disc_min)`.
    pub rel: f64,
    /// Largest pointwise relative deviation from the exact factor.
    pub max_pointwise_rel: f64,
    pub samples: usize,
    pub seed: u64,
}

pub fn cayley_bridge(
    p_tilde: &MultiPoly,
    n: &[u32],
    samples: usize,
    seed: u64,
) -> Result<CayleyBridge, StabilityError> {
    let d = p_tilde.nvars();
    if n.len() != d {
        return Err(StabilityError::InvalidInput(
            "degree count differs from the number of variables".into(),
        ));
    }
    let p = pull_back_to_halfplane(p_tilde, n)?;
    let disc = DomainSpec::PolyDisk { d };
    let near = samples / 10;
    let mut zs = sample(&disc, samples - near, seed, SampleRegion::Interior)?;
    zs.extend(sample(
        &disc,
        near,
        seed.wrapping_add(1),
        SampleRegion::NearBoundary,
    )?);
    let factor = 0.5f64.powi(n.iter().sum::<u32>() as i32);
    let weight = WeightKind::HalfPlaneProduct {
        n: Some(n.to_vec()),
    };
    let tube = DomainSpec::HalfPlaneTube { d };
    let rows: Vec<Result<(f64, f64, f64), StabilityError>> = zs
        .par_iter()
        .map(|z| {
            let w: Vec<C64> = z
                .iter()
                .map(|&x| phi(x))
                .collect::<Result<_, _>>()
                .map_err(|e| StabilityError::InvalidInput(e.to_string()))?;
            let lhs = p.eval(&w)?.norm() / weight.eval(&tube, &w);
            let disc_val = p_tilde.eval(z)?.norm();
            let rel = (lhs - factor * disc_val).abs() / (factor * disc_val).max(f64::MIN_POSITIVE);
            Ok((lhs, disc_val, rel))
        })
        .collect();
    let (mut eps, mut dmin, mut worst) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for r in rows {
        let (a, b, c) = r?;
        eps = eps.min(a);
        dmin = dmin.min(b);
        worst = worst.max(c);
    }
    let predicted = factor * dmin;
    Ok(CayleyBridge {
        schema: crate::SCHEMA.to_string(),
        epsilon_hat: eps,
        disc_min: dmin,
        factor,
        rel: (eps - predicted).abs() / predicted.max(f64::MIN_POSITIVE),
        max_pointwise_rel: worst,
        samples,
        seed,
    })
}

/// Sample-level reading of the three equivalent strictness conditions for
/// a half-plane polynomial of multidegree `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrictnessEquivalences {
    pub schema: String,
    pub multidegree: Vec<u32>,
    /// Weighted bound: far-field estimate and its decay flag.
    pub weighted_epsilon: f64,
    pub weighted_decaying: bool,
    pub weighted_holds: bool,
    /// `min |p̃|` on the closed polydisk after polishing.
    pub disc_min: f64,
    pub disc_holds: bool,
    /// Coefficient of `Π zⱼ^{nⱼ}`.
    pub extreme_coeff: C64,
    /// `min |p|` on the closed half-plane tube after polishing.
    pub halfplane_min: f64,
    pub monomial_holds: bool,
    pub agree: bool,
    pub samples: usize,
    pub seed: u64,
}

fn polished_min<F>(p: &MultiPoly, pts: &[Vec<C64>], accept: &F) -> Result<f64, StabilityError>
where
    F: Fn(Vec<C64>) -> Option<Vec<C64>> + Sync,
{
    let mut scored: Vec<(f64, usize)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, z)| (p.eval(z).map(|v| v.norm()).unwrap_or(f64::INFINITY), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let raw = scored.first().map(|s| s.0).unwrap_or(f64::INFINITY);
    let polished = scored
        .par_iter()
        .take(POLISH_STARTS)
        .map(|&(_, i)| {
            let z = polish_min_abs(p, &pts[i], accept);
            p.eval(&z).map(|v| v.norm()).unwrap_or(f64::INFINITY)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(raw.min(polished))
}

fn project_closed_disc(z: Vec<C64>) -> Option<Vec<C64>> {
    Some(
        z.into_iter()
            .map(|x| if x.norm() > 1.0 { x / x.norm() } else { x })
            .collect(),
    )
}

fn project_closed_halfplane(z: Vec<C64>) -> Option<Vec<C64>> {
    Some(
        z.into_iter()
            .map(|x| C64::new(x.re, x.im.max(0.0)))
            .collect(),
    )
}

pub fn strictness_equivalences(
    p: &MultiPoly,
    samples: usize,
    seed: u64,
) -> Result<StrictnessEquivalences, StabilityError> {
    let d = p.nvars();
    if d == 0 || p.is_zero() {
        return Err(StabilityError::InvalidInput(
            "need a nonzero polynomial in at least one variable".into(),
        ));
    }
    let n = p.multidegree().per_var;
    let scale = p.max_abs_coeff();
    let tube = DomainSpec::HalfPlaneTube { d };

    let est = strictness_estimate(
        p,
        &tube,
        &WeightKind::HalfPlaneProduct { n: Some(n.clone()) },
        samples,
        seed,
    )?;
    let weighted_holds = est.epsilon_hat > EQUIV_TOL * scale && !est.decaying;

    let p_tilde = p.mobius_substitute(&n, MobiusDirection::DiscToHalfPlane)?;
    let disc = DomainSpec::PolyDisk { d };
    let near = samples / 4;
    let mut zs = sample(&disc, samples - near, seed, SampleRegion::Interior)?;
    zs.extend(sample(
        &disc,
        near,
        seed.wrapping_add(1),
        SampleRegion::NearBoundary,
    )?);
    let disc_min = polished_min(&p_tilde, &zs, &project_closed_disc)?;
    let disc_holds = disc_min > EQUIV_TOL * p_tilde.max_abs_coeff();

    let extreme_coeff = p.coeff(&n);
    let mut ws = sample(&tube, samples - near, seed, SampleRegion::Interior)?;
    ws.extend(sample(
        &tube,
        near,
        seed.wrapping_add(1),
        SampleRegion::NearBoundary,
    )?);
    let halfplane_min = polished_min(p, &ws, &project_closed_halfplane)?;
    let monomial_holds = extreme_coeff.norm() > 1e-12 * scale && halfplane_min > EQUIV_TOL * scale;

    Ok(StrictnessEquivalences {
        schema: crate::SCHEMA.to_string(),
        multidegree: n,
        weighted_epsilon: est.epsilon_hat,
        weighted_decaying: est.decaying,
        weighted_holds,
        disc_min,
        disc_holds,
        extreme_coeff,
        halfplane_min,
        monomial_holds,
        agree: weighted_holds == disc_holds && disc_holds == monomial_holds,
        samples,
        seed,
    })
}
