//! Sampled stability tests, strictness estimates, and line-by-line checks of
//! stability through Hurwitz stability, interlacing and hyperbolicity.
//!
//! Sampling can falsify stability with a witness but never proves it; a
//! `no_zero_found` verdict always carries the sample count and the smallest
//! modulus seen.

mod lines;
mod strict;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{sample, DomainError, DomainSpec, SampleRegion, MARGIN_TOL};
use crate::mvpoly::{MultiPoly, PolyError};
use crate::rootfind::RootError;

pub use lines::{
    fibered_line_checks, initial_form_hyperbolicity, normalization_phase, pn_qn1_interlacing,
    random_lines, FiberedLineReport, HyperLine, HyperbolicityReport, Line, LineCheck,
    LineInterlacing, Normalization, PnQnReport, NORMALIZATION_PHASES, REAL_TOL,
};
pub use strict::{
    cayley_bridge, pull_back_to_halfplane, strictness_equivalences, strictness_estimate,
    CayleyBridge, RadiusMin, StrictnessEquivalences, StrictnessEstimate, WeightKind,
    FAR_FIELD_RADII,
};

/// `|p(z)| ≤ FALSIFY_TOL · Σ|c_a||z^a|` counts as a zero.
pub const FALSIFY_TOL: f64 = 1e-10;
/// Newton iterations per polishing start.
const POLISH_ITERS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("weight vanishes or is not finite at {point:?}")]
    WeightPole { point: Vec<C64> },
    #[error("no phase makes the initial form real (relative residual {residual:.3e})")]
    NormalizationFailure { residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleVerdict {
    NoZeroFound,
    Falsified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<C64>,
    pub abs_p: f64,
    /// `Σ|c_a||z^a|` at the point.
    pub scale: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub schema: String,
    pub verdict: SampleVerdict,
    pub witness: Option<Witness>,
    /// Smallest `|p|` over the raw samples, before polishing.
    pub min_abs_over_samples: f64,
    pub samples_used: usize,
    pub seed: u64,
    pub falsify_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    pub samples: usize,
    pub seed: u64,
    /// Share of the samples drawn near the boundary.
    pub near_boundary_fraction: f64,
    pub falsify_tol: f64,
    /// Samples with the smallest relative modulus used as Newton starts.
    pub polish_starts: usize,
    /// Earlier witnesses, re-checked before sampling.
    pub prior_witnesses: Vec<Vec<C64>>,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            samples: 10_000,
            seed: 0,
            near_boundary_fraction: 0.1,
            falsify_tol: FALSIFY_TOL,
            polish_starts: 16,
            prior_witnesses: Vec::new(),
        }
    }
}

/// Interior and near-boundary sampling of `p` on `spec`.
pub fn sampled_stability(
    p: &MultiPoly,
    spec: &DomainSpec,
    n_samples: usize,
    seed: u64,
) -> Result<StabilityReport, StabilityError> {
    sampled_stability_with(
        p,
        spec,
        &StabilityOptions {
            samples: n_samples,
            seed,
            ..Default::default()
        },
    )
}

pub fn sampled_stability_with(
    p: &MultiPoly,
    spec: &DomainSpec,
    opts: &StabilityOptions,
) -> Result<StabilityReport, StabilityError> {
    if p.is_zero() {
        return Err(StabilityError::InvalidInput("zero polynomial".into()));
    }
    if p.nvars() != spec.nvars() {
        return Err(StabilityError::InvalidInput(format!(
            "{} variables on a {}-variable domain",
            p.nvars(),
            spec.nvars()
        )));
    }
    let report = |witness: Option<Witness>, min_abs: f64| StabilityReport {
        schema: crate::SCHEMA.to_string(),
        verdict: if witness.is_some() {
            SampleVerdict::Falsified
        } else {
            SampleVerdict::NoZeroFound
        },
        witness,
        min_abs_over_samples: min_abs,
        samples_used: opts.samples,
        seed: opts.seed,
        falsify_tol: opts.falsify_tol,
    };
    for w in &opts.prior_witnesses {
        if let Some(wit) = check_witness(p, spec, w, opts.falsify_tol)? {
            return Ok(report(Some(wit), wit_abs(&opts.prior_witnesses, p)));
        }
    }

    let near = ((opts.samples as f64) * opts.near_boundary_fraction).round() as usize;
    let near = near.min(opts.samples);
    let mut pts = sample(spec, opts.samples - near, opts.seed, SampleRegion::Interior)?;
    pts.extend(sample(
        spec,
        near,
        opts.seed.wrapping_add(1),
        SampleRegion::NearBoundary,
    )?);

    let mut scored: Vec<(f64, f64, usize)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, z)| {
            let v = p.eval(z).map(|x| x.norm()).unwrap_or(f64::NAN);
            let s = p.eval_abs(z).unwrap_or(f64::NAN);
            (v / s.max(f64::MIN_POSITIVE), v, i)
        })
        .collect();
    let min_abs = scored.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let starts: Vec<&Vec<C64>> = scored
        .iter()
        .take(opts.polish_starts)
        .map(|r| &pts[r.2])
        .collect();
    let inside = |z: Vec<C64>| match spec.contains(&z) {
        Ok(r) if r.margin > MARGIN_TOL => Some(z),
        _ => None,
    };
    let polished: Vec<Vec<C64>> = starts
        .par_iter()
        .map(|z| polish_min_abs(p, z, &inside))
        .collect();
    let mut best: Option<Witness> = None;
    for z in polished.iter().chain(starts.iter().copied()) {
        if let Some(w) = check_witness(p, spec, z, opts.falsify_tol)? {
            if best
                .as_ref()
                .is_none_or(|b| w.abs_p / w.scale < b.abs_p / b.scale)
            {
                best = Some(w);
            }
        }
    }
    Ok(report(best, min_abs))
}

fn wit_abs(ws: &[Vec<C64>], p: &MultiPoly) -> f64 {
    ws.iter()
        .filter_map(|w| p.eval(w).ok())
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min)
}

/// A domain member with `|p| ≤ tol · Σ|c_a||z^a|`, if `z` is one.
pub fn check_witness(
    p: &MultiPoly,
    spec: &DomainSpec,
    z: &[C64],
    tol: f64,
) -> Result<Option<Witness>, StabilityError> {
    let margin = spec.contains(z)?.margin;
    let abs_p = p.eval(z)?.norm();
    let scale = p.eval_abs(z)?;
    if margin > MARGIN_TOL && abs_p <= tol * scale {
        return Ok(Some(Witness {
            point: z.to_vec(),
            abs_p,
            scale,
            margin,
        }));
    }
    Ok(None)
}

/// Damped minimum-norm Newton descent on `|p|`. `accept` projects a
/// candidate onto the admissible set or rejects it.
pub(crate) fn polish_min_abs<F>(p: &MultiPoly, start: &[C64], accept: &F) -> Vec<C64>
where
    F: Fn(Vec<C64>) -> Option<Vec<C64>>,
{
    let mut z = start.to_vec();
    let Ok(mut fz) = p.eval(&z) else { return z };
    for _ in 0..POLISH_ITERS {
        let Ok((f, g)) = p.eval_grad(&z) else { break };
        let gn: f64 = g.iter().map(|x| x.norm_sqr()).sum();
        if gn == 0.0 || f.norm() == 0.0 {
            break;
        }
        let step: Vec<C64> = g.iter().map(|gi| -f * gi.conj() / gn).collect();
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand: Vec<C64> = z.iter().zip(&step).map(|(a, s)| a + s * alpha).collect();
            if let Some(c) = accept(cand) {
                if let Ok(fc) = p.eval(&c) {
                    if fc.norm() < fz.norm() {
                        z = c;
                        fz = fc;
                        moved = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    z
}
