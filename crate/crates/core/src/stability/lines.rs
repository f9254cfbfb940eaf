use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StabilityError;
use crate::domains::{sample, DomainSpec, SampleRegion};
use crate::mvpoly::MultiPoly;
use crate::randmat;
use crate::rootfind::{
    first_nonreal_root, is_hurwitz_stable, real_rooted_and_interlace, InterlaceWitness,
    InterlacingVerdict, RootOptions, Verdict,
};

/// Grid size of the phase search for the normalization constant.
pub const NORMALIZATION_PHASES: usize = 720;
/// Relative imaginary residual accepted for a normalized initial form.
pub const REAL_TOL: f64 = 1e-9;
/// A restriction of `q` below this fraction of the largest coefficient of
/// `p` on the same line counts as `q ≡ 0`.
const LINE_PRUNE: f64 = 1e-13;

/// The real line `t ↦ x + t y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Lines read off interior tube samples `x + iy`, so every `y` lies in the
/// cone. Only tubes with real coordinates qualify.
pub fn random_lines(
    spec: &DomainSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<Line>, StabilityError> {
    if !matches!(
        spec,
        DomainSpec::HalfPlaneTube { .. } | DomainSpec::LorentzTube { .. }
    ) {
        return Err(StabilityError::InvalidInput(
            "lines need a half-plane or Lorentz tube".into(),
        ));
    }
    Ok(sample(spec, count, seed, SampleRegion::Interior)?
        .into_iter()
        .map(|w| Line {
            x: w.iter().map(|z| z.re).collect(),
            y: w.iter().map(|z| z.im).collect(),
        })
        .collect())
}

fn in_cone(spec: &DomainSpec, y: &[f64]) -> Result<bool, StabilityError> {
    let iy: Vec<C64> = y.iter().map(|&v| C64::new(0.0, v)).collect();
    Ok(spec.contains(&iy)?.inside)
}

/// `p(x + t y)` with `y` scaled to unit max-norm. Every per-line verdict is
/// invariant under positive rescaling of `y`, and the rescaling keeps the
/// coefficients balanced for root finding. Small coefficients are kept: the
/// leading one is `pₙ(y)`, which is small but exact for thin directions.
fn restrict(p: &MultiPoly, line: &Line) -> Result<MultiPoly, StabilityError> {
    let s = direction_scale(&line.y);
    let y: Vec<f64> = line.y.iter().map(|v| v / s).collect();
    Ok(p.line_restrict(&line.x, &y)?)
}

/// `max|yⱼ|`, or 1 for the zero vector. A root `t` of the rescaled
/// restriction is the root `t / s` of the original one.
fn direction_scale(y: &[f64]) -> f64 {
    let top = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top > 0.0 {
        top
    } else {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineCheck {
    pub line: Line,
    /// `p(x + t y)` has no zero with `Im t > 0`.
    pub hurwitz_stable: bool,
    pub hurwitz_witness: Option<C64>,
    /// Real-rootedness and interlacing of `r(x + t y)`, `q(x + t y)`; witness
    /// roots refer to `y` scaled to unit max-norm.
    pub interlacing: InterlacingVerdict,
    /// `q ≡ 0` on the line; only real-rootedness of `r` is checked.
    pub degenerate_q: bool,
    /// Smallest `Im(r/q) / |r/q|` at sampled `t` with `Im t > 0`.
    pub im_ratio_min: f64,
    pub im_ratio_ok: bool,
    /// Hurwitz stability implies the other two checks on this line.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberedLineReport {
    pub schema: String,
    pub lines: Vec<LineCheck>,
    pub hurwitz_pass: usize,
    pub interlacing_pass: usize,
    pub im_ratio_pass: usize,
    pub degenerate_lines: usize,
    pub all_pass: bool,
    pub consistent: bool,
    pub seed: u64,
}

/// Restriction coefficients are exact up to rounding, so tiny leading terms are kept.
fn line_root_options() -> RootOptions {
    RootOptions {
        leading_trim: 0.0,
        ..RootOptions::default()
    }
}

fn real_roots_only(
    r: &MultiPoly,
    opts: &RootOptions,
) -> Result<InterlacingVerdict, StabilityError> {
    if r.is_zero() {
        return Ok(InterlacingVerdict {
            verdict: Verdict::Weak,
            witness: None,
        });
    }
    if let Some(z) = first_nonreal_root(r, opts)? {
        return Ok(InterlacingVerdict {
            verdict: Verdict::Fails,
            witness: Some(InterlaceWitness::NonReal { which: 0, root: z }),
        });
    }
    Ok(InterlacingVerdict {
        verdict: Verdict::Weak,
        witness: None,
    })
}

fn check_line(
    p: &MultiPoly,
    r: &MultiPoly,
    q: &MultiPoly,
    line: &Line,
    t_density: usize,
    seed: u64,
    index: usize,
) -> Result<LineCheck, StabilityError> {
    let opts = line_root_options();
    let pl = restrict(p, line)?;
    let (hurwitz_stable, hurwitz_witness) = if pl.is_zero() {
        (false, None)
    } else {
        let v = is_hurwitz_stable(&pl, &opts)?;
        (v.stable, v.witness.map(|t| t / direction_scale(&line.y)))
    };
    let rl = restrict(r, line)?;
    let ql = restrict(q, line)?;
    let scale = pl.max_abs_coeff();
    let degenerate_q = ql.max_abs_coeff() <= LINE_PRUNE * scale;
    let interlacing = if degenerate_q {
        real_roots_only(&rl, &opts)?
    } else {
        real_rooted_and_interlace(&rl, &ql, &opts)?
    };

    let mut im_ratio_min = f64::INFINITY;
    if !degenerate_q {
        let mut rng = randmat::stream(seed, index as u64);
        for _ in 0..t_density {
            let t = C64::new(
                2.0 * randmat::normal(&mut rng),
                randmat::log_uniform(&mut rng, 1e-2, 10.0),
            );
            let qv = ql.eval(&[t])?;
            if qv.norm() == 0.0 {
                continue;
            }
            let ratio = rl.eval(&[t])? / qv;
            if ratio.norm() > 0.0 {
                im_ratio_min = im_ratio_min.min(ratio.im / ratio.norm());
            }
        }
    }
    let im_ratio_ok = degenerate_q || im_ratio_min > -1e-12;
    let interlace_ok = interlacing.verdict != Verdict::Fails;
    Ok(LineCheck {
        line: line.clone(),
        hurwitz_stable,
        hurwitz_witness,
        interlacing,
        degenerate_q,
        im_ratio_min,
        im_ratio_ok,
        consistent: !hurwitz_stable || (interlace_ok && im_ratio_ok),
    })
}

/// Per-line Hurwitz stability, interlacing of the real and imaginary parts,
/// and the sign of `Im(r/q)` on `Im t > 0`.
pub fn fibered_line_checks(
    p: &MultiPoly,
    spec: &DomainSpec,
    lines: &[Line],
    t_density: usize,
    seed: u64,
) -> Result<FiberedLineReport, StabilityError> {
    if p.nvars() != spec.nvars() {
        return Err(StabilityError::InvalidInput(
            "variable count differs from the domain".into(),
        ));
    }
    for l in lines {
        if l.x.len() != p.nvars() || l.y.len() != p.nvars() {
            return Err(StabilityError::InvalidInput(
                "line dimension differs from the polynomial".into(),
            ));
        }
        if !in_cone(spec, &l.y)? {
            return Err(StabilityError::InvalidInput(format!(
                "direction {:?} is not in the cone",
                l.y
            )));
        }
    }
    let (r, q) = p.real_imag_split();
    let checks: Vec<LineCheck> = lines
        .par_iter()
        .enumerate()
        .map(|(i, l)| check_line(p, &r, &q, l, t_density, seed, i))
        .collect::<Result<_, _>>()?;
    let hurwitz_pass = checks.iter().filter(|c| c.hurwitz_stable).count();
    let interlacing_pass = checks
        .iter()
        .filter(|c| c.interlacing.verdict != Verdict::Fails)
        .count();
    let im_ratio_pass = checks.iter().filter(|c| c.im_ratio_ok).count();
    let n = checks.len();
    Ok(FiberedLineReport {
        schema: crate::SCHEMA.to_string(),
        degenerate_lines: checks.iter().filter(|c| c.degenerate_q).count(),
        all_pass: hurwitz_pass == n && interlacing_pass == n && im_ratio_pass == n,
        consistent: checks.iter().all(|c| c.consistent),
        lines: checks,
        hurwitz_pass,
        interlacing_pass,
        im_ratio_pass,
        seed,
    })
}

/// Phase `c` making `c·pₙ` real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub c: C64,
    /// `max|Im(c·a)| / max|a|` over the coefficients `a`.
    pub residual: f64,
}

/// Grid search for the phase maximizing `Σ|Re(c·a)|`, then Newton on
/// `Σ Im(c·a)²`.
pub fn normalization_phase(pn: &MultiPoly) -> Result<Normalization, StabilityError> {
    let coeffs: Vec<C64> = pn.terms().values().copied().collect();
    let top = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return Err(StabilityError::InvalidInput("zero initial form".into()));
    }
    let score = |th: f64| {
        let c = C64::from_polar(1.0, th);
        coeffs.iter().map(|a| (c * a).re.abs()).sum::<f64>()
    };
    let step = std::f64::consts::TAU / NORMALIZATION_PHASES as f64;
    let mut theta = (0..NORMALIZATION_PHASES)
        .map(|m| m as f64 * step)
        .max_by(|a, b| score(*a).total_cmp(&score(*b)))
        .unwrap_or(0.0);
    for _ in 0..50 {
        let c = C64::from_polar(1.0, theta);
        let (mut g1, mut g2) = (0.0, 0.0);
        for a in &coeffs {
            let v = c * a;
            g1 += 2.0 * v.im * v.re;
            g2 += 2.0 * (v.re * v.re - v.im * v.im);
        }
        if g2 <= 0.0 || g1 == 0.0 {
            break;
        }
        let delta = g1 / g2;
        theta -= delta;
        if delta.abs() < 1e-16 {
            break;
        }
    }
    let c = C64::from_polar(1.0, theta);
    let residual = coeffs.iter().map(|a| (c * a).im.abs()).fold(0.0, f64::max) / top;
    if residual > REAL_TOL {
        return Err(StabilityError::NormalizationFailure { residual });
    }
    Ok(Normalization { c, residual })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperLine {
    pub line: Line,
    pub degree: usize,
    /// `pₙ(y) = 0`: the restriction lost degree.
    pub degree_drop: bool,
    pub real_rooted: bool,
    pub witness: Option<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub schema: String,
    pub degree: u32,
    pub normalization: Normalization,
    pub lines: Vec<HyperLine>,
    pub all_real_rooted: bool,
}

/// Real-rootedness of the normalized initial form along the given lines.
/// Directions are taken as given; membership in the cone is the caller's
/// responsibility.
pub fn initial_form_hyperbolicity(
    p: &MultiPoly,
    lines: &[Line],
) -> Result<HyperbolicityReport, StabilityError> {
    let n = p.total_degree();
    let pn = p.homogeneous_part(n);
    let norm = normalization_phase(&pn)?;
    let pnr = pn.scale(norm.c).real_imag_split().0;
    let opts = line_root_options();
    let out: Vec<HyperLine> = lines
        .par_iter()
        .map(|l| {
            let lp = restrict(&pnr, l)?;
            let degree = lp.total_degree() as usize;
            let mut witness = None;
            if !lp.is_zero() {
                witness = first_nonreal_root(&lp, &opts)?.map(|z| z / direction_scale(&l.y));
            }
            Ok(HyperLine {
                line: l.clone(),
                degree,
                degree_drop: degree < n as usize,
                real_rooted: witness.is_none(),
                witness,
            })
        })
        .collect::<Result<_, StabilityError>>()?;
    Ok(HyperbolicityReport {
        schema: crate::SCHEMA.to_string(),
        degree: n,
        normalization: norm,
        all_real_rooted: out.iter().all(|h| h.real_rooted),
        lines: out,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineInterlacing {
    pub line: Line,
    pub interlacing: InterlacingVerdict,
    /// `qₙ₋₁` vanishes or is constant on the line.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PnQnReport {
    pub schema: String,
    pub normalization: Normalization,
    pub lines: Vec<LineInterlacing>,
    pub fails: usize,
    pub all_pass: bool,
}

/// Interlacing of `pₙ(x + t y)` and `qₙ₋₁(x + t y)` after normalizing `p`.
/// A constant or vanishing restriction passes weakly unless a root is
/// non-real.
pub fn pn_qn1_interlacing(p: &MultiPoly, lines: &[Line]) -> Result<PnQnReport, StabilityError> {
    let n = p.total_degree();
    let norm = normalization_phase(&p.homogeneous_part(n))?;
    let pc = p.scale(norm.c);
    let pn = pc.homogeneous_part(n).real_imag_split().0;
    let qn1 = if n == 0 {
        MultiPoly::zero(p.nvars())
    } else {
        pc.homogeneous_part(n - 1).real_imag_split().1
    };
    let opts = line_root_options();
    let out: Vec<LineInterlacing> = lines
        .par_iter()
        .map(|l| {
            let a = restrict(&pn, l)?;
            let b = restrict(&qn1, l)?;
            let degenerate = b.is_zero() || b.total_degree() == 0 || a.total_degree() == 0;
            let mut v = if b.is_zero() {
                real_roots_only(&a, &opts)?
            } else {
                real_rooted_and_interlace(&a, &b, &opts)?
            };
            if degenerate && v.verdict == Verdict::Strict {
                v.verdict = Verdict::Weak;
            }
            Ok(LineInterlacing {
                line: l.clone(),
                interlacing: v,
                degenerate,
            })
        })
        .collect::<Result<_, StabilityError>>()?;
    let fails = out
        .iter()
        .filter(|l| l.interlacing.verdict == Verdict::Fails)
        .count();
    Ok(PnQnReport {
        schema: crate::SCHEMA.to_string(),
        normalization: norm,
        all_pass: fails == 0,
        fails,
        lines: out,
    })
}
