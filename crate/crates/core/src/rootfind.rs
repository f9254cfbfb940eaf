//! Univariate root finding, half-plane classification and interlacing.
//!
//! Roots come from Aberth–Ehrlich simultaneous iteration started on a circle
//! whose radius is the geometric mean of the root moduli. Nearby
//! approximations are merged into one root with a multiplicity.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mvpoly::{MultiPoly, PolyError};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error(
        "root iteration did not converge in {iters} iterations (backward error {residual:.3e})"
    )]
    NoConvergence { iters: usize, residual: f64 },
    #[error("coefficients are not real (relative imaginary part {imag:.3e})")]
    NotRealCoefficient { imag: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    /// Accepted backward error `|p(z)| / Σ|a_k||z|^k`.
    pub tol: f64,
    /// Approximations closer than `cluster_tol * max(1, |z|)` are merged.
    pub cluster_tol: f64,
    pub max_iter: usize,
    /// Roots with `|Im z| <= real_band * max(1, |z|)` count as real.
    pub real_band: f64,
    /// Roots with `|Im z| < stability_band` sit on the boundary.
    pub stability_band: f64,
    /// Leading coefficients with `|a_k| <= leading_trim * max|a|` are dropped.
    pub leading_trim: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: 1e-10,
            cluster_tol: 1e-4,
            max_iter: 1000,
            real_band: 1e-7,
            stability_band: 1e-9,
            leading_trim: 1e-14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Largest backward error over the unmerged approximations.
    pub residual: f64,
}

impl RootSet {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<C64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }
}

fn horner(a: &[C64], z: C64) -> (C64, C64, f64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    let mut scale = 0.0;
    let az = z.norm();
    for &c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        scale = scale * az + c.norm();
    }
    (p, dp, scale)
}

fn backward_error(a: &[C64], z: C64) -> f64 {
    let (p, _, s) = horner(a, z);
    if s == 0.0 {
        0.0
    } else {
        p.norm() / s
    }
}

/// Roots of `Σ coeffs[k] t^k`.
pub fn roots_of_coeffs(coeffs: &[C64], opts: &RootOptions) -> Result<RootSet, RootError> {
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if cmax == 0.0 {
        return Err(RootError::ZeroPolynomial);
    }
    let mut hi = coeffs.len();
    while coeffs[hi - 1].norm() <= opts.leading_trim * cmax {
        hi -= 1;
    }
    let mut lo = 0;
    while coeffs[lo] == ZERO {
        lo += 1;
    }
    let a = &coeffs[lo..hi];
    let n = a.len() - 1;
    let mut approx = vec![ZERO; lo];
    let mut residual: f64 = 0.0;
    if n > 0 {
        let found = aberth(a, opts)?;
        residual = found
            .iter()
            .map(|&z| backward_error(a, z))
            .fold(0.0, f64::max);
        approx.extend(found);
    }
    let mut merged = merge_by_sensitivity(&coeffs[..hi], cluster(&approx, opts.cluster_tol));
    for r in merged.iter_mut().filter(|r| r.multiplicity > 1) {
        refine_multiple(&coeffs[..hi], r, opts.cluster_tol);
    }
    Ok(RootSet {
        roots: merged,
        residual,
    })
}

fn derivative(a: &[C64]) -> Vec<C64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// A root of multiplicity `m` is a simple root of `p^(m-1)`; Newton on that
/// derivative sharpens the cluster mean. Steps leaving the cluster are rejected.
fn refine_multiple(a: &[C64], r: &mut Root, cluster_tol: f64) {
    let mut d = a.to_vec();
    for _ in 1..r.multiplicity {
        d = derivative(&d);
    }
    let dd = derivative(&d);
    let start = r.value;
    let radius = cluster_tol * start.norm().max(1.0);
    let mut z = start;
    for _ in 0..8 {
        let (p, _, _) = horner(&d, z);
        let (dp, _, _) = horner(&dd, z);
        if p == ZERO || dp == ZERO {
            break;
        }
        let next = z - p / dp;
        if !(next.re.is_finite() && next.im.is_finite()) || (next - start).norm() > radius {
            return;
        }
        if (next - z).norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            z = next;
            break;
        }
        z = next;
    }
    r.value = z;
}

fn aberth(a: &[C64], opts: &RootOptions) -> Result<Vec<C64>, RootError> {
    let n = a.len() - 1;
    let radius = (a[0].norm() / a[n].norm()).powf(1.0 / n as f64);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            C64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
            )
        })
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON * 4.0 * (n as f64 + 1.0);
    let mut iters = 0;
    while iters < opts.max_iter && done.iter().any(|d| !d) {
        iters += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp, s) = horner(a, z[i]);
            if p.norm() <= eps * s {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
            } else {
                z[i] += C64::from_polar(radius.max(1.0) * 1e-3, i as f64);
            }
        }
    }
    for zi in z.iter_mut() {
        polish(a, zi);
    }
    let worst = z.iter().map(|&x| backward_error(a, x)).fold(0.0, f64::max);
    if done.iter().any(|d| !d) && worst > opts.tol {
        return Err(RootError::NoConvergence {
            iters,
            residual: worst,
        });
    }
    Ok(z)
}

/// Newton steps accepted only while the residual decreases.
fn polish(a: &[C64], z: &mut C64) {
    for _ in 0..3 {
        let (p, dp, _) = horner(a, *z);
        if dp == ZERO || p == ZERO {
            return;
        }
        let cand = *z - p / dp;
        if horner(a, cand).0.norm() < p.norm() {
            *z = cand;
        } else {
            return;
        }
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

fn cluster(z: &[C64], tol: f64) -> Vec<Root> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() < tol * z[i].norm().max(z[j].norm()).max(1.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[rj] = ri;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<C64>> = Default::default();
    for (i, &v) in z.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Root> = groups
        .into_values()
        .map(|g| Root {
            value: g.iter().sum::<C64>() / g.len() as f64,
            multiplicity: g.len(),
        })
        .collect();
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    out
}

/// Backward error assumed when sizing the perturbation ring of a multiple root.
const MULTIPLICITY_ETA: f64 = 1e-15;

/// Taylor coefficient `p^(m)(c) / m!`.
fn taylor_coeff(a: &[C64], c: C64, m: usize) -> C64 {
    let mut d = a.to_vec();
    for k in 1..=m {
        d = derivative(&d);
        d.iter_mut().for_each(|x| *x /= k as f64);
    }
    horner(&d, c).0
}

/// An `m`-fold root perturbed by relative backward error `eta` spreads into a
/// ring of radius about `(eta S(c) / |p^(m)(c)/m!|)^(1/m)`. Nearby groups that fit
/// inside such a ring are merged into one multiple root.
fn merge_by_sensitivity(a: &[C64], mut groups: Vec<Root>) -> Vec<Root> {
    loop {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for i in 0..groups.len() {
            let mut order: Vec<usize> = (0..groups.len()).filter(|&j| j != i).collect();
            order.sort_by(|&x, &y| {
                (groups[x].value - groups[i].value)
                    .norm()
                    .total_cmp(&(groups[y].value - groups[i].value).norm())
            });
            let mut members = vec![i];
            for &j in &order {
                members.push(j);
                let m: usize = members.iter().map(|&k| groups[k].multiplicity).sum();
                let c = members
                    .iter()
                    .map(|&k| groups[k].value * groups[k].multiplicity as f64)
                    .sum::<C64>()
                    / m as f64;
                let lead = taylor_coeff(a, c, m);
                if lead == ZERO {
                    continue;
                }
                let s = horner(a, c).2;
                let r = (MULTIPLICITY_ETA * s / lead.norm()).powf(1.0 / m as f64);
                if r > 0.1 * c.norm().max(1.0) {
                    break;
                }
                let fits = members.iter().all(|&k| (groups[k].value - c).norm() <= r);
                if fits && best.as_ref().is_none_or(|(bm, _)| m > *bm) {
                    best = Some((m, members.clone()));
                }
            }
        }
        let Some((m, members)) = best else { break };
        let c = members
            .iter()
            .map(|&k| groups[k].value * groups[k].multiplicity as f64)
            .sum::<C64>()
            / m as f64;
        let mut rest: Vec<Root> = groups
            .iter()
            .enumerate()
            .filter(|(k, _)| !members.contains(k))
            .map(|(_, g)| *g)
            .collect();
        rest.push(Root {
            value: c,
            multiplicity: m,
        });
        groups = rest;
    }
    groups.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    groups
}

/// Radius within which rounding at `MULTIPLICITY_ETA` can move `r`.
pub fn root_uncertainty(a: &[C64], r: &Root) -> f64 {
    let lead = taylor_coeff(a, r.value, r.multiplicity);
    if lead == ZERO {
        return 0.0;
    }
    (MULTIPLICITY_ETA * horner(a, r.value).2 / lead.norm()).powf(1.0 / r.multiplicity as f64)
}

fn numerically_real(a: &[C64], r: &Root, opts: &RootOptions) -> bool {
    let z = r.value;
    z.im.abs() <= (opts.real_band * z.norm().max(1.0)).max(root_uncertainty(a, r))
}

/// First root of `p` that is non-real beyond its rounding uncertainty.
pub fn first_nonreal_root(p: &MultiPoly, opts: &RootOptions) -> Result<Option<C64>, RootError> {
    let a = p.univariate_coeffs()?;
    let rs = roots_of_coeffs(&a, opts)?;
    Ok(rs
        .roots
        .iter()
        .find(|r| !numerically_real(&a, r, opts))
        .map(|r| r.value))
}

/// Roots of a univariate polynomial.
pub fn roots(p: &MultiPoly, opts: &RootOptions) -> Result<RootSet, RootError> {
    roots_of_coeffs(&p.univariate_coeffs()?, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    /// No root with `Im z >= stability_band`.
    pub stable: bool,
    /// Largest imaginary part over the roots; `None` for a constant.
    pub margin: Option<f64>,
    /// Some root lies within the boundary band.
    pub boundary: bool,
    /// The root with the largest imaginary part, when unstable.
    pub witness: Option<C64>,
}

/// Classifies `p` with respect to zeros in the open upper half plane.
pub fn is_hurwitz_stable(p: &MultiPoly, opts: &RootOptions) -> Result<StabilityVerdict, RootError> {
    let rs = roots(p, opts)?;
    Ok(hurwitz_from_roots(&rs, opts))
}

pub fn hurwitz_from_roots(rs: &RootSet, opts: &RootOptions) -> StabilityVerdict {
    let top = rs
        .roots
        .iter()
        .map(|r| r.value)
        .max_by(|a, b| a.im.total_cmp(&b.im));
    match top {
        None => StabilityVerdict {
            stable: true,
            margin: None,
            boundary: false,
            witness: None,
        },
        Some(t) => {
            let stable = t.im < opts.stability_band;
            StabilityVerdict {
                stable,
                margin: Some(t.im),
                boundary: t.im.abs() < opts.stability_band,
                witness: if stable { None } else { Some(t) },
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Strict,
    Weak,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterlaceWitness {
    /// Polynomial `which` (0 for the first argument) has a non-real root.
    NonReal {
        which: usize,
        root: C64,
    },
    /// Adjacent roots whose order breaks the alternation.
    OutOfOrder {
        left: f64,
        right: f64,
    },
    DegreeGap {
        first: usize,
        second: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterlacingVerdict {
    pub verdict: Verdict,
    pub witness: Option<InterlaceWitness>,
}

impl InterlacingVerdict {
    fn ok(strict: bool) -> Self {
        InterlacingVerdict {
            verdict: if strict {
                Verdict::Strict
            } else {
                Verdict::Weak
            },
            witness: None,
        }
    }

    fn fails(w: InterlaceWitness) -> Self {
        InterlacingVerdict {
            verdict: Verdict::Fails,
            witness: Some(w),
        }
    }
}

fn real_coeffs(p: &MultiPoly) -> Result<Vec<C64>, RootError> {
    let c = p.univariate_coeffs()?;
    let m = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let imag = c.iter().map(|x| x.im.abs()).fold(0.0, f64::max);
    if m > 0.0 && imag > 1e-12 * m {
        return Err(RootError::NotRealCoefficient { imag: imag / m });
    }
    Ok(c.into_iter().map(|x| C64::new(x.re, 0.0)).collect())
}

/// Real-rootedness of `r` and `q` and alternation of their sorted roots.
///
/// Let `D(x)` count the roots of `r` below `x` minus those of `q`. The roots
/// interlace exactly when `D`, read between coincident-root groups, stays
/// within two adjacent integers. Groups holding roots of both polynomials, or
/// a multiple root, make the verdict weak.
pub fn real_rooted_and_interlace(
    r: &MultiPoly,
    q: &MultiPoly,
    opts: &RootOptions,
) -> Result<InterlacingVerdict, RootError> {
    let cr = real_coeffs(r)?;
    let cq = real_coeffs(q)?;
    if r.is_zero() || q.is_zero() {
        return Ok(InterlacingVerdict::ok(false));
    }
    let rr = roots_of_coeffs(&cr, opts)?;
    let rq = roots_of_coeffs(&cq, opts)?;
    let mut labelled: Vec<(f64, usize, usize, f64)> = Vec::new();
    for (which, set, a) in [(0usize, &rr, &cr), (1, &rq, &cq)] {
        for root in &set.roots {
            if !numerically_real(a, root, opts) {
                return Ok(InterlacingVerdict::fails(InterlaceWitness::NonReal {
                    which,
                    root: root.value,
                }));
            }
            labelled.push((
                root.value.re,
                which,
                root.multiplicity,
                root_uncertainty(a, root),
            ));
        }
    }
    let (dr, dq) = (rr.degree(), rq.degree());
    if dr.abs_diff(dq) > 1 {
        return Ok(InterlacingVerdict::fails(InterlaceWitness::DegreeGap {
            first: dr,
            second: dq,
        }));
    }
    labelled.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Roots whose uncertainty intervals overlap form one tie group.
    let mut groups: Vec<(f64, [usize; 2])> = Vec::new();
    let mut right = f64::NEG_INFINITY;
    for (x, which, m, rad) in labelled {
        let rad = rad.max(0.5 * opts.cluster_tol * x.abs().max(1.0));
        match groups.last_mut() {
            Some((_, counts)) if x - rad <= right => counts[which] += m,
            _ => {
                let mut counts = [0, 0];
                counts[which] = m;
                groups.push((x, counts));
            }
        }
        right = right.max(x + rad);
    }
    let mut d: i64 = 0;
    let (mut lo, mut hi) = (0i64, 0i64);
    let mut strict = true;
    for (gi, (x, counts)) in groups.iter().enumerate() {
        if counts[0] + counts[1] > 1 {
            strict = false;
        }
        d += counts[0] as i64 - counts[1] as i64;
        lo = lo.min(d);
        hi = hi.max(d);
        if hi - lo > 1 {
            // The root at `x` arrived before a root of the other polynomial.
            let need = if d > 0 { 1 } else { 0 };
            let next = groups[gi + 1..]
                .iter()
                .find(|(_, c)| c[need] > 0)
                .map(|(y, _)| *y);
            let (left, right) = match next {
                Some(y) => (*x, y),
                None => (groups[gi.saturating_sub(1)].0, *x),
            };
            return Ok(InterlacingVerdict::fails(InterlaceWitness::OutOfOrder {
                left,
                right,
            }));
        }
    }
    Ok(InterlacingVerdict::ok(strict))
}

/// Monic polynomial with the given roots, ascending coefficients.
pub fn poly_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![ZERO; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= ck * r;
        }
        c = next;
    }
    c
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::numkernel::{herm_eigvals, CMatrix};
    use crate::randmat;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn up(coeffs: &[(f64, f64)]) -> MultiPoly {
        MultiPoly::from_univariate(&coeffs.iter().map(|&(a, b)| c(a, b)).collect::<Vec<_>>())
    }

    fn opts() -> RootOptions {
        RootOptions::default()
    }

    #[test]
    fn roots_of_t2_plus_1() {
        let rs = roots(&up(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]), &opts()).unwrap();
        assert_eq!(rs.degree(), 2);
        let v = rs.expanded();
        assert!(v.iter().any(|z| (z - c(0.0, 1.0)).norm() < 1e-14));
        assert!(v.iter().any(|z| (z - c(0.0, -1.0)).norm() < 1e-14));
    }

    #[test]
    fn triple_root_merged() {
        let p = MultiPoly::from_univariate(&poly_from_roots(&[c(1.0, 0.0); 3]));
        let rs = roots(&p, &opts()).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].multiplicity, 3);
        assert!((rs.roots[0].value - c(1.0, 0.0)).norm() < 1e-10, "{rs:?}");
    }

    #[test]
    fn quadratic_formula_oracle() {
        // t² + it − 1: roots (−i ± √3)/2.
        let p = up(&[(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        let (a, b, cc) = (c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0));
        let disc = (b * b - 4.0 * a * cc).sqrt();
        let expect = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
        let got = roots(&p, &opts()).unwrap().expanded();
        for e in expect {
            assert!(got.iter().any(|z| (z - e).norm() < 1e-14));
            assert!((e.im + 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(
            roots(&MultiPoly::zero(1), &opts()),
            Err(RootError::ZeroPolynomial)
        );
        assert!(matches!(
            roots(&MultiPoly::var(2, 0), &opts()),
            Err(RootError::Poly(_))
        ));
    }

    #[test]
    fn zero_roots_stripped() {
        let rs = roots(
            &up(&[(0.0, 0.0), (0.0, 0.0), (-4.0, 0.0), (1.0, 0.0)]),
            &opts(),
        )
        .unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert_eq!(
            rs.roots[0],
            Root {
                value: c(0.0, 0.0),
                multiplicity: 2
            }
        );
        assert!((rs.roots[1].value - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hurwitz_cases() {
        let v = is_hurwitz_stable(&up(&[(0.0, 3.0), (1.0, 0.0)]), &opts()).unwrap();
        assert!(v.stable);
        assert!((v.margin.unwrap() + 3.0).abs() < 1e-14);
        let v = is_hurwitz_stable(&up(&[(0.0, -1.0), (1.0, 0.0)]), &opts()).unwrap();
        assert!(!v.stable);
        assert!((v.witness.unwrap() - c(0.0, 1.0)).norm() < 1e-14);
        let v = is_hurwitz_stable(&up(&[(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]), &opts()).unwrap();
        assert!(v.stable);
        assert!((v.margin.unwrap() + 0.5).abs() < 1e-12);
        let v = is_hurwitz_stable(&up(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]), &opts()).unwrap();
        assert!(v.stable && v.boundary);
    }

    #[test]
    fn interlacing_cases() {
        let r = up(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let q = up(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(
            real_rooted_and_interlace(&r, &q, &opts()).unwrap().verdict,
            Verdict::Strict
        );
        let r2 = up(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(
            real_rooted_and_interlace(&r2, &q, &opts()).unwrap().verdict,
            Verdict::Weak
        );
        let q2 = up(&[(-2.0, 0.0), (1.0, 0.0)]);
        let v = real_rooted_and_interlace(&r, &q2, &opts()).unwrap();
        assert_eq!(v.verdict, Verdict::Fails);
        match v.witness.unwrap() {
            InterlaceWitness::OutOfOrder { left, right } => {
                assert!((left - 1.0).abs() < 1e-12 && (right - 2.0).abs() < 1e-12);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn interlacing_rejects_nonreal_and_gaps() {
        let r = up(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let q = up(&[(0.0, 0.0), (1.0, 0.0)]);
        let v = real_rooted_and_interlace(&r, &q, &opts()).unwrap();
        assert!(matches!(
            v.witness,
            Some(InterlaceWitness::NonReal { which: 0, .. })
        ));
        let cubic =
            MultiPoly::from_univariate(&poly_from_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        let v = real_rooted_and_interlace(&cubic, &MultiPoly::one(1), &opts()).unwrap();
        assert!(matches!(
            v.witness,
            Some(InterlaceWitness::DegreeGap {
                first: 3,
                second: 0
            })
        ));
        let cplx = up(&[(0.0, 1.0), (1.0, 0.0)]);
        assert!(matches!(
            real_rooted_and_interlace(&cplx, &q, &opts()),
            Err(RootError::NotRealCoefficient { .. })
        ));
    }

    #[test]
    fn interlacing_requires_partner_at_double_root() {
        let r = up(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let v = real_rooted_and_interlace(&r, &MultiPoly::one(1), &opts()).unwrap();
        assert_eq!(v.verdict, Verdict::Fails);
    }

    /// Characteristic polynomial by Faddeev–LeVerrier, independent of the roots code.
    #[test]
    fn tiny_leading_coefficient_kept_without_trim() {
        // 1e-20 t^2 - t + 1 has roots near 1 and 1e20.
        let a = [c(1.0, 0.0), c(-1.0, 0.0), c(1e-20, 0.0)];
        assert_eq!(roots_of_coeffs(&a, &opts()).unwrap().degree(), 1);
        let keep = RootOptions {
            leading_trim: 0.0,
            ..opts()
        };
        let rs = roots_of_coeffs(&a, &keep).unwrap();
        assert_eq!(rs.degree(), 2);
        assert!(rs
            .roots
            .iter()
            .all(|r| r.value.im.abs() <= 1e-6 * r.value.norm()));
    }

    #[test]
    fn nearby_multiple_roots_stay_separate() {
        let mut rts = vec![c(2.831, 0.0); 3];
        rts.extend([c(2.869, 0.0); 2]);
        let rs = roots_of_coeffs(&poly_from_roots(&rts), &opts()).unwrap();
        let mut m: Vec<usize> = rs.roots.iter().map(|r| r.multiplicity).collect();
        m.sort();
        assert_eq!(m, vec![2, 3]);
        assert!((rs.roots[0].value - c(2.831, 0.0)).norm() < 1e-6);
        assert!((rs.roots[1].value - c(2.869, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn close_shared_roots_tie_weakly() {
        // p = (t - a)^3 (t - b)^2, q = (t - a)^2 (t - m)(t - b) with a < m < b.
        let (a, m, b) = (0.276116, 0.2773, 0.277595);
        let mut pr = vec![c(a, 0.0); 3];
        pr.extend([c(b, 0.0); 2]);
        let qr = [c(a, 0.0), c(a, 0.0), c(m, 0.0), c(b, 0.0)];
        let v = real_rooted_and_interlace(
            &MultiPoly::from_univariate(&poly_from_roots(&pr)),
            &MultiPoly::from_univariate(&poly_from_roots(&qr)),
            &opts(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Weak);
    }

    #[test]
    fn first_nonreal_root_finds_small_imaginary_part() {
        let p = MultiPoly::from_univariate(&poly_from_roots(&[
            c(1.0, 1e-3),
            c(1.0, -1e-3),
            c(3.0, 0.0),
        ]));
        let z = first_nonreal_root(&p, &opts()).unwrap().unwrap();
        assert!((z.im.abs() - 1e-3).abs() < 1e-9);
        let real = MultiPoly::from_univariate(&poly_from_roots(&[c(1.0, 0.0); 4]));
        assert_eq!(first_nonreal_root(&real, &opts()).unwrap(), None);
    }

    fn char_poly(a: &CMatrix) -> Vec<C64> {
        let n = a.rows();
        let mut coeffs = vec![c(0.0, 0.0); n + 1];
        coeffs[n] = c(1.0, 0.0);
        let mut m = CMatrix::zeros(n, n);
        let id = CMatrix::identity(n);
        for k in 1..=n {
            m = &(a * &m) + &id.scale(coeffs[n - k + 1]);
            let am = a * &m;
            coeffs[n - k] = -am.trace() / k as f64;
        }
        coeffs
    }

    #[test]
    fn eigenvalues_match_characteristic_roots() {
        for seed in 0..10 {
            let mut rng = randmat::stream(30, seed);
            let h = randmat::hermitian(&mut rng, 5);
            let ev = herm_eigvals(&h).unwrap();
            let mut rr: Vec<f64> = roots_of_coeffs(&char_poly(&h), &opts())
                .unwrap()
                .expanded()
                .iter()
                .map(|z| z.re)
                .collect();
            rr.sort_by(f64::total_cmp);
            for (x, y) in ev.iter().zip(&rr) {
                assert!((x - y).abs() < 1e-8, "{x} vs {y}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn expand_then_solve_recovers_roots(seed in 0u64..10_000, n in 1usize..=12) {
            let mut rng = randmat::stream(seed, 31);
            let mut rts: Vec<C64> = Vec::new();
            while rts.len() < n {
                let z = randmat::complex_normal(&mut rng);
                if rts.iter().all(|w| (w - z).norm() >= 1e-1) {
                    rts.push(z);
                }
            }
            let got = roots_of_coeffs(&poly_from_roots(&rts), &opts()).unwrap();
            prop_assert_eq!(got.degree(), n);
            for r in &rts {
                let best = got.expanded().iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best <= 1e-8);
            }
        }

        #[test]
        fn derivative_interlaces_real_rooted(seed in 0u64..10_000, n in 2usize..=8) {
            // Rolle: p' interlaces a real-rooted p, with ties at multiple roots.
            let mut rng = randmat::stream(seed, 33);
            let mut rts: Vec<C64> = Vec::new();
            while rts.len() < n {
                let x = (2.0 * randmat::normal(&mut rng) * 100.0).round() / 100.0;
                let m = 1 + (randmat::uniform(&mut rng, 0.0, 3.0) as usize).min(2);
                rts.extend(std::iter::repeat_n(c(x, 0.0), m.min(n - rts.len())));
            }
            let a = poly_from_roots(&rts);
            let p = MultiPoly::from_univariate(&a);
            let dp = MultiPoly::from_univariate(&derivative(&a));
            let v = real_rooted_and_interlace(&p, &dp, &opts()).unwrap();
            prop_assert_ne!(v.verdict, Verdict::Fails);
        }

        #[test]
        fn roots_continuous_under_perturbation(seed in 0u64..10_000) {
            let mut rng = randmat::stream(seed, 32);
            let rts: Vec<C64> = (0..5).map(|k| c(k as f64 - 2.0, 0.3 * randmat::normal(&mut rng))).collect();
            let mut coeffs = poly_from_roots(&rts);
            for x in coeffs.iter_mut() {
                *x += randmat::complex_normal(&mut rng) * 1e-9;
            }
            let got = roots_of_coeffs(&coeffs, &opts()).unwrap().expanded();
            for r in &rts {
                let best = got.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best <= 1e-5);
            }
        }
    }
}
