//! Sparse multivariable polynomials with complex coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration and
//! serialisation order is the lexicographic order of exponents.
//!
//! Arithmetic drops a coefficient when it is the result of cancellation:
//! `|c| <= PRUNE_REL * Σ|contributions|`. This keeps tiny but genuine
//! coefficients (a leading term far below the constant term, say) while
//! removing rounding residue.

mod interp;
mod subst;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkernel::LinalgError;

pub use interp::{interpolate_fn, interpolate_from_grid, Grid, NodeFamily};
pub use subst::MobiusDirection;

/// Relative cancellation threshold used after arithmetic.
pub const PRUNE_REL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("variable {var} has degree {degree} but the declared bound is {bound}")]
    DegreeTooSmall { var: usize, degree: u32, bound: u32 },
    #[error("interpolation nodes for variable {var} are not distinct")]
    DuplicateNodes { var: usize },
    #[error("grid shape mismatch: {0}")]
    GridShape(String),
    #[error("expected a univariate polynomial, got {nvars} variables")]
    NotUnivariate { nvars: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Per-variable degrees and total degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiDegree {
    pub per_var: Vec<u32>,
    pub total: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

/// Accumulates coefficients together with the magnitude of everything that
/// was summed into them, for cancellation-aware pruning.
#[derive(Default)]
pub(crate) struct Accum {
    map: BTreeMap<Vec<u32>, (C64, f64)>,
}

impl Accum {
    pub(crate) fn add(&mut self, exp: Vec<u32>, c: C64, mag: f64) {
        let e = self.map.entry(exp).or_insert((ZERO, 0.0));
        e.0 += c;
        e.1 += mag;
    }

    pub(crate) fn finish(self, nvars: usize) -> MultiPoly {
        let terms = self
            .map
            .into_iter()
            .filter(|(_, (c, mag))| *c != ZERO && c.norm() > PRUNE_REL * mag)
            .map(|(e, (c, _))| (e, c))
            .collect();
        MultiPoly { nvars, terms }
    }
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if c != ZERO {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MultiPoly::constant(nvars, ONE)
    }

    /// The coordinate function `z_j`.
    pub fn var(nvars: usize, j: usize) -> Self {
        assert!(j < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[j] = 1;
        let mut p = MultiPoly::zero(nvars);
        p.terms.insert(e, ONE);
        p
    }

    /// Sums the given terms; exact zeros are dropped.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        let mut map: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::DimMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(PolyError::NonFinite);
            }
            *map.entry(e).or_insert(ZERO) += c;
        }
        map.retain(|_, c| *c != ZERO);
        Ok(MultiPoly { nvars, terms: map })
    }

    /// `Σ coeffs[k] t^k`.
    pub fn from_univariate(coeffs: &[C64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, &c)| (vec![k as u32], c))
            .collect();
        MultiPoly { nvars: 1, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> C64 {
        self.terms.get(exp).copied().unwrap_or(ZERO)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn multidegree(&self) -> MultiDegree {
        let mut per_var = vec![0u32; self.nvars];
        let mut total = 0;
        for e in self.terms.keys() {
            for (d, &x) in per_var.iter_mut().zip(e) {
                *d = (*d).max(x);
            }
            total = total.max(e.iter().sum());
        }
        MultiDegree { per_var, total }
    }

    pub fn total_degree(&self) -> u32 {
        self.multidegree().total
    }

    fn check_dim(&self, n: usize) -> Result<(), PolyError> {
        if n == self.nvars {
            Ok(())
        } else {
            Err(PolyError::DimMismatch {
                expected: self.nvars,
                got: n,
            })
        }
    }

    fn powers(&self, z: &[C64]) -> Vec<Vec<C64>> {
        let deg = self.multidegree().per_var;
        z.iter()
            .zip(&deg)
            .map(|(&x, &d)| {
                let mut pw = Vec::with_capacity(d as usize + 1);
                let mut acc = ONE;
                for _ in 0..=d {
                    pw.push(acc);
                    acc *= x;
                }
                pw
            })
            .collect()
    }

    /// Term-by-term evaluation with per-variable power tables.
    pub fn eval(&self, z: &[C64]) -> Result<C64, PolyError> {
        self.check_dim(z.len())?;
        let pw = self.powers(z);
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .fold(*c, |acc, (j, &k)| acc * pw[j][k as usize])
            })
            .sum())
    }

    /// `Σ |c_a| |z^a|`, the natural scale for the rounding error of `eval`.
    pub fn eval_abs(&self, z: &[C64]) -> Result<f64, PolyError> {
        self.check_dim(z.len())?;
        let pw = self.powers(z);
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .fold(c.norm(), |acc, (j, &k)| acc * pw[j][k as usize].norm())
            })
            .sum())
    }

    /// Value and gradient at `z`.
    pub fn eval_grad(&self, z: &[C64]) -> Result<(C64, Vec<C64>), PolyError> {
        self.check_dim(z.len())?;
        let pw = self.powers(z);
        let mut val = ZERO;
        let mut grad = vec![ZERO; self.nvars];
        for (e, c) in &self.terms {
            val += e
                .iter()
                .enumerate()
                .fold(*c, |acc, (j, &k)| acc * pw[j][k as usize]);
            for (j, g) in grad.iter_mut().enumerate() {
                if e[j] == 0 {
                    continue;
                }
                let mut t = *c * e[j] as f64;
                for (l, &k) in e.iter().enumerate() {
                    let k = if l == j { k - 1 } else { k };
                    t *= pw[l][k as usize];
                }
                *g += t;
            }
        }
        Ok((val, grad))
    }

    /// The degree `i` homogeneous component.
    pub fn homogeneous_part(&self, i: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() == i)
            .map(|(e, c)| (e.clone(), *c))
            .collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// `P(μ₀, z) = μ₀ⁿ p(z / μ₀)` with `μ₀` as variable 0.
    pub fn homogenize(&self) -> Self {
        let n = self.total_degree();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut f = Vec::with_capacity(self.nvars + 1);
                f.push(n - e.iter().sum::<u32>());
                f.extend_from_slice(e);
                (f, *c)
            })
            .collect();
        MultiPoly {
            nvars: self.nvars + 1,
            terms,
        }
    }

    /// Sets variable 0 to 1.
    pub fn dehomogenize(&self) -> Result<Self, PolyError> {
        if self.nvars == 0 {
            return Err(PolyError::DimMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut acc = Accum::default();
        for (e, c) in &self.terms {
            acc.add(e[1..].to_vec(), *c, c.norm());
        }
        Ok(acc.finish(self.nvars - 1))
    }

    /// `p = r + i q` with `r`, `q` real-coefficient.
    pub fn real_imag_split(&self) -> (Self, Self) {
        let pick = |f: fn(&C64) -> f64| {
            let terms = self
                .terms
                .iter()
                .filter(|(_, c)| f(c) != 0.0)
                .map(|(e, c)| (e.clone(), C64::new(f(c), 0.0)))
                .collect();
            MultiPoly {
                nvars: self.nvars,
                terms,
            }
        };
        (pick(|c| c.re), pick(|c| c.im))
    }

    pub fn conj_coeffs(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.conj()))
            .collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == ZERO {
            return MultiPoly::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = MultiPoly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Partial derivative in variable `j`.
    pub fn partial(&self, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[j] > 0)
            .map(|(e, c)| {
                let mut f = e.clone();
                f[j] -= 1;
                (f, c * e[j] as f64)
            })
            .collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Dense coefficients `[c_0, …, c_n]` of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Result<Vec<C64>, PolyError> {
        if self.nvars != 1 {
            return Err(PolyError::NotUnivariate { nvars: self.nvars });
        }
        let n = self.total_degree() as usize;
        let mut out = vec![ZERO; if self.is_zero() { 0 } else { n + 1 }];
        for (e, c) in &self.terms {
            out[e[0] as usize] = *c;
        }
        Ok(out)
    }

    /// Drops coefficients with `|c| <= tol * max|c|`.
    pub fn prune_relative(&self, tol: f64) -> Self {
        let m = self.max_abs_coeff();
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm() > tol * m)
            .map(|(e, c)| (e.clone(), *c))
            .collect();
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Largest coefficient difference in modulus.
    pub fn max_coeff_diff(&self, other: &MultiPoly) -> f64 {
        assert_eq!(self.nvars, other.nvars, "nvars mismatch");
        let mut m: f64 = 0.0;
        for (e, c) in &self.terms {
            m = m.max((c - other.coeff(e)).norm());
        }
        for (e, c) in &other.terms {
            if !self.terms.contains_key(e) {
                m = m.max(c.norm());
            }
        }
        m
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch in add");
        let mut acc = Accum::default();
        for (e, c) in self.terms.iter().chain(&rhs.terms) {
            acc.add(e.clone(), *c, c.norm());
        }
        acc.finish(self.nvars)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(-ONE)
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch in mul");
        let mut acc = Accum::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let c = ca * cb;
                acc.add(e, c, c.norm());
            }
        }
        acc.finish(self.nvars)
    }
}

/// JSON wire form shared with the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl TryFrom<PolyJson> for MultiPoly {
    type Error = PolyError;

    fn try_from(j: PolyJson) -> Result<Self, PolyError> {
        if let Some(s) = &j.schema {
            if s != crate::SCHEMA {
                return Err(PolyError::Schema(format!("unsupported schema {s:?}")));
            }
        }
        MultiPoly::from_terms(
            j.nvars,
            j.terms.into_iter().map(|t| (t.exp, C64::new(t.re, t.im))),
        )
    }
}

impl From<MultiPoly> for PolyJson {
    fn from(p: MultiPoly) -> Self {
        PolyJson {
            schema: Some(crate::SCHEMA.to_string()),
            nvars: p.nvars,
            terms: p
                .terms
                .into_iter()
                .map(|(exp, c)| TermJson {
                    exp,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}
