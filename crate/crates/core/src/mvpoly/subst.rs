use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Accum, MultiPoly, PolyError, ONE, ZERO};

/// Which scalar Cayley map is substituted into every variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobiusDirection {
    /// `z ↦ i(1+z)/(1-z)`, cleared by `Π (1 - z_j)^{n_j}`.
    DiscToHalfPlane,
    /// `z ↦ (z-i)/(z+i)`, cleared by `Π (z_j + i)^{n_j}`.
    HalfPlaneToDisc,
}

/// Coefficients of `a * b` as univariate polynomials.
pub(crate) fn upoly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn upoly_pow(a: &[C64], k: u32) -> Vec<C64> {
    let mut out = vec![ONE];
    for _ in 0..k {
        out = upoly_mul(&out, a);
    }
    out
}

/// Coefficients of `(x + t y)^k`.
fn binomial_expand(x: C64, y: C64, k: u32) -> Vec<C64> {
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut binom = 1.0f64;
    for i in 0..=k {
        out.push(x.powu(k - i) * y.powu(i) * binom);
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    out
}

impl MultiPoly {
    /// `t ↦ p(x + t y)` for real `x`, `y`.
    pub fn line_restrict(&self, x: &[f64], y: &[f64]) -> Result<MultiPoly, PolyError> {
        let xc: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        let yc: Vec<C64> = y.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.affine_restrict(&xc, &yc)
    }

    /// `t ↦ p(x + t y)` for complex `x`, `y`, expanded term by term.
    pub fn affine_restrict(&self, x: &[C64], y: &[C64]) -> Result<MultiPoly, PolyError> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let n = self.total_degree() as usize;
        let mut val = vec![ZERO; n + 1];
        let mut mag = vec![0.0f64; n + 1];
        for (e, c) in &self.terms {
            let mut f = vec![*c];
            let mut fa = vec![c.norm()];
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let b = binomial_expand(x[j], y[j], k);
                let ba: Vec<C64> = b.iter().map(|z| C64::new(z.norm(), 0.0)).collect();
                f = upoly_mul(&f, &b);
                let fa_c: Vec<C64> = fa.iter().map(|&v| C64::new(v, 0.0)).collect();
                fa = upoly_mul(&fa_c, &ba).iter().map(|z| z.re).collect();
            }
            for (i, (v, m)) in f.iter().zip(&fa).enumerate() {
                val[i] += v;
                mag[i] += m;
            }
        }
        let mut acc = Accum::default();
        for (i, (v, m)) in val.into_iter().zip(mag).enumerate() {
            acc.add(vec![i as u32], v, m);
        }
        Ok(acc.finish(1))
    }

    /// Substitutes the scalar Cayley map into every variable and clears the
    /// denominators with the declared per-variable degrees.
    pub fn mobius_substitute(
        &self,
        degrees: &[u32],
        direction: MobiusDirection,
    ) -> Result<MultiPoly, PolyError> {
        self.check_dim(degrees.len())?;
        let i = C64::new(0.0, 1.0);
        let (num, den): (Vec<C64>, Vec<C64>) = match direction {
            MobiusDirection::DiscToHalfPlane => (vec![i, i], vec![ONE, -ONE]),
            MobiusDirection::HalfPlaneToDisc => (vec![-i, ONE], vec![i, ONE]),
        };
        let d = self.nvars;
        // factors[j][a] = num^a den^(n_j - a), built lazily per exponent.
        let mut cache: Vec<std::collections::HashMap<u32, Vec<C64>>> = vec![Default::default(); d];
        let mut acc = Accum::default();
        for (e, c) in &self.terms {
            for (j, (&a, &nj)) in e.iter().zip(degrees).enumerate() {
                if a > nj {
                    return Err(PolyError::DegreeTooSmall {
                        var: j,
                        degree: a,
                        bound: nj,
                    });
                }
                cache[j]
                    .entry(a)
                    .or_insert_with(|| upoly_mul(&upoly_pow(&num, a), &upoly_pow(&den, nj - a)));
            }
            // Tensor product of the univariate factors.
            let mut partial: Vec<(Vec<u32>, C64)> = vec![(Vec::with_capacity(d), *c)];
            for (j, &a) in e.iter().enumerate() {
                let f = &cache[j][&a];
                let mut next = Vec::with_capacity(partial.len() * f.len());
                for (ex, v) in &partial {
                    for (k, fk) in f.iter().enumerate() {
                        if *fk == ZERO {
                            continue;
                        }
                        let mut ex2 = ex.clone();
                        ex2.push(k as u32);
                        next.push((ex2, v * fk));
                    }
                }
                partial = next;
            }
            for (ex, v) in partial {
                let m = v.norm();
                acc.add(ex, v, m);
            }
        }
        Ok(acc.finish(d))
    }
}
