use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MultiPoly, PolyError, ZERO};
use crate::numkernel::{inverse_with, CMatrix};

/// Relative threshold, in the radius-scaled monomial basis, below which
/// interpolated coefficients are treated as zero.
pub const INTERP_PRUNE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFamily {
    /// `R e^{2πik/m}`; the scaled Vandermonde matrix is a unitary DFT.
    UnitCircle,
    /// `R cos(π(2k+1)/(2m))`, real nodes.
    Chebyshev,
}

/// Tensor grid with `degrees[j] + 1` nodes on axis `j`, last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    nodes: Vec<Vec<C64>>,
    scale: Vec<f64>,
}

impl Grid {
    pub fn new(family: NodeFamily, degrees: &[u32], radius: f64) -> Self {
        let nodes = degrees
            .iter()
            .map(|&d| {
                let m = d as usize + 1;
                (0..m)
                    .map(|k| match family {
                        NodeFamily::UnitCircle => C64::from_polar(
                            radius,
                            2.0 * std::f64::consts::PI * k as f64 / m as f64,
                        ),
                        NodeFamily::Chebyshev => C64::new(
                            radius
                                * (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * m) as f64)
                                    .cos(),
                            0.0,
                        ),
                    })
                    .collect()
            })
            .collect();
        Grid::from_nodes(nodes)
    }

    /// Grid from explicit per-axis nodes.
    pub fn from_nodes(nodes: Vec<Vec<C64>>) -> Self {
        let scale = nodes
            .iter()
            .map(|ax: &Vec<C64>| {
                ax.iter()
                    .map(|x| x.norm())
                    .fold(0.0, f64::max)
                    .max(f64::MIN_POSITIVE)
            })
            .collect();
        Grid { nodes, scale }
    }

    pub fn nvars(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Vec<C64>] {
        &self.nodes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.nodes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point number `flat` in row-major order.
    pub fn point(&self, flat: usize) -> Vec<C64> {
        let mut rem = flat;
        let mut out = vec![ZERO; self.nodes.len()];
        for (j, ax) in self.nodes.iter().enumerate().rev() {
            out[j] = ax[rem % ax.len()];
            rem /= ax.len();
        }
        out
    }

    /// Evaluates `f` at every grid point in parallel.
    pub fn evaluate<F>(&self, f: F) -> Vec<C64>
    where
        F: Fn(&[C64]) -> C64 + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|i| f(&self.point(i)))
            .collect()
    }
}

/// Coefficients of the unique polynomial with per-variable degree at most
/// `shape[j] - 1` taking `values` on the grid.
pub fn interpolate_from_grid(grid: &Grid, values: &[C64]) -> Result<MultiPoly, PolyError> {
    if values.len() != grid.len() {
        return Err(PolyError::GridShape(format!(
            "{} values for {} grid points",
            values.len(),
            grid.len()
        )));
    }
    if values
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(PolyError::NonFinite);
    }
    let shape = grid.shape();
    let mut t = values.to_vec();
    for (j, ax) in grid.nodes.iter().enumerate() {
        let m = ax.len();
        let r = grid.scale[j];
        let tol = 1e-14 * r.max(1.0);
        for a in 0..m {
            for b in a + 1..m {
                if (ax[a] - ax[b]).norm() <= tol {
                    return Err(PolyError::DuplicateNodes { var: j });
                }
            }
        }
        let v = CMatrix::from_fn(m, m, |i, k| (ax[i] / r).powu(k as u32));
        let vinv = inverse_with(&v, 1e14)?;
        let stride: usize = shape[j + 1..].iter().product();
        let outer: usize = shape[..j].iter().product();
        let mut buf = vec![ZERO; m];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * m * stride + s;
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..m).map(|i| vinv[(k, i)] * t[base + i * stride]).sum();
                }
                for (k, val) in buf.iter().enumerate() {
                    t[base + k * stride] = *val;
                }
            }
        }
    }
    let cmax = t.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut terms = Vec::new();
    for (flat, c) in t.iter().enumerate() {
        if c.norm() <= INTERP_PRUNE * cmax || *c == ZERO {
            continue;
        }
        let mut rem = flat;
        let mut exp = vec![0u32; shape.len()];
        for j in (0..shape.len()).rev() {
            exp[j] = (rem % shape[j]) as u32;
            rem /= shape[j];
        }
        let unscale: f64 = exp
            .iter()
            .zip(&grid.scale)
            .map(|(&k, &r)| r.powi(-(k as i32)))
            .product();
        terms.push((exp, c * unscale));
    }
    MultiPoly::from_terms(shape.len(), terms)
}

/// Samples `f` on a grid and interpolates.
pub fn interpolate_fn<F>(
    f: F,
    degrees: &[u32],
    family: NodeFamily,
    radius: f64,
) -> Result<MultiPoly, PolyError>
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    let grid = Grid::new(family, degrees, radius);
    let values = grid.evaluate(f);
    interpolate_from_grid(&grid, &values)
}
