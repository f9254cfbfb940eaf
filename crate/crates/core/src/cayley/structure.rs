//! Matrix-valued structure maps `z ↦ L(z)` that enter determinantal pencils.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{
    build_ppm, build_q, build_w, symplectic_j, CayleyError, OmegaSelector, EXC_VARS, ONE, ZERO,
};
use crate::numkernel::CMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CartanKind {
    /// Arbitrary `l×l` matrix variable, `l²` coordinates in row-major order.
    Full,
    /// Symmetric `s×s` matrix variable, upper triangle `i ≤ j` in row-major order.
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanBlock {
    pub kind: CartanKind,
    pub size: usize,
    /// Tensor multiplicity `t`: the block enters as `Z ⊗ I_t`.
    pub mult: usize,
}

impl CartanBlock {
    pub fn nvars(&self) -> usize {
        match self.kind {
            CartanKind::Full => self.size * self.size,
            CartanKind::Symmetric => self.size * (self.size + 1) / 2,
        }
    }

    /// The matrix variable built from its coordinates.
    pub fn matrix(&self, z: &[C64]) -> CMatrix {
        let s = self.size;
        match self.kind {
            CartanKind::Full => CMatrix::from_fn(s, s, |a, b| z[a * s + b]),
            CartanKind::Symmetric => {
                CMatrix::from_fn(s, s, |a, b| z[sym_index(s, a.min(b), a.max(b))])
            }
        }
    }

    /// Coordinates of a matrix variable; the inverse of [`CartanBlock::matrix`]
    /// on matrices of the right kind.
    pub fn coords(&self, m: &CMatrix) -> Vec<C64> {
        let s = self.size;
        match self.kind {
            CartanKind::Full => m.data().to_vec(),
            CartanKind::Symmetric => (0..s)
                .flat_map(|a| (a..s).map(move |b| (a, b)))
                .map(|(a, b)| m[(a, b)])
                .collect(),
        }
    }
}

fn sym_index(s: usize, a: usize, b: usize) -> usize {
    a * s + b - a * (a + 1) / 2
}

/// Skew-symmetric `m×m` matrix from its strictly upper coordinates `z_ij`, `i < j`, row-major.
pub fn skew_from_coords(m: usize, z: &[C64]) -> CMatrix {
    let mut out = CMatrix::zeros(m, m);
    let mut k = 0;
    for a in 0..m {
        for b in a + 1..m {
            out[(a, b)] = z[k];
            out[(b, a)] = -z[k];
            k += 1;
        }
    }
    out
}

/// Strictly upper coordinates of a square matrix, row-major.
pub fn skew_coords(z: &CMatrix) -> Vec<C64> {
    let m = z.rows();
    (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .map(|(a, b)| z[(a, b)])
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum StructureMap {
    /// `Z_N(z) = ⊕ zⱼ I_{Nⱼ}`.
    DiagonalZn { n: Vec<usize> },
    /// `⊕ Z_q ⊗ I_{t_q}` over full or symmetric matrix variables.
    CartanBlocks { blocks: Vec<CartanBlock> },
    /// `ZJ ⊗ I_mult` for a skew-symmetric `2n×2n` variable `Z`.
    SkewZj { n: usize, mult: usize },
    /// `W(w) ⊗ I_k` on `ℂⁿ`.
    LorentzW { n: usize, k: usize },
    /// The pair `(P₊(z) ⊗ I_k, P₋(z) ⊗ I_k)`; `apply` returns `Q(z) ⊗ I_k`.
    LiePpm { n: usize, k: usize },
    /// The exceptional `Ω(w) ⊗ I_k` summands on `ℂ²⁷`.
    ExceptionalOmega { selector: OmegaSelector, k: usize },
}

impl StructureMap {
    pub fn nvars(&self) -> usize {
        match self {
            StructureMap::DiagonalZn { n } => n.len(),
            StructureMap::CartanBlocks { blocks } => blocks.iter().map(CartanBlock::nvars).sum(),
            StructureMap::SkewZj { n, .. } => n * (2 * n - 1),
            StructureMap::LorentzW { n, .. } | StructureMap::LiePpm { n, .. } => *n,
            StructureMap::ExceptionalOmega { .. } => EXC_VARS,
        }
    }

    /// Side length of `L(z)`.
    pub fn dim(&self) -> usize {
        match self {
            StructureMap::DiagonalZn { n } => n.iter().sum(),
            StructureMap::CartanBlocks { blocks } => blocks.iter().map(|b| b.size * b.mult).sum(),
            StructureMap::SkewZj { n, mult } => 2 * n * mult,
            StructureMap::LorentzW { n, k } | StructureMap::LiePpm { n, k } => n * k,
            StructureMap::ExceptionalOmega { selector, k } => selector.dim() * k,
        }
    }

    /// `true` when `L` is linear in `z`, i.e. everything except `LiePpm`.
    pub fn is_linear(&self) -> bool {
        !matches!(self, StructureMap::LiePpm { .. })
    }

    /// Rejects empty or zero-sized structures.
    pub fn validate(&self) -> Result<(), CayleyError> {
        let ok = match self {
            StructureMap::DiagonalZn { n } => !n.is_empty() && n.iter().all(|&x| x >= 1),
            StructureMap::CartanBlocks { blocks } => {
                !blocks.is_empty() && blocks.iter().all(|b| b.size >= 1 && b.mult >= 1)
            }
            StructureMap::SkewZj { n, mult } => *n >= 1 && *mult >= 1,
            StructureMap::LorentzW { n, k } | StructureMap::LiePpm { n, k } => *n >= 2 && *k >= 1,
            StructureMap::ExceptionalOmega { k, .. } => *k >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(CayleyError::DimMismatch {
                expected: 1,
                got: 0,
            })
        }
    }

    fn check(&self, z: &[C64]) -> Result<(), CayleyError> {
        self.validate()?;
        super::check_len(z, self.nvars())
    }

    /// The structured matrix `L(z)`.
    pub fn apply(&self, z: &[C64]) -> Result<CMatrix, CayleyError> {
        self.check(z)?;
        Ok(match self {
            StructureMap::DiagonalZn { n } => {
                let diag: Vec<C64> = n
                    .iter()
                    .zip(z)
                    .flat_map(|(&m, &v)| std::iter::repeat_n(v, m))
                    .collect();
                CMatrix::diag(&diag)
            }
            StructureMap::CartanBlocks { blocks } => {
                let mut off = 0;
                let parts: Vec<CMatrix> = blocks
                    .iter()
                    .map(|b| {
                        let m = b.matrix(&z[off..off + b.nvars()]).kron_identity(b.mult);
                        off += b.nvars();
                        m
                    })
                    .collect();
                CMatrix::block_diag(&parts)
            }
            StructureMap::SkewZj { n, mult } => {
                (&skew_from_coords(2 * n, z) * &symplectic_j(*n)).kron_identity(*mult)
            }
            StructureMap::LorentzW { k, .. } => build_w(z).kron_identity(*k),
            StructureMap::LiePpm { k, .. } => build_q(z)?.kron_identity(*k),
            StructureMap::ExceptionalOmega { selector, k } => selector.select(z)?.kron_identity(*k),
        })
    }

    /// `(S(z), T(z))` with bounded-side pencil `det(S(z) - K T(z))`:
    /// `(P₊ ⊗ I_k, P₋ ⊗ I_k)` for `LiePpm`, `(I, L(z))` otherwise.
    pub fn apply_pair(&self, z: &[C64]) -> Result<(CMatrix, CMatrix), CayleyError> {
        match self {
            StructureMap::LiePpm { k, .. } => {
                self.check(z)?;
                let (p, m) = build_ppm(z);
                Ok((p.kron_identity(*k), m.kron_identity(*k)))
            }
            _ => Ok((CMatrix::identity(self.dim()), self.apply(z)?)),
        }
    }

    /// Coefficient matrices `Aⱼ = L(eⱼ)` of a linear structure.
    pub fn coefficients(&self) -> Result<Vec<CMatrix>, CayleyError> {
        if !self.is_linear() {
            return Err(CayleyError::NotLinear);
        }
        let d = self.nvars();
        (0..d)
            .map(|j| {
                let e: Vec<C64> = (0..d).map(|i| if i == j { ONE } else { ZERO }).collect();
                self.apply(&e)
            })
            .collect()
    }
}
