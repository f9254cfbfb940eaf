//! Seeded random inputs.
//!
//! Every consumer derives an independent stream per sample index from
//! `(seed, index)`, so batches are reproducible regardless of evaluation order
//! or thread count.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkernel::{matrix_cayley_inv, op_norm, CMatrix};

/// Independent generator for sample `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex normal with `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

pub fn real_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn real_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng), 0.0))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let b = matrix(rng, n, n);
    (&b + &b.adjoint()).scale(C64::new(0.5, 0.0))
}

/// Unitary obtained as the inverse Cayley transform of a random Hermitian.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let h = hermitian(rng, n);
    matrix_cayley_inv(&h).expect("H + iI is invertible for Hermitian H")
}

/// Rescales `m` to operator norm `norm` (zero stays zero).
pub fn with_norm(m: &CMatrix, norm: f64) -> CMatrix {
    let s = op_norm(m);
    if s == 0.0 {
        m.clone()
    } else {
        m.scale(C64::new(norm / s, 0.0))
    }
}

/// Random `rows x cols` matrix with operator norm exactly `norm`.
pub fn contraction<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, norm: f64) -> CMatrix {
    with_norm(&matrix(rng, rows, cols), norm)
}

/// Random complex skew-symmetric `n x n` matrix.
pub fn skew<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let b = matrix(rng, n, n);
    &b - &b.transpose()
}

pub fn skew_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize, norm: f64) -> CMatrix {
    with_norm(&skew(rng, n), norm)
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Log-uniform draw from `[lo, hi)`, both positive.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    uniform(rng, lo.ln(), hi.ln()).exp()
}
