//! Determinantal representations and stability tests for polynomials on
//! tube domains over cones.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkernel`]: dense complex linear algebra (Hermitian eigenvalues, LU,
//!   matrix Cayley transforms, Schur complements).
//! * [`mvpoly`]: sparse multivariable polynomials, Möbius substitution and
//!   tensor-grid interpolation.
//! * [`rootfind`]: Aberth–Ehrlich roots, Hurwitz classification, interlacing.
//! * [`cayley`]: the structure maps and Cayley-type transforms between bounded
//!   domains and tube domains.
//! * [`domains`]: membership predicates and deterministic samplers.
//! * [`detrep`]: constructing and verifying determinantal representations.
//! * [`stability`]: sampled stability, strictness estimates and line checks.
//! * [`suites`]: batched identity checks shared by the tests and the CLI.

pub mod cayley;
pub mod detrep;
pub mod domains;
pub mod mvpoly;
pub mod numkernel;
pub mod randmat;
pub mod rootfind;
pub mod stability;
pub mod suites;

pub use num_complex::Complex64 as C64;

/// Schema tag written into every JSON document produced by the crate.
pub const SCHEMA: &str = "tubestab/1";
