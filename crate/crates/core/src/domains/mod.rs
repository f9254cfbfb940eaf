//! Membership predicates and deterministic samplers for the bounded domains,
//! cones and tube domains.
//!
//! Every domain point is a coordinate vector in `ℂ^nvars`. Matrix domains use
//! row-major coordinates (`MatrixUhp`), the upper triangle (`SiegelUhp`) or the
//! strictly upper triangle (`SkewDomain`); the exceptional domains use the
//! 27-coordinate layout of [`crate::cayley`].

mod sample;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{
    self, build_m, build_omega, build_ppm, build_q, build_w, build_x_zeta, read_t27_pattern,
    skew_from_coords, symplectic_j, CartanBlock, CartanKind, CayleyError, EXC_DIM, EXC_VARS,
};
use crate::numkernel::{herm_eigvals, min_eig, op_norm, schur_complement, CMatrix, LinalgError};

pub use sample::{
    lie_ball_shell_point, rotation_probe, sample, RotationProbe, SampleRegion, DEFAULT_MARGIN_FLOOR,
};

/// Margin above which a point counts as a strict member.
pub const MARGIN_TOL: f64 = 1e-9;
/// Absolute tolerance for entries of a tube-side 17×17 matrix that must coincide.
pub const PATTERN_TOL: f64 = 1e-10;
/// Relative asymmetry accepted for symmetric or skew-symmetric inputs.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric (asymmetry {asym:.3e})")]
    NotSymmetric { asym: f64 },
    #[error("matrix is not skew-symmetric (asymmetry {asym:.3e})")]
    NotSkew { asym: f64 },
    #[error("matrix does not carry the exceptional tube pattern (residual {residual:.3e})")]
    PatternViolation { residual: f64 },
    #[error("first coordinate is too close to 1")]
    PoleAtOne,
    #[error("invalid domain parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cayley(CayleyError),
}

impl From<CayleyError> for DomainError {
    fn from(e: CayleyError) -> Self {
        match e {
            CayleyError::PoleAtOne => DomainError::PoleAtOne,
            CayleyError::NotSkew { asym } => DomainError::NotSkew { asym },
            CayleyError::PatternViolation { residual } => {
                DomainError::PatternViolation { residual }
            }
            CayleyError::DimMismatch { expected, got } => {
                DomainError::DimMismatch { expected, got }
            }
            CayleyError::Linalg(l) => DomainError::Linalg(l),
            other => DomainError::Cayley(other),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Open unit polydisk `𝔻^d`.
    PolyDisk { d: usize },
    /// `ℍ^d = ℝ^d + i(0,∞)^d`.
    HalfPlaneTube { d: usize },
    /// Lie ball `Lₙ ⊂ ℂⁿ`.
    LieBall { n: usize },
    /// Lorentz cone `𝒞ₙ ⊂ ℝⁿ` (points given with zero imaginary part).
    LorentzCone { n: usize },
    /// Tube `ℝⁿ + i𝒞ₙ`.
    LorentzTube { n: usize },
    /// `l×l` complex matrices with `Im Z ≻ 0`.
    MatrixUhp { l: usize },
    /// Symmetric `s×s` matrices with `Im Z ≻ 0`.
    SiegelUhp { s: usize },
    /// Skew-symmetric `2n×2n` matrices `W` with `Im JW ≻ 0`.
    SkewDomain { n: usize },
    /// Cartesian product; a point is the concatenation of factor points.
    CartanProduct { factors: Vec<DomainSpec> },
    /// `{ζ ∈ ℂ²⁷ : ‖X(ζ)‖ < 1}`.
    BoundedExceptional27 {},
    /// `{w ∈ ℂ²⁷ : Im Ω₁(w) ≻ 0}`.
    ExceptionalTube27 {},
}

impl DomainSpec {
    pub fn nvars(&self) -> usize {
        match self {
            DomainSpec::PolyDisk { d } | DomainSpec::HalfPlaneTube { d } => *d,
            DomainSpec::LieBall { n }
            | DomainSpec::LorentzCone { n }
            | DomainSpec::LorentzTube { n } => *n,
            DomainSpec::MatrixUhp { l } => l * l,
            DomainSpec::SiegelUhp { s } => s * (s + 1) / 2,
            DomainSpec::SkewDomain { n } => n * (2 * n - 1),
            DomainSpec::CartanProduct { factors } => factors.iter().map(DomainSpec::nvars).sum(),
            DomainSpec::BoundedExceptional27 {} | DomainSpec::ExceptionalTube27 {} => EXC_VARS,
        }
    }

    /// `true` for domains containing the origin (the bounded ones).
    pub fn is_bounded(&self) -> bool {
        match self {
            DomainSpec::PolyDisk { .. }
            | DomainSpec::LieBall { .. }
            | DomainSpec::BoundedExceptional27 {} => true,
            DomainSpec::CartanProduct { factors } => factors.iter().all(DomainSpec::is_bounded),
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |msg: &str| Err(DomainError::InvalidSpec(msg.to_string()));
        match self {
            DomainSpec::PolyDisk { d } | DomainSpec::HalfPlaneTube { d } if *d == 0 => {
                bad("d must be at least 1")
            }
            DomainSpec::LieBall { n }
            | DomainSpec::LorentzCone { n }
            | DomainSpec::LorentzTube { n }
                if *n < 2 =>
            {
                bad("n must be at least 2")
            }
            DomainSpec::MatrixUhp { l: 0 }
            | DomainSpec::SiegelUhp { s: 0 }
            | DomainSpec::SkewDomain { n: 0 } => bad("matrix size must be at least 1"),
            DomainSpec::CartanProduct { factors } if factors.is_empty() => bad("empty product"),
            DomainSpec::CartanProduct { factors } => {
                factors.iter().try_for_each(DomainSpec::validate)
            }
            _ => Ok(()),
        }
    }

    /// Membership with the default characterization of each domain.
    pub fn contains(&self, p: &[C64]) -> Result<MembershipReport, DomainError> {
        self.validate()?;
        check_len(p, self.nvars())?;
        match self {
            DomainSpec::PolyDisk { .. } => Ok(in_polydisk(p)),
            DomainSpec::HalfPlaneTube { .. } => Ok(in_halfplane_tube(p)),
            DomainSpec::LieBall { .. } => in_lie_ball(p, LieBallMethod::EigFormula),
            DomainSpec::LorentzCone { .. } => {
                let x: Vec<f64> = p.iter().map(|z| z.re).collect();
                let mut r = in_lorentz_cone(&x);
                if p.iter().any(|z| z.im != 0.0) {
                    r = MembershipReport::new(f64::NEG_INFINITY, "real_part_required");
                }
                Ok(r)
            }
            DomainSpec::LorentzTube { .. } => in_lorentz_tube(p),
            DomainSpec::MatrixUhp { l } => {
                in_matrix_uhp(&CMatrix::from_fn(*l, *l, |a, b| p[a * l + b]), false)
            }
            DomainSpec::SiegelUhp { s } => {
                let blk = CartanBlock {
                    kind: CartanKind::Symmetric,
                    size: *s,
                    mult: 1,
                };
                in_matrix_uhp(&blk.matrix(p), true)
            }
            DomainSpec::SkewDomain { n } => in_skew_domain(&skew_from_coords(2 * n, p)),
            DomainSpec::CartanProduct { factors } => {
                let mut off = 0;
                let mut worst: Option<MembershipReport> = None;
                for f in factors {
                    let r = f.contains(&p[off..off + f.nvars()])?;
                    off += f.nvars();
                    if worst.as_ref().is_none_or(|w| r.margin < w.margin) {
                        worst = Some(r);
                    }
                }
                let w = worst.expect("nonempty product");
                Ok(MembershipReport::new(w.margin, "product_min"))
            }
            DomainSpec::BoundedExceptional27 {} => in_exceptional_bounded(p),
            DomainSpec::ExceptionalTube27 {} => in_exceptional_tube_coords(p),
        }
    }
}

fn check_len(p: &[C64], n: usize) -> Result<(), DomainError> {
    if p.len() == n {
        Ok(())
    } else {
        Err(DomainError::DimMismatch {
            expected: n,
            got: p.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    /// Strict membership: `margin > MARGIN_TOL`.
    pub inside: bool,
    /// Signed certificate: minimal eigenvalue of the defining positive
    /// condition, or one minus the defining norm.
    pub margin: f64,
    /// `|margin| ≤ MARGIN_TOL`.
    pub boundary: bool,
    pub method: String,
}

impl MembershipReport {
    pub fn new(margin: f64, method: &str) -> Self {
        MembershipReport {
            inside: margin > MARGIN_TOL,
            margin,
            boundary: margin.abs() <= MARGIN_TOL,
            method: method.to_string(),
        }
    }
}

pub fn in_polydisk(z: &[C64]) -> MembershipReport {
    let m = z
        .iter()
        .map(|x| 1.0 - x.norm())
        .fold(f64::INFINITY, f64::min);
    MembershipReport::new(m, "max_modulus")
}

pub fn in_halfplane_tube(z: &[C64]) -> MembershipReport {
    let m = z.iter().map(|x| x.im).fold(f64::INFINITY, f64::min);
    MembershipReport::new(m, "min_imaginary_part")
}

/// `x₁ > 0` and `x₁² - Σ_{j≥2} xⱼ² > 0`; margin is the smaller of the two.
pub fn in_lorentz_cone(x: &[f64]) -> MembershipReport {
    let q = x[0] * x[0] - x[1..].iter().map(|v| v * v).sum::<f64>();
    MembershipReport::new(x[0].min(q), "defining_inequalities")
}

/// `Im W(w) ≻ 0`; margin is `λ_min(Im W(w)) = Im w₁ - ‖Im w_{2..n}‖`.
pub fn in_lorentz_tube(w: &[C64]) -> Result<MembershipReport, DomainError> {
    if w.len() < 2 {
        return Err(DomainError::DimMismatch {
            expected: 2,
            got: w.len(),
        });
    }
    let m = min_eig(&build_w(w).im_part())?;
    Ok(MembershipReport::new(m, "im_w_eig"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LieBallMethod {
    /// `‖z‖² + sqrt(‖z‖⁴ - |Σzⱼ²|²) < 1`.
    EigFormula,
    /// `M(z) < I`.
    MMatrix,
    /// `‖Q(z)‖ < 1`.
    QContraction,
    /// `P₊(z)*P₊(z) - P₋(z)*P₋(z) ≻ 0`.
    PpmPencil,
}

impl LieBallMethod {
    pub const ALL: [LieBallMethod; 4] = [
        LieBallMethod::EigFormula,
        LieBallMethod::MMatrix,
        LieBallMethod::QContraction,
        LieBallMethod::PpmPencil,
    ];

    fn name(self) -> &'static str {
        match self {
            LieBallMethod::EigFormula => "eig_formula",
            LieBallMethod::MMatrix => "m_matrix",
            LieBallMethod::QContraction => "q_contraction",
            LieBallMethod::PpmPencil => "ppm_pencil",
        }
    }
}

/// `‖z‖² + sqrt(‖z‖⁴ - |Σzⱼ²|²)`.
pub fn lie_norm_sq(z: &[C64]) -> f64 {
    let n2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    let s: C64 = z.iter().map(|x| x * x).sum();
    n2 + (n2 * n2 - s.norm_sqr()).max(0.0).sqrt()
}

pub fn in_lie_ball(z: &[C64], method: LieBallMethod) -> Result<MembershipReport, DomainError> {
    if z.len() < 2 {
        return Err(DomainError::DimMismatch {
            expected: 2,
            got: z.len(),
        });
    }
    let needs_pole_check = matches!(
        method,
        LieBallMethod::QContraction | LieBallMethod::PpmPencil
    );
    if needs_pole_check && (C64::new(1.0, 0.0) - z[0]).norm() < cayley::POLE_TOL {
        return Err(DomainError::PoleAtOne);
    }
    let margin = match method {
        LieBallMethod::EigFormula => 1.0 - lie_norm_sq(z),
        LieBallMethod::MMatrix => {
            let ev = herm_eigvals(&build_m(z))?;
            1.0 - ev.last().copied().unwrap_or(0.0)
        }
        LieBallMethod::QContraction => 1.0 - op_norm(&build_q(z)?),
        LieBallMethod::PpmPencil => {
            let (pp, pm) = build_ppm(z);
            min_eig(&(&(&pp.adjoint() * &pp) - &(&pm.adjoint() * &pm)))?
        }
    };
    Ok(MembershipReport::new(margin, method.name()))
}

/// `Im Z ≻ 0`, optionally requiring `Z = Zᵀ` (Siegel upper half space).
pub fn in_matrix_uhp(z: &CMatrix, symmetric: bool) -> Result<MembershipReport, DomainError> {
    if !z.is_square() {
        return Err(DomainError::DimMismatch {
            expected: z.rows(),
            got: z.cols(),
        });
    }
    if symmetric {
        let asym = z.max_abs_diff(&z.transpose()) / z.max_abs().max(1.0);
        if asym > SYMMETRY_TOL {
            return Err(DomainError::NotSymmetric { asym });
        }
    }
    let m = min_eig(&z.im_part())?;
    Ok(MembershipReport::new(
        m,
        if symmetric { "siegel_im_eig" } else { "im_eig" },
    ))
}

/// `Im JW ≻ 0` on skew-symmetric `W`.
pub fn in_skew_domain(w: &CMatrix) -> Result<MembershipReport, DomainError> {
    if !w.is_square() || !w.rows().is_multiple_of(2) {
        return Err(DomainError::DimMismatch {
            expected: w.rows() + w.rows() % 2,
            got: w.cols(),
        });
    }
    let asym = cayley::skew_residual(w);
    if asym > SYMMETRY_TOL {
        return Err(DomainError::NotSkew { asym });
    }
    let j = symplectic_j(w.rows() / 2);
    let m = min_eig(&(&j * w).im_part())?;
    Ok(MembershipReport::new(m, "im_jw_eig"))
}

/// `‖X(ζ)‖ < 1`.
pub fn in_exceptional_bounded(zeta: &[C64]) -> Result<MembershipReport, DomainError> {
    let x = build_x_zeta(zeta)?;
    Ok(MembershipReport::new(1.0 - op_norm(&x), "x_zeta_norm"))
}

/// Tube side on a 17×17 matrix: the pattern is validated, then `Im W ≻ 0`.
pub fn in_exceptional_tube(w: &CMatrix) -> Result<MembershipReport, DomainError> {
    let (_, residual) = read_t27_pattern(w)?;
    if residual > PATTERN_TOL {
        return Err(DomainError::PatternViolation { residual });
    }
    let m = min_eig(&w.im_part())?;
    Ok(MembershipReport::new(m, "im_omega_eig"))
}

/// Tube side on coordinates: `Im Ω₁(w) ≻ 0`.
pub fn in_exceptional_tube_coords(w: &[C64]) -> Result<MembershipReport, DomainError> {
    let o = build_omega(w)?;
    let m = min_eig(&o[0].im_part())?;
    Ok(MembershipReport::new(m, "im_omega_eig"))
}

/// Smallest eigenvalues of the three real 17×17 forms `Ω₁(y), Ω₂(y), Ω₃(y)`
/// for `y ∈ ℝ²⁷`; the three positivity verdicts coincide.
pub fn t27_predicates(y: &[f64]) -> Result<[f64; 3], DomainError> {
    if y.len() != EXC_VARS {
        return Err(DomainError::DimMismatch {
            expected: EXC_VARS,
            got: y.len(),
        });
    }
    let w: Vec<C64> = y.iter().map(|&v| C64::new(v, 0.0)).collect();
    let o = build_omega(&w)?;
    Ok([min_eig(&o[0])?, min_eig(&o[1])?, min_eig(&o[2])?])
}

/// The Schur-complement step relating the first two real forms.
#[derive(Clone, Debug, PartialEq)]
pub struct T27SchurStep {
    /// Complement of `Ω₁(y)` after eliminating the trailing `y₃₃I₈` block.
    pub first: CMatrix,
    /// Complement of `Ω₂(y)` after eliminating the same block.
    pub second: CMatrix,
    /// The rearranged 9×9 form built with the switch identity:
    /// `[[y₂₂ - y₂₃ᵀy₂₃/y₃₃, y₁₂ᵀ - y₂₃ᵀY(y₁₃)ᵀT₁/y₃₃], [·, (y₁₁ - y₁₃ᵀy₁₃/y₃₃)I₈]]`.
    pub switched: CMatrix,
}

pub fn t27_schur_step(y: &[f64]) -> Result<T27SchurStep, DomainError> {
    if y.len() != EXC_VARS {
        return Err(DomainError::DimMismatch {
            expected: EXC_VARS,
            got: y.len(),
        });
    }
    let w: Vec<C64> = y.iter().map(|&v| C64::new(v, 0.0)).collect();
    let o = build_omega(&w)?;
    let first = schur_complement(&o[0], 9..EXC_DIM)?;
    let second = schur_complement(&o[1], 9..EXC_DIM)?;
    let y33 = y[26];
    let y12 = &w[1..9];
    let y13 = &w[9..17];
    let y23 = &w[18..26];
    let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, z)| x * z).sum::<C64>();
    let v = (&cayley::t_matrix(0) * &cayley::build_y(y13)).matvec(y23);
    let corner = w[17] - dot(y23, y23) / y33;
    let diag = w[0] - dot(y13, y13) / y33;
    let switched = CMatrix::from_fn(9, 9, |a, b| match (a, b) {
        (0, 0) => corner,
        (0, b) => y12[b - 1] - v[b - 1] / y33,
        (a, 0) => y12[a - 1] - v[a - 1] / y33,
        (a, b) if a == b => diag,
        _ => C64::new(0.0, 0.0),
    });
    Ok(T27SchurStep {
        first,
        second,
        switched,
    })
}
