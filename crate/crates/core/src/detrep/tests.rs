use num_complex::Complex64 as C64;
use proptest::prelude::*;

use super::*;
use crate::cayley::{phi_n, psi, skew_coords, StructureMap};
use crate::domains::{sample, DomainSpec, SampleRegion};
use crate::mvpoly::tests::symbolic_det;
use crate::mvpoly::{interpolate_fn, MultiPoly, NodeFamily};
use crate::numkernel::{op_norm, CMatrix};
use crate::randmat;
use crate::rootfind::{is_hurwitz_stable, RootOptions};

const IU: C64 = C64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn halfplane_point(seed: u64, i: u64, d: usize) -> Vec<C64> {
    let mut rng = randmat::stream(seed, i);
    (0..d)
        .map(|_| {
            c(
                2.0 * randmat::normal(&mut rng),
                randmat::log_uniform(&mut rng, 0.01, 5.0),
            )
        })
        .collect()
}

/// Symbolic `det(I - K Z_N(z))` by cofactor expansion.
fn cofactor_disc_poly(k: &CMatrix, n: &[usize]) -> MultiPoly {
    let d = n.len();
    let owner: Vec<usize> = n
        .iter()
        .enumerate()
        .flat_map(|(j, &s)| std::iter::repeat_n(j, s))
        .collect();
    let size = owner.len();
    let m: Vec<Vec<MultiPoly>> = (0..size)
        .map(|r| {
            (0..size)
                .map(|col| {
                    let entry = MultiPoly::var(d, owner[col]).scale(-k[(r, col)]);
                    if r == col {
                        &entry + &MultiPoly::one(d)
                    } else {
                        entry
                    }
                })
                .collect()
        })
        .collect();
    symbolic_det(&m, d)
}

#[test]
fn polydisk_zero_contraction_gives_one() {
    let (p, _) = polydisk_rep_from_contraction(&CMatrix::zeros(3, 3), &[2, 1]).unwrap();
    assert!(p.max_coeff_diff(&MultiPoly::one(2)) < 1e-14);
}

#[test]
fn polydisk_scalar_half() {
    let k = CMatrix::from_real(1, 1, &[0.5]).unwrap();
    let (p, _) = polydisk_rep_from_contraction(&k, &[1]).unwrap();
    let expected = MultiPoly::from_univariate(&[c(1.0, 0.0), c(-0.5, 0.0)]);
    assert!(p.max_coeff_diff(&expected) < 1e-15);
}

#[test]
fn polydisk_rejects_non_contraction() {
    let k = CMatrix::from_real(1, 1, &[1.0]).unwrap();
    assert!(matches!(
        polydisk_rep_from_contraction(&k, &[1]),
        Err(DetRepError::NotContraction { .. })
    ));
}

#[test]
fn polydisk_coefficients_match_cofactor_expansion() {
    let shapes: [&[usize]; 6] = [&[1], &[3], &[2, 1], &[1, 2, 3], &[3, 3], &[2, 2, 2]];
    for (i, n) in shapes.iter().enumerate() {
        let mut rng = randmat::stream(41, i as u64);
        let size: usize = n.iter().sum();
        let k = randmat::contraction(&mut rng, size, size, 0.9);
        let (p, _) = polydisk_rep_from_contraction(&k, n).unwrap();
        let oracle = cofactor_disc_poly(&k, n);
        assert!(p.max_coeff_diff(&oracle) <= 1e-9, "shape {n:?}");
        assert!((p.coeff(&vec![0; n.len()]) - 1.0).norm() < 1e-12);
    }
}

#[test]
fn cayley_push_scalar_half() {
    let k = CMatrix::from_real(1, 1, &[0.5]).unwrap();
    let rep = cayley_push_halfplane(&k, &[1]).unwrap();
    assert!((rep.a0[(0, 0)] - c(0.0, 3.0)).norm() < 1e-15);
    let pencil = MultiPoly::from_univariate(&[c(0.0, 3.0), c(1.0, 0.0)]);
    let ext = rep.extract().unwrap();
    assert!(ext.max_coeff_diff(&pencil.scale(c(0.5, 0.0))) < 1e-14);
    let v = is_hurwitz_stable(&pencil, &RootOptions::default()).unwrap();
    assert!(v.stable);
}

#[test]
fn cayley_push_zero_gives_product_of_shifts() {
    let n = [2usize, 1, 3];
    let rep = cayley_push_halfplane(&CMatrix::zeros(6, 6), &n).unwrap();
    assert!(rep.a0.max_abs_diff(&CMatrix::identity(6).scale(IU)) < 1e-15);
    for i in 0..20 {
        let w = halfplane_point(3, i, 3);
        let expected: C64 = w
            .iter()
            .zip(n)
            .map(|(x, m)| (x + IU).powu(m as u32))
            .product();
        let got = rep.eval(&w).unwrap();
        assert!((got - expected).norm() <= 1e-12 * expected.norm());
    }
}

#[test]
fn im_a0_direct_matches_factored() {
    for i in 0..100u64 {
        let mut rng = randmat::stream(5, i);
        let size = 1 + (i as usize % 6);
        let norm = randmat::uniform(&mut rng, 0.05, 0.95);
        let k = randmat::contraction(&mut rng, size, size, norm);
        let rep = cayley_push_halfplane(&k, &[size]).unwrap();
        let direct = rep.a0.im_part();
        let factored = im_a0_factored(&k).unwrap();
        assert!(direct.max_abs_diff(&factored) <= 1e-10 * factored.max_abs().max(1.0));
        assert!(rep.im_a0_min_eig().unwrap() > 0.0);
    }
}

#[test]
fn halfplane_chain_holds() {
    for i in 0..40u64 {
        let mut rng = randmat::stream(6, i);
        let n: Vec<usize> = (0..1 + i as usize % 3)
            .map(|j| 1 + (i as usize + j) % 3)
            .collect();
        let size: usize = n.iter().sum();
        let k = randmat::contraction(&mut rng, size, size, 0.9);
        let rep = cayley_push_halfplane(&k, &n).unwrap();
        for s in 0..10 {
            let w = halfplane_point(60 + i, s, n.len());
            let r = halfplane_chain(&k, &n, &rep, &w).unwrap();
            assert!(r.rel <= 1e-8, "rel {}", r.rel);
        }
    }
}

#[test]
fn lorentz2_zero_contraction() {
    let rep = lorentz2_rep_from_contraction(&CMatrix::zeros(2, 2)).unwrap();
    assert!(rep.a0.max_abs_diff(&CMatrix::identity(2).scale(IU)) < 1e-15);
    let pts = sample(
        &DomainSpec::LorentzTube { n: 2 },
        200,
        1,
        SampleRegion::Interior,
    )
    .unwrap();
    for w in pts {
        let expected = (w[0] + IU).powu(2) - w[1] * w[1];
        let got = rep.pencil_det(&w).unwrap();
        assert!((got - expected).norm() <= 1e-12 * expected.norm());
        assert!(got.norm() > 0.0);
    }
}

#[test]
fn lorentz2_nonvanishing_and_chain() {
    for i in 0..6u64 {
        let mult = 1 + i as usize % 3;
        let mut rng = randmat::stream(7, i);
        let k = randmat::contraction(&mut rng, 2 * mult, 2 * mult, 0.9);
        let rep = lorentz2_rep_from_contraction(&k).unwrap();
        let pts = sample(
            &DomainSpec::LorentzTube { n: 2 },
            500,
            70 + i,
            SampleRegion::Interior,
        )
        .unwrap();
        for w in &pts {
            assert!(rep.pencil_det(w).unwrap().norm() > 0.0);
            let r = lorentz2_chain(&k, &rep, w).unwrap();
            assert!(r.rel <= 1e-8, "rel {}", r.rel);
        }
    }
}

#[test]
fn lorentz2_coefficients_match_disc_side() {
    for (i, mult) in [1usize, 2].into_iter().enumerate() {
        let mut rng = randmat::stream(8, i as u64);
        let k = randmat::contraction(&mut rng, 2 * mult, 2 * mult, 0.8);
        let rep = lorentz2_rep_from_contraction(&k).unwrap();
        let ext = rep.extract().unwrap();
        let deg = 2 * mult as u32;
        let disc = |w: &[C64]| {
            let z = crate::cayley::phi_n_inv(w).unwrap();
            let d = (w[0] + IU).powu(2) - w[1] * w[1];
            lorentz2_disc_det(&k, &z).unwrap() * d.powu(mult as u32)
        };
        let pulled = interpolate_fn(disc, &[deg, deg], NodeFamily::UnitCircle, 1.0).unwrap();
        let scale = ext.max_abs_coeff();
        assert!(ext.max_coeff_diff(&pulled) <= 1e-8 * scale);
    }
}

#[test]
fn lorentzn_strict_has_empty_split() {
    let mut rng = randmat::stream(9, 0);
    let k = randmat::contraction(&mut rng, 6, 6, 0.7);
    let split = split_eigenvalue_one(&k).unwrap();
    assert_eq!(split.cluster, 0);
    let rep = lorentzn_rep_from_contraction(&k, 3, 2).unwrap();
    assert!(rep.v.is_none());
    assert_eq!(rep.size(), 6);
}

#[test]
fn lorentzn_split_selects_block() {
    let mut rng = randmat::stream(9, 1);
    let inner = randmat::contraction(&mut rng, 5, 5, 0.6);
    let k = CMatrix::block_diag(&[CMatrix::identity(1), inner.clone()]);
    let split = split_eigenvalue_one(&k).unwrap();
    assert_eq!(split.cluster, 1);
    let proj = &split.v * &split.v.adjoint();
    let expected = CMatrix::block_diag(&[CMatrix::zeros(1, 1), CMatrix::identity(5)]);
    assert!(proj.max_abs_diff(&expected) < 1e-12);
    // K̃ is the inner block up to a unitary change of basis.
    let u = split.v.block(1, 0, 5, 5);
    let back = &(&u * &split.k_tilde) * &u.adjoint();
    assert!(back.max_abs_diff(&inner) < 1e-12);

    let rep = lorentzn_rep_from_contraction(&k, 3, 2).unwrap();
    assert!(rep.isometry_error() <= ISOMETRY_TOL);
    assert_eq!(rep.size(), 5);
}

#[test]
fn split_failure_on_non_reducing_cluster() {
    let k = CMatrix::from_real(2, 2, &[1.0, 0.5, 0.0, 0.0]).unwrap();
    assert!(matches!(
        split_eigenvalue_one(&k),
        Err(DetRepError::SplitFailure { .. })
    ));
}

#[test]
fn lorentzn_chain_holds_with_and_without_split() {
    for i in 0..12u64 {
        let n = 2 + i as usize % 4;
        let mult = 1 + i as usize % 3;
        let nk = n * mult;
        let mut rng = randmat::stream(10, i);
        let k = if i % 2 == 0 {
            randmat::contraction(&mut rng, nk, nk, 0.9)
        } else {
            let u = randmat::unitary(&mut rng, nk);
            let inner = randmat::contraction(&mut rng, nk - 1, nk - 1, 0.8);
            let d = CMatrix::block_diag(&[CMatrix::identity(1), inner]);
            &(&u * &d) * &u.adjoint()
        };
        let rep = lorentzn_rep_from_contraction(&k, n, mult).unwrap();
        assert!(rep.isometry_error() <= ISOMETRY_TOL);
        let pts = sample(
            &DomainSpec::LorentzTube { n },
            100,
            100 + i,
            SampleRegion::Interior,
        )
        .unwrap();
        for w in &pts {
            assert!(rep.eval(w).unwrap().norm() > 0.0);
            let r = lorentzn_chain(&k, n, mult, &rep, w).unwrap();
            assert!(r.rel <= 1e-8, "n {n} k {mult} rel {}", r.rel);
        }
    }
}

#[test]
fn lorentzn_reduces_to_lorentz2() {
    for i in 0..5u64 {
        let mult = 1 + i as usize % 3;
        let mut rng = randmat::stream(11, i);
        let k = randmat::contraction(&mut rng, 2 * mult, 2 * mult, 0.85);
        let two = lorentz2_rep_from_contraction(&k).unwrap();
        let gen = lorentzn_rep_from_contraction(&k, 2, mult).unwrap();
        for w in sample(
            &DomainSpec::LorentzTube { n: 2 },
            50,
            i,
            SampleRegion::Interior,
        )
        .unwrap()
        {
            let scale = (C64::new(0.0, 2.0) * (w[0] + IU)).powu(mult as u32);
            let a = gen.eval(&w).unwrap() / scale;
            let b = two.eval(&w).unwrap();
            assert!((a - b).norm() <= 1e-8 * b.norm());
        }
    }
}

#[test]
fn skew_zero_contraction() {
    let rep = skew_rep_from_contraction(&CMatrix::zeros(4, 4), 2, 1).unwrap();
    assert!(rep.a0.max_abs_diff(&CMatrix::identity(4).scale(IU)) < 1e-15);
}

#[test]
fn skew_im_a0_positive() {
    for i in 0..100u64 {
        let n = 1 + i as usize % 3;
        let mult = 1 + i as usize % 2;
        let dim = 2 * n * mult;
        let mut rng = randmat::stream(12, i);
        let norm = randmat::uniform(&mut rng, 0.05, 0.95);
        let k = randmat::contraction(&mut rng, dim, dim, norm);
        let rep = skew_rep_from_contraction(&k, n, mult).unwrap();
        assert!(rep.im_a0_min_eig().unwrap() > 0.0);
    }
}

#[test]
fn skew_nonvanishing_and_chain() {
    for i in 0..4u64 {
        let n = 1 + i as usize % 3;
        let mult = 1 + i as usize % 2;
        let dim = 2 * n * mult;
        let mut rng = randmat::stream(13, i);
        let k = randmat::contraction(&mut rng, dim, dim, 0.9);
        let rep = skew_rep_from_contraction(&k, n, mult).unwrap();
        for w in sample(
            &DomainSpec::SkewDomain { n },
            300,
            130 + i,
            SampleRegion::Interior,
        )
        .unwrap()
        {
            assert!(rep.eval(&w).unwrap().norm() > 0.0);
            let r = skew_chain(&k, n, mult, &rep, &w).unwrap();
            assert!(r.rel <= 1e-8, "rel {}", r.rel);
        }
    }
}

#[test]
fn skew_chain_at_psi_image() {
    let mut rng = randmat::stream(14, 0);
    let k = randmat::contraction(&mut rng, 4, 4, 0.5);
    let rep = skew_rep_from_contraction(&k, 2, 1).unwrap();
    let z = randmat::skew_contraction(&mut rng, 4, 0.4);
    let w = skew_coords(&psi(&z).unwrap());
    assert!(skew_chain(&k, 2, 1, &rep, &w).unwrap().rel <= 1e-10);
}

#[test]
fn lieball_zero_contraction() {
    let r = lieball_pencil_check(&CMatrix::zeros(6, 6), 3, 2, 300, 2).unwrap();
    assert!(r.nonvanishing);
    assert!(r.max_factorization_err < 1e-12);
    assert!((r.min_abs_reduced - 1.0).abs() < 1e-12);
}

#[test]
fn lieball_reduced_det_lower_bound() {
    let mut rng = randmat::stream(15, 0);
    let k = randmat::contraction(&mut rng, 6, 6, 0.5);
    let r = lieball_pencil_check(&k, 3, 2, 1000, 3).unwrap();
    assert!(r.nonvanishing);
    assert!(r.max_q_norm < 1.0);
    let bound = (1.0 - op_norm(&k) * r.max_q_norm).powi(6);
    assert!(r.min_abs_reduced >= bound * (1.0 - 1e-9));
    assert!(r.max_factorization_err < 1e-9);
}

#[test]
fn verify_accepts_own_extraction() {
    let mut rng = randmat::stream(16, 0);
    let k = randmat::contraction(&mut rng, 4, 4, 0.8);
    let rep = cayley_push_halfplane(&k, &[2, 2]).unwrap();
    let p = rep.extract().unwrap();
    let v = verify_rep(&p, &MultiPoly::one(2), &rep, &VerifyOptions::default());
    assert_eq!(v.verdict, RepVerdict::Pass, "{v:?}");
    assert!(v.coefficient_max_err.unwrap() < 1e-12);
}

#[test]
fn verify_rejects_corrupted_a0() {
    let mut rng = randmat::stream(16, 1);
    let k = randmat::contraction(&mut rng, 3, 3, 0.8);
    let rep = cayley_push_halfplane(&k, &[1, 2]).unwrap();
    let p = rep.extract().unwrap();
    let mut bad = rep.clone();
    bad.a0[(0, 1)] += c(0.0, 2.0);
    let v = verify_rep(&p, &MultiPoly::one(2), &bad, &VerifyOptions::default());
    assert_eq!(v.verdict, RepVerdict::Fail);
    let identity = v
        .structure_checks
        .iter()
        .find(|ch| ch.name == "identity")
        .unwrap();
    assert!(!identity.passed);
}

#[test]
fn verify_scalar_exact() {
    let a0 = CMatrix::from_rows(&[vec![c(0.0, 3.0)]]).unwrap();
    let rep = DetRep::new(a0, StructureMap::DiagonalZn { n: vec![1] });
    let p = MultiPoly::from_univariate(&[c(0.0, 3.0), c(1.0, 0.0)]);
    let v = verify_rep(&p, &MultiPoly::one(1), &rep, &VerifyOptions::default());
    assert_eq!(v.verdict, RepVerdict::Pass);
    assert_eq!(v.identity_max_rel_err, 0.0);
    assert_eq!(v.coefficient_max_err, Some(0.0));
}

#[test]
fn verify_flags_bad_structure() {
    let a0 = CMatrix::from_rows(&[vec![c(0.0, -1.0)]]).unwrap();
    let rep = DetRep::new(a0, StructureMap::DiagonalZn { n: vec![1] });
    let p = MultiPoly::from_univariate(&[c(0.0, -1.0), c(1.0, 0.0)]);
    let v = verify_rep(&p, &MultiPoly::one(1), &rep, &VerifyOptions::default());
    assert_eq!(v.verdict, RepVerdict::Fail);
    assert!(
        !v.structure_checks
            .iter()
            .find(|ch| ch.name == "im_a0_psd")
            .unwrap()
            .passed
    );
}

#[test]
fn verify_lorentz_and_skew_outputs() {
    let mut rng = randmat::stream(16, 2);
    let k6 = randmat::contraction(&mut rng, 6, 6, 0.8);
    let k4 = randmat::contraction(&mut rng, 4, 4, 0.8);
    for rep in [
        lorentzn_rep_from_contraction(&k6, 3, 2).unwrap(),
        skew_rep_from_contraction(&k4, 2, 1).unwrap(),
    ] {
        let p = rep.extract().unwrap();
        let v = verify_rep(
            &p,
            &MultiPoly::one(rep.nvars()),
            &rep,
            &VerifyOptions::default(),
        );
        assert_eq!(v.verdict, RepVerdict::Pass, "{v:?}");
    }
}

#[test]
fn extract_refuses_huge_grid() {
    let rep = cayley_push_halfplane(&CMatrix::zeros(48, 48), &[8; 6]).unwrap();
    assert!(matches!(rep.extract(), Err(DetRepError::TooLarge { .. })));
}

#[test]
fn detrep_json_round_trip() {
    let mut rng = randmat::stream(17, 0);
    let inner = randmat::contraction(&mut rng, 3, 3, 0.5);
    let k = CMatrix::block_diag(&[CMatrix::identity(1), inner]);
    let rep = lorentzn_rep_from_contraction(&k, 2, 2).unwrap();
    let s = serde_json::to_string(&rep).unwrap();
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    for key in ["A0", "structure", "k", "V", "prefactor", "schema"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["prefactor"]["w1_plus_i_pow"], 2);
    let back: DetRep = serde_json::from_str(&s).unwrap();
    assert_eq!(back, rep);

    let minimal = r#"{"A0":{"rows":1,"cols":1,"re":[0.0],"im":[3.0]},
        "structure":{"kind":"diagonal_zn","params":{"n":[1]}},"k":1,"V":null,
        "prefactor":{"c_re":1.0,"c_im":0.0,"w1_plus_i_pow":0}}"#;
    let rep: DetRep = serde_json::from_str(minimal).unwrap();
    assert_eq!(rep.schema, crate::SCHEMA);
    assert!((rep.eval(&[c(0.0, 0.0)]).unwrap() - c(0.0, 3.0)).norm() < 1e-15);
}

#[test]
fn phi_n_points_feed_chains() {
    // Chains evaluated at Φₙ images of disc points agree with direct disc values.
    let mut rng = randmat::stream(18, 0);
    let k = randmat::contraction(&mut rng, 3, 3, 0.7);
    let rep = lorentzn_rep_from_contraction(&k, 3, 1).unwrap();
    let z = crate::domains::lie_ball_shell_point(&mut rng, 3, 0.5);
    let w = phi_n(&z).unwrap();
    let r = lorentzn_chain(&k, 3, 1, &rep, &w).unwrap();
    let direct = lieball_disc_det(&k, &z, 1).unwrap();
    let d = (w[0] + IU).powu(2) - w[1..].iter().map(|x| x * x).sum::<C64>();
    assert!((r.lhs - direct * d.powu(3)).norm() <= 1e-10 * r.lhs.norm());
    assert!(r.rel <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disc_det_lower_bound(seed in 0u64..100_000, r in 0.05f64..0.95) {
        let mut rng = randmat::stream(seed, 0);
        let n = [1 + (seed % 3) as usize, 1 + (seed % 2) as usize];
        let size = n[0] + n[1];
        let k = randmat::contraction(&mut rng, size, size, r);
        for _ in 0..20 {
            let z: Vec<C64> = (0..2)
                .map(|_| C64::from_polar(randmat::uniform(&mut rng, 0.0, 1.0).sqrt(), randmat::uniform(&mut rng, 0.0, 6.3)))
                .collect();
            let v = polydisk_disc_det(&k, &n, &z).unwrap().norm();
            prop_assert!(v >= (1.0 - r).powi(size as i32) * (1.0 - 1e-9));
        }
    }

    #[test]
    fn cayley_pencil_im_a0_positive(seed in 0u64..100_000, r in 0.01f64..0.99) {
        let mut rng = randmat::stream(seed, 1);
        let k = randmat::contraction(&mut rng, 4, 4, r);
        let rep = cayley_push_halfplane(&k, &[1, 3]).unwrap();
        prop_assert!(rep.im_a0_min_eig().unwrap() > 0.0);
        let w = halfplane_point(seed, 2, 2);
        prop_assert!(halfplane_chain(&k, &[1, 3], &rep, &w).unwrap().rel <= 1e-8);
    }

    #[test]
    fn pencil_nonvanishing_on_halfplane(seed in 0u64..100_000) {
        let mut rng = randmat::stream(seed, 2);
        let k = randmat::contraction(&mut rng, 3, 3, 0.9);
        let rep = cayley_push_halfplane(&k, &[2, 1]).unwrap();
        let w = halfplane_point(seed, 3, 2);
        prop_assert!(rep.pencil_det(&w).unwrap().norm() > 0.0);
    }
}
