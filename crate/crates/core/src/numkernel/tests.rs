use num_complex::Complex64 as C64;
use proptest::prelude::*;

use super::*;
use crate::randmat;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn identity_eigenvalues() {
    let r = herm_eigs(&CMatrix::identity(3), DEFAULT_HERM_TOL).unwrap();
    assert_eq!(r.eigenvalues, vec![1.0, 1.0, 1.0]);
    assert_eq!(r.residual, 0.0);
}

#[test]
fn diagonal_eigenvalues_sorted() {
    let r = herm_eigs(
        &CMatrix::diag(&[c(2.0, 0.0), c(-1.0, 0.0)]),
        DEFAULT_HERM_TOL,
    )
    .unwrap();
    assert_eq!(r.eigenvalues, vec![-1.0, 2.0]);
}

#[test]
fn non_hermitian_rejected() {
    let a = CMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(1.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0)],
    ])
    .unwrap();
    assert!(matches!(
        herm_eigs(&a, 1e-10),
        Err(LinalgError::NotHermitian { .. })
    ));
}

#[test]
fn two_by_two_complex_closed_form() {
    // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
    let a = CMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.0, 1.0)],
        vec![c(0.0, -1.0), c(1.0, 0.0)],
    ])
    .unwrap();
    let r = herm_eigs(&a, 1e-12).unwrap();
    assert!(r.eigenvalues[0].abs() < 1e-15);
    assert!((r.eigenvalues[1] - 2.0).abs() < 1e-15);
    assert!(r.residual < 1e-14);
}

#[test]
fn eigen_residual_small_on_random_hermitian() {
    for seed in 0..20 {
        let mut rng = randmat::stream(11, seed);
        let a = randmat::hermitian(&mut rng, 9);
        let r = herm_eigs(&a, 1e-12).unwrap();
        assert!(
            r.residual <= 1e-10 * op_norm(&a).max(1.0),
            "residual {}",
            r.residual
        );
        let v = &r.eigenvectors;
        let gram = &v.adjoint() * v;
        assert!(gram.max_abs_diff(&CMatrix::identity(9)) < 1e-12);
        let tr: f64 = r.eigenvalues.iter().sum();
        assert!((tr - a.trace().re).abs() < 1e-11);
    }
}

#[test]
fn op_norm_zero_and_unitary() {
    assert_eq!(op_norm(&CMatrix::zeros(3, 4)), 0.0);
    let mut rng = randmat::stream(5, 0);
    let u = randmat::unitary(&mut rng, 4);
    assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    assert!((op_norm(&u) - 1.0).abs() < 1e-10);
}

#[test]
fn op_norm_of_two_variable_block() {
    // [[z1, -z2], [z2, z1]] at (0.3, 0.4) has norm sqrt(0.09 + 0.16) = 0.5.
    let p = CMatrix::from_real(2, 2, &[0.3, -0.4, 0.4, 0.3]).unwrap();
    assert!((op_norm(&p) - 0.5).abs() < 1e-14);
}

#[test]
fn op_norm_rectangular() {
    let a = CMatrix::from_real(1, 3, &[3.0, 0.0, 4.0]).unwrap();
    assert!((op_norm(&a) - 5.0).abs() < 1e-14);
}

#[test]
fn det_trivial_cases() {
    assert_eq!(det(&CMatrix::identity(5)), c(1.0, 0.0));
    assert_eq!(
        det(&CMatrix::diag(&[c(0.0, 2.0), c(3.0, 0.0)])),
        c(0.0, 6.0)
    );
    let upper = CMatrix::from_rows(&[
        vec![c(0.1, 0.3), c(7.0, 1.0), c(2.0, 0.0)],
        vec![c(0.0, 0.0), c(1.7, -0.2), c(-3.0, 4.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0), c(0.9, 0.0)],
    ])
    .unwrap();
    assert_eq!(det(&upper), c(0.1, 0.3) * c(1.7, -0.2) * c(0.9, 0.0));
    assert_eq!(det(&upper.transpose()), det(&upper));
}

#[test]
fn det_singular_is_zero() {
    let a = CMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
    assert!(det(&a).norm() < 1e-15);
}

#[test]
fn det_permutation_sign() {
    let a = CMatrix::from_real(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    assert_eq!(det(&a), c(-1.0, 0.0));
}

#[test]
fn inverse_rejects_ill_conditioned() {
    let a = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0 + 1e-14]).unwrap();
    assert!(matches!(inverse(&a), Err(LinalgError::Singular { .. })));
    let b = CMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 3.0]).unwrap();
    let inv = inverse(&b).unwrap();
    assert!((&b * &inv).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
}

#[test]
fn cayley_trivial_points() {
    let phi0 = matrix_cayley(&CMatrix::zeros(3, 3)).unwrap();
    assert_eq!(phi0, CMatrix::identity(3).scale(c(0.0, 1.0)));
    let back = matrix_cayley_inv(&CMatrix::identity(3).scale(c(0.0, 1.0))).unwrap();
    assert_eq!(back, CMatrix::zeros(3, 3));
}

#[test]
fn cayley_pole_reported() {
    assert!(matches!(
        matrix_cayley(&CMatrix::identity(2)),
        Err(LinalgError::SingularPencil { .. })
    ));
    let minus_i = CMatrix::identity(2).scale(c(0.0, -1.0));
    assert!(matches!(
        matrix_cayley_inv(&minus_i),
        Err(LinalgError::SingularPencil { .. })
    ));
}

#[test]
fn cayley_of_contractions_has_positive_imaginary_part() {
    for seed in 0..100 {
        let mut rng = randmat::stream(21, seed);
        let norm = randmat::uniform(&mut rng, 0.01, 0.99);
        let x = randmat::contraction(&mut rng, 4, 4, norm);
        let w = matrix_cayley(&x).unwrap();
        let im = (&w - &w.adjoint()).scale(c(0.0, -0.5));
        let ev = herm_eigs(&im, 1e-10).unwrap().eigenvalues;
        assert!(ev[0] > 0.0, "seed {seed}: min eig {}", ev[0]);
    }
}

#[test]
fn schur_block_diagonal_untouched() {
    let a = CMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 3.0]).unwrap();
    let d = CMatrix::from_real(1, 1, &[5.0]).unwrap();
    let m = CMatrix::block_diag(&[a.clone(), d]);
    assert_eq!(schur_complement(&m, 2..3).unwrap(), a);
}

#[test]
fn schur_of_pd_is_pd() {
    let m = CMatrix::from_real(3, 3, &[4.0, 1.0, 1.0, 1.0, 3.0, 0.5, 1.0, 0.5, 2.0]).unwrap();
    // Oracle: all leading principal minors positive.
    for k in 1..=3 {
        assert!(det(&m.block(0, 0, k, k)).re > 0.0);
    }
    let s = schur_complement(&m, 2..3).unwrap();
    assert!(s[(0, 0)].re > 0.0 && det(&s).re > 0.0);
    assert!(is_positive_definite(&s, 0.0).unwrap());
}

#[test]
fn schur_singular_block() {
    let m = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 0.0]).unwrap();
    assert_eq!(schur_complement(&m, 1..2), Err(LinalgError::SingularBlock));
}

#[test]
fn json_round_trip_and_validation() {
    let a = CMatrix::from_rows(&[vec![c(1.0, -2.0), c(0.5, 0.0)]]).unwrap();
    let s = serde_json::to_string(&a).unwrap();
    assert_eq!(s, r#"{"rows":1,"cols":2,"re":[1.0,0.5],"im":[-2.0,0.0]}"#);
    let back: CMatrix = serde_json::from_str(&s).unwrap();
    assert_eq!(back, a);
    assert!(serde_json::from_str::<CMatrix>(r#"{"rows":2,"cols":2,"re":[1],"im":[0]}"#).is_err());
}

#[test]
fn construction_rejects_nan() {
    assert_eq!(
        CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
        Err(LinalgError::NonFinite)
    );
}

#[test]
fn kron_identity_matches_kron() {
    let mut rng = randmat::stream(3, 1);
    let a = randmat::matrix(&mut rng, 2, 3);
    assert_eq!(a.kron_identity(3), a.kron(&CMatrix::identity(3)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weyl_perturbation_bound(seed in 0u64..10_000) {
        let mut rng = randmat::stream(seed, 0);
        let a = randmat::hermitian(&mut rng, 6);
        let d = randmat::hermitian(&mut rng, 6);
        let d = randmat::with_norm(&d, 1e-8);
        let e0 = herm_eigvals(&a).unwrap();
        let e1 = herm_eigvals(&(&a + &d)).unwrap();
        for (x, y) in e0.iter().zip(&e1) {
            prop_assert!((x - y).abs() <= 1e-8 + 1e-13);
        }
    }

    #[test]
    fn op_norm_unitarily_invariant(seed in 0u64..10_000) {
        let mut rng = randmat::stream(seed, 1);
        let a = randmat::matrix(&mut rng, 5, 5);
        let u = randmat::unitary(&mut rng, 5);
        let v = randmat::unitary(&mut rng, 5);
        let n0 = op_norm(&a);
        let n1 = op_norm(&(&(&u * &a) * &v));
        prop_assert!((n0 - n1).abs() <= 1e-10 * n0.max(1.0));
    }

    #[test]
    fn det_is_multiplicative(seed in 0u64..10_000) {
        let mut rng = randmat::stream(seed, 2);
        let a = randmat::matrix(&mut rng, 6, 6);
        let b = randmat::matrix(&mut rng, 6, 6);
        let lhs = det(&(&a * &b));
        let rhs = det(&a) * det(&b);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm());
    }

    #[test]
    fn cayley_round_trip(seed in 0u64..10_000, norm in 0.0f64..0.9) {
        let mut rng = randmat::stream(seed, 3);
        let x = randmat::contraction(&mut rng, 4, 4, norm);
        let back = matrix_cayley_inv(&matrix_cayley(&x).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&x) <= 1e-10);
    }
}
