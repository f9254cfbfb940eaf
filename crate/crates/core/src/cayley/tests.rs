use num_complex::Complex64 as C64;
use proptest::prelude::*;

use super::*;
use crate::numkernel::{det, matrix_cayley, matrix_cayley_inv, op_norm, CMatrix};
use crate::randmat;

const IU: C64 = C64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Random point of the Lie ball: a complex vector of norm 0.6 (norm < 1/√2 suffices).
fn lie_point(seed: u64, i: u64, n: usize) -> Vec<C64> {
    let mut rng = randmat::stream(seed, i);
    let v = randmat::complex_vec(&mut rng, n);
    let s: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|x| x * (0.6 / s)).collect()
}

/// Random ζ with `‖X(ζ)‖ < 1`.
fn interior_zeta(seed: u64, i: u64) -> Vec<C64> {
    let mut rng = randmat::stream(seed, i);
    loop {
        let z: Vec<C64> = randmat::complex_vec(&mut rng, EXC_VARS)
            .iter()
            .map(|x| x * 0.15)
            .collect();
        if op_norm(&build_x_zeta(&z).unwrap()) < 0.95 {
            return z;
        }
    }
}

#[test]
fn scalar_cayley_values() {
    assert_eq!(phi(C64::new(0.0, 0.0)).unwrap(), IU);
    assert_eq!(phi_inv(IU).unwrap(), C64::new(0.0, 0.0));
    assert!((phi(c(0.5, 0.0)).unwrap() - c(0.0, 3.0)).norm() < 1e-15);
    assert_eq!(phi(c(1.0, 0.0)), Err(CayleyError::Pole));
    assert_eq!(phi_inv(-IU), Err(CayleyError::Pole));
}

#[test]
fn jordan_neutral_element_and_nonassociativity() {
    let u = JordanVector(vec![c(0.3, 1.0), c(-2.0, 0.5), c(0.1, 0.0)]);
    assert_eq!(u.mul(&JordanVector::unit(3)), u);
    let f2 = JordanVector::basis(3, 1);
    let f3 = JordanVector::basis(3, 2);
    let left = f3.mul(&f2).mul(&f2);
    let right = f3.mul(&f2.mul(&f2));
    assert!(left.0.iter().all(|x| *x == C64::new(0.0, 0.0)));
    assert_eq!(right, f3);
}

#[test]
fn jordan_inverse_on_random_vectors() {
    for i in 0..100 {
        let mut rng = randmat::stream(11, i);
        let u = JordanVector(randmat::complex_vec(&mut rng, 2 + (i as usize % 5)));
        let n = u.0.len();
        let prod = u.mul(&u.inv().unwrap());
        assert!(
            max_diff(&prod.0, &JordanVector::unit(n).0) < 1e-11,
            "sample {i}"
        );
    }
    let null = JordanVector(vec![c(1.0, 0.0), c(1.0, 0.0)]);
    assert_eq!(null.inv(), Err(CayleyError::NotInvertible));
}

#[test]
fn phi_n_trivial_points() {
    for n in 2..7 {
        let z = vec![C64::new(0.0, 0.0); n];
        let w = phi_n(&z).unwrap();
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = IU;
        assert!(max_diff(&w, &e) < 1e-15);
        assert!(max_diff(&phi_n_inv(&e).unwrap(), &z) < 1e-15);
    }
}

#[test]
fn phi_n_round_trip_and_jordan_form() {
    for i in 0..1000 {
        let n = 2 + (i as usize % 5);
        let z = lie_point(12, i, n);
        let w = phi_n(&z).unwrap();
        assert!(
            max_diff(&phi_n_inv(&w).unwrap(), &z) < 1e-10,
            "round trip {i}"
        );
        assert!(
            max_diff(&phi_n_jordan(&z).unwrap(), &w) < 1e-10,
            "jordan form {i}"
        );
    }
}

#[test]
fn phi2_link_at_zero_and_random() {
    let l = phi2_pencil_link(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
    assert_eq!(l.w, [IU, C64::new(0.0, 0.0)]);
    assert!(l.residual < 1e-15);
    for i in 0..1000 {
        let z = lie_point(13, i, 2);
        assert!(
            phi2_pencil_link(z[0], z[1]).unwrap().residual < 1e-10,
            "sample {i}"
        );
    }
}

#[test]
fn p2_norm_matches_euclidean_norm() {
    // ‖P(z)‖² = |z₁|² + |z₂|² for real z.
    assert!((op_norm(&build_p2(c(0.3, 0.0), c(0.4, 0.0))) - 0.5).abs() < 1e-12);
}

#[test]
fn w_at_imaginary_unit_is_i_identity() {
    let mut e = vec![C64::new(0.0, 0.0); 4];
    e[0] = IU;
    assert!(build_w(&e).max_abs_diff(&CMatrix::identity(4).scale(IU)) < 1e-15);
}

#[test]
fn q_matches_cayley_of_w_and_ppm_factorization() {
    for i in 0..1000 {
        let n = 2 + (i as usize % 5);
        let z = lie_point(14, i, n);
        let q = build_q(&z).unwrap();
        let via_w = matrix_cayley_inv(&build_w(&phi_n(&z).unwrap())).unwrap();
        assert!(q.max_abs_diff(&via_w) < 1e-10, "Q sample {i}");
        let (pp, pm) = build_ppm(&z);
        assert!(pm.max_abs_diff(&(&q * &pp)) < 1e-12, "P± sample {i}");
    }
    assert_eq!(
        build_q(&[c(1.0, 0.0), c(0.2, 0.0)]),
        Err(CayleyError::PoleAtOne)
    );
}

#[test]
fn sr_tr_reduce_to_ppm_at_r_one() {
    let z = lie_point(15, 0, 4);
    let (s, t) = build_sr_tr(&z, 1.0);
    let (pp, pm) = build_ppm(&z);
    assert_eq!(s, pp);
    assert_eq!(t, pm);
    let (s2, _) = build_sr_tr(&z, 2.0);
    assert!((s2[(1, 1)] - (c(2.0, 0.0) - z[0])).norm() < 1e-15);
}

#[test]
fn m_matrix_of_real_vector() {
    let m = build_m(&[c(0.5, 0.0), c(0.0, 0.0)]);
    assert!(m.max_abs_diff(&CMatrix::identity(2).scale(c(0.25, 0.0))) < 1e-15);
}

#[test]
fn psi_at_zero() {
    let z = CMatrix::zeros(4, 4);
    let expect = symplectic_j(2).scale(-IU);
    assert!(psi(&z).unwrap().max_abs_diff(&expect) < 1e-15);
}

#[test]
fn psi_round_trip_and_skewness() {
    for i in 0..100 {
        let mut rng = randmat::stream(16, i);
        let n = 1 + (i as usize % 3);
        let z = randmat::skew_contraction(&mut rng, 2 * n, 0.9);
        let w = psi(&z).unwrap();
        assert!(skew_residual(&w) < 1e-11, "skew {i}");
        assert!(
            psi_inv(&w).unwrap().max_abs_diff(&z) < 1e-10,
            "round trip {i}"
        );
    }
    let bad = CMatrix::identity(2);
    assert!(matches!(psi(&bad), Err(CayleyError::NotSkew { .. })));
}

#[test]
fn y_of_first_basis_vector() {
    let mut e = vec![C64::new(0.0, 0.0); 8];
    e[0] = c(1.0, 0.0);
    let mut d = vec![c(-1.0, 0.0); 8];
    d[0] = c(1.0, 0.0);
    assert_eq!(build_y(&e), CMatrix::diag(&d));
    assert_eq!(t_matrix(0), CMatrix::diag(&d));
}

#[test]
fn clifford_relations_exact() {
    assert!(clifford_violations().is_empty());
    // Y(ω) = Σ ωⱼ Tⱼ entrywise.
    let w: Vec<C64> = (0..8).map(|j| c(j as f64 + 1.0, -(j as f64))).collect();
    let sum = (0..8).fold(CMatrix::zeros(8, 8), |acc, j| {
        &acc + &t_matrix(j).scale(w[j])
    });
    assert_eq!(sum, build_y(&w));
}

#[test]
fn yw_and_switch_identities() {
    for i in 0..1000 {
        let mut rng = randmat::stream(17, i);
        let w = randmat::complex_vec(&mut rng, 8);
        let y = build_y(&w);
        let s: C64 = w.iter().map(|x| x * x).sum();
        let target = CMatrix::identity(8).scale(s);
        assert!((&y.transpose() * &y).max_abs_diff(&target) < 1e-12);
        assert!((&y * &y.transpose()).max_abs_diff(&target) < 1e-12);
        let yv = randmat::complex_vec(&mut rng, 8);
        let lhs = build_y(&w).matvec(&yv);
        let rhs = (&t_matrix(0) * &build_y(&yv)).matvec(&w);
        assert!(max_diff(&lhs, &rhs) < 1e-12);
    }
}

#[test]
fn x_of_zero_is_zero() {
    let x = build_x_zeta(&vec![C64::new(0.0, 0.0); EXC_VARS]).unwrap();
    assert_eq!(x, CMatrix::zeros(EXC_DIM, EXC_DIM));
    let mut pole = vec![C64::new(0.0, 0.0); EXC_VARS];
    pole[0] = c(1.0, 0.0);
    assert_eq!(build_x_zeta(&pole), Err(CayleyError::PoleAtOne));
}

#[test]
fn det_i_minus_x_factorization() {
    for i in 0..200 {
        let mut rng = randmat::stream(18, i);
        let z: Vec<C64> = randmat::complex_vec(&mut rng, EXC_VARS)
            .iter()
            .map(|x| x * 0.5)
            .collect();
        let x = build_x_zeta(&z).unwrap();
        let lhs = det(&(&CMatrix::identity(EXC_DIM) - &x));
        let zz: C64 = z[18..26].iter().map(|v| v * v).sum();
        let rhs =
            (c(1.0, 0.0) - z[0]) * ((c(1.0, 0.0) - z[17]) * (c(1.0, 0.0) - z[26]) - zz).powu(8);
        assert!(
            (lhs - rhs).norm() <= 1e-9 * rhs.norm(),
            "sample {i}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn block_cayley_closed_form() {
    let z = CMatrix::zeros(3, 3);
    let psi0 = vec![C64::new(0.0, 0.0); 3];
    let f = block_cayley_2x2(c(0.5, 0.0), &psi0, &z).unwrap();
    assert!((f[(0, 0)] - c(0.0, 3.0)).norm() < 1e-15);
    assert!(
        f.block(1, 1, 3, 3)
            .max_abs_diff(&CMatrix::identity(3).scale(IU))
            < 1e-15
    );
    assert!(f[(0, 1)].norm() == 0.0 && f[(1, 0)].norm() == 0.0);
    for i in 0..1000 {
        let mut rng = randmat::stream(19, i);
        let m = 1 + (i as usize % 6);
        let zm = randmat::contraction(&mut rng, m, m, 0.5);
        let p: Vec<C64> = randmat::complex_vec(&mut rng, m)
            .iter()
            .map(|x| x * 0.3)
            .collect();
        let w = randmat::complex_normal(&mut rng) * 0.4;
        let x = assemble_x(w, &p, &zm).unwrap();
        let direct = match matrix_cayley(&x) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let closed = block_cayley_2x2(w, &p, &zm).unwrap();
        assert!(
            closed.max_abs_diff(&direct) <= 1e-10 * direct.max_abs().max(1.0),
            "sample {i}"
        );
    }
}

#[test]
fn cayley_of_x_carries_tube_pattern() {
    for i in 0..200 {
        let z = interior_zeta(20, i);
        let (w, residual) = eta_inv(&z).unwrap();
        assert!(
            residual <= 1e-9,
            "pattern residual {residual} at sample {i}"
        );
        let om = build_omega(&w).unwrap();
        let im = om[0].im_part();
        assert!(crate::numkernel::min_eig(&im).unwrap() > 0.0, "sample {i}");
        let (back, r2) = eta(&w).unwrap();
        assert!(r2 <= 1e-9);
        assert!(max_diff(&back, &z) < 1e-10, "η round trip {i}");
    }
}

#[test]
fn pattern_read_detects_violation() {
    let w = vec![IU; EXC_VARS];
    let mut m = build_omega(&w).unwrap()[0].clone();
    let (read, res) = read_t27_pattern(&m).unwrap();
    assert!(res == 0.0 && max_diff(&read, &w) == 0.0);
    m[(3, 3)] += c(0.1, 0.0);
    assert!(read_t27_pattern(&m).unwrap().1 > 0.01);
}

#[test]
fn structure_diagonal_and_cross_checks() {
    let s = StructureMap::DiagonalZn { n: vec![1, 1] };
    let (a, b) = (c(1.0, 2.0), c(-3.0, 0.5));
    assert_eq!(s.apply(&[a, b]).unwrap(), CMatrix::diag(&[a, b]));
    let s = StructureMap::DiagonalZn { n: vec![2, 3] };
    let coeffs = s.coefficients().unwrap();
    let sum = coeffs.iter().fold(CMatrix::zeros(5, 5), |acc, m| &acc + m);
    assert_eq!(sum, CMatrix::identity(5));

    let z = lie_point(21, 0, 4);
    let lw = StructureMap::LorentzW { n: 4, k: 2 };
    assert_eq!(lw.apply(&z).unwrap(), build_w(&z).kron_identity(2));
    assert_eq!(lw.dim(), 8);

    let lp = StructureMap::LiePpm { n: 4, k: 1 };
    let (pp, pm) = lp.apply_pair(&z).unwrap();
    assert_eq!((pp, pm), build_ppm(&z));
    assert_eq!(lp.coefficients(), Err(CayleyError::NotLinear));

    let mut rng = randmat::stream(21, 1);
    let w = randmat::complex_vec(&mut rng, EXC_VARS);
    let om = build_omega(&w).unwrap();
    for (sel, m) in [
        (OmegaSelector::One, &om[0]),
        (OmegaSelector::Two, &om[1]),
        (OmegaSelector::Three, &om[2]),
    ] {
        let s = StructureMap::ExceptionalOmega {
            selector: sel,
            k: 1,
        };
        assert_eq!(&s.apply(&w).unwrap(), m);
    }
    let all = StructureMap::ExceptionalOmega {
        selector: OmegaSelector::All,
        k: 1,
    };
    assert_eq!(all.apply(&w).unwrap(), CMatrix::block_diag(&om));
}

#[test]
fn structure_skew_and_cartan() {
    let mut rng = randmat::stream(22, 0);
    let z = randmat::skew(&mut rng, 4);
    let s = StructureMap::SkewZj { n: 2, mult: 2 };
    assert_eq!(s.nvars(), 6);
    let coords = skew_coords(&z);
    assert_eq!(skew_from_coords(4, &coords), z);
    assert_eq!(
        s.apply(&coords).unwrap(),
        (&z * &symplectic_j(2)).kron_identity(2)
    );

    let blocks = vec![
        CartanBlock {
            kind: CartanKind::Full,
            size: 2,
            mult: 1,
        },
        CartanBlock {
            kind: CartanKind::Symmetric,
            size: 3,
            mult: 2,
        },
    ];
    let s = StructureMap::CartanBlocks {
        blocks: blocks.clone(),
    };
    assert_eq!(s.nvars(), 4 + 6);
    assert_eq!(s.dim(), 2 + 6);
    let v = randmat::complex_vec(&mut rng, 10);
    let m = s.apply(&v).unwrap();
    let sym = blocks[1].matrix(&v[4..]);
    assert_eq!(sym, sym.transpose());
    assert_eq!(blocks[1].coords(&sym), v[4..].to_vec());
    assert_eq!(m.block(2, 2, 6, 6), sym.kron_identity(2));
    assert!(matches!(
        s.apply(&v[..9]),
        Err(CayleyError::DimMismatch { .. })
    ));
}

#[test]
fn structure_json_round_trip() {
    let maps = vec![
        StructureMap::DiagonalZn { n: vec![2, 3] },
        StructureMap::SkewZj { n: 2, mult: 1 },
        StructureMap::LorentzW { n: 3, k: 2 },
        StructureMap::LiePpm { n: 3, k: 1 },
        StructureMap::ExceptionalOmega {
            selector: OmegaSelector::All,
            k: 1,
        },
        StructureMap::CartanBlocks {
            blocks: vec![CartanBlock {
                kind: CartanKind::Symmetric,
                size: 2,
                mult: 3,
            }],
        },
    ];
    for m in maps {
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"kind\"") && s.contains("\"params\""));
        assert_eq!(serde_json::from_str::<StructureMap>(&s).unwrap(), m);
    }
    let parsed: StructureMap =
        serde_json::from_str(r#"{"kind":"diagonal_zn","params":{"n":[1,1]}}"#).unwrap();
    assert_eq!(parsed.dim(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_round_trip(re in -0.9f64..0.9, im in -0.9f64..0.9) {
        let z = c(re, im) * 0.7;
        prop_assert!((phi_inv(phi(z).unwrap()).unwrap() - z).norm() < 1e-12);
    }

    #[test]
    fn omega_summands_are_complex_symmetric(seed in 0u64..1000) {
        let mut rng = randmat::stream(seed, 0);
        let w = randmat::complex_vec(&mut rng, EXC_VARS);
        for m in build_omega(&w).unwrap() {
            prop_assert!(m.max_abs_diff(&m.transpose()) == 0.0);
        }
    }

    #[test]
    fn structure_is_linear(seed in 0u64..1000) {
        let s = StructureMap::LorentzW { n: 3, k: 2 };
        let mut rng = randmat::stream(seed, 0);
        let z = randmat::complex_vec(&mut rng, 3);
        let coeffs = s.coefficients().unwrap();
        let sum = coeffs.iter().zip(&z).fold(CMatrix::zeros(6, 6), |acc, (a, x)| &acc + &a.scale(*x));
        prop_assert!(sum.max_abs_diff(&s.apply(&z).unwrap()) < 1e-14);
    }
}
