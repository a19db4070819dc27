use super::*;
use crate::spectral::{eig, laplacian, SymmetricMatrix};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn one_minus_alpha_d_examples() {
    let p = RealRootedPoly::monomial(5, Arithmetic::Exact);
    let s = 3.0;
    let out = one_minus_alpha_d_exact(&p, &(rational(s).unwrap() / q(5, 1))).unwrap();
    let c = out.exact_coeffs().unwrap();
    assert_eq!(c[5], q(1, 1));
    assert_eq!(c[4], q(-3, 1));
    assert!(c[..4].iter().all(Zero::is_zero));

    let p = RealRootedPoly::from_roots(&[1.0, -2.0, 0.5], Arithmetic::Exact).unwrap();
    assert_eq!(one_minus_alpha_d(&p, 0.0).unwrap(), p);

    let f = RealRootedPoly::from_roots(&[1.0, 2.0], Arithmetic::Float).unwrap();
    // (x-1)(x-2) - 0.5(2x-3) = x² - 4x + 3.5.
    assert_eq!(one_minus_alpha_d(&f, 0.5).unwrap().coeffs_f64(), vec![3.5, -4.0, 1.0]);
}

#[test]
fn iterated_operator_matches_laguerre_closed_form() {
    for (n, t, s) in [(1, 1, 2.5), (3, 5, 1.0), (4, 16, 4.0), (6, 9, 0.75)] {
        let alpha = rational(s).unwrap() / q(t as i64, 1);
        let mut p = RealRootedPoly::monomial(n, Arithmetic::Exact);
        for _ in 0..t {
            p = one_minus_alpha_d_exact(&p, &alpha).unwrap();
        }
        assert_eq!(p, laguerre_poly(n, t, s).unwrap());
    }
}

#[test]
fn product_transform_examples() {
    let p = product_transform(2, &[1.0], Arithmetic::Exact).unwrap().poly;
    assert_eq!(p.exact_coeffs().unwrap(), &[q(0, 1), q(-1, 1), q(1, 1)]);
    assert_eq!(real_roots(&p).unwrap().as_slice(), &[0.0, 1.0]);

    let zero = product_transform(4, &[0.0; 7], Arithmetic::Exact).unwrap().poly;
    assert_eq!(zero, RealRootedPoly::monomial(4, Arithmetic::Exact));

    let flagged = product_transform(3, &[1.0, -0.5, 2.0, -1.0], Arithmetic::Float).unwrap();
    assert_eq!(flagged.negative_rounds, vec![1, 3]);

    let four = product_transform(4, &[1.0; 16], Arithmetic::Exact).unwrap().poly;
    assert_eq!(four, laguerre_poly(4, 16, 4.0).unwrap());
    let a = real_roots(&four).unwrap();
    let b = real_roots(&laguerre_poly(4, 16, 4.0).unwrap()).unwrap();
    assert!(close(a.as_slice(), b.as_slice(), 1e-9));
}

#[test]
fn real_roots_examples() {
    for mode in [Arithmetic::Exact, Arithmetic::Float] {
        let p = RealRootedPoly::from_roots(&[3.0, 1.0, 2.0], mode).unwrap();
        assert!(close(real_roots(&p).unwrap().as_slice(), &[1.0, 2.0, 3.0], 1e-12));
        let p = RealRootedPoly::from_coeffs(vec![0.0, -1.0, 1.0]).unwrap();
        assert!(close(real_roots(&p).unwrap().as_slice(), &[0.0, 1.0], 1e-15));
    }
    // Repeated roots.
    let p = RealRootedPoly::from_roots(&[2.0, 2.0, 2.0, -1.0, -1.0], Arithmetic::Exact).unwrap();
    assert_eq!(real_roots(&p).unwrap().as_slice(), &[-1.0, -1.0, 2.0, 2.0, 2.0]);
    let p = RealRootedPoly::monomial(6, Arithmetic::Float);
    assert_eq!(real_roots(&p).unwrap().as_slice(), &[0.0; 6]);
    // (x² - 2)² has irrational double roots.
    let p = RealRootedPoly::from_exact_coeffs(vec![q(4, 1), q(0, 1), q(-4, 1), q(0, 1), q(1, 1)]).unwrap();
    let r = real_roots(&p).unwrap();
    let s2 = 2f64.sqrt();
    assert!(close(r.as_slice(), &[-s2, -s2, s2, s2], 1e-12));
}

#[test]
fn real_roots_rejects_complex_roots() {
    // x² + 1.
    let p = RealRootedPoly::from_coeffs(vec![1.0, 0.0, 1.0]).unwrap();
    match real_roots(&p) {
        Err(Error::NotRealRooted(msg)) => assert!(msg.contains("imaginary part 1e0"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let p = RealRootedPoly::from_exact_coeffs(vec![q(5, 1), q(-2, 1), q(0, 1), q(1, 1)]).unwrap();
    assert!(matches!(real_roots(&p), Err(Error::NotRealRooted(_))));
}

#[test]
fn roots_interlace_across_operator_applications() {
    let mut p = RealRootedPoly::monomial(8, Arithmetic::Exact);
    let mut prev: Option<RootVector> = None;
    for _ in 0..16 {
        p = one_minus_alpha_d(&p, 1.0 / 8.0).unwrap();
        let r = real_roots(&p).unwrap();
        if let Some(prev) = prev.filter(|pr| pr.max() > 0.0) {
            // Each root moves right, but not past the next old root.
            for i in 0..8 {
                assert!(r.as_slice()[i] >= prev.as_slice()[i] - 1e-12);
                if i + 1 < 8 {
                    assert!(r.as_slice()[i] <= prev.as_slice()[i + 1] + 1e-12);
                }
            }
        }
        prev = Some(r);
    }
}

#[test]
fn interlacing_agrees_with_companion_matrix() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    for n in [2, 5, 11, 20, 30] {
        for mode in [Arithmetic::Exact, Arithmetic::Float] {
            let roots: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let p = RealRootedPoly::from_roots(&roots, mode).unwrap();
            let a = real_roots(&p).unwrap();
            let b = companion_roots(&p).unwrap();
            let scale = a.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
            if n <= 20 || mode == Arithmetic::Exact {
                let mut sorted = roots.clone();
                sorted.sort_by(f64::total_cmp);
                assert!(close(a.as_slice(), &sorted, 1e-7 * scale), "n={n} {mode:?}");
            }
            // The companion route is only well conditioned without clustered roots.
            if n <= 11 {
                assert!(b.iter().all(|(_, im)| im.abs() <= 1e-7));
                let re: Vec<f64> = b.iter().map(|z| z.0).collect();
                assert!(close(a.as_slice(), &re, 1e-7 * scale), "n={n} {mode:?}");
            }
        }
    }
    // Well-conditioned families: both routes agree to 1e-7 up to n = 30.
    for n in [10, 20, 30] {
        let graded: Vec<f64> = (0..n)
            .map(|k| 1.3f64.powi(k as i32) * if k % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let chebyshev: Vec<f64> = (0..n)
            .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos())
            .collect();
        for roots in [graded, chebyshev] {
            let p = RealRootedPoly::from_roots(&roots, Arithmetic::Exact).unwrap();
            let a = real_roots(&p).unwrap();
            let b = companion_roots(&p).unwrap();
            for (x, (re, im)) in a.as_slice().iter().zip(&b) {
                let scale = x.abs().max(1.0);
                assert!(im.abs() <= 1e-7 * scale && (x - re).abs() <= 1e-7 * scale, "n={n}");
            }
        }
    }
}

#[test]
fn majorization_examples() {
    let rv = |v: &[f64]| RootVector::new(v.to_vec()).unwrap();
    assert!(majorizes(&rv(&[0.0, 2.0]), &rv(&[1.0, 1.0])).unwrap());
    assert!(!majorizes(&rv(&[1.0, 1.0]), &rv(&[0.0, 3.0])).unwrap());
    assert!(!majorizes(&rv(&[1.0, 1.0]), &rv(&[0.0, 2.0])).unwrap());
    assert!(matches!(
        majorizes(&rv(&[1.0]), &rv(&[0.5, 0.5])),
        Err(Error::LengthMismatch(2, 1))
    ));
    let uniform = rv(&[1.5; 4]);
    for other in [[0.0, 1.0, 2.0, 3.0], [1.5, 1.5, 1.5, 1.5], [-4.0, 2.0, 4.0, 4.0]] {
        assert!(majorizes(&rv(&other), &uniform).unwrap());
    }
}

#[test]
fn laguerre_examples() {
    let p = laguerre_poly(1, 1, 3.25).unwrap();
    assert_eq!(real_roots(&p).unwrap().as_slice(), &[3.25]);
    let p = laguerre_poly(1, 2, 0.7).unwrap();
    assert_eq!(p.exact_coeffs().unwrap(), &[-rational(0.7).unwrap(), q(1, 1)]);
    assert!(matches!(laguerre_poly(3, 2, 1.0), Err(Error::Precondition(_))));
    assert!(matches!(laguerre_poly(3, 4, 0.0), Err(Error::Precondition(_))));
    for (n, t) in [(3, 3), (5, 12), (8, 20)] {
        let r = real_roots(&laguerre_poly(n, t, 2.0).unwrap()).unwrap();
        assert!(r.min() >= 0.0);
        assert!((r.sum() - n as f64 * 2.0).abs() < 1e-9);
    }
}

#[test]
fn laguerre_closed_form_agrees_with_jacobi_matrix() {
    for (n, t, s) in [(4, 16, 4.0), (10, 15, 3.0), (32, 128, 32.0), (64, 256, 64.0)] {
        let a = real_roots(&laguerre_poly(n, t, s).unwrap()).unwrap();
        let b = laguerre_roots_jacobi(n, t, s).unwrap();
        assert!(close(a.as_slice(), b.as_slice(), 1e-9 * a.max()), "n={n}");
    }
}

#[test]
fn mp_edge_examples() {
    let e = mp_edges(16, 16, 5.0).unwrap();
    assert_eq!((e.lambda_min_pred, e.lambda_max_pred), (0.0, 4.0 * 5.0 / 16.0));
    let e = mp_edges(10, 40, 10.0).unwrap();
    assert!((e.lambda_min_pred - 0.25).abs() < 1e-15 && (e.lambda_max_pred - 2.25).abs() < 1e-15);
    assert!(mp_edges(10, 9, 1.0).is_err());
}

#[test]
fn kappa_examples() {
    assert!((kappa(8.0).unwrap() - 9.0).abs() < 1e-12);
    assert!((kappa(18.0).unwrap() - 4.0).abs() < 1e-12);
    assert!(matches!(kappa(2.0), Err(Error::Precondition(_))));
    assert!(kappa(1.0).is_err());
}

#[test]
fn exact_charpoly_examples() {
    let k3 = laplacian(&crate::graph::gen_complete(3).unwrap());
    let p = charpoly_exact(&k3).unwrap();
    assert_eq!(p.exact_coeffs().unwrap(), &[q(0, 1), q(9, 1), q(-6, 1), q(1, 1)]);

    let m = SymmetricMatrix::from_rows(&[vec![0.5, 0.25], vec![0.25, -1.0]]);
    let p = charpoly_exact(&m).unwrap();
    // x² + x/2 - 1/2 - 1/16.
    assert_eq!(p.exact_coeffs().unwrap(), &[q(-9, 16), q(1, 2), q(1, 1)]);

    let z = charpoly_exact(&SymmetricMatrix::zeros(3)).unwrap();
    assert_eq!(z, RealRootedPoly::monomial(3, Arithmetic::Exact));
}

#[test]
fn charpoly_roots_match_eigensolver() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for n in 1..=8 {
        for _ in 0..5 {
            let m = SymmetricMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let roots = real_roots(&charpoly_exact(&m).unwrap()).unwrap();
            let values = eig(&m, false).unwrap().values;
            assert!(close(roots.as_slice(), &values, 1e-8), "n={n}");
        }
    }
}

#[test]
fn coefficient_error_is_zero_for_identical_and_small_for_rounded() {
    let p = laguerre_poly(6, 10, 2.0).unwrap();
    let errs = coefficient_relative_errors(&p, &p, 5.0).unwrap();
    assert!(errs.iter().all(|e| *e == 0.0));
    let f = p.to_float();
    let errs = coefficient_relative_errors(&p, &f, 5.0).unwrap();
    assert!(errs.iter().all(|e| *e <= 1e-15));
}

#[test]
fn serializes_exact_coefficients_as_strings() {
    let p = product_transform(2, &[1.0], Arithmetic::Exact).unwrap().poly;
    real_roots(&p).unwrap();
    let v = serde_json::to_value(&p).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["0", "-1", "1"]));
    assert_eq!(v["roots"], serde_json::json!([0.0, 1.0]));
    assert_eq!(v["mode"], "exact");
}

fn real_rooted_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..=12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn operator_preserves_real_rootedness(roots in real_rooted_strategy(), alpha in -3.0f64..3.0) {
        let p = RealRootedPoly::from_roots(&roots, Arithmetic::Exact).unwrap();
        let image = one_minus_alpha_d(&p, alpha).unwrap();
        let r = real_roots(&image).unwrap();
        prop_assert_eq!(r.len(), roots.len());
    }

    #[test]
    fn product_majorizes_laguerre(
        n in 1usize..=8,
        extra in 0usize..=12,
        raw in prop::collection::vec(0.0f64..3.0, 20),
    ) {
        let t = (n + extra).min(20);
        let scalings = &raw[..t];
        let s: f64 = scalings.iter().sum::<f64>() / n as f64;
        prop_assume!(s > 0.0);
        let p = product_transform(n, scalings, Arithmetic::Exact).unwrap().poly;
        let l = laguerre_poly(n, t, s).unwrap();
        let (rp, rl) = (real_roots(&p).unwrap(), real_roots(&l).unwrap());
        let m = majorization(&rp, &rl).unwrap();
        prop_assert!(m.holds, "{:?}", m);
        prop_assert!(rp.min() <= rl.min() + 1e-8 && rp.max() >= rl.max() - 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn product_transform_is_order_independent(
        scalings in prop::collection::vec(-1.0f64..3.0, 0..10),
        n in 1usize..=6,
        seed in any::<u64>(),
    ) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut shuffled = scalings.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = product_transform(n, &scalings, Arithmetic::Exact).unwrap().poly;
        let b = product_transform(n, &shuffled, Arithmetic::Exact).unwrap().poly;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn laguerre_roots_scale_with_s(n in 1usize..=8, extra in 0usize..8, s in 0.1f64..10.0, c in 0.1f64..10.0) {
        let t = n + extra;
        let base = real_roots(&laguerre_poly(n, t, s).unwrap()).unwrap();
        let scaled = real_roots(&laguerre_poly(n, t, c * s).unwrap()).unwrap();
        for (x, y) in base.as_slice().iter().zip(scaled.as_slice()) {
            prop_assert!((c * x - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }
}
