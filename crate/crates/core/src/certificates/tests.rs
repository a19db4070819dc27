use super::*;
use crate::graph::{
    gen_complete, gen_cycle, gen_hypercube, gen_path, gen_petersen, gen_random_regular, gen_star, WeightedGraph,
};
use crate::spectral::{eig, lambda_ratio};
use proptest::prelude::*;
use rand::Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn uniform(g: &WeightedGraph) -> WeightedGraph {
    g.normalize_max_weighted_degree().unwrap()
}

fn path_example() -> WeightedGraph {
    WeightedGraph::new(3, [(0, 1, 0.3), (1, 2, 0.5)]).unwrap()
}

fn half_cycle(n: usize) -> WeightedGraph {
    gen_cycle(n).unwrap().scaled(0.5).unwrap()
}

#[test]
fn path_test_function() {
    let tf = test_function(&path_example(), 0, 2).unwrap();
    let want = [1.0, 0.3f64.sqrt(), 0.15f64.sqrt()];
    for (a, b) in tf.f.iter().zip(want) {
        assert!(close(*a, b, 1e-12));
    }
    let signed = signed_test_function(&tf);
    assert_eq!(signed[0], tf.f[0]);
    assert_eq!(signed[1], -tf.f[1]);
    assert_eq!(signed[2], tf.f[2]);
}

#[test]
fn radius_zero_is_spike() {
    let g = uniform(&gen_petersen());
    let tf = test_function(&g, 4, 0).unwrap();
    let mut e = vec![0.0; 10];
    e[4] = 1.0;
    assert_eq!(tf.f, e);
    assert_eq!(tf.norm_sq(), 1.0);
    assert_eq!(signed_test_function(&tf), tf.f);
}

#[test]
fn cycle_norm() {
    let tf = test_function(&half_cycle(8), 3, 2).unwrap();
    assert!(close(tf.norm_sq(), 2.5, 1e-12));
    let signed = signed_test_function(&tf);
    assert!(close(dot(&signed, &signed), 2.5, 1e-12));
}

#[test]
fn squared_values_are_path_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = gen_random_regular(100, 3, 8, 11)
        .unwrap()
        .map_weights(|_| rng.gen_range(0.1..1.0))
        .unwrap();
    let tf = test_function(&g, 5, 3).unwrap();
    for v in 0..g.n() {
        match tf.tree.dist[v] {
            None => assert_eq!(tf.f[v], 0.0),
            Some(_) => {
                let mut prod = 1.0;
                let mut x = v;
                while let Some(p) = tf.tree.parent[x] {
                    prod *= g.weight(p, x).unwrap();
                    x = p;
                }
                assert!(close(tf.f[v] * tf.f[v], prod, 1e-12));
            }
        }
    }
}

#[test]
fn girth_precondition() {
    let g = half_cycle(4);
    assert!(matches!(test_function(&g, 0, 2), Err(Error::Precondition(_))));
    assert!(test_function(&g, 0, 1).is_ok());
}

#[test]
fn short_ball_is_allowed() {
    let g = uniform(&gen_path(3).unwrap());
    let tf = test_function(&g, 0, 5).unwrap();
    assert_eq!(tf.support(), 3);
}

#[test]
fn fnorm_on_regular_graphs() {
    let g = uniform(&gen_random_regular(80, 4, 6, 1).unwrap());
    let tf = test_function(&g, 0, 2).unwrap();
    let rep = fnorm_bounds_check(&g, &tf, 4.0).unwrap();
    assert!(rep.holds(), "{rep:?}");
    for c in rep.level_sums.windows(2).skip(1) {
        assert!(close(c[1] / c[0], 3.0 / 4.0, 1e-12));
    }

    let tf = test_function(&g, 0, 0).unwrap();
    let rep = fnorm_bounds_check(&g, &tf, 4.0).unwrap();
    assert_eq!((rep.norm_sq, rep.lower, rep.upper), (1.0, 1.0, 1.0));
    assert!(rep.holds());
}

#[test]
fn fnorm_random_eight_regular() {
    let g = uniform(&gen_random_regular(2000, 8, 6, 5).unwrap());
    let tf = test_function(&g, 17, 2).unwrap();
    let rep = fnorm_bounds_check(&g, &tf, 8.0).unwrap();
    assert!(rep.holds(), "{rep:?}");
}

#[test]
fn fnorm_rejects_unnormalized() {
    let g = path_example();
    let tf = test_function(&g, 0, 1).unwrap();
    assert!(fnorm_bounds_check(&g, &tf, 16.0).is_err());
}

#[test]
fn projection_checks() {
    let g = uniform(&gen_random_regular(200, 12, 4, 2).unwrap());
    let tf = test_function(&g, 0, 0).unwrap();
    let rep = projection_bound_check(&g, &tf, 12.0, 4).unwrap();
    assert!(close(rep.measured, 1.0 - 1.0 / 200.0, 1e-12));
    assert!(rep.holds);

    let tf = test_function(&g, 7, 1).unwrap();
    let rep = projection_bound_check(&g, &tf, 12.0, 4).unwrap();
    assert!(rep.measured >= 1.0 - 13.0 / 200.0);
    assert!(rep.holds);

    assert!(projection_bound_check(&g, &tf, 8.0, 4).is_err());
}

#[test]
fn perp_of_centered_vector_is_full() {
    let f = [1.0, -1.0, 2.0, -2.0];
    assert_eq!(perp_sq(&f, dot(&f, &f)), dot(&f, &f));
}

#[test]
fn single_edge_certificate() {
    let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
    let c = ab_certificate(&g, 0, 0).unwrap();
    assert!(close(c.certified_lower_bound, 1.0, 1e-12));
    assert!(close(c.eigensolver_ratio, 1.0, 1e-12));
}

#[test]
fn cycle_certificates_are_root_independent() {
    let g = half_cycle(8);
    let first = ab_certificate(&g, 0, 2).unwrap();
    assert!(first.certified_lower_bound <= first.eigensolver_ratio + 1e-9);
    for r in 1..8 {
        let c = ab_certificate(&g, r, 2).unwrap();
        assert!(close(c.certified_lower_bound, first.certified_lower_bound, 1e-12));
    }
}

#[test]
fn antisymmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = gen_random_regular(100, 3, 8, 4)
        .unwrap()
        .map_weights(|_| rng.gen_range(0.2..1.0))
        .unwrap()
        .normalize_max_weighted_degree()
        .unwrap();
    for r in [0, 13, 49] {
        let c = ab_certificate(&g, r, 3).unwrap();
        assert!((c.signed_w_signed + c.f_w_f).abs() <= 1e-10);
        assert!((c.signed_d_signed - c.f_d_f).abs() <= 1e-10);
    }
}

/// Level sums of an unweighted `d`-regular graph with weights `1/d`.
fn regular_closed_form(n: usize, d: usize, k: usize) -> f64 {
    let df = d as f64;
    let mut norm = 1.0;
    let mut fwf = 0.0;
    let (mut sum, mut signed_sum) = (1.0, 1.0);
    for ell in 1..=k {
        let c = ((df - 1.0) / df).powi(ell as i32 - 1);
        norm += c;
        fwf += 2.0 / df.sqrt() * c;
        let count = df * (df - 1.0).powi(ell as i32 - 1);
        let value = df.powf(-(ell as f64) / 2.0);
        sum += count * value;
        signed_sum += if ell % 2 == 1 { -1.0 } else { 1.0 } * count * value;
    }
    let nf = n as f64;
    let low = (norm - fwf) / (norm - sum * sum / nf);
    let high = (norm + fwf) / (norm - signed_sum * signed_sum / nf);
    high / low
}

#[test]
fn regular_graph_closed_form() {
    for (n, d, girth, k) in [(120, 3, 8, 3), (200, 5, 6, 2), (64, 6, 4, 1)] {
        let g = uniform(&gen_random_regular(n, d, girth, 9).unwrap());
        let c = ab_certificate(&g, 0, k).unwrap();
        let want = regular_closed_form(n, d, k);
        assert!(close(c.certified_lower_bound, want, 1e-9), "{} vs {want}", c.certified_lower_bound);
    }
}

#[test]
fn best_root_on_vertex_transitive_graphs() {
    let g = uniform(&gen_hypercube(5).unwrap());
    let best = best_root_certificate(&g, 1).unwrap();
    assert_eq!(best.certificate.root, 0);
    let fwf = best.certificate.f_w_f;
    assert!(close(best.pi_average_fwf, fwf, 1e-12));
    for r in [3, 17, 31] {
        assert!(close(ab_certificate(&g, r, 1).unwrap().f_w_f, fwf, 1e-12));
    }
}

#[test]
fn best_root_radius_zero() {
    let g = uniform(&gen_petersen());
    let best = best_root_certificate(&g, 0).unwrap();
    assert_eq!(best.certificate.f_w_f, 0.0);
    assert_eq!(best.pi_average_fwf, 0.0);
}

#[test]
fn best_root_beats_average() {
    let g = uniform(&gen_random_regular(300, 3, 8, 21).unwrap());
    let best = best_root_certificate(&g, 3).unwrap();
    assert!(best.certificate.f_w_f >= best.pi_average_fwf - 1e-12);
    assert!(best.certificate.certified_lower_bound <= best.certificate.eigensolver_ratio + 1e-9);
}

#[test]
fn stationary_examples() {
    let pi = stationary_distribution(&gen_path(3).unwrap()).unwrap();
    assert_eq!(pi, vec![0.25, 0.5, 0.25]);

    let pi = stationary_distribution(&uniform(&gen_petersen())).unwrap();
    assert!(pi.iter().all(|&p| close(p, 0.1, 1e-12)));

    let star = gen_star(6).unwrap().scaled(0.2).unwrap();
    let pi = stationary_distribution(&star).unwrap();
    assert!(close(pi[0], 0.5, 1e-12));
    assert!(close(pi.iter().sum(), 1.0, 1e-12));

    let empty = WeightedGraph::new(3, []).unwrap();
    assert!(matches!(stationary_distribution(&empty), Err(Error::NoEdges)));
}

#[test]
fn walks_on_uniform_regular_graph() {
    let d = 30usize;
    let g = uniform(&gen_random_regular(62, d, 3, 2).unwrap());
    let k = 4;
    let s = walk_stats(&g, k, WalkMode::Exact).unwrap();
    let df = d as f64;
    assert!(close(s.sqrt_weight_sum.mean, k as f64 / df.sqrt(), 1e-12));
    assert!(s.sqrt_weight_sum.mean >= s.sqrt_weight_lower_bound);
    assert!(close(s.total_probability.unwrap(), 1.0, 1e-10));
    assert_eq!(s.backtrack_probability.len(), k - 1);
    let bound = s.backtrack_bound.unwrap();
    for p in &s.backtrack_probability {
        assert!(close(p.mean, 1.0 / df, 1e-12));
        assert!(p.mean <= bound);
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let g = gen_cycle(10)
        .unwrap()
        .map_weights(|_| rng.gen_range(0.1..1.0))
        .unwrap();
    let exact = walk_stats(&g, 3, WalkMode::Exact).unwrap();
    let mc = walk_stats(&g, 3, WalkMode::MonteCarlo { samples: 20_000, seed: 4 }).unwrap();
    assert!(mc.sqrt_weight_sum.agrees_with(&exact.sqrt_weight_sum, 3.0, 1e-12));
    assert!(mc.backtrack_weighted.agrees_with(&exact.backtrack_weighted, 3.0, 1e-12));
    for (a, b) in mc.backtrack_probability.iter().zip(&exact.backtrack_probability) {
        assert!((0.0..=1.0).contains(&a.mean));
        assert!(a.agrees_with(b, 3.0, 1e-12));
    }
}

#[test]
fn exact_mode_limits() {
    let g = gen_cycle(10).unwrap();
    assert!(walk_stats(&g, 7, WalkMode::Exact).is_err());
    let big = gen_cycle(201).unwrap();
    assert!(walk_stats(&big, 2, WalkMode::Exact).is_err());
}

#[test]
fn low_weighted_degree_claim() {
    // Triangle 0-1-2 with unit-degree vertices plus a pendant of degree 0.5.
    let g = WeightedGraph::new(
        5,
        [(0, 1, 0.5), (1, 2, 0.5), (2, 0, 0.5), (3, 4, 0.5), (0, 3, 0.0001)],
    )
    .unwrap()
    .normalize_max_weighted_degree()
    .unwrap();
    let c = claim_low_weighted_degree(&g, 64.0).unwrap().unwrap();
    assert_eq!(c.u, 4);
    let n = 5.0;
    assert!(close(c.lambda2_upper, g.weighted_degree(4) * n / (n - 1.0), 1e-12));
    assert!(c.lambda2_upper <= c.lambda2_bound + 1e-12);
    let spec = eig(&laplacian(&g), false).unwrap();
    assert!(spec.values[1] <= c.lambda2_upper + 1e-8);
    assert!(spec.max() >= c.lambdan_lower - 1e-8);
    assert!(close(c.lambdan_lower, 1.0, 1e-12));

    let regular = uniform(&gen_petersen());
    assert!(claim_low_weighted_degree(&regular, 64.0).unwrap().is_none());
}

#[test]
fn heavy_edge_claim() {
    let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
    let c = claim_heavy_edge(&g, 25.0).unwrap().unwrap();
    assert!(close(c.quotient, 2.0, 1e-12));
    assert!(c.meets_target());

    let g = WeightedGraph::new(2, [(0, 1, 0.9)]).unwrap().normalize_max_weighted_degree().unwrap();
    assert!(claim_heavy_edge(&g, 25.0).unwrap().is_some());

    let light = uniform(&gen_complete(30).unwrap());
    assert!(claim_heavy_edge(&light, 25.0).unwrap().is_none());
}

#[test]
fn heavy_edge_quotient_formula() {
    // w(u) = w(v) = 0.9 is not normalized, so evaluate the quotient directly.
    let g = WeightedGraph::new(2, [(0, 1, 0.9)]).unwrap();
    assert!(close(rayleigh(&laplacian(&g), &[1.0, -1.0]).unwrap(), 1.8, 1e-12));
}

#[test]
fn low_comb_degree_detection() {
    assert_eq!(claim_low_comb_degree_detect(&gen_star(10).unwrap(), 8.0), Some(1));
    assert_eq!(claim_low_comb_degree_detect(&gen_hypercube(4).unwrap(), 4.0), None);
    let g = gen_random_regular(40, 3, 3, 1).unwrap();
    assert_eq!(claim_low_comb_degree_detect(&g, 8.0), None);
}

#[test]
fn report_json_shape() {
    let c = ab_certificate(&half_cycle(8), 0, 2).unwrap();
    let v = serde_json::to_value(CertificateReport::new(&c, None)).unwrap();
    for key in ["root", "k", "certified_lower_bound", "eigensolver_ratio", "fWf", "fDf", "norms", "walk_stats"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

fn random_graph(kind: u8, seed: u64) -> WeightedGraph {
    match kind % 6 {
        0 => gen_cycle(5 + (seed % 20) as usize).unwrap(),
        1 => gen_path(3 + (seed % 20) as usize).unwrap(),
        2 => gen_petersen(),
        3 => gen_hypercube(2 + (seed % 4) as u32).unwrap(),
        4 => gen_star(3 + (seed % 10) as usize).unwrap(),
        _ => gen_random_regular(30 + 2 * (seed % 20) as usize, 3, 5, seed).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificate_is_sound(kind in 0u8..6, seed in 0u64..1000, root in 0usize..1000, k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(kind, seed)
            .map_weights(|_| rng.gen_range(0.05..1.0))
            .unwrap()
            .normalize_max_weighted_degree()
            .unwrap();
        let k = (0..=k).rev().find(|&k| g.girth().exceeds(2 * k + 1)).unwrap();
        let r = root % g.n();
        match ab_certificate(&g, r, k) {
            Ok(c) => {
                let truth = lambda_ratio(&g).unwrap().ratio;
                prop_assert!(c.certified_lower_bound <= truth + 1e-9);
                prop_assert!((c.signed_w_signed + c.f_w_f).abs() <= 1e-10);
                prop_assert!((c.signed_d_signed - c.f_d_f).abs() <= 1e-10);
            }
            // A ball covering a whole star or path can make f nearly constant.
            Err(Error::Precondition(msg)) => prop_assert!(msg.contains("constant"), "{}", msg),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn edge_stationarity_and_convexity(kind in 0u8..6, seed in 0u64..1000, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(kind, seed)
            .map_weights(|_| rng.gen_range(0.05..1.0))
            .unwrap();
        let s = walk_stats(&g, k, WalkMode::Exact).unwrap();
        prop_assert!(close(s.sqrt_weight_sum.mean, s.stationary_prediction, 1e-10));
        prop_assert!(close(s.total_probability.unwrap(), 1.0, 1e-10));
        for p in &s.backtrack_probability {
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&p.mean));
        }
        prop_assert!(convexity_check(&g).unwrap().holds);
    }

    #[test]
    fn pi_average_identity(kind in 0u8..6, seed in 0u64..1000, k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(kind, seed)
            .map_weights(|_| rng.gen_range(0.05..1.0))
            .unwrap()
            .normalize_max_weighted_degree()
            .unwrap();
        let k = (0..=k).rev().find(|&k| g.girth().exceeds(2 * k + 1)).unwrap();
        let pi = stationary_distribution(&g).unwrap();
        let direct: f64 = (0..g.n()).map(|r| pi[r] * fwf_at(&g, r, k).unwrap()).sum();
        let walks = pi_average_fwf_from_walks(&g, k).unwrap();
        prop_assert!((direct - walks).abs() <= 1e-8, "{} vs {}", direct, walks);
    }
}
