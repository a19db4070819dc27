use super::*;
use crate::graph::{gen_complete, gen_cycle, gen_hypercube, gen_petersen, gen_random_regular, gen_star};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn helmert_is_orthonormal() {
    for n in [2, 5, 9] {
        let b = helmert_basis(n);
        let btb = b.transpose().matmul(&b);
        assert!(btb.frobenius_distance(&DenseMatrix::identity(n - 1)) <= 1e-12);
        let ones = vec![1.0; n];
        assert!(b.tr_mul_vec(&ones).iter().all(|x| x.abs() <= 1e-12));
    }
}

#[test]
fn single_edge_vector() {
    let g = WeightedGraph::unweighted(2, [(0, 1)]).unwrap();
    let sys = edge_vectors(&g).unwrap();
    assert_eq!(sys.dim(), 1);
    assert!((sys.vectors[0][0].powi(2) - 1.0).abs() <= 1e-12);
}

#[test]
fn triangle_vectors() {
    let sys = edge_vectors(&gen_complete(3).unwrap()).unwrap();
    assert_eq!(sys.vectors.len(), 3);
    for x in &sys.vectors {
        let sq: f64 = x.iter().map(|v| v * v).sum();
        assert!((sq - 2.0 / 3.0).abs() <= 1e-12);
    }
    assert!(sys.isotropy_error() <= 1e-12);
}

#[test]
fn isotropy_and_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for g in [gen_petersen(), gen_hypercube(4).unwrap(), gen_random_regular(30, 4, 3, 1).unwrap()] {
        let g = g.map_weights(|_| rng.gen_range(0.1..3.0)).unwrap();
        let sys = edge_vectors(&g).unwrap();
        assert!(sys.isotropy_error() <= 1e-8);
        let trace: f64 = sys.vectors.iter().flatten().map(|v| v * v).sum();
        assert!((trace - (g.n() - 1) as f64).abs() <= 1e-9);
    }
}

#[test]
fn disconnected_rejected() {
    let g = WeightedGraph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
    assert!(edge_vectors(&g).is_err());
    assert!(sparsify(&g, 8.0).is_err());
}

#[test]
fn verify_examples() {
    let k4 = gen_complete(4).unwrap();
    let same = verify_sparsifier(&k4, &k4, 0.0).unwrap();
    assert!(same.holds);
    assert!((same.kappa_measured - 1.0).abs() <= 1e-12);

    let doubled = verify_sparsifier(&k4, &k4.scaled(2.0).unwrap(), 0.0).unwrap();
    assert!((doubled.kappa_measured - 1.0).abs() <= 1e-12);

    let star = gen_star(4).unwrap();
    let v = verify_sparsifier(&k4, &star, 3.0).unwrap();
    assert!((v.kappa_measured - 4.0).abs() <= 1e-10);
    assert!(v.holds);
    assert!(!verify_sparsifier(&k4, &star, 2.9).unwrap().holds);

    let outside = WeightedGraph::unweighted(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    assert!(verify_sparsifier(&star, &outside, 10.0).is_err());
}

#[test]
fn every_edge_is_identity() {
    let g = gen_petersen();
    let r = every_edge_sparsifier(&g).unwrap();
    assert!(r.epsilon_measured.abs() <= 1e-10);
    assert_eq!(r.edges, g.m());
}

#[test]
fn clique_sparsifier() {
    let g = gen_complete(32).unwrap();
    let r = sparsify(&g, 8.0).unwrap();
    assert!(r.edges <= 128);
    assert!(r.average_degree <= 8.0);
    assert!(r.kappa_measured <= 9.0 + 1e-6, "{}", r.kappa_measured);
    assert!(r.kappa_measured <= r.barrier_bound + 1e-6);
    assert!(r.barrier_safe);
    let v = verify_sparsifier(&g, &r.sparsifier, r.kappa_target.unwrap() - 1.0 + 1e-6).unwrap();
    assert!(v.holds);
    assert!((v.lambda_min_rel - 1.0).abs() <= 1e-9);
    assert!((r.ramanujan_benchmark.unwrap() - 4.9073).abs() < 1e-3);
}

#[test]
fn sparsify_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = gen_random_regular(24, 6, 3, 3)
        .unwrap()
        .map_weights(|_| rng.gen_range(0.5..2.0))
        .unwrap();
    let a = sparsify(&g, 4.0).unwrap();
    let b = sparsify(&g, 4.0).unwrap();
    assert_eq!(a.sparsifier.edges(), b.sparsifier.edges());
    assert_eq!(a.kappa_measured.to_bits(), b.kappa_measured.to_bits());
    let v = verify_sparsifier(&g, &a.sparsifier, a.kappa_target.unwrap() - 1.0 + 1e-6).unwrap();
    assert!(v.holds, "{} vs {:?}", v.kappa_measured, a.kappa_target);
}

#[test]
fn sparse_input_reuses_edges() {
    // T = 4n exceeds m = n, so edges are picked repeatedly and merged.
    let g = gen_cycle(12).unwrap();
    let r = sparsify(&g, 8.0).unwrap();
    assert!(r.edges <= g.m());
    assert!(r.kappa_measured <= r.kappa_target.unwrap() + 1e-6);
}
