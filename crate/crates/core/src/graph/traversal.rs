use std::collections::VecDeque;

use serde::Serialize;

use super::{Girth, WeightedGraph};
use crate::error::{Error, Result};

/// Breadth-first tree of depth `k` rooted at `root`.
///
/// Neighbors are scanned in increasing id order, so `parent(v)` is the first
/// vertex of the previous level to reach `v`.
#[derive(Debug, Clone, Serialize)]
pub struct BfsTree {
    pub root: usize,
    pub depth: usize,
    pub parent: Vec<Option<usize>>,
    pub dist: Vec<Option<usize>>,
    /// `levels[l]` lists the vertices at distance exactly `l`, in discovery order.
    pub levels: Vec<Vec<usize>>,
}

impl BfsTree {
    pub fn contains(&self, v: usize) -> bool {
        self.dist[v].is_some()
    }

    /// Vertices of the tree, level by level.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

pub fn bfs_tree(g: &WeightedGraph, root: usize, k: usize) -> Result<BfsTree> {
    let n = g.n();
    if root >= n {
        return Err(Error::VertexOutOfRange { vertex: root, n });
    }
    let mut parent = vec![None; n];
    let mut dist = vec![None; n];
    let mut levels = vec![vec![root]];
    dist[root] = Some(0);
    for depth in 0..k {
        let mut next = Vec::new();
        for &u in &levels[depth] {
            for &(v, _) in g.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(depth + 1);
                    parent[v] = Some(u);
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    Ok(BfsTree {
        root,
        depth: k,
        parent,
        dist,
        levels,
    })
}

/// Shortest cycle length by BFS from every root, truncated once no shorter
/// cycle can be found. `O(n·m)` worst case.
pub fn girth(g: &WeightedGraph) -> Girth {
    let n = g.n();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut touched = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for root in 0..n {
        for &v in &touched {
            dist[v] = usize::MAX;
        }
        touched.clear();
        queue.clear();

        dist[root] = 0;
        touched.push(root);
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            // Any cycle found from here on has length at least 2·dist(x) + 1.
            if best != usize::MAX && 2 * dist[x] + 1 >= best {
                break;
            }
            for &(y, _) in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    touched.push(y);
                    queue.push_back(y);
                } else if parent[x] != y {
                    best = best.min(dist[x] + dist[y] + 1);
                }
            }
        }
        if best == 3 {
            break;
        }
    }
    if best == usize::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BallReport {
    pub root: usize,
    pub radius: usize,
    pub measured: usize,
    pub bound: f64,
    pub holds: bool,
}

/// Counts the vertices within distance `ell` of `r` and compares against
/// `2n / (d/4 - 1)^((g-1)/2 - ell)`, valid when the minimum combinatorial
/// degree is at least `d/4`, `d >= 12` and the girth is at least `g`.
pub fn ball_size_check(
    g: &WeightedGraph,
    r: usize,
    ell: usize,
    asserted_girth: usize,
    d: f64,
) -> Result<BallReport> {
    if d < 12.0 {
        return Err(Error::Precondition(format!("d = {d} < 12")));
    }
    let min_deg = g.degrees().min_combinatorial;
    if (min_deg as f64) < d / 4.0 {
        return Err(Error::Precondition(format!(
            "minimum combinatorial degree {min_deg} < d/4 = {}",
            d / 4.0
        )));
    }
    if !g.girth().at_least(asserted_girth) {
        return Err(Error::Precondition(format!(
            "girth {} < asserted {asserted_girth}",
            g.girth()
        )));
    }
    let half = (asserted_girth as f64 - 1.0) / 2.0;
    if ell as f64 > half {
        return Err(Error::Precondition(format!(
            "radius {ell} > (g-1)/2 = {half}"
        )));
    }
    let tree = bfs_tree(g, r, ell)?;
    let measured = tree.len();
    let bound = 2.0 * g.n() as f64 / (d / 4.0 - 1.0).powf(half - ell as f64);
    Ok(BallReport {
        root: r,
        radius: ell,
        measured,
        bound,
        holds: measured as f64 <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle, gen_path, gen_petersen, gen_random_regular, gen_star};

    /// Shortest simple cycle by exhaustive path enumeration.
    fn girth_by_enumeration(g: &WeightedGraph) -> Girth {
        fn extend(
            g: &WeightedGraph,
            start: usize,
            cur: usize,
            len: usize,
            on_path: &mut [bool],
            best: &mut usize,
        ) {
            for &(next, _) in g.neighbors(cur) {
                if next == start && len >= 3 {
                    *best = (*best).min(len);
                } else if next > start && !on_path[next] {
                    on_path[next] = true;
                    extend(g, start, next, len + 1, on_path, best);
                    on_path[next] = false;
                }
            }
        }
        let mut best = usize::MAX;
        let mut on_path = vec![false; g.n()];
        for start in 0..g.n() {
            on_path[start] = true;
            extend(g, start, start, 1, &mut on_path, &mut best);
            on_path[start] = false;
        }
        if best == usize::MAX {
            Girth::Infinite
        } else {
            Girth::Finite(best)
        }
    }

    #[test]
    fn girth_examples() {
        let tri = gen_complete(3).unwrap();
        assert_eq!(girth(&tri), Girth::Finite(3));
        assert_eq!(girth(&gen_path(7).unwrap()), Girth::Infinite);
        assert_eq!(girth(&gen_star(6).unwrap()), Girth::Infinite);
        let petersen = gen_petersen();
        assert_eq!(girth_by_enumeration(&petersen), Girth::Finite(5));
        assert_eq!(girth(&petersen), Girth::Finite(5));
        assert_eq!(girth(&gen_cycle(5).unwrap()), Girth::Finite(5));
    }

    #[test]
    fn girth_matches_enumeration_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=12);
            let p = rng.gen_range(0.05..0.6);
            let mut pairs = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        pairs.push((u, v));
                    }
                }
            }
            let g = WeightedGraph::unweighted(n, pairs).unwrap();
            assert_eq!(girth(&g), girth_by_enumeration(&g), "{:?}", g.edges());
        }
    }

    #[test]
    fn bfs_examples() {
        let c8 = gen_cycle(8).unwrap();
        let t = bfs_tree(&c8, 0, 2).unwrap();
        assert_eq!(t.levels, vec![vec![0], vec![1, 7], vec![2, 6]]);
        assert_eq!(t.parent[2], Some(1));
        assert_eq!(t.parent[6], Some(7));

        let star = gen_star(6).unwrap();
        let t = bfs_tree(&star, 0, 1).unwrap();
        assert_eq!(t.levels[1], vec![1, 2, 3, 4, 5]);

        let petersen = gen_petersen();
        for r in 0..10 {
            let t = bfs_tree(&petersen, r, 2).unwrap();
            assert_eq!(t.level_sizes(), vec![1, 3, 6]);
        }

        assert!(matches!(
            bfs_tree(&c8, 8, 1),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn bfs_tree_paths_are_unique_below_half_girth() {
        let g = gen_random_regular(200, 3, 9, 11).unwrap();
        let girth = g.girth();
        for r in [0, 17, 199] {
            for k in 0..=3 {
                assert!(girth.exceeds(2 * k + 1));
                let t = bfs_tree(&g, r, k).unwrap();
                for v in t.vertices().filter(|&v| v != r) {
                    let d = t.dist[v].unwrap();
                    let preds = g
                        .neighbors(v)
                        .iter()
                        .filter(|&&(x, _)| t.dist[x] == Some(d - 1))
                        .count();
                    assert_eq!(preds, 1);
                    assert_eq!(t.dist[t.parent[v].unwrap()], Some(d - 1));
                }
            }
        }
    }

    #[test]
    fn ball_examples() {
        let g = gen_random_regular(400, 12, 4, 3).unwrap();
        let girth = match g.girth() {
            Girth::Finite(x) => x,
            Girth::Infinite => unreachable!(),
        };
        let rep = ball_size_check(&g, 0, 1, girth, 12.0).unwrap();
        assert_eq!(rep.measured, 13);
        assert!(rep.holds);

        // ℓ = (g-1)/2 makes the exponent vanish.
        let rep = ball_size_check(&g, 5, 1, 3, 12.0).unwrap();
        assert_eq!(rep.bound, 2.0 * 400.0);
        assert!(rep.holds);

        assert!(matches!(
            ball_size_check(&g, 0, 1, 4, 8.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            ball_size_check(&g, 0, 2, 4, 12.0),
            Err(Error::Precondition(_))
        ));
        let star = gen_star(20).unwrap();
        assert!(matches!(
            ball_size_check(&star, 0, 0, 3, 12.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn ball_bound_holds_whenever_admissible() {
        let g = gen_random_regular(300, 12, 4, 9).unwrap();
        for r in (0..300).step_by(23) {
            for ell in 0..=1 {
                let rep = ball_size_check(&g, r, ell, 4, 12.0).unwrap();
                assert!(rep.holds);
            }
        }
    }
}
