use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;
use crate::error::{Error, Result};

/// Restart cap for [`gen_random_regular`].
pub const RANDOM_REGULAR_MAX_ATTEMPTS: usize = 100_000;

pub fn gen_complete(n: usize) -> Result<WeightedGraph> {
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    WeightedGraph::unweighted(n, pairs)
}

pub fn gen_cycle(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::Precondition(format!("cycle needs n >= 3, got {n}")));
    }
    WeightedGraph::unweighted(n, (0..n).map(|u| (u, (u + 1) % n)))
}

pub fn gen_path(n: usize) -> Result<WeightedGraph> {
    WeightedGraph::unweighted(n, (1..n).map(|u| (u - 1, u)))
}

/// Star with center 0 and leaves `1..n`.
pub fn gen_star(n: usize) -> Result<WeightedGraph> {
    WeightedGraph::unweighted(n, (1..n).map(|u| (0, u)))
}

pub fn gen_hypercube(dim: u32) -> Result<WeightedGraph> {
    if dim > 20 {
        return Err(Error::Precondition(format!("hypercube dimension {dim} too large")));
    }
    let n = 1usize << dim;
    let pairs = (0..n).flat_map(|u| {
        (0..dim)
            .map(move |b| (u, u ^ (1 << b)))
            .filter(|&(u, v)| u < v)
    });
    WeightedGraph::unweighted(n, pairs)
}

pub fn gen_petersen() -> WeightedGraph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    WeightedGraph::unweighted(10, outer.chain(spokes).chain(inner)).expect("valid Petersen graph")
}

/// Random simple `d`-regular graph with girth at least `min_girth`.
///
/// Pairing model, one edge at a time: the partner of a stub is drawn
/// uniformly (by remaining stubs) among vertices that keep the graph simple
/// and do not close a cycle shorter than `min_girth`. A stub with no legal
/// partner is placed by switching out a random existing edge. Attempts that
/// still get stuck restart on a fresh stream of the seeded RNG.
pub fn gen_random_regular(n: usize, d: usize, min_girth: usize, seed: u64) -> Result<WeightedGraph> {
    if (n * d) % 2 != 0 {
        return Err(Error::Precondition(format!("n·d = {} must be even", n * d)));
    }
    if d >= n {
        return Err(Error::Precondition(format!("degree {d} >= n = {n}")));
    }
    // Moore bound: a d-regular graph of girth g needs at least this many vertices.
    if d >= 2 && min_girth >= 3 {
        let moore = moore_bound(d, min_girth);
        if moore > n as f64 {
            return Err(Error::Precondition(format!(
                "girth {min_girth} at degree {d} needs at least {moore} vertices, got {n}"
            )));
        }
    }
    for attempt in 0..RANDOM_REGULAR_MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        if let Some(edges) = Pairing::new(n, d, min_girth.max(3)).run(&mut rng) {
            let g = WeightedGraph::unweighted(n, edges)?;
            debug_assert!(g.girth().at_least(min_girth));
            return Ok(g);
        }
    }
    Err(Error::BudgetExhausted {
        attempts: RANDOM_REGULAR_MAX_ATTEMPTS,
    })
}

fn moore_bound(d: usize, g: usize) -> f64 {
    let dm1 = (d - 1) as f64;
    if g % 2 == 1 {
        let r = (g - 1) / 2;
        1.0 + d as f64 * (0..r).map(|i| dm1.powi(i as i32)).sum::<f64>()
    } else {
        let r = g / 2;
        2.0 * (0..r).map(|i| dm1.powi(i as i32)).sum::<f64>()
    }
}

struct Pairing {
    d: usize,
    girth: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    remaining: Vec<usize>,
    open: Vec<usize>,
    open_pos: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<(usize, usize)>,
}

const NOT_OPEN: usize = usize::MAX;

impl Pairing {
    fn new(n: usize, d: usize, girth: usize) -> Self {
        Self {
            d,
            girth,
            adj: vec![Vec::with_capacity(d); n],
            edges: Vec::with_capacity(n * d / 2),
            remaining: vec![d; n],
            open: (0..n).collect(),
            open_pos: (0..n).collect(),
            stamp: vec![0; n],
            epoch: 0,
            queue: Vec::new(),
        }
    }

    fn run(mut self, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
        let n = self.adj.len();
        let switch_budget = 20 * n * self.d + 100;
        let mut switches = 0;
        while !self.open.is_empty() {
            let u = self.pick_stub(rng);
            self.mark_ball(u, self.girth - 2);
            match self.pick_partner(u, rng) {
                Some(v) => self.add_edge(u, v),
                None => {
                    switches += 1;
                    if switches > switch_budget || !self.switch_in(u, rng) {
                        return None;
                    }
                }
            }
        }
        Some(self.edges)
    }

    /// Open vertex chosen with probability proportional to its free stubs.
    fn pick_stub(&self, rng: &mut ChaCha8Rng) -> usize {
        let total: usize = self.open.iter().map(|&v| self.remaining[v]).sum();
        let mut t = rng.gen_range(0..total);
        for &v in &self.open {
            if t < self.remaining[v] {
                return v;
            }
            t -= self.remaining[v];
        }
        unreachable!("stub index within total")
    }

    fn pick_partner(&self, u: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        let total: usize = self
            .open
            .iter()
            .filter(|&&v| !self.is_marked(v))
            .map(|&v| self.remaining[v])
            .sum();
        if total == 0 {
            return None;
        }
        let mut t = rng.gen_range(0..total);
        for &v in self.open.iter().filter(|&&v| !self.is_marked(v)) {
            if t < self.remaining[v] {
                debug_assert_ne!(u, v);
                return Some(v);
            }
            t -= self.remaining[v];
        }
        unreachable!("partner index within total")
    }

    /// Places one stub of `u` by replacing a random edge `ab` with `ua` and
    /// `wb`, where `w` is `u` again when it has two free stubs, or another
    /// open vertex otherwise.
    fn switch_in(&mut self, u: usize, rng: &mut ChaCha8Rng) -> bool {
        if self.edges.is_empty() {
            return false;
        }
        let w = if self.remaining[u] >= 2 {
            u
        } else {
            let others: Vec<usize> = self.open.iter().copied().filter(|&v| v != u).collect();
            if others.is_empty() {
                return false;
            }
            others[rng.gen_range(0..others.len())]
        };
        for _ in 0..64 {
            let idx = rng.gen_range(0..self.edges.len());
            let (mut a, mut b) = self.edges[idx];
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut a, &mut b);
            }
            if a == u || a == w || b == u || b == w {
                continue;
            }
            if self.adj[u].contains(&a) || self.adj[w].contains(&b) {
                continue;
            }
            self.remove_edge(a, b);
            self.add_edge(u, a);
            self.add_edge(w, b);
            if self.closes_short_cycle(u, a) || self.closes_short_cycle(w, b) {
                self.remove_edge(w, b);
                self.remove_edge(u, a);
                self.add_edge(a, b);
                continue;
            }
            return true;
        }
        false
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.edges.push((u.min(v), u.max(v)));
        for x in [u, v] {
            self.remaining[x] -= 1;
            if self.remaining[x] == 0 {
                let pos = self.open_pos[x];
                self.open.swap_remove(pos);
                if pos < self.open.len() {
                    self.open_pos[self.open[pos]] = pos;
                }
                self.open_pos[x] = NOT_OPEN;
            }
        }
    }

    fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].retain(|&x| x != v);
        self.adj[v].retain(|&x| x != u);
        let key = (u.min(v), u.max(v));
        let idx = self.edges.iter().position(|&e| e == key).expect("edge present");
        self.edges.swap_remove(idx);
        for x in [u, v] {
            if self.remaining[x] == 0 {
                self.open_pos[x] = self.open.len();
                self.open.push(x);
            }
            self.remaining[x] += 1;
        }
    }

    /// Marks every vertex within `depth` of `u`.
    fn mark_ball(&mut self, u: usize, depth: usize) {
        self.epoch += 1;
        let epoch = self.epoch;
        self.queue.clear();
        self.queue.push((u, 0));
        self.stamp[u] = epoch;
        let mut head = 0;
        while head < self.queue.len() {
            let (x, dx) = self.queue[head];
            head += 1;
            if dx == depth {
                continue;
            }
            for &y in &self.adj[x] {
                if self.stamp[y] != epoch {
                    self.stamp[y] = epoch;
                    self.queue.push((y, dx + 1));
                }
            }
        }
    }

    fn is_marked(&self, v: usize) -> bool {
        self.stamp[v] == self.epoch
    }

    /// Whether edge `uv` lies on a cycle shorter than the target girth.
    fn closes_short_cycle(&mut self, u: usize, v: usize) -> bool {
        self.epoch += 1;
        let epoch = self.epoch;
        self.queue.clear();
        self.queue.push((u, 0));
        self.stamp[u] = epoch;
        let limit = self.girth - 2;
        let mut head = 0;
        while head < self.queue.len() {
            let (x, dx) = self.queue[head];
            head += 1;
            if dx == limit {
                continue;
            }
            for &y in &self.adj[x] {
                if x == u && y == v {
                    continue;
                }
                if y == v {
                    return true;
                }
                if self.stamp[y] != epoch {
                    self.stamp[y] = epoch;
                    self.queue.push((y, dx + 1));
                }
            }
        }
        false
    }
}
