//! Instance generators: hypercubes, random properly coloured graphs,
//! rainbow-coloured cliques, and one-factorized cliques.
//!
//! Every generator is deterministic given its arguments (and seed, where
//! one exists); outputs always satisfy the `ColouredGraph` invariants.

use crate::graph::ColouredGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("hypercube dimension {0} outside 1..=24")]
    DimensionOutOfRange(u32),
    #[error("edge probability {0} outside (0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("one-factorization needs an even vertex count >= 2, got {0}")]
    OddOrder(usize),
    #[error("vertex count {0} too small")]
    TooFewVertices(usize),
}

/// Proper edge-colouring rule for `gen_random_proper`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColouringRule {
    /// First-fit on (u, v)-sorted edges; uses at most 2*maxdeg - 1 colours.
    Greedy,
    /// Fan-recolouring (Misra-Gries); uses at most maxdeg + 1 colours.
    Fanned,
}

impl std::str::FromStr for ColouringRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(ColouringRule::Greedy),
            "fanned" => Ok(ColouringRule::Fanned),
            other => Err(format!("unknown colouring rule `{other}` (greedy|fanned)")),
        }
    }
}

/// Dimension-m hypercube: vertices are bitmasks `0..2^m`; the edge flipping
/// bit `i` gets colour `i`. The colouring is proper and no rainbow cycle
/// exists (any cycle repeats a flipped bit, hence a colour).
pub fn gen_hypercube(m: u32) -> Result<ColouredGraph, InstanceError> {
    if !(1..=24).contains(&m) {
        return Err(InstanceError::DimensionOutOfRange(m));
    }
    let n = 1usize << m;
    let mut edges = Vec::with_capacity(m as usize * (n / 2));
    for v in 0..n {
        for bit in 0..m {
            if v & (1 << bit) != 0 {
                edges.push((v ^ (1 << bit), v, bit as usize));
            }
        }
    }
    Ok(ColouredGraph::from_edges(n, m as usize, edges).expect("hypercube construction is valid"))
}

/// G(n, p) with a proper edge colouring by the chosen rule. The edge sample
/// draws pairs in lexicographic order from a ChaCha8 stream, so identical
/// (n, p, seed) give identical graphs.
pub fn gen_random_proper(
    n: usize,
    p: f64,
    rule: ColouringRule,
    seed: u64,
) -> Result<ColouredGraph, InstanceError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(InstanceError::ProbabilityOutOfRange(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    let colours = match rule {
        ColouringRule::Greedy => greedy_colouring(n, &pairs),
        ColouringRule::Fanned => fanned_colouring(n, &pairs),
    };
    let k = colours.iter().copied().max().map_or(0, |c| c + 1).max(1);
    let edges = pairs
        .iter()
        .zip(&colours)
        .map(|(&(u, v), &c)| (u, v, c))
        .collect::<Vec<_>>();
    Ok(ColouredGraph::from_edges(n, k, edges).expect("colouring rules produce proper colourings"))
}

/// Complete graph with every edge its own colour.
pub fn gen_rainbow_complete(n: usize) -> Result<ColouredGraph, InstanceError> {
    if n < 2 {
        return Err(InstanceError::TooFewVertices(n));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            let c = edges.len();
            edges.push((u, v, c));
        }
    }
    let k = edges.len();
    Ok(ColouredGraph::from_edges(n, k, edges).expect("rainbow clique is valid"))
}

/// Complete graph on even n coloured by the round-robin one-factorization:
/// n-1 colours, each colour class a perfect matching.
pub fn gen_one_factorized_complete(n: usize) -> Result<ColouredGraph, InstanceError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(InstanceError::OddOrder(n));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    let cycle = n - 1;
    for round in 0..cycle {
        edges.push((n - 1, round, round));
        for i in 1..n / 2 {
            let a = (round + i) % cycle;
            let b = (round + cycle - i) % cycle;
            edges.push((a, b, round));
        }
    }
    Ok(ColouredGraph::from_edges(n, cycle, edges).expect("round-robin schedule is a 1-factorization"))
}

// ---- colouring rules ----

fn greedy_colouring(n: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    let max_deg = max_degree(n, pairs);
    let palette = (2 * max_deg).max(1);
    let mut used = vec![vec![false; palette]; n];
    let mut colours = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs {
        let c = (0..palette)
            .find(|&c| !used[u][c] && !used[v][c])
            .expect("first-fit needs at most 2*maxdeg - 1 colours");
        used[u][c] = true;
        used[v][c] = true;
        colours.push(c);
    }
    colours
}

fn max_degree(n: usize, pairs: &[(usize, usize)]) -> usize {
    let mut deg = vec![0usize; n];
    for &(u, v) in pairs {
        deg[u] += 1;
        deg[v] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

/// Misra-Gries fan recolouring; at most maxdeg + 1 colours.
fn fanned_colouring(n: usize, pairs: &[(usize, usize)]) -> Vec<usize> {
    Fanned::new(n, pairs).run()
}

struct Fanned<'a> {
    pairs: &'a [(usize, usize)],
    adj: Vec<Vec<usize>>, // edge ids per vertex, ascending by neighbour
    palette: usize,
    colour: Vec<Option<usize>>,
    // at[v][c] = edge id coloured c at v, if any
    at: Vec<Vec<Option<usize>>>,
}

impl<'a> Fanned<'a> {
    fn new(n: usize, pairs: &'a [(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in pairs.iter().enumerate() {
            adj[u].push(id);
            adj[v].push(id);
        }
        let palette = max_degree(n, pairs) + 1;
        Fanned {
            pairs,
            adj,
            palette,
            colour: vec![None; pairs.len()],
            at: vec![vec![None; palette]; n],
        }
    }

    fn other(&self, id: usize, v: usize) -> usize {
        let (a, b) = self.pairs[id];
        if a == v {
            b
        } else {
            a
        }
    }

    fn free(&self, v: usize, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn first_free(&self, v: usize) -> usize {
        (0..self.palette)
            .find(|&c| self.free(v, c))
            .expect("degree < palette leaves a free colour")
    }

    fn assign(&mut self, id: usize, c: usize) {
        let (u, v) = self.pairs[id];
        if let Some(old) = self.colour[id] {
            self.at[u][old] = None;
            self.at[v][old] = None;
        }
        self.colour[id] = Some(c);
        debug_assert!(self.at[u][c].is_none() && self.at[v][c].is_none());
        self.at[u][c] = Some(id);
        self.at[v][c] = Some(id);
    }

    /// Maximal fan of `u` rooted at the uncoloured edge to `v`: each next
    /// fan edge's colour is free at the previous fan endpoint.
    fn maximal_fan(&self, u: usize, v: usize, uncoloured: usize) -> Vec<usize> {
        let mut fan = vec![uncoloured];
        let mut in_fan = vec![false; self.pairs.len()];
        in_fan[uncoloured] = true;
        let mut last = v;
        loop {
            let next = self.adj[u].iter().copied().find(|&id| {
                !in_fan[id]
                    && self
                        .colour[id]
                        .map(|c| self.free(last, c))
                        .unwrap_or(false)
            });
            match next {
                Some(id) => {
                    in_fan[id] = true;
                    last = self.other(id, u);
                    fan.push(id);
                }
                None => return fan,
            }
        }
    }

    /// Maximal path from `u` alternating colours d, c, d, ...; flips every
    /// edge on it (d <-> c), making d free at u.
    fn invert_cd_path(&mut self, u: usize, c: usize, d: usize) {
        let mut path = Vec::new();
        let mut cur = u;
        let mut want = d;
        while let Some(id) = self.at[cur][want] {
            path.push(id);
            cur = self.other(id, cur);
            want = if want == c { d } else { c };
        }
        // clear first, then reassign flipped colours
        for &id in &path {
            let (a, b) = self.pairs[id];
            let col = self.colour[id].expect("path edges are coloured");
            self.at[a][col] = None;
            self.at[b][col] = None;
            self.colour[id] = None;
        }
        let mut want = c; // first path edge had colour d, flips to c
        for &id in &path {
            self.assign(id, want);
            want = if want == c { d } else { c };
        }
    }

    fn run(mut self) -> Vec<usize> {
        for id in 0..self.pairs.len() {
            let (u, v) = self.pairs[id];
            let fan = self.maximal_fan(u, v, id);
            let c = self.first_free(u);
            let last_end = self.other(*fan.last().expect("fan nonempty"), u);
            let d = self.first_free(last_end);
            if c != d && !self.free(u, d) {
                self.invert_cd_path(u, c, d);
            }
            // shortest prefix fan whose endpoint now has d free
            let w = fan
                .iter()
                .position(|&fid| self.free(self.other(fid, u), d))
                .expect("inversion frees d on some fan vertex");
            // rotate: shift colours one step toward the root, colour fan[w] d
            for i in 0..w {
                let next_colour = self.colour[fan[i + 1]].expect("fan tail is coloured");
                let (a, b) = self.pairs[fan[i + 1]];
                self.at[a][next_colour] = None;
                self.at[b][next_colour] = None;
                self.colour[fan[i + 1]] = None;
                self.assign(fan[i], next_colour);
            }
            self.assign(fan[w], d);
        }
        self.colour
            .into_iter()
            .map(|c| c.expect("all edges coloured"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ColourId, VertexId};

    // ---- hypercube ----

    #[test]
    fn hypercube_q3_counts() {
        let g = gen_hypercube(3).unwrap();
        assert_eq!((g.n(), g.m(), g.k()), (8, 12, 3));
        // every vertex has degree m
        for v in 0..8 {
            assert_eq!(g.degree(VertexId(v)), 3);
        }
    }

    #[test]
    fn hypercube_edge_identity() {
        for m in 1..=10u32 {
            let g = gen_hypercube(m).unwrap();
            assert_eq!(g.m(), m as usize * (1usize << (m - 1)));
        }
        assert_eq!(
            gen_hypercube(0).unwrap_err(),
            InstanceError::DimensionOutOfRange(0)
        );
        assert_eq!(
            gen_hypercube(25).unwrap_err(),
            InstanceError::DimensionOutOfRange(25)
        );
    }

    #[test]
    fn hypercube_q1_is_single_edge() {
        let g = gen_hypercube(1).unwrap();
        assert_eq!((g.n(), g.m(), g.k()), (2, 1, 1));
        assert_eq!(g.edge(0).colour, ColourId(0));
    }

    // ---- random proper ----

    #[test]
    fn random_proper_is_deterministic_and_proper() {
        let a = gen_random_proper(30, 0.4, ColouringRule::Greedy, 11).unwrap();
        let b = gen_random_proper(30, 0.4, ColouringRule::Greedy, 11).unwrap();
        assert_eq!(a, b);
        let c = gen_random_proper(30, 0.4, ColouringRule::Greedy, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn greedy_colour_budget() {
        let g = gen_random_proper(50, 1.0, ColouringRule::Greedy, 5).unwrap();
        assert_eq!(g.m(), 50 * 49 / 2);
        let max_deg = g.full_view().degree_stats().unwrap().max;
        assert!(g.k() < 2 * max_deg, "k = {}, maxdeg = {max_deg}", g.k());
    }

    #[test]
    fn fanned_colour_budget() {
        for seed in 0..5 {
            let g = gen_random_proper(24, 0.6, ColouringRule::Fanned, seed).unwrap();
            let max_deg = g.full_view().degree_stats().unwrap().max;
            assert!(
                g.k() <= max_deg + 1,
                "seed {seed}: k = {} > maxdeg + 1 = {}",
                g.k(),
                max_deg + 1
            );
        }
        // dense case: fan recolouring on a clique
        let g = gen_random_proper(16, 1.0, ColouringRule::Fanned, 3).unwrap();
        assert!(g.k() <= 16);
    }

    #[test]
    fn rejects_bad_probability() {
        assert_eq!(
            gen_random_proper(5, 0.0, ColouringRule::Greedy, 1).unwrap_err(),
            InstanceError::ProbabilityOutOfRange(0.0)
        );
        assert_eq!(
            gen_random_proper(5, 1.5, ColouringRule::Greedy, 1).unwrap_err(),
            InstanceError::ProbabilityOutOfRange(1.5)
        );
    }

    // ---- rainbow complete ----

    #[test]
    fn rainbow_complete_k4() {
        let g = gen_rainbow_complete(4).unwrap();
        assert_eq!((g.n(), g.m(), g.k()), (4, 6, 6));
        // all colours distinct
        let mut cs: Vec<u32> = g.edges().iter().map(|e| e.colour.0).collect();
        cs.sort_unstable();
        cs.dedup();
        assert_eq!(cs.len(), 6);
    }

    // ---- one-factorized complete ----

    #[test]
    fn one_factorization_small() {
        let g = gen_one_factorized_complete(4).unwrap();
        assert_eq!((g.n(), g.m(), g.k()), (4, 6, 3));
        for c in 0..3u32 {
            let class: Vec<_> = g
                .edges()
                .iter()
                .filter(|e| e.colour == ColourId(c))
                .collect();
            assert_eq!(class.len(), 2, "colour {c} is a perfect matching");
            // endpoints all distinct
            let mut ends: Vec<u32> = class.iter().flat_map(|e| [e.u.0, e.v.0]).collect();
            ends.sort_unstable();
            ends.dedup();
            assert_eq!(ends.len(), 4);
        }
    }

    #[test]
    fn one_factorization_k12() {
        let g = gen_one_factorized_complete(12).unwrap();
        assert_eq!((g.n(), g.m(), g.k()), (12, 66, 11));
        for c in 0..11u32 {
            let class = g
                .edges()
                .iter()
                .filter(|e| e.colour == ColourId(c))
                .count();
            assert_eq!(class, 6);
        }
        assert_eq!(
            gen_one_factorized_complete(3).unwrap_err(),
            InstanceError::OddOrder(3)
        );
    }
}
