//! Brute-force ground truth for the fast algorithms: exhaustive subset
//! enumeration, canonical rainbow-cycle search, and full replay of
//! subdivision certificates. Everything here is deliberately simple and
//! slow; the rest of the crate is tested against it.

use crate::graph::{ColourId, ColouredGraph, SubgraphView, VertexId};
use crate::rational::{ratio, Rational};
use crate::search::RainbowPath;
use crate::subdivision::SubdivisionCertificate;
use serde::Serialize;

/// Hard cap for exhaustive subset enumeration.
pub const SUBSET_CAP: usize = 16;

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("view has {v} vertices, exhaustive check capped at {cap}")]
    TooLarge { v: usize, cap: usize },
}

/// Edge counts of every vertex subset of a small view, built by one
/// dynamic-programming sweep over bitmasks.
pub(crate) struct SubsetCounts {
    verts: Vec<VertexId>,
    counts: Vec<u32>,
}

pub(crate) fn subset_counts(view: &SubgraphView<'_>) -> Option<SubsetCounts> {
    let verts = view.vertex_vec();
    let nv = verts.len();
    if nv > SUBSET_CAP {
        return None;
    }
    let mut adj_mask = vec![0u32; nv];
    for (i, &v) in verts.iter().enumerate() {
        for (w, _, _) in view.neighbours(v) {
            if let Ok(j) = verts.binary_search(&w) {
                adj_mask[i] |= 1 << j;
            }
        }
    }
    let mut counts = vec![0u32; 1usize << nv];
    for mask in 1..(1u32 << nv) as usize {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        counts[mask] = counts[rest] + (adj_mask[low] & rest as u32).count_ones();
    }
    Some(SubsetCounts { verts, counts })
}

impl SubsetCounts {
    pub(crate) fn nv(&self) -> usize {
        self.verts.len()
    }

    pub(crate) fn count(&self, mask: usize) -> u32 {
        self.counts[mask]
    }

    pub(crate) fn members(&self, mask: usize) -> Vec<VertexId> {
        self.verts
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    }
}

/// Densest nonempty vertex subset by exhaustive enumeration (first winner
/// in ascending-mask order on ties). `None` for views above the cap or
/// without edges.
pub fn brute_densest(view: &SubgraphView<'_>) -> Option<(Vec<VertexId>, Rational)> {
    let sc = subset_counts(view)?;
    if view.e() == 0 {
        return None;
    }
    let mut best: Option<(usize, u32)> = None;
    for mask in 1..(1usize << sc.nv()) {
        let cnt = sc.count(mask);
        let size = mask.count_ones();
        let better = match best {
            None => true,
            Some((bm, bc)) => {
                let bs = bm.count_ones();
                // cnt/size > bc/bs, or equal density with fewer vertices
                (cnt as u64) * (bs as u64) > (bc as u64) * (size as u64)
                    || (cnt as u64) * (bs as u64) == (bc as u64) * (size as u64)
                        && size < bs
            }
        };
        if better {
            best = Some((mask, cnt));
        }
    }
    best.map(|(mask, cnt)| {
        (
            sc.members(mask),
            ratio(cnt as i128, mask.count_ones() as i128),
        )
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MinimalityViolation {
    /// d(G) itself is below d.
    BelowThreshold {
        #[serde(with = "crate::rational::serde_rational")]
        avg: Rational,
    },
    /// A proper induced subgraph reaches average degree d.
    DenseProperSubset {
        vertices: Vec<VertexId>,
        #[serde(with = "crate::rational::serde_rational")]
        avg: Rational,
    },
    /// Removing a single edge keeps the average degree at d or above.
    EdgeSlack {
        #[serde(with = "crate::rational::serde_rational")]
        avg_without_one_edge: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub holds: bool,
    pub counterexample: Option<MinimalityViolation>,
}

/// Checks the definition of a minimal graph of average degree >= d head-on:
/// d(G) >= d and every proper subgraph F has d(F) < d. Proper subgraphs are
/// covered by induced proper subsets (first violation in ascending-mask
/// order) plus the single-edge-removal slack on the full vertex set.
pub fn brute_d_minimal_check(
    view: &SubgraphView<'_>,
    d: Rational,
) -> Result<MinimalityReport, OracleError> {
    let sc = subset_counts(view).ok_or(OracleError::TooLarge {
        v: view.v(),
        cap: SUBSET_CAP,
    })?;
    let fail = |c| {
        Ok(MinimalityReport {
            holds: false,
            counterexample: Some(c),
        })
    };
    let avg = match view.avg_degree() {
        Some(a) => a,
        None => return fail(MinimalityViolation::BelowThreshold { avg: ratio(0, 1) }),
    };
    if avg < d {
        return fail(MinimalityViolation::BelowThreshold { avg });
    }
    let full = (1usize << sc.nv()) - 1;
    for mask in 1..full {
        let cnt = sc.count(mask) as i128;
        let size = mask.count_ones() as i128;
        let sub_avg = ratio(2 * cnt, size);
        if sub_avg >= d {
            return fail(MinimalityViolation::DenseProperSubset {
                vertices: sc.members(mask),
                avg: sub_avg,
            });
        }
    }
    if view.e() > 0 {
        let slack = ratio(2 * (view.e() as i128 - 1), view.v() as i128);
        if slack >= d {
            return fail(MinimalityViolation::EdgeSlack {
                avg_without_one_edge: slack,
            });
        }
    }
    Ok(MinimalityReport {
        holds: true,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ExpanderViolation {
    Minimality(MinimalityViolation),
    /// A subset within the size bound whose average degree exceeds
    /// (1 - lambda) d.
    DenseSmallSet {
        vertices: Vec<VertexId>,
        #[serde(with = "crate::rational::serde_rational")]
        avg: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpanderReport {
    pub holds: bool,
    pub violation: Option<ExpanderViolation>,
}

/// Exhaustively checks the expander definition: the view is a minimal graph
/// of average degree >= d, and every S with |S| <= (1 - eps) v(G) has
/// d(S) <= (1 - lambda) d. Minimality is checked first, so a failing report
/// on a disconnected union names the minimality counterexample.
pub fn brute_expander_check(
    view: &SubgraphView<'_>,
    d: Rational,
    lambda: Rational,
    eps: Rational,
) -> Result<ExpanderReport, OracleError> {
    let min_report = brute_d_minimal_check(view, d)?;
    if let Some(c) = min_report.counterexample {
        return Ok(ExpanderReport {
            holds: false,
            violation: Some(ExpanderViolation::Minimality(c)),
        });
    }
    let sc = subset_counts(view).expect("within cap");
    let nv = sc.nv() as i128;
    let limit = (ratio(1, 1) - eps) * ratio(nv, 1);
    let bound = (ratio(1, 1) - lambda) * d;
    for mask in 1..(1usize << sc.nv()) - 1 {
        let size = mask.count_ones() as i128;
        if ratio(size, 1) > limit {
            continue;
        }
        let sub_avg = ratio(2 * sc.count(mask) as i128, size);
        if sub_avg > bound {
            return Ok(ExpanderReport {
                holds: false,
                violation: Some(ExpanderViolation::DenseSmallSet {
                    vertices: sc.members(mask),
                    avg: sub_avg,
                }),
            });
        }
    }
    Ok(ExpanderReport {
        holds: true,
        violation: None,
    })
}

/// A cycle with pairwise distinct edge colours. `vertices` lists the cycle
/// once starting at its minimum vertex; `colours[i]` is the colour of the
/// edge from `vertices[i]` to `vertices[(i + 1) % len]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RainbowCycle {
    pub vertices: Vec<VertexId>,
    pub colours: Vec<ColourId>,
}

/// Exhaustive rainbow-cycle search, deterministic: cycles are rooted at
/// their minimum vertex, traversed with second vertex below last, and the
/// first hit in DFS order (ascending adjacency) is returned. `max_len`
/// bounds the cycle length in edges and is clamped to n.
pub fn brute_rainbow_cycle(graph: &ColouredGraph, max_len: usize) -> Option<RainbowCycle> {
    let n = graph.n();
    let cap = max_len.min(n);
    if cap < 3 {
        return None;
    }
    let mut state = CycleSearch {
        graph,
        cap,
        on_path: vec![false; n],
        colour_used: vec![false; graph.k()],
        path: Vec::new(),
        colours: Vec::new(),
    };
    for r in 0..n {
        let root = VertexId(r as u32);
        state.path.push(root);
        state.on_path[r] = true;
        if state.extend(root, root) {
            return Some(RainbowCycle {
                vertices: state.path,
                colours: state.colours,
            });
        }
        state.path.pop();
        state.on_path[r] = false;
    }
    None
}

struct CycleSearch<'g> {
    graph: &'g ColouredGraph,
    cap: usize,
    on_path: Vec<bool>,
    colour_used: Vec<bool>,
    path: Vec<VertexId>,
    colours: Vec<ColourId>,
}

impl CycleSearch<'_> {
    fn extend(&mut self, root: VertexId, cur: VertexId) -> bool {
        if self.path.len() >= 3 {
            if let Some(id) = self.graph.edge_between(cur, root) {
                let c = self.graph.edge(id).colour;
                if !self.colour_used[c.idx()] && self.path[1] < *self.path.last().unwrap() {
                    self.colours.push(c);
                    return true;
                }
            }
        }
        if self.path.len() == self.cap {
            return false;
        }
        for &(w, c, _) in self.graph.adjacency(cur) {
            let (w, c) = (VertexId(w), ColourId(c));
            if w < root || self.on_path[w.idx()] || self.colour_used[c.idx()] {
                continue;
            }
            self.path.push(w);
            self.on_path[w.idx()] = true;
            self.colours.push(c);
            self.colour_used[c.idx()] = true;
            if self.extend(root, w) {
                return true;
            }
            self.path.pop();
            self.on_path[w.idx()] = false;
            self.colours.pop();
            self.colour_used[c.idx()] = false;
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
pub enum RejectReason {
    #[error("certificate has {found} branch vertices, expected {expected}")]
    WrongBranchCount { expected: usize, found: usize },
    #[error("branch vertex {0} out of range")]
    BranchOutOfRange(VertexId),
    #[error("branch vertex {0} repeated")]
    RepeatedBranchVertex(VertexId),
    #[error("pair ({a}, {b}) missing from the certificate", a = .0.0, b = .0.1)]
    MissingPair((VertexId, VertexId)),
    #[error("unexpected pair ({a}, {b})", a = .0.0, b = .0.1)]
    UnexpectedPair((VertexId, VertexId)),
    #[error("path for ({0}, {1}) has wrong endpoints", pair.0, pair.1)]
    WrongEndpoints { pair: (VertexId, VertexId) },
    #[error("path for ({0}, {1}) has {len} edges, bound {bound}", pair.0, pair.1)]
    PathTooLong {
        pair: (VertexId, VertexId),
        len: usize,
        bound: usize,
    },
    #[error("path for ({0}, {1}) is malformed: {detail}", pair.0, pair.1)]
    MalformedPath {
        pair: (VertexId, VertexId),
        detail: String,
    },
    #[error("vertices {u} and {v} on the path for ({0}, {1}) are not adjacent", pair.0, pair.1)]
    MissingEdge {
        pair: (VertexId, VertexId),
        u: VertexId,
        v: VertexId,
    },
    #[error(
        "edge {u}-{v} on the path for ({0}, {1}) has colour {actual}, certificate says {stated}",
        pair.0, pair.1
    )]
    WrongColour {
        pair: (VertexId, VertexId),
        u: VertexId,
        v: VertexId,
        stated: ColourId,
        actual: ColourId,
    },
    #[error("vertex {vertex} repeats on the path for ({0}, {1})", pair.0, pair.1)]
    RepeatedVertexOnPath {
        pair: (VertexId, VertexId),
        vertex: VertexId,
    },
    #[error("interior of the path for ({0}, {1}) contains branch vertex {vertex}", pair.0, pair.1)]
    InteriorHitsBranch {
        pair: (VertexId, VertexId),
        vertex: VertexId,
    },
    #[error(
        "paths for ({0}, {1}) and ({2}, {3}) share interior vertex {vertex}",
        first.0, first.1, second.0, second.1
    )]
    InteriorsIntersect {
        first: (VertexId, VertexId),
        second: (VertexId, VertexId),
        vertex: VertexId,
    },
    #[error("colour {colour} appears on two edges of the certificate")]
    RepeatedColour { colour: ColourId },
}

/// Replays a subdivision certificate against the graph from scratch and
/// reports the first violated condition, checked in a fixed order: branch
/// shape, pair coverage, per-path endpoints and length, edge existence and
/// colours, simplicity, interior/branch separation, interior disjointness,
/// and global colour distinctness.
pub fn verify_subdivision(
    graph: &ColouredGraph,
    cert: &SubdivisionCertificate,
    t: usize,
    max_path_len: usize,
) -> Result<(), RejectReason> {
    let branch = &cert.branch;
    if branch.len() != t {
        return Err(RejectReason::WrongBranchCount {
            expected: t,
            found: branch.len(),
        });
    }
    let mut is_branch = vec![false; graph.n()];
    for &b in branch {
        if b.idx() >= graph.n() {
            return Err(RejectReason::BranchOutOfRange(b));
        }
        if is_branch[b.idx()] {
            return Err(RejectReason::RepeatedBranchVertex(b));
        }
        is_branch[b.idx()] = true;
    }
    // canonical pair order: (branch[i], branch[j]) for i < j
    let mut expected = Vec::new();
    for i in 0..branch.len() {
        for j in i + 1..branch.len() {
            expected.push((branch[i], branch[j]));
        }
    }
    let found: Vec<(VertexId, VertexId)> =
        cert.paths.iter().map(|p| (p.a, p.b)).collect();
    for (pos, &want) in expected.iter().enumerate() {
        match found.get(pos) {
            None => return Err(RejectReason::MissingPair(want)),
            Some(&got) if got != want => {
                // a later expected pair here means `want` was skipped
                if expected[pos..].contains(&got) {
                    return Err(RejectReason::MissingPair(want));
                }
                return Err(RejectReason::UnexpectedPair(got));
            }
            Some(_) => {}
        }
    }
    if let Some(extra) = found.get(expected.len()) {
        return Err(RejectReason::UnexpectedPair(*extra));
    }

    let mut interior_owner: Vec<Option<usize>> = vec![None; graph.n()];
    let mut colour_seen = vec![false; graph.k()];
    let mut first_colour_repeat: Option<ColourId> = None;
    for (pos, pp) in cert.paths.iter().enumerate() {
        let pair = (pp.a, pp.b);
        let path = &pp.path;
        replay_path(graph, pair, path, max_path_len)?;
        if path.vertices.first() != Some(&pp.a) || path.vertices.last() != Some(&pp.b) {
            return Err(RejectReason::WrongEndpoints { pair });
        }
        for &v in &path.vertices[1..path.vertices.len() - 1] {
            if is_branch[v.idx()] {
                return Err(RejectReason::InteriorHitsBranch { pair, vertex: v });
            }
            match interior_owner[v.idx()] {
                Some(first_pos) => {
                    return Err(RejectReason::InteriorsIntersect {
                        first: (cert.paths[first_pos].a, cert.paths[first_pos].b),
                        second: pair,
                        vertex: v,
                    })
                }
                None => interior_owner[v.idx()] = Some(pos),
            }
        }
        for &c in &path.colours {
            if colour_seen[c.idx()] && first_colour_repeat.is_none() {
                first_colour_repeat = Some(c);
            }
            colour_seen[c.idx()] = true;
        }
    }
    if let Some(colour) = first_colour_repeat {
        return Err(RejectReason::RepeatedColour { colour });
    }
    Ok(())
}

fn replay_path(
    graph: &ColouredGraph,
    pair: (VertexId, VertexId),
    path: &RainbowPath,
    max_path_len: usize,
) -> Result<(), RejectReason> {
    let malformed = |detail: &str| RejectReason::MalformedPath {
        pair,
        detail: detail.to_string(),
    };
    if path.vertices.is_empty() {
        return Err(malformed("no vertices"));
    }
    if path.colours.len() + 1 != path.vertices.len() {
        return Err(malformed("colour count does not match vertex count"));
    }
    if path.len() > max_path_len {
        return Err(RejectReason::PathTooLong {
            pair,
            len: path.len(),
            bound: max_path_len,
        });
    }
    let mut seen = vec![false; graph.n()];
    for &v in &path.vertices {
        if v.idx() >= graph.n() {
            return Err(malformed("vertex out of range"));
        }
        if seen[v.idx()] {
            return Err(RejectReason::RepeatedVertexOnPath { pair, vertex: v });
        }
        seen[v.idx()] = true;
    }
    for (i, win) in path.vertices.windows(2).enumerate() {
        let (u, v) = (win[0], win[1]);
        match graph.edge_between(u, v) {
            None => return Err(RejectReason::MissingEdge { pair, u, v }),
            Some(id) => {
                let actual = graph.edge(id).colour;
                if actual != path.colours[i] {
                    return Err(RejectReason::WrongColour {
                        pair,
                        u,
                        v,
                        stated: path.colours[i],
                        actual,
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        gen_hypercube, gen_one_factorized_complete, gen_rainbow_complete, gen_random_proper,
        ColouringRule,
    };

    #[test]
    fn k4_is_three_minimal() {
        let g = gen_one_factorized_complete(4).unwrap();
        let r = brute_d_minimal_check(&g.full_view(), ratio(3, 1)).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn pendant_breaks_minimality_and_names_the_k4() {
        let g = ColouredGraph::from_edges(
            5,
            4,
            [
                (0, 1, 0),
                (2, 3, 0),
                (0, 2, 1),
                (1, 3, 1),
                (0, 3, 2),
                (1, 2, 2),
                (3, 4, 3),
            ],
        )
        .unwrap();
        // d(G) = 14/5 < 3: fails at the threshold before anything else
        let r = brute_d_minimal_check(&g.full_view(), ratio(3, 1)).unwrap();
        assert_eq!(
            r.counterexample,
            Some(MinimalityViolation::BelowThreshold { avg: ratio(14, 5) })
        );
        // at d = 14/5 the K4 itself is the dense proper subset
        let r = brute_d_minimal_check(&g.full_view(), ratio(14, 5)).unwrap();
        assert_eq!(
            r.counterexample,
            Some(MinimalityViolation::DenseProperSubset {
                vertices: vec![VertexId(0), VertexId(1), VertexId(2), VertexId(3)],
                avg: ratio(3, 1),
            })
        );
    }

    #[test]
    fn single_edge_is_one_minimal() {
        let g = ColouredGraph::from_edges(2, 1, [(0, 1, 0)]).unwrap();
        let r = brute_d_minimal_check(&g.full_view(), ratio(1, 1)).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn edge_slack_is_detected() {
        // triangle at d = 4/3: subsets are sparser, but dropping one edge
        // still has 2 * 2 / 3 = 4/3 >= 4/3
        let g = ColouredGraph::from_edges(3, 3, [(0, 1, 0), (1, 2, 1), (0, 2, 2)]).unwrap();
        let r = brute_d_minimal_check(&g.full_view(), ratio(4, 3)).unwrap();
        assert_eq!(
            r.counterexample,
            Some(MinimalityViolation::EdgeSlack {
                avg_without_one_edge: ratio(4, 3)
            })
        );
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = gen_rainbow_complete(17).unwrap();
        assert_eq!(
            brute_d_minimal_check(&g.full_view(), ratio(1, 1)).unwrap_err(),
            OracleError::TooLarge { v: 17, cap: 16 }
        );
    }

    #[test]
    fn k6_is_an_expander() {
        let g = gen_one_factorized_complete(6).unwrap();
        let r =
            brute_expander_check(&g.full_view(), ratio(5, 1), ratio(1, 10), ratio(3, 10)).unwrap();
        assert!(r.holds, "{:?}", r.violation);
    }

    #[test]
    fn cycle_is_an_expander_at_low_lambda() {
        // C8: d = 2; subsets with <= 6 vertices have average degree <= 2 - 1/3
        let g = ColouredGraph::from_edges(
            8,
            3,
            [
                (0, 1, 0),
                (1, 2, 1),
                (2, 3, 0),
                (3, 4, 1),
                (4, 5, 0),
                (5, 6, 1),
                (6, 7, 0),
                (0, 7, 2),
            ],
        )
        .unwrap();
        let r =
            brute_expander_check(&g.full_view(), ratio(2, 1), ratio(1, 10), ratio(1, 4)).unwrap();
        assert!(r.holds, "{:?}", r.violation);
    }

    #[test]
    fn disjoint_cliques_fail_expansion_via_minimality() {
        // two disjoint K4s: 3-minimality already fails (either K4 alone
        // reaches average degree 3), and the report names one of them
        let mut edges = Vec::new();
        for base in [0usize, 4] {
            edges.extend([
                (base, base + 1, 0),
                (base + 2, base + 3, 0),
                (base, base + 2, 1),
                (base + 1, base + 3, 1),
                (base, base + 3, 2),
                (base + 1, base + 2, 2),
            ]);
        }
        let g = ColouredGraph::from_edges(8, 3, edges).unwrap();
        let r =
            brute_expander_check(&g.full_view(), ratio(3, 1), ratio(1, 10), ratio(1, 4)).unwrap();
        match r.violation {
            Some(ExpanderViolation::Minimality(MinimalityViolation::DenseProperSubset {
                vertices,
                avg,
            })) => {
                assert_eq!(avg, ratio(3, 1));
                assert_eq!(vertices.len(), 4);
            }
            other => panic!("expected a K4 counterexample, got {other:?}"),
        }
    }

    #[test]
    fn hypercubes_have_no_rainbow_cycle() {
        for m in 2..=4 {
            let g = gen_hypercube(m).unwrap();
            assert_eq!(brute_rainbow_cycle(&g, g.n()), None, "Q{m}");
        }
    }

    #[test]
    fn rainbow_complete_yields_the_first_triangle() {
        let g = gen_rainbow_complete(6).unwrap();
        let c = brute_rainbow_cycle(&g, 6).unwrap();
        assert_eq!(c.vertices, vec![VertexId(0), VertexId(1), VertexId(2)]);
        assert_eq!(c.colours.len(), 3);
        let distinct: std::collections::HashSet<_> = c.colours.iter().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn short_caps_suppress_cycles() {
        let g = gen_rainbow_complete(6).unwrap();
        assert_eq!(brute_rainbow_cycle(&g, 2), None);
    }

    #[test]
    fn found_cycles_replay() {
        for seed in 0..20 {
            let g = gen_random_proper(12, 0.4, ColouringRule::Greedy, seed).unwrap();
            if let Some(c) = brute_rainbow_cycle(&g, 12) {
                let len = c.vertices.len();
                assert!(len >= 3);
                assert_eq!(c.colours.len(), len);
                let distinct: std::collections::HashSet<_> = c.colours.iter().collect();
                assert_eq!(distinct.len(), len, "seed {seed}: colours repeat");
                for i in 0..len {
                    let (u, v) = (c.vertices[i], c.vertices[(i + 1) % len]);
                    let id = g.edge_between(u, v).expect("cycle edge exists");
                    assert_eq!(g.edge(id).colour, c.colours[i]);
                }
            }
        }
    }
}
