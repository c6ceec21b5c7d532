//! Expander extraction and edge-disjoint expander coverings.
//!
//! An expander here is a minimal graph of average degree >= d in which
//! every vertex set S with |S| <= (1 - eps) v(G) keeps d(S) <= (1 - lambda) d.
//! Extraction alternates minimal-subgraph extraction with a search for
//! violating sets and shrinks while one is found; the density threshold is
//! re-anchored to the current average degree on every round, which keeps
//! each certified piece sound regardless of how much shrinking happened.

use crate::density::{dense_subgraph_decision, extract_d_minimal, DensityError};
use crate::graph::{SubgraphView, VertexId, ViewError};
use crate::oracle::subset_counts;
use crate::rational::{best_rational_le, floor_i128, ratio, rational_to_f64, Rational};
use num_traits::{One, Signed};
use serde::Serialize;

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExpanderError {
    #[error("view has no edges")]
    EmptyGraph,
    #[error("average degree {avg} is below the requested {d}")]
    BelowThreshold { avg: Rational, d: Rational },
    #[error("parameter {name} = {value} must lie in (0, 1)")]
    BadParameter { name: &'static str, value: Rational },
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    View(#[from] ViewError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpanderParams {
    #[serde(with = "crate::rational::serde_rational")]
    pub d: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub eps: Rational,
}

/// How the final "no violating set" conclusion was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// All subsets within the size bound were enumerated.
    Exhaustive,
    /// Only the flow-based and peeling-order heuristics were tried; they
    /// found nothing, which is sound for the extraction process but is not
    /// a proof of expansion.
    HeuristicUnrefuted,
}

#[derive(Debug)]
pub struct ExpanderPiece<'g> {
    pub subgraph: SubgraphView<'g>,
    pub params: ExpanderParams,
    pub certification: Certification,
    pub shrink_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolatingSet {
    pub vertices: Vec<VertexId>,
    pub avg_degree: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationSearch {
    pub found: Option<ViolatingSet>,
    /// True when the search enumerated every subset within the size bound.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DenseCandidate {
    pub(crate) vertices: Vec<VertexId>,
    pub(crate) avg: Rational,
}

fn candidate_better(a: &DenseCandidate, b: &DenseCandidate) -> bool {
    a.avg > b.avg
        || a.avg == b.avg
            && (a.vertices.len() < b.vertices.len()
                || a.vertices.len() == b.vertices.len() && a.vertices < b.vertices)
}

/// Finds a vertex set with at most `cap` vertices and average degree at
/// least `min_avg`, preferring higher density, then fewer vertices, then
/// the lexicographically first vertex list. Exhaustive up to 16 vertices;
/// beyond that a flow witness and peeling-order suffixes are tried, so a
/// `(None, false)` answer is not a proof of absence.
pub(crate) fn bounded_dense_search(
    view: &SubgraphView<'_>,
    min_avg: Rational,
    cap: usize,
) -> (Option<DenseCandidate>, bool) {
    debug_assert!(min_avg.is_positive());
    if cap == 0 || view.v() == 0 {
        return (None, true);
    }
    if let Some(sc) = subset_counts(view) {
        let nv = sc.nv();
        let mut best: Option<DenseCandidate> = None;
        for mask in 1..(1usize << nv) {
            let size = mask.count_ones() as usize;
            if size > cap {
                continue;
            }
            let avg = ratio(2 * sc.count(mask) as i128, size as i128);
            if avg < min_avg {
                continue;
            }
            let cand = DenseCandidate {
                vertices: sc.members(mask),
                avg,
            };
            if best.as_ref().is_none_or(|b| candidate_better(&cand, b)) {
                best = Some(cand);
            }
        }
        return (best, true);
    }

    let mut best: Option<DenseCandidate> = None;
    let mut offer = |cand: DenseCandidate| {
        if best.as_ref().is_none_or(|b| candidate_better(&cand, b)) {
            best = Some(cand);
        }
    };
    // flow witness at density min_avg / 2, useful when it happens to be small
    if let Ok(Some(w)) = dense_subgraph_decision(view, min_avg / ratio(2, 1)) {
        if w.vertices.len() <= cap {
            offer(DenseCandidate {
                avg: ratio(2, 1) * w.density,
                vertices: w.vertices,
            });
        }
    }
    // peeling order: repeatedly remove the minimum-degree vertex; the last
    // k removed form the densest suffixes this ordering can see
    let verts = view.vertex_vec();
    let nv = verts.len();
    let mut local = vec![usize::MAX; view.graph().n()];
    for (i, &v) in verts.iter().enumerate() {
        local[v.idx()] = i;
    }
    let mut deg: Vec<usize> = verts.iter().map(|&v| view.degree(v)).collect();
    let mut removed = vec![false; nv];
    let mut removal: Vec<(usize, usize)> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut pick = usize::MAX;
        for i in 0..nv {
            if !removed[i] && (pick == usize::MAX || (deg[i], i) < (deg[pick], pick)) {
                pick = i;
            }
        }
        removed[pick] = true;
        removal.push((pick, deg[pick]));
        for (w, _, _) in view.neighbours(verts[pick]) {
            let j = local[w.idx()];
            if !removed[j] {
                deg[j] -= 1;
            }
        }
    }
    let mut suffix_edges = 0usize;
    for k in 1..=nv.min(cap) {
        let (_, d_at_removal) = removal[nv - k];
        suffix_edges += d_at_removal;
        let avg = ratio(2 * suffix_edges as i128, k as i128);
        if avg >= min_avg {
            let mut vertices: Vec<VertexId> =
                removal[nv - k..].iter().map(|&(i, _)| verts[i]).collect();
            vertices.sort_unstable();
            offer(DenseCandidate { vertices, avg });
        }
    }
    (best, false)
}

/// Searches for S with |S| <= (1 - eps) v(G) and d(S) >= (1 - lambda) d.
pub fn find_violating_set(
    view: &SubgraphView<'_>,
    d: Rational,
    lambda: Rational,
    eps: Rational,
) -> ViolationSearch {
    let cap = floor_i128((Rational::one() - eps) * ratio(view.v() as i128, 1)).max(0) as usize;
    let threshold = (Rational::one() - lambda) * d;
    let (found, exhaustive) = if threshold.is_positive() {
        bounded_dense_search(view, threshold, cap)
    } else {
        (None, view.v() <= crate::oracle::SUBSET_CAP)
    };
    ViolationSearch {
        found: found.map(|c| ViolatingSet {
            vertices: c.vertices,
            avg_degree: c.avg,
        }),
        exhaustive,
    }
}

fn check_unit_interval(name: &'static str, value: Rational) -> Result<(), ExpanderError> {
    if value.is_positive() && value < Rational::one() {
        Ok(())
    } else {
        Err(ExpanderError::BadParameter { name, value })
    }
}

/// Extracts an expander piece: shrink to a minimal dense subgraph, search
/// for a violating set, restrict to it and repeat. The threshold is
/// re-anchored to the current average degree on every round, so the
/// certified `params.d` is the piece's own average degree.
pub fn extract_expander<'g>(
    view: &SubgraphView<'g>,
    d: Rational,
    lambda: Rational,
    eps: Rational,
) -> Result<ExpanderPiece<'g>, ExpanderError> {
    check_unit_interval("lambda", lambda)?;
    check_unit_interval("eps", eps)?;
    if view.e() == 0 {
        return Err(ExpanderError::EmptyGraph);
    }
    let avg = view.avg_degree().expect("has edges");
    if avg < d {
        return Err(ExpanderError::BelowThreshold { avg, d });
    }
    let mut current = view.clone();
    let mut steps = 0usize;
    loop {
        let d_i = current.avg_degree().expect("stays nonempty");
        let h = extract_d_minimal(&current, d_i)?.subgraph;
        let search = find_violating_set(&h, d_i, lambda, eps);
        match search.found {
            None => {
                let d_h = h.avg_degree().expect("nonempty");
                return Ok(ExpanderPiece {
                    params: ExpanderParams {
                        d: d_h,
                        lambda,
                        eps,
                    },
                    certification: match search.exhaustive {
                        true => Certification::Exhaustive,
                        false => Certification::HeuristicUnrefuted,
                    },
                    shrink_steps: steps,
                    subgraph: h,
                });
            }
            Some(vs) => {
                // d(S) >= (1 - lambda) d_i > 0, so the restriction keeps
                // edges; |S| <= (1 - eps) v(H) keeps shrinking strictly
                current = h.induced(&vs.vertices)?;
                steps += 1;
            }
        }
    }
}

#[derive(Debug)]
pub struct Covering<'g> {
    pub pieces: Vec<ExpanderPiece<'g>>,
    /// Average degree of the residual's support (isolated vertices
    /// dropped) just before each piece was extracted (parallel to
    /// `pieces`); this is the anchor each extraction ran at.
    pub residual_avg: Vec<Rational>,
    /// Edge ids never covered by any piece, ascending.
    pub uncovered: Vec<usize>,
}

/// Greedily covers the view by edge-disjoint expander pieces until at most
/// an eps-fraction of the edges remains uncovered.
pub fn cover_by_expanders<'g>(
    view: &SubgraphView<'g>,
    eps: Rational,
    lambda: Rational,
) -> Result<Covering<'g>, ExpanderError> {
    check_unit_interval("lambda", lambda)?;
    check_unit_interval("eps", eps)?;
    if view.e() == 0 {
        return Err(ExpanderError::EmptyGraph);
    }
    let total = ratio(view.e() as i128, 1);
    let mut residual = view.clone();
    let mut pieces = Vec::new();
    let mut residual_avg = Vec::new();
    while ratio(residual.e() as i128, 1) > eps * total {
        // anchor at the support average: edge removals leave isolated
        // vertices behind, and they must not dilute the threshold (two
        // disjoint cliques should come out as two clique pieces)
        let sup = residual.support();
        let d = sup.avg_degree().expect("nonempty");
        let piece = extract_expander(&sup, d, lambda, eps)?;
        let mut in_piece = vec![false; view.graph().m()];
        for id in piece.subgraph.edge_ids() {
            in_piece[id] = true;
        }
        residual = residual.retain_edges(|id| !in_piece[id]);
        residual_avg.push(d);
        pieces.push(piece);
    }
    Ok(Covering {
        pieces,
        residual_avg,
        uncovered: residual.edge_ids().collect(),
    })
}

/// The expander parameter lambda = eps / (2 ln n), rounded down to a
/// rational with denominator at most 10^6 so the guarantee
/// lambda <= eps / (2 ln n) survives the float-to-rational step. When
/// ln n is an integer (to 1e-12, as in symbolic checks) the value is exact.
pub fn paper_lambda_from_log(eps: Rational, ln_n: f64) -> Rational {
    assert!(ln_n > 0.0, "needs n >= 2");
    let rounded = ln_n.round();
    if (ln_n - rounded).abs() < 1e-12 && rounded >= 1.0 {
        return eps / ratio(2 * rounded as i128, 1);
    }
    // nudge below the float quotient before rounding down, so a float
    // rounded slightly up cannot leak above the true value
    let x = rational_to_f64(eps) / (2.0 * ln_n) * (1.0 - 1e-12);
    best_rational_le(x, 1_000_000).expect("eps > 0 and ln n > 0 give a finite positive quotient")
}

pub fn paper_lambda(eps: Rational, n: u64) -> Rational {
    assert!(n >= 2, "needs n >= 2");
    paper_lambda_from_log(eps, (n as f64).ln())
}
