//! Parameter ladder, density-increment descent, and greedy construction of
//! rainbow clique subdivisions.
//!
//! The ladder turns (n, t, eps, c) into the derived quantities the search
//! stages share: lambda, the reach radius ell, the forbidden-set budget L,
//! the shrink factor K, the meta-budget M and the density thresholds. The
//! driver descends to a small dense subgraph while one exists, extracts
//! an expander there, picks branch vertices and connects all pairs.

use crate::expander::{
    bounded_dense_search, extract_expander, paper_lambda_from_log, Certification, ExpanderError,
};
use crate::graph::{SubgraphView, VertexId, ViewError};
use crate::rational::{ratio, rational_to_f64, Rational};
use crate::search::{
    derive_seed, rainbow_connect, AvoidSet, ConnectError, ConnectParams, ConnectTranscript,
    RainbowPath,
};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

#[derive(Debug, PartialEq, thiserror::Error)]
pub enum LadderError {
    #[error("t must be at least 2, got {0}")]
    BadT(u32),
    #[error("eps must lie in (0, 1), got {0}")]
    BadEps(Rational),
    #[error("c must be positive and finite, got {0}")]
    BadC(f64),
    #[error("needs n >= 2, got {0}")]
    BadN(u64),
    #[error("ladder quantities overflow at this scale")]
    Overflow,
}

/// Derived parameters at a given scale. All integer quantities are exact;
/// the density thresholds are f64 because they are astronomically large
/// and only ever reported or compared loosely.
#[derive(Debug, Clone, Serialize)]
pub struct ParamLadder {
    /// Vertex count the ladder was computed at (0 when built from a raw
    /// logarithm for symbolic checks).
    pub n: u64,
    pub ln_n: f64,
    pub t: u32,
    #[serde(with = "crate::rational::serde_rational")]
    pub eps: Rational,
    pub c: f64,
    /// eps / (2 ln n), rounded down (exact when ln n is integral).
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda: Rational,
    /// Reach radius: ceil(4 ln n / lambda).
    pub ell: u64,
    /// Forbidden-set budget: C(t,2) (4 ell + 4) + t.
    pub big_l: u128,
    /// Shrink factor: ceil(exp(sqrt(ln n))).
    pub big_k: u128,
    /// Meta budget: L + ceil(12 K (ell + 2) / eps).
    pub big_m: u128,
    /// Density needed for reach growth: 4 (ell + 2M) / lambda.
    pub d_reach: f64,
    /// Density needed to connect: 24 (ell + 2M) / (eps lambda).
    pub d_connect: f64,
    /// Density needed to build: 48 (ell + 2M) / (eps lambda).
    pub d_build: f64,
    /// The hypothesis density exp(c sqrt(ln n)) at this scale.
    pub d_threshold: f64,
    /// Smallest n' >= 2 with 4 ell(n') + 4 <= 1300 ln^2 n', if any exists
    /// for this eps (scanned up to 10^6).
    pub n0: Option<u64>,
}

fn check_common(t: u32, eps: Rational, c: f64) -> Result<(), LadderError> {
    if t < 2 {
        return Err(LadderError::BadT(t));
    }
    if !eps.is_positive() || eps >= ratio(1, 1) {
        return Err(LadderError::BadEps(eps));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(LadderError::BadC(c));
    }
    Ok(())
}

fn ell_at(eps: Rational, ln_n: f64) -> u64 {
    let lambda = paper_lambda_from_log(eps, ln_n);
    (4.0 * ln_n / rational_to_f64(lambda)).ceil() as u64
}

fn compute_n0(eps: Rational) -> Option<u64> {
    // ell >= 8 ln^2 n / eps since lambda <= eps / (2 ln n), so once
    // 32 / eps >= 1300 the target 4 ell + 4 <= 1300 ln^2 n fails at
    // every n; otherwise the first success comes early
    if ratio(32, 1) >= ratio(1300, 1) * eps {
        return None;
    }
    (2u64..=1_000_000).find(|&n| {
        let ln_n = (n as f64).ln();
        (4 * ell_at(eps, ln_n) + 4) as f64 <= 1300.0 * ln_n * ln_n
    })
}

fn build_ladder(n: u64, ln_n: f64, t: u32, eps: Rational, c: f64) -> Result<ParamLadder, LadderError> {
    check_common(t, eps, c)?;
    if !(ln_n.is_finite() && ln_n > 0.0) {
        return Err(LadderError::BadN(n));
    }
    let lambda = paper_lambda_from_log(eps, ln_n);
    let ell_f = (4.0 * ln_n / rational_to_f64(lambda)).ceil();
    if !(ell_f.is_finite() && ell_f < 2f64.powi(63)) {
        return Err(LadderError::Overflow);
    }
    let ell = ell_f as u64;
    let pairs = (t as u128) * (t as u128 - 1) / 2;
    let big_l = pairs
        .checked_mul(4 * ell as u128 + 4)
        .and_then(|x| x.checked_add(t as u128))
        .ok_or(LadderError::Overflow)?;
    let sqrt_ln = ln_n.sqrt();
    if sqrt_ln > 85.0 {
        return Err(LadderError::Overflow);
    }
    let big_k = sqrt_ln.exp().ceil() as u128;
    // ceil(12 K (ell + 2) / eps) with eps = p/q: ceil(12 K (ell + 2) q / p)
    let (p, q) = (
        eps.numer().to_u128().expect("eps in (0,1)"),
        eps.denom().to_u128().expect("eps in (0,1)"),
    );
    let meta = 12u128
        .checked_mul(big_k)
        .and_then(|x| x.checked_mul(ell as u128 + 2))
        .and_then(|x| x.checked_mul(q))
        .ok_or(LadderError::Overflow)?;
    let big_m = big_l
        .checked_add(meta.div_ceil(p))
        .ok_or(LadderError::Overflow)?;
    let reach_units = ell as f64 + 2.0 * big_m as f64;
    let lambda_f = rational_to_f64(lambda);
    let eps_f = rational_to_f64(eps);
    let d_reach = 4.0 * reach_units / lambda_f;
    let d_connect = 24.0 * reach_units / (eps_f * lambda_f);
    let d_build = 2.0 * d_connect;
    let n0 = compute_n0(eps);
    // past the explicit threshold the path-budget identity must hold
    if let Some(n0) = n0 {
        if n >= n0 {
            assert!(
                (4 * ell + 4) as f64 <= 1300.0 * ln_n * ln_n,
                "4 ell + 4 > 1300 ln^2 n at n = {n} despite n0 = {n0}"
            );
        }
    }
    Ok(ParamLadder {
        n,
        ln_n,
        t,
        eps,
        c,
        lambda,
        ell,
        big_l,
        big_k,
        big_m,
        d_reach,
        d_connect,
        d_build,
        d_threshold: (c * sqrt_ln).exp(),
        n0,
    })
}

pub fn compute_ladder(n: u64, t: u32, eps: Rational, c: f64) -> Result<ParamLadder, LadderError> {
    if n < 2 {
        return Err(LadderError::BadN(n));
    }
    build_ladder(n, (n as f64).ln(), t, eps, c)
}

/// Ladder from a raw ln n, for symbolic scales like ln n = 100 where the
/// lambda arithmetic stays exact. The `n` field is set to 0.
pub fn ladder_from_log(ln_n: f64, t: u32, eps: Rational, c: f64) -> Result<ParamLadder, LadderError> {
    build_ladder(0, ln_n, t, eps, c)
}

/// The default constant: max(sqrt(ln n0), 2 ln(12 / eps)), falling back to
/// n0 = 2 when no n0 exists for this eps.
pub fn default_c(eps: Rational) -> f64 {
    let n0 = compute_n0(eps).unwrap_or(2);
    let a = (n0 as f64).ln().sqrt();
    let b = 2.0 * (12.0 / rational_to_f64(eps)).ln();
    a.max(b)
}

/// Smallest ln n at which the hypothesis density exp(c sqrt(ln n)) reaches
/// the build threshold, found by doubling then bisection in f64. `None`
/// when no crossing shows up before the f64 range runs out.
pub fn hypothesis_ln_n(t: u32, eps: Rational, c: f64) -> Option<f64> {
    check_common(t, eps, c).ok()?;
    let margin = |ln_n: f64| -> f64 {
        // same formulas as the ladder, approximated in f64 throughout
        let lambda = rational_to_f64(eps) / (2.0 * ln_n);
        let ell = (4.0 * ln_n / lambda).ceil();
        let pairs = (t as f64) * (t as f64 - 1.0) / 2.0;
        let big_l = pairs * (4.0 * ell + 4.0) + t as f64;
        let big_k = ln_n.sqrt().exp();
        let big_m = big_l + 12.0 * big_k * (ell + 2.0) / rational_to_f64(eps);
        let d_build = 48.0 * (ell + 2.0 * big_m) / (rational_to_f64(eps) * lambda);
        c * ln_n.sqrt() - d_build.ln()
    };
    let mut hi = 1.0f64;
    while margin(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e5 {
            return None;
        }
    }
    let mut lo = hi / 2.0;
    if hi == 1.0 {
        lo = 0.5;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if margin(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// How far the connection stages may walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Reach radius ell + 1 from the ladder, forbidden-set budgets
    /// enforced.
    Paper,
    /// User-capped radius, no budget enforcement.
    Practical { max_len: usize },
}

impl ParamLadder {
    pub fn connect_params(&self, mode: SearchMode, view_v: usize) -> ConnectParams {
        let cap = view_v.saturating_sub(1);
        let clamp = |x: u128| x.min(usize::MAX as u128) as usize;
        let (reach_len, avoid_budget) = match mode {
            SearchMode::Paper => (
                clamp(self.ell as u128 + 1).min(cap),
                Some((clamp(self.big_l), clamp(self.big_l))),
            ),
            SearchMode::Practical { max_len } => (max_len.min(cap), None),
        };
        let mut p = ConnectParams::new(reach_len, self.lambda, self.eps);
        p.avoid_budget = avoid_budget;
        p
    }

    /// Practical-mode default radius: min(ell + 1, v - 1).
    pub fn default_max_len(&self, view_v: usize) -> usize {
        (self.ell as u128 + 1)
            .min(view_v.saturating_sub(1) as u128)
            .min(usize::MAX as u128) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSpot {
    pub vertices: Vec<VertexId>,
    pub avg_degree: Rational,
}

/// A vertex set with at most `max_vertices` vertices and average degree at
/// least `min_avg` (which must be positive), or `None`. Exhaustive up to
/// 16 vertices, heuristic beyond; preference order is density, then size,
/// then lexicographic vertex list.
pub fn find_small_dense_subgraph(
    view: &SubgraphView<'_>,
    min_avg: Rational,
    max_vertices: usize,
) -> Option<DenseSpot> {
    let (cand, _) = bounded_dense_search(view, min_avg, max_vertices);
    cand.map(|c| DenseSpot {
        vertices: c.vertices,
        avg_degree: c.avg,
    })
}

/// One branch pair and its connecting path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPath {
    pub a: VertexId,
    pub b: VertexId,
    pub path: RainbowPath,
}

/// A rainbow subdivision: `paths[k]` joins the k-th pair of `branch` in
/// lexicographic pair order; interiors are disjoint, avoid the branch set,
/// and all edge colours across all paths are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionCertificate {
    pub schema: String,
    pub t: u32,
    pub branch: Vec<VertexId>,
    pub paths: Vec<PairPath>,
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("need at least two branch vertices, got {0}")]
    TooFewBranch(usize),
    #[error("branch vertex {0} repeated")]
    RepeatedBranch(VertexId),
    #[error("branch vertex {0} not in view")]
    BranchNotInView(VertexId),
    #[error(transparent)]
    Connect(#[from] ConnectError),
}

/// Where the greedy build stopped.
#[derive(Debug, Serialize)]
pub struct BuildFailure {
    pub failed_pair: (VertexId, VertexId),
    pub completed_pairs: usize,
    pub transcript: ConnectTranscript,
}

#[derive(Debug)]
pub enum BuildOutcome {
    Complete(SubdivisionCertificate),
    Failed(Box<BuildFailure>),
}

/// Connects every branch pair in lexicographic order, forbidding all
/// previously used path vertices (except the current endpoints), the
/// other branch vertices, and all previously used colours. Each pair gets
/// an independently derived seed.
pub fn build_subdivision(
    view: &SubgraphView<'_>,
    branch: &[VertexId],
    params: &ConnectParams,
    seed: u64,
) -> Result<BuildOutcome, BuildError> {
    let t = branch.len();
    if t < 2 {
        return Err(BuildError::TooFewBranch(t));
    }
    let graph = view.graph();
    let mut used = AvoidSet::empty(graph);
    for &b in branch {
        if !view.contains_vertex(b) {
            return Err(BuildError::BranchNotInView(b));
        }
        if used.vertex_forbidden(b) {
            return Err(BuildError::RepeatedBranch(b));
        }
        used.forbid_vertex(b);
    }
    let pairs_total = t * (t - 1) / 2;
    let mut paths: Vec<PairPath> = Vec::with_capacity(pairs_total);
    let mut pair_index = 0u64;
    for i in 0..t {
        for j in i + 1..t {
            let (a, b) = (branch[i], branch[j]);
            // budget invariants: so far at most t branch vertices plus
            // 4 reach_len - 1 interiors and 4 reach_len colours per path
            assert!(used.vertex_count() <= t + pairs_total * 4 * params.reach_len);
            assert!(used.colour_count() <= pairs_total * 4 * params.reach_len);
            let mut avoid = used.clone();
            avoid.allow_vertex(a);
            avoid.allow_vertex(b);
            let out = rainbow_connect(view, a, b, &avoid, params, derive_seed(seed, pair_index))?;
            pair_index += 1;
            match out.path {
                Some(p) => {
                    used.forbid_path(&p);
                    paths.push(PairPath { a, b, path: p });
                }
                None => {
                    return Ok(BuildOutcome::Failed(Box::new(BuildFailure {
                        failed_pair: (a, b),
                        completed_pairs: paths.len(),
                        transcript: out.transcript,
                    })))
                }
            }
        }
    }
    Ok(BuildOutcome::Complete(SubdivisionCertificate {
        schema: crate::SCHEMA_VERSION.to_string(),
        t: t as u32,
        branch: branch.to_vec(),
        paths,
    }))
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// No candidate within the cap reached the density threshold.
    NoCandidate,
    /// The best candidate had fewer vertices than branch vertices needed.
    BranchFloor { candidate: usize },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IncrementStep {
    pub v: usize,
    pub e: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub avg: Rational,
}

#[derive(Debug, Serialize)]
pub struct IncrementTrace {
    /// Scales visited, starting with the input view.
    pub steps: Vec<IncrementStep>,
    pub stop: StopReason,
}

#[derive(Debug, Serialize)]
pub struct ExpanderSummary {
    pub v: usize,
    pub e: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub d: Rational,
    pub certification: Certification,
    pub shrink_steps: usize,
}

#[derive(Debug)]
pub enum DriverFailure {
    /// The expander kept fewer vertices than branch vertices needed.
    ExpanderTooSmall { v: usize, t: u32 },
    /// A requested branch vertex fell outside the extracted expander.
    BranchOutsideExpander { missing: Vec<VertexId> },
    Build(Box<BuildFailure>),
}

#[derive(Debug)]
pub struct DriverOutcome {
    pub trace: IncrementTrace,
    /// Ladder recomputed at the landing scale.
    pub ladder: ParamLadder,
    pub expander: ExpanderSummary,
    pub branch: Vec<VertexId>,
    pub result: Result<SubdivisionCertificate, DriverFailure>,
}

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("t must be at least 2, got {0}")]
    BadT(u32),
    #[error("view has no edges")]
    EmptyGraph,
    #[error("t = {t} exceeds the view's {v} vertices")]
    TooManyBranch { t: u32, v: usize },
    #[error("--branch lists {found} vertices, t = {t}")]
    BranchCount { t: u32, found: usize },
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    Expander(#[from] ExpanderError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    View(#[from] ViewError),
}

/// End-to-end search: descend to small dense subgraphs while one at most
/// a K-th of the current size has average degree (eps/12) d (and at least
/// t vertices), recompute the ladder at the landing scale, extract an
/// expander, pick the t highest-degree vertices (or the requested ones)
/// and connect all pairs.
pub fn find_rainbow_subdivision(
    view: &SubgraphView<'_>,
    t: u32,
    eps: Rational,
    c: f64,
    mode: SearchMode,
    seed: u64,
    branch_override: Option<&[VertexId]>,
) -> Result<DriverOutcome, DriverError> {
    if t < 2 {
        return Err(DriverError::BadT(t));
    }
    if view.e() == 0 {
        return Err(DriverError::EmptyGraph);
    }
    if (t as usize) > view.v() {
        return Err(DriverError::TooManyBranch { t, v: view.v() });
    }
    if let Some(req) = branch_override {
        if req.len() != t as usize {
            return Err(DriverError::BranchCount {
                t,
                found: req.len(),
            });
        }
    }
    let ladder0 = compute_ladder(view.v() as u64, t, eps, c)?;
    let step_of = |v: &SubgraphView<'_>| IncrementStep {
        v: v.v(),
        e: v.e(),
        avg: v.avg_degree().expect("nonempty"),
    };
    let mut cur = view.clone();
    let mut steps = vec![step_of(&cur)];
    let stop = loop {
        let cap = (cur.v() as u128 / ladder0.big_k) as usize;
        let min_avg = eps / ratio(12, 1) * cur.avg_degree().expect("nonempty");
        match find_small_dense_subgraph(&cur, min_avg, cap) {
            None => break StopReason::NoCandidate,
            Some(spot) if spot.vertices.len() < t as usize => {
                break StopReason::BranchFloor {
                    candidate: spot.vertices.len(),
                }
            }
            Some(spot) => {
                cur = cur.induced(&spot.vertices)?;
                steps.push(step_of(&cur));
            }
        }
    };
    // density control along the descent: d never drops below (eps/12)^m d_0
    let m = (steps.len() - 1) as i32;
    if m > 0 {
        let floor = (eps / ratio(12, 1)).pow(m) * steps[0].avg;
        assert!(steps[m as usize].avg >= floor, "descent lost density");
    }
    let ladder = compute_ladder(cur.v().max(2) as u64, t, eps, c)?;
    let piece = extract_expander(
        &cur,
        cur.avg_degree().expect("nonempty"),
        ladder.lambda,
        eps,
    )?;
    let expander = ExpanderSummary {
        v: piece.subgraph.v(),
        e: piece.subgraph.e(),
        d: piece.params.d,
        certification: piece.certification,
        shrink_steps: piece.shrink_steps,
    };
    let trace = IncrementTrace { steps, stop };

    let branch: Vec<VertexId> = match branch_override {
        Some(req) => {
            let missing: Vec<VertexId> = req
                .iter()
                .copied()
                .filter(|&v| !piece.subgraph.contains_vertex(v))
                .collect();
            if !missing.is_empty() {
                return Ok(DriverOutcome {
                    trace,
                    ladder,
                    expander,
                    branch: Vec::new(),
                    result: Err(DriverFailure::BranchOutsideExpander { missing }),
                });
            }
            let mut b = req.to_vec();
            b.sort_unstable();
            b
        }
        None => {
            if piece.subgraph.v() < t as usize {
                return Ok(DriverOutcome {
                    trace,
                    ladder,
                    expander,
                    branch: Vec::new(),
                    result: Err(DriverFailure::ExpanderTooSmall {
                        v: piece.subgraph.v(),
                        t,
                    }),
                });
            }
            let mut by_degree: Vec<VertexId> = piece.subgraph.vertex_vec();
            by_degree.sort_by_key(|&v| (std::cmp::Reverse(piece.subgraph.degree(v)), v));
            let mut b: Vec<VertexId> = by_degree.into_iter().take(t as usize).collect();
            b.sort_unstable();
            b
        }
    };
    let params = ladder.connect_params(mode, piece.subgraph.v());
    let result = match build_subdivision(&piece.subgraph, &branch, &params, seed)? {
        BuildOutcome::Complete(cert) => Ok(cert),
        BuildOutcome::Failed(report) => Err(DriverFailure::Build(report)),
    };
    Ok(DriverOutcome {
        trace,
        ladder,
        expander,
        branch,
        result,
    })
}
