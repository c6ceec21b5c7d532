//! Rainbow reachability and rainbow connection.
//!
//! A rainbow path uses pairwise distinct edge colours. `rainbow_reach`
//! grows a ball of vertices reachable by rainbow paths that dodge a
//! forbidden vertex/colour set, keeping one fixed witness path per vertex.
//! `rainbow_connect` joins two vertices by splitting colours in half,
//! covering each half by expanders, walking into the pieces from both
//! sides, exploring inside them, and splicing the meeting point into one
//! simple rainbow path.

use crate::expander::{cover_by_expanders, ExpanderError, ExpanderPiece};
use crate::graph::{ColourId, ColouredGraph, SubgraphView, VertexId};
use crate::rational::{ratio, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Splitmix64 finalizer, used to derive independent sub-seeds.
pub(crate) fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A walk with its edge colours; `colours[i]` belongs to the edge from
/// `vertices[i]` to `vertices[i + 1]`. Valid instances are simple and use
/// each colour at most once; `validate` replays that from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowPath {
    pub vertices: Vec<VertexId>,
    pub colours: Vec<ColourId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathViolation {
    #[error("path has no vertices")]
    NoVertices,
    #[error("{vertices} vertices cannot carry {colours} colours")]
    LengthMismatch { vertices: usize, colours: usize },
    #[error("vertex {0} is outside the view")]
    OutsideView(VertexId),
    #[error("no view edge between {u} and {v}")]
    MissingEdge { u: VertexId, v: VertexId },
    #[error("edge {u}-{v} has colour {actual}, path says {stated}")]
    WrongColour {
        u: VertexId,
        v: VertexId,
        stated: ColourId,
        actual: ColourId,
    },
    #[error("vertex {0} repeats")]
    RepeatedVertex(VertexId),
    #[error("colour {0} repeats")]
    RepeatedColour(ColourId),
    #[error("vertex {0} is forbidden")]
    ForbiddenVertex(VertexId),
    #[error("colour {0} is forbidden")]
    ForbiddenColour(ColourId),
}

impl RainbowPath {
    pub fn singleton(v: VertexId) -> Self {
        RainbowPath {
            vertices: vec![v],
            colours: Vec::new(),
        }
    }

    /// Length in edges.
    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn source(&self) -> VertexId {
        *self.vertices.first().expect("paths are nonempty")
    }

    pub fn target(&self) -> VertexId {
        *self.vertices.last().expect("paths are nonempty")
    }

    pub fn reversed(&self) -> Self {
        RainbowPath {
            vertices: self.vertices.iter().rev().copied().collect(),
            colours: self.colours.iter().rev().copied().collect(),
        }
    }

    /// Full replay: containment in the view, edge existence, stated
    /// colours, simplicity, colour distinctness, and (optionally) that no
    /// vertex or colour is forbidden. Endpoints are checked like interior
    /// vertices, so strip intended endpoints from `avoid` first.
    pub fn validate(
        &self,
        view: &SubgraphView<'_>,
        avoid: Option<&AvoidSet>,
    ) -> Result<(), PathViolation> {
        if self.vertices.is_empty() {
            return Err(PathViolation::NoVertices);
        }
        if self.colours.len() + 1 != self.vertices.len() {
            return Err(PathViolation::LengthMismatch {
                vertices: self.vertices.len(),
                colours: self.colours.len(),
            });
        }
        let g = view.graph();
        let mut seen_v = vec![false; g.n()];
        for &v in &self.vertices {
            if v.idx() >= g.n() || !view.contains_vertex(v) {
                return Err(PathViolation::OutsideView(v));
            }
            if seen_v[v.idx()] {
                return Err(PathViolation::RepeatedVertex(v));
            }
            seen_v[v.idx()] = true;
            if avoid.is_some_and(|a| a.vertex_forbidden(v)) {
                return Err(PathViolation::ForbiddenVertex(v));
            }
        }
        let mut seen_c = vec![false; g.k()];
        for (i, win) in self.vertices.windows(2).enumerate() {
            let (u, v) = (win[0], win[1]);
            let id = g
                .edge_between(u, v)
                .filter(|&id| view.contains_edge(id))
                .ok_or(PathViolation::MissingEdge { u, v })?;
            let actual = g.edge(id).colour;
            let stated = self.colours[i];
            if actual != stated {
                return Err(PathViolation::WrongColour {
                    u,
                    v,
                    stated,
                    actual,
                });
            }
            if seen_c[actual.idx()] {
                return Err(PathViolation::RepeatedColour(actual));
            }
            seen_c[actual.idx()] = true;
            if avoid.is_some_and(|a| a.colour_forbidden(actual)) {
                return Err(PathViolation::ForbiddenColour(actual));
            }
        }
        Ok(())
    }
}

/// Forbidden vertices and colours, with O(1) membership and exact counts.
#[derive(Debug, Clone)]
pub struct AvoidSet {
    vertex: Vec<bool>,
    colour: Vec<bool>,
    nv: usize,
    nc: usize,
}

impl AvoidSet {
    pub fn empty(graph: &ColouredGraph) -> Self {
        AvoidSet {
            vertex: vec![false; graph.n()],
            colour: vec![false; graph.k()],
            nv: 0,
            nc: 0,
        }
    }

    pub fn from_sets(graph: &ColouredGraph, vs: &[VertexId], cs: &[ColourId]) -> Self {
        let mut a = AvoidSet::empty(graph);
        for &v in vs {
            a.forbid_vertex(v);
        }
        for &c in cs {
            a.forbid_colour(c);
        }
        a
    }

    pub fn forbid_vertex(&mut self, v: VertexId) {
        if !self.vertex[v.idx()] {
            self.vertex[v.idx()] = true;
            self.nv += 1;
        }
    }

    pub fn allow_vertex(&mut self, v: VertexId) {
        if self.vertex[v.idx()] {
            self.vertex[v.idx()] = false;
            self.nv -= 1;
        }
    }

    pub fn forbid_colour(&mut self, c: ColourId) {
        if !self.colour[c.idx()] {
            self.colour[c.idx()] = true;
            self.nc += 1;
        }
    }

    pub fn forbid_path(&mut self, p: &RainbowPath) {
        for &v in &p.vertices {
            self.forbid_vertex(v);
        }
        for &c in &p.colours {
            self.forbid_colour(c);
        }
    }

    pub fn vertex_forbidden(&self, v: VertexId) -> bool {
        self.vertex[v.idx()]
    }

    pub fn colour_forbidden(&self, c: ColourId) -> bool {
        self.colour[c.idx()]
    }

    pub fn vertex_count(&self) -> usize {
        self.nv
    }

    pub fn colour_count(&self) -> usize {
        self.nc
    }

    pub fn forbidden_vertices(&self) -> Vec<VertexId> {
        self.vertex
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| VertexId(i as u32))
            .collect()
    }

    pub fn forbidden_colours(&self) -> Vec<ColourId> {
        self.colour
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| ColourId(i as u32))
            .collect()
    }
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReachError {
    #[error("source {0} not in view")]
    SourceNotInView(VertexId),
    #[error("source {0} is forbidden")]
    SourceForbidden(VertexId),
}

/// Rainbow reachability ball with one fixed witness path per vertex.
#[derive(Debug)]
pub struct ReachResult<'g> {
    graph: &'g ColouredGraph,
    pub source: VertexId,
    parent: Vec<Option<(u32, u32)>>,
    reached: Vec<bool>,
    /// Cumulative ball sizes |U_0|, |U_1|, ...; non-decreasing by
    /// construction, one entry per explored radius.
    pub layer_sizes: Vec<usize>,
}

impl ReachResult<'_> {
    pub fn is_reached(&self, v: VertexId) -> bool {
        self.reached[v.idx()]
    }

    pub fn count(&self) -> usize {
        *self.layer_sizes.last().expect("at least the source layer")
    }

    pub fn reached_vertices(&self) -> Vec<VertexId> {
        self.reached
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| VertexId(i as u32))
            .collect()
    }

    /// The witness path source -> v recorded during the search.
    pub fn path_to(&self, v: VertexId) -> Option<RainbowPath> {
        if !self.reached[v.idx()] {
            return None;
        }
        let mut vertices = vec![v];
        let mut colours = Vec::new();
        let mut cur = v;
        while let Some((pv, pe)) = self.parent[cur.idx()] {
            colours.push(self.graph.edge(pe as usize).colour);
            cur = VertexId(pv);
            vertices.push(cur);
        }
        vertices.reverse();
        colours.reverse();
        Some(RainbowPath { vertices, colours })
    }
}

/// Grows the rainbow ball around `source`: a vertex joins layer i + 1 when
/// some layer-i vertex u has an edge uw whose colour is unforbidden and
/// absent from u's witness path, and w is unreached and unforbidden. Each
/// vertex keeps the witness path that first reached it, so membership is
/// monotone and `max_len` bounds every witness length.
pub fn rainbow_reach<'g>(
    view: &SubgraphView<'g>,
    source: VertexId,
    avoid: &AvoidSet,
    max_len: usize,
) -> Result<ReachResult<'g>, ReachError> {
    if !view.contains_vertex(source) {
        return Err(ReachError::SourceNotInView(source));
    }
    if avoid.vertex_forbidden(source) {
        return Err(ReachError::SourceForbidden(source));
    }
    let graph = view.graph();
    let mut result = ReachResult {
        graph,
        source,
        parent: vec![None; graph.n()],
        reached: vec![false; graph.n()],
        layer_sizes: vec![1],
    };
    result.reached[source.idx()] = true;
    let mut frontier = vec![source];
    let mut count = 1usize;
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &u in &frontier {
            for (w, c, id) in view.neighbours(u) {
                if result.reached[w.idx()]
                    || avoid.vertex_forbidden(w)
                    || avoid.colour_forbidden(c)
                    || colour_on_witness(&result, u, c)
                {
                    continue;
                }
                result.reached[w.idx()] = true;
                result.parent[w.idx()] = Some((u.0, id as u32));
                next.push(w);
            }
        }
        if next.is_empty() {
            break;
        }
        count += next.len();
        result.layer_sizes.push(count);
        frontier = next;
    }
    Ok(result)
}

fn colour_on_witness(r: &ReachResult<'_>, u: VertexId, c: ColourId) -> bool {
    let mut cur = u;
    while let Some((pv, pe)) = r.parent[cur.idx()] {
        if r.graph.edge(pe as usize).colour == c {
            return true;
        }
        cur = VertexId(pv);
    }
    false
}

/// A random two-colouring of the view's colours, with the exact quantities
/// the admissibility test uses: per-group edge counts and minimum degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColourSplit {
    /// Indexed by colour id: 0 = absent from the view, else group 1 or 2.
    pub group_of: Vec<u8>,
    pub seed: u64,
    /// Attempts consumed, counting the accepted one.
    pub attempts: u32,
    /// Both groups kept a third of the edges and a third of their own
    /// average degree as minimum degree.
    pub satisfied: bool,
    pub edges: [usize; 2],
    pub min_degrees: [usize; 2],
}

#[derive(Debug, thiserror::Error)]
pub enum SplitError {
    #[error("no admissible colour split in {budget} attempts")]
    Exhausted {
        budget: u32,
        /// Best attempt by max-min group edge count, for relaxed retries.
        best: Box<ColourSplit>,
    },
}

/// Tries seeded random splits until one satisfies, on both groups i:
/// d(G_i) >= d(G)/3 and min degree of G_i >= d(G_i)/3, where G_i spans the
/// view's vertices with the group's colour classes. Checks are exact
/// integer comparisons. Deterministic given (view, seed, budget).
pub fn split_colours(
    view: &SubgraphView<'_>,
    seed: u64,
    budget: u32,
) -> Result<ColourSplit, SplitError> {
    let graph = view.graph();
    let colours = view.colours();
    let e_total = view.e();
    let verts = view.vertex_vec();
    let mut best: Option<ColourSplit> = None;
    for attempt in 0..budget.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        let mut group_of = vec![0u8; graph.k()];
        for &c in &colours {
            group_of[c.idx()] = if rng.gen_bool(0.5) { 1 } else { 2 };
        }
        let mut edges = [0usize; 2];
        let mut deg = vec![[0usize; 2]; graph.n()];
        for id in view.edge_ids() {
            let e = graph.edge(id);
            let gi = (group_of[e.colour.idx()] - 1) as usize;
            edges[gi] += 1;
            deg[e.u.idx()][gi] += 1;
            deg[e.v.idx()][gi] += 1;
        }
        let mut min_degrees = [usize::MAX; 2];
        for &v in &verts {
            for gi in 0..2 {
                min_degrees[gi] = min_degrees[gi].min(deg[v.idx()][gi]);
            }
        }
        // d(G_i) >= d(G)/3 is 3 e_i >= e; min-degree >= d(G_i)/3 is
        // 3 delta_i v >= 2 e_i
        let satisfied = (0..2).all(|gi| {
            3 * edges[gi] >= e_total && 3 * min_degrees[gi] * verts.len() >= 2 * edges[gi]
        });
        let split = ColourSplit {
            group_of,
            seed,
            attempts: attempt + 1,
            satisfied,
            edges,
            min_degrees,
        };
        if satisfied {
            return Ok(split);
        }
        if best
            .as_ref()
            .is_none_or(|b| split.edges.iter().min() > b.edges.iter().min())
        {
            best = Some(split);
        }
    }
    Err(SplitError::Exhausted {
        budget,
        best: Box::new(best.expect("at least one attempt")),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeVertexCheck {
    /// e(part) >= (1 - gamma) e(whole).
    pub premise: bool,
    /// v(part) >= (1 - 3 gamma) v(whole).
    pub conclusion: bool,
    /// Premise implies conclusion on this instance.
    pub held: bool,
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum EdgeVertexError {
    #[error("view has no vertices")]
    Empty,
    #[error("minimum degree {min} is below a third of the average {avg}")]
    MinDegreeTooSmall { min: usize, avg: Rational },
}

fn edge_vertex_core(
    e_whole: usize,
    v_whole: usize,
    e_part: usize,
    v_part: usize,
    gamma: Rational,
) -> EdgeVertexCheck {
    let one = ratio(1, 1);
    let premise = ratio(e_part as i128, 1) >= (one - gamma) * ratio(e_whole as i128, 1);
    let conclusion =
        ratio(v_part as i128, 1) >= (one - ratio(3, 1) * gamma) * ratio(v_whole as i128, 1);
    EdgeVertexCheck {
        premise,
        conclusion,
        held: !premise || conclusion,
    }
}

/// Checks the edge-to-vertex transfer on one instance: in a graph whose
/// minimum degree is at least a third of its average degree, a subgraph
/// keeping a (1 - gamma) fraction of the edges must keep a (1 - 3 gamma)
/// fraction of the vertices.
pub fn check_edge_to_vertex(
    whole: &SubgraphView<'_>,
    part: &SubgraphView<'_>,
    gamma: Rational,
) -> Result<EdgeVertexCheck, EdgeVertexError> {
    let stats = whole.degree_stats().map_err(|_| EdgeVertexError::Empty)?;
    // min >= avg/3 is 3 min v >= 2 e
    if 3 * stats.min * whole.v() < 2 * whole.e() {
        return Err(EdgeVertexError::MinDegreeTooSmall {
            min: stats.min,
            avg: stats.average,
        });
    }
    Ok(edge_vertex_core(
        whole.e(),
        whole.v(),
        part.e(),
        part.v(),
        gamma,
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct ConnectParams {
    /// Maximum path length (edges) for each reachability stage.
    pub reach_len: usize,
    pub lambda: Rational,
    pub eps: Rational,
    /// Attempt budget for the colour split.
    pub split_attempts: u32,
    /// Return immediately when the target is already in the source ball.
    pub direct_shortcut: bool,
    /// Optional (vertices, colours) cap on the input avoid set.
    pub avoid_budget: Option<(usize, usize)>,
}

impl ConnectParams {
    pub fn new(reach_len: usize, lambda: Rational, eps: Rational) -> Self {
        ConnectParams {
            reach_len,
            lambda,
            eps,
            split_attempts: 64,
            direct_shortcut: true,
            avoid_budget: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConnectError {
    #[error("endpoints coincide at {0}")]
    SameEndpoints(VertexId),
    #[error("endpoint {0} not in view")]
    EndpointNotInView(VertexId),
    #[error("endpoint {0} is forbidden")]
    EndpointForbidden(VertexId),
    #[error("avoid set has {found} vertices, budget {budget}")]
    VertexBudget { found: usize, budget: usize },
    #[error("avoid set has {found} colours, budget {budget}")]
    ColourBudget { found: usize, budget: usize },
    #[error(transparent)]
    Expander(#[from] ExpanderError),
    #[error(transparent)]
    Reach(#[from] ReachError),
}

/// Stage at which the pipeline gave up (an honest failure, not an error).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailStage {
    /// The ball around the source contains nothing but the source.
    Reach,
    /// No colour split left both groups nonempty.
    Split,
    /// No expander piece of the group touches the relevant ball.
    Entry { group: u8 },
    /// The inner balls from both sides share no vertex.
    Meet,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EdgeVertexDiag {
    pub group: u8,
    /// Precondition (min degree a third of average) failed, check skipped.
    pub skipped: bool,
    pub premise: bool,
    pub conclusion: bool,
    pub held: bool,
}

#[derive(Debug, Serialize)]
pub struct Bookkeeping {
    pub input_vertices: usize,
    pub input_colours: usize,
    pub side_one_vertices: usize,
    pub side_two_vertices: usize,
    pub inner_forbidden_vertices: usize,
    pub inner_forbidden_colours: usize,
}

#[derive(Debug, Serialize)]
pub struct ConnectTranscript {
    pub x: VertexId,
    pub y: VertexId,
    pub seed: u64,
    pub reach_len: usize,
    /// |ball around x|.
    pub source_reach: usize,
    /// Success came straight out of the source ball.
    pub direct: bool,
    pub split: Option<ColourSplit>,
    /// No attempt met the split admissibility test; best split was used.
    pub split_relaxed: bool,
    pub pieces: [usize; 2],
    pub entries: [Vec<VertexId>; 2],
    pub entry_paths: [Vec<RainbowPath>; 2],
    /// |ball around y| (0 until that stage runs).
    pub target_reach: usize,
    pub inner_reach: [Vec<usize>; 2],
    pub meeting: Option<VertexId>,
    /// Spliced walk length before shortcutting.
    pub walk_len: Option<usize>,
    pub bookkeeping: Option<Bookkeeping>,
    pub diagnostics: Vec<EdgeVertexDiag>,
    pub failure: Option<FailStage>,
}

#[derive(Debug)]
pub struct ConnectOutcome {
    /// A simple rainbow path from x to y avoiding the input sets, length
    /// at most 4 * reach_len; `None` on honest failure (see transcript).
    pub path: Option<RainbowPath>,
    pub transcript: ConnectTranscript,
}

/// Connects x to y by a rainbow path avoiding `avoid`, in stages: (1) grow
/// the ball around x (returning straight away if y is inside), (2) split
/// the colours in two, (3) cover each half by expander pieces, (4) fix
/// entry paths from the x-ball into group-1 pieces, (5) grow the ball
/// around y dodging those paths, (6) fix entry paths into group-2 pieces
/// and explore inside all chosen pieces, (7) splice at the lowest common
/// inner vertex and shortcut the walk to a simple path.
pub fn rainbow_connect<'g>(
    view: &SubgraphView<'g>,
    x: VertexId,
    y: VertexId,
    avoid: &AvoidSet,
    params: &ConnectParams,
    seed: u64,
) -> Result<ConnectOutcome, ConnectError> {
    if x == y {
        return Err(ConnectError::SameEndpoints(x));
    }
    for v in [x, y] {
        if !view.contains_vertex(v) {
            return Err(ConnectError::EndpointNotInView(v));
        }
        if avoid.vertex_forbidden(v) {
            return Err(ConnectError::EndpointForbidden(v));
        }
    }
    if let Some((vb, cb)) = params.avoid_budget {
        if avoid.vertex_count() > vb {
            return Err(ConnectError::VertexBudget {
                found: avoid.vertex_count(),
                budget: vb,
            });
        }
        if avoid.colour_count() > cb {
            return Err(ConnectError::ColourBudget {
                found: avoid.colour_count(),
                budget: cb,
            });
        }
    }
    let mut tr = ConnectTranscript {
        x,
        y,
        seed,
        reach_len: params.reach_len,
        source_reach: 0,
        direct: false,
        split: None,
        split_relaxed: false,
        pieces: [0, 0],
        entries: [Vec::new(), Vec::new()],
        entry_paths: [Vec::new(), Vec::new()],
        target_reach: 0,
        inner_reach: [Vec::new(), Vec::new()],
        meeting: None,
        walk_len: None,
        bookkeeping: None,
        diagnostics: Vec::new(),
        failure: None,
    };
    let fail = |mut tr: ConnectTranscript, stage: FailStage| {
        tr.failure = Some(stage);
        Ok(ConnectOutcome {
            path: None,
            transcript: tr,
        })
    };

    // (1) ball around x
    let sx = rainbow_reach(view, x, avoid, params.reach_len)?;
    tr.source_reach = sx.count();
    if params.direct_shortcut && sx.is_reached(y) {
        let path = sx.path_to(y).expect("reached");
        finish_path(view, avoid, params, &path);
        tr.direct = true;
        return Ok(ConnectOutcome {
            path: Some(path),
            transcript: tr,
        });
    }
    if sx.count() == 1 {
        // any x-y path would leave through this ball's first layer
        return fail(tr, FailStage::Reach);
    }

    // (2) colour split
    let split = match split_colours(view, derive_seed(seed, 0x51), params.split_attempts) {
        Ok(s) => s,
        Err(SplitError::Exhausted { best, .. }) => {
            if best.edges[0] == 0 || best.edges[1] == 0 {
                tr.split = Some(*best);
                return fail(tr, FailStage::Split);
            }
            tr.split_relaxed = true;
            *best
        }
    };
    tr.split = Some(split.clone());

    // (3) expander coverings of the two colour groups
    let graph = view.graph();
    let mut coverings: Vec<Vec<ExpanderPiece<'g>>> = Vec::new();
    for gi in 1..=2u8 {
        let sub = view.retain_edges(|id| split.group_of[graph.edge(id).colour.idx()] == gi);
        let cover = cover_by_expanders(&sub, params.eps, params.lambda)?;
        coverings.push(cover.pieces);
    }
    tr.pieces = [coverings[0].len(), coverings[1].len()];

    // (4) entry paths from the x-ball into group-1 pieces
    let entries1 = piece_entries(&coverings[0], &sx);
    if entries1.is_empty() {
        return fail(tr, FailStage::Entry { group: 1 });
    }
    let mut avoid_y = avoid.clone();
    for (_, xj, pj) in &entries1 {
        tr.entries[0].push(*xj);
        tr.entry_paths[0].push(pj.clone());
        avoid_y.forbid_path(pj);
    }
    let side1_vertices = tr.entry_paths[0]
        .iter()
        .map(|p| p.vertices.len())
        .sum::<usize>();
    avoid_y.allow_vertex(y);

    // (5) ball around y, dodging the fixed group-1 paths
    let sy = rainbow_reach(view, y, &avoid_y, params.reach_len)?;
    tr.target_reach = sy.count();

    // (6) entry paths into group-2 pieces, then inner exploration
    let entries2 = piece_entries(&coverings[1], &sy);
    if entries2.is_empty() {
        return fail(tr, FailStage::Entry { group: 2 });
    }
    let mut inner_avoid = avoid_y.clone();
    inner_avoid.forbid_vertex(y);
    for (_, yj, qj) in &entries2 {
        tr.entries[1].push(*yj);
        tr.entry_paths[1].push(qj.clone());
        inner_avoid.forbid_path(qj);
    }
    let side2_vertices = tr.entry_paths[1]
        .iter()
        .map(|p| p.vertices.len())
        .sum::<usize>();
    // the balls that feed the splice stay within their budget
    assert!(
        inner_avoid.vertex_count()
            <= avoid.vertex_count() + side1_vertices + side2_vertices,
        "forbidden-set bookkeeping drifted"
    );
    assert!(
        inner_avoid.colour_count()
            <= avoid.colour_count()
                + (entries1.len() + entries2.len()) * params.reach_len,
        "forbidden-colour bookkeeping drifted"
    );
    tr.bookkeeping = Some(Bookkeeping {
        input_vertices: avoid.vertex_count(),
        input_colours: avoid.colour_count(),
        side_one_vertices: side1_vertices,
        side_two_vertices: side2_vertices,
        inner_forbidden_vertices: inner_avoid.vertex_count(),
        inner_forbidden_colours: inner_avoid.colour_count(),
    });

    let mut inner1 = Vec::new();
    for (j, xj, _) in &entries1 {
        let mut a = inner_avoid.clone();
        a.allow_vertex(*xj);
        let r = rainbow_reach(&coverings[0][*j].subgraph, *xj, &a, params.reach_len)?;
        tr.inner_reach[0].push(r.count());
        inner1.push(r);
    }
    let mut inner2 = Vec::new();
    for (j, yj, _) in &entries2 {
        let mut a = inner_avoid.clone();
        a.allow_vertex(*yj);
        let r = rainbow_reach(&coverings[1][*j].subgraph, *yj, &a, params.reach_len)?;
        tr.inner_reach[1].push(r.count());
        inner2.push(r);
    }
    for (group, (cov, inner, entries)) in [
        (&coverings[0], &inner1, &entries1),
        (&coverings[1], &inner2, &entries2),
    ]
    .into_iter()
    .enumerate()
    {
        tr.diagnostics
            .push(group_diagnostic(group as u8 + 1, view, &split, cov, inner, entries, params.eps));
    }

    // (7) lowest common inner vertex, then splice
    let meeting = (0..graph.n() as u32).map(VertexId).find(|&v| {
        inner1.iter().any(|r| r.is_reached(v)) && inner2.iter().any(|r| r.is_reached(v))
    });
    let z = match meeting {
        Some(z) => z,
        None => return fail(tr, FailStage::Meet),
    };
    tr.meeting = Some(z);
    let i = inner1.iter().position(|r| r.is_reached(z)).expect("found");
    let j = inner2.iter().position(|r| r.is_reached(z)).expect("found");
    let p_entry = &entries1[i].2;
    let p_inner = inner1[i].path_to(z).expect("reached");
    let q_inner = inner2[j].path_to(z).expect("reached").reversed();
    let q_entry = entries2[j].2.reversed();
    let mut walk_v = p_entry.vertices.clone();
    let mut walk_c = p_entry.colours.clone();
    for seg in [&p_inner, &q_inner, &q_entry] {
        debug_assert_eq!(walk_v.last(), seg.vertices.first());
        walk_v.extend_from_slice(&seg.vertices[1..]);
        walk_c.extend_from_slice(&seg.colours);
    }
    tr.walk_len = Some(walk_c.len());
    assert!(walk_c.len() <= 4 * params.reach_len);
    let path = shortcut_walk(walk_v, walk_c);
    finish_path(view, avoid, params, &path);
    debug_assert_eq!(path.source(), x);
    debug_assert_eq!(path.target(), y);
    Ok(ConnectOutcome {
        path: Some(path),
        transcript: tr,
    })
}

/// For each piece that meets the ball, the lowest-index contained vertex
/// and its witness path. Returned in ascending piece order.
fn piece_entries<'g>(
    pieces: &[ExpanderPiece<'g>],
    ball: &ReachResult<'_>,
) -> Vec<(usize, VertexId, RainbowPath)> {
    let mut out = Vec::new();
    for (j, piece) in pieces.iter().enumerate() {
        if let Some(v) = piece.subgraph.vertices().find(|&v| ball.is_reached(v)) {
            let path = ball.path_to(v).expect("reached");
            out.push((j, v, path));
        }
    }
    out
}

/// Records the edge-to-vertex transfer for one colour group: the union of
/// explored piece regions against the group's spanning subgraph, at
/// gamma = 6 eps.
fn group_diagnostic(
    group: u8,
    view: &SubgraphView<'_>,
    split: &ColourSplit,
    pieces: &[ExpanderPiece<'_>],
    inner: &[ReachResult<'_>],
    entries: &[(usize, VertexId, RainbowPath)],
    eps: Rational,
) -> EdgeVertexDiag {
    let graph = view.graph();
    let whole = view.retain_edges(|id| split.group_of[graph.edge(id).colour.idx()] == group);
    let stats = whole.degree_stats();
    let skipped = match &stats {
        Ok(s) => 3 * s.min * whole.v() < 2 * whole.e(),
        Err(_) => true,
    };
    if skipped {
        return EdgeVertexDiag {
            group,
            skipped: true,
            premise: false,
            conclusion: false,
            held: false,
        };
    }
    let mut in_union = vec![false; graph.n()];
    let mut e_part = 0usize;
    for (r, (j, _, _)) in inner.iter().zip(entries) {
        let piece = &pieces[*j].subgraph;
        for v in piece.vertices() {
            if r.is_reached(v) {
                in_union[v.idx()] = true;
            }
        }
        for id in piece.edge_ids() {
            let e = graph.edge(id);
            if r.is_reached(e.u) && r.is_reached(e.v) {
                e_part += 1;
            }
        }
    }
    let v_part = in_union.iter().filter(|&&b| b).count();
    let check = edge_vertex_core(whole.e(), whole.v(), e_part, v_part, ratio(6, 1) * eps);
    EdgeVertexDiag {
        group,
        skipped: false,
        premise: check.premise,
        conclusion: check.conclusion,
        held: check.held,
    }
}

/// Replays a finished path against the view and the caller's avoid set
/// (endpoints were checked unforbidden on entry). A failure here is a bug
/// in the construction, not an honest miss, hence the hard assert.
fn finish_path(
    view: &SubgraphView<'_>,
    avoid: &AvoidSet,
    params: &ConnectParams,
    path: &RainbowPath,
) {
    if let Err(v) = path.validate(view, Some(avoid)) {
        panic!("constructed path failed replay: {v}");
    }
    assert!(path.len() <= 4 * params.reach_len);
}

/// Collapses a rainbow walk into a simple path on a subset of its edges:
/// revisiting a vertex truncates back to its first occurrence. Colour
/// distinctness is inherited from the walk.
fn shortcut_walk(vertices: Vec<VertexId>, colours: Vec<ColourId>) -> RainbowPath {
    debug_assert_eq!(vertices.len(), colours.len() + 1);
    let mut out_v: Vec<VertexId> = Vec::with_capacity(vertices.len());
    let mut out_c: Vec<ColourId> = Vec::with_capacity(colours.len());
    let mut pos: HashMap<VertexId, usize> = HashMap::new();
    for (i, &v) in vertices.iter().enumerate() {
        match pos.get(&v) {
            Some(&p) => {
                for dropped in &out_v[p + 1..] {
                    pos.remove(dropped);
                }
                out_v.truncate(p + 1);
                out_c.truncate(p);
            }
            None => {
                if i > 0 {
                    out_c.push(colours[i - 1]);
                }
                pos.insert(v, out_v.len());
                out_v.push(v);
            }
        }
    }
    RainbowPath {
        vertices: out_v,
        colours: out_c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ColouredGraph;
    use crate::instances::{gen_one_factorized_complete, gen_rainbow_complete};

    fn path_graph() -> ColouredGraph {
        // 0-1-2-3 with colours 0, 1, 0: the last edge repeats colour 0
        ColouredGraph::from_edges(4, 2, [(0, 1, 0), (1, 2, 1), (2, 3, 0)]).unwrap()
    }

    #[test]
    fn validate_accepts_and_rejects() {
        let g = path_graph();
        let view = g.full_view();
        let ok = RainbowPath {
            vertices: vec![VertexId(0), VertexId(1), VertexId(2)],
            colours: vec![ColourId(0), ColourId(1)],
        };
        assert_eq!(ok.validate(&view, None), Ok(()));

        let wrong_colour = RainbowPath {
            vertices: vec![VertexId(0), VertexId(1)],
            colours: vec![ColourId(1)],
        };
        assert!(matches!(
            wrong_colour.validate(&view, None),
            Err(PathViolation::WrongColour { .. })
        ));

        let repeated_colour = RainbowPath {
            vertices: vec![VertexId(0), VertexId(1), VertexId(2), VertexId(3)],
            colours: vec![ColourId(0), ColourId(1), ColourId(0)],
        };
        assert_eq!(
            repeated_colour.validate(&view, None),
            Err(PathViolation::RepeatedColour(ColourId(0)))
        );

        let avoid = AvoidSet::from_sets(&g, &[VertexId(2)], &[]);
        assert_eq!(
            ok.validate(&view, Some(&avoid)),
            Err(PathViolation::ForbiddenVertex(VertexId(2)))
        );
        let avoid = AvoidSet::from_sets(&g, &[], &[ColourId(1)]);
        assert_eq!(
            ok.validate(&view, Some(&avoid)),
            Err(PathViolation::ForbiddenColour(ColourId(1)))
        );
    }

    #[test]
    fn avoid_set_counts_are_idempotent() {
        let g = path_graph();
        let mut a = AvoidSet::empty(&g);
        a.forbid_vertex(VertexId(1));
        a.forbid_vertex(VertexId(1));
        a.forbid_colour(ColourId(0));
        assert_eq!((a.vertex_count(), a.colour_count()), (1, 1));
        a.allow_vertex(VertexId(1));
        a.allow_vertex(VertexId(1));
        assert_eq!(a.vertex_count(), 0);
        assert_eq!(a.forbidden_colours(), vec![ColourId(0)]);
    }

    #[test]
    fn reach_blocks_repeated_colours() {
        // along 0-1-2-3 the third edge repeats colour 0, so 3 is out of
        // rainbow range of 0 even with length to spare
        let g = path_graph();
        let view = g.full_view();
        let avoid = AvoidSet::empty(&g);
        let r = rainbow_reach(&view, VertexId(0), &avoid, 5).unwrap();
        assert!(r.is_reached(VertexId(2)));
        assert!(!r.is_reached(VertexId(3)));
        assert_eq!(r.layer_sizes, vec![1, 2, 3]);
        let p = r.path_to(VertexId(2)).unwrap();
        assert_eq!(p.validate(&view, Some(&avoid)), Ok(()));
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn reach_respects_limits_and_avoid_sets() {
        let g = gen_one_factorized_complete(6).unwrap();
        let view = g.full_view();
        let r = rainbow_reach(&view, VertexId(0), &AvoidSet::empty(&g), 1).unwrap();
        assert_eq!(r.count(), 6); // one hop reaches everyone in K6
        assert_eq!(r.layer_sizes, vec![1, 6]);

        let avoid = AvoidSet::from_sets(&g, &[VertexId(1)], &[ColourId(0)]);
        let r = rainbow_reach(&view, VertexId(0), &avoid, 1).unwrap();
        assert!(!r.is_reached(VertexId(1)));
        // colour 0 pairs 0 with some vertex; that one needs two hops
        assert_eq!(r.count(), 4);

        assert_eq!(
            rainbow_reach(&view, VertexId(1), &avoid, 1).unwrap_err(),
            ReachError::SourceForbidden(VertexId(1))
        );
        let sub = view.minus_vertex(VertexId(0));
        assert_eq!(
            rainbow_reach(&sub, VertexId(0), &AvoidSet::empty(&g), 1).unwrap_err(),
            ReachError::SourceNotInView(VertexId(0))
        );
    }

    #[test]
    fn reach_layers_never_shrink_and_paths_replay() {
        for n in [8usize, 12] {
            let g = gen_one_factorized_complete(n).unwrap();
            let view = g.full_view();
            let avoid = AvoidSet::from_sets(&g, &[VertexId(2)], &[ColourId(1)]);
            let r = rainbow_reach(&view, VertexId(0), &avoid, 4).unwrap();
            for w in r.layer_sizes.windows(2) {
                assert!(w[0] <= w[1]);
            }
            for v in r.reached_vertices() {
                let p = r.path_to(v).unwrap();
                assert!(p.len() <= 4);
                let mut a = avoid.clone();
                a.allow_vertex(VertexId(0));
                assert_eq!(p.validate(&view, Some(&a)), Ok(()), "vertex {v}");
            }
        }
    }

    #[test]
    fn split_is_deterministic_and_checks_hold() {
        let g = gen_one_factorized_complete(12).unwrap();
        let view = g.full_view();
        let a = split_colours(&view, 7, 64).unwrap();
        let b = split_colours(&view, 7, 64).unwrap();
        assert_eq!(a, b);
        assert!(a.satisfied);
        assert!(3 * a.edges[0] >= view.e() && 3 * a.edges[1] >= view.e());
        assert_eq!(a.edges[0] + a.edges[1], view.e());
        // every colour of the view is assigned
        for c in view.colours() {
            assert!(a.group_of[c.idx()] == 1 || a.group_of[c.idx()] == 2);
        }
    }

    #[test]
    fn split_exhausts_on_single_colour() {
        let g = ColouredGraph::from_edges(2, 1, [(0, 1, 0)]).unwrap();
        let err = split_colours(&g.full_view(), 3, 8).unwrap_err();
        let SplitError::Exhausted { budget, best } = err;
        assert_eq!(budget, 8);
        assert_eq!(best.edges.iter().min(), Some(&0));
    }

    #[test]
    fn connect_rejects_bad_calls() {
        let g = gen_rainbow_complete(6).unwrap();
        let view = g.full_view();
        let params = ConnectParams::new(3, ratio(1, 100), ratio(1, 4));
        let avoid = AvoidSet::empty(&g);
        assert!(matches!(
            rainbow_connect(&view, VertexId(1), VertexId(1), &avoid, &params, 0),
            Err(ConnectError::SameEndpoints(_))
        ));
        let avoid = AvoidSet::from_sets(&g, &[VertexId(2)], &[]);
        assert!(matches!(
            rainbow_connect(&view, VertexId(2), VertexId(3), &avoid, &params, 0),
            Err(ConnectError::EndpointForbidden(_))
        ));
        let mut capped = params;
        capped.avoid_budget = Some((0, 5));
        assert!(matches!(
            rainbow_connect(&view, VertexId(0), VertexId(3), &avoid, &capped, 0),
            Err(ConnectError::VertexBudget { found: 1, budget: 0 })
        ));
    }

    #[test]
    fn connect_takes_the_direct_edge() {
        let g = gen_rainbow_complete(8).unwrap();
        let view = g.full_view();
        let params = ConnectParams::new(3, ratio(1, 100), ratio(1, 4));
        let out = rainbow_connect(&view, VertexId(0), VertexId(5), &AvoidSet::empty(&g), &params, 1)
            .unwrap();
        let p = out.path.unwrap();
        assert_eq!(p.len(), 1);
        assert!(out.transcript.direct);
    }

    #[test]
    fn connect_fails_at_reach_on_a_forbidden_single_edge() {
        let g = ColouredGraph::from_edges(2, 1, [(0, 1, 0)]).unwrap();
        let view = g.full_view();
        let avoid = AvoidSet::from_sets(&g, &[], &[ColourId(0)]);
        let params = ConnectParams::new(2, ratio(1, 100), ratio(1, 4));
        let out = rainbow_connect(&view, VertexId(0), VertexId(1), &avoid, &params, 0).unwrap();
        assert!(out.path.is_none());
        assert_eq!(out.transcript.failure, Some(FailStage::Reach));
    }

    #[test]
    fn connect_runs_the_full_pipeline_when_the_shortcut_is_off() {
        let g = gen_one_factorized_complete(12).unwrap();
        let view = g.full_view();
        let mut params = ConnectParams::new(4, ratio(1, 100), ratio(1, 4));
        params.direct_shortcut = false;
        let mut successes = 0;
        for seed in 0..10u64 {
            let out =
                rainbow_connect(&view, VertexId(0), VertexId(7), &AvoidSet::empty(&g), &params, seed)
                    .unwrap();
            if let Some(p) = &out.path {
                successes += 1;
                assert!(!out.transcript.direct);
                assert_eq!(p.source(), VertexId(0));
                assert_eq!(p.target(), VertexId(7));
                assert!(p.len() <= 16);
                assert!(out.transcript.meeting.is_some());
            }
        }
        assert!(successes > 0, "pipeline never completed on K12");
    }

    #[test]
    fn connect_avoids_the_forbidden_sets() {
        let g = gen_one_factorized_complete(12).unwrap();
        let view = g.full_view();
        let avoid = AvoidSet::from_sets(
            &g,
            &[VertexId(3), VertexId(4)],
            &[ColourId(0), ColourId(1)],
        );
        let params = ConnectParams::new(4, ratio(1, 100), ratio(1, 4));
        for seed in 0..5u64 {
            let out = rainbow_connect(&view, VertexId(0), VertexId(7), &avoid, &params, seed)
                .unwrap();
            if let Some(p) = out.path {
                assert_eq!(p.validate(&view, Some(&avoid)), Ok(()));
            }
        }
    }

    #[test]
    fn edge_vertex_check_examples() {
        let k6 = gen_one_factorized_complete(6).unwrap();
        let whole = k6.full_view();
        let part = whole.minus_vertex(VertexId(5));
        // gamma = 1/3: e' = 10 >= 10 and v' = 5 >= 0
        let c = check_edge_to_vertex(&whole, &part, ratio(1, 3)).unwrap();
        assert!(c.premise && c.conclusion && c.held);
        // tiny part: premise fails, implication holds vacuously
        let tiny = whole
            .induced(&[VertexId(0), VertexId(1)])
            .unwrap();
        let c = check_edge_to_vertex(&whole, &tiny, ratio(1, 10)).unwrap();
        assert!(!c.premise && c.held);

        // K6 plus a pendant: min degree 1 < (32/7)/3, precondition fails
        let mut edges: Vec<(usize, usize, usize)> = k6
            .edges()
            .iter()
            .map(|e| (e.u.idx(), e.v.idx(), e.colour.idx()))
            .collect();
        edges.push((5, 6, 5));
        let g = ColouredGraph::from_edges(7, 6, edges).unwrap();
        assert!(matches!(
            check_edge_to_vertex(&g.full_view(), &g.full_view(), ratio(1, 10)),
            Err(EdgeVertexError::MinDegreeTooSmall { min: 1, .. })
        ));
    }

    #[test]
    fn shortcut_collapses_detours() {
        // walk 0-1-2-1-3 collapses to 0-1-3
        let g = ColouredGraph::from_edges(
            4,
            4,
            [(0, 1, 0), (1, 2, 1), (1, 3, 2), (2, 3, 3)],
        )
        .unwrap();
        let walk_v = vec![VertexId(0), VertexId(1), VertexId(2), VertexId(1), VertexId(3)];
        let walk_c = vec![ColourId(0), ColourId(1), ColourId(1), ColourId(2)];
        let p = shortcut_walk(walk_v, walk_c);
        assert_eq!(p.vertices, vec![VertexId(0), VertexId(1), VertexId(3)]);
        assert_eq!(p.colours, vec![ColourId(0), ColourId(2)]);
        assert_eq!(p.validate(&g.full_view(), None), Ok(()));
    }
}
