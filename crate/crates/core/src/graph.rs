//! Properly edge-coloured graphs, text I/O, and non-materializing subgraph
//! views.
//!
//! A `ColouredGraph` is immutable once constructed: vertices are dense
//! indices `0..n`, colours dense indices `0..k`, and the colouring is proper
//! (no two edges of the same colour share an endpoint). Algorithms operate
//! on `SubgraphView`s, which overlay vertex and edge masks on a shared
//! parent graph; materialization is explicit and rare.

use crate::rational::{ratio, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColourId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ColourId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl VertexId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl ColourId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Undirected coloured edge with endpoints stored low-to-high.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub colour: ColourId,
}

impl Edge {
    pub fn other(&self, w: VertexId) -> VertexId {
        debug_assert!(w == self.u || w == self.v);
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("colour {colour} out of range (k = {k})")]
    ColourOutOfRange { colour: usize, k: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("improper colouring: vertex {vertex} sees colour {colour} twice")]
    ImproperColouring { vertex: VertexId, colour: ColourId },
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("missing `n m k` header line")]
    MissingHeader,
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ViewError {
    #[error("view has no vertices")]
    EmptyView,
    #[error("vertex {0} not contained in view")]
    VertexNotInView(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub average: Rational,
}

#[derive(Clone, Debug)]
pub struct ColouredGraph {
    n: usize,
    k: usize,
    edges: Vec<Edge>,
    // per vertex: (neighbour, colour, edge id), sorted by neighbour
    adj: Vec<Vec<(u32, u32, u32)>>,
}

impl PartialEq for ColouredGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.edges == other.edges
    }
}

impl Eq for ColouredGraph {}

impl ColouredGraph {
    /// Builds and fully validates a graph. Edges may arrive in any order and
    /// either endpoint orientation; they are stored sorted by (min, max).
    pub fn from_edges<I>(n: usize, k: usize, raw: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, usize)>,
    {
        let mut edges = Vec::new();
        for (a, b, c) in raw {
            if a >= n {
                return Err(GraphError::VertexOutOfRange { vertex: a, n });
            }
            if b >= n {
                return Err(GraphError::VertexOutOfRange { vertex: b, n });
            }
            if c >= k {
                return Err(GraphError::ColourOutOfRange { colour: c, k });
            }
            if a == b {
                return Err(GraphError::SelfLoop(VertexId(a as u32)));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            edges.push(Edge {
                u: VertexId(u as u32),
                v: VertexId(v as u32),
                colour: ColourId(c as u32),
            });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        for w in edges.windows(2) {
            if w[0].u == w[1].u && w[0].v == w[1].v {
                return Err(GraphError::DuplicateEdge { u: w[0].u, v: w[0].v });
            }
        }
        // proper-colouring check: every vertex sees each colour at most once
        let mut seen: Vec<Vec<u32>> = vec![Vec::new(); n];
        for e in &edges {
            for end in [e.u, e.v] {
                let s = &mut seen[end.idx()];
                if s.contains(&e.colour.0) {
                    return Err(GraphError::ImproperColouring {
                        vertex: end,
                        colour: e.colour,
                    });
                }
                s.push(e.colour.0);
            }
        }
        let mut adj: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            adj[e.u.idx()].push((e.v.0, e.colour.0, id as u32));
            adj[e.v.idx()].push((e.u.0, e.colour.0, id as u32));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(ColouredGraph { n, k, edges, adj })
    }

    /// Parses the text format: `#` comments, an `n m k` header, then `m`
    /// lines `u v c`. Errors carry 1-based line numbers.
    pub fn load(text: &str) -> Result<Self, LoadError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut rows: Vec<(usize, usize, usize, usize)> = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw_line.split_once('#') {
                Some((before, _)) => before,
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(LoadError::Parse {
                    line: line_no,
                    message: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let mut nums = [0usize; 3];
            for (j, f) in fields.iter().enumerate() {
                nums[j] = f.parse().map_err(|_| LoadError::Parse {
                    line: line_no,
                    message: format!("invalid integer `{f}`"),
                })?;
            }
            if header.is_none() {
                header = Some((nums[0], nums[1], nums[2]));
            } else {
                rows.push((nums[0], nums[1], nums[2], line_no));
            }
        }
        let (n, m, k) = header.ok_or(LoadError::MissingHeader)?;
        if rows.len() != m {
            return Err(LoadError::EdgeCountMismatch {
                expected: m,
                found: rows.len(),
            });
        }
        // incremental validation so errors can name the offending line
        let mut pairs = std::collections::HashSet::with_capacity(m);
        let mut seen: Vec<std::collections::HashSet<u32>> = vec![Default::default(); n];
        for &(u, v, c, line_no) in &rows {
            let fail = |source| Err(LoadError::Graph { line: line_no, source });
            if u >= n {
                return fail(GraphError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return fail(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if c >= k {
                return fail(GraphError::ColourOutOfRange { colour: c, k });
            }
            if u == v {
                return fail(GraphError::SelfLoop(VertexId(u as u32)));
            }
            let key = (u.min(v), u.max(v));
            if !pairs.insert(key) {
                return fail(GraphError::DuplicateEdge {
                    u: VertexId(key.0 as u32),
                    v: VertexId(key.1 as u32),
                });
            }
            for end in [u, v] {
                if !seen[end].insert(c as u32) {
                    return fail(GraphError::ImproperColouring {
                        vertex: VertexId(end as u32),
                        colour: ColourId(c as u32),
                    });
                }
            }
        }
        let acc: Vec<(usize, usize, usize)> = rows.iter().map(|&(u, v, c, _)| (u, v, c)).collect();
        ColouredGraph::from_edges(n, k, acc)
            .map_err(|source| LoadError::Graph { line: 0, source })
    }

    /// Serializes to the text format, edges sorted by (min, max) endpoint.
    /// `header` lines are emitted as leading `#` comments.
    pub fn to_text(&self, header: &[&str]) -> String {
        let mut out = String::new();
        for h in header {
            out.push_str("# ");
            out.push_str(h);
            out.push('\n');
        }
        out.push_str(&format!("{} {} {}\n", self.n, self.edges.len(), self.k));
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.colour));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.idx()].len()
    }

    pub(crate) fn adjacency(&self, v: VertexId) -> &[(u32, u32, u32)] {
        &self.adj[v.idx()]
    }

    /// Looks up the edge id joining `u` and `v`, if present.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.adj[u.idx()]
            .binary_search_by_key(&v.0, |&(w, _, _)| w)
            .ok()
            .map(|i| self.adj[u.idx()][i].2 as usize)
    }

    pub fn full_view(&self) -> SubgraphView<'_> {
        SubgraphView {
            graph: self,
            vertex_in: vec![true; self.n],
            edge_in: vec![true; self.edges.len()],
            nv: self.n,
            ne: self.edges.len(),
        }
    }
}

/// Vertex/edge mask over a shared parent graph. Every contained edge has
/// both endpoints contained; counts are cached.
#[derive(Clone)]
pub struct SubgraphView<'g> {
    graph: &'g ColouredGraph,
    vertex_in: Vec<bool>,
    edge_in: Vec<bool>,
    nv: usize,
    ne: usize,
}

impl<'g> SubgraphView<'g> {
    pub fn graph(&self) -> &'g ColouredGraph {
        self.graph
    }

    pub fn v(&self) -> usize {
        self.nv
    }

    pub fn e(&self) -> usize {
        self.ne
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertex_in[v.idx()]
    }

    pub fn contains_edge(&self, id: usize) -> bool {
        self.edge_in[id]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_in
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn vertex_vec(&self) -> Vec<VertexId> {
        self.vertices().collect()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.edge_in
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    /// Neighbours of `v` within the view: (neighbour, colour, edge id),
    /// ascending by neighbour index.
    pub fn neighbours(&self, v: VertexId) -> impl Iterator<Item = (VertexId, ColourId, usize)> + '_ {
        self.graph
            .adjacency(v)
            .iter()
            .filter(|&&(_, _, id)| self.edge_in[id as usize])
            .map(|&(w, c, id)| (VertexId(w), ColourId(c), id as usize))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        debug_assert!(self.vertex_in[v.idx()]);
        self.graph
            .adjacency(v)
            .iter()
            .filter(|&&(_, _, id)| self.edge_in[id as usize])
            .count()
    }

    /// Average degree 2e/v as an exact rational; `None` on empty views.
    pub fn avg_degree(&self) -> Option<Rational> {
        if self.nv == 0 {
            None
        } else {
            Some(ratio(2 * self.ne as i128, self.nv as i128))
        }
    }

    pub fn degree_stats(&self) -> Result<DegreeStats, ViewError> {
        if self.nv == 0 {
            return Err(ViewError::EmptyView);
        }
        let mut min = usize::MAX;
        let mut max = 0;
        for v in self.vertices() {
            let d = self.degree(v);
            min = min.min(d);
            max = max.max(d);
        }
        Ok(DegreeStats {
            min,
            max,
            average: self.avg_degree().expect("nonempty"),
        })
    }

    /// Distinct colours present on view edges, ascending.
    pub fn colours(&self) -> Vec<ColourId> {
        let mut present = vec![false; self.graph.k()];
        for id in self.edge_ids() {
            present[self.graph.edge(id).colour.idx()] = true;
        }
        present
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| ColourId(i as u32))
            .collect()
    }

    /// Induced subview on the given vertices (must lie in this view).
    pub fn induced(&self, keep: &[VertexId]) -> Result<SubgraphView<'g>, ViewError> {
        let mut vertex_in = vec![false; self.graph.n()];
        for &v in keep {
            if !self.vertex_in[v.idx()] {
                return Err(ViewError::VertexNotInView(v));
            }
            vertex_in[v.idx()] = true;
        }
        Ok(self.induced_mask(&vertex_in))
    }

    /// Induced subview on `mask` (assumed a subset of this view's vertices).
    pub fn induced_mask(&self, mask: &[bool]) -> SubgraphView<'g> {
        debug_assert_eq!(mask.len(), self.graph.n());
        let mut edge_in = vec![false; self.graph.m()];
        let mut ne = 0;
        for id in self.edge_ids() {
            let e = self.graph.edge(id);
            if mask[e.u.idx()] && mask[e.v.idx()] {
                edge_in[id] = true;
                ne += 1;
            }
        }
        let nv = mask.iter().filter(|&&b| b).count();
        SubgraphView {
            graph: self.graph,
            vertex_in: mask.to_vec(),
            edge_in,
            nv,
            ne,
        }
    }

    pub fn minus_vertex(&self, v: VertexId) -> SubgraphView<'g> {
        let mut mask = self.vertex_in.clone();
        mask[v.idx()] = false;
        self.induced_mask(&mask)
    }

    /// Spanning subview keeping only edges accepted by `keep` (vertex set
    /// unchanged).
    pub fn retain_edges(&self, mut keep: impl FnMut(usize) -> bool) -> SubgraphView<'g> {
        let mut edge_in = self.edge_in.clone();
        let mut ne = 0;
        for (id, present) in edge_in.iter_mut().enumerate() {
            if *present {
                if keep(id) {
                    ne += 1;
                } else {
                    *present = false;
                }
            }
        }
        SubgraphView {
            graph: self.graph,
            vertex_in: self.vertex_in.clone(),
            edge_in,
            nv: self.nv,
            ne,
        }
    }

    /// Drops vertices with no incident view edge.
    pub fn support(&self) -> SubgraphView<'g> {
        let mut mask = vec![false; self.graph.n()];
        for id in self.edge_ids() {
            let e = self.graph.edge(id);
            mask[e.u.idx()] = true;
            mask[e.v.idx()] = true;
        }
        let nv = mask.iter().filter(|&&b| b).count();
        SubgraphView {
            graph: self.graph,
            vertex_in: mask,
            edge_in: self.edge_in.clone(),
            nv,
            ne: self.ne,
        }
    }

    /// (e(S), e(S, S^c)) within the view; `S^c` is the view's complement of S.
    pub fn boundary_edges(&self, s: &[VertexId]) -> Result<(usize, usize), ViewError> {
        let mut in_s = vec![false; self.graph.n()];
        for &v in s {
            if !self.vertex_in[v.idx()] {
                return Err(ViewError::VertexNotInView(v));
            }
            in_s[v.idx()] = true;
        }
        let mut inside = 0;
        let mut crossing = 0;
        for id in self.edge_ids() {
            let e = self.graph.edge(id);
            match (in_s[e.u.idx()], in_s[e.v.idx()]) {
                (true, true) => inside += 1,
                (true, false) | (false, true) => crossing += 1,
                _ => {}
            }
        }
        Ok((inside, crossing))
    }

    /// Copies the view into a standalone graph with dense vertex labels;
    /// returns the new graph and the new-index -> old-id map.
    pub fn materialize(&self) -> (ColouredGraph, Vec<VertexId>) {
        let verts = self.vertex_vec();
        let mut back = vec![u32::MAX; self.graph.n()];
        for (i, v) in verts.iter().enumerate() {
            back[v.idx()] = i as u32;
        }
        let edges: Vec<(usize, usize, usize)> = self
            .edge_ids()
            .map(|id| {
                let e = self.graph.edge(id);
                (
                    back[e.u.idx()] as usize,
                    back[e.v.idx()] as usize,
                    e.colour.idx(),
                )
            })
            .collect();
        let g = ColouredGraph::from_edges(verts.len(), self.graph.k(), edges)
            .expect("materialized view inherits validity");
        (g, verts)
    }

    /// True when both views overlay the same parent with identical masks.
    pub fn same_selection(&self, other: &SubgraphView<'_>) -> bool {
        std::ptr::eq(self.graph, other.graph)
            && self.vertex_in == other.vertex_in
            && self.edge_in == other.edge_in
    }
}

impl fmt::Debug for SubgraphView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubgraphView(v={}, e={})", self.nv, self.ne)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> ColouredGraph {
        // proper 3-edge-colouring of K4: three perfect matchings
        ColouredGraph::from_edges(
            4,
            3,
            [
                (0, 1, 0),
                (2, 3, 0),
                (0, 2, 1),
                (1, 3, 1),
                (0, 3, 2),
                (1, 2, 2),
            ],
        )
        .unwrap()
    }

    // ---- construction and validation ----

    #[test]
    fn rejects_self_loop_duplicate_and_bad_ranges() {
        assert_eq!(
            ColouredGraph::from_edges(3, 2, [(0, 0, 0)]).unwrap_err(),
            GraphError::SelfLoop(VertexId(0))
        );
        assert_eq!(
            ColouredGraph::from_edges(3, 2, [(0, 1, 0), (1, 0, 1)]).unwrap_err(),
            GraphError::DuplicateEdge {
                u: VertexId(0),
                v: VertexId(1)
            }
        );
        assert!(matches!(
            ColouredGraph::from_edges(3, 2, [(0, 5, 0)]).unwrap_err(),
            GraphError::VertexOutOfRange { vertex: 5, .. }
        ));
        assert!(matches!(
            ColouredGraph::from_edges(3, 2, [(0, 1, 7)]).unwrap_err(),
            GraphError::ColourOutOfRange { colour: 7, .. }
        ));
    }

    #[test]
    fn rejects_improper_colouring_naming_vertex_and_colour() {
        let err = ColouredGraph::from_edges(3, 2, [(0, 1, 0), (1, 2, 1), (0, 2, 0)]).unwrap_err();
        assert_eq!(
            err,
            GraphError::ImproperColouring {
                vertex: VertexId(0),
                colour: ColourId(0)
            }
        );
    }

    // ---- text format ----

    #[test]
    fn loads_triangle() {
        let g = ColouredGraph::load("# a triangle\n3 3 3\n0 1 0\n1 2 1\n0 2 2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert_eq!(g.k(), 3);
        assert_eq!(g.degree(VertexId(1)), 2);
    }

    #[test]
    fn load_reports_line_numbers() {
        let err = ColouredGraph::load("3 3 3\n0 1 0\n1 2\n0 2 2\n").unwrap_err();
        assert_eq!(
            err,
            LoadError::Parse {
                line: 3,
                message: "expected 3 fields, found 2".into()
            }
        );
        let err = ColouredGraph::load("3 3 2\n0 1 0\n1 2 1\n0 2 0\n").unwrap_err();
        assert_eq!(
            err,
            LoadError::Graph {
                line: 4,
                source: GraphError::ImproperColouring {
                    vertex: VertexId(0),
                    colour: ColourId(0)
                }
            }
        );
        assert_eq!(
            ColouredGraph::load("# only comments\n").unwrap_err(),
            LoadError::MissingHeader
        );
        assert_eq!(
            ColouredGraph::load("3 3 3\n0 1 0\n").unwrap_err(),
            LoadError::EdgeCountMismatch {
                expected: 3,
                found: 1
            }
        );
    }

    #[test]
    fn round_trip_identity() {
        let g = k4();
        let text = g.to_text(&["K4 under a 1-factorization"]);
        let h = ColouredGraph::load(&text).unwrap();
        assert_eq!(g, h);
        // serialization is canonical: sorted by (min endpoint, max endpoint)
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "4 6 3");
        assert_eq!(body[1], "0 1 0");
        assert_eq!(body.last().unwrap(), &"2 3 0");
    }

    // ---- stats and boundaries ----

    #[test]
    fn degree_stats_examples() {
        let g = k4();
        let s = g.full_view().degree_stats().unwrap();
        assert_eq!(s.average, ratio(3, 1));
        assert_eq!((s.min, s.max), (3, 3));

        // path on 3 vertices: average degree 4/3
        let p = ColouredGraph::from_edges(3, 2, [(0, 1, 0), (1, 2, 1)]).unwrap();
        let s = p.full_view().degree_stats().unwrap();
        assert_eq!(s.average, ratio(4, 3));
        assert_eq!((s.min, s.max), (1, 2));

        let empty = ColouredGraph::from_edges(0, 0, []).unwrap();
        assert_eq!(
            empty.full_view().degree_stats().unwrap_err(),
            ViewError::EmptyView
        );
    }

    #[test]
    fn boundary_edge_examples() {
        let g = k4();
        let view = g.full_view();
        assert_eq!(view.boundary_edges(&[VertexId(0)]).unwrap(), (0, 3));
        assert_eq!(
            view.boundary_edges(&[VertexId(0), VertexId(1)]).unwrap(),
            (1, 4)
        );

        // C5, adjacent pair: e(S) = 1, boundary 2
        let c5 = ColouredGraph::from_edges(
            5,
            3,
            [(0, 1, 0), (1, 2, 1), (2, 3, 0), (3, 4, 1), (0, 4, 2)],
        )
        .unwrap();
        let view = c5.full_view();
        assert_eq!(
            view.boundary_edges(&[VertexId(0), VertexId(1)]).unwrap(),
            (1, 2)
        );
        // S outside the view is an error
        let sub = view.minus_vertex(VertexId(0));
        assert_eq!(
            sub.boundary_edges(&[VertexId(0)]).unwrap_err(),
            ViewError::VertexNotInView(VertexId(0))
        );
    }

    #[test]
    fn handshake_identity_on_views() {
        let g = k4();
        let view = g.full_view();
        for s in [
            vec![VertexId(0)],
            vec![VertexId(0), VertexId(2)],
            vec![VertexId(1), VertexId(2), VertexId(3)],
        ] {
            let (inside, crossing) = view.boundary_edges(&s).unwrap();
            let deg_sum: usize = s.iter().map(|&v| view.degree(v)).sum();
            assert_eq!(2 * inside + crossing, deg_sum);
        }
    }

    // ---- views ----

    #[test]
    fn induced_views_and_materialization() {
        let g = k4();
        let view = g.full_view();
        let tri = view
            .induced(&[VertexId(0), VertexId(1), VertexId(2)])
            .unwrap();
        assert_eq!((tri.v(), tri.e()), (3, 3));
        assert_eq!(tri.avg_degree().unwrap(), ratio(2, 1));
        let (mat, map) = tri.materialize();
        assert_eq!(mat.n(), 3);
        assert_eq!(mat.m(), 3);
        assert_eq!(map, vec![VertexId(0), VertexId(1), VertexId(2)]);

        let spanning = view.retain_edges(|id| g.edge(id).colour == ColourId(0));
        assert_eq!((spanning.v(), spanning.e()), (4, 2));
        assert_eq!(spanning.degree(VertexId(0)), 1);
        let supp = spanning.support();
        assert_eq!(supp.v(), 4); // both matching edges touch all 4 vertices

        let err = view.induced(&[VertexId(9).min(VertexId(3)), VertexId(3)]);
        // duplicate vertices collapse; out-of-view detection still works
        assert!(err.is_ok());
        let dropped = view.minus_vertex(VertexId(3));
        assert!(dropped.induced(&[VertexId(3)]).is_err());
    }

    #[test]
    fn view_degrees_match_materialized_graph() {
        let g = k4();
        let view = g.full_view().minus_vertex(VertexId(2));
        let (mat, map) = view.materialize();
        for (new_idx, &old) in map.iter().enumerate() {
            assert_eq!(mat.degree(VertexId(new_idx as u32)), view.degree(old));
        }
        assert_eq!(view.avg_degree(), mat.full_view().avg_degree());
    }
}
