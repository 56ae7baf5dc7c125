//! Vertex-labeled DAGs and hybrid graphs (patterns).
//!
//! Both graph kinds store an endpoint mark per edge end, so every query in
//! this module runs unchanged over either. A DAG edge `a -> b` is the mark
//! pair (`Plain` at `a`, `Arrow` at `b`). Vertices are always numbered in
//! lexicographic order of their names; a [`VertexId`] is a position in that
//! order.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Index of a vertex within its host graph (lexicographic name order).
pub type VertexId = usize;

/// Sorted set of vertex ids.
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex names must be non-empty")]
    EmptyName,
    #[error("invalid vertex name `{0}`")]
    InvalidName(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-edge on `{0}`")]
    SelfEdge(String),
    #[error("duplicate edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),
    #[error("directed cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("position {position} is not an interior position of a path with {len} vertices")]
    IndexOutOfRange { position: usize, len: usize },
    #[error("`{0}` and `{1}` are not adjacent")]
    NotAdjacent(String, String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// Mark carried by one end of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EndpointMark {
    Plain,
    Arrow,
}

/// The three edge shapes expressible with two marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// `a -> b`
    Directed,
    /// `a -- b`
    Undirected,
    /// `a <-> b`
    Bidirected,
}

impl EdgeKind {
    /// Marks at (first, second) endpoint.
    pub fn marks(self) -> (EndpointMark, EndpointMark) {
        match self {
            EdgeKind::Directed => (EndpointMark::Plain, EndpointMark::Arrow),
            EdgeKind::Undirected => (EndpointMark::Plain, EndpointMark::Plain),
            EdgeKind::Bidirected => (EndpointMark::Arrow, EndpointMark::Arrow),
        }
    }
}

/// Read-only view shared by [`Dag`] and [`Pattern`].
pub trait MarkedGraph {
    /// Vertex names in id order (sorted).
    fn names(&self) -> &[String];

    /// Neighbors of `v` in increasing id order.
    fn neighbors(&self, v: VertexId) -> &[VertexId];

    /// Mark at `at` on the edge between `at` and `other`, `None` if not adjacent.
    fn mark(&self, at: VertexId, other: VertexId) -> Option<EndpointMark>;

    fn vertex_count(&self) -> usize {
        self.names().len()
    }

    fn name(&self, v: VertexId) -> &str {
        &self.names()[v]
    }

    fn vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.names()
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| GraphError::UnknownVertex(name.to_string()))
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(format!("#{v}")))
        }
    }

    fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.mark(a, b).is_some()
    }

    /// The edge between `from` and `to` has an arrowhead at `to`.
    fn arrow_into(&self, from: VertexId, to: VertexId) -> bool {
        self.mark(to, from) == Some(EndpointMark::Arrow)
    }

    /// `from -> to`: plain at `from`, arrow at `to`.
    fn is_directed(&self, from: VertexId, to: VertexId) -> bool {
        self.mark(from, to) == Some(EndpointMark::Plain)
            && self.mark(to, from) == Some(EndpointMark::Arrow)
    }

    fn is_undirected(&self, a: VertexId, b: VertexId) -> bool {
        self.mark(a, b) == Some(EndpointMark::Plain) && self.mark(b, a) == Some(EndpointMark::Plain)
    }

    fn is_bidirected(&self, a: VertexId, b: VertexId) -> bool {
        self.mark(a, b) == Some(EndpointMark::Arrow) && self.mark(b, a) == Some(EndpointMark::Arrow)
    }

    /// Strict children: targets of directed edges out of `v`.
    fn children(&self, v: VertexId) -> Vec<VertexId> {
        self.neighbors(v)
            .iter()
            .copied()
            .filter(|&w| self.is_directed(v, w))
            .collect()
    }

    /// Strict parents: sources of directed edges into `v`.
    fn parents(&self, v: VertexId) -> Vec<VertexId> {
        self.neighbors(v)
            .iter()
            .copied()
            .filter(|&w| self.is_directed(w, v))
            .collect()
    }

    fn has_undirected_edges(&self) -> bool {
        (0..self.vertex_count())
            .any(|a| self.neighbors(a).iter().any(|&b| a < b && self.is_undirected(a, b)))
    }

    fn edge_count(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.neighbors(v).len())
            .sum::<usize>()
            / 2
    }
}

fn validate_names<I, S>(vertices: I) -> Result<Vec<String>, GraphError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut names: Vec<String> = vertices.into_iter().map(Into::into).collect();
    for n in &names {
        if n.is_empty() {
            return Err(GraphError::EmptyName);
        }
        if !is_valid_name(n) {
            return Err(GraphError::InvalidName(n.clone()));
        }
    }
    names.sort();
    for w in names.windows(2) {
        if w[0] == w[1] {
            return Err(GraphError::DuplicateVertex(w[0].clone()));
        }
    }
    Ok(names)
}

/// Names are whitespace-free and avoid the edge-operator characters.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '-' | '<' | '>' | '#' | ','))
}

fn lookup(names: &[String], name: &str) -> Result<VertexId, GraphError> {
    names
        .binary_search_by(|n| n.as_str().cmp(name))
        .map_err(|_| GraphError::UnknownVertex(name.to_string()))
}

/// Mark storage shared by both graph kinds: `marks[at * n + other]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct MarkTable {
    n: usize,
    marks: Vec<Option<EndpointMark>>,
    neighbors: Vec<Vec<VertexId>>,
}

impl MarkTable {
    fn new(n: usize) -> Self {
        MarkTable {
            n,
            marks: vec![None; n * n],
            neighbors: vec![Vec::new(); n],
        }
    }

    fn get(&self, at: VertexId, other: VertexId) -> Option<EndpointMark> {
        self.marks[at * self.n + other]
    }

    fn insert(&mut self, a: VertexId, b: VertexId, mark_a: EndpointMark, mark_b: EndpointMark) {
        let n = self.n;
        if self.marks[a * n + b].is_none() {
            insert_sorted(&mut self.neighbors[a], b);
            insert_sorted(&mut self.neighbors[b], a);
        }
        self.marks[a * n + b] = Some(mark_a);
        self.marks[b * n + a] = Some(mark_b);
    }

    fn remove(&mut self, a: VertexId, b: VertexId) {
        let n = self.n;
        self.marks[a * n + b] = None;
        self.marks[b * n + a] = None;
        self.neighbors[a].retain(|&x| x != b);
        self.neighbors[b].retain(|&x| x != a);
    }
}

fn insert_sorted(v: &mut Vec<VertexId>, x: VertexId) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

/// A directed acyclic graph over named vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    names: Vec<String>,
    table: MarkTable,
    topo: Vec<VertexId>,
}

impl Dag {
    /// Builds a DAG from vertex names and `(tail, head)` edges given by name.
    pub fn build<I, S>(vertices: I, edges: &[(&str, &str)]) -> Result<Dag, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names = validate_names(vertices)?;
        let mut ids = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            ids.push((lookup(&names, a)?, lookup(&names, b)?));
        }
        Dag::from_ids(names, &ids)
    }

    /// Builds a DAG over already-sorted, distinct names with id-based edges.
    pub fn from_ids(names: Vec<String>, edges: &[(VertexId, VertexId)]) -> Result<Dag, GraphError> {
        let names = validate_names(names)?;
        let n = names.len();
        let mut table = MarkTable::new(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::UnknownVertex(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(GraphError::SelfEdge(names[a].clone()));
            }
            if table.get(a, b).is_some() {
                return Err(GraphError::DuplicateEdge(names[a].clone(), names[b].clone()));
            }
            table.insert(a, b, EndpointMark::Plain, EndpointMark::Arrow);
        }
        let topo = topological_order(&table).map_err(|cycle| {
            GraphError::CycleDetected(cycle.into_iter().map(|v| names[v].clone()).collect())
        })?;
        Ok(Dag { names, table, topo })
    }

    /// Vertices in a topological order (every edge points forward).
    pub fn topological_order(&self) -> &[VertexId] {
        &self.topo
    }

    /// All edges as `(tail, head)` pairs, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for a in 0..self.names.len() {
            for &b in &self.table.neighbors[a] {
                if self.is_directed(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, tail: VertexId, head: VertexId) -> bool {
        self.is_directed(tail, head)
    }

    /// The same DAG with every edge reversed.
    pub fn reversed(&self) -> Dag {
        let edges: Vec<_> = self.edges().into_iter().map(|(a, b)| (b, a)).collect();
        Dag::from_ids(self.names.clone(), &edges).expect("reversal preserves acyclicity")
    }

    /// Views this DAG as a pattern with the same marks.
    pub fn to_pattern(&self) -> Pattern {
        Pattern {
            names: self.names.clone(),
            table: self.table.clone(),
        }
    }
}

impl MarkedGraph for Dag {
    fn names(&self) -> &[String] {
        &self.names
    }
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.table.neighbors[v]
    }
    fn mark(&self, at: VertexId, other: VertexId) -> Option<EndpointMark> {
        self.table.get(at, other)
    }
    fn has_undirected_edges(&self) -> bool {
        false
    }
}

/// Kahn's algorithm with smallest-id tie breaking; on failure returns a cycle.
fn topological_order(table: &MarkTable) -> Result<Vec<VertexId>, Vec<VertexId>> {
    let n = table.n;
    let children = |v: VertexId| {
        table.neighbors[v]
            .iter()
            .copied()
            .filter(move |&w| table.get(w, v) == Some(EndpointMark::Arrow))
    };
    let mut indeg = vec![0usize; n];
    for v in 0..n {
        for w in children(v) {
            indeg[w] += 1;
        }
    }
    let mut ready: BTreeSet<VertexId> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for w in children(v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every remaining vertex has a remaining parent; walk parents until one repeats.
    let remaining: Vec<bool> = (0..n).map(|v| indeg[v] > 0).collect();
    let start = (0..n).find(|&v| remaining[v]).expect("cycle exists");
    let mut seen = vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut v = start;
    while seen[v] == usize::MAX {
        seen[v] = walk.len();
        walk.push(v);
        v = table.neighbors[v]
            .iter()
            .copied()
            .find(|&p| remaining[p] && table.get(v, p) == Some(EndpointMark::Arrow))
            .expect("remaining vertex has a remaining parent");
    }
    let mut cycle: Vec<VertexId> = walk[seen[v]..].to_vec();
    cycle.reverse();
    cycle.push(cycle[0]);
    Err(cycle)
}

/// A hybrid graph whose edges carry a mark at each end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    names: Vec<String>,
    table: MarkTable,
}

impl Pattern {
    /// Pattern with no edges.
    pub fn empty<I, S>(vertices: I) -> Result<Pattern, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names = validate_names(vertices)?;
        let n = names.len();
        Ok(Pattern {
            names,
            table: MarkTable::new(n),
        })
    }

    /// Complete undirected graph.
    pub fn complete<I, S>(vertices: I) -> Result<Pattern, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut p = Pattern::empty(vertices)?;
        let n = p.names.len();
        for a in 0..n {
            for b in a + 1..n {
                p.table
                    .insert(a, b, EndpointMark::Plain, EndpointMark::Plain);
            }
        }
        Ok(p)
    }

    /// Builds a pattern from named edges.
    pub fn build<I, S>(vertices: I, edges: &[(&str, &str, EdgeKind)]) -> Result<Pattern, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut p = Pattern::empty(vertices)?;
        for &(a, b, kind) in edges {
            let (a, b) = (p.vertex(a)?, p.vertex(b)?);
            let (ma, mb) = kind.marks();
            p.add_edge(a, b, ma, mb)?;
        }
        Ok(p)
    }

    /// Adds an edge with the given marks at `a` and `b`.
    pub fn add_edge(
        &mut self,
        a: VertexId,
        b: VertexId,
        mark_a: EndpointMark,
        mark_b: EndpointMark,
    ) -> Result<(), GraphError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(GraphError::SelfEdge(self.names[a].clone()));
        }
        if self.adjacent(a, b) {
            return Err(GraphError::DuplicateEdge(
                self.names[a].clone(),
                self.names[b].clone(),
            ));
        }
        self.table.insert(a, b, mark_a, mark_b);
        Ok(())
    }

    pub(crate) fn remove_edge(&mut self, a: VertexId, b: VertexId) {
        self.table.remove(a, b);
    }

    /// Sets the mark at `at` on an existing edge.
    pub(crate) fn set_mark(&mut self, at: VertexId, other: VertexId, mark: EndpointMark) {
        debug_assert!(self.adjacent(at, other));
        self.table.marks[at * self.table.n + other] = Some(mark);
    }

    /// Edges as `(a, b, mark at a, mark at b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, EndpointMark, EndpointMark)> {
        let mut out = Vec::new();
        for a in 0..self.names.len() {
            for &b in &self.table.neighbors[a] {
                if a < b {
                    out.push((a, b, self.table.get(a, b).unwrap(), self.table.get(b, a).unwrap()));
                }
            }
        }
        out
    }

    /// Same vertex names and the same adjacency relation; marks are ignored.
    pub fn same_adjacencies(&self, other: &Pattern) -> bool {
        self.names == other.names
            && (0..self.names.len()).all(|v| self.neighbors(v) == other.neighbors(v))
    }
}

impl MarkedGraph for Pattern {
    fn names(&self) -> &[String] {
        &self.names
    }
    fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.table.neighbors[v]
    }
    fn mark(&self, at: VertexId, other: VertexId) -> Option<EndpointMark> {
        self.table.get(at, other)
    }
}

/// A simple path: at least two distinct vertices, consecutive ones adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<VertexId>);

impl Path {
    pub fn new<G: MarkedGraph + ?Sized>(g: &G, vertices: Vec<VertexId>) -> Result<Path, GraphError> {
        if vertices.len() < 2 {
            return Err(GraphError::InvalidPath("fewer than two vertices".into()));
        }
        let mut seen = VertexSet::new();
        for &v in &vertices {
            g.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(GraphError::InvalidPath(format!(
                    "vertex `{}` repeats",
                    g.name(v)
                )));
            }
        }
        for w in vertices.windows(2) {
            if !g.adjacent(w[0], w[1]) {
                return Err(GraphError::NotAdjacent(
                    g.name(w[0]).to_string(),
                    g.name(w[1]).to_string(),
                ));
            }
        }
        Ok(Path(vertices))
    }

    /// Wraps a vertex sequence already known to be a valid path.
    pub(crate) fn from_trusted(vertices: Vec<VertexId>) -> Path {
        Path(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> VertexId {
        self.0[0]
    }

    pub fn last(&self) -> VertexId {
        self.0[self.0.len() - 1]
    }

    pub fn interior(&self) -> &[VertexId] {
        &self.0[1..self.0.len() - 1]
    }

    /// Renders the path as space-separated names.
    pub fn display<'a, G: MarkedGraph + ?Sized>(&'a self, g: &'a G) -> PathDisplay<'a, G> {
        PathDisplay { path: self, graph: g }
    }
}

pub struct PathDisplay<'a, G: ?Sized> {
    path: &'a Path,
    graph: &'a G,
}

impl<G: MarkedGraph + ?Sized> fmt::Display for PathDisplay<'_, G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &v) in self.path.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.graph.name(v))?;
        }
        Ok(())
    }
}

/// Vertices with a directed path to `v` (`v` excluded).
pub fn ancestors<G: MarkedGraph + ?Sized>(g: &G, v: VertexId) -> Result<VertexSet, GraphError> {
    g.check_vertex(v)?;
    Ok(directed_reach(g, &[v], false))
}

/// Vertices reachable from `v` by a directed path (`v` excluded).
pub fn descendants<G: MarkedGraph + ?Sized>(g: &G, v: VertexId) -> Result<VertexSet, GraphError> {
    g.check_vertex(v)?;
    Ok(directed_reach(g, &[v], true))
}

/// Union of the seeds and all their ancestors.
pub fn ancestral_closure<G: MarkedGraph + ?Sized>(g: &G, seeds: &[VertexId]) -> Vec<bool> {
    let mut mark = vec![false; g.vertex_count()];
    for &s in seeds {
        mark[s] = true;
    }
    for v in directed_reach(g, seeds, false) {
        mark[v] = true;
    }
    mark
}

/// BFS over strictly directed edges, forward or backward. Seeds are only
/// reported if reachable from another seed (or from themselves via a cycle).
fn directed_reach<G: MarkedGraph + ?Sized>(g: &G, seeds: &[VertexId], forward: bool) -> VertexSet {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = VertexSet::new();
    let mut queue: VecDeque<VertexId> = seeds.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            let step = if forward { g.is_directed(v, w) } else { g.is_directed(w, v) };
            if step && !seen[w] {
                seen[w] = true;
                out.insert(w);
                queue.push_back(w);
            }
        }
    }
    out
}

/// Whether a strictly directed path leads from `from` to `to`.
pub fn has_directed_path<G: MarkedGraph + ?Sized>(g: &G, from: VertexId, to: VertexId) -> bool {
    directed_reach(g, &[from], true).contains(&to)
}

/// Whether both path edges at `position` carry an arrowhead into that vertex.
pub fn is_collider<G: MarkedGraph + ?Sized>(
    g: &G,
    path: &Path,
    position: usize,
) -> Result<bool, GraphError> {
    let vs = path.vertices();
    if position == 0 || position + 1 >= vs.len() {
        return Err(GraphError::IndexOutOfRange {
            position,
            len: vs.len(),
        });
    }
    let v = vs[position];
    Ok(g.arrow_into(vs[position - 1], v) && g.arrow_into(vs[position + 1], v))
}

/// All simple paths between `x` and `y` ignoring edge direction, in
/// lexicographic order of their vertex sequences. `max_edges` bounds the
/// number of edges per path.
pub fn enumerate_paths<G: MarkedGraph + ?Sized>(
    g: &G,
    x: VertexId,
    y: VertexId,
    max_edges: Option<usize>,
) -> Result<Vec<Path>, GraphError> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    let mut out = Vec::new();
    if x == y {
        return Ok(out);
    }
    let limit = max_edges.unwrap_or(usize::MAX);
    let mut on_path = vec![false; g.vertex_count()];
    let mut stack = vec![x];
    on_path[x] = true;
    fn dfs<G: MarkedGraph + ?Sized>(
        g: &G,
        y: VertexId,
        limit: usize,
        stack: &mut Vec<VertexId>,
        on_path: &mut [bool],
        out: &mut Vec<Path>,
    ) {
        if stack.len() > limit {
            return;
        }
        let cur = *stack.last().unwrap();
        for &w in g.neighbors(cur) {
            if on_path[w] {
                continue;
            }
            if w == y {
                let mut p = stack.clone();
                p.push(y);
                out.push(Path(p));
                continue;
            }
            on_path[w] = true;
            stack.push(w);
            dfs(g, y, limit, stack, on_path, out);
            stack.pop();
            on_path[w] = false;
        }
    }
    dfs(g, y, limit, &mut stack, &mut on_path, &mut out);
    Ok(out)
}

/// Vertices adjacent to `a` or `b`, excluding `a` and `b`.
pub fn adjacent_aux<G: MarkedGraph + ?Sized>(
    g: &G,
    a: VertexId,
    b: VertexId,
) -> Result<VertexSet, GraphError> {
    g.check_vertex(a)?;
    g.check_vertex(b)?;
    Ok(g
        .neighbors(a)
        .iter()
        .chain(g.neighbors(b))
        .copied()
        .filter(|&v| v != a && v != b)
        .collect())
}

/// Vertices lying on at least one simple path between `a` and `b`
/// (directions ignored), endpoints excluded.
///
/// Uses the vertex-disjoint-paths characterisation: `v` is on some simple
/// `a`–`b` path iff two paths from `v`, one ending at `a` and one at `b`,
/// share no vertex other than `v`.
pub fn path_interior_vertices<G: MarkedGraph + ?Sized>(
    g: &G,
    a: VertexId,
    b: VertexId,
) -> Result<VertexSet, GraphError> {
    g.check_vertex(a)?;
    g.check_vertex(b)?;
    if a == b {
        return Ok(VertexSet::new());
    }
    let comp = component_of(g, a);
    if !comp[b] {
        return Ok(VertexSet::new());
    }
    let mut net = DisjointPaths::new(g, a, b);
    Ok((0..g.vertex_count())
        .filter(|&v| v != a && v != b && comp[v] && net.two_paths(v))
        .collect())
}

/// Whether `v` lies on some simple path between `a` and `b`.
pub fn on_simple_path<G: MarkedGraph + ?Sized>(g: &G, a: VertexId, b: VertexId, v: VertexId) -> bool {
    if v == a || v == b || a == b {
        return false;
    }
    DisjointPaths::new(g, a, b).two_paths(v)
}

/// Reference implementation of [`path_interior_vertices`] by exhaustive
/// path enumeration. Exponential; intended for small graphs and tests.
pub fn path_interior_vertices_enum<G: MarkedGraph + ?Sized>(
    g: &G,
    a: VertexId,
    b: VertexId,
) -> Result<VertexSet, GraphError> {
    Ok(enumerate_paths(g, a, b, None)?
        .iter()
        .flat_map(|p| p.interior().iter().copied())
        .collect())
}

fn component_of<G: MarkedGraph + ?Sized>(g: &G, start: VertexId) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Unit-capacity vertex-split flow network for the two-path test.
///
/// Node `2u` is u's entry, `2u + 1` its exit, `2n` the sink. Every vertex
/// except the source has entry→exit capacity one; `a` and `b` drain into
/// the sink.
struct DisjointPaths {
    n: usize,
    // (to, capacity index) per node; capacities stored flat
    adj: Vec<Vec<(usize, usize)>>,
    cap: Vec<i32>,
    base: Vec<i32>,
    split_arc: Vec<usize>,
}

impl DisjointPaths {
    fn new<G: MarkedGraph + ?Sized>(g: &G, a: VertexId, b: VertexId) -> Self {
        let n = g.vertex_count();
        let mut net = DisjointPaths {
            n,
            adj: vec![Vec::new(); 2 * n + 1],
            cap: Vec::new(),
            base: Vec::new(),
            split_arc: vec![0; n],
        };
        for u in 0..n {
            net.split_arc[u] = net.arc(2 * u, 2 * u + 1, 1);
        }
        for u in 0..n {
            for &w in g.neighbors(u) {
                net.arc(2 * u + 1, 2 * w, 1);
            }
        }
        net.arc(2 * a + 1, 2 * n, 1);
        net.arc(2 * b + 1, 2 * n, 1);
        net.base = net.cap.clone();
        net
    }

    fn arc(&mut self, from: usize, to: usize, c: i32) -> usize {
        let id = self.cap.len();
        self.cap.push(c);
        self.cap.push(0);
        self.adj[from].push((to, id));
        self.adj[to].push((from, id + 1));
        id
    }

    fn two_paths(&mut self, v: VertexId) -> bool {
        self.cap.copy_from_slice(&self.base);
        // the source vertex may be left by both paths
        self.cap[self.split_arc[v]] = 2;
        let source = 2 * v + 1;
        let sink = 2 * self.n;
        (0..2).all(|_| self.augment(source, sink))
    }

    fn augment(&mut self, source: usize, sink: usize) -> bool {
        let nodes = self.adj.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes];
        let mut seen = vec![false; nodes];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for &(w, id) in &self.adj[u] {
                if !seen[w] && self.cap[id] > 0 {
                    seen[w] = true;
                    prev[w] = Some((u, id));
                    queue.push_back(w);
                }
            }
        }
        if !seen[sink] {
            return false;
        }
        let mut node = sink;
        while let Some((u, id)) = prev[node] {
            self.cap[id] -= 1;
            self.cap[id ^ 1] += 1;
            node = u;
        }
        true
    }
}

/// Whether some third vertex is adjacent to both `x` and `z` (which must be adjacent).
pub fn triangle_containing<G: MarkedGraph + ?Sized>(
    g: &G,
    x: VertexId,
    z: VertexId,
) -> Result<bool, GraphError> {
    Ok(triangle_witness(g, x, z)?.is_some())
}

/// Smallest third vertex forming a triangle with the edge `x`–`z`.
pub fn triangle_witness<G: MarkedGraph + ?Sized>(
    g: &G,
    x: VertexId,
    z: VertexId,
) -> Result<Option<VertexId>, GraphError> {
    g.check_vertex(x)?;
    g.check_vertex(z)?;
    if !g.adjacent(x, z) {
        return Err(GraphError::NotAdjacent(
            g.name(x).to_string(),
            g.name(z).to_string(),
        ));
    }
    Ok(g
        .neighbors(x)
        .iter()
        .copied()
        .find(|&w| w != z && g.adjacent(w, z)))
}

/// Unshielded colliders `(a, b, c)` with `a < c`: arrowheads into `b` from
/// both `a` and `c`, and `a`, `c` nonadjacent.
pub fn unshielded_colliders<G: MarkedGraph + ?Sized>(g: &G) -> Vec<(VertexId, VertexId, VertexId)> {
    let mut out = Vec::new();
    for b in 0..g.vertex_count() {
        let nb = g.neighbors(b);
        for (i, &a) in nb.iter().enumerate() {
            for &c in &nb[i + 1..] {
                if !g.adjacent(a, c) && g.arrow_into(a, b) && g.arrow_into(c, b) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out.sort();
    out
}
