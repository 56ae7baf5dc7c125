//! The PC algorithm over an abstract conditional-independence oracle.
//!
//! Phases: skeleton search from the complete undirected graph, collider
//! orientation of unshielded triples, and propagation of the two
//! orientation rules to a fixpoint. Candidate conditioning sets for a pair
//! `(a, b)` are the vertices adjacent to `a` or `b` that also lie on some
//! simple path between them, recomputed as edges are deleted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::dsep::{d_separated_with, DsepMethod, SepQuery};
use crate::format::ParseError;
use crate::graph::{
    adjacent_aux, has_directed_path, on_simple_path, unshielded_colliders, Dag, EndpointMark,
    GraphError, MarkedGraph, Pattern, VertexId,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle failure: {0}")]
pub struct OracleError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcError {
    #[error("the PC algorithm needs at least two variables")]
    TooFewVertices,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("orienting {tail} -> {head} would close a directed cycle")]
    OrientationCycle { tail: String, head: String },
    #[error("pattern and graph have different vertex sets")]
    VertexSetMismatch,
}

/// Conditional-independence queries over a fixed, sorted variable list.
/// Ids passed to [`CiOracle::independent`] index into [`CiOracle::variables`].
pub trait CiOracle: Sync {
    fn variables(&self) -> &[String];

    fn independent(&self, x: VertexId, y: VertexId, given: &[VertexId]) -> Result<bool, OracleError>;

    /// Number of `independent` calls answered so far.
    fn query_count(&self) -> u64;
}

/// Exact oracle answering by d-separation in a DAG, optionally restricted
/// to an observed subset.
#[derive(Debug)]
pub struct DsepOracle<'g> {
    graph: &'g Dag,
    observed: Vec<VertexId>,
    names: Vec<String>,
    method: DsepMethod,
    queries: AtomicU64,
}

impl<'g> DsepOracle<'g> {
    pub fn new(graph: &'g Dag) -> Self {
        let all: Vec<_> = (0..graph.vertex_count()).collect();
        DsepOracle::restricted(graph, &all)
    }

    /// `observed` are graph ids; the oracle's variables are their names in order.
    pub fn restricted(graph: &'g Dag, observed: &[VertexId]) -> Self {
        let mut observed = observed.to_vec();
        observed.sort_unstable();
        observed.dedup();
        let names = observed.iter().map(|&v| graph.name(v).to_string()).collect();
        DsepOracle {
            graph,
            observed,
            names,
            method: DsepMethod::Reach,
            queries: AtomicU64::new(0),
        }
    }

    /// Answers with the given engine instead of reachability.
    pub fn with_method(mut self, method: DsepMethod) -> Self {
        self.method = method;
        self
    }

    /// Graph id of oracle variable `i`.
    pub fn graph_id(&self, i: VertexId) -> VertexId {
        self.observed[i]
    }
}

impl CiOracle for DsepOracle<'_> {
    fn variables(&self) -> &[String] {
        &self.names
    }

    fn independent(&self, x: VertexId, y: VertexId, given: &[VertexId]) -> Result<bool, OracleError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let map = |v: VertexId| {
            self.observed
                .get(v)
                .copied()
                .ok_or_else(|| OracleError(format!("variable #{v} out of range")))
        };
        let s = given.iter().map(|&v| map(v)).collect::<Result<Vec<_>, _>>()?;
        let q = SepQuery::new(self.graph, map(x)?, map(y)?, &s).map_err(|e| OracleError(e.to_string()))?;
        d_separated_with(self.graph, &q, self.method).map_err(|e| OracleError(e.to_string()))
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// How unshielded triples are decided in the collider phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColliderRule {
    /// Query the oracle on every candidate subset containing the middle vertex.
    #[default]
    Exhaustive,
    /// Orient iff the middle vertex is absent from the recorded separating set.
    Sepset,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PcConfig {
    pub collider_rule: ColliderRule,
}

/// Separating set recorded for each deleted pair `(a, b)`, `a < b`.
pub type SepsetLog = BTreeMap<(VertexId, VertexId), Vec<VertexId>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// Edge `a`–`b` deleted given `sepset` at cardinality level `level`.
    Delete {
        a: VertexId,
        b: VertexId,
        sepset: Vec<VertexId>,
        level: usize,
    },
    /// `a -> b <- c` marks added.
    Collider { a: VertexId, b: VertexId, c: VertexId },
    /// Middle vertex outside the candidate set; triple left alone.
    Unorientable { a: VertexId, b: VertexId, c: VertexId },
    /// From `a -> b`, `b -- c` oriented `b -> c`.
    Rule1 { a: VertexId, b: VertexId, c: VertexId },
    /// Directed path `a ~> b` oriented `a -- b` as `a -> b`.
    Rule2 { a: VertexId, b: VertexId },
}

/// Ordered log of deletions and orientations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PcTrace {
    pub events: Vec<TraceEvent>,
}

impl PcTrace {
    /// One line per event: `DEL a b | S={...} | n=2`, `ORIENT a b c | stepC`, ...
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for e in &self.events {
            match e {
                TraceEvent::Delete { a, b, sepset, level } => {
                    let s: Vec<&str> = sepset.iter().map(|&v| names[v].as_str()).collect();
                    let _ = writeln!(
                        out,
                        "DEL {} {} | S={{{}}} | n={level}",
                        names[*a],
                        names[*b],
                        s.join(",")
                    );
                }
                TraceEvent::Collider { a, b, c } => {
                    let _ = writeln!(out, "ORIENT {} {} {} | stepC", names[*a], names[*b], names[*c]);
                }
                TraceEvent::Unorientable { a, b, c } => {
                    let _ = writeln!(out, "SKIP {} {} {} | stepC", names[*a], names[*b], names[*c]);
                }
                TraceEvent::Rule1 { a, b, c } => {
                    let _ = writeln!(
                        out,
                        "ORIENT {} {} | stepD rule1 via {}",
                        names[*b], names[*c], names[*a]
                    );
                }
                TraceEvent::Rule2 { a, b } => {
                    let _ = writeln!(out, "ORIENT {} {} | stepD rule2", names[*a], names[*b]);
                }
            }
        }
        out
    }

    /// Reads a log written by [`PcTrace::render`] over the same names.
    pub fn parse(text: &str, names: &[String]) -> Result<PcTrace, ParseError> {
        let mut events = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || ParseError::syntax(ln, format!("unrecognized trace line `{line}`"));
            let id = |name: &str| {
                names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| ParseError::Graph {
                        line: ln,
                        source: GraphError::UnknownVertex(name.to_string()),
                    })
            };
            let parts: Vec<&str> = line.split(" | ").collect();
            let head: Vec<&str> = parts[0].split_whitespace().collect();
            let event = match (head.as_slice(), &parts[1..]) {
                (["DEL", a, b], [s, n]) => {
                    let inner = s
                        .strip_prefix("S={")
                        .and_then(|r| r.strip_suffix('}'))
                        .ok_or_else(bad)?;
                    let sepset = inner
                        .split(',')
                        .filter(|t| !t.is_empty())
                        .map(id)
                        .collect::<Result<Vec<_>, _>>()?;
                    let level = n
                        .strip_prefix("n=")
                        .and_then(|l| l.parse().ok())
                        .ok_or_else(bad)?;
                    TraceEvent::Delete { a: id(a)?, b: id(b)?, sepset, level }
                }
                (["ORIENT", a, b, c], ["stepC"]) => TraceEvent::Collider { a: id(a)?, b: id(b)?, c: id(c)? },
                (["SKIP", a, b, c], ["stepC"]) => TraceEvent::Unorientable { a: id(a)?, b: id(b)?, c: id(c)? },
                (["ORIENT", b, c], [rest]) => match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
                    ["stepD", "rule1", "via", a] => TraceEvent::Rule1 { a: id(a)?, b: id(b)?, c: id(c)? },
                    ["stepD", "rule2"] => TraceEvent::Rule2 { a: id(b)?, b: id(c)? },
                    _ => return Err(bad()),
                },
                _ => return Err(bad()),
            };
            events.push(event);
        }
        Ok(PcTrace { events })
    }

    /// Rebuilds the output pattern by applying the log to the complete graph.
    pub fn replay(&self, names: &[String]) -> Result<Pattern, GraphError> {
        let mut p = Pattern::complete(names.iter().cloned())?;
        for e in &self.events {
            match *e {
                TraceEvent::Delete { a, b, .. } => p.remove_edge(a, b),
                TraceEvent::Collider { a, b, c } => {
                    p.set_mark(b, a, EndpointMark::Arrow);
                    p.set_mark(b, c, EndpointMark::Arrow);
                }
                TraceEvent::Unorientable { .. } => {}
                TraceEvent::Rule1 { b, c, .. } => p.set_mark(c, b, EndpointMark::Arrow),
                TraceEvent::Rule2 { a, b } => p.set_mark(b, a, EndpointMark::Arrow),
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcOutput {
    pub pattern: Pattern,
    pub sepsets: SepsetLog,
    pub trace: PcTrace,
}

/// Candidate conditioning vertices for `(a, b)` in `c`, ascending.
pub fn candidate_set(c: &Pattern, a: VertexId, b: VertexId) -> Vec<VertexId> {
    adjacent_aux(c, a, b)
        .expect("ids from the pattern")
        .into_iter()
        .filter(|&v| on_simple_path(c, a, b, v))
        .collect()
}

/// Calls `f` on each `k`-subset of `items` in lexicographic order until it
/// returns `Ok(true)`.
fn for_each_subset<E>(
    items: &[VertexId],
    k: usize,
    mut f: impl FnMut(&[VertexId]) -> Result<bool, E>,
) -> Result<bool, E> {
    if k > items.len() {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0; k];
    loop {
        for (slot, &i) in buf.iter_mut().zip(&idx) {
            *slot = items[i];
        }
        if f(&buf)? {
            return Ok(true);
        }
        // rightmost index that can still move
        let m = items.len();
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + m - k {
            i -= 1;
        }
        if i == 0 {
            return Ok(false);
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Skeleton phase: deletes every edge whose endpoints the oracle separates by
/// some candidate subset, in increasing subset cardinality.
pub fn pc_skeleton<O: CiOracle + ?Sized>(oracle: &O) -> Result<(Pattern, SepsetLog, PcTrace), PcError> {
    let names = oracle.variables();
    if names.len() < 2 {
        return Err(PcError::TooFewVertices);
    }
    let mut c = Pattern::complete(names.iter().cloned())?;
    let n = names.len();
    let mut sepsets = SepsetLog::new();
    let mut trace = PcTrace::default();
    let mut level = 0usize;
    loop {
        for a in 0..n {
            for b in a + 1..n {
                if !c.adjacent(a, b) {
                    continue;
                }
                let cand = candidate_set(&c, a, b);
                if cand.len() < level {
                    continue;
                }
                let mut found = None;
                for_each_subset(&cand, level, |s| {
                    if oracle.independent(a, b, s)? {
                        found = Some(s.to_vec());
                        Ok::<bool, OracleError>(true)
                    } else {
                        Ok(false)
                    }
                })?;
                if let Some(s) = found {
                    c.remove_edge(a, b);
                    trace.events.push(TraceEvent::Delete {
                        a,
                        b,
                        sepset: s.clone(),
                        level,
                    });
                    sepsets.insert((a, b), s);
                }
            }
        }
        level += 1;
        let done = (0..n).all(|a| {
            c.neighbors(a)
                .iter()
                .filter(|&&b| a < b)
                .all(|&b| candidate_set(&c, a, b).len() < level)
        });
        if done {
            break;
        }
    }
    Ok((c, sepsets, trace))
}

/// Collider phase over the skeleton `f`. Marks only accumulate, so two
/// triples that disagree about an edge leave it bidirected.
pub fn pc_orient_colliders<O: CiOracle + ?Sized>(
    f: &Pattern,
    oracle: &O,
    sepsets: &SepsetLog,
    trace: &mut PcTrace,
    config: &PcConfig,
) -> Result<Pattern, PcError> {
    let mut p = f.clone();
    let n = f.vertex_count();
    for a in 0..n {
        for c in a + 1..n {
            if f.adjacent(a, c) {
                continue;
            }
            let shared: Vec<VertexId> = f
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&b| f.adjacent(b, c))
                .collect();
            if shared.is_empty() {
                continue;
            }
            let cand = match config.collider_rule {
                ColliderRule::Exhaustive => candidate_set(f, a, c),
                ColliderRule::Sepset => Vec::new(),
            };
            for b in shared {
                let collider = match config.collider_rule {
                    ColliderRule::Sepset => {
                        let s = sepsets.get(&(a, c)).map(Vec::as_slice).unwrap_or(&[]);
                        !s.contains(&b)
                    }
                    ColliderRule::Exhaustive => {
                        if !cand.contains(&b) {
                            trace.events.push(TraceEvent::Unorientable { a, b, c });
                            continue;
                        }
                        !separated_by_superset_of(oracle, a, c, b, &cand)?
                    }
                };
                if collider {
                    p.set_mark(b, a, EndpointMark::Arrow);
                    p.set_mark(b, c, EndpointMark::Arrow);
                    trace.events.push(TraceEvent::Collider { a, b, c });
                }
            }
        }
    }
    Ok(p)
}

/// Whether some subset of `cand` containing `b` separates `a` and `c`.
fn separated_by_superset_of<O: CiOracle + ?Sized>(
    oracle: &O,
    a: VertexId,
    c: VertexId,
    b: VertexId,
    cand: &[VertexId],
) -> Result<bool, OracleError> {
    let rest: Vec<VertexId> = cand.iter().copied().filter(|&v| v != b).collect();
    let mut set = Vec::with_capacity(cand.len());
    for k in 0..=rest.len() {
        let hit = for_each_subset(&rest, k, |s| {
            set.clear();
            set.extend_from_slice(s);
            set.push(b);
            set.sort_unstable();
            oracle.independent(a, c, &set)
        })?;
        if hit {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Propagation phase: applies both orientation rules until no arrowhead
/// can be added. "Directed" means plain-to-arrow edges only.
pub fn pc_orient_propagate(p: &Pattern, trace: &mut PcTrace) -> Result<Pattern, PcError> {
    let mut p = p.clone();
    let n = p.vertex_count();
    loop {
        let mut changed = false;
        for b in 0..n {
            for a in p.neighbors(b).to_vec() {
                if !p.is_directed(a, b) {
                    continue;
                }
                for c in p.neighbors(b).to_vec() {
                    if c != a && p.is_undirected(b, c) && !p.adjacent(a, c) {
                        orient(&mut p, b, c)?;
                        trace.events.push(TraceEvent::Rule1 { a, b, c });
                        changed = true;
                    }
                }
            }
        }
        for a in 0..n {
            for b in p.neighbors(a).to_vec() {
                if a < b && p.is_undirected(a, b) {
                    let (tail, head) = if has_directed_path(&p, a, b) {
                        (a, b)
                    } else if has_directed_path(&p, b, a) {
                        (b, a)
                    } else {
                        continue;
                    };
                    orient(&mut p, tail, head)?;
                    trace.events.push(TraceEvent::Rule2 { a: tail, b: head });
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(p);
        }
    }
}

fn orient(p: &mut Pattern, tail: VertexId, head: VertexId) -> Result<(), PcError> {
    if has_directed_path(p, head, tail) {
        return Err(PcError::OrientationCycle {
            tail: p.name(tail).to_string(),
            head: p.name(head).to_string(),
        });
    }
    p.set_mark(head, tail, EndpointMark::Arrow);
    Ok(())
}

/// The full algorithm with a given configuration.
pub fn pc_with<O: CiOracle + ?Sized>(oracle: &O, config: &PcConfig) -> Result<PcOutput, PcError> {
    let (skeleton, sepsets, mut trace) = pc_skeleton(oracle)?;
    let colliders = pc_orient_colliders(&skeleton, oracle, &sepsets, &mut trace, config)?;
    let pattern = pc_orient_propagate(&colliders, &mut trace)?;
    Ok(PcOutput {
        pattern,
        sepsets,
        trace,
    })
}

pub fn pc<O: CiOracle + ?Sized>(oracle: &O) -> Result<PcOutput, PcError> {
    pc_with(oracle, &PcConfig::default())
}

/// Whether `g` belongs to the set of DAGs `p` represents: same adjacencies,
/// every directed edge of `p` agrees with `g`, and every unshielded collider
/// of `g` is one in `p`.
pub fn pattern_represents(p: &Pattern, g: &Dag) -> Result<bool, PcError> {
    if p.names() != g.names() {
        return Err(PcError::VertexSetMismatch);
    }
    let n = g.vertex_count();
    for v in 0..n {
        if p.neighbors(v) != g.neighbors(v) {
            return Ok(false);
        }
    }
    for a in 0..n {
        for &b in p.neighbors(a) {
            if p.is_directed(a, b) && !g.has_edge(a, b) {
                return Ok(false);
            }
        }
    }
    for (a, b, c) in unshielded_colliders(g) {
        if !(p.arrow_into(a, b) && p.arrow_into(c, b)) {
            return Ok(false);
        }
    }
    Ok(true)
}
