//! Patterns of a DAG restricted to an observed subset, and the brute-force
//! inducing-path and arrowhead oracles used to validate them.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dsep::{d_separated_sets, DsepError};
use crate::graph::{ancestors, descendants, Dag, GraphError, MarkedGraph, Path, Pattern, VertexId};
use crate::pc::{pc_with, DsepOracle, PcConfig, PcError};

/// Above this many vertices the arrowhead oracle refuses to enumerate.
pub const ORACLE_VERTEX_CAP: usize = 12;

/// Directed-path enumeration for shieldability is used up to this size.
const SHIELD_ENUM_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatentError {
    #[error("at least two observed vertices are required")]
    TooFewObserved,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pc(#[from] PcError),
    #[error(transparent)]
    Dsep(#[from] DsepError),
    #[error("`{0}` is not observed")]
    NotObserved(String),
    #[error("`{s}` is not an ancestor of `{a}`")]
    NotAnAncestor { s: String, a: String },
    #[error("`{0}` and `{1}` are not adjacent in the pattern")]
    NotAdjacentInPattern(String, String),
    #[error("instance has {vertices} vertices; enumeration is capped at {cap}")]
    InstanceTooLarge { vertices: usize, cap: usize },
}

/// A DAG over all variables together with the observed subset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatentInstance {
    graph: Dag,
    observed: Vec<VertexId>,
    is_observed: Vec<bool>,
}

impl LatentInstance {
    pub fn new(graph: Dag, observed: &[VertexId]) -> Result<Self, LatentError> {
        let mut observed = observed.to_vec();
        observed.sort_unstable();
        observed.dedup();
        for &v in &observed {
            graph.check_vertex(v)?;
        }
        if observed.len() < 2 {
            return Err(LatentError::TooFewObserved);
        }
        let mut is_observed = vec![false; graph.vertex_count()];
        for &v in &observed {
            is_observed[v] = true;
        }
        Ok(LatentInstance {
            graph,
            observed,
            is_observed,
        })
    }

    /// Every vertex observed.
    pub fn fully_observed(graph: Dag) -> Result<Self, LatentError> {
        let all: Vec<_> = (0..graph.vertex_count()).collect();
        LatentInstance::new(graph, &all)
    }

    pub fn by_names(graph: Dag, observed: &[&str]) -> Result<Self, LatentError> {
        let ids = observed
            .iter()
            .map(|n| graph.vertex(n))
            .collect::<Result<Vec<_>, _>>()?;
        LatentInstance::new(graph, &ids)
    }

    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    /// Observed graph ids, ascending; position `i` is pattern vertex `i`.
    pub fn observed(&self) -> &[VertexId] {
        &self.observed
    }

    pub fn is_observed(&self, v: VertexId) -> bool {
        self.is_observed[v]
    }

    pub fn latent(&self) -> Vec<VertexId> {
        (0..self.graph.vertex_count())
            .filter(|&v| !self.is_observed[v])
            .collect()
    }

    /// Pattern id of an observed graph vertex.
    pub fn pattern_id(&self, v: VertexId) -> Option<VertexId> {
        self.observed.binary_search(&v).ok()
    }

    /// Graph id of pattern vertex `i`.
    pub fn graph_id(&self, i: VertexId) -> VertexId {
        self.observed[i]
    }

    /// d-separation oracle over the observed variables.
    pub fn oracle(&self) -> DsepOracle<'_> {
        DsepOracle::restricted(&self.graph, &self.observed)
    }

    fn require_observed(&self, v: VertexId) -> Result<VertexId, LatentError> {
        self.graph.check_vertex(v)?;
        self.pattern_id(v)
            .ok_or_else(|| LatentError::NotObserved(self.graph.name(v).to_string()))
    }
}

/// The PC output on the d-separation relations among observed variables.
pub fn restricted_pattern(inst: &LatentInstance) -> Result<Pattern, LatentError> {
    restricted_pattern_with(inst, &PcConfig::default())
}

pub fn restricted_pattern_with(inst: &LatentInstance, config: &PcConfig) -> Result<Pattern, LatentError> {
    Ok(pc_with(&inst.oracle(), config)?.pattern)
}

/// Whether every directed path from ancestor `s` to `a` contains an observed
/// vertex other than `a`.
pub fn shieldable_ancestor(inst: &LatentInstance, s: VertexId, a: VertexId) -> Result<bool, LatentError> {
    let g = &inst.graph;
    g.check_vertex(s)?;
    if !ancestors(g, a)?.contains(&s) {
        return Err(LatentError::NotAnAncestor {
            s: g.name(s).to_string(),
            a: g.name(a).to_string(),
        });
    }
    if g.vertex_count() <= SHIELD_ENUM_CAP {
        Ok(shieldable_by_enumeration(inst, s, a))
    } else {
        Ok(shieldable_by_reach(inst, s, a))
    }
}

/// Checks each directed path from `s` to `a` individually.
pub fn shieldable_by_enumeration(inst: &LatentInstance, s: VertexId, a: VertexId) -> bool {
    fn all_shielded(
        inst: &LatentInstance,
        v: VertexId,
        a: VertexId,
        shielded: bool,
        on_path: &mut [bool],
    ) -> bool {
        if v == a {
            return shielded;
        }
        let shielded = shielded || inst.is_observed[v];
        for w in inst.graph.children(v) {
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            let ok = all_shielded(inst, w, a, shielded, on_path);
            on_path[w] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    let mut on_path = vec![false; inst.graph.vertex_count()];
    on_path[s] = true;
    all_shielded(inst, s, a, false, &mut on_path)
}

/// Not shieldable iff `a` is reachable from a latent `s` through latent
/// vertices only.
pub fn shieldable_by_reach(inst: &LatentInstance, s: VertexId, a: VertexId) -> bool {
    if inst.is_observed[s] {
        return s != a;
    }
    let g = &inst.graph;
    let mut seen = vec![false; g.vertex_count()];
    seen[s] = true;
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for w in g.children(v) {
            if w == a {
                return false;
            }
            if !seen[w] && !inst.is_observed[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    true
}

fn shieldable_ancestor_of(inst: &LatentInstance, s: VertexId, a: VertexId, anc: &[bool]) -> bool {
    anc[s] && (if inst.graph.vertex_count() <= SHIELD_ENUM_CAP {
        shieldable_by_enumeration(inst, s, a)
    } else {
        shieldable_by_reach(inst, s, a)
    })
}

/// All paths in the full graph between observed `a` and `b` on which every
/// observed interior vertex is a collider and every collider is a shieldable
/// ancestor of `a` or `b`. Lexicographic order.
pub fn inducing_paths(inst: &LatentInstance, a: VertexId, b: VertexId) -> Result<Vec<Path>, LatentError> {
    inst.require_observed(a)?;
    inst.require_observed(b)?;
    let g = &inst.graph;
    let n = g.vertex_count();
    if a == b {
        return Ok(Vec::new());
    }
    let to_mask = |set: crate::graph::VertexSet| {
        let mut m = vec![false; n];
        for v in set {
            m[v] = true;
        }
        m
    };
    let anc_a = to_mask(ancestors(g, a)?);
    let anc_b = to_mask(ancestors(g, b)?);
    let allowed_collider: Vec<bool> = (0..n)
        .map(|v| shieldable_ancestor_of(inst, v, a, &anc_a) || shieldable_ancestor_of(inst, v, b, &anc_b))
        .collect();

    struct Walk<'a> {
        inst: &'a LatentInstance,
        target: VertexId,
        allowed_collider: &'a [bool],
        on_path: Vec<bool>,
        stack: Vec<VertexId>,
        out: Vec<Path>,
    }
    impl Walk<'_> {
        fn interior_ok(&self, prev: VertexId, v: VertexId, next: VertexId) -> bool {
            let g = &self.inst.graph;
            let collider = g.arrow_into(prev, v) && g.arrow_into(next, v);
            if collider {
                self.allowed_collider[v]
            } else {
                !self.inst.is_observed[v]
            }
        }
        fn run(&mut self) {
            let cur = *self.stack.last().unwrap();
            let prev = (self.stack.len() >= 2).then(|| self.stack[self.stack.len() - 2]);
            for &w in self.inst.graph.neighbors(cur) {
                if self.on_path[w] {
                    continue;
                }
                if let Some(p) = prev {
                    if !self.interior_ok(p, cur, w) {
                        continue;
                    }
                }
                if w == self.target {
                    let mut p = self.stack.clone();
                    p.push(w);
                    self.out.push(Path::from_trusted(p));
                    continue;
                }
                self.on_path[w] = true;
                self.stack.push(w);
                self.run();
                self.stack.pop();
                self.on_path[w] = false;
            }
        }
    }
    let mut walk = Walk {
        inst,
        target: b,
        allowed_collider: &allowed_collider,
        on_path: vec![false; n],
        stack: vec![a],
        out: Vec::new(),
    };
    walk.on_path[a] = true;
    walk.run();
    Ok(walk.out)
}

pub fn inducing_path_exists(inst: &LatentInstance, a: VertexId, b: VertexId) -> Result<bool, LatentError> {
    Ok(!inducing_paths(inst, a, b)?.is_empty())
}

/// Which clause certified an arrowhead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrowCertificate {
    /// `c` adjacent to `b` but not `a`; both edges induced by paths into `b`.
    InducedCollider { c: VertexId },
    /// `c` has an arrowhead into `a` and `b` descends from `a`.
    Descendant { c: VertexId },
}

/// Evaluates the two-clause arrowhead criterion for the `a`–`b` edge of
/// `pattern` (the restricted pattern of `inst`). Returned `c` ids are graph ids.
pub fn arrowhead_certificate(
    inst: &LatentInstance,
    pattern: &Pattern,
    a: VertexId,
    b: VertexId,
) -> Result<Option<ArrowCertificate>, LatentError> {
    let n = inst.graph.vertex_count();
    if n > ORACLE_VERTEX_CAP {
        return Err(LatentError::InstanceTooLarge {
            vertices: n,
            cap: ORACLE_VERTEX_CAP,
        });
    }
    let (pa, pb) = (inst.require_observed(a)?, inst.require_observed(b)?);
    if !pattern.adjacent(pa, pb) {
        return Err(LatentError::NotAdjacentInPattern(
            pattern.name(pa).to_string(),
            pattern.name(pb).to_string(),
        ));
    }
    let g = &inst.graph;
    let into_b = |paths: &[Path]| {
        paths.iter().any(|p| {
            let vs = p.vertices();
            g.arrow_into(vs[vs.len() - 2], b)
        })
    };
    let ab_into_b = into_b(&inducing_paths(inst, a, b)?);
    if ab_into_b {
        for &pc in pattern.neighbors(pb) {
            if pc == pa || pattern.adjacent(pc, pa) {
                continue;
            }
            let c = inst.graph_id(pc);
            if into_b(&inducing_paths(inst, c, b)?) {
                return Ok(Some(ArrowCertificate::InducedCollider { c }));
            }
        }
    }
    if descendants(g, a)?.contains(&b) {
        for &pc in pattern.neighbors(pa) {
            if pc != pb && pattern.arrow_into(pc, pa) {
                return Ok(Some(ArrowCertificate::Descendant { c: inst.graph_id(pc) }));
            }
        }
    }
    Ok(None)
}

pub fn arrowhead_oracle(
    inst: &LatentInstance,
    pattern: &Pattern,
    a: VertexId,
    b: VertexId,
) -> Result<bool, LatentError> {
    Ok(arrowhead_certificate(inst, pattern, a, b)?.is_some())
}

/// Both sides of the marginal-separation equivalence for one query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationOutcome {
    pub graph_separated: bool,
    pub pattern_separated: bool,
}

impl SeparationOutcome {
    pub fn holds(&self) -> bool {
        self.graph_separated == self.pattern_separated
    }
}

/// Compares d-separation of observed sets in the full graph with
/// d-separation in the restricted pattern. Sets are graph ids.
pub fn separation_outcome(
    inst: &LatentInstance,
    pattern: &Pattern,
    xs: &[VertexId],
    ys: &[VertexId],
    s: &[VertexId],
) -> Result<SeparationOutcome, LatentError> {
    let map = |vs: &[VertexId]| vs.iter().map(|&v| inst.require_observed(v)).collect::<Result<Vec<_>, _>>();
    let (pxs, pys, ps) = (map(xs)?, map(ys)?, map(s)?);
    Ok(SeparationOutcome {
        graph_separated: d_separated_sets(&inst.graph, xs, ys, s)?,
        pattern_separated: d_separated_sets(pattern, &pxs, &pys, &ps)?,
    })
}

/// `true` when the equivalence held on this query.
pub fn separation_preserved(
    inst: &LatentInstance,
    pattern: &Pattern,
    xs: &[VertexId],
    ys: &[VertexId],
    s: &[VertexId],
) -> Result<bool, LatentError> {
    Ok(separation_outcome(inst, pattern, xs, ys, s)?.holds())
}

/// Random instance with `observed + latent` vertices named `V00`, `V01`, ...
/// Each forward pair of a random order becomes an edge with `edge_prob`;
/// `latent` vertices are drawn uniformly to be hidden.
pub fn random_instance(observed: usize, latent: usize, edge_prob: f64, seed: u64) -> LatentInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = observed + latent;
    let names: Vec<String> = (0..n).map(|i| format!("V{i:02}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((order[i], order[j]));
            }
        }
    }
    let dag = Dag::from_ids(names, &edges).expect("forward edges are acyclic");
    let hidden: Vec<usize> = sample(&mut rng, n, latent).into_vec();
    let obs: Vec<usize> = (0..n).filter(|v| !hidden.contains(v)).collect();
    LatentInstance::new(dag, &obs).expect("at least two observed")
}
