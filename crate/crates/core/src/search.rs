//! Bounded exhaustive search for instances where the strengthened
//! directed-path premise holds on the restricted pattern although the
//! generating DAG has no directed path.
//!
//! Instances are visited by vertex count, then latent count, then canonical
//! DAG code, then latent mask, all ascending; the first hit in that order is
//! returned regardless of which worker finds it first.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::claims::shortest_path;
use crate::dsep::DsepMethod;
use crate::enumerate::{automorphisms, canonical_codes, canonical_subsets, dag_from_code, MAX_CODE_VERTICES};
use crate::format::{parse_dag, parse_pattern, write_dag, write_pattern, ParseError};
use crate::graph::{descendants, has_directed_path, triangle_witness, Dag, GraphError, MarkedGraph, Path, Pattern, VertexId};
use crate::pc::{pc, DsepOracle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("max-vertices must be between 4 and {MAX_CODE_VERTICES}, got {0}")]
    InvalidBounds(usize),
    #[error("no counterexample within bounds ({instances} instances searched, {skipped} skipped on orientation errors)")]
    NotFoundWithinBounds { instances: u64, skipped: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("report section [{section}]: {source}")]
    Parse {
        section: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("report: {0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("report does not verify: {0}")]
    Verification(String),
}

/// A DAG with observed subset, its restricted pattern, and a directed
/// pattern path from `x` to `z` meeting the strengthened premise while `g`
/// has no directed path `x ⇝ z`. Claim fields are pattern ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub graph: Dag,
    pub observed: Vec<VertexId>,
    pub pattern: Pattern,
    pub x: VertexId,
    pub z: VertexId,
    pub path: Path,
    /// Vertex with an arrowhead into `x`, other than the path's second vertex.
    pub anchor: VertexId,
}

/// Position of the returned instance in the search order, or coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub vertices: usize,
    pub latents: usize,
    /// Instances visited up to and including the hit.
    pub instances: u64,
}

struct Hit {
    x: VertexId,
    z: VertexId,
    path: Path,
    anchor: VertexId,
}

fn anchor_into(p: &Pattern, a: VertexId, not: VertexId) -> Option<VertexId> {
    p.neighbors(a).iter().copied().find(|&c| c != not && p.arrow_into(c, a))
}

fn find_hit(g: &Dag, observed: &[VertexId], p: &Pattern) -> Option<Hit> {
    let n = p.vertex_count();
    for x in 0..n {
        for z in 0..n {
            if x == z || has_directed_path(g, observed[x], observed[z]) {
                continue;
            }
            // interior edges are anchored by their predecessor, so only the
            // first edge needs a separate anchor
            let path = shortest_path(p, x, z, |a, b| {
                p.is_directed(a, b) && (a != x || anchor_into(p, x, b).is_some())
            });
            if let Some(path) = path {
                let anchor = anchor_into(p, x, path.vertices()[1]).unwrap();
                return Some(Hit { x, z, path, anchor });
            }
        }
    }
    None
}

enum Outcome {
    Skipped,
    Clean,
    Found(Box<CounterexampleReport>),
}

fn check_instance(n: usize, code: u64, latent_mask: u32) -> Outcome {
    let graph = dag_from_code(n, code);
    let observed: Vec<VertexId> = (0..n).filter(|&v| latent_mask >> v & 1 == 0).collect();
    let Ok(out) = pc(&DsepOracle::restricted(&graph, &observed)) else {
        return Outcome::Skipped;
    };
    match find_hit(&graph, &observed, &out.pattern) {
        None => Outcome::Clean,
        Some(hit) => Outcome::Found(Box::new(CounterexampleReport {
            graph,
            observed,
            pattern: out.pattern,
            x: hit.x,
            z: hit.z,
            path: hit.path,
            anchor: hit.anchor,
        })),
    }
}

/// Instances of one (vertex count, latent count) layer in search order.
pub fn layer(n: usize, k: usize) -> Vec<(u64, u32)> {
    canonical_codes(n)
        .into_par_iter()
        .flat_map_iter(|code| {
            let auts = automorphisms(n, code);
            canonical_subsets(n, k, &auts).into_iter().map(move |m| (code, m))
        })
        .collect()
}

/// Searches DAGs with up to `max_vertices` vertices and up to `max_latents`
/// latent vertices (at least three observed). Runs on the current rayon pool.
pub fn search_counterexample(
    max_vertices: usize,
    max_latents: usize,
) -> Result<(CounterexampleReport, SearchStats), SearchError> {
    if !(4..=MAX_CODE_VERTICES).contains(&max_vertices) {
        return Err(SearchError::InvalidBounds(max_vertices));
    }
    let mut instances = 0u64;
    let mut skipped = 0u64;
    for n in 3..=max_vertices {
        for k in 0..=max_latents.min(n - 3) {
            let items = layer(n, k);
            let outcomes: Vec<Outcome> = items
                .par_iter()
                .map(|&(code, mask)| check_instance(n, code, mask))
                .collect();
            for (i, o) in outcomes.into_iter().enumerate() {
                match o {
                    Outcome::Found(report) => {
                        let stats = SearchStats {
                            vertices: n,
                            latents: k,
                            instances: instances + i as u64 + 1,
                        };
                        return Ok((*report, stats));
                    }
                    Outcome::Skipped => skipped += 1,
                    Outcome::Clean => {}
                }
            }
            instances += items.len() as u64;
        }
    }
    Err(SearchError::NotFoundWithinBounds { instances, skipped })
}

impl CounterexampleReport {
    /// Graph id of a pattern vertex.
    pub fn graph_id(&self, v: VertexId) -> VertexId {
        self.observed[v]
    }

    /// A triangle `(a, b, third)` through some edge of the path, if any.
    pub fn triangle_on_path(&self) -> Option<(VertexId, VertexId, VertexId)> {
        self.path.vertices().windows(2).find_map(|w| {
            triangle_witness(&self.pattern, w[0], w[1])
                .ok()
                .flatten()
                .map(|t| (w[0], w[1], t))
        })
    }
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.pattern;
        writeln!(f, "[graph]")?;
        f.write_str(&write_dag(&self.graph, &self.observed))?;
        writeln!(f, "[pattern]")?;
        f.write_str(&write_pattern(p))?;
        writeln!(f, "[claim]")?;
        writeln!(f, "from = {}", p.name(self.x))?;
        writeln!(f, "to = {}", p.name(self.z))?;
        writeln!(f, "path = {}", self.path.display(p))?;
        writeln!(f, "anchor = {}", p.name(self.anchor))
    }
}

/// Parses a report written by its `Display` impl.
pub fn parse_report(text: &str) -> Result<CounterexampleReport, ReportError> {
    let mut sections: [(&'static str, String, bool); 3] = [
        ("graph", String::new(), false),
        ("pattern", String::new(), false),
        ("claim", String::new(), false),
    ];
    let mut current: Option<usize> = None;
    for line in text.lines() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let idx = sections
                .iter()
                .position(|s| s.0 == name)
                .ok_or_else(|| ReportError::Format(format!("unknown section [{name}]")))?;
            if sections[idx].2 {
                return Err(ReportError::Format(format!("repeated section [{name}]")));
            }
            sections[idx].2 = true;
            current = Some(idx);
            continue;
        }
        match current {
            Some(i) => {
                sections[i].1.push_str(line);
                sections[i].1.push('\n');
            }
            None if t.is_empty() || t.starts_with('#') => {}
            None => return Err(ReportError::Format("content before first section".into())),
        }
    }
    if let Some(missing) = sections.iter().find(|s| !s.2) {
        return Err(ReportError::Format(format!("missing section [{}]", missing.0)));
    }
    let (graph, observed) = parse_dag(&sections[0].1).map_err(|source| ReportError::Parse { section: "graph", source })?;
    let pattern = parse_pattern(&sections[1].1).map_err(|source| ReportError::Parse {
        section: "pattern",
        source,
    })?;

    let mut fields: [(&str, Option<String>); 4] = [("from", None), ("to", None), ("path", None), ("anchor", None)];
    for line in sections[2].1.lines() {
        let t = line.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| ReportError::Format(format!("expected key = value, got `{t}`")))?;
        let slot = fields
            .iter_mut()
            .find(|f| f.0 == k.trim())
            .ok_or_else(|| ReportError::Format(format!("unknown claim key `{}`", k.trim())))?;
        slot.1 = Some(v.trim().to_string());
    }
    let get = |i: usize| {
        fields[i]
            .1
            .clone()
            .ok_or_else(|| ReportError::Format(format!("missing claim key `{}`", fields[i].0)))
    };
    let x = pattern.vertex(&get(0)?)?;
    let z = pattern.vertex(&get(1)?)?;
    let ids = get(2)?
        .split_whitespace()
        .map(|n| pattern.vertex(n))
        .collect::<Result<Vec<_>, _>>()?;
    let path = Path::new(&pattern, ids)?;
    let anchor = pattern.vertex(&get(3)?)?;
    Ok(CounterexampleReport {
        graph,
        observed,
        pattern,
        x,
        z,
        path,
        anchor,
    })
}

/// Re-checks a report from scratch: the pattern is recomputed with the
/// enumeration d-separation engine, every path edge is checked for
/// direction and anchoring, and non-causation is checked via descendants.
pub fn verify_report(r: &CounterexampleReport) -> Result<(), ReportError> {
    let fail = |m: String| Err(ReportError::Verification(m));
    let g = &r.graph;
    let p = &r.pattern;
    let names: Vec<&str> = r.observed.iter().map(|&v| g.name(v)).collect();
    if p.names().iter().map(String::as_str).ne(names.iter().copied()) {
        return fail("pattern vertices are not the observed graph vertices".into());
    }
    let oracle = DsepOracle::restricted(g, &r.observed).with_method(DsepMethod::Enumerate);
    let recomputed = pc(&oracle).map_err(|e| ReportError::Verification(e.to_string()))?.pattern;
    if &recomputed != p {
        return fail("stored pattern differs from the recomputed restricted pattern".into());
    }
    let vs = r.path.vertices();
    if vs.len() < 2 || vs[0] != r.x || vs[vs.len() - 1] != r.z {
        return fail("path does not run from `from` to `to`".into());
    }
    for w in vs.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !p.is_directed(a, b) {
            return fail(format!("{} -> {} is not a directed pattern edge", p.name(a), p.name(b)));
        }
        let anchored = p.neighbors(a).iter().any(|&c| c != b && p.arrow_into(c, a));
        if !anchored {
            return fail(format!("no arrowhead into {} other than from {}", p.name(a), p.name(b)));
        }
    }
    if r.anchor == vs[1] || !p.arrow_into(r.anchor, r.x) {
        return fail("anchor has no arrowhead into `from`".into());
    }
    let (gx, gz) = (r.graph_id(r.x), r.graph_id(r.z));
    if descendants(g, gx)?.contains(&gz) {
        return fail(format!("{} is an ancestor of {} in the graph", g.name(gx), g.name(gz)));
    }
    Ok(())
}
