//! Causal claims read off a pattern. Every verdict carries the path, edge or
//! failed premise that produced it.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::graph::{triangle_witness, EndpointMark, GraphError, MarkedGraph, Path, Pattern, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClaimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cause and effect are the same vertex `{0}`")]
    SameVertex(String),
}

/// How the anchoring premise "some C has an arrowhead into X" is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PremiseReading {
    /// `C ∘→ X`: any edge with an arrowhead at X, including `C <-> X`.
    #[default]
    ArrowInto,
    /// Only `C -> X`.
    Directed,
}

impl PremiseReading {
    fn anchors(self, p: &Pattern, c: VertexId, x: VertexId) -> bool {
        match self {
            PremiseReading::ArrowInto => p.arrow_into(c, x),
            PremiseReading::Directed => p.is_directed(c, x),
        }
    }
}

/// Which rule a claim is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimRule {
    /// No semi-directed path means no causal influence.
    NotACause,
    /// Anchored single directed edge outside any triangle.
    Edge,
    /// Anchored directed path with no triangle on any edge.
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    DefiniteCause,
    NotACause,
    Undetermined,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::DefiniteCause => "DefiniteCause",
            VerdictKind::NotACause => "NotACause",
            VerdictKind::Undetermined => "Undetermined",
        })
    }
}

/// The premise that was not met.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailedPremise {
    NoDirectedEdge,
    InTriangle { third: VertexId },
    NoAnchor,
    NoTriangleFreePath,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A semi-directed path exists, so absence of influence is not implied.
    SemiDirectedPath(Path),
    NoSemiDirectedPath,
    /// Anchor `c` and the directed edge or path from cause to effect.
    Anchored { anchor: VertexId, path: Path },
    Premise(FailedPremise),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimVerdict {
    pub kind: VerdictKind,
    pub cause: VertexId,
    pub effect: VertexId,
    pub witness: Witness,
}

impl ClaimVerdict {
    fn undetermined(cause: VertexId, effect: VertexId, why: FailedPremise) -> Self {
        ClaimVerdict {
            kind: VerdictKind::Undetermined,
            cause,
            effect,
            witness: Witness::Premise(why),
        }
    }

    /// One-line description, e.g. `DefiniteCause; witness: C=A, edge X->Z`.
    pub fn render<G: MarkedGraph + ?Sized>(&self, g: &G) -> String {
        let (x, z) = (g.name(self.cause), g.name(self.effect));
        let arrows = |p: &Path| {
            p.vertices()
                .iter()
                .map(|&v| g.name(v))
                .collect::<Vec<_>>()
                .join("->")
        };
        let body = match &self.witness {
            Witness::SemiDirectedPath(p) => format!("witness: semi-directed path {}", arrows(p)),
            Witness::NoSemiDirectedPath => format!("witness: no semi-directed path from {x} to {z}"),
            Witness::Anchored { anchor, path } if path.len() == 2 => {
                format!("witness: C={}, edge {}", g.name(*anchor), arrows(path))
            }
            Witness::Anchored { anchor, path } => {
                format!("witness: C={}, path {}", g.name(*anchor), arrows(path))
            }
            Witness::Premise(FailedPremise::NoDirectedEdge) => {
                format!("premise failed: no edge {x}->{z}")
            }
            Witness::Premise(FailedPremise::InTriangle { third }) => {
                format!("premise failed: {x}, {z}, {} form a triangle", g.name(*third))
            }
            Witness::Premise(FailedPremise::NoAnchor) => {
                format!("premise failed: no arrowhead into {x} from another vertex")
            }
            Witness::Premise(FailedPremise::NoTriangleFreePath) => {
                format!("premise failed: no triangle-free directed path {x}->...->{z}")
            }
        };
        format!("{}; {body}", self.kind)
    }
}

fn check_pair(p: &Pattern, x: VertexId, y: VertexId) -> Result<(), ClaimError> {
    p.check_vertex(x)?;
    p.check_vertex(y)?;
    if x == y {
        return Err(ClaimError::SameVertex(p.name(x).to_string()));
    }
    Ok(())
}

/// Lexicographically smallest among the shortest paths from `x` to `y`
/// whose steps `a -> b` satisfy `step(a, b)`.
pub(crate) fn shortest_path(
    p: &Pattern,
    x: VertexId,
    y: VertexId,
    step: impl Fn(VertexId, VertexId) -> bool,
) -> Option<Path> {
    let n = p.vertex_count();
    let mut dist = vec![usize::MAX; n];
    dist[y] = 0;
    let mut queue = VecDeque::from([y]);
    while let Some(v) = queue.pop_front() {
        for &u in p.neighbors(v) {
            if dist[u] == usize::MAX && step(u, v) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist[x] == usize::MAX {
        return None;
    }
    let mut path = vec![x];
    let mut cur = x;
    while cur != y {
        cur = *p
            .neighbors(cur)
            .iter()
            .find(|&&w| dist[w] != usize::MAX && dist[w] + 1 == dist[cur] && step(cur, w))
            .expect("distance labels are consistent");
        path.push(cur);
    }
    Some(Path::from_trusted(path))
}

/// A path from `x` to `y` with no arrowhead at the near end of any edge,
/// so each step is `a -> b` or `a -- b`. Returns the lexicographically least
/// shortest one.
pub fn semi_directed_path(p: &Pattern, x: VertexId, y: VertexId) -> Result<Option<Path>, ClaimError> {
    check_pair(p, x, y)?;
    Ok(shortest_path(p, x, y, |a, b| p.mark(a, b) == Some(EndpointMark::Plain)))
}

pub fn semi_directed_path_exists(p: &Pattern, x: VertexId, y: VertexId) -> Result<bool, ClaimError> {
    Ok(semi_directed_path(p, x, y)?.is_some())
}

/// `NotACause` when no semi-directed path leads from `x` to `y`.
pub fn not_a_cause(p: &Pattern, x: VertexId, y: VertexId) -> Result<ClaimVerdict, ClaimError> {
    let path = semi_directed_path(p, x, y)?;
    Ok(match path {
        None => ClaimVerdict {
            kind: VerdictKind::NotACause,
            cause: x,
            effect: y,
            witness: Witness::NoSemiDirectedPath,
        },
        Some(path) => ClaimVerdict {
            kind: VerdictKind::Undetermined,
            cause: x,
            effect: y,
            witness: Witness::SemiDirectedPath(path),
        },
    })
}

fn find_anchor(p: &Pattern, x: VertexId, not: VertexId, reading: PremiseReading) -> Option<VertexId> {
    p.neighbors(x)
        .iter()
        .copied()
        .find(|&c| c != not && reading.anchors(p, c, x))
}

/// `DefiniteCause` for `x -> z` outside every triangle, anchored by some
/// `c != z` with an arrowhead into `x`.
pub fn definite_cause_edge(
    p: &Pattern,
    x: VertexId,
    z: VertexId,
    reading: PremiseReading,
) -> Result<ClaimVerdict, ClaimError> {
    check_pair(p, x, z)?;
    if !p.is_directed(x, z) {
        return Ok(ClaimVerdict::undetermined(x, z, FailedPremise::NoDirectedEdge));
    }
    if let Some(third) = triangle_witness(p, x, z)? {
        return Ok(ClaimVerdict::undetermined(x, z, FailedPremise::InTriangle { third }));
    }
    let Some(anchor) = find_anchor(p, x, z, reading) else {
        return Ok(ClaimVerdict::undetermined(x, z, FailedPremise::NoAnchor));
    };
    Ok(ClaimVerdict {
        kind: VerdictKind::DefiniteCause,
        cause: x,
        effect: z,
        witness: Witness::Anchored {
            anchor,
            path: Path::from_trusted(vec![x, z]),
        },
    })
}

/// The shortest lexicographically least directed path from `x` to `z`
/// none of whose edges lies in a triangle.
pub fn triangle_free_directed_path(p: &Pattern, x: VertexId, z: VertexId) -> Result<Option<Path>, ClaimError> {
    check_pair(p, x, z)?;
    Ok(shortest_path(p, x, z, |a, b| {
        p.is_directed(a, b) && matches!(triangle_witness(p, a, b), Ok(None))
    }))
}

/// `DefiniteCause` for a triangle-free directed path from `x` to `z` with
/// an anchor into `x`.
pub fn definite_cause_path(
    p: &Pattern,
    x: VertexId,
    z: VertexId,
    reading: PremiseReading,
) -> Result<ClaimVerdict, ClaimError> {
    let Some(path) = triangle_free_directed_path(p, x, z)? else {
        return Ok(ClaimVerdict::undetermined(x, z, FailedPremise::NoTriangleFreePath));
    };
    let Some(anchor) = find_anchor(p, x, path.vertices()[1], reading) else {
        return Ok(ClaimVerdict::undetermined(x, z, FailedPremise::NoAnchor));
    };
    Ok(ClaimVerdict {
        kind: VerdictKind::DefiniteCause,
        cause: x,
        effect: z,
        witness: Witness::Anchored { anchor, path },
    })
}

pub fn evaluate_claim(
    p: &Pattern,
    x: VertexId,
    z: VertexId,
    rule: ClaimRule,
    reading: PremiseReading,
) -> Result<ClaimVerdict, ClaimError> {
    match rule {
        ClaimRule::NotACause => not_a_cause(p, x, z),
        ClaimRule::Edge => definite_cause_edge(p, x, z, reading),
        ClaimRule::Path => definite_cause_path(p, x, z, reading),
    }
}

/// Tries the path rule, then the edge rule, then the no-influence rule, and
/// reports the first determined verdict. When none applies the no-influence
/// rule's verdict, with its semi-directed path, is returned.
pub fn evaluate_auto(
    p: &Pattern,
    x: VertexId,
    z: VertexId,
    reading: PremiseReading,
) -> Result<ClaimVerdict, ClaimError> {
    for rule in [ClaimRule::Path, ClaimRule::Edge] {
        let v = evaluate_claim(p, x, z, rule, reading)?;
        if v.kind != VerdictKind::Undetermined {
            return Ok(v);
        }
    }
    not_a_cause(p, x, z)
}
