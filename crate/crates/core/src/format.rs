//! Line-oriented text format for DAGs and patterns.
//!
//! ```text
//! # comment
//! node A
//! A -> B
//! B -- C
//! C <-> D
//! observe A B C
//! ```
//!
//! DAG files may only use `->`. A missing `observe` line means every vertex
//! is observed.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{is_valid_name, Dag, EdgeKind, EndpointMark, GraphError, MarkedGraph, Pattern, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Graph { line, .. } => *line,
        }
    }

    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

/// Parsed statements of a graph file, before graph-kind validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphFile {
    /// Vertices in first-mention order.
    pub vertices: Vec<String>,
    /// `(a, b, kind, line)`; for `Directed`, `a` is the tail.
    pub edges: Vec<(String, String, EdgeKind, usize)>,
    /// The `observe` clause, if present.
    pub observed: Option<Vec<String>>,
}

const OPERATORS: [(&str, EdgeKind); 3] = [
    ("<->", EdgeKind::Bidirected),
    ("->", EdgeKind::Directed),
    ("--", EdgeKind::Undirected),
];

impl GraphFile {
    pub fn parse(text: &str) -> Result<GraphFile, ParseError> {
        let mut file = GraphFile::default();
        let mut known = BTreeSet::new();
        let mut observe_line = 0;
        let mut observed_raw: Option<Vec<String>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some((a, b, kind)) = split_edge(content) {
                let a = parse_name(a, line)?;
                let b = parse_name(b, line)?;
                for v in [&a, &b] {
                    if known.insert(v.clone()) {
                        file.vertices.push(v.clone());
                    }
                }
                file.edges.push((a, b, kind, line));
                continue;
            }
            let mut tokens = content.split_whitespace();
            match tokens.next() {
                Some("node") => {
                    let names: Vec<&str> = tokens.collect();
                    if names.is_empty() {
                        return Err(ParseError::syntax(line, "`node` needs a name"));
                    }
                    for n in names {
                        let n = parse_name(n, line)?;
                        if known.insert(n.clone()) {
                            file.vertices.push(n);
                        }
                    }
                }
                Some("observe") => {
                    if observed_raw.is_some() {
                        return Err(ParseError::syntax(line, "repeated `observe` clause"));
                    }
                    let names = tokens
                        .map(|t| parse_name(t, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    observed_raw = Some(names);
                    observe_line = line;
                }
                Some(tok) => {
                    return Err(ParseError::syntax(line, format!("unknown token `{tok}`")));
                }
                None => unreachable!("blank lines skipped"),
            }
        }
        if let Some(obs) = observed_raw {
            let mut seen = BTreeSet::new();
            for n in &obs {
                if !known.contains(n) {
                    return Err(ParseError::Graph {
                        line: observe_line,
                        source: GraphError::UnknownVertex(n.clone()),
                    });
                }
                if !seen.insert(n) {
                    return Err(ParseError::Graph {
                        line: observe_line,
                        source: GraphError::DuplicateVertex(n.clone()),
                    });
                }
            }
            file.observed = Some(obs);
        }
        Ok(file)
    }

    /// Interprets the file as a DAG plus its observed subset (all vertices if absent).
    pub fn into_dag(self) -> Result<(Dag, Vec<VertexId>), ParseError> {
        let mut edges = Vec::new();
        for (a, b, kind, line) in &self.edges {
            if *kind != EdgeKind::Directed {
                return Err(ParseError::syntax(*line, "DAG files may only use `->` edges"));
            }
            edges.push((a.as_str(), b.as_str(), *line));
        }
        let pairs: Vec<(&str, &str)> = edges.iter().map(|(a, b, _)| (*a, *b)).collect();
        let dag = Dag::build(self.vertices.clone(), &pairs).map_err(|e| {
            let line = match &e {
                GraphError::SelfEdge(v) => edges.iter().find(|(a, b, _)| a == v && b == v),
                GraphError::DuplicateEdge(x, y) => edges
                    .iter()
                    .filter(|(a, b, _)| (a == x && b == y) || (a == y && b == x))
                    .nth(1),
                _ => None,
            }
            .map(|(_, _, l)| *l)
            .unwrap_or_else(|| edges.last().map(|e| e.2).unwrap_or(0));
            ParseError::Graph { line, source: e }
        })?;
        let observed = match &self.observed {
            Some(obs) => {
                let mut ids: Vec<_> = obs.iter().map(|n| dag.vertex(n).unwrap()).collect();
                ids.sort_unstable();
                ids
            }
            None => (0..dag.vertex_count()).collect(),
        };
        Ok((dag, observed))
    }

    /// Interprets the file as a pattern. An `observe` clause is rejected.
    pub fn into_pattern(self) -> Result<Pattern, ParseError> {
        if self.observed.is_some() {
            return Err(ParseError::syntax(0, "pattern files cannot carry an `observe` clause"));
        }
        let mut p = Pattern::empty(self.vertices.clone()).map_err(|source| ParseError::Graph { line: 0, source })?;
        for (a, b, kind, line) in &self.edges {
            let (ia, ib) = (p.vertex(a).unwrap(), p.vertex(b).unwrap());
            let (ma, mb) = kind.marks();
            p.add_edge(ia, ib, ma, mb)
                .map_err(|source| ParseError::Graph { line: *line, source })?;
        }
        Ok(p)
    }
}

fn split_edge(content: &str) -> Option<(&str, &str, EdgeKind)> {
    for (op, kind) in OPERATORS {
        if let Some(pos) = content.find(op) {
            return Some((content[..pos].trim(), content[pos + op.len()..].trim(), kind));
        }
    }
    None
}

fn parse_name(token: &str, line: usize) -> Result<String, ParseError> {
    if token.is_empty() {
        return Err(ParseError::syntax(line, "missing vertex name"));
    }
    if !is_valid_name(token) {
        return Err(ParseError::syntax(line, format!("invalid vertex name `{token}`")));
    }
    Ok(token.to_string())
}

/// Reads `key=value` lines, as written by the key=value output modes.
/// Blank lines are skipped; keys keep their order and may repeat.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ParseError::syntax(i + 1, format!("expected key=value, got `{line}`")))?;
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(ParseError::syntax(i + 1, format!("bad key `{k}`")));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn parse_dag(text: &str) -> Result<(Dag, Vec<VertexId>), ParseError> {
    GraphFile::parse(text)?.into_dag()
}

pub fn parse_pattern(text: &str) -> Result<Pattern, ParseError> {
    GraphFile::parse(text)?.into_pattern()
}

/// Renders a single edge in file syntax, tail first for directed edges.
pub fn edge_line<G: MarkedGraph + ?Sized>(g: &G, a: VertexId, b: VertexId) -> String {
    let (ma, mb) = (g.mark(a, b).unwrap(), g.mark(b, a).unwrap());
    let (na, nb) = (g.name(a), g.name(b));
    match (ma, mb) {
        (EndpointMark::Plain, EndpointMark::Plain) => format!("{na} -- {nb}"),
        (EndpointMark::Plain, EndpointMark::Arrow) => format!("{na} -> {nb}"),
        (EndpointMark::Arrow, EndpointMark::Plain) => format!("{nb} -> {na}"),
        (EndpointMark::Arrow, EndpointMark::Arrow) => format!("{na} <-> {nb}"),
    }
}

fn write_graph<G: MarkedGraph + ?Sized>(g: &G) -> String {
    let mut out = String::new();
    for name in g.names() {
        out.push_str("node ");
        out.push_str(name);
        out.push('\n');
    }
    for a in 0..g.vertex_count() {
        for &b in g.neighbors(a) {
            if a < b {
                out.push_str(&edge_line(g, a, b));
                out.push('\n');
            }
        }
    }
    out
}

pub fn write_pattern(p: &Pattern) -> String {
    write_graph(p)
}

/// Writes a DAG; the `observe` clause is emitted only when some vertex is latent.
pub fn write_dag(g: &Dag, observed: &[VertexId]) -> String {
    let mut out = write_graph(g);
    if observed.len() != g.vertex_count() {
        out.push_str("observe");
        for &v in observed {
            out.push(' ');
            out.push_str(g.name(v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_statement_kinds() {
        let text = "# header\nnode Q\nA -> B   # trailing\n  B--C\nC <-> D\nobserve A B C D\n";
        let f = GraphFile::parse(text).unwrap();
        assert_eq!(f.vertices, ["Q", "A", "B", "C", "D"]);
        assert_eq!(f.edges.len(), 3);
        assert_eq!(f.edges[1].2, EdgeKind::Undirected);
        assert_eq!(f.observed.as_deref().unwrap().len(), 4);
    }

    #[test]
    fn dag_files_reject_other_edges() {
        let err = parse_dag("A -> B\nB -- C\n").unwrap_err();
        assert_eq!(err.line(), 2);
    }

    #[test]
    fn unknown_tokens_are_errors() {
        let err = parse_pattern("A -> B\nedge A B\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        assert!(parse_pattern("A -> \n").is_err());
        assert!(parse_dag("A -> B\nobserve A Z\n").is_err());
    }

    #[test]
    fn cycle_reported_with_line() {
        let err = parse_dag("A -> B\nB -> A\n").unwrap_err();
        assert!(matches!(err, ParseError::Graph { line: 2, .. }));
    }

    #[test]
    fn observe_clause() {
        let (g, obs) = parse_dag("A -> X\nT -> X\nT -> Y\nB -> Y\nobserve A X Y B\n").unwrap();
        let names: Vec<_> = obs.iter().map(|&v| g.name(v)).collect();
        assert_eq!(names, ["A", "B", "X", "Y"]);
        let text = write_dag(&g, &obs);
        assert!(text.contains("observe A B X Y"));
        let (g2, obs2) = parse_dag(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(obs, obs2);
    }

    #[test]
    fn pattern_edge_rendering() {
        let p = Pattern::build(
            ["A", "B", "C", "D"],
            &[
                ("B", "A", EdgeKind::Directed),
                ("B", "C", EdgeKind::Undirected),
                ("C", "D", EdgeKind::Bidirected),
            ],
        )
        .unwrap();
        let text = write_pattern(&p);
        assert!(text.contains("B -> A\n"));
        assert!(text.contains("B -- C\n"));
        assert!(text.contains("C <-> D\n"));
        assert_eq!(parse_pattern(&text).unwrap(), p);
    }
}
