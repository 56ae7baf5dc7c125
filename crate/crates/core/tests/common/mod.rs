//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use latentpc::graph::{Dag, EndpointMark, MarkedGraph, Pattern, VertexId};
use proptest::prelude::*;

/// d-separation in a DAG via the moralized ancestral graph: `x` and `y`
/// are separated by `s` iff they are disconnected after moralizing the
/// subgraph on the ancestors of `{x, y} ∪ s` and deleting `s`.
pub fn moral_separated(g: &Dag, x: VertexId, y: VertexId, s: &[VertexId]) -> bool {
    let n = g.vertex_count();
    let mut keep = vec![false; n];
    let mut stack: Vec<VertexId> = s.iter().copied().chain([x, y]).collect();
    while let Some(v) = stack.pop() {
        if !keep[v] {
            keep[v] = true;
            stack.extend(g.parents(v));
        }
    }
    let mut adj = vec![vec![false; n]; n];
    for v in (0..n).filter(|&v| keep[v]) {
        let ps = g.parents(v);
        for &p in &ps {
            adj[p][v] = true;
            adj[v][p] = true;
        }
        for &p in &ps {
            for &q in &ps {
                if p != q {
                    adj[p][q] = true;
                }
            }
        }
    }
    let mut blocked = vec![false; n];
    for &v in s {
        blocked[v] = true;
    }
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        if v == y {
            return false;
        }
        for w in 0..n {
            if adj[v][w] && keep[w] && !blocked[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    true
}

/// Skeleton of a DAG as sorted pairs.
pub fn skeleton(g: &Dag) -> Vec<(VertexId, VertexId)> {
    let mut e: Vec<_> = g.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    e.sort();
    e
}

pub fn pattern_skeleton(p: &Pattern) -> Vec<(VertexId, VertexId)> {
    let mut e: Vec<_> = p.edges().into_iter().map(|(a, b, _, _)| (a.min(b), a.max(b))).collect();
    e.sort();
    e
}

/// Unshielded colliders `a -> b <- c`, `a < c`, read off the DAG.
pub fn dag_v_structures(g: &Dag) -> Vec<(VertexId, VertexId, VertexId)> {
    let mut out = Vec::new();
    for b in 0..g.vertex_count() {
        let ps = g.parents(b);
        for (i, &a) in ps.iter().enumerate() {
            for &c in &ps[i + 1..] {
                if !g.has_edge(a, c) && !g.has_edge(c, a) {
                    out.push((a.min(c), b, a.max(c)));
                }
            }
        }
    }
    out.sort();
    out
}

/// Brute-force: does any simple path from `x` to `y` step only along edges
/// whose mark at the near end is Plain?
pub fn brute_semi_directed(p: &Pattern, x: VertexId, y: VertexId) -> bool {
    fn go(p: &Pattern, v: VertexId, y: VertexId, seen: &mut Vec<bool>) -> bool {
        if v == y {
            return true;
        }
        for &w in p.neighbors(v) {
            if !seen[w] && p.mark(v, w) == Some(EndpointMark::Plain) {
                seen[w] = true;
                if go(p, w, y, seen) {
                    return true;
                }
                seen[w] = false;
            }
        }
        false
    }
    let mut seen = vec![false; p.vertex_count()];
    seen[x] = true;
    go(p, x, y, &mut seen)
}

/// Directed reachability by repeated squaring of the adjacency relation.
pub fn brute_directed_path(g: &Dag, x: VertexId, y: VertexId) -> bool {
    let n = g.vertex_count();
    let mut reach = vec![vec![false; n]; n];
    for (a, b) in g.edges() {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    reach[x][y]
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("V{i:02}")).collect()
}

/// Random DAGs: a permutation of `0..n` and a forward-edge mask.
pub fn arb_dag(max_n: usize) -> impl Strategy<Value = Dag> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(proptest::bool::weighted(0.35), pairs),
        )
            .prop_map(|(n, order, bits)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k] {
                            edges.push((order[i], order[j]));
                        }
                        k += 1;
                    }
                }
                Dag::from_ids(names(n), &edges).unwrap()
            })
    })
}

/// A DAG with a nonempty observed subset of size at least two.
pub fn arb_instance(max_n: usize) -> impl Strategy<Value = (Dag, Vec<VertexId>)> {
    arb_dag(max_n).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), proptest::collection::vec(any::<bool>(), n)).prop_map(|(g, hide)| {
            let mut obs: Vec<_> = (0..g.vertex_count()).filter(|&v| !hide[v]).collect();
            if obs.len() < 2 {
                obs = vec![0, 1];
            }
            (g, obs)
        })
    })
}

/// Random patterns with arbitrary marks.
pub fn arb_pattern(max_n: usize) -> impl Strategy<Value = Pattern> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(0u8..6, pairs).prop_map(move |codes| {
            let mut p = Pattern::empty(names(n)).unwrap();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let (ma, mb) = match codes[k] {
                        0 | 1 => (None, None),
                        2 => (Some(EndpointMark::Plain), Some(EndpointMark::Plain)),
                        3 => (Some(EndpointMark::Plain), Some(EndpointMark::Arrow)),
                        4 => (Some(EndpointMark::Arrow), Some(EndpointMark::Plain)),
                        _ => (Some(EndpointMark::Arrow), Some(EndpointMark::Arrow)),
                    };
                    if let (Some(ma), Some(mb)) = (ma, mb) {
                        p.add_edge(i, j, ma, mb).unwrap();
                    }
                    k += 1;
                }
            }
            p
        })
    })
}
