//! Exhaustive DAG enumeration, labeled and up to isomorphism.
//!
//! Unlabeled DAGs are represented by an upper-triangular edge code: bit
//! [`pair_bit`]`(n, i, j)` is set when `i -> j` (`i < j`). Every DAG has such
//! a labeling (any topological order), and a code is canonical when no
//! other topological relabeling of it yields a smaller code.

use crate::graph::{Dag, VertexId};

/// Largest vertex count the bit codes support.
pub const MAX_CODE_VERTICES: usize = 11;

/// Bit position of the pair `(i, j)`, `i < j`, in row-major order.
pub fn pair_bit(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// `A`, `B`, ... up to 26 vertices, then `V00`, `V01`, ...
pub fn default_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
    } else {
        (0..n).map(|i| format!("V{i:02}")).collect()
    }
}

/// Builds the DAG of an upper-triangular code with [`default_names`].
pub fn dag_from_code(n: usize, code: u64) -> Dag {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if code >> pair_bit(n, i, j) & 1 == 1 {
                edges.push((i, j));
            }
        }
    }
    Dag::from_ids(default_names(n), &edges).expect("forward edges are acyclic")
}

fn is_acyclic(n: usize, succ: &[u32]) -> bool {
    let mut removed = 0u32;
    for _ in 0..n {
        let full = (1u32 << n) - 1;
        let candidate = (0..n).find(|&v| removed >> v & 1 == 0 && succ[v] & !removed & full == 0);
        match candidate {
            Some(v) => removed |= 1 << v,
            None => return false,
        }
    }
    true
}

/// Calls `f` with the edge list of every labeled DAG on `n` vertices,
/// ordered by the base-3 orientation code of the vertex pairs.
pub fn for_each_labeled_dag(n: usize, mut f: impl FnMut(&[(VertexId, VertexId)])) {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3u64.pow(pairs.len() as u32);
    let mut edges = Vec::with_capacity(pairs.len());
    let mut succ = vec![0u32; n];
    for code in 0..total {
        edges.clear();
        succ.iter_mut().for_each(|s| *s = 0);
        let mut c = code;
        for &(i, j) in &pairs {
            match c % 3 {
                1 => {
                    edges.push((i, j));
                    succ[i] |= 1 << j;
                }
                2 => {
                    edges.push((j, i));
                    succ[j] |= 1 << i;
                }
                _ => {}
            }
            c /= 3;
        }
        if is_acyclic(n, &succ) {
            f(&edges);
        }
    }
}

/// All labeled DAGs on `n` vertices named by [`default_names`].
pub fn labeled_dags(n: usize) -> Vec<Dag> {
    let names = default_names(n);
    let mut out = Vec::new();
    for_each_labeled_dag(n, |edges| {
        out.push(Dag::from_ids(names.clone(), edges).expect("acyclic by construction"));
    });
    out
}

/// Parent bitmask of each vertex in a code.
fn parent_masks(n: usize, code: u64) -> Vec<u32> {
    let mut par = vec![0u32; n];
    for i in 0..n {
        for j in i + 1..n {
            if code >> pair_bit(n, i, j) & 1 == 1 {
                par[j] |= 1 << i;
            }
        }
    }
    par
}

/// Visits every topological order as a position map `pos[v]`. Stops early
/// when `f` returns `false`; returns whether the walk completed.
fn for_each_topological(n: usize, par: &[u32], f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(n: usize, par: &[u32], placed: u32, depth: usize, pos: &mut [usize], f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if depth == n {
            return f(pos);
        }
        for v in 0..n {
            if placed >> v & 1 == 0 && par[v] & !placed == 0 {
                pos[v] = depth;
                if !rec(n, par, placed | 1 << v, depth + 1, pos, f) {
                    return false;
                }
            }
        }
        true
    }
    let mut pos = vec![0; n];
    rec(n, par, 0, 0, &mut pos, f)
}

fn relabel(n: usize, par: &[u32], pos: &[usize]) -> u64 {
    let mut code = 0u64;
    for (j, &pm) in par.iter().enumerate() {
        let mut m = pm;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            code |= 1 << pair_bit(n, pos[i], pos[j]);
        }
    }
    code
}

/// Whether `code` is the least code among all its topological relabelings.
pub fn is_canonical(n: usize, code: u64) -> bool {
    let par = parent_masks(n, code);
    for_each_topological(n, &par, &mut |pos| relabel(n, &par, pos) >= code)
}

/// Canonical codes of every DAG on `n` vertices up to isomorphism, ascending.
pub fn canonical_codes(n: usize) -> Vec<u64> {
    assert!(n <= MAX_CODE_VERTICES, "codes limited to {MAX_CODE_VERTICES} vertices");
    let bits = n * n.saturating_sub(1) / 2;
    (0..1u64 << bits).filter(|&c| is_canonical(n, c)).collect()
}

/// Vertex permutations (as position maps) fixing the code.
pub fn automorphisms(n: usize, code: u64) -> Vec<Vec<usize>> {
    let par = parent_masks(n, code);
    let mut out = Vec::new();
    for_each_topological(n, &par, &mut |pos| {
        if relabel(n, &par, pos) == code {
            out.push(pos.to_vec());
        }
        true
    });
    out
}

/// `k`-subsets of `0..n` as bitmasks, ascending, keeping one per orbit of
/// the given automorphism group (the least mask of each orbit).
pub fn canonical_subsets(n: usize, k: usize, automorphisms: &[Vec<usize>]) -> Vec<u32> {
    let image = |mask: u32, pos: &[usize]| {
        (0..n).filter(|&v| mask >> v & 1 == 1).fold(0u32, |m, v| m | 1 << pos[v])
    };
    (0..1u32 << n)
        .filter(|m| m.count_ones() as usize == k)
        .filter(|&m| automorphisms.iter().all(|pos| image(m, pos) >= m))
        .collect()
}
