//! Independent reference implementations used as test oracles. Nothing here
//! calls the library's algorithms; everything works from the definitions with
//! plain adjacency matrices and bitmasks.

#![allow(dead_code)]

use treeweave::{DiGraph, Graph, Vertex};

/// Dense adjacency matrix of an undirected graph.
pub fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

pub fn arc_matrix(d: &DiGraph) -> Vec<Vec<bool>> {
    let n = d.n();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in d.arcs() {
        m[u][v] = true;
    }
    m
}

fn ceil_cut(m: usize, d: f64) -> usize {
    (m as f64 / (2.0 * d)).ceil() as usize
}

/// Brute-force check of both expansion conditions into `w` (a bitmask), for
/// graphs with at most 20 vertices.
pub fn expands_into(adj: &[Vec<bool>], w: u32, d: f64) -> bool {
    let n = adj.len();
    let cut = ceil_cut(w.count_ones() as usize, d);
    let nbhd = |x: u32| -> u32 {
        let mut out = 0u32;
        for v in 0..n {
            if x >> v & 1 == 1 {
                for u in 0..n {
                    if adj[v][u] {
                        out |= 1 << u;
                    }
                }
            }
        }
        out & !x & w
    };
    for x in 1u32..(1 << n) {
        let size = x.count_ones() as usize;
        if size < cut && (nbhd(x).count_ones() as f64) < d * size as f64 {
            return false;
        }
    }
    if 2 * cut <= n {
        for x in 1u32..(1 << n) {
            if x.count_ones() as usize != cut {
                continue;
            }
            // Y disjoint of the same size with no edge to X.
            let free = !x & ((1u32 << n) - 1) & !nbhd_all(adj, x);
            if (free.count_ones() as usize) >= cut {
                return false;
            }
        }
    }
    true
}

/// All neighbours of `x` (not restricted to any target).
fn nbhd_all(adj: &[Vec<bool>], x: u32) -> u32 {
    let n = adj.len();
    let mut out = 0u32;
    for v in 0..n {
        if x >> v & 1 == 1 {
            for u in 0..n {
                if adj[v][u] {
                    out |= 1 << u;
                }
            }
        }
    }
    out
}

/// Hall's condition with capacities: every subset `S` of the left side has at
/// least `Σ_{i∈S} demand[i]` distinct neighbours.
pub fn hall_holds(adj: &[Vec<usize>], demand: &[usize]) -> bool {
    let k = adj.len();
    assert!(k <= 16);
    for s in 1u32..(1 << k) {
        let mut need = 0;
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..k {
            if s >> i & 1 == 1 {
                need += demand[i];
                seen.extend(adj[i].iter().copied());
            }
        }
        if seen.len() < need {
            return false;
        }
    }
    true
}

/// Whether `map` (guest -> host) is a total, injective, edge-preserving map
/// of the guest edge list into `adj`.
pub fn is_copy(adj: &[Vec<bool>], guest_n: usize, guest_edges: &[(Vertex, Vertex)], map: &[Option<Vertex>]) -> bool {
    if map.len() != guest_n {
        return false;
    }
    let mut seen = vec![false; adj.len()];
    for m in map {
        match m {
            Some(h) if *h < adj.len() && !seen[*h] => seen[*h] = true,
            _ => return false,
        }
    }
    guest_edges.iter().all(|&(a, b)| adj[map[a].unwrap()][map[b].unwrap()])
}

/// Whether some set of vertex-disjoint paths joins every `(x, y, edges)`
/// request with interiors inside `w`, following `adj` as a directed relation
/// (pass a symmetric matrix for undirected graphs). Plain exhaustive search.
pub fn routable(adj: &[Vec<bool>], requests: &[(Vertex, Vertex, usize)], w: u32) -> bool {
    fn go(adj: &[Vec<bool>], reqs: &[(Vertex, Vertex, usize)], i: usize, free: u32) -> bool {
        if i == reqs.len() {
            return true;
        }
        let (x, y, k) = reqs[i];
        walk(adj, reqs, i, x, y, k, free)
    }
    fn walk(adj: &[Vec<bool>], reqs: &[(Vertex, Vertex, usize)], i: usize, at: Vertex, y: Vertex, left: usize, free: u32) -> bool {
        if left == 1 {
            return adj[at][y] && go(adj, reqs, i + 1, free);
        }
        for u in 0..adj.len() {
            if free >> u & 1 == 1 && adj[at][u] && walk(adj, reqs, i, u, y, left - 1, free & !(1 << u)) {
                return true;
            }
        }
        false
    }
    go(adj, requests, 0, w)
}

/// Whether `paths` are vertex-disjoint walks along `adj` (read as a directed
/// relation), path `i` running from `pairs[i].0` to `pairs[i].1` with exactly
/// `l` vertices, and together covering all of `0..n`.
pub fn is_exact_cover(adj: &[Vec<bool>], pairs: &[(Vertex, Vertex)], l: usize, paths: &[Vec<Vertex>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    if paths.len() != pairs.len() {
        return false;
    }
    for (p, &(x, y)) in paths.iter().zip(pairs) {
        if p.len() != l || p[0] != x || p[l - 1] != y {
            return false;
        }
        for &v in p {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        if !p.windows(2).all(|e| adj[e[0]][e[1]]) {
            return false;
        }
    }
    seen.iter().all(|&s| s)
}

/// Whether `vs` is a walk along `adj` with no repeated vertex.
pub fn is_simple_walk(adj: &[Vec<bool>], vs: &[Vertex]) -> bool {
    let mut seen = std::collections::HashSet::new();
    vs.iter().all(|&v| seen.insert(v)) && vs.windows(2).all(|e| adj[e[0]][e[1]])
}
