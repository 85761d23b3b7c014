//! Host graphs over dense vertex ids, vertex sets, seeded generation and
//! the set-neighbourhood primitives used throughout the crate.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use thiserror::Error;

pub type Vertex = usize;

/// Above this many vertices adjacency rows are kept as sorted lists only.
pub const DENSE_ROW_LIMIT: usize = 1 << 13;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("a generated graph needs at least one vertex")]
    NoVertices,
    #[error("vertex {vertex} is out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex sets overlap at {0}")]
    OverlappingSets(Vertex),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A subset of `[0, universe)` stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    universe: usize,
}

impl VertexSet {
    pub fn new(universe: usize) -> Self {
        VertexSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::new(universe);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_iter<I: IntoIterator<Item = Vertex>>(universe: usize, iter: I) -> Self {
        let mut s = Self::new(universe);
        for v in iter {
            s.insert(v);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.universe % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        v < self.universe && self.words[v >> 6] & (1u64 << (v & 63)) != 0
    }

    /// Inserts `v`, returning whether it was absent. Panics if `v` is out of range.
    #[inline]
    pub fn insert(&mut self, v: Vertex) -> bool {
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        let w = &mut self.words[v >> 6];
        let bit = 1u64 << (v & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: Vertex) -> bool {
        if v >= self.universe {
            return false;
        }
        let w = &mut self.words[v >> 6];
        let bit = 1u64 << (v & 63);
        let present = *w & bit != 0;
        *w &= !bit;
        present
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<Vertex> {
        self.iter().next()
    }

    fn check_universe(&self, other: &VertexSet) {
        assert_eq!(self.universe, other.universe, "vertex sets over different universes");
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.check_universe(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.check_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.check_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// First member shared with `other`.
    pub fn first_common(&self, other: &VertexSet) -> Option<Vertex> {
        self.check_universe(other);
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find_map(|(i, (a, b))| {
                let w = a & b;
                (w != 0).then(|| i * 64 + w.trailing_zeros() as usize)
            })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Seed plus stream id for a ChaCha8 generator. Equal pairs give equal output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        RngSeed { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// An independent substream, e.g. one per trial or per retry.
    pub fn derive(&self, tag: u64) -> RngSeed {
        RngSeed {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(tag.wrapping_add(1))),
        }
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed::new(seed)
    }
}

fn sorted_rows(n: usize, rows: &[Vec<Vertex>]) -> Option<Vec<VertexSet>> {
    (n <= DENSE_ROW_LIMIT).then(|| {
        rows.iter()
            .map(|r| VertexSet::from_iter(n, r.iter().copied()))
            .collect()
    })
}

/// Simple undirected graph on `[0, n)`.
#[derive(Clone)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    rows: Option<Vec<VertexSet>>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edge_count)
            .finish()
    }
}

/// Subgraph induced on a vertex subset, with the map back to parent ids.
#[derive(Clone, Debug)]
pub struct InducedGraph {
    pub graph: Graph,
    pub to_parent: Vec<Vertex>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self::from_adjacency(vec![Vec::new(); n])
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        Self::from_adjacency(adj)
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle edges are valid")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    /// Builds a graph from an edge list; duplicates collapse, self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self::from_adjacency(adj))
    }

    fn from_adjacency(mut adj: Vec<Vec<Vertex>>) -> Self {
        for row in adj.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let rows = sorted_rows(adj.len(), &adj);
        Graph {
            adj,
            rows,
            edge_count,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    /// Bitset row of `N(v)` when the graph is small enough to keep one.
    #[inline]
    pub fn neighbor_row(&self, v: Vertex) -> Option<&VertexSet> {
        self.rows.as_ref().map(|r| &r[v])
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        match &self.rows {
            Some(rows) => rows[u].contains(v),
            None => self.adj[u].binary_search(&v).is_ok(),
        }
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Number of neighbours of `v` inside `set`.
    pub fn degree_into(&self, v: Vertex, set: &VertexSet) -> usize {
        match self.neighbor_row(v) {
            Some(row) => row.intersection_len(set),
            None => self.adj[v].iter().filter(|&&u| set.contains(u)).count(),
        }
    }

    /// `N(S, A)`: vertices of `A` outside `S` adjacent to some member of `S`.
    pub fn neighborhood(&self, s: &VertexSet, a: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        for v in s.iter() {
            match self.neighbor_row(v) {
                Some(row) => out.union_with(row),
                None => {
                    for &u in &self.adj[v] {
                        out.insert(u);
                    }
                }
            }
        }
        out.difference_with(s);
        out.intersect_with(a);
        out
    }

    /// `e(X, Y)` for disjoint `X` and `Y`.
    pub fn edges_between(&self, x: &VertexSet, y: &VertexSet) -> Result<usize, GraphError> {
        if let Some(v) = x.first_common(y) {
            return Err(GraphError::OverlappingSets(v));
        }
        let (small, large) = if x.len() <= y.len() { (x, y) } else { (y, x) };
        Ok(small.iter().map(|v| self.degree_into(v, large)).sum())
    }

    pub fn edges_inside(&self, x: &VertexSet) -> usize {
        x.iter().map(|v| self.degree_into(v, x)).sum::<usize>() / 2
    }

    /// `G[U]`, relabelled to `[0, |U|)` in increasing parent-id order.
    pub fn induced(&self, u: &VertexSet) -> InducedGraph {
        let to_parent = u.to_vec();
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in to_parent.iter().enumerate() {
            index[v] = i;
        }
        let adj = to_parent
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| index[w] != usize::MAX)
                    .map(|&w| index[w])
                    .collect()
            })
            .collect();
        InducedGraph {
            graph: Graph::from_adjacency(adj),
            to_parent,
        }
    }

    /// Edge union of two graphs on the same vertex count.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.n(), other.n());
        let adj = self
            .adj
            .iter()
            .zip(&other.adj)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        Graph::from_adjacency(adj)
    }

    /// BFS distances from `source`, walking only through vertices of `within`
    /// (the source itself need not belong to it). Unreachable entries are `usize::MAX`.
    pub fn bfs_distances(&self, source: Vertex, within: &VertexSet) -> Vec<usize> {
        bfs(self.n(), source, within, |v| &self.adj[v])
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        writeln!(w, "{} {}", self.n(), self.edge_count)?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self, GraphError> {
        let (n, edges) = parse_edge_list(r)?;
        Self::from_edges(n, &edges)
    }
}

pub(crate) fn bfs<'a, F>(n: usize, source: Vertex, within: &VertexSet, next: F) -> Vec<usize>
where
    F: Fn(Vertex) -> &'a [Vertex],
{
    let mut dist = vec![usize::MAX; n];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &u in next(v) {
            if dist[u] == usize::MAX && within.contains(u) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

fn parse_edge_list<R: BufRead>(r: R) -> Result<(usize, Vec<(Vertex, Vertex)>), GraphError> {
    let mut lines = r
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (line, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing \"n m\" header".into(),
    })?;
    let header = header?;
    let nums = parse_numbers(&header, line)?;
    let [n, m] = nums[..] else {
        return Err(GraphError::Parse {
            line,
            msg: "header must be \"n m\"".into(),
        });
    };
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let l = l?;
        let nums = parse_numbers(&l, line)?;
        let [u, v] = nums[..] else {
            return Err(GraphError::Parse {
                line,
                msg: "expected \"u v\"".into(),
            });
        };
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: 1,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Ok((n, edges))
}

pub(crate) fn parse_numbers(line: &str, line_no: usize) -> Result<Vec<usize>, GraphError> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|e| GraphError::Parse {
                line: line_no,
                msg: format!("{t:?}: {e}"),
            })
        })
        .collect()
}

/// Directed graph without self-loops; antiparallel arcs are allowed.
#[derive(Clone)]
pub struct DiGraph {
    out_adj: Vec<Vec<Vertex>>,
    in_adj: Vec<Vec<Vertex>>,
    out_rows: Option<Vec<VertexSet>>,
    in_rows: Option<Vec<VertexSet>>,
    arc_count: usize,
}

impl fmt::Debug for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiGraph")
            .field("n", &self.n())
            .field("arcs", &self.arc_count)
            .finish()
    }
}

impl DiGraph {
    pub fn from_arcs(n: usize, arcs: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut out_adj = vec![Vec::new(); n];
        for &(u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            out_adj[u].push(v);
        }
        Ok(Self::from_out_adjacency(out_adj))
    }

    fn from_out_adjacency(mut out_adj: Vec<Vec<Vertex>>) -> Self {
        let n = out_adj.len();
        let mut in_adj = vec![Vec::new(); n];
        for row in out_adj.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        for (u, row) in out_adj.iter().enumerate() {
            for &v in row {
                in_adj[v].push(u);
            }
        }
        let arc_count = out_adj.iter().map(Vec::len).sum();
        DiGraph {
            out_rows: sorted_rows(n, &out_adj),
            in_rows: sorted_rows(n, &in_adj),
            out_adj,
            in_adj,
            arc_count,
        }
    }

    /// Every ordered pair of distinct vertices is an arc.
    pub fn complete(n: usize) -> Self {
        Self::from_out_adjacency(
            (0..n)
                .map(|v| (0..n).filter(|&u| u != v).collect())
                .collect(),
        )
    }

    /// The directed cycle `0 → 1 → … → n-1 → 0`.
    pub fn cycle(n: usize) -> Self {
        let arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_arcs(n, &arcs).expect("cycle arcs are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    #[inline]
    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out_adj[v]
    }

    #[inline]
    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.in_adj[v]
    }

    #[inline]
    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        match &self.out_rows {
            Some(rows) => rows[u].contains(v),
            None => self.out_adj[u].binary_search(&v).is_ok(),
        }
    }

    pub fn out_row(&self, v: Vertex) -> Option<&VertexSet> {
        self.out_rows.as_ref().map(|r| &r[v])
    }

    pub fn in_row(&self, v: Vertex) -> Option<&VertexSet> {
        self.in_rows.as_ref().map(|r| &r[v])
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&v| (u, v)))
    }

    /// `N⁺(S, A)`.
    pub fn out_neighborhood(&self, s: &VertexSet, a: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        for v in s.iter() {
            for &u in &self.out_adj[v] {
                out.insert(u);
            }
        }
        out.difference_with(s);
        out.intersect_with(a);
        out
    }

    /// `N⁻(S, A)`.
    pub fn in_neighborhood(&self, s: &VertexSet, a: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.n());
        for v in s.iter() {
            for &u in &self.in_adj[v] {
                out.insert(u);
            }
        }
        out.difference_with(s);
        out.intersect_with(a);
        out
    }

    /// The underlying undirected graph.
    pub fn underlying(&self) -> Graph {
        let adj = (0..self.n())
            .map(|v| {
                self.out_adj[v]
                    .iter()
                    .chain(&self.in_adj[v])
                    .copied()
                    .collect()
            })
            .collect();
        Graph::from_adjacency(adj)
    }

    pub fn write_arc_list<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        writeln!(w, "{} {}", self.n(), self.arc_count)?;
        for (u, v) in self.arcs() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_arc_list<R: BufRead>(r: R) -> Result<Self, GraphError> {
        let (n, arcs) = parse_edge_list(r)?;
        Self::from_arcs(n, &arcs)
    }
}

/// Calls `emit(u, v)` for each pair of `[0, n)` with `u > v` kept with
/// probability `p`, skipping geometrically between kept pairs.
fn sample_pairs<R: Rng, F: FnMut(Vertex, Vertex)>(n: usize, p: f64, rng: &mut R, mut emit: F) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(v, w);
            }
        }
        return;
    }
    let skip = Geometric::new(p).expect("0 < p < 1");
    let (mut v, mut w) = (1usize, 0usize);
    let mut first = true;
    loop {
        let gap = skip.sample(rng) as usize;
        w = if first { gap } else { w.saturating_add(1).saturating_add(gap) };
        first = false;
        while v < n && w >= v {
            w -= v;
            v += 1;
        }
        if v >= n {
            break;
        }
        emit(v, w);
    }
}

fn check_probability(n: usize, p: f64) -> Result<(), GraphError> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(GraphError::InvalidProbability(p));
    }
    Ok(())
}

/// Binomial random graph `G(n, p)`.
pub fn gen_gnp(n: usize, p: f64, seed: RngSeed) -> Result<Graph, GraphError> {
    check_probability(n, p)?;
    let mut rng = seed.rng();
    let mut adj = vec![Vec::new(); n];
    sample_pairs(n, p, &mut rng, |u, v| {
        adj[u].push(v);
        adj[v].push(u);
    });
    Ok(Graph::from_adjacency(adj))
}

/// Random digraph where each ordered pair is an arc independently with probability `p`.
pub fn gen_gnp_directed(n: usize, p: f64, seed: RngSeed) -> Result<DiGraph, GraphError> {
    check_probability(n, p)?;
    let mut rng = seed.rng();
    let mut out = vec![Vec::new(); n];
    // Each unordered pair is visited twice, once per orientation.
    sample_pairs(n, p, &mut rng, |u, v| out[u].push(v));
    sample_pairs(n, p, &mut rng, |u, v| out[v].push(u));
    Ok(DiGraph::from_out_adjacency(out))
}

/// Uniformly random tournament: every pair gets exactly one arc.
pub fn gen_tournament(n: usize, seed: RngSeed) -> DiGraph {
    let mut rng = seed.rng();
    let mut out = vec![Vec::new(); n];
    for v in 1..n {
        for u in 0..v {
            if rng.random::<bool>() {
                out[u].push(v);
            } else {
                out[v].push(u);
            }
        }
    }
    DiGraph::from_out_adjacency(out)
}
