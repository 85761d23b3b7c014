//! Vertex-disjoint paths of exactly prescribed lengths (and, in digraphs,
//! prescribed arc directions) between given endpoint pairs.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::expansion::{random_partition, split_target, CheckConfig, ExpansionError};
use crate::graph::{DiGraph, Graph, RngSeed, Vertex, VertexSet};
use crate::matching::generalized_matching;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("bad request {index}: {reason}")]
    BadRequest { index: usize, reason: String },
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("no request could be routed within the search budget")]
    NoPathFound,
    #[error("stage {alpha} stalled with {surviving} pairs left (bound {bound:.2})")]
    StageStalled {
        alpha: usize,
        surviving: usize,
        bound: f64,
    },
    #[error(transparent)]
    Split(#[from] ExpansionError),
}

/// Direction of one step along a path in a digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    /// `v_i → v_{i+1}`.
    Forward,
    /// `v_{i+1} → v_i`.
    Backward,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRequest {
    pub x: Vertex,
    pub y: Vertex,
    /// Exact length in edges.
    pub k: usize,
    pub orientations: Option<Vec<Dir>>,
}

impl PathRequest {
    pub fn new(x: Vertex, y: Vertex, k: usize) -> Self {
        PathRequest {
            x,
            y,
            k,
            orientations: None,
        }
    }

    pub fn oriented(x: Vertex, y: Vertex, orientations: Vec<Dir>) -> Self {
        PathRequest {
            x,
            y,
            k: orientations.len(),
            orientations: Some(orientations),
        }
    }

    /// A directed path `x → … → y` of length `k`.
    pub fn forward(x: Vertex, y: Vertex, k: usize) -> Self {
        Self::oriented(x, y, vec![Dir::Forward; k])
    }

    fn dirs(&self) -> Vec<Dir> {
        self.orientations
            .clone()
            .unwrap_or_else(|| vec![Dir::Forward; self.k])
    }
}

/// A realised path `v_0 … v_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactPath {
    pub vertices: Vec<Vertex>,
}

impl ExactPath {
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn interior(&self) -> &[Vertex] {
        let l = self.vertices.len();
        if l <= 2 {
            &[]
        } else {
            &self.vertices[1..l - 1]
        }
    }

    pub fn reversed(&self) -> ExactPath {
        let mut v = self.vertices.clone();
        v.reverse();
        ExactPath { vertices: v }
    }

    /// Whether this path realises `req` in `host`: endpoints, length, distinct
    /// vertices, and every step present with the requested direction.
    pub fn realises<H: PathHost>(&self, host: &H, req: &PathRequest) -> bool {
        let v = &self.vertices;
        if v.len() != req.k + 1 || v[0] != req.x || v[req.k] != req.y {
            return false;
        }
        let mut seen = VertexSet::new(host.n());
        if !v.iter().all(|&u| u < host.n() && seen.insert(u)) {
            return false;
        }
        let dirs = req.dirs();
        v.windows(2)
            .zip(&dirs)
            .all(|(w, &d)| host.has_step(w[0], w[1], d))
    }
}

impl fmt::Display for ExactPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        f.write_str(&s.join(" "))
    }
}

/// Hosts paths can be routed through. Undirected graphs ignore directions.
pub trait PathHost: Sync {
    fn n(&self) -> usize;
    /// `w` with a step `v → w` of direction `d`.
    fn step(&self, v: Vertex, d: Dir) -> &[Vertex];
    /// `v` with a step `v → u` of direction `d`.
    fn step_back(&self, u: Vertex, d: Dir) -> &[Vertex];
    fn step_back_row(&self, u: Vertex, d: Dir) -> Option<&VertexSet>;
    fn has_step(&self, v: Vertex, w: Vertex, d: Dir) -> bool;
    fn as_graph(&self) -> Option<&Graph> {
        None
    }
}

impl PathHost for Graph {
    fn n(&self) -> usize {
        Graph::n(self)
    }
    fn step(&self, v: Vertex, _: Dir) -> &[Vertex] {
        self.neighbors(v)
    }
    fn step_back(&self, u: Vertex, _: Dir) -> &[Vertex] {
        self.neighbors(u)
    }
    fn step_back_row(&self, u: Vertex, _: Dir) -> Option<&VertexSet> {
        self.neighbor_row(u)
    }
    fn has_step(&self, v: Vertex, w: Vertex, _: Dir) -> bool {
        self.has_edge(v, w)
    }
    fn as_graph(&self) -> Option<&Graph> {
        Some(self)
    }
}

impl PathHost for DiGraph {
    fn n(&self) -> usize {
        DiGraph::n(self)
    }
    fn step(&self, v: Vertex, d: Dir) -> &[Vertex] {
        match d {
            Dir::Forward => self.out_neighbors(v),
            Dir::Backward => self.in_neighbors(v),
        }
    }
    fn step_back(&self, u: Vertex, d: Dir) -> &[Vertex] {
        match d {
            Dir::Forward => self.in_neighbors(u),
            Dir::Backward => self.out_neighbors(u),
        }
    }
    fn step_back_row(&self, u: Vertex, d: Dir) -> Option<&VertexSet> {
        match d {
            Dir::Forward => self.in_row(u),
            Dir::Backward => self.out_row(u),
        }
    }
    fn has_step(&self, v: Vertex, w: Vertex, d: Dir) -> bool {
        match d {
            Dir::Forward => self.has_arc(v, w),
            Dir::Backward => self.has_arc(w, v),
        }
    }
}

/// `layers[j]`: vertices of `avail` from which `y` is reachable by a walk
/// using exactly the last `j` steps of `dirs`, all intermediate vertices in `avail`.
fn reach_layers<H: PathHost>(host: &H, y: Vertex, dirs: &[Dir], avail: &VertexSet) -> Vec<VertexSet> {
    let n = host.n();
    let k = dirs.len();
    let mut layers = Vec::with_capacity(k);
    layers.push(VertexSet::from_iter(n, [y]));
    for j in 1..k {
        let d = dirs[k - j];
        let mut next = VertexSet::new(n);
        for u in layers[j - 1].iter() {
            match host.step_back_row(u, d) {
                Some(row) => next.union_with(row),
                None => host.step_back(u, d).iter().for_each(|&v| {
                    next.insert(v);
                }),
            }
        }
        next.intersect_with(avail);
        let empty = next.is_empty();
        layers.push(next);
        if empty {
            break;
        }
    }
    layers
}

/// Depth-first search for one `x, y`-path following `dirs` with interior in
/// `avail`, pruned by exact-length reachability. `budget` caps node expansions.
pub fn exact_path<H: PathHost, R: Rng>(
    host: &H,
    x: Vertex,
    y: Vertex,
    dirs: &[Dir],
    avail: &VertexSet,
    budget: usize,
    rng: &mut R,
) -> Option<Vec<Vertex>> {
    let k = dirs.len();
    if k == 0 || x == y {
        return None;
    }
    if k == 1 {
        return host.has_step(x, y, dirs[0]).then(|| vec![x, y]);
    }
    let mut inner = avail.clone();
    inner.remove(x);
    inner.remove(y);
    let layers = reach_layers(host, y, dirs, &inner);
    if layers.len() < k || layers[k - 1].is_empty() {
        return None;
    }
    let mut path = vec![x];
    let mut on_path = VertexSet::new(host.n());
    on_path.insert(x);
    let mut stack: Vec<(Vec<Vertex>, usize)> = Vec::new();
    let mut spent = 0usize;
    loop {
        let i = path.len() - 1;
        let v = path[i];
        let remaining = k - i;
        if remaining == 1 {
            if host.has_step(v, y, dirs[i]) {
                path.push(y);
                return Some(path);
            }
        } else if stack.len() == i {
            spent += 1;
            if spent > budget {
                return None;
            }
            let target = &layers[remaining - 1];
            let mut cands: Vec<Vertex> = host
                .step(v, dirs[i])
                .iter()
                .copied()
                .filter(|&u| target.contains(u) && !on_path.contains(u))
                .collect();
            cands.shuffle(rng);
            stack.push((cands, 0));
        }
        if remaining > 1 {
            let top = stack.last_mut().expect("frame for current depth");
            if top.1 < top.0.len() {
                let u = top.0[top.1];
                top.1 += 1;
                path.push(u);
                on_path.insert(u);
                continue;
            }
            stack.pop();
        }
        // Backtrack one vertex.
        if path.len() == 1 {
            return None;
        }
        let u = path.pop().expect("non-empty");
        on_path.remove(u);
    }
}

/// How a single request is searched for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStrategy {
    /// Exact-length depth-first search.
    Dfs,
    /// Grow a path plus branching tree from each end inside two expanding
    /// cores and join the last levels through a common neighbour; falls back
    /// to depth-first search when the lengths are too short or growth stalls.
    TreeGrowth,
}

#[derive(Clone, Debug)]
pub struct PathConfig {
    /// Number of reserve sets `W_1 … W_k` for the stage escalation.
    pub stages: usize,
    /// Matching degree `d_0` used to grow end-sets at each stage.
    pub d0: usize,
    /// Fraction of `W` kept as the main routing pool `U`.
    pub u_fraction: f64,
    /// `m` in the survivor bound `2m / (d_0 + 1)^α`; `None` means `|W| / 2d_0`.
    pub m: Option<f64>,
    pub max_retries: usize,
    /// Node expansions per single-path search.
    pub search_budget: usize,
    pub strategy: PathStrategy,
    /// Branching factor and leaf target of the grown trees.
    pub tree_arity: usize,
    pub tree_leaves: usize,
    /// Refuse inputs that violate the literal length hypotheses.
    pub strict: bool,
    /// When set, the partition of `W` is verified to expand with this factor.
    pub verify: Option<f64>,
    /// Joint exhaustive search is tried when `|W|` is at most this.
    pub exhaustive_limit: usize,
    /// Node cap for the joint exhaustive search.
    pub exhaustive_budget: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            stages: 2,
            d0: 2,
            u_fraction: 0.8,
            m: None,
            max_retries: 20,
            search_budget: 20_000,
            strategy: PathStrategy::Dfs,
            tree_arity: 2,
            tree_leaves: 8,
            strict: false,
            verify: None,
            exhaustive_limit: 16,
            exhaustive_budget: 2_000_000,
        }
    }
}

fn check_requests<H: PathHost>(host: &H, requests: &[PathRequest], w: &VertexSet) -> Result<(), PathError> {
    let n = host.n();
    let mut ends = VertexSet::new(n);
    for (index, r) in requests.iter().enumerate() {
        let bad = |reason: String| PathError::BadRequest { index, reason };
        if r.x >= n || r.y >= n {
            return Err(bad("endpoint out of range".into()));
        }
        if r.x == r.y {
            return Err(bad("endpoints coincide".into()));
        }
        if r.k == 0 {
            return Err(bad("length must be at least 1".into()));
        }
        if r.orientations.as_ref().is_some_and(|o| o.len() != r.k) {
            return Err(bad("orientation list length differs from k".into()));
        }
        if w.contains(r.x) || w.contains(r.y) {
            return Err(bad("endpoint lies in the routing set".into()));
        }
        if !ends.insert(r.x) || !ends.insert(r.y) {
            return Err(bad("endpoint shared with another request".into()));
        }
    }
    Ok(())
}

/// Finds a path for some request, with interior in `U`. Requests are tried in order.
pub fn find_one_exact_path<H: PathHost>(
    host: &H,
    requests: &[PathRequest],
    u: &VertexSet,
    cfg: &PathConfig,
    seed: RngSeed,
) -> Result<(usize, ExactPath), PathError> {
    check_requests(host, requests, u)?;
    let mut rng = seed.rng();
    for (i, r) in requests.iter().enumerate() {
        if let Some(p) = route_one(host, r, u, cfg, &mut rng) {
            return Ok((i, ExactPath { vertices: p }));
        }
    }
    Err(PathError::NoPathFound)
}

fn route_one<H: PathHost, R: Rng>(
    host: &H,
    r: &PathRequest,
    avail: &VertexSet,
    cfg: &PathConfig,
    rng: &mut R,
) -> Option<Vec<Vertex>> {
    if cfg.strategy == PathStrategy::TreeGrowth && r.orientations.is_none() {
        if let Some(g) = host.as_graph() {
            if let Some(p) = grow_and_join(g, r, avail, cfg, rng) {
                return Some(p);
            }
        }
    }
    exact_path(host, r.x, r.y, &r.dirs(), avail, cfg.search_budget, rng)
}

/// Removes vertices with fewer than `min_deg` neighbours inside until none remain.
fn peel(g: &Graph, set: &VertexSet, min_deg: usize) -> VertexSet {
    let mut core = set.clone();
    loop {
        let weak: Vec<Vertex> = core.iter().filter(|&v| g.degree_into(v, &core) < min_deg).collect();
        if weak.is_empty() {
            return core;
        }
        for v in weak {
            core.remove(v);
        }
    }
}

/// A path of length `len` from `start` into `core`, then a `d`-ary tree of
/// depth `depth` hanging from its end. Returns (path, parent map, last level).
fn grow_handle_and_tree<R: Rng>(
    g: &Graph,
    start: Vertex,
    len: usize,
    depth: usize,
    arity: usize,
    core: &mut VertexSet,
    rng: &mut R,
) -> Option<(Vec<Vertex>, Vec<(Vertex, Vertex)>, Vec<Vertex>)> {
    let mut handle = vec![start];
    for _ in 0..len {
        let v = *handle.last().expect("non-empty");
        let mut best: Option<(usize, Vertex)> = None;
        for &u in g.neighbors(v) {
            if core.contains(u) {
                let room = g.degree_into(u, core);
                if best.is_none_or(|b| room > b.0) {
                    best = Some((room, u));
                }
            }
        }
        let (_, u) = best?;
        core.remove(u);
        handle.push(u);
    }
    let mut level = vec![*handle.last().expect("non-empty")];
    let mut links = Vec::new();
    for _ in 0..depth {
        let pool: Vec<Vertex> = core.iter().collect();
        let mut index = vec![usize::MAX; g.n()];
        for (i, &v) in pool.iter().enumerate() {
            index[v] = i;
        }
        let adj: Vec<Vec<usize>> = level
            .iter()
            .map(|&v| {
                let mut a: Vec<usize> = g.neighbors(v).iter().filter(|&&u| index[u] != usize::MAX).map(|&u| index[u]).collect();
                a.shuffle(rng);
                a
            })
            .collect();
        let assign = generalized_matching(&adj, &vec![arity; level.len()], pool.len()).ok()?;
        let mut next = Vec::new();
        for (p, kids) in level.iter().zip(assign) {
            for c in kids {
                let c = pool[c];
                core.remove(c);
                links.push((c, *p));
                next.push(c);
            }
        }
        level = next;
    }
    Some((handle, links, level))
}

fn grow_and_join<R: Rng>(
    g: &Graph,
    r: &PathRequest,
    u: &VertexSet,
    cfg: &PathConfig,
    rng: &mut R,
) -> Option<Vec<Vertex>> {
    let d = cfg.tree_arity.max(2);
    let depth = ((cfg.tree_leaves.max(2) as f64).ln() / (d as f64).ln()).ceil() as usize;
    let a1 = (r.k / 2).checked_sub(depth + 1)?;
    let a2 = r.k.div_ceil(2).checked_sub(depth + 1)?;
    let mut members: Vec<Vertex> = u.iter().filter(|&v| v != r.x && v != r.y).collect();
    members.shuffle(rng);
    let half = members.len() / 2;
    let n = g.n();
    let mut v1 = peel(g, &VertexSet::from_iter(n, members[..half].iter().copied()), 2 * d);
    let mut v2 = peel(g, &VertexSet::from_iter(n, members[half..].iter().copied()), 2 * d);
    let (h1, links1, last1) = grow_handle_and_tree(g, r.x, a1, depth, d, &mut v1, rng)?;
    let (h2, links2, last2) = grow_handle_and_tree(g, r.y, a2, depth, d, &mut v2, rng)?;
    let mut taken = VertexSet::new(n);
    for &v in h1.iter().chain(&h2).chain(links1.iter().map(|(c, _)| c)).chain(links2.iter().map(|(c, _)| c)) {
        taken.insert(v);
    }
    let parent = |links: &[(Vertex, Vertex)], c: Vertex| links.iter().find(|l| l.0 == c).map(|l| l.1);
    let leaf1 = VertexSet::from_iter(n, last1.iter().copied());
    let leaf2 = VertexSet::from_iter(n, last2.iter().copied());
    let hub = u.iter().find(|&w| {
        !taken.contains(w) && w != r.x && w != r.y && g.degree_into(w, &leaf1) > 0 && g.degree_into(w, &leaf2) > 0
    })?;
    let p1 = *g.neighbors(hub).iter().find(|&&v| leaf1.contains(v))?;
    let p2 = *g.neighbors(hub).iter().find(|&&v| leaf2.contains(v))?;
    let climb = |links: &[(Vertex, Vertex)], mut v: Vertex| {
        let mut out = vec![v];
        while let Some(p) = parent(links, v) {
            out.push(p);
            v = p;
        }
        out
    };
    let mut path = h1.clone();
    let mut down1 = climb(&links1, p1);
    down1.reverse();
    path.extend_from_slice(&down1[1..]);
    path.push(hub);
    let up2 = climb(&links2, p2);
    path.extend_from_slice(&up2[..up2.len() - 1]);
    let mut tail = h2.clone();
    tail.reverse();
    path.extend_from_slice(&tail);
    debug_assert_eq!(path.len(), r.k + 1);
    Some(path)
}

/// End-set grown from one endpoint: members with their depth and tree parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndSet {
    pub root: Vertex,
    pub members: Vec<(Vertex, usize, Option<Vertex>)>,
}

impl EndSet {
    fn single(root: Vertex) -> Self {
        EndSet {
            root,
            members: vec![(root, 0, None)],
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn parent_of(&self, v: Vertex) -> Option<Vertex> {
        self.members.iter().find(|m| m.0 == v).and_then(|m| m.2)
    }

    /// Vertices from `v` up to the root, inclusive.
    fn climb(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent_of(cur) {
            out.push(p);
            cur = p;
        }
        out
    }
}

/// Snapshot of the escalation at a stage boundary.
#[derive(Clone, Debug)]
pub struct StageState {
    pub alpha: usize,
    /// Requests still to be connected.
    pub surviving: Vec<usize>,
    /// Completed paths by request index.
    pub done: Vec<(usize, ExactPath)>,
    /// End-sets `(S_i, T_i)` for each surviving request.
    pub ends: Vec<(EndSet, EndSet)>,
    /// Reserve sets and main pool in use.
    pub reserves: Vec<VertexSet>,
    pub pool: VertexSet,
    pub d0: usize,
    /// `2m / (d_0 + 1)^α`.
    pub bound: f64,
}

impl StageState {
    /// Every invariant violation at this boundary, checked from scratch.
    pub fn violations<H: PathHost>(&self, host: &H, requests: &[PathRequest]) -> Vec<String> {
        let mut out = Vec::new();
        if self.surviving.len() as f64 > self.bound + 1e-9 {
            out.push(format!("{} survivors exceed bound {:.3}", self.surviving.len(), self.bound));
        }
        let want = (self.d0 + 1).pow(self.alpha as u32);
        let mut seen = VertexSet::new(host.n());
        let mut claim = |v: Vertex, what: &str, out: &mut Vec<String>| {
            if !seen.insert(v) {
                out.push(format!("vertex {v} reused ({what})"));
            }
        };
        for (i, p) in &self.done {
            if !p.realises(host, &requests[*i]) {
                out.push(format!("path for request {i} is not exact"));
            }
            for &v in &p.vertices {
                claim(v, "path", &mut out);
            }
        }
        for (idx, (s, t)) in self.surviving.iter().zip(&self.ends) {
            let r = &requests[*idx];
            let dirs = r.dirs();
            for (set, root, from_end) in [(s, r.x, false), (t, r.y, true)] {
                if set.len() != want {
                    out.push(format!("end-set of request {idx} has {} members, want {want}", set.len()));
                }
                if set.root != root {
                    out.push(format!("end-set of request {idx} is rooted at the wrong vertex"));
                }
                let inside: Vec<Vertex> = set.members.iter().map(|m| m.0).collect();
                for &(v, depth, parent) in &set.members {
                    claim(v, "end-set", &mut out);
                    if depth > self.alpha {
                        out.push(format!("{v} is {depth} steps from its end, more than {}", self.alpha));
                    }
                    let Some(p) = parent else {
                        if v != root || depth != 0 {
                            out.push(format!("{v} has no parent but is not the end"));
                        }
                        continue;
                    };
                    let pd = set.members.iter().find(|m| m.0 == p).map(|m| m.1);
                    if !inside.contains(&p) || pd != Some(depth - 1) {
                        out.push(format!("{v} hangs from {p} outside its end-set"));
                        continue;
                    }
                    // Steps toward the far end follow the request's directions.
                    let ok = if from_end {
                        host.has_step(v, p, dirs[r.k - depth])
                    } else {
                        host.has_step(p, v, dirs[depth - 1])
                    };
                    if !ok {
                        out.push(format!("{p}-{v} is not a host step"));
                    }
                }
            }
        }
        out
    }
}

/// Result of [`connect_pairs_exact`].
#[derive(Clone, Debug)]
pub struct Routing {
    /// One path per request, in request order.
    pub paths: Vec<ExactPath>,
    /// Stage snapshots of the successful attempt.
    pub trace: Vec<StageState>,
    pub attempts: usize,
    /// Set when the joint exhaustive search produced the answer.
    pub exhaustive: bool,
}

fn bound(m: f64, d0: usize, alpha: usize) -> f64 {
    2.0 * m / ((d0 + 1) as f64).powi(alpha as i32)
}

/// Connects every request by pairwise disjoint exact paths with interiors in `W`.
pub fn connect_pairs_exact<H: PathHost>(
    host: &H,
    requests: &[PathRequest],
    w: &VertexSet,
    cfg: &PathConfig,
    seed: RngSeed,
) -> Result<Routing, PathError> {
    check_requests(host, requests, w)?;
    if requests.is_empty() {
        return Ok(Routing {
            paths: Vec::new(),
            trace: Vec::new(),
            attempts: 0,
            exhaustive: false,
        });
    }
    if cfg.strict {
        let n = host.n() as f64;
        let total: usize = requests.iter().map(|r| r.k).sum();
        if 4 * total > 3 * w.len() {
            return Err(PathError::Hypothesis(format!(
                "total length {total} exceeds 3/4 of |W| = {}",
                w.len()
            )));
        }
        let lo = 4.0 * (n.ln() / n.ln().ln()).ceil();
        let hi = n / 40.0;
        if let Some(r) = requests.iter().find(|r| (r.k as f64) < lo || r.k as f64 > hi) {
            return Err(PathError::Hypothesis(format!(
                "length {} outside [{lo}, {hi}]",
                r.k
            )));
        }
    }
    let mut last = PathError::NoPathFound;
    let attempts = cfg.max_retries.max(1);
    for attempt in 0..attempts {
        match staged_attempt(host, requests, w, cfg, seed.derive(attempt as u64)) {
            Ok((paths, trace)) => {
                return Ok(Routing {
                    paths,
                    trace,
                    attempts: attempt + 1,
                    exhaustive: false,
                })
            }
            Err(e @ PathError::Split(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    if w.len() <= cfg.exhaustive_limit {
        if let Some(paths) = route_exhaustively(host, requests, w, cfg.exhaustive_budget) {
            return Ok(Routing {
                paths,
                trace: Vec::new(),
                attempts,
                exhaustive: true,
            });
        }
    }
    Err(last)
}

fn staged_attempt<H: PathHost>(
    host: &H,
    requests: &[PathRequest],
    w: &VertexSet,
    cfg: &PathConfig,
    seed: RngSeed,
) -> Result<(Vec<ExactPath>, Vec<StageState>), PathError> {
    let n = host.n();
    let stages = cfg.stages;
    let pool_size = if stages == 0 {
        w.len()
    } else {
        ((w.len() as f64) * cfg.u_fraction).round() as usize
    };
    let reserve_total = w.len() - pool_size;
    let mut sizes = vec![pool_size];
    for s in 0..stages {
        sizes.push(reserve_total / stages + usize::from(s < reserve_total % stages));
    }
    let members: Vec<Vertex> = w.iter().collect();
    let parts = match (cfg.verify, host.as_graph()) {
        (Some(d), Some(g)) => split_target(g, w, &sizes, d, 0.0, &CheckConfig::sampled(500, seed.derive(7)), 3)?,
        _ => random_partition(n, &members, &sizes, seed.derive(7)),
    };
    let mut pool = parts[0].clone();
    let reserves: Vec<VertexSet> = parts[1..].to_vec();
    let m = cfg.m.unwrap_or(w.len() as f64 / (2.0 * cfg.d0.max(1) as f64));
    let mut rng = seed.rng();

    let mut paths: Vec<Option<ExactPath>> = vec![None; requests.len()];
    let mut surviving = Vec::new();
    // Stage 0: route directly through the pool, longest requests first.
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(requests[i].k), i));
    for i in order {
        match route_one(host, &requests[i], &pool, cfg, &mut rng) {
            Some(p) => {
                for &v in &p[1..p.len() - 1] {
                    pool.remove(v);
                }
                paths[i] = Some(ExactPath { vertices: p });
            }
            None => surviving.push(i),
        }
    }
    surviving.sort_unstable();
    let mut ends: Vec<(EndSet, EndSet)> = surviving
        .iter()
        .map(|&i| (EndSet::single(requests[i].x), EndSet::single(requests[i].y)))
        .collect();
    let snapshot = |alpha: usize, surviving: &[usize], ends: &[(EndSet, EndSet)], paths: &[Option<ExactPath>], pool: &VertexSet, reserves: &[VertexSet]| StageState {
        alpha,
        surviving: surviving.to_vec(),
        done: paths
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.clone().map(|p| (i, p)))
            .collect(),
        ends: ends.to_vec(),
        reserves: reserves.to_vec(),
        pool: pool.clone(),
        d0: cfg.d0,
        bound: bound(m, cfg.d0, alpha),
    };
    let mut trace = vec![snapshot(0, &surviving, &ends, &paths, &pool, &reserves)];
    if surviving.len() as f64 > bound(m, cfg.d0, 0) {
        return Err(PathError::StageStalled {
            alpha: 0,
            surviving: surviving.len(),
            bound: bound(m, cfg.d0, 0),
        });
    }

    let mut spare: Vec<VertexSet> = reserves.clone();
    for alpha in 0..stages {
        if surviving.is_empty() {
            break;
        }
        grow_end_sets(host, requests, &surviving, &mut ends, &mut spare[alpha], cfg.d0, alpha).ok_or(
            PathError::StageStalled {
                alpha: alpha + 1,
                surviving: surviving.len(),
                bound: bound(m, cfg.d0, alpha + 1),
            },
        )?;
        let mut still = Vec::new();
        let mut still_ends = Vec::new();
        for (&i, (s, t)) in surviving.iter().zip(ends.iter()) {
            match join_through(host, &requests[i], s, t, &pool, cfg, &mut rng) {
                Some(p) => {
                    for &v in &p[1..p.len() - 1] {
                        pool.remove(v);
                    }
                    paths[i] = Some(ExactPath { vertices: p });
                }
                None => {
                    still.push(i);
                    still_ends.push((s.clone(), t.clone()));
                }
            }
        }
        surviving = still;
        ends = still_ends;
        trace.push(snapshot(alpha + 1, &surviving, &ends, &paths, &pool, &reserves));
        if surviving.len() as f64 > bound(m, cfg.d0, alpha + 1) {
            return Err(PathError::StageStalled {
                alpha: alpha + 1,
                surviving: surviving.len(),
                bound: bound(m, cfg.d0, alpha + 1),
            });
        }
    }
    if !surviving.is_empty() {
        return Err(PathError::StageStalled {
            alpha: stages,
            surviving: surviving.len(),
            bound: bound(m, cfg.d0, stages),
        });
    }
    Ok((paths.into_iter().map(|p| p.expect("all routed")).collect(), trace))
}

/// Gives every end-set member `d0` new neighbours from `reserve`, respecting
/// the request's step directions.
fn grow_end_sets<H: PathHost>(
    host: &H,
    requests: &[PathRequest],
    surviving: &[usize],
    ends: &mut [(EndSet, EndSet)],
    reserve: &mut VertexSet,
    d0: usize,
    alpha: usize,
) -> Option<()> {
    let pool: Vec<Vertex> = reserve.iter().collect();
    let mut index = vec![usize::MAX; host.n()];
    for (i, &v) in pool.iter().enumerate() {
        index[v] = i;
    }
    // (request slot, side, vertex, depth)
    let mut left = Vec::new();
    let mut adj = Vec::new();
    for (slot, &i) in surviving.iter().enumerate() {
        let r = &requests[i];
        let dirs = r.dirs();
        for side in 0..2 {
            let set = if side == 0 { &ends[slot].0 } else { &ends[slot].1 };
            for &(v, depth, _) in &set.members {
                // A grown vertex must still leave room for the joining middle.
                let nbrs: &[Vertex] = if depth + 1 >= r.k {
                    &[]
                } else if side == 0 {
                    host.step(v, dirs[depth])
                } else {
                    host.step_back(v, dirs[r.k - 1 - depth])
                };
                adj.push(nbrs.iter().filter(|&&u| index[u] != usize::MAX).map(|&u| index[u]).collect::<Vec<_>>());
                left.push((slot, side, v, depth));
            }
        }
    }
    debug_assert!(left.iter().all(|l| l.3 <= alpha));
    let assign = generalized_matching(&adj, &vec![d0; left.len()], pool.len()).ok()?;
    for ((slot, side, v, depth), got) in left.into_iter().zip(assign) {
        for j in got {
            let u = pool[j];
            reserve.remove(u);
            let set = if side == 0 { &mut ends[slot].0 } else { &mut ends[slot].1 };
            set.members.push((u, depth + 1, Some(v)));
        }
    }
    Some(())
}

/// Tries pairs `(s, t)` from the two end-sets and routes the middle through
/// `pool` with the residual length and directions.
fn join_through<H: PathHost, R: Rng>(
    host: &H,
    r: &PathRequest,
    s: &EndSet,
    t: &EndSet,
    pool: &VertexSet,
    cfg: &PathConfig,
    rng: &mut R,
) -> Option<Vec<Vertex>> {
    let dirs = r.dirs();
    let mut pairs: Vec<(Vertex, usize, Vertex, usize)> = Vec::new();
    let mut ss = s.members.clone();
    let mut ts = t.members.clone();
    ss.sort_unstable();
    ts.sort_unstable();
    for &(a, da, _) in &ss {
        for &(b, db, _) in &ts {
            if da + db < r.k {
                pairs.push((a, da, b, db));
            }
        }
    }
    pairs.shuffle(rng);
    let budget = (cfg.search_budget / pairs.len().max(1)).max(200);
    for (a, da, b, db) in pairs.into_iter().take(256) {
        let mid = &dirs[da..r.k - db];
        let Some(middle) = exact_path(host, a, b, mid, pool, budget, rng) else {
            continue;
        };
        let mut head = s.climb(a);
        head.reverse();
        let tail = t.climb(b);
        let mut path = head;
        path.extend_from_slice(&middle[1..middle.len() - 1]);
        path.extend_from_slice(&tail);
        return Some(path);
    }
    None
}

/// Joint backtracking over all requests, trying every exact path for each.
/// Only sensible when `W` is tiny.
pub fn route_exhaustively<H: PathHost>(
    host: &H,
    requests: &[PathRequest],
    w: &VertexSet,
    budget: usize,
) -> Option<Vec<ExactPath>> {
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(requests[i].k));
    let mut chosen: Vec<Option<Vec<Vertex>>> = vec![None; requests.len()];
    let mut spent = 0usize;
    let mut avail = w.clone();
    if joint(host, requests, &order, 0, &mut avail, &mut chosen, &mut spent, budget) {
        Some(chosen.into_iter().map(|p| ExactPath { vertices: p.expect("routed") }).collect())
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn joint<H: PathHost>(
    host: &H,
    requests: &[PathRequest],
    order: &[usize],
    at: usize,
    avail: &mut VertexSet,
    chosen: &mut Vec<Option<Vec<Vertex>>>,
    spent: &mut usize,
    budget: usize,
) -> bool {
    if at == order.len() {
        return true;
    }
    let i = order[at];
    let r = &requests[i];
    let dirs = r.dirs();
    let mut path = vec![r.x];
    let mut found = false;
    // The interior is already out of `avail` while the callback runs.
    extend_all(host, r, &dirs, avail, &mut path, spent, budget, &mut |p, avail, spent| {
        chosen[i] = Some(p.to_vec());
        let ok = joint(host, requests, order, at + 1, avail, chosen, spent, budget);
        if ok {
            found = true;
        }
        ok
    });
    found
}

#[allow(clippy::too_many_arguments)]
fn extend_all<H: PathHost>(
    host: &H,
    r: &PathRequest,
    dirs: &[Dir],
    avail: &mut VertexSet,
    path: &mut Vec<Vertex>,
    spent: &mut usize,
    budget: usize,
    on_full: &mut dyn FnMut(&[Vertex], &mut VertexSet, &mut usize) -> bool,
) -> bool {
    *spent += 1;
    if *spent > budget {
        return false;
    }
    let i = path.len() - 1;
    let v = path[i];
    if i + 1 == r.k {
        if host.has_step(v, r.y, dirs[i]) {
            path.push(r.y);
            let done = on_full(path, avail, spent);
            path.pop();
            return done;
        }
        return false;
    }
    let cands: Vec<Vertex> = host.step(v, dirs[i]).iter().copied().filter(|&u| avail.contains(u)).collect();
    for u in cands {
        avail.remove(u);
        path.push(u);
        let done = extend_all(host, r, dirs, avail, path, spent, budget, on_full);
        path.pop();
        avail.insert(u);
        if done {
            return true;
        }
    }
    false
}

/// Every returned path realises its request, the paths are pairwise disjoint,
/// and interiors lie in `W`.
pub fn routing_is_valid<H: PathHost>(host: &H, requests: &[PathRequest], w: &VertexSet, paths: &[ExactPath]) -> bool {
    if paths.len() != requests.len() {
        return false;
    }
    let mut seen = VertexSet::new(host.n());
    for (p, r) in paths.iter().zip(requests) {
        if !p.realises(host, r) || !p.interior().iter().all(|&v| w.contains(v)) {
            return false;
        }
        if !p.vertices.iter().all(|&v| seen.insert(v)) {
            return false;
        }
    }
    true
}

/// Directed counterpart of [`connect_pairs_exact`]; requests carry their
/// orientation lists (absent lists mean all steps forward).
pub fn connect_pairs_exact_directed(
    d: &DiGraph,
    requests: &[PathRequest],
    w: &VertexSet,
    cfg: &PathConfig,
    seed: RngSeed,
) -> Result<Routing, PathError> {
    connect_pairs_exact(d, requests, w, cfg, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_gnp, gen_tournament};

    #[test]
    fn complete_graph_single_request() {
        let g = Graph::complete(10);
        let req = [PathRequest::new(0, 1, 4)];
        let u = VertexSet::from_iter(10, 2..10);
        let (i, p) = find_one_exact_path(&g, &req, &u, &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert_eq!(i, 0);
        assert!(p.realises(&g, &req[0]));
    }

    #[test]
    fn forced_path_in_five_cycle() {
        let g = Graph::cycle(5);
        let req = [PathRequest::new(0, 2, 3)];
        let u = VertexSet::from_iter(5, [1, 3, 4]);
        let (_, p) = find_one_exact_path(&g, &req, &u, &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert_eq!(p.vertices, vec![0, 4, 3, 2]);
    }

    #[test]
    fn tree_growth_routes_in_random_graph() {
        let g = gen_gnp(300, 0.2, RngSeed::new(6)).unwrap();
        let cfg = PathConfig {
            strategy: PathStrategy::TreeGrowth,
            ..PathConfig::default()
        };
        let req = [PathRequest::new(0, 1, 12)];
        let u = VertexSet::from_iter(300, 2..300);
        let (_, p) = find_one_exact_path(&g, &req, &u, &cfg, RngSeed::new(1)).unwrap();
        assert!(p.realises(&g, &req[0]));
        let mut rng = RngSeed::new(2).rng();
        let grown = grow_and_join(&g, &req[0], &u, &cfg, &mut rng).expect("dense host");
        assert!(ExactPath { vertices: grown }.realises(&g, &req[0]));
    }

    #[test]
    fn no_requests_no_paths() {
        let g = Graph::complete(4);
        let r = connect_pairs_exact(&g, &[], &g.vertices(), &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert!(r.paths.is_empty());
    }

    #[test]
    fn two_pairs_in_complete_graph() {
        let g = Graph::complete(30);
        let req = [PathRequest::new(0, 1, 5), PathRequest::new(2, 3, 5)];
        let w = VertexSet::from_iter(30, 10..30);
        let r = connect_pairs_exact(&g, &req, &w, &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert!(routing_is_valid(&g, &req, &w, &r.paths));
    }

    #[test]
    fn stage_trace_is_consistent() {
        let g = gen_gnp(500, 0.1, RngSeed::new(12)).unwrap();
        let req: Vec<_> = (0..6).map(|i| PathRequest::new(2 * i, 2 * i + 1, 8 + 2 * i)).collect();
        let w = VertexSet::from_iter(500, 200..500);
        let r = connect_pairs_exact(&g, &req, &w, &PathConfig::default(), RngSeed::new(3)).unwrap();
        assert!(routing_is_valid(&g, &req, &w, &r.paths));
        let mut prev = usize::MAX;
        for s in &r.trace {
            assert!(s.violations(&g, &req).is_empty(), "{:?}", s.violations(&g, &req));
            assert!(s.surviving.len() <= prev);
            prev = s.surviving.len();
        }
    }

    #[test]
    fn stages_rescue_pairs_without_pool_routes() {
        // x and y only see reserve vertices, so stage 0 must fail and stage 1 succeed.
        let n = 60;
        let mut edges = Vec::new();
        let pool: Vec<Vertex> = (2..n).collect();
        for (i, &a) in pool.iter().enumerate() {
            for &b in &pool[i + 1..] {
                edges.push((a, b));
            }
        }
        let g0 = Graph::from_edges(n, &edges).unwrap();
        let w = VertexSet::from_iter(n, 2..n);
        let cfg = PathConfig {
            u_fraction: 0.5,
            stages: 1,
            ..PathConfig::default()
        };
        // Attach x=0, y=1 to every vertex; the stage split decides which ones are reserve.
        for v in 2..n {
            edges.push((0, v));
            edges.push((1, v));
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let req = [PathRequest::new(0, 1, 6)];
        let r = connect_pairs_exact(&g, &req, &w, &cfg, RngSeed::new(1)).unwrap();
        assert!(routing_is_valid(&g, &req, &w, &r.paths));
        assert!(g0.n() == n);
    }

    #[test]
    fn exhaustive_fallback_finds_forced_routing() {
        // Two requests in a 6-cycle-with-chords where greedy order matters.
        let g = Graph::cycle(8);
        let req = [PathRequest::new(0, 2, 2), PathRequest::new(4, 6, 2)];
        let w = VertexSet::from_iter(8, [1, 3, 5, 7]);
        let r = connect_pairs_exact(&g, &req, &w, &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert!(routing_is_valid(&g, &req, &w, &r.paths));
    }

    #[test]
    fn directed_forward_path() {
        let d = DiGraph::complete(8);
        let req = [PathRequest::forward(0, 1, 4)];
        let w = VertexSet::from_iter(8, 2..8);
        let r = connect_pairs_exact_directed(&d, &req, &w, &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert!(r.paths[0].realises(&d, &req[0]));
    }

    #[test]
    fn alternating_orientations_in_tournament() {
        let t = gen_tournament(25, RngSeed::new(4));
        let dirs = vec![Dir::Forward, Dir::Backward, Dir::Forward, Dir::Backward];
        let req = [PathRequest::oriented(0, 1, dirs)];
        let w = VertexSet::from_iter(25, 2..25);
        let r = connect_pairs_exact_directed(&t, &req, &w, &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert!(r.paths[0].realises(&t, &req[0]));
    }

    #[test]
    fn request_validation() {
        let g = Graph::complete(6);
        let w = VertexSet::from_iter(6, 2..6);
        let bad = [PathRequest::new(0, 0, 2)];
        assert!(matches!(
            connect_pairs_exact(&g, &bad, &w, &PathConfig::default(), RngSeed::new(0)),
            Err(PathError::BadRequest { .. })
        ));
        let inside = [PathRequest::new(0, 2, 2)];
        assert!(connect_pairs_exact(&g, &inside, &w, &PathConfig::default(), RngSeed::new(0)).is_err());
        let strict = PathConfig {
            strict: true,
            ..PathConfig::default()
        };
        let long = [PathRequest::new(0, 1, 4)];
        assert!(matches!(
            connect_pairs_exact(&g, &long, &w, &strict, RngSeed::new(0)),
            Err(PathError::Hypothesis(_))
        ));
    }
}
