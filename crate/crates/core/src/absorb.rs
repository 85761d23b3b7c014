//! Absorbers and exact-length path covers.
//!
//! An absorber `(R, r, s)` for `v` carries two `r, s`-paths, one on `R` and
//! one on `R ∪ {v}`. Chaining absorbers with exact-length links gives merged
//! absorbers; wiring them through a resilient matching template gives a
//! structure that can swallow any half of a reserved vertex set.

use std::fmt::{self, Write as _};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expansion::{check_directed_expansion, check_expands_into, random_partition, CheckConfig};
use crate::graph::{DiGraph, Graph, RngSeed, Vertex, VertexSet};
use crate::matching::{generalized_matching, perfect_left_matching, HallViolation};
use crate::paths::{
    connect_pairs_exact, exact_path, route_exhaustively, Dir, ExactPath, PathConfig, PathError, PathHost,
    PathRequest,
};

#[derive(Debug, Error)]
pub enum AbsorbError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("could not build an absorber for {v}: {reason}")]
    BuildFailed { v: Vertex, reason: String },
    #[error("template resampling exhausted after {0} attempts")]
    ResampleExhausted(usize),
    #[error("no matching: {0}")]
    NoMatching(HallViolation),
    #[error(transparent)]
    Paths(#[from] PathError),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<AbsorbError>,
    },
}

fn staged(stage: &'static str) -> impl FnOnce(AbsorbError) -> AbsorbError {
    move |e| AbsorbError::Stage {
        stage,
        source: Box::new(e),
    }
}

/// Distinct vertices joined by forward steps.
fn is_walk<H: PathHost>(host: &H, vs: &[Vertex]) -> bool {
    let mut seen = VertexSet::new(host.n());
    vs.iter().all(|&v| v < host.n() && seen.insert(v)) && vs.windows(2).all(|w| host.has_step(w[0], w[1], Dir::Forward))
}

fn sorted(vs: &[Vertex]) -> Vec<Vertex> {
    let mut s = vs.to_vec();
    s.sort_unstable();
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Absorber {
    /// `R`, sorted.
    pub set: Vec<Vertex>,
    pub r: Vertex,
    pub s: Vertex,
    /// The vertex this absorber can take in.
    pub v: Vertex,
    pub skip_path: ExactPath,
    pub absorb_path: ExactPath,
}

impl Absorber {
    pub fn size(&self) -> usize {
        self.set.len()
    }

    /// Re-checks both witnesses against `host` from scratch.
    pub fn validate<H: PathHost>(&self, host: &H) -> Result<(), String> {
        if self.r == self.s {
            return Err("ends coincide".into());
        }
        if self.set.binary_search(&self.v).is_ok() {
            return Err(format!("{} lies in R", self.v));
        }
        for (name, path, want) in [
            ("skip", &self.skip_path, self.set.clone()),
            ("absorb", &self.absorb_path, {
                let mut w = self.set.clone();
                w.push(self.v);
                w.sort_unstable();
                w
            }),
        ] {
            let vs = &path.vertices;
            if vs.first() != Some(&self.r) || vs.last() != Some(&self.s) {
                return Err(format!("{name} path does not run from r to s"));
            }
            if !is_walk(host, vs) {
                return Err(format!("{name} path is not a host path"));
            }
            if sorted(vs) != want {
                return Err(format!("{name} path has the wrong vertex set"));
            }
        }
        Ok(())
    }
}

/// Assembles both traversals of the figure-one absorber from the labelled
/// `Q` vertices and the paths `x_i → y_i` (`fwd`) and `y_i → x_i` (`bwd`).
fn assemble(x: &[Vertex], y: &[Vertex], v: Vertex, fwd: &[Vec<Vertex>], bwd: &[Vec<Vertex>]) -> Absorber {
    let k = x.len() - 1;
    let mut skip = vec![x[0]];
    let mut take = vec![x[0], v];
    for i in 1..=k {
        let odd = i % 2 == 1;
        skip.extend_from_slice(if odd { &fwd[i - 1] } else { &bwd[i - 1] });
        take.extend_from_slice(if odd { &bwd[i - 1] } else { &fwd[i - 1] });
    }
    skip.push(y[0]);
    take.push(y[0]);
    Absorber {
        set: sorted(&skip),
        r: x[0],
        s: y[0],
        v,
        skip_path: ExactPath { vertices: skip },
        absorb_path: ExactPath { vertices: take },
    }
}

/// Shape parameters. `k = 0` gives `R = {r, s}`; `k = 1` without reversible
/// paths collapses `x_1 = y_1`; otherwise `Q` has length `2k + 1` and the
/// rungs are plain paths of length `k − 1` or, when `reversible = Some((m, h))`,
/// reversible paths with `m` heavy segments of length `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbsorberShape {
    pub k: usize,
    pub reversible: Option<(usize, usize)>,
}

impl AbsorberShape {
    pub fn plain(k: usize) -> Self {
        AbsorberShape { k, reversible: None }
    }

    fn collapsed(&self) -> bool {
        self.k == 0 || (self.k == 1 && self.reversible.is_none())
    }

    /// `|R|`.
    pub fn size(&self) -> usize {
        match (self.k, self.reversible) {
            (0, _) => 2,
            (1, None) => 3,
            (k, None) => k * k + 2,
            (k, Some((m, h))) => 2 * k + 2 + k * m * (h + 1),
        }
    }
}

impl Default for AbsorberShape {
    fn default() -> Self {
        AbsorberShape::plain(1)
    }
}

/// A directed gadget with an `x → y` and a `y → x` path on the same vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversiblePath {
    pub x: Vertex,
    pub y: Vertex,
    pub forward: ExactPath,
    pub backward: ExactPath,
}

impl ReversiblePath {
    pub fn vertices(&self) -> Vec<Vertex> {
        sorted(&self.forward.vertices)
    }

    pub fn validate<H: PathHost>(&self, host: &H) -> Result<(), String> {
        let f = &self.forward.vertices;
        let b = &self.backward.vertices;
        if f.first() != Some(&self.x) || f.last() != Some(&self.y) {
            return Err("forward traversal has wrong ends".into());
        }
        if b.first() != Some(&self.y) || b.last() != Some(&self.x) {
            return Err("backward traversal has wrong ends".into());
        }
        if !is_walk(host, f) || !is_walk(host, b) {
            return Err("a traversal is not a directed path".into());
        }
        if sorted(f) != sorted(b) {
            return Err("traversals use different vertices".into());
        }
        Ok(())
    }
}

fn pick_free<R: Rng>(cands: &[Vertex], free: &VertexSet, ok: impl Fn(Vertex) -> bool, rng: &mut R) -> Option<Vertex> {
    let mut c: Vec<Vertex> = cands.iter().copied().filter(|&u| free.contains(u) && ok(u)).collect();
    c.shuffle(rng);
    c.first().copied()
}

/// Builds a reversible path from `x` to `y` with `m` heavy segments of
/// length `h`, interior vertices from `pool`.
pub fn build_reversible_path<H: PathHost>(
    host: &H,
    x: Vertex,
    y: Vertex,
    pool: &VertexSet,
    m: usize,
    h: usize,
    budget: usize,
    seed: RngSeed,
) -> Result<ReversiblePath, AbsorbError> {
    if m == 0 || h == 0 {
        return Err(AbsorbError::BadInput("reversible paths need m ≥ 1 and h ≥ 1".into()));
    }
    let mut rng = seed.rng();
    let fwd = vec![Dir::Forward; h];
    'attempt: for _ in 0..64 {
        let mut free = pool.clone();
        free.remove(x);
        free.remove(y);
        let mut heavy: Vec<Vec<Vertex>> = Vec::with_capacity(m);
        let (mut into, mut back) = (x, x);
        for i in 1..=m {
            let last = i == m;
            let mut found = None;
            for _ in 0..16 {
                let Some(a) = pick_free(host.step(into, Dir::Forward), &free, |a| !last || host.has_step(y, a, Dir::Forward), &mut rng) else {
                    continue 'attempt;
                };
                let Some(b) = pick_free(
                    host.step_back(back, Dir::Forward),
                    &free,
                    |b| b != a && (!last || host.has_step(b, y, Dir::Forward)),
                    &mut rng,
                ) else {
                    continue;
                };
                if let Some(p) = exact_path(host, a, b, &fwd, &free, budget, &mut rng) {
                    found = Some(p);
                    break;
                }
            }
            let Some(p) = found else { continue 'attempt };
            for &u in &p {
                free.remove(u);
            }
            into = *p.last().expect("non-empty");
            back = p[0];
            heavy.push(p);
        }
        let mut forward = vec![x];
        heavy.iter().for_each(|p| forward.extend_from_slice(p));
        forward.push(y);
        let mut backward = vec![y];
        heavy.iter().rev().for_each(|p| backward.extend_from_slice(p));
        backward.push(x);
        return Ok(ReversiblePath {
            x,
            y,
            forward: ExactPath { vertices: forward },
            backward: ExactPath { vertices: backward },
        });
    }
    Err(AbsorbError::BuildFailed {
        v: x,
        reason: format!("no reversible path to {y}"),
    })
}

/// `Q` as an oriented request: `x_0 → … → x_k → y_0 ← y_k ← … ← y_1`.
fn q_request(x0: Vertex, y1: Vertex, k: usize) -> PathRequest {
    let mut dirs = vec![Dir::Forward; k + 1];
    dirs.extend(std::iter::repeat_n(Dir::Backward, k));
    PathRequest::oriented(x0, y1, dirs)
}

/// Builds one absorber for `v` from anchors `x_0 → v → y_1`, routing `Q`
/// through `w2` and the rungs through `w3`.
#[allow(clippy::too_many_arguments)]
pub fn build_absorber<H: PathHost>(
    host: &H,
    v: Vertex,
    anchors: (Vertex, Vertex),
    w2: &VertexSet,
    w3: &VertexSet,
    shape: &AbsorberShape,
    cfg: &PathConfig,
    seed: RngSeed,
) -> Result<Absorber, AbsorbError> {
    let (x0, y1) = anchors;
    if !host.has_step(x0, v, Dir::Forward) || !host.has_step(v, y1, Dir::Forward) {
        return Err(AbsorbError::BadInput("anchors must be joined to v".into()));
    }
    let fail = |reason: &str| AbsorbError::BuildFailed {
        v,
        reason: reason.into(),
    };
    match (shape.k, shape.reversible) {
        (0, _) => {
            if !host.has_step(x0, y1, Dir::Forward) {
                return Err(fail("anchors not adjacent"));
            }
            Ok(assemble(&[x0], &[y1], v, &[], &[]))
        }
        (1, None) => {
            if !host.has_step(x0, y1, Dir::Forward) {
                return Err(fail("anchors not adjacent"));
            }
            let mut rng = seed.rng();
            let y0 = pick_free(host.step(y1, Dir::Forward), w2, |u| u != x0 && u != v, &mut rng)
                .ok_or_else(|| fail("no end vertex"))?;
            Ok(assemble(&[x0, y1], &[y0, y1], v, &[vec![y1]], &[vec![y1]]))
        }
        (2, None) if host.as_graph().is_some() => {
            let mut free = w2.clone();
            free.union_with(w3);
            free.remove(v);
            square_absorber(host, v, x0, y1, &free, &mut seed.rng()).ok_or_else(|| fail("no square around the anchors"))
        }
        (k, rev) => {
            if rev.is_none() && host.as_graph().is_none() {
                return Err(AbsorbError::BadInput("directed rungs must be reversible".into()));
            }
            let q = connect_pairs_exact(host, &[q_request(x0, y1, k)], w2, cfg, seed.derive(1))?;
            let q = &q.paths[0].vertices;
            let mut w3 = w3.clone();
            w3.remove(v);
            let b = rungs(host, &[q.clone()], k, rev, &w3, cfg, seed.derive(2))?;
            let (x, y) = label_q(q, k);
            Ok(assemble(&x, &y, v, &b[0].0, &b[0].1))
        }
    }
}

fn label_q(q: &[Vertex], k: usize) -> (Vec<Vertex>, Vec<Vertex>) {
    let x = q[..=k].to_vec();
    let mut y = vec![q[k + 1]];
    y.extend((1..=k).map(|i| q[2 * k + 2 - i]));
    (x, y)
}

type Rungs = (Vec<Vec<Vertex>>, Vec<Vec<Vertex>>);

/// Rungs `x_i – y_i` for every `Q`, as (forward, backward) vertex lists.
fn rungs<H: PathHost>(
    host: &H,
    qs: &[Vec<Vertex>],
    k: usize,
    rev: Option<(usize, usize)>,
    pool: &VertexSet,
    cfg: &PathConfig,
    seed: RngSeed,
) -> Result<Vec<Rungs>, AbsorbError> {
    let labels: Vec<_> = qs.iter().map(|q| label_q(q, k)).collect();
    match rev {
        None => {
            let reqs: Vec<PathRequest> = labels
                .iter()
                .flat_map(|(x, y)| (1..=k).map(move |i| PathRequest::new(x[i], y[i], k - 1)))
                .collect();
            let routed = connect_pairs_exact(host, &reqs, pool, cfg, seed)?;
            let mut it = routed.paths.into_iter();
            Ok(labels
                .iter()
                .map(|_| {
                    let f: Vec<Vec<Vertex>> = (0..k).map(|_| it.next().expect("one per rung").vertices).collect();
                    let b = f.iter().map(|p| p.iter().rev().copied().collect()).collect();
                    (f, b)
                })
                .collect())
        }
        Some((m, h)) => {
            let mut free = pool.clone();
            let mut out = Vec::with_capacity(labels.len());
            for (a, (x, y)) in labels.iter().enumerate() {
                let (mut f, mut b) = (Vec::new(), Vec::new());
                for i in 1..=k {
                    let rp = build_reversible_path(host, x[i], y[i], &free, m, h, cfg.search_budget, seed.derive((a * 64 + i) as u64))?;
                    for u in rp.vertices() {
                        free.remove(u);
                    }
                    f.push(rp.forward.vertices);
                    b.push(rp.backward.vertices);
                }
                out.push((f, b));
            }
            Ok(out)
        }
    }
}

/// Builds `count` disjoint absorbers for each `(v, count)`, all inside `pool`.
pub fn build_absorbers<H: PathHost>(
    host: &H,
    demands: &[(Vertex, usize)],
    pool: &VertexSet,
    shape: &AbsorberShape,
    cfg: &PathConfig,
    seed: RngSeed,
) -> Result<Vec<Vec<Absorber>>, AbsorbError> {
    let mut rng = seed.rng();
    let mut free = pool.clone();
    for &(v, _) in demands {
        free.remove(v);
    }
    if shape.collapsed() {
        let mut out: Vec<Vec<Absorber>> = demands.iter().map(|_| Vec::new()).collect();
        let mut order: Vec<usize> = demands.iter().enumerate().flat_map(|(i, &(_, c))| std::iter::repeat_n(i, c)).collect();
        order.shuffle(&mut rng);
        for i in order {
            let v = demands[i].0;
            let a = collapsed_absorber(host, v, shape.k, &free, &mut rng).ok_or(AbsorbError::BuildFailed {
                v,
                reason: "no free anchors".into(),
            })?;
            for &u in &a.set {
                free.remove(u);
            }
            out[i].push(a);
        }
        return Ok(out);
    }
    if shape.reversible.is_none() && host.as_graph().is_none() {
        return Err(AbsorbError::BadInput("directed rungs must be reversible".into()));
    }
    let members = free.to_vec();
    let third = members.len() / 3;
    let parts = random_partition(host.n(), &members, &[third, third, members.len() - 2 * third], seed.derive(1));
    let (p1, p2, p3) = (&parts[0], &parts[1], &parts[2]);
    let index: Vec<Vertex> = p1.to_vec();
    let pos = |u: Vertex| index.binary_search(&u).ok();
    let demand: Vec<usize> = demands.iter().map(|d| d.1).collect();
    let ins: Vec<Vec<usize>> = demands
        .iter()
        .map(|&(v, _)| host.step_back(v, Dir::Forward).iter().filter_map(|&u| pos(u)).collect())
        .collect();
    let x0s = generalized_matching(&ins, &demand, index.len()).map_err(AbsorbError::NoMatching)?;
    let taken: Vec<bool> = {
        let mut t = vec![false; index.len()];
        x0s.iter().flatten().for_each(|&j| t[j] = true);
        t
    };
    let outs: Vec<Vec<usize>> = demands
        .iter()
        .map(|&(v, _)| host.step(v, Dir::Forward).iter().filter_map(|&u| pos(u)).filter(|&j| !taken[j]).collect())
        .collect();
    let y1s = generalized_matching(&outs, &demand, index.len()).map_err(AbsorbError::NoMatching)?;
    let k = shape.k;
    if k == 2 && shape.reversible.is_none() {
        let mut free = p2.clone();
        free.union_with(p3);
        let mut out: Vec<Vec<Absorber>> = demands.iter().map(|_| Vec::new()).collect();
        for (i, (xs, ys)) in x0s.iter().zip(&y1s).enumerate() {
            for (&a, &b) in xs.iter().zip(ys) {
                let v = demands[i].0;
                let ab = square_absorber(host, v, index[a], index[b], &free, &mut rng).ok_or(AbsorbError::BuildFailed {
                    v,
                    reason: "no square around the anchors".into(),
                })?;
                ab.set.iter().for_each(|&u| {
                    free.remove(u);
                });
                out[i].push(ab);
            }
        }
        return Ok(out);
    }
    let mut owners = Vec::new();
    let mut qreqs = Vec::new();
    for (i, (xs, ys)) in x0s.iter().zip(&y1s).enumerate() {
        for (&a, &b) in xs.iter().zip(ys) {
            owners.push(i);
            qreqs.push(q_request(index[a], index[b], k));
        }
    }
    let qs = connect_pairs_exact(host, &qreqs, p2, cfg, seed.derive(2))?;
    let qv: Vec<Vec<Vertex>> = qs.paths.into_iter().map(|p| p.vertices).collect();
    let rs = rungs(host, &qv, k, shape.reversible, p3, cfg, seed.derive(3))?;
    let mut out: Vec<Vec<Absorber>> = demands.iter().map(|_| Vec::new()).collect();
    for ((i, q), (f, b)) in owners.into_iter().zip(&qv).zip(rs) {
        let (x, y) = label_q(q, k);
        out[i].push(assemble(&x, &y, demands[i].0, &f, &b));
    }
    Ok(out)
}

/// `k = 2` with single-edge rungs: `x_1 ∈ N(x_0) ∩ N(y_1)`, then `y_2`,
/// `x_2` and `y_0` closing the two squares.
fn square_absorber<H: PathHost, R: Rng>(host: &H, v: Vertex, x0: Vertex, y1: Vertex, free: &VertexSet, rng: &mut R) -> Option<Absorber> {
    let f = Dir::Forward;
    let mut x1s: Vec<Vertex> = host.step(x0, f).iter().copied().filter(|&u| free.contains(u) && host.has_step(u, y1, f)).collect();
    x1s.shuffle(rng);
    for x1 in x1s.into_iter().take(16) {
        let mut y2s: Vec<Vertex> = host.step(y1, f).iter().copied().filter(|&u| free.contains(u) && u != x1).collect();
        y2s.shuffle(rng);
        for y2 in y2s.into_iter().take(16) {
            let Some(x2) = pick_free(host.step(x1, f), free, |u| u != y2 && host.has_step(u, y2, f), rng) else {
                continue;
            };
            let Some(y0) = pick_free(host.step(x2, f), free, |u| ![x1, y2].contains(&u) && host.has_step(u, y2, f), rng) else {
                continue;
            };
            let fwd = [vec![x1, y1], vec![x2, y2]];
            let bwd = [vec![y1, x1], vec![y2, x2]];
            return Some(assemble(&[x0, x1, x2], &[y0, y1, y2], v, &fwd, &bwd));
        }
    }
    None
}

fn collapsed_absorber<H: PathHost, R: Rng>(host: &H, v: Vertex, k: usize, free: &VertexSet, rng: &mut R) -> Option<Absorber> {
    let f = Dir::Forward;
    if k == 0 {
        // x0 → v → y0 and x0 → y0.
        let mut xs: Vec<Vertex> = host.step_back(v, f).iter().copied().filter(|&u| free.contains(u)).collect();
        xs.shuffle(rng);
        for x0 in xs {
            if let Some(y0) = pick_free(host.step(v, f), free, |u| u != x0 && host.has_step(x0, u, f), rng) {
                return Some(assemble(&[x0], &[y0], v, &[], &[]));
            }
        }
        return None;
    }
    // x0 → v → a, x0 → a → y0.
    let mut as_: Vec<Vertex> = host.step(v, f).iter().copied().filter(|&u| free.contains(u)).collect();
    as_.shuffle(rng);
    for a in as_.into_iter().take(64) {
        let Some(x0) = pick_free(host.step_back(v, f), free, |u| u != a && host.has_step(u, a, f), rng) else {
            continue;
        };
        if let Some(y0) = pick_free(host.step(a, f), free, |u| u != x0 && u != a, rng) {
            return Some(assemble(&[x0, a], &[y0, a], v, &[vec![a]], &[vec![a]]));
        }
    }
    None
}

/// How a template's resilience is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resilience {
    /// Every `Z′`.
    Exhaustive,
    /// This many random `Z′` (all of them when there are fewer).
    Sampled(usize),
    Skip,
}

/// Bipartite template on `X` (indices `0..n_x`) and `Y ∪ Z`; right indices
/// `0..m` are `Y`, `m..2m` are `Z`, with `m = 2n_x/3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlexTemplate {
    n_x: usize,
    adj: Vec<Vec<usize>>,
}

impl FlexTemplate {
    pub fn from_adjacency(n_x: usize, adj: Vec<Vec<usize>>) -> Result<Self, AbsorbError> {
        if n_x < 3 || n_x % 3 != 0 || adj.len() != n_x {
            return Err(AbsorbError::BadInput("n_x must be a positive multiple of 3".into()));
        }
        let m = 2 * n_x / 3;
        if adj.iter().flatten().any(|&r| r >= 2 * m) {
            return Err(AbsorbError::BadInput("right index out of range".into()));
        }
        Ok(FlexTemplate { n_x, adj })
    }

    /// Every `x` joined to every right vertex.
    pub fn complete(n_x: usize) -> Self {
        let m = 2 * n_x / 3;
        FlexTemplate {
            n_x,
            adj: vec![(0..2 * m).collect(); n_x],
        }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn m(&self) -> usize {
        2 * self.n_x / 3
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    pub fn right_neighbors(&self, r: usize) -> Vec<usize> {
        (0..self.n_x).filter(|&x| self.adj[x].binary_search(&r).is_ok()).collect()
    }

    pub fn max_degree(&self) -> usize {
        let mut right = vec![0usize; 2 * self.m()];
        self.adj.iter().flatten().for_each(|&r| right[r] += 1);
        let left = self.adj.iter().map(|a| a.len()).max().unwrap_or(0);
        left.max(right.into_iter().max().unwrap_or(0))
    }

    /// Copy with every edge at `x` deleted.
    pub fn without_edges_at(&self, x: usize) -> Self {
        let mut t = self.clone();
        t.adj[x].clear();
        t
    }
}

/// Builds the template as the union of `matchings` random perfect matchings
/// between `X_1` and `Y`, with `Z` a copy of `Y` and `X_2` a copy of half of
/// `X_1`; resamples until the resilience check passes.
pub fn build_flex_template(
    n_x: usize,
    matchings: usize,
    verify: Resilience,
    retries: usize,
    seed: RngSeed,
) -> Result<FlexTemplate, AbsorbError> {
    if n_x < 3 || n_x % 3 != 0 {
        return Err(AbsorbError::BadInput("n_x must be a positive multiple of 3".into()));
    }
    if matchings == 0 {
        return Err(AbsorbError::BadInput("need at least one matching".into()));
    }
    let m = 2 * n_x / 3;
    for attempt in 0..retries.max(1) {
        let mut rng = seed.derive(attempt as u64).rng();
        let mut x1: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut perm: Vec<usize> = (0..m).collect();
        for _ in 0..matchings {
            perm.shuffle(&mut rng);
            for (x, &y) in perm.iter().enumerate() {
                x1[x].push(y);
            }
        }
        for a in x1.iter_mut() {
            a.sort_unstable();
            a.dedup();
            let z: Vec<usize> = a.iter().map(|&y| y + m).collect();
            a.extend(z);
        }
        let mut copies: Vec<usize> = (0..m).collect();
        copies.shuffle(&mut rng);
        let mut adj = x1.clone();
        adj.extend(copies[..m / 2].iter().map(|&x| x1[x].clone()));
        let t = FlexTemplate { n_x, adj };
        if check_resilience(&t, verify, seed.derive(1000 + attempt as u64)).is_ok() {
            return Ok(t);
        }
    }
    Err(AbsorbError::ResampleExhausted(retries.max(1)))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Checks that `X` matches into `Y ∪ Z′` for the chosen `Z′`. Returns the
/// number of subsets checked, or the first failing `Z′` (indices into `Z`).
pub fn check_resilience(h: &FlexTemplate, verify: Resilience, seed: RngSeed) -> Result<usize, Vec<usize>> {
    let m = h.m();
    let want = h.n_x / 3;
    let total = binomial(m, want);
    let try_one = |z: &[usize]| resilient_match(h, z).is_ok();
    let all = match verify {
        Resilience::Skip => return Ok(0),
        Resilience::Exhaustive => true,
        Resilience::Sampled(s) => total <= s as f64,
    };
    if all {
        let mut z: Vec<usize> = (0..want).collect();
        let mut count = 0;
        loop {
            count += 1;
            if !try_one(&z) {
                return Err(z);
            }
            // Next combination in lexicographic order.
            let mut i = want;
            while i > 0 && z[i - 1] == m - want + i - 1 {
                i -= 1;
            }
            if i == 0 {
                return Ok(count);
            }
            z[i - 1] += 1;
            for j in i..want {
                z[j] = z[j - 1] + 1;
            }
        }
    }
    let Resilience::Sampled(s) = verify else { unreachable!() };
    let mut rng = seed.rng();
    let mut ids: Vec<usize> = (0..m).collect();
    for _ in 0..s {
        ids.shuffle(&mut rng);
        let mut z = ids[..want].to_vec();
        z.sort_unstable();
        if !try_one(&z) {
            return Err(z);
        }
    }
    Ok(s)
}

/// Perfect matching of `X` into `Y ∪ Z′`; entry `x` is the matched right index.
pub fn resilient_match(h: &FlexTemplate, z_prime: &[usize]) -> Result<Vec<usize>, AbsorbError> {
    let m = h.m();
    if z_prime.len() != h.n_x / 3 || z_prime.iter().any(|&z| z >= m) {
        return Err(AbsorbError::BadInput(format!("Z′ must be {} indices below {m}", h.n_x / 3)));
    }
    let mut allowed = vec![false; 2 * m];
    allowed[..m].iter_mut().for_each(|a| *a = true);
    z_prime.iter().for_each(|&z| allowed[m + z] = true);
    let adj: Vec<Vec<usize>> = h.adj.iter().map(|a| a.iter().copied().filter(|&r| allowed[r]).collect()).collect();
    perfect_left_matching(&adj, 2 * m).map_err(AbsorbError::NoMatching)
}

/// Absorbers chained by links: `x → parts[0] → … → parts[t−1] → y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedAbsorber {
    pub x: Vertex,
    pub y: Vertex,
    pub parts: Vec<Absorber>,
    pub links: Vec<ExactPath>,
}

impl MergedAbsorber {
    pub fn new(x: Vertex, y: Vertex, parts: Vec<Absorber>, links: Vec<ExactPath>) -> Result<Self, String> {
        if links.len() != parts.len() + 1 {
            return Err("need one more link than parts".into());
        }
        let ends: Vec<(Vertex, Vertex)> = std::iter::once(x)
            .chain(parts.iter().map(|p| p.s))
            .zip(parts.iter().map(|p| p.r).chain(std::iter::once(y)))
            .collect();
        for (l, (a, b)) in links.iter().zip(ends) {
            if l.vertices.first() != Some(&a) || l.vertices.last() != Some(&b) {
                return Err(format!("link does not join {a} to {b}"));
            }
        }
        Ok(MergedAbsorber { x, y, parts, links })
    }

    pub fn absorbable(&self) -> Vec<Vertex> {
        self.parts.iter().map(|p| p.v).collect()
    }

    /// The traversal absorbing `absorb` (or skipping everything).
    pub fn traverse(&self, absorb: Option<Vertex>) -> Option<ExactPath> {
        if absorb.is_some_and(|v| !self.parts.iter().any(|p| p.v == v)) {
            return None;
        }
        let mut out: Vec<Vertex> = Vec::new();
        let mut push = |vs: &[Vertex]| {
            let skip = usize::from(out.last() == vs.first() && !out.is_empty());
            out.extend_from_slice(&vs[skip..]);
        };
        push(&self.links[0].vertices);
        for (p, l) in self.parts.iter().zip(&self.links[1..]) {
            let through = if Some(p.v) == absorb {
                &p.absorb_path
            } else {
                &p.skip_path
            };
            push(&through.vertices);
            push(&l.vertices);
        }
        Some(ExactPath { vertices: out })
    }

    /// Vertices of the skip traversal.
    pub fn vertices(&self) -> Vec<Vertex> {
        self.traverse(None).expect("skip traversal").vertices
    }

    pub fn validate<H: PathHost>(&self, host: &H) -> Result<(), String> {
        for v in std::iter::once(None).chain(self.absorbable().into_iter().map(Some)) {
            let p = self.traverse(v).expect("absorbable");
            if !is_walk(host, &p.vertices) {
                return Err(format!("traversal absorbing {v:?} is not a host path"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct StructureConfig {
    /// Random matchings in the template (the maximum degree is twice this).
    pub matchings: usize,
    pub shape: AbsorberShape,
    pub resilience: Resilience,
    pub template_retries: usize,
    /// Shortest link allowed between consecutive absorbers.
    pub min_link: usize,
    pub retries: usize,
    pub paths: PathConfig,
}

impl Default for StructureConfig {
    fn default() -> Self {
        StructureConfig {
            matchings: 3,
            shape: AbsorberShape::default(),
            resilience: Resilience::Sampled(200),
            template_retries: 50,
            min_link: 2,
            retries: 4,
            paths: PathConfig::default(),
        }
    }
}

/// Merged absorbers `(S_j, x_j, y_j)` wired by a template to `A ∪ B`.
#[derive(Clone, Debug)]
pub struct AbsorbingStructure {
    /// Vertices per finished path.
    pub l: usize,
    pub merged: Vec<MergedAbsorber>,
    pub template: FlexTemplate,
    /// Right indices `m..2m` of the template.
    pub a: Vec<Vertex>,
    /// Right indices `0..m` of the template.
    pub b: Vec<Vertex>,
    /// `W′`: every non-end vertex of the merged absorbers, plus `B`.
    pub footprint: VertexSet,
}

impl AbsorbingStructure {
    pub fn r(&self) -> usize {
        self.a.len() / 2
    }

    fn right_vertex(&self, idx: usize) -> Vertex {
        let m = self.template.m();
        if idx < m {
            self.b[idx]
        } else {
            self.a[idx - m]
        }
    }

    /// `3r` disjoint `x_j, y_j`-paths with `l` vertices covering `W′ ∪ A′`.
    pub fn absorb(&self, a_prime: &[Vertex]) -> Result<Vec<ExactPath>, AbsorbError> {
        let mut z: Vec<usize> = Vec::with_capacity(a_prime.len());
        for &v in a_prime {
            let i = self
                .a
                .iter()
                .position(|&a| a == v)
                .ok_or_else(|| AbsorbError::BadInput(format!("{v} is not absorbable")))?;
            z.push(i);
        }
        z.sort_unstable();
        z.dedup();
        if z.len() != self.r() {
            return Err(AbsorbError::BadInput(format!("need {} distinct vertices of A", self.r())));
        }
        let matching = resilient_match(&self.template, &z)?;
        Ok(matching
            .iter()
            .zip(&self.merged)
            .map(|(&idx, s)| s.traverse(Some(self.right_vertex(idx))).expect("wired by the template"))
            .collect())
    }

    /// One line per index: ends, `S_j`, and the vertices it can absorb.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (j, s) in self.merged.iter().enumerate() {
            let set: Vec<String> = s.vertices().iter().map(|v| v.to_string()).collect();
            let abs: Vec<String> = s.absorbable().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{j} {} {} | {} | {}", s.x, s.y, set.join(" "), abs.join(" "));
        }
        out
    }
}

impl fmt::Display for AbsorbingStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// See [`AbsorbingStructure::absorb`].
pub fn absorb(structure: &AbsorbingStructure, a_prime: &[Vertex]) -> Result<Vec<ExactPath>, AbsorbError> {
    structure.absorb(a_prime)
}

fn split_evenly(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| total / parts + usize::from(i < total % parts)).collect()
}

/// Builds a structure for the pairs `(xs[j], ys[j])` inside `W`, absorbing any
/// half of `A` (`|A| = 2r`, `3r` pairs) into paths of exactly `l` vertices.
#[allow(clippy::too_many_arguments)]
pub fn build_absorbing_structure<H: PathHost>(
    host: &H,
    a: &[Vertex],
    w: &VertexSet,
    xs: &[Vertex],
    ys: &[Vertex],
    l: usize,
    cfg: &StructureConfig,
    seed: RngSeed,
) -> Result<AbsorbingStructure, AbsorbError> {
    let n = host.n();
    let r = a.len() / 2;
    if a.is_empty() || a.len() % 2 != 0 {
        return Err(AbsorbError::BadInput("|A| must be even and positive".into()));
    }
    if xs.len() != 3 * r || ys.len() != 3 * r {
        return Err(AbsorbError::BadInput(format!("need {} pairs", 3 * r)));
    }
    let mut seen = VertexSet::new(n);
    for &v in a.iter().chain(xs).chain(ys) {
        if v >= n || w.contains(v) || !seen.insert(v) {
            return Err(AbsorbError::BadInput(format!("vertex {v} repeated or inside W")));
        }
    }
    let mut last = AbsorbError::BadInput("no attempts".into());
    for attempt in 0..cfg.retries.max(1) {
        match structure_attempt(host, a, w, xs, ys, l, cfg, seed.derive(attempt as u64)) {
            Ok(s) => return Ok(s),
            Err(e @ AbsorbError::BadInput(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[allow(clippy::too_many_arguments)]
fn structure_attempt<H: PathHost>(
    host: &H,
    a: &[Vertex],
    w: &VertexSet,
    xs: &[Vertex],
    ys: &[Vertex],
    l: usize,
    cfg: &StructureConfig,
    seed: RngSeed,
) -> Result<AbsorbingStructure, AbsorbError> {
    let n = host.n();
    let r = a.len() / 2;
    let template = build_flex_template(3 * r, cfg.matchings, cfg.resilience, cfg.template_retries, seed.derive(2))
        .map_err(staged("template"))?;
    let m = template.m();
    // Split W by need: B, the absorber pool, and the link pool.
    let members = w.to_vec();
    let rest = members.len().checked_sub(2 * r).ok_or_else(|| AbsorbError::BadInput("W too small for B".into()))?;
    let need_abs = (0..3 * r).map(|j| template.neighbors(j).len()).sum::<usize>() * cfg.shape.size();
    let need_links = (3 * r * l.saturating_sub(3)).saturating_sub(need_abs).max(1);
    let abs_share = (rest as f64 * need_abs as f64 / (need_abs + need_links) as f64).round() as usize;
    let parts = random_partition(n, &members, &[2 * r, abs_share, rest - abs_share], seed.derive(1));
    let b: Vec<Vertex> = parts[0].to_vec();
    let right = |idx: usize| if idx < m { b[idx] } else { a[idx - m] };
    let wired: Vec<Vec<usize>> = (0..2 * m).map(|idx| template.right_neighbors(idx)).collect();
    let demands: Vec<(Vertex, usize)> = (0..2 * m).map(|idx| (right(idx), wired[idx].len())).collect();
    let built = build_absorbers(host, &demands, &parts[1], &cfg.shape, &cfg.paths, seed.derive(3)).map_err(staged("absorbers"))?;
    for list in &built {
        for ab in list {
            ab.validate(host).map_err(|e| AbsorbError::BuildFailed { v: ab.v, reason: e })?;
        }
    }

    let mut requests = Vec::new();
    let mut plans = Vec::new();
    for j in 0..3 * r {
        let chosen: Vec<Absorber> = template
            .neighbors(j)
            .iter()
            .map(|&idx| {
                let slot = wired[idx].binary_search(&j).expect("symmetric wiring");
                built[idx][slot].clone()
            })
            .collect();
        let t = chosen.len();
        let fixed = 2 + chosen.iter().map(|p| p.size()).sum::<usize>();
        let total = (l + t).checked_sub(fixed).filter(|&s| s >= (t + 1) * cfg.min_link.max(1)).ok_or_else(|| {
            AbsorbError::BadInput(format!(
                "paths with {l} vertices cannot hold {t} absorbers of total size {}",
                fixed - 2
            ))
        })?;
        let ends: Vec<(Vertex, Vertex)> = std::iter::once(xs[j])
            .chain(chosen.iter().map(|p| p.s))
            .zip(chosen.iter().map(|p| p.r).chain(std::iter::once(ys[j])))
            .collect();
        for ((u, v), len) in ends.into_iter().zip(split_evenly(total, t + 1)) {
            requests.push(PathRequest::forward(u, v, len));
        }
        plans.push(chosen);
    }
    let links = connect_pairs_exact(host, &requests, &parts[2], &cfg.paths, seed.derive(4)).map_err(|e| staged("links")(e.into()))?;
    let mut it = links.paths.into_iter();
    let mut merged = Vec::with_capacity(3 * r);
    let mut footprint = VertexSet::from_iter(n, b.iter().copied());
    for (j, chosen) in plans.into_iter().enumerate() {
        let ls: Vec<ExactPath> = (0..=chosen.len()).map(|_| it.next().expect("one per link")).collect();
        let s = MergedAbsorber::new(xs[j], ys[j], chosen, ls).map_err(AbsorbError::BadInput)?;
        debug_assert_eq!(s.vertices().len(), l - 1);
        for v in s.vertices() {
            if v != xs[j] && v != ys[j] {
                footprint.insert(v);
            }
        }
        merged.push(s);
    }
    debug_assert_eq!(footprint.len(), 3 * r * (l - 2) - r);
    Ok(AbsorbingStructure {
        l,
        merged,
        template,
        a: a.to_vec(),
        b,
        footprint,
    })
}

/// Which part of a cover failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverPhase {
    Input,
    Reduction,
    AbsorberBuild,
    Endgame,
    Absorb,
}

impl fmt::Display for CoverPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverPhase::Input => "input",
            CoverPhase::Reduction => "reduction",
            CoverPhase::AbsorberBuild => "absorber-build",
            CoverPhase::Endgame => "endgame",
            CoverPhase::Absorb => "absorb",
        })
    }
}

#[derive(Debug, Error)]
#[error("cover failed during {phase}: {detail}")]
pub struct CoverError {
    pub phase: CoverPhase,
    pub detail: String,
}

fn cover_err(phase: CoverPhase) -> impl Fn(String) -> CoverError {
    move |detail| CoverError { phase, detail }
}

#[derive(Clone, Debug)]
pub struct CoverConfig {
    /// Upper bound on `r`: the structure takes `3r` pairs and absorbs `r` of
    /// `2r` reserved vertices. Capped at a ninth of the pairs (at least 1),
    /// and 0 below four pairs.
    pub absorbable: usize,
    /// Share of the free vertices left out of the first routing and later
    /// inserted into paths one at a time.
    pub fill_fraction: f64,
    /// Reduce longer paths to segments of this many vertices first.
    pub base_len: Option<usize>,
    pub structure: StructureConfig,
    pub paths: PathConfig,
    pub retries: usize,
    /// Instances with at most this many vertices are solved by joint search.
    pub exhaustive_below: usize,
    pub exhaustive_budget: usize,
    /// Cap on ejection chains while inserting leftover vertices.
    pub repair_steps: usize,
    /// Optional sampled expansion check of the host into `W` with this factor.
    pub verify: Option<f64>,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            absorbable: 3,
            fill_fraction: 0.4,
            base_len: None,
            structure: StructureConfig::default(),
            paths: PathConfig::default(),
            retries: 5,
            exhaustive_below: 16,
            exhaustive_budget: 2_000_000,
            repair_steps: 2_000,
            verify: None,
        }
    }
}

/// Every path realises its pair with exactly `l` vertices and together they
/// partition the host's vertices.
pub fn cover_is_partition<H: PathHost>(host: &H, pairs: &[(Vertex, Vertex)], l: usize, paths: &[ExactPath]) -> bool {
    if paths.len() != pairs.len() {
        return false;
    }
    let mut seen = VertexSet::new(host.n());
    for (p, &(x, y)) in paths.iter().zip(pairs) {
        let vs = &p.vertices;
        if vs.len() != l || vs[0] != x || vs[l - 1] != y || !is_walk(host, vs) {
            return false;
        }
        if !vs.iter().all(|&v| seen.insert(v)) {
            return false;
        }
    }
    seen.len() == host.n()
}

/// Covers `G` with `n / l` disjoint paths of `l` vertices, the `i`-th joining
/// `pairs[i]`.
pub fn cover_with_paths(
    g: &Graph,
    pairs: &[(Vertex, Vertex)],
    l: usize,
    cfg: &CoverConfig,
    seed: RngSeed,
) -> Result<Vec<ExactPath>, CoverError> {
    let w = check_cover_input(g, pairs, l)?;
    if let Some(d) = cfg.verify {
        let rep = check_expands_into(g, &w, d, &CheckConfig::sampled(500, seed.derive(u64::MAX)))
            .map_err(|e| cover_err(CoverPhase::Input)(e.to_string()))?;
        if !rep.holds {
            return Err(cover_err(CoverPhase::Input)(format!("host does not {d}-expand into W")));
        }
    }
    cover_generic(g, pairs, l, cfg, seed)
}

/// Directed version: every path runs `x_i → y_i` along arcs.
pub fn cover_with_paths_directed(
    d: &DiGraph,
    pairs: &[(Vertex, Vertex)],
    k: usize,
    cfg: &CoverConfig,
    seed: RngSeed,
) -> Result<Vec<ExactPath>, CoverError> {
    check_cover_input(d, pairs, k)?;
    if let Some(f) = cfg.verify {
        let bad = check_directed_expansion(d, f, 500, seed.derive(u64::MAX))
            .map_err(|e| cover_err(CoverPhase::Input)(e.to_string()))?;
        if let Some(x) = bad {
            return Err(cover_err(CoverPhase::Input)(format!("set {x:?} does not expand")));
        }
    }
    cover_generic(d, pairs, k, cfg, seed)
}

fn check_cover_input<H: PathHost>(host: &H, pairs: &[(Vertex, Vertex)], l: usize) -> Result<VertexSet, CoverError> {
    let n = host.n();
    let bad = cover_err(CoverPhase::Input);
    if l < 2 || n % l != 0 || pairs.len() * l != n {
        return Err(bad(format!("need n/l pairs with l ≥ 2 dividing n = {n}")));
    }
    let mut ends = VertexSet::new(n);
    for &(x, y) in pairs {
        if x >= n || y >= n || !ends.insert(x) || !ends.insert(y) {
            return Err(bad(format!("pair ({x}, {y}) repeats a vertex or is out of range")));
        }
    }
    let mut w = VertexSet::full(n);
    w.difference_with(&ends);
    Ok(w)
}

fn cover_generic<H: PathHost>(
    host: &H,
    pairs: &[(Vertex, Vertex)],
    l: usize,
    cfg: &CoverConfig,
    seed: RngSeed,
) -> Result<Vec<ExactPath>, CoverError> {
    let n = host.n();
    let live = VertexSet::full(n);
    if n <= cfg.exhaustive_below {
        let w = check_cover_input(host, pairs, l)?;
        let reqs: Vec<PathRequest> = pairs.iter().map(|&(x, y)| PathRequest::forward(x, y, l - 1)).collect();
        return route_exhaustively(host, &reqs, &w, cfg.exhaustive_budget)
            .ok_or_else(|| cover_err(CoverPhase::Endgame)("no exact cover exists within the search budget".into()));
    }
    let mut last = cover_err(CoverPhase::Input)("no attempts".into());
    for attempt in 0..cfg.retries.max(1) {
        let s = seed.derive(attempt as u64);
        let out = match cfg.base_len {
            Some(l0) if l > l0 => reduce_and_cover(host, &live, pairs, l, l0, cfg, s),
            _ => cover_base(host, &live, pairs, l, cfg, s),
        };
        match out {
            Ok(paths) => {
                assert!(cover_is_partition(host, pairs, l, &paths), "cover postcondition");
                return Ok(paths);
            }
            Err(e) if e.phase == CoverPhase::Input => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Splits each path into a short prefix and `q` segments of `l0` vertices
/// joined by greedily chosen edges, covers the segments, and stitches.
fn reduce_and_cover<H: PathHost>(
    host: &H,
    live: &VertexSet,
    pairs: &[(Vertex, Vertex)],
    l: usize,
    l0: usize,
    cfg: &CoverConfig,
    seed: RngSeed,
) -> Result<Vec<ExactPath>, CoverError> {
    let fail = cover_err(CoverPhase::Reduction);
    let (q, rem) = (l / l0, l % l0);
    let mut rng = seed.rng();
    let mut free = live.clone();
    for &(x, y) in pairs {
        free.remove(x);
        free.remove(y);
    }
    let f = Dir::Forward;
    let mut prefixes = Vec::with_capacity(pairs.len());
    for &(x, _) in pairs {
        let mut walk = vec![x];
        while walk.len() <= rem {
            let cur = *walk.last().expect("non-empty");
            let mut c: Vec<Vertex> = host.step(cur, f).iter().copied().filter(|&u| free.contains(u)).collect();
            c.shuffle(&mut rng);
            // Prefer a continuation that is not a dead end.
            let next = c
                .iter()
                .copied()
                .find(|&u| host.step(u, f).iter().any(|&w| w != u && free.contains(w)))
                .or_else(|| c.first().copied())
                .ok_or_else(|| fail(format!("prefix walk from {x} is stuck")))?;
            free.remove(next);
            walk.push(next);
        }
        prefixes.push(walk);
    }
    let mut joints = Vec::with_capacity(pairs.len() * (q - 1));
    for _ in 0..pairs.len() * (q - 1) {
        let mut found = None;
        let pool = free.to_vec();
        for _ in 0..pool.len().max(1) {
            let &u = pool.choose(&mut rng).ok_or_else(|| fail("no vertices left for joints".into()))?;
            if let Some(v) = pick_free(host.step(u, f), &free, |v| v != u, &mut rng) {
                found = Some((u, v));
                break;
            }
        }
        let (u, v) = found.ok_or_else(|| fail("no free edge for a joint".into()))?;
        free.remove(u);
        free.remove(v);
        joints.push((u, v));
    }
    let mut inner = live.clone();
    let mut seg_pairs = Vec::with_capacity(pairs.len() * q);
    let mut it = joints.iter();
    for (p, &(_, y)) in prefixes.iter().zip(pairs) {
        for &u in &p[..rem] {
            inner.remove(u);
        }
        let mut start = p[rem];
        for _ in 1..q {
            let &(u, v) = it.next().expect("joint per gap");
            seg_pairs.push((start, u));
            start = v;
        }
        seg_pairs.push((start, y));
    }
    let segs = cover_base(host, &inner, &seg_pairs, l0, cfg, seed.derive(1))?;
    let mut out = Vec::with_capacity(pairs.len());
    for (i, p) in prefixes.iter().enumerate() {
        let mut vs = p[..rem].to_vec();
        for s in &segs[i * q..(i + 1) * q] {
            vs.extend_from_slice(&s.vertices);
        }
        out.push(ExactPath { vertices: vs });
    }
    Ok(out)
}

/// Cover of `live` by paths of `l` vertices between `pairs`: the structure
/// takes the first `3r` pairs, the rest are routed short through the
/// remainder, leftover vertices are inserted, and the final `r` reserved
/// vertices are absorbed.
fn cover_base<H: PathHost>(
    host: &H,
    live: &VertexSet,
    pairs: &[(Vertex, Vertex)],
    l: usize,
    cfg: &CoverConfig,
    seed: RngSeed,
) -> Result<Vec<ExactPath>, CoverError> {
    let n = host.n();
    let count = pairs.len();
    let r = if count < 4 { 0 } else { cfg.absorbable.min((count / 9).max(1)) };
    if r > 0 && 3 * r >= count {
        return Err(cover_err(CoverPhase::Input)(format!("{count} pairs leave none outside a structure of {}", 3 * r)));
    }
    let mut w = live.clone();
    for &(x, y) in pairs {
        w.remove(x);
        w.remove(y);
    }
    let mut rng = seed.rng();
    let mut members = w.to_vec();
    members.shuffle(&mut rng);
    let a: Vec<Vertex> = members[..2 * r].to_vec();
    let mut rest = w.clone();
    a.iter().for_each(|&v| {
        rest.remove(v);
    });
    let structure = if r > 0 {
        let xs: Vec<Vertex> = pairs[..3 * r].iter().map(|p| p.0).collect();
        let ys: Vec<Vertex> = pairs[..3 * r].iter().map(|p| p.1).collect();
        let s = build_absorbing_structure(host, &a, &rest, &xs, &ys, l, &cfg.structure, seed.derive(1))
            .map_err(|e| cover_err(CoverPhase::AbsorberBuild)(e.to_string()))?;
        rest.difference_with(&s.footprint);
        Some(s)
    } else {
        None
    };
    let others = &pairs[3 * r..];
    let need = others.len() * (l - 2);
    if rest.len() + r != need {
        return Err(cover_err(CoverPhase::Input)(format!("vertex count mismatch: {} + {r} ≠ {need}", rest.len())));
    }
    let room = others.len() * (l - 2);
    let left = ((rest.len() as f64 * cfg.fill_fraction).round() as usize).min(room.saturating_sub(others.len()));
    // Every route keeps at least one interior vertex.
    let short = split_evenly((left + r).min(room - others.len()), others.len());
    let reqs: Vec<PathRequest> = others
        .iter()
        .zip(&short)
        .map(|(&(x, y), &d)| PathRequest::forward(x, y, l - 1 - d))
        .collect();
    let routed = connect_pairs_exact(host, &reqs, &rest, &cfg.paths, seed.derive(2))
        .map_err(|e| cover_err(CoverPhase::Endgame)(e.to_string()))?;
    let mut used = VertexSet::new(n);
    routed.paths.iter().flat_map(|p| p.vertices.iter()).for_each(|&v| {
        used.insert(v);
    });
    let free_z: Vec<Vertex> = rest.iter().filter(|&v| !used.contains(v)).collect();
    let mut filler = Filler {
        host,
        paths: routed.paths.into_iter().map(|p| p.vertices).collect(),
        target: l,
        in_a: VertexSet::from_iter(n, a.iter().copied()),
        rng: seed.derive(3).rng(),
        steps: cfg.repair_steps,
    };
    let leftover = filler.fill(free_z, a.clone()).map_err(cover_err(CoverPhase::Endgame))?;
    let mut out = Vec::with_capacity(count);
    if let Some(s) = &structure {
        out.extend(s.absorb(&leftover).map_err(|e| cover_err(CoverPhase::Absorb)(e.to_string()))?);
    } else if !leftover.is_empty() {
        return Err(cover_err(CoverPhase::Endgame)("vertices left over with nothing to absorb them".into()));
    }
    out.extend(filler.paths.into_iter().map(|vertices| ExactPath { vertices }));
    Ok(out)
}

/// Inserts leftover vertices into short paths until every path is full,
/// using ejection chains when no direct insertion exists.
struct Filler<'a, H: PathHost> {
    host: &'a H,
    paths: Vec<Vec<Vertex>>,
    target: usize,
    in_a: VertexSet,
    rng: ChaCha8Rng,
    steps: usize,
}

impl<H: PathHost> Filler<'_, H> {
    fn spots(&self, u: Vertex, p: usize) -> Vec<usize> {
        let f = Dir::Forward;
        self.paths[p]
            .windows(2)
            .enumerate()
            .filter(|(_, w)| self.host.has_step(w[0], u, f) && self.host.has_step(u, w[1], f))
            .map(|(i, _)| i + 1)
            .collect()
    }

    fn ejectable(&self, p: usize, keep: Vertex) -> Vec<usize> {
        let vs = &self.paths[p];
        (1..vs.len() - 1)
            .filter(|&i| vs[i] != keep && self.host.has_step(vs[i - 1], vs[i + 1], Dir::Forward))
            .collect()
    }

    fn deficient(&self) -> Vec<usize> {
        (0..self.paths.len()).filter(|&p| self.paths[p].len() < self.target).collect()
    }

    fn try_direct(&mut self, u: Vertex) -> bool {
        let mut opts: Vec<(usize, usize)> = Vec::new();
        for p in self.deficient() {
            opts.extend(self.spots(u, p).into_iter().map(|i| (p, i)));
        }
        match opts.choose(&mut self.rng) {
            Some(&(p, i)) => {
                self.paths[p].insert(i, u);
                true
            }
            None => false,
        }
    }

    /// Places `u`, possibly displacing others. Returns the reserved vertex
    /// freed along the way, if any.
    fn place(&mut self, u: Vertex, free_reserved: bool) -> Result<Option<Vertex>, String> {
        let mut cur = u;
        for _ in 0..self.steps {
            if self.try_direct(cur) {
                return Ok(None);
            }
            let mut opts: Vec<(usize, usize)> = Vec::new();
            for p in 0..self.paths.len() {
                opts.extend(self.spots(cur, p).into_iter().map(|i| (p, i)));
            }
            opts.shuffle(&mut self.rng);
            let mut moved = false;
            for (p, i) in opts.into_iter().take(8) {
                self.paths[p].insert(i, cur);
                let ej = self.ejectable(p, cur);
                let reserved: Vec<usize> = ej.iter().copied().filter(|&j| self.in_a.contains(self.paths[p][j])).collect();
                if free_reserved {
                    if let Some(&j) = reserved.choose(&mut self.rng) {
                        return Ok(Some(self.paths[p].remove(j)));
                    }
                }
                let plain: Vec<usize> = ej.into_iter().filter(|&j| !self.in_a.contains(self.paths[p][j])).collect();
                if let Some(&j) = plain.choose(&mut self.rng) {
                    cur = self.paths[p].remove(j);
                    moved = true;
                    break;
                }
                self.paths[p].remove(i);
            }
            if !moved {
                return Err(format!("vertex {cur} has no insertion point"));
            }
        }
        Err(format!("ejection chain from {u} exceeded {} steps", self.steps))
    }

    /// Inserts every vertex of `free_z`, then reserved vertices until all
    /// paths are full. Returns the reserved vertices still unused.
    fn fill(&mut self, mut free_z: Vec<Vertex>, mut free_a: Vec<Vertex>) -> Result<Vec<Vertex>, String> {
        while !free_z.is_empty() {
            // Most constrained first.
            let def = self.deficient();
            let (at, _) = free_z
                .iter()
                .enumerate()
                .map(|(i, &u)| (i, def.iter().map(|&p| self.spots(u, p).len()).sum::<usize>()))
                .min_by_key(|&(i, c)| (c, i))
                .expect("non-empty");
            let u = free_z.swap_remove(at);
            if let Some(a) = self.place(u, true)? {
                free_a.push(a);
            }
        }
        free_a.sort_unstable();
        loop {
            let missing: usize = self.paths.iter().map(|p| self.target - p.len()).sum();
            if missing == 0 {
                return Ok(free_a);
            }
            if missing > free_a.len() {
                return Err("more room than reserved vertices".into());
            }
            let direct = (0..free_a.len()).find(|&i| {
                let u = free_a[i];
                self.deficient().iter().any(|&p| !self.spots(u, p).is_empty())
            });
            let i = match direct {
                Some(i) => i,
                None => self.rng.random_range(0..free_a.len()),
            };
            let u = free_a.remove(i);
            self.place(u, false)?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_gnp, gen_gnp_directed};

    #[test]
    fn synthetic_absorber_validates() {
        // r=0, a=1, s=2, v=3.
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 3), (3, 1)]).unwrap();
        let ab = Absorber {
            set: vec![0, 1, 2],
            r: 0,
            s: 2,
            v: 3,
            skip_path: ExactPath { vertices: vec![0, 1, 2] },
            absorb_path: ExactPath { vertices: vec![0, 3, 1, 2] },
        };
        assert!(ab.validate(&g).is_ok());
        let mut broken = ab.clone();
        broken.absorb_path.vertices = vec![0, 3, 2];
        assert!(broken.validate(&g).is_err());
    }

    #[test]
    fn absorber_k2_in_complete_graph() {
        let g = Graph::complete(20);
        let w2 = VertexSet::from_iter(20, 3..11);
        let w3 = VertexSet::from_iter(20, 11..20);
        let ab = build_absorber(&g, 0, (1, 2), &w2, &w3, &AbsorberShape::plain(2), &PathConfig::default(), RngSeed::new(0)).unwrap();
        assert_eq!(ab.size(), 6);
        ab.validate(&g).unwrap();
    }

    #[test]
    fn absorber_k3_odd_case() {
        let g = gen_gnp(200, 0.3, RngSeed::new(8)).unwrap();
        let v = 0;
        let nb = g.neighbors(v);
        let (x0, y1) = (nb[0], nb[1]);
        let rest: Vec<Vertex> = (1..200).filter(|&u| u != x0 && u != y1).collect();
        let half = rest.len() / 2;
        let w2 = VertexSet::from_iter(200, rest[..half].iter().copied());
        let w3 = VertexSet::from_iter(200, rest[half..].iter().copied());
        let ab = build_absorber(&g, v, (x0, y1), &w2, &w3, &AbsorberShape::plain(3), &PathConfig::default(), RngSeed::new(1)).unwrap();
        assert_eq!(ab.size(), 11);
        ab.validate(&g).unwrap();
    }

    #[test]
    fn batch_absorbers_are_disjoint() {
        let g = gen_gnp(400, 0.2, RngSeed::new(2)).unwrap();
        let pool = VertexSet::from_iter(400, 10..400);
        for shape in [AbsorberShape::plain(0), AbsorberShape::plain(1), AbsorberShape::plain(2)] {
            let built = build_absorbers(&g, &[(0, 3), (1, 2)], &pool, &shape, &PathConfig::default(), RngSeed::new(5)).unwrap();
            let mut seen = VertexSet::new(400);
            for (list, want) in built.iter().zip([3, 2]) {
                assert_eq!(list.len(), want);
                for ab in list {
                    ab.validate(&g).unwrap();
                    assert_eq!(ab.size(), shape.size());
                    assert!(ab.set.iter().all(|&u| seen.insert(u)));
                }
            }
        }
    }

    #[test]
    fn reversible_path_minimal() {
        let d = DiGraph::complete(8);
        let pool = VertexSet::from_iter(8, 2..8);
        let rp = build_reversible_path(&d, 0, 1, &pool, 1, 1, 1000, RngSeed::new(0)).unwrap();
        rp.validate(&d).unwrap();
        assert_eq!(rp.vertices().len(), 4);
    }

    #[test]
    fn directed_absorber_with_reversible_rungs() {
        let d = gen_gnp_directed(300, 0.3, RngSeed::new(4)).unwrap();
        let pool = VertexSet::from_iter(300, 5..300);
        let shape = AbsorberShape { k: 2, reversible: Some((2, 2)) };
        let built = build_absorbers(&d, &[(0, 2)], &pool, &shape, &PathConfig::default(), RngSeed::new(1)).unwrap();
        for ab in &built[0] {
            ab.validate(&d).unwrap();
            assert_eq!(ab.size(), shape.size());
        }
    }

    #[test]
    fn template_small_exhaustive() {
        let t = build_flex_template(6, 20, Resilience::Exhaustive, 20, RngSeed::new(0)).unwrap();
        assert_eq!(t.m(), 4);
        assert!(t.max_degree() <= 40);
        assert_eq!(check_resilience(&t, Resilience::Exhaustive, RngSeed::new(1)), Ok(6));
    }

    #[test]
    fn corrupt_template_certificate() {
        let t = FlexTemplate::complete(6);
        assert!(resilient_match(&t, &[0, 1]).is_ok());
        let bad = t.without_edges_at(2);
        match resilient_match(&bad, &[0, 1]) {
            Err(AbsorbError::NoMatching(h)) => assert_eq!(h.deficient, vec![2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn merging_two_absorbers() {
        // Absorbers (0,1,2) for 9 and (4,5,6) for 8, linked by 2-3-4.
        let g = Graph::from_edges(
            10,
            &[(0, 1), (1, 2), (0, 9), (9, 1), (2, 3), (3, 4), (4, 5), (5, 6), (4, 8), (8, 5)],
        )
        .unwrap();
        let mk = |r, a, s, v| Absorber {
            set: vec![r, a, s],
            r,
            s,
            v,
            skip_path: ExactPath { vertices: vec![r, a, s] },
            absorb_path: ExactPath { vertices: vec![r, v, a, s] },
        };
        let parts = vec![mk(0, 1, 2, 9), mk(4, 5, 6, 8)];
        let links = vec![
            ExactPath { vertices: vec![0] },
            ExactPath { vertices: vec![2, 3, 4] },
            ExactPath { vertices: vec![6] },
        ];
        let m = MergedAbsorber::new(0, 6, parts, links).unwrap();
        m.validate(&g).unwrap();
        assert_eq!(m.traverse(Some(8)).unwrap().vertices, vec![0, 1, 2, 3, 4, 8, 5, 6]);
        assert_eq!(m.vertices().len(), 7);
        assert!(m.traverse(Some(7)).is_none());
    }

    #[test]
    fn structure_footprint_and_absorption() {
        let g = gen_gnp(700, 0.2, RngSeed::new(21)).unwrap();
        let r = 3;
        let a: Vec<Vertex> = (0..2 * r).collect();
        let xs: Vec<Vertex> = (10..10 + 3 * r).collect();
        let ys: Vec<Vertex> = (30..30 + 3 * r).collect();
        let w = VertexSet::from_iter(700, 50..700);
        let l = 30;
        let s = build_absorbing_structure(&g, &a, &w, &xs, &ys, l, &StructureConfig::default(), RngSeed::new(3)).unwrap();
        assert_eq!(s.footprint.len(), 3 * r * (l - 2) - r);
        for pick in [[0, 1, 2], [3, 4, 5], [0, 2, 4]] {
            let chosen: Vec<Vertex> = pick.iter().map(|&i| a[i]).collect();
            let paths = s.absorb(&chosen).unwrap();
            let mut seen = VertexSet::new(700);
            for (j, p) in paths.iter().enumerate() {
                assert_eq!(p.vertices.len(), l);
                assert_eq!((p.vertices[0], p.vertices[l - 1]), (xs[j], ys[j]));
                assert!(is_walk(&g, &p.vertices));
                p.vertices.iter().for_each(|&v| assert!(seen.insert(v)));
            }
            let mut want = s.footprint.clone();
            chosen.iter().chain(&xs).chain(&ys).for_each(|&v| {
                want.insert(v);
            });
            assert_eq!(seen, want);
        }
        assert_eq!(s.dump().lines().count(), 3 * r);
    }

    #[test]
    fn six_cycle_cover_is_forced() {
        let g = Graph::cycle(6);
        let paths = cover_with_paths(&g, &[(0, 2), (3, 5)], 3, &CoverConfig::default(), RngSeed::new(0)).unwrap();
        assert_eq!(paths[0].vertices, vec![0, 1, 2]);
        assert_eq!(paths[1].vertices, vec![3, 4, 5]);
    }

    #[test]
    fn directed_six_cycle_cover() {
        let d = DiGraph::cycle(6);
        let paths = cover_with_paths_directed(&d, &[(0, 2), (3, 5)], 3, &CoverConfig::default(), RngSeed::new(0)).unwrap();
        assert_eq!(paths[0].vertices, vec![0, 1, 2]);
        assert_eq!(paths[1].vertices, vec![3, 4, 5]);
        assert!(cover_with_paths_directed(&d, &[(2, 0), (5, 3)], 3, &CoverConfig::default(), RngSeed::new(0)).is_err());
    }

    #[test]
    fn cover_rejects_bad_counts() {
        let g = Graph::complete(10);
        let e = cover_with_paths(&g, &[(0, 1)], 3, &CoverConfig::default(), RngSeed::new(0)).unwrap_err();
        assert_eq!(e.phase, CoverPhase::Input);
    }

    #[test]
    fn medium_cover_partitions() {
        let g = gen_gnp(600, 0.2, RngSeed::new(31)).unwrap();
        let l = 30;
        let pairs: Vec<(Vertex, Vertex)> = (0..600 / l).map(|i| (2 * i, 2 * i + 1)).collect();
        let paths = cover_with_paths(&g, &pairs, l, &CoverConfig::default(), RngSeed::new(1)).unwrap();
        assert!(cover_is_partition(&g, &pairs, l, &paths));
    }

    #[test]
    fn reduction_to_shorter_segments() {
        let g = gen_gnp(600, 0.25, RngSeed::new(32)).unwrap();
        let l = 100;
        let pairs: Vec<(Vertex, Vertex)> = (0..600 / l).map(|i| (2 * i, 2 * i + 1)).collect();
        let cfg = CoverConfig {
            base_len: Some(30),
            ..CoverConfig::default()
        };
        let paths = cover_with_paths(&g, &pairs, l, &cfg, RngSeed::new(2)).unwrap();
        assert!(cover_is_partition(&g, &pairs, l, &paths));
    }
}
