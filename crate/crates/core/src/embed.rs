//! Embedding guest forests into host graphs: greedy placement with bounded
//! chronological backtracking and seeded restarts, a rooted variant for
//! oriented trees in digraphs, and star completion by capacitated matching.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::expansion::{check_expander, CheckConfig, ExpansionError, ExpansionReport};
use crate::graph::{parse_numbers, DiGraph, Graph, GraphError, RngSeed, Vertex, VertexSet};
use crate::matching::generalized_matching;
use crate::tree::{Forest, TreeShape};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("could not embed component {component}; search stalled at guest vertex {frontier}")]
    EmbedFailed { component: usize, frontier: Vertex },
    #[error("guest needs {need} host vertices but only {have} are allowed (slack {slack})")]
    TooLarge { need: usize, have: usize, slack: usize },
    #[error("allowed host region does not expand enough: {0}")]
    NotExpanding(Box<ExpansionReport>),
    #[error("root image {0} is not a host vertex")]
    BadRoot(Vertex),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StarError {
    #[error("centre set {certificate:?} needs {demand} leaves but only {available} pool vertices are adjacent")]
    MatchingInfeasible {
        /// Host ids of the deficient centres.
        certificate: Vec<Vertex>,
        demand: usize,
        available: usize,
    },
    #[error("malformed demand: {0}")]
    BadDemand(String),
}

/// Partial injection from guest ids to host ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    map: Vec<Option<Vertex>>,
    used: VertexSet,
}

impl Embedding {
    pub fn new(guest_n: usize, host_n: usize) -> Self {
        Embedding {
            map: vec![None; guest_n],
            used: VertexSet::new(host_n),
        }
    }

    pub fn guest_n(&self) -> usize {
        self.map.len()
    }

    pub fn host_n(&self) -> usize {
        self.used.universe()
    }

    #[inline]
    pub fn get(&self, guest: Vertex) -> Option<Vertex> {
        self.map[guest]
    }

    /// Maps `guest` to `host`; panics if either side is already taken.
    pub fn set(&mut self, guest: Vertex, host: Vertex) {
        assert!(self.map[guest].is_none(), "guest {guest} already mapped");
        assert!(self.used.insert(host), "host {host} already used");
        self.map[guest] = Some(host);
    }

    pub fn unset(&mut self, guest: Vertex) -> Option<Vertex> {
        let h = self.map[guest].take();
        if let Some(h) = h {
            self.used.remove(h);
        }
        h
    }

    /// Host vertices in the image.
    pub fn used(&self) -> &VertexSet {
        &self.used
    }

    pub fn mapped_count(&self) -> usize {
        self.used.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter_map(|(g, h)| h.map(|h| (g, h)))
    }

    /// Copies every mapping of `other` into `self`.
    pub fn absorb(&mut self, other: &Embedding) {
        for (g, h) in other.pairs() {
            self.set(g, h);
        }
    }

    pub fn write_pairs<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        for (g, h) in self.pairs() {
            writeln!(w, "{g} {h}")?;
        }
        Ok(())
    }

    /// Reads `guest host` lines. Duplicate guests or hosts are a parse error.
    pub fn read_pairs<R: BufRead>(r: R, guest_n: usize, host_n: usize) -> Result<Self, GraphError> {
        let mut e = Embedding::new(guest_n, host_n);
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let nums = parse_numbers(&line, i + 1)?;
            let [g, h] = nums[..] else {
                return Err(GraphError::Parse {
                    line: i + 1,
                    msg: "expected \"guest host\"".into(),
                });
            };
            if g >= guest_n || h >= host_n || e.map[g].is_some() || e.used.contains(h) {
                return Err(GraphError::Parse {
                    line: i + 1,
                    msg: format!("pair {g} {h} is out of range or repeats a vertex"),
                });
            }
            e.set(g, h);
        }
        Ok(e)
    }
}

/// Everything wrong with a claimed embedding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmbeddingCheck {
    /// Guest vertices that should be mapped but are not.
    pub unmapped: Vec<Vertex>,
    /// Pairs of guest vertices sharing a host image.
    pub collisions: Vec<(Vertex, Vertex)>,
    /// Guest edges (or arcs) whose images are not host edges (arcs).
    pub broken: Vec<(Vertex, Vertex)>,
    /// Guest vertices mapped outside the allowed region.
    pub outside: Vec<Vertex>,
}

impl EmbeddingCheck {
    pub fn is_valid(&self) -> bool {
        self.unmapped.is_empty()
            && self.collisions.is_empty()
            && self.broken.is_empty()
            && self.outside.is_empty()
    }
}

/// Checks totality over `guest_vertices`, injectivity, and that each guest edge
/// `(a, b)` satisfies `host_edge(φ(a), φ(b))`.
pub fn check_embedding<F: Fn(Vertex, Vertex) -> bool>(
    host_edge: F,
    guest_vertices: impl IntoIterator<Item = Vertex>,
    guest_edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    emb: &Embedding,
    allowed: Option<&VertexSet>,
) -> EmbeddingCheck {
    let mut out = EmbeddingCheck::default();
    let mut owner = vec![usize::MAX; emb.host_n()];
    for g in guest_vertices {
        match emb.get(g) {
            None => out.unmapped.push(g),
            Some(h) => {
                if owner[h] != usize::MAX {
                    out.collisions.push((owner[h], g));
                } else {
                    owner[h] = g;
                }
                if allowed.is_some_and(|a| !a.contains(h)) {
                    out.outside.push(g);
                }
            }
        }
    }
    for (a, b) in guest_edges {
        match (emb.get(a), emb.get(b)) {
            (Some(x), Some(y)) if host_edge(x, y) => {}
            _ => out.broken.push((a, b)),
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct EmbedConfig {
    pub max_retries: usize,
    /// Node undos per attempt; `None` means `50 · n`.
    pub backtrack_steps: Option<usize>,
    /// Host vertices that must stay unused beyond the guest's size.
    pub slack: usize,
    /// When set, the allowed region is checked to be an expander with this factor first.
    pub verify: Option<f64>,
    /// Run retries speculatively on worker threads; the lowest successful attempt wins.
    pub parallel: bool,
    /// How many host vertices to try for a component root.
    pub root_candidates: usize,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            max_retries: 8,
            backtrack_steps: None,
            slack: 0,
            verify: None,
            parallel: false,
            root_candidates: 16,
        }
    }
}

/// One guest vertex in placement order.
#[derive(Clone, Copy, Debug)]
struct Slot {
    guest: Vertex,
    /// Index in the order of the guest's parent, if any.
    parent: Option<usize>,
    component: usize,
    /// Children still to be placed that need an out-neighbour / in-neighbour.
    need_out: usize,
    need_in: usize,
    /// Arc direction from the parent's image: `true` for parent → child.
    away: bool,
    pinned: Option<Vertex>,
}

/// The host side of the search.
trait Host: Sync {
    fn n(&self) -> usize;
    fn out_of(&self, v: Vertex) -> &[Vertex];
    fn into(&self, v: Vertex) -> &[Vertex];
    fn free_out(&self, v: Vertex, free: &VertexSet) -> usize;
    fn free_in(&self, v: Vertex, free: &VertexSet) -> usize;
}

impl Host for Graph {
    fn n(&self) -> usize {
        Graph::n(self)
    }
    fn out_of(&self, v: Vertex) -> &[Vertex] {
        self.neighbors(v)
    }
    fn into(&self, v: Vertex) -> &[Vertex] {
        self.neighbors(v)
    }
    fn free_out(&self, v: Vertex, free: &VertexSet) -> usize {
        self.degree_into(v, free)
    }
    fn free_in(&self, v: Vertex, free: &VertexSet) -> usize {
        self.degree_into(v, free)
    }
}

impl Host for DiGraph {
    fn n(&self) -> usize {
        DiGraph::n(self)
    }
    fn out_of(&self, v: Vertex) -> &[Vertex] {
        self.out_neighbors(v)
    }
    fn into(&self, v: Vertex) -> &[Vertex] {
        self.in_neighbors(v)
    }
    fn free_out(&self, v: Vertex, free: &VertexSet) -> usize {
        match self.out_row(v) {
            Some(r) => r.intersection_len(free),
            None => self.out_neighbors(v).iter().filter(|&&u| free.contains(u)).count(),
        }
    }
    fn free_in(&self, v: Vertex, free: &VertexSet) -> usize {
        match self.in_row(v) {
            Some(r) => r.intersection_len(free),
            None => self.in_neighbors(v).iter().filter(|&&u| free.contains(u)).count(),
        }
    }
}

/// Candidate ordering: most residual room first, smallest id on ties. Later
/// attempts add seeded jitter so restarts explore different branches.
fn rank<H: Host>(
    host: &H,
    cands: impl Iterator<Item = Vertex>,
    slot: &Slot,
    free: &VertexSet,
    jitter: f64,
    rng: &mut impl Rng,
) -> Vec<Vertex> {
    let mut scored: Vec<(f64, Vertex)> = cands
        .filter_map(|h| {
            let fo = host.free_out(h, free);
            let fi = host.free_in(h, free);
            if fo < slot.need_out || fi < slot.need_in {
                return None;
            }
            let room = (fo.min(fi)) as f64;
            Some((room + jitter * rng.random::<f64>() * (1.0 + room), h))
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().map(|(_, h)| h).collect()
}

fn search<H: Host>(
    host: &H,
    slots: &[Slot],
    allowed: &VertexSet,
    budget: usize,
    root_candidates: usize,
    attempt: usize,
    seed: RngSeed,
) -> Result<Vec<Vertex>, (usize, Vertex)> {
    let mut rng = seed.derive(attempt as u64).rng();
    let jitter = if attempt == 0 { 0.0 } else { 0.5 };
    let mut free = allowed.clone();
    let mut image: Vec<Vertex> = Vec::with_capacity(slots.len());
    let mut stack: Vec<(Vec<Vertex>, usize)> = Vec::with_capacity(slots.len());
    let mut undos = 0usize;
    let mut deepest = 0usize;
    while image.len() < slots.len() {
        let i = image.len();
        if stack.len() == i {
            let slot = &slots[i];
            let cands = match (slot.pinned, slot.parent) {
                (Some(h), _) => {
                    if free.contains(h) {
                        vec![h]
                    } else {
                        Vec::new()
                    }
                }
                (None, Some(p)) => {
                    let ph = image[p];
                    let nbrs = if slot.away { host.out_of(ph) } else { host.into(ph) };
                    rank(host, nbrs.iter().copied().filter(|&u| free.contains(u)), slot, &free, jitter, &mut rng)
                }
                (None, None) => {
                    let mut r = rank(host, free.iter(), slot, &free, jitter, &mut rng);
                    if attempt > 0 && r.len() > root_candidates {
                        // Spread restarts over the whole host rather than its best corner.
                        let k = rng.random_range(0..r.len());
                        r.rotate_left(k);
                    }
                    r.truncate(root_candidates);
                    r
                }
            };
            stack.push((cands, 0));
        }
        let top = stack.last_mut().expect("stack tracks the current depth");
        if top.1 < top.0.len() {
            let h = top.0[top.1];
            top.1 += 1;
            free.remove(h);
            image.push(h);
            deepest = deepest.max(image.len());
        } else {
            stack.pop();
            let Some(h) = image.pop() else {
                return Err((slots[0].component, slots[0].guest));
            };
            free.insert(h);
            undos += 1;
            if undos > budget {
                let at = slots[deepest.min(slots.len() - 1)];
                return Err((at.component, at.guest));
            }
        }
    }
    Ok(image)
}

fn run_attempts<H: Host>(
    host: &H,
    slots: &[Slot],
    allowed: &VertexSet,
    guest_n: usize,
    cfg: &EmbedConfig,
    seed: RngSeed,
) -> Result<Embedding, EmbedError> {
    let budget = cfg.backtrack_steps.unwrap_or(50 * slots.len().max(1));
    let attempts = cfg.max_retries.max(1);
    let finish = |image: Vec<Vertex>| {
        let mut e = Embedding::new(guest_n, host.n());
        for (s, h) in slots.iter().zip(image) {
            e.set(s.guest, h);
        }
        e
    };
    if cfg.parallel {
        let results: Vec<_> = (0..attempts)
            .into_par_iter()
            .map(|a| search(host, slots, allowed, budget, cfg.root_candidates, a, seed))
            .collect();
        let mut last = None;
        for r in results {
            match r {
                Ok(image) => return Ok(finish(image)),
                Err(e) => last = Some(e),
            }
        }
        let (component, frontier) = last.expect("at least one attempt");
        return Err(EmbedError::EmbedFailed { component, frontier });
    }
    let mut last = (0, 0);
    for a in 0..attempts {
        match search(host, slots, allowed, budget, cfg.root_candidates, a, seed) {
            Ok(image) => return Ok(finish(image)),
            Err(e) => last = e,
        }
    }
    Err(EmbedError::EmbedFailed {
        component: last.0,
        frontier: last.1,
    })
}

fn tree_slots(
    t: &TreeShape,
    to_guest: &[Vertex],
    component: usize,
    away: impl Fn(Vertex) -> bool,
    root_pin: Option<Vertex>,
    slots: &mut Vec<Slot>,
) {
    let order = t.bfs_order();
    let mut pos = vec![usize::MAX; t.n()];
    let base = slots.len();
    for (i, &v) in order.iter().enumerate() {
        pos[v] = base + i;
        let (mut need_out, mut need_in) = (0, 0);
        for &c in t.children(v) {
            if away(c) {
                need_out += 1;
            } else {
                need_in += 1;
            }
        }
        slots.push(Slot {
            guest: to_guest[v],
            parent: t.parent(v).map(|p| pos[p]),
            component,
            need_out,
            need_in,
            away: t.parent(v).is_none() || away(v),
            pinned: if t.parent(v).is_none() { root_pin } else { None },
        });
    }
}

/// Embeds every component of `forest` into `G[allowed]`.
///
/// The returned embedding is indexed by the forest's original guest ids.
pub fn embed_forest(
    g: &Graph,
    forest: &Forest,
    allowed: &VertexSet,
    cfg: &EmbedConfig,
    seed: RngSeed,
) -> Result<Embedding, EmbedError> {
    let need = forest.vertex_count();
    let have = allowed.len();
    if need + cfg.slack > have {
        return Err(EmbedError::TooLarge {
            need,
            have,
            slack: cfg.slack,
        });
    }
    if let Some(d) = cfg.verify {
        let sub = g.induced(allowed);
        let report = check_expander(&sub.graph, d, &CheckConfig::sampled(2_000, seed.derive(u64::MAX)))?;
        if !report.holds {
            return Err(EmbedError::NotExpanding(Box::new(report)));
        }
    }
    // Larger components first: they are the hardest to place.
    let mut comps: Vec<usize> = (0..forest.components.len()).collect();
    comps.sort_by_key(|&c| std::cmp::Reverse(forest.components[c].tree.n()));
    let mut slots = Vec::with_capacity(need);
    for c in comps {
        let comp = &forest.components[c];
        tree_slots(&comp.tree, &comp.to_original, c, |_| true, None, &mut slots);
    }
    run_attempts(g, &slots, allowed, forest.universe, cfg, seed)
}

/// A tree whose edges carry directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedTree {
    pub shape: TreeShape,
    /// For each non-root `v`, whether its edge points away from the root (parent → v).
    pub away: Vec<bool>,
}

impl OrientedTree {
    pub fn out_arborescence(shape: TreeShape) -> Self {
        let away = vec![true; shape.n()];
        OrientedTree { shape, away }
    }

    /// Arcs `(tail, head)` in guest ids.
    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.shape
            .edges()
            .map(|(p, c)| if self.away[c] { (p, c) } else { (c, p) })
    }
}

/// Embeds an oriented tree into `H` with its root sent to `root_image`.
pub fn embed_rooted_directed(
    h: &DiGraph,
    t: &OrientedTree,
    root_image: Vertex,
    allowed: &VertexSet,
    cfg: &EmbedConfig,
    seed: RngSeed,
) -> Result<Embedding, EmbedError> {
    if root_image >= h.n() || !allowed.contains(root_image) {
        return Err(EmbedError::BadRoot(root_image));
    }
    let need = t.shape.n();
    if need + cfg.slack > allowed.len() {
        return Err(EmbedError::TooLarge {
            need,
            have: allowed.len(),
            slack: cfg.slack,
        });
    }
    if let Some(d) = cfg.verify {
        if let Some(x) = crate::expansion::check_directed_expansion(h, d, 2_000, seed.derive(u64::MAX))? {
            return Err(EmbedError::EmbedFailed {
                component: 0,
                frontier: x[0],
            });
        }
    }
    let ids: Vec<Vertex> = (0..need).collect();
    let mut slots = Vec::with_capacity(need);
    tree_slots(&t.shape, &ids, 0, |v| t.away[v], Some(root_image), &mut slots);
    run_attempts(h, &slots, allowed, need, cfg, seed)
}

/// Leaf demands for star completion.
#[derive(Clone, Debug)]
pub struct StarDemand {
    pub centers: Vec<Vertex>,
    pub demand: Vec<usize>,
    pub pool: VertexSet,
}

/// Gives each centre its demanded number of distinct adjacent pool vertices.
pub fn attach_stars(g: &Graph, d: &StarDemand, seed: RngSeed) -> Result<Vec<Vec<Vertex>>, StarError> {
    if d.centers.len() != d.demand.len() {
        return Err(StarError::BadDemand("one demand per centre".into()));
    }
    if let Some(&c) = d.centers.iter().find(|&&c| d.pool.contains(c)) {
        return Err(StarError::BadDemand(format!("centre {c} lies in the pool")));
    }
    let mut pool: Vec<Vertex> = d.pool.iter().collect();
    pool.shuffle(&mut seed.rng());
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in pool.iter().enumerate() {
        index[v] = i;
    }
    let adj: Vec<Vec<usize>> = d
        .centers
        .iter()
        .map(|&c| {
            let mut a: Vec<usize> = g
                .neighbors(c)
                .iter()
                .filter(|&&u| index[u] != usize::MAX)
                .map(|&u| index[u])
                .collect();
            a.sort_unstable();
            a
        })
        .collect();
    match generalized_matching(&adj, &d.demand, pool.len()) {
        Ok(assign) => Ok(assign
            .into_iter()
            .map(|a| {
                let mut leaves: Vec<Vertex> = a.into_iter().map(|i| pool[i]).collect();
                leaves.sort_unstable();
                leaves
            })
            .collect()),
        Err(v) => Err(StarError::MatchingInfeasible {
            certificate: v.deficient.iter().map(|&i| d.centers[i]).collect(),
            demand: v.demand,
            available: v.neighbors,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_gnp, gen_tournament};
    use crate::tree::{gen_random_tree, TreeFamily};

    fn valid_in(g: &Graph, f: &Forest, e: &Embedding, allowed: &VertexSet) -> bool {
        check_embedding(|a, b| g.has_edge(a, b), f.vertices().iter(), f.edges(), e, Some(allowed)).is_valid()
    }

    #[test]
    fn single_edge_into_triangle() {
        let g = Graph::complete(3);
        let f = Forest::single(&TreeShape::path(2));
        let e = embed_forest(&g, &f, &g.vertices(), &EmbedConfig::default(), RngSeed::new(0)).unwrap();
        assert!(valid_in(&g, &f, &e, &g.vertices()));
    }

    #[test]
    fn path_into_cycle_and_star() {
        let f = Forest::single(&TreeShape::path(4));
        let c4 = Graph::cycle(4);
        let e = embed_forest(&c4, &f, &c4.vertices(), &EmbedConfig::default(), RngSeed::new(0)).unwrap();
        assert!(valid_in(&c4, &f, &e, &c4.vertices()));
        let star = TreeShape::star(3).to_graph();
        assert!(matches!(
            embed_forest(&star, &f, &star.vertices(), &EmbedConfig::default(), RngSeed::new(0)),
            Err(EmbedError::EmbedFailed { .. })
        ));
    }

    #[test]
    fn almost_spanning_tree_in_random_graph() {
        let mut ok = 0;
        for s in 0..20 {
            let g = gen_gnp(400, 0.15, RngSeed::with_stream(1, s)).unwrap();
            let t = gen_random_tree(320, 3, TreeFamily::UniformAttachment, RngSeed::with_stream(2, s)).unwrap();
            let f = Forest::single(&t);
            if let Ok(e) = embed_forest(&g, &f, &g.vertices(), &EmbedConfig::default(), RngSeed::new(s)) {
                assert!(valid_in(&g, &f, &e, &g.vertices()));
                ok += 1;
            }
        }
        assert!(ok >= 18, "{ok}/20");
    }

    #[test]
    fn respects_allowed_region() {
        let g = gen_gnp(100, 0.3, RngSeed::new(4)).unwrap();
        let allowed = VertexSet::from_iter(100, (0..100).filter(|v| v % 2 == 0));
        let t = gen_random_tree(30, 3, TreeFamily::UniformAttachment, RngSeed::new(4)).unwrap();
        let f = Forest::single(&t);
        let e = embed_forest(&g, &f, &allowed, &EmbedConfig::default(), RngSeed::new(1)).unwrap();
        assert!(valid_in(&g, &f, &e, &allowed));
    }

    #[test]
    fn directed_single_arc_and_failure() {
        let k3 = DiGraph::complete(3);
        let arc = OrientedTree::out_arborescence(TreeShape::path(2));
        let e = embed_rooted_directed(&k3, &arc, 1, &VertexSet::full(3), &EmbedConfig::default(), RngSeed::new(0)).unwrap();
        assert_eq!(e.get(0), Some(1));
        assert!(k3.has_arc(1, e.get(1).unwrap()));

        let c3 = DiGraph::cycle(3);
        let out_star = OrientedTree::out_arborescence(TreeShape::star(2));
        assert!(embed_rooted_directed(&c3, &out_star, 0, &VertexSet::full(3), &EmbedConfig::default(), RngSeed::new(0)).is_err());
    }

    #[test]
    fn alternating_path_in_tournaments() {
        let shape = TreeShape::path(5);
        let away = (0..5).map(|v| v % 2 == 1).collect();
        let t = OrientedTree { shape, away };
        let mut ok = 0;
        for s in 0..20 {
            let h = gen_tournament(20, RngSeed::with_stream(5, s));
            if let Ok(e) = embed_rooted_directed(&h, &t, 0, &VertexSet::full(20), &EmbedConfig::default(), RngSeed::new(s)) {
                let chk = check_embedding(|a, b| h.has_arc(a, b), 0..5, t.arcs(), &e, None);
                assert!(chk.is_valid());
                ok += 1;
            }
        }
        assert!(ok >= 18, "{ok}/20");
    }

    #[test]
    fn star_completion() {
        let g = Graph::from_edges(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        let d = StarDemand {
            centers: vec![0, 1],
            demand: vec![1, 2],
            pool: VertexSet::from_iter(5, [2, 3, 4]),
        };
        let s = attach_stars(&g, &d, RngSeed::new(0)).unwrap();
        assert_eq!(s[0].len(), 1);
        assert_eq!(s[1].len(), 2);
        assert!(s[0].iter().all(|v| !s[1].contains(v)));

        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let d = StarDemand {
            centers: vec![0],
            demand: vec![2],
            pool: VertexSet::from_iter(3, [1, 2]),
        };
        assert_eq!(
            attach_stars(&g, &d, RngSeed::new(0)),
            Err(StarError::MatchingInfeasible {
                certificate: vec![0],
                demand: 2,
                available: 1
            })
        );
    }

    #[test]
    fn embedding_pairs_round_trip() {
        let mut e = Embedding::new(4, 6);
        e.set(0, 5);
        e.set(2, 1);
        let mut buf = Vec::new();
        e.write_pairs(&mut buf).unwrap();
        assert_eq!(Embedding::read_pairs(&buf[..], 4, 6).unwrap(), e);
        assert!(Embedding::read_pairs("0 1\n1 1\n".as_bytes(), 4, 6).is_err());
    }
}
