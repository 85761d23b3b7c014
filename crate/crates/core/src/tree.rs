//! Guest trees: generation, leaves and bare paths, the leaves-or-paths
//! dichotomy, and stripping a tree down to a forest plus reattachment requests.

use std::io::{BufRead, Write};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use thiserror::Error;

use crate::graph::{parse_numbers, Graph, GraphError, RngSeed, Vertex, VertexSet};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("no tree on {n} vertices has maximum degree at most {delta}")]
    Infeasible { n: usize, delta: usize },
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("edge list does not describe a tree: {0}")]
    NotATree(String),
    #[error("neither {leaves} leaves nor {paths} bare paths of length {k} reach the threshold {threshold}")]
    DichotomyViolation {
        leaves: usize,
        paths: usize,
        k: usize,
        threshold: f64,
    },
    #[error("invalid removal: {0}")]
    InvalidRemoval(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A tree on `[0, n)` rooted at `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShape {
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
    root: Vertex,
    max_degree: usize,
}

impl TreeShape {
    /// Builds a tree from `n - 1` edges, rooted at vertex 0.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, TreeError> {
        Self::from_edges_rooted(n, edges, 0)
    }

    pub fn from_edges_rooted(
        n: usize,
        edges: &[(Vertex, Vertex)],
        root: Vertex,
    ) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if edges.len() != n - 1 {
            return Err(TreeError::NotATree(format!(
                "{} edges on {n} vertices",
                edges.len()
            )));
        }
        let g = Graph::from_edges(n, edges)?;
        if g.edge_count() != n - 1 {
            return Err(TreeError::NotATree("repeated edge".into()));
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = VertexSet::new(n);
        seen.insert(root);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v) {
                if seen.insert(u) {
                    parent[u] = Some(v);
                    children[v].push(u);
                    stack.push(u);
                }
            }
        }
        if seen.len() != n {
            return Err(TreeError::NotATree("disconnected".into()));
        }
        for c in children.iter_mut() {
            c.sort_unstable();
        }
        Ok(Self::assemble(parent, children, root))
    }

    /// Builds a tree from a parent array with exactly one `None`.
    pub fn from_parents(parent: Vec<Option<Vertex>>) -> Result<Self, TreeError> {
        let n = parent.len();
        let edges: Vec<_> = parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
            .collect();
        let root = parent
            .iter()
            .position(Option::is_none)
            .ok_or_else(|| TreeError::NotATree("no root".into()))?;
        let t = Self::from_edges_rooted(n, &edges, root)?;
        if t.parent != parent {
            return Err(TreeError::NotATree("parent array is not consistent".into()));
        }
        Ok(t)
    }

    fn assemble(parent: Vec<Option<Vertex>>, children: Vec<Vec<Vertex>>, root: Vertex) -> Self {
        let max_degree = (0..parent.len())
            .map(|v| children[v].len() + usize::from(parent[v].is_some()))
            .max()
            .unwrap_or(0);
        TreeShape {
            parent,
            children,
            root,
            max_degree,
        }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path is a tree")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star is a tree")
    }

    /// Complete binary tree in heap order.
    pub fn complete_binary(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| ((i - 1) / 2, i)).collect();
        Self::from_edges(n, &edges).expect("heap tree is a tree")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    #[inline]
    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    #[inline]
    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.parent[v].into_iter().chain(self.children[v].iter().copied())
    }

    /// Edges as `(parent, child)` pairs, children in increasing id order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n()).filter_map(move |v| self.parent[v].map(|p| (p, v)))
    }

    pub fn to_graph(&self) -> Graph {
        let edges: Vec<_> = self.edges().collect();
        Graph::from_edges(self.n(), &edges).expect("tree edges are valid")
    }

    /// Membership in the class of trees with maximum degree at most `delta`.
    pub fn within_degree(&self, delta: usize) -> bool {
        self.max_degree <= delta
    }

    /// Vertices in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<Vertex> {
        let mut order = Vec::with_capacity(self.n());
        order.push(self.root);
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            order.extend_from_slice(&self.children[v]);
            i += 1;
        }
        order
    }

    /// The same tree re-rooted at `root`.
    pub fn rerooted(&self, root: Vertex) -> Self {
        let edges: Vec<_> = self.edges().collect();
        Self::from_edges_rooted(self.n(), &edges, root).expect("re-rooting keeps a tree")
    }

    pub fn write_tree<W: Write>(&self, mut w: W) -> Result<(), TreeError> {
        writeln!(w, "{}", self.n()).map_err(GraphError::from)?;
        for (p, c) in self.edges() {
            writeln!(w, "{p} {c}").map_err(GraphError::from)?;
        }
        Ok(())
    }

    pub fn read_tree<R: BufRead>(r: R) -> Result<Self, TreeError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(GraphError::from)?;
            if line.trim().is_empty() {
                continue;
            }
            let nums = parse_numbers(&line, i + 1)?;
            match (n, nums.as_slice()) {
                (None, [k]) => n = Some(*k),
                (Some(_), [p, c]) => edges.push((*p, *c)),
                _ => {
                    return Err(GraphError::Parse {
                        line: i + 1,
                        msg: "expected \"n\" then \"parent child\" lines".into(),
                    }
                    .into())
                }
            }
        }
        let n = n.ok_or(TreeError::Empty)?;
        // The first listed parent of the file is taken as the root when possible.
        let root = edges
            .iter()
            .map(|e| e.0)
            .find(|&p| !edges.iter().any(|e| e.1 == p))
            .unwrap_or(0);
        Self::from_edges_rooted(n, &edges, root)
    }
}

/// Shape bias for [`gen_random_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeFamily {
    UniformAttachment,
    Caterpillar,
    Binary,
    Path,
    Broom,
}

impl TreeFamily {
    pub const ALL: [TreeFamily; 5] = [
        TreeFamily::UniformAttachment,
        TreeFamily::Caterpillar,
        TreeFamily::Binary,
        TreeFamily::Path,
        TreeFamily::Broom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TreeFamily::UniformAttachment => "uniform",
            TreeFamily::Caterpillar => "caterpillar",
            TreeFamily::Binary => "binary",
            TreeFamily::Path => "path",
            TreeFamily::Broom => "broom",
        }
    }
}

impl std::str::FromStr for TreeFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" | "uniform-attachment" => Ok(TreeFamily::UniformAttachment),
            "caterpillar" => Ok(TreeFamily::Caterpillar),
            "binary" => Ok(TreeFamily::Binary),
            "path" => Ok(TreeFamily::Path),
            "broom" => Ok(TreeFamily::Broom),
            other => Err(format!("unknown tree family {other:?}")),
        }
    }
}

/// Random tree on `n` vertices with maximum degree at most `delta`.
///
/// Vertex 0 is the root; vertex ids are otherwise in insertion order.
pub fn gen_random_tree(
    n: usize,
    delta: usize,
    family: TreeFamily,
    seed: RngSeed,
) -> Result<TreeShape, TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    let min_delta = match (n, family) {
        (1, _) => 0,
        (2, _) => 1,
        (3, _) => 2,
        (_, TreeFamily::Binary) => 3,
        _ => 2,
    };
    if delta < min_delta {
        return Err(TreeError::Infeasible { n, delta });
    }
    let mut rng = seed.rng();
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    match family {
        TreeFamily::Path => {
            for v in 1..n {
                parent[v] = Some(v - 1);
            }
        }
        TreeFamily::Binary => {
            for v in 1..n {
                parent[v] = Some((v - 1) / 2);
            }
        }
        TreeFamily::Broom => {
            // Centre 0 carries the bristles; the handle hangs off it.
            let bristles = if n - 1 <= delta { n - 1 } else { delta - 1 };
            for v in 1..=bristles {
                parent[v] = Some(0);
            }
            for v in bristles + 1..n {
                parent[v] = Some(if v == bristles + 1 { 0 } else { v - 1 });
            }
        }
        TreeFamily::UniformAttachment => {
            let mut degree = vec![0usize; n];
            let mut open: Vec<Vertex> = vec![0];
            for v in 1..n {
                let i = rng.random_range(0..open.len());
                let p = open[i];
                parent[v] = Some(p);
                degree[p] += 1;
                degree[v] = 1;
                if degree[p] >= delta {
                    open.swap_remove(i);
                }
                if delta > 1 {
                    open.push(v);
                }
            }
        }
        TreeFamily::Caterpillar => {
            let mut degree = vec![0usize; n];
            let mut spine_end = 0;
            let mut spine: Vec<Vertex> = vec![0];
            for v in 1..n {
                let legs_room: Vec<Vertex> = spine
                    .iter()
                    .copied()
                    .filter(|&s| degree[s] + usize::from(s == spine_end) < delta)
                    .collect();
                let extend = legs_room.is_empty() || rng.random_bool(0.5);
                let p = if extend {
                    spine_end
                } else {
                    *legs_room.choose(&mut rng).expect("non-empty")
                };
                if extend {
                    spine.push(v);
                    spine_end = v;
                }
                parent[v] = Some(p);
                degree[p] += 1;
                degree[v] = 1;
            }
        }
    }
    let t = TreeShape::from_parents(parent)?;
    debug_assert!(t.within_degree(delta));
    Ok(t)
}

pub fn leaves(t: &TreeShape) -> VertexSet {
    VertexSet::from_iter(t.n(), (0..t.n()).filter(|&v| t.degree(v) == 1))
}

/// A path in a tree whose interior vertices all have degree 2 there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarePath {
    pub vertices: Vec<Vertex>,
}

impl BarePath {
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }

    pub fn ends(&self) -> (Vertex, Vertex) {
        (self.vertices[0], *self.vertices.last().expect("non-empty path"))
    }

    pub fn interior(&self) -> &[Vertex] {
        let l = self.vertices.len();
        if l <= 2 {
            &[]
        } else {
            &self.vertices[1..l - 1]
        }
    }

    pub fn is_bare_in(&self, t: &TreeShape) -> bool {
        self.vertices
            .windows(2)
            .all(|w| t.parent(w[0]) == Some(w[1]) || t.parent(w[1]) == Some(w[0]))
            && self.interior().iter().all(|&v| t.degree(v) == 2)
    }
}

/// Greedy packing of vertex-disjoint bare paths of length exactly `k`.
///
/// Each maximal chain of degree-2 vertices is read from its lower end (the
/// non-degree-2 vertex below it when the tree hangs from a leaf), and cut
/// into consecutive runs of `k + 1` vertices. The upper end is never used,
/// so chains never compete for a vertex.
pub fn bare_paths(t: &TreeShape, k: usize) -> Vec<BarePath> {
    let n = t.n();
    if k == 0 || n < 2 {
        return Vec::new();
    }
    let hang = (0..n).find(|&v| t.degree(v) == 1).expect("a tree on ≥ 2 vertices has a leaf");
    let t = if t.root() == hang {
        t.clone()
    } else {
        t.rerooted(hang)
    };
    let mut out = Vec::new();
    for low in 0..n {
        if t.degree(low) == 2 || low == hang {
            continue;
        }
        let mut chain = vec![low];
        let mut cur = t.parent(low).expect("only the hang vertex is parentless");
        while t.degree(cur) == 2 {
            chain.push(cur);
            cur = t.parent(cur).expect("degree-2 vertices are not the root");
        }
        for seg in chain.chunks_exact(k + 1) {
            out.push(BarePath {
                vertices: seg.to_vec(),
            });
        }
    }
    out.sort_by_key(|p| p.vertices[0]);
    out
}

/// Outcome of the leaves-or-bare-paths dichotomy.
#[derive(Clone, Debug)]
pub enum Branch {
    Leafy(VertexSet),
    Pathy(Vec<BarePath>),
}

impl Branch {
    pub fn is_leafy(&self) -> bool {
        matches!(self, Branch::Leafy(_))
    }
}

/// Either `n/4k` leaves or `n/4k` disjoint bare paths of length `k`; leaves win ties.
pub fn classify(t: &TreeShape, k: usize) -> Result<Branch, TreeError> {
    let threshold = t.n() as f64 / (4 * k.max(1)) as f64;
    let l = leaves(t);
    if l.len() as f64 >= threshold {
        return Ok(Branch::Leafy(l));
    }
    let paths = bare_paths(t, k);
    if paths.len() as f64 >= threshold {
        return Ok(Branch::Pathy(paths));
    }
    Err(TreeError::DichotomyViolation {
        leaves: l.len(),
        paths: paths.len(),
        k,
        threshold,
    })
}

/// What to cut out of a tree.
#[derive(Clone, Debug)]
pub enum Removal {
    Leaves(VertexSet),
    Paths(Vec<BarePath>),
}

/// One connected piece of a stripped tree, with ids of the original tree.
#[derive(Clone, Debug)]
pub struct Component {
    pub tree: TreeShape,
    pub to_original: Vec<Vertex>,
}

/// A forest whose vertices are a subset of some original tree's ids.
#[derive(Clone, Debug)]
pub struct Forest {
    pub universe: usize,
    pub components: Vec<Component>,
}

impl Forest {
    pub fn single(t: &TreeShape) -> Self {
        Forest {
            universe: t.n(),
            components: vec![Component {
                tree: t.clone(),
                to_original: (0..t.n()).collect(),
            }],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(|c| c.tree.n()).sum()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::from_iter(
            self.universe,
            self.components.iter().flat_map(|c| c.to_original.iter().copied()),
        )
    }

    /// Edges in original ids.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.components
            .iter()
            .flat_map(|c| {
                c.tree
                    .edges()
                    .map(|(p, v)| (c.to_original[p], c.to_original[v]))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

/// How a stripped piece goes back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reattach {
    /// `count` leaves hang off `center`.
    Leaves { center: Vertex, count: usize },
    /// A path of length `k` joins `x` and `y`.
    Path { x: Vertex, y: Vertex, k: usize },
}

#[derive(Clone, Debug)]
pub struct StripResult {
    pub forest: Forest,
    pub requests: Vec<Reattach>,
    pub removed: VertexSet,
    /// For path requests, the removed interior in order from `x` to `y`.
    pub removed_runs: Vec<Vec<Vertex>>,
}

pub fn strip(t: &TreeShape, removal: &Removal) -> Result<StripResult, TreeError> {
    let n = t.n();
    let mut removed = VertexSet::new(n);
    let mut requests = Vec::new();
    let mut removed_runs = Vec::new();
    match removal {
        Removal::Leaves(set) => {
            if set.universe() != n {
                return Err(TreeError::InvalidRemoval("leaf set over the wrong universe".into()));
            }
            let mut demand = vec![0usize; n];
            for v in set.iter() {
                if t.degree(v) != 1 {
                    return Err(TreeError::InvalidRemoval(format!("{v} is not a leaf")));
                }
                let c = t.neighbors(v).next().expect("leaf has a neighbour");
                if set.contains(c) {
                    return Err(TreeError::InvalidRemoval(format!(
                        "leaves {v} and {c} are adjacent"
                    )));
                }
                demand[c] += 1;
                removed.insert(v);
            }
            for (center, &count) in demand.iter().enumerate() {
                if count > 0 {
                    requests.push(Reattach::Leaves { center, count });
                }
            }
        }
        Removal::Paths(paths) => {
            let mut touched = VertexSet::new(n);
            for p in paths {
                if p.vertices.len() < 2 || !p.is_bare_in(t) {
                    return Err(TreeError::InvalidRemoval(format!(
                        "{:?} is not a bare path",
                        p.vertices
                    )));
                }
                for &v in &p.vertices {
                    if !touched.insert(v) {
                        return Err(TreeError::InvalidRemoval(format!(
                            "bare paths overlap at {v}"
                        )));
                    }
                }
                let (x, y) = p.ends();
                for &v in p.interior() {
                    removed.insert(v);
                }
                requests.push(Reattach::Path { x, y, k: p.len() });
                removed_runs.push(p.interior().to_vec());
            }
        }
    }
    if removed.len() == n {
        return Err(TreeError::InvalidRemoval("nothing would remain".into()));
    }
    let forest = components_without(t, &removed);
    Ok(StripResult {
        forest,
        requests,
        removed,
        removed_runs,
    })
}

fn components_without(t: &TreeShape, removed: &VertexSet) -> Forest {
    let n = t.n();
    let mut comp_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for start in 0..n {
        if removed.contains(start) || comp_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        comp_of[start] = id;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            for u in t.neighbors(v) {
                if !removed.contains(u) && comp_of[u] == usize::MAX {
                    comp_of[u] = id;
                    members.push(u);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        let index = |v: Vertex| members.binary_search(&v).expect("member");
        let edges: Vec<_> = members
            .iter()
            .filter_map(|&v| {
                t.parent(v)
                    .filter(|p| !removed.contains(*p))
                    .map(|p| (index(p), index(v)))
            })
            .collect();
        let tree = TreeShape::from_edges(members.len(), &edges).expect("component is a tree");
        components.push(Component {
            tree,
            to_original: members,
        });
    }
    Forest {
        universe: n,
        components,
    }
}

/// Puts the stripped pieces back using the removed ids, giving a tree on the
/// original vertex set.
pub fn reconstruct(s: &StripResult) -> Result<TreeShape, TreeError> {
    let mut edges = s.forest.edges();
    let mut spare = s.removed.iter();
    let mut runs = s.removed_runs.iter();
    for req in &s.requests {
        match *req {
            Reattach::Leaves { center, count } => {
                for _ in 0..count {
                    let v = spare.next().ok_or_else(|| {
                        TreeError::InvalidRemoval("not enough removed vertices".into())
                    })?;
                    edges.push((center, v));
                }
            }
            Reattach::Path { x, y, .. } => {
                let run = runs
                    .next()
                    .ok_or_else(|| TreeError::InvalidRemoval("missing path interior".into()))?;
                let mut prev = x;
                for &v in run {
                    edges.push((prev, v));
                    prev = v;
                }
                edges.push((prev, y));
            }
        }
    }
    TreeShape::from_edges(s.forest.universe, &edges)
}

/// Canonical string of a tree up to isomorphism, rooted at its centre(s).
pub fn canonical_form(t: &TreeShape) -> String {
    centers(t)
        .into_iter()
        .map(|c| rooted_code(&t.rerooted(c)))
        .min()
        .expect("a tree has a centre")
}

fn centers(t: &TreeShape) -> Vec<Vertex> {
    let n = t.n();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut deg: Vec<usize> = (0..n).map(|v| t.degree(v)).collect();
    let mut layer: Vec<Vertex> = (0..n).filter(|&v| deg[v] == 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for u in t.neighbors(v) {
                deg[u] -= 1;
                if deg[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

fn rooted_code(t: &TreeShape) -> String {
    let order = t.bfs_order();
    let mut code: Vec<String> = vec![String::new(); t.n()];
    for &v in order.iter().rev() {
        let mut parts: Vec<String> = t
            .children(v)
            .iter()
            .map(|&c| std::mem::take(&mut code[c]))
            .collect();
        parts.sort_unstable();
        code[v] = format!("({})", parts.concat());
    }
    std::mem::take(&mut code[t.root()])
}

/// Shuffled copy of `t` (random relabelling), used to exercise isomorphism checks.
pub fn relabel_randomly(t: &TreeShape, seed: RngSeed) -> TreeShape {
    let mut perm: Vec<Vertex> = (0..t.n()).collect();
    perm.shuffle(&mut seed.rng());
    let edges: Vec<_> = t.edges().map(|(p, c)| (perm[p], perm[c])).collect();
    TreeShape::from_edges(t.n(), &edges).expect("relabelled tree")
}
