//! The end-to-end spanning tree embedding, its validator, and the
//! Monte-Carlo threshold harness.
//!
//! A trial reveals `G_1` and a fresh `G_2`, each at about `p/2`, whose
//! union is `G(n, p)`. Trees with many leaves lose them, the rest is
//! embedded into `G_1`, and the leaves come back through a capacitated
//! matching in `G_2`. Trees with many bare paths lose
//! the path interiors, the forest goes into `7n/8` of the vertices, and an
//! exact-length path cover of what is left reconnects it.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::absorb::{cover_with_paths, CoverConfig, StructureConfig};
use crate::embed::{attach_stars, check_embedding, embed_forest, EmbedConfig, Embedding, EmbeddingCheck, StarDemand};
use crate::expansion::{random_partition, split_target, CheckConfig};
use crate::graph::{gen_gnp, Graph, RngSeed, Vertex, VertexSet};
use crate::tree::{classify, gen_random_tree, strip, Branch, Reattach, Removal, TreeFamily, TreeShape};

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value:?}")]
    BadValue { key: String, value: String },
}

/// Every tunable constant of a trial.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleParams {
    /// Largest guest degree accepted.
    pub delta: usize,
    /// Expansion factor demanded of the two halves of the pathy split.
    pub split_d: f64,
    /// Check the split with the sampled expansion checker.
    pub verify_split: bool,
    /// Bare path length, in edges; the cover uses paths of `bare_len + 1` vertices.
    pub bare_len: usize,
    /// Leaves removed in the leafy branch; `None` removes every non-adjacent leaf.
    pub leaf_quota: Option<usize>,
    /// Bare paths stripped in the pathy branch; `None` strips all found.
    pub path_quota: Option<usize>,
    /// Absorbable reserve `r` of the cover; `None` picks it from the instance.
    pub absorbable: Option<usize>,
    /// Random matchings in the absorbing template (its degree is twice this).
    pub template_matchings: usize,
    /// Share of the cover's free vertices placed by insertion instead of routing.
    pub cover_fill: f64,
    pub embed_retries: usize,
    pub cover_retries: usize,
    pub split_retries: usize,
    pub strict_asymptotic: bool,
}

impl ScaleParams {
    /// Constants tuned to finish in seconds on a few hundred vertices.
    pub fn desk(n: usize, delta: usize) -> Self {
        let lg = (n.max(4) as f64).log2().round() as usize;
        ScaleParams {
            delta,
            split_d: 1.0,
            verify_split: false,
            bare_len: lg.clamp(3, 29),
            leaf_quota: None,
            path_quota: None,
            absorbable: None,
            template_matchings: 3,
            cover_fill: 0.4,
            embed_retries: 8,
            cover_retries: 5,
            split_retries: 3,
            strict_asymptotic: false,
        }
    }

    /// Every constant at its asymptotic formula evaluated at `n` (natural
    /// logarithms). Values are rounded up and floored at 1.
    pub fn asymptotic(n: usize, delta: usize) -> Self {
        let ln = (n.max(3) as f64).ln();
        let up = |x: f64| (x.ceil() as usize).max(1);
        ScaleParams {
            delta,
            split_d: ln.powi(4) / 200.0,
            verify_split: true,
            bare_len: up(1e3 * ln * ln),
            leaf_quota: Some(up(n as f64 / ln.powi(3))),
            path_quota: None,
            absorbable: None,
            template_matchings: 20,
            cover_fill: 0.0,
            embed_retries: 8,
            cover_retries: 5,
            split_retries: 3,
            strict_asymptotic: true,
        }
    }

    /// The edge probability the asymptotic statement asks for.
    pub fn asymptotic_probability(n: usize, delta: usize) -> f64 {
        let ln = (n.max(3) as f64).ln();
        delta as f64 * ln.powi(5) / n as f64
    }

    /// Overrides fields from flat `key=value` text; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ParamsError> {
        for (key, value) in parse_kv(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ParamsError> {
        let bad = || ParamsError::BadValue {
            key: key.into(),
            value: value.into(),
        };
        let num = || value.parse::<usize>().map_err(|_| bad());
        let opt = || {
            if value == "auto" || value == "all" {
                Ok(None)
            } else {
                value.parse::<usize>().map(Some).map_err(|_| bad())
            }
        };
        let flag = || value.parse::<bool>().map_err(|_| bad());
        match key {
            "delta" => self.delta = num()?,
            "split_d" => self.split_d = value.parse().map_err(|_| bad())?,
            "verify_split" => self.verify_split = flag()?,
            "bare_len" => self.bare_len = num()?,
            "leaf_quota" => self.leaf_quota = opt()?,
            "path_quota" => self.path_quota = opt()?,
            "absorbable" => self.absorbable = opt()?,
            "template_matchings" => self.template_matchings = num()?,
            "cover_fill" => self.cover_fill = value.parse().map_err(|_| bad())?,
            "embed_retries" => self.embed_retries = num()?,
            "cover_retries" => self.cover_retries = num()?,
            "split_retries" => self.split_retries = num()?,
            "strict_asymptotic" => self.strict_asymptotic = flag()?,
            _ => return Err(ParamsError::UnknownKey(key.into())),
        }
        Ok(())
    }
}

/// Flat `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, ParamsError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ParamsError::Syntax { line: i + 1 })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchKind {
    Leafy,
    Pathy,
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchKind::Leafy => "leafy",
            BranchKind::Pathy => "pathy",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Input,
    Reveal,
    Classify,
    Strip,
    Split,
    EmbedForest,
    Stars,
    Cover,
    Validate,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Input => "input",
            Phase::Reveal => "reveal",
            Phase::Classify => "classify",
            Phase::Strip => "strip",
            Phase::Split => "split",
            Phase::EmbedForest => "embed-forest",
            Phase::Stars => "stars",
            Phase::Cover => "cover",
            Phase::Validate => "validate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure { phase: Phase, detail: String },
}

#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub seed: RngSeed,
    pub n: usize,
    pub delta: usize,
    pub p: f64,
    pub branch: Option<BranchKind>,
    pub outcome: Outcome,
    pub wall_ms: f64,
    pub phase_ms: Vec<(Phase, f64)>,
    /// Constants that were clamped to stay meaningful at this size.
    pub adjustments: Vec<String>,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.outcome == Outcome::Success
    }

    pub fn failed_phase(&self) -> Option<Phase> {
        match &self.outcome {
            Outcome::Success => None,
            Outcome::Failure { phase, .. } => Some(*phase),
        }
    }
}

impl fmt::Display for TrialRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let branch = self.branch.map_or("-".to_string(), |b| b.to_string());
        write!(f, "n={} p={} delta={} branch={branch} ", self.n, self.p, self.delta)?;
        match &self.outcome {
            Outcome::Success => write!(f, "success")?,
            Outcome::Failure { phase, detail } => write!(f, "failure phase={phase} ({detail})")?,
        }
        write!(f, " {:.1}ms", self.wall_ms)
    }
}

/// A finished trial. `embedding` is `Some` exactly when the record reports
/// success, and then it has passed [`verify_embedding`].
#[derive(Clone, Debug)]
pub struct Trial {
    pub host: Graph,
    pub embedding: Option<Embedding>,
    pub record: TrialRecord,
}

struct Run {
    record: TrialRecord,
    clock: Instant,
}

impl Run {
    fn time<T>(&mut self, phase: Phase, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.record.phase_ms.push((phase, t.elapsed().as_secs_f64() * 1e3));
        out
    }

    fn finish(mut self, host: Graph, embedding: Option<Embedding>, outcome: Outcome) -> Trial {
        self.record.outcome = outcome;
        self.record.wall_ms = self.clock.elapsed().as_secs_f64() * 1e3;
        Trial {
            host,
            embedding,
            record: self.record,
        }
    }
}

fn fail(phase: Phase, detail: impl ToString) -> Outcome {
    Outcome::Failure {
        phase,
        detail: detail.to_string(),
    }
}

/// Runs one trial of the spanning tree pipeline on a fresh `G(n, p)`.
pub fn embed_spanning_tree(n: usize, p: f64, t: &TreeShape, params: &ScaleParams, seed: RngSeed) -> Trial {
    let mut run = Run {
        record: TrialRecord {
            seed,
            n,
            delta: t.max_degree(),
            p,
            branch: None,
            outcome: Outcome::Success,
            wall_ms: 0.0,
            phase_ms: Vec::new(),
            adjustments: Vec::new(),
        },
        clock: Instant::now(),
    };
    if t.n() != n || n == 0 {
        return run.finish(Graph::empty(n.max(1)), None, fail(Phase::Input, format!("tree has {} vertices, not {n}", t.n())));
    }
    if !t.within_degree(params.delta) {
        return run.finish(Graph::empty(n), None, fail(Phase::Input, format!("tree degree {} exceeds {}", t.max_degree(), params.delta)));
    }
    let revealed = run.time(Phase::Reveal, || {
        let half = reveal_probability(p);
        let g1 = gen_gnp(n, half, seed.derive(1))?;
        let g2 = gen_gnp(n, half, seed.derive(2))?;
        Ok::<_, crate::graph::GraphError>((g1, g2))
    });
    let (g1, g2) = match revealed {
        Ok(gs) => gs,
        Err(e) => return run.finish(Graph::empty(n), None, fail(Phase::Input, e)),
    };
    let host = g1.union(&g2);
    if n == 1 {
        let mut e = Embedding::new(1, 1);
        e.set(0, 0);
        return run.finish(host, Some(e), Outcome::Success);
    }
    let branch = match run.time(Phase::Classify, || classify(t, params.bare_len)) {
        Ok(b) => b,
        Err(e) => return run.finish(host, None, fail(Phase::Classify, e)),
    };
    run.record.branch = Some(if branch.is_leafy() {
        BranchKind::Leafy
    } else {
        BranchKind::Pathy
    });
    let result = match branch {
        Branch::Leafy(leaves) => leafy(&mut run, &g1, &g2, t, &leaves, params, seed),
        Branch::Pathy(paths) => pathy(&mut run, &host, t, paths, params, seed),
    };
    match result {
        Err(outcome) => run.finish(host, None, outcome),
        Ok(emb) => {
            let check = run.time(Phase::Validate, || verify_embedding(&host, t, &emb));
            if check.is_valid() {
                run.finish(host, Some(emb), Outcome::Success)
            } else {
                run.finish(host, None, fail(Phase::Validate, format!("{check:?}")))
            }
        }
    }
}

/// Probability of each of two independent rounds whose union is `G(n, p)`;
/// close to `p/2` for small `p`.
pub fn reveal_probability(p: f64) -> f64 {
    if (0.0..=1.0).contains(&p) {
        1.0 - (1.0 - p).sqrt()
    } else {
        p
    }
}

fn embed_cfg(params: &ScaleParams) -> EmbedConfig {
    EmbedConfig {
        max_retries: params.embed_retries,
        ..EmbedConfig::default()
    }
}

fn leafy(
    run: &mut Run,
    g1: &Graph,
    g2: &Graph,
    t: &TreeShape,
    leaves: &VertexSet,
    params: &ScaleParams,
    seed: RngSeed,
) -> Result<Embedding, Outcome> {
    let n = t.n();
    // Both ends of a single edge cannot go.
    let mut chosen = VertexSet::new(n);
    let quota = params.leaf_quota.unwrap_or(n).min(leaves.len());
    for v in leaves.iter() {
        if chosen.len() == quota {
            break;
        }
        let c = t.neighbors(v).next().expect("leaf has a neighbour");
        if !chosen.contains(c) {
            chosen.insert(v);
        }
    }
    if chosen.is_empty() {
        run.record.adjustments.push("no removable leaf; kept at least one".into());
        return Err(fail(Phase::Strip, "no removable leaves"));
    }
    let stripped = run.time(Phase::Strip, || strip(t, &Removal::Leaves(chosen))).map_err(|e| fail(Phase::Strip, e))?;
    let all = VertexSet::full(n);
    let mut centres_of = Vec::new();
    let mut demand = Vec::new();
    let mut hanging: Vec<Vec<Vertex>> = Vec::new();
    for r in &stripped.requests {
        if let Reattach::Leaves { center, count } = *r {
            centres_of.push(center);
            demand.push(count);
            hanging.push(t.neighbors(center).filter(|&u| stripped.removed.contains(u)).collect());
        }
    }
    // A star failure depends on which vertices the forest left free, so a
    // fresh forest embedding gets another pool.
    let mut last = None;
    let mut found = None;
    for attempt in 0..params.embed_retries.max(1) {
        let s = if attempt == 0 { seed } else { seed.derive(100 + attempt as u64) };
        let emb = run
            .time(Phase::EmbedForest, || embed_forest(g1, &stripped.forest, &all, &embed_cfg(params), s.derive(3)))
            .map_err(|e| fail(Phase::EmbedForest, e))?;
        let mut pool = VertexSet::full(n);
        pool.difference_with(emb.used());
        let centers = centres_of.iter().map(|&c| emb.get(c).expect("centre embedded")).collect();
        let demand = demand.clone();
        match run.time(Phase::Stars, || attach_stars(g2, &StarDemand { centers, demand, pool }, s.derive(4))) {
            Ok(stars) => {
                found = Some((emb, stars));
                break;
            }
            Err(e) => last = Some(e),
        }
    }
    let (mut emb, stars) = match found {
        Some(f) => f,
        None => return Err(fail(Phase::Stars, last.expect("at least one attempt"))),
    };
    for (guests, images) in hanging.iter().zip(stars) {
        for (&g, h) in guests.iter().zip(images) {
            emb.set(g, h);
        }
    }
    Ok(emb)
}

fn pathy(
    run: &mut Run,
    g: &Graph,
    t: &TreeShape,
    mut paths: Vec<crate::tree::BarePath>,
    params: &ScaleParams,
    seed: RngSeed,
) -> Result<Embedding, Outcome> {
    let n = t.n();
    if let Some(q) = params.path_quota {
        paths.truncate(q.max(1));
    }
    let stripped = run.time(Phase::Strip, || strip(t, &Removal::Paths(paths))).map_err(|e| fail(Phase::Strip, e))?;
    let small = n / 8;
    let big = n - small;
    if stripped.forest.vertex_count() > big {
        return Err(fail(
            Phase::Strip,
            format!("forest keeps {} vertices, more than {big}", stripped.forest.vertex_count()),
        ));
    }
    let members: Vec<Vertex> = (0..n).collect();
    let parts = run.time(Phase::Split, || {
        if params.verify_split {
            split_target(
                g,
                &VertexSet::full(n),
                &[big, small],
                params.split_d,
                0.0,
                &CheckConfig::sampled(500, seed.derive(5)),
                params.split_retries,
            )
            .map_err(|e| fail(Phase::Split, e))
        } else {
            Ok(random_partition(n, &members, &[big, small], seed.derive(5)))
        }
    })?;
    let mut emb = run
        .time(Phase::EmbedForest, || embed_forest(g, &stripped.forest, &parts[0], &embed_cfg(params), seed.derive(6)))
        .map_err(|e| fail(Phase::EmbedForest, e))?;

    // The cover runs on the unused vertices plus the images of path ends.
    let mut region = VertexSet::full(n);
    region.difference_with(emb.used());
    let mut pairs = Vec::new();
    let mut len = None;
    for r in &stripped.requests {
        if let Reattach::Path { x, y, k } = *r {
            let (a, b) = (emb.get(x).expect("end embedded"), emb.get(y).expect("end embedded"));
            region.insert(a);
            region.insert(b);
            pairs.push((a, b));
            if len.is_some_and(|l| l != k) {
                return Err(fail(Phase::Strip, "bare paths of different lengths"));
            }
            len = Some(k);
        }
    }
    let l = len.expect("at least one path") + 1;
    let induced = g.induced(&region);
    let mut local = vec![usize::MAX; n];
    for (i, &v) in induced.to_parent.iter().enumerate() {
        local[v] = i;
    }
    let local_pairs: Vec<(Vertex, Vertex)> = pairs.iter().map(|&(a, b)| (local[a], local[b])).collect();
    let r = params.absorbable.unwrap_or_else(|| auto_absorbable(local_pairs.len(), l, params.template_matchings));
    if params.absorbable.is_none() && r == 0 {
        run.record.adjustments.push(format!("paths of {l} vertices are too short for an absorbing structure; cover uses the insertion endgame only"));
    }
    let cfg = CoverConfig {
        absorbable: r,
        fill_fraction: params.cover_fill,
        retries: params.cover_retries,
        structure: StructureConfig {
            matchings: params.template_matchings,
            ..StructureConfig::default()
        },
        ..CoverConfig::default()
    };
    let cover = run
        .time(Phase::Cover, || cover_with_paths(&induced.graph, &local_pairs, l, &cfg, seed.derive(7)))
        .map_err(|e| fail(Phase::Cover, e))?;
    for (path, run_guests) in cover.iter().zip(&stripped.removed_runs) {
        let inner = &path.vertices[1..path.vertices.len() - 1];
        for (&guest, &h) in run_guests.iter().zip(inner) {
            emb.set(guest, induced.to_parent[h]);
        }
    }
    Ok(emb)
}

/// The largest reserve the cover can use: the structure takes `3r` of the
/// pairs, and each merged absorber of up to `2·matchings` size-3 absorbers
/// plus links of at least two edges must fit in `l − 1` vertices.
pub fn auto_absorbable(pairs: usize, l: usize, matchings: usize) -> usize {
    let t = 2 * matchings;
    let need = 2 + 3 * t + (t + 1) * 2 - t;
    if l < need || pairs < 4 {
        return 0;
    }
    ((pairs - 1) / 3).clamp(1, 3)
}

/// Totality, injectivity and edge preservation of `φ` against `G`.
pub fn verify_embedding(g: &Graph, t: &TreeShape, phi: &Embedding) -> EmbeddingCheck {
    check_embedding(|a, b| g.has_edge(a, b), 0..t.n(), t.edges(), phi, None)
}

/// Grid and trial settings for [`threshold_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub family: TreeFamily,
    pub delta: usize,
    pub ns: Vec<usize>,
    pub ps: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// `desk` or `asymptotic` constants.
    pub asymptotic: bool,
    pub parallel: bool,
    /// Extra `key=value` overrides applied to every cell's params.
    pub overrides: String,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            family: TreeFamily::UniformAttachment,
            delta: 3,
            ns: vec![128],
            ps: vec![0.3],
            trials: 10,
            seed: 0,
            asymptotic: false,
            parallel: true,
            overrides: String::new(),
        }
    }
}

impl ScanConfig {
    /// Reads `family`, `delta`, `n`, `p` (comma lists), `trials`, `seed`,
    /// `mode` (`desk` or `asymptotic`) and `parallel`; any other key is passed on
    /// to [`ScaleParams::apply_kv`].
    pub fn from_kv(text: &str) -> Result<Self, ParamsError> {
        let mut c = ScanConfig::default();
        let mut extra = String::new();
        for (key, value) in parse_kv(text)? {
            let bad = || ParamsError::BadValue {
                key: key.clone(),
                value: value.clone(),
            };
            match key.as_str() {
                "family" => c.family = value.parse().map_err(|_| bad())?,
                "delta" => c.delta = value.parse().map_err(|_| bad())?,
                "n" => c.ns = list(&value).ok_or_else(bad)?,
                "p" => c.ps = list(&value).ok_or_else(bad)?,
                "trials" => c.trials = value.parse().map_err(|_| bad())?,
                "seed" => c.seed = value.parse().map_err(|_| bad())?,
                "mode" => {
                    c.asymptotic = match value.as_str() {
                        "desk" => false,
                        "asymptotic" => true,
                        _ => return Err(bad()),
                    }
                }
                "parallel" => c.parallel = value.parse().map_err(|_| bad())?,
                _ => {
                    // Validate now so typos fail before any trial runs.
                    ScaleParams::desk(16, 3).set(&key, &value)?;
                    extra.push_str(&format!("{key}={value}\n"));
                }
            }
        }
        if c.ns.is_empty() || c.ps.is_empty() {
            return Err(ParamsError::BadValue {
                key: "n/p".into(),
                value: "empty grid".into(),
            });
        }
        c.overrides = extra;
        Ok(c)
    }

    pub fn params(&self, n: usize) -> ScaleParams {
        let mut p = if self.asymptotic {
            ScaleParams::asymptotic(n, self.delta)
        } else {
            ScaleParams::desk(n, self.delta)
        };
        p.apply_kv(&self.overrides).expect("validated when parsed");
        p
    }
}

fn list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// Aggregated results of one `(n, p)` cell.
#[derive(Clone, Debug)]
pub struct ScanCell {
    pub n: usize,
    pub p: f64,
    pub family: TreeFamily,
    pub delta: usize,
    pub records: Vec<TrialRecord>,
}

impl ScanCell {
    pub fn successes(&self) -> usize {
        self.records.iter().filter(|r| r.succeeded()).count()
    }

    pub fn rate(&self) -> f64 {
        self.successes() as f64 / self.records.len().max(1) as f64
    }

    pub fn mean_ms(&self) -> f64 {
        self.records.iter().map(|r| r.wall_ms).sum::<f64>() / self.records.len().max(1) as f64
    }

    pub fn branch_counts(&self) -> String {
        let count = |b| self.records.iter().filter(|r| r.branch == Some(b)).count();
        format!("leafy:{};pathy:{}", count(BranchKind::Leafy), count(BranchKind::Pathy))
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{}",
            self.n,
            self.p,
            self.family.name(),
            self.delta,
            self.records.len(),
            self.successes(),
            self.mean_ms(),
            self.branch_counts()
        )
    }
}

pub const CSV_HEADER: &str = "n,p,family,delta,trials,successes,mean_ms,branch_counts";

/// Trial `i` of size `n` uses the same tree and seed for every `p`, so
/// neighbouring cells are paired comparisons.
pub fn scan_trial(cfg: &ScanConfig, n: usize, p: f64, i: usize) -> TrialRecord {
    let seed = RngSeed::with_stream(cfg.seed, (n as u64) << 32 | i as u64);
    let params = cfg.params(n);
    match gen_random_tree(n, cfg.delta, cfg.family, seed.derive(0)) {
        Ok(t) => embed_spanning_tree(n, p, &t, &params, seed).record,
        Err(e) => TrialRecord {
            seed,
            n,
            delta: cfg.delta,
            p,
            branch: None,
            outcome: fail(Phase::Input, e),
            wall_ms: 0.0,
            phase_ms: Vec::new(),
            adjustments: Vec::new(),
        },
    }
}

/// Runs every cell, writing the CSV header and then one row per finished
/// cell (flushed as it goes).
pub fn threshold_scan<W: Write>(cfg: &ScanConfig, mut out: W) -> std::io::Result<Vec<ScanCell>> {
    writeln!(out, "{CSV_HEADER}")?;
    out.flush()?;
    let mut cells = Vec::new();
    for &n in &cfg.ns {
        for &p in &cfg.ps {
            let records: Vec<TrialRecord> = if cfg.parallel {
                (0..cfg.trials).into_par_iter().map(|i| scan_trial(cfg, n, p, i)).collect()
            } else {
                (0..cfg.trials).map(|i| scan_trial(cfg, n, p, i)).collect()
            };
            let cell = ScanCell {
                n,
                p,
                family: cfg.family,
                delta: cfg.delta,
                records,
            };
            writeln!(out, "{}", cell.csv_row())?;
            out.flush()?;
            cells.push(cell);
        }
    }
    Ok(cells)
}
