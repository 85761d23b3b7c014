//! Certifying vertex expansion, exactly on small graphs and by targeted
//! sampling on large ones, plus expansion-preserving splits of a target set.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{gen_gnp, DiGraph, Graph, RngSeed, Vertex, VertexSet};

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("expansion factor must be positive, got {0}")]
    BadFactor(f64),
    #[error("target set is empty")]
    EmptyTarget,
    #[error("target set is not inside the vertex range")]
    TargetOutOfRange,
    #[error("exhaustive check would visit {needed} sets, above the cap of {cap}")]
    TooManySets { needed: u128, cap: u128 },
    #[error("part sizes sum to {got}, target has {want} vertices")]
    SizeMismatch { got: usize, want: usize },
    #[error("part {index} would only get factor {factor:.3}, below the floor {floor:.3}")]
    BelowFloor { index: usize, factor: f64, floor: f64 },
    #[error("no verified split after {retries} attempts; last failure in part {part}: {report}")]
    RetriesExhausted {
        retries: usize,
        part: usize,
        report: Box<ExpansionReport>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckMode {
    /// Every candidate set; `holds` is exact.
    Exhaustive,
    /// Targeted candidates; `holds` means no violation was found.
    Sampled,
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::Sampled => "sampled",
        })
    }
}

impl FromStr for CheckMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(CheckMode::Exhaustive),
            "sampled" => Ok(CheckMode::Sampled),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub mode: CheckMode,
    /// Random candidates per condition in sampled mode.
    pub budget: usize,
    /// Upper limit on the number of sets an exhaustive check may visit.
    pub cap: u128,
    /// Sampled mode sweeps every set up to size 3 while the count stays below this.
    pub sweep_limit: u128,
    pub seed: RngSeed,
}

impl CheckConfig {
    pub fn exhaustive() -> Self {
        CheckConfig {
            mode: CheckMode::Exhaustive,
            ..Self::sampled(0, RngSeed::new(0))
        }
    }

    pub fn sampled(budget: usize, seed: RngSeed) -> Self {
        CheckConfig {
            mode: CheckMode::Sampled,
            budget,
            cap: 10_000_000,
            sweep_limit: 2_000_000,
            seed,
        }
    }
}

/// A set that fails to grow: `|N(X, W)| < d|X|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkWitness {
    pub x: Vec<Vertex>,
    pub neighbors: usize,
}

/// Two disjoint sets of the cut size with no edge between them.
#[derive(Clone, Debug, PartialEq)]
pub struct GapWitness {
    pub x: Vec<Vertex>,
    pub y: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Shrink(ShrinkWitness),
    Gap(GapWitness),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub holds: bool,
    pub mode: CheckMode,
    pub d: f64,
    pub target_size: usize,
    /// `⌈|W| / 2d⌉`.
    pub cut: usize,
    pub shrink: Option<ShrinkWitness>,
    pub gap: Option<GapWitness>,
    pub sets_checked: u64,
}

impl ExpansionReport {
    /// The first violation found, small-set failures first.
    pub fn witness(&self) -> Option<Witness> {
        self.shrink
            .clone()
            .map(Witness::Shrink)
            .or_else(|| self.gap.clone().map(Witness::Gap))
    }

    /// `key: value` lines.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        let list = |v: &[Vertex]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        s += &format!("holds: {}\n", self.holds);
        s += &format!("mode: {}\n", self.mode);
        s += &format!("d: {}\n", self.d);
        s += &format!("target_size: {}\n", self.target_size);
        s += &format!("cut: {}\n", self.cut);
        s += &format!("sets_checked: {}\n", self.sets_checked);
        if let Some(w) = &self.shrink {
            s += &format!("shrink_set: {}\n", list(&w.x));
            s += &format!("shrink_neighbors: {}\n", w.neighbors);
        }
        if let Some(w) = &self.gap {
            s += &format!("gap_x: {}\n", list(&w.x));
            s += &format!("gap_y: {}\n", list(&w.y));
        }
        s
    }
}

impl fmt::Display for ExpansionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "holds={} mode={} d={} |W|={} cut={} checked={}",
            self.holds, self.mode, self.d, self.target_size, self.cut, self.sets_checked
        )
    }
}

/// `⌈m / 2d⌉`.
pub fn cut_size(m: usize, d: f64) -> usize {
    (m as f64 / (2.0 * d)).ceil() as usize
}

/// Whether `G` is an `(n, d)`-expander, as far as `cfg` can tell.
pub fn check_expander(g: &Graph, d: f64, cfg: &CheckConfig) -> Result<ExpansionReport, ExpansionError> {
    check_expands_into(g, &g.vertices(), d, cfg)
}

/// Whether `G` `d`-expands into `W`, as far as `cfg` can tell.
pub fn check_expands_into(
    g: &Graph,
    w: &VertexSet,
    d: f64,
    cfg: &CheckConfig,
) -> Result<ExpansionReport, ExpansionError> {
    if !(d > 0.0) {
        return Err(ExpansionError::BadFactor(d));
    }
    if w.universe() != g.n() {
        return Err(ExpansionError::TargetOutOfRange);
    }
    if w.is_empty() {
        return Err(ExpansionError::EmptyTarget);
    }
    let ctx = Ctx {
        g,
        w,
        d,
        cut: cut_size(w.len(), d),
    };
    let (shrink, gap, sets_checked) = match cfg.mode {
        CheckMode::Exhaustive => ctx.exhaustive(cfg.cap)?,
        CheckMode::Sampled => ctx.sampled(cfg),
    };
    Ok(ExpansionReport {
        holds: shrink.is_none() && gap.is_none(),
        mode: cfg.mode,
        d,
        target_size: w.len(),
        cut: ctx.cut,
        shrink,
        gap,
        sets_checked,
    })
}

/// Re-checks a witness by direct computation.
pub fn witness_is_genuine(g: &Graph, w: &VertexSet, d: f64, witness: &Witness) -> bool {
    let n = g.n();
    let cut = cut_size(w.len(), d);
    match witness {
        Witness::Shrink(s) => {
            let x = VertexSet::from_iter(n, s.x.iter().copied());
            let nb = g.neighborhood(&x, w).len();
            !s.x.is_empty()
                && x.len() == s.x.len()
                && s.x.len() < cut
                && nb == s.neighbors
                && (nb as f64) < d * s.x.len() as f64
        }
        Witness::Gap(gw) => {
            let x = VertexSet::from_iter(n, gw.x.iter().copied());
            let y = VertexSet::from_iter(n, gw.y.iter().copied());
            x.len() == cut
                && y.len() == cut
                && gw.x.len() == cut
                && gw.y.len() == cut
                && matches!(g.edges_between(&x, &y), Ok(0))
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u128::MAX / 1024 {
            return u128::MAX / 1024;
        }
    }
    acc
}

/// Calls `f` on every `k`-subset of `[0, n)` in lexicographic order until it returns `true`.
fn for_each_subset<F: FnMut(&[Vertex]) -> bool>(n: usize, k: usize, mut f: F) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<Vertex> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct Ctx<'a> {
    g: &'a Graph,
    w: &'a VertexSet,
    d: f64,
    cut: usize,
}

type Found = (Option<ShrinkWitness>, Option<GapWitness>, u64);

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.g.n()
    }

    fn shrinks(&self, x: &VertexSet) -> Option<ShrinkWitness> {
        let nb = self.g.neighborhood(x, self.w).len();
        ((nb as f64) < self.d * x.len() as f64).then(|| ShrinkWitness {
            x: x.to_vec(),
            neighbors: nb,
        })
    }

    /// For `|X| = cut`, a `Y` of the same size with no edges to `X`.
    fn gap_for(&self, x: &VertexSet) -> Option<GapWitness> {
        let all = VertexSet::full(self.n());
        let mut rest = all.difference(x);
        rest.difference_with(&self.g.neighborhood(x, &all));
        (rest.len() >= self.cut).then(|| GapWitness {
            x: x.to_vec(),
            y: rest.iter().take(self.cut).collect(),
        })
    }

    fn gap_possible(&self) -> bool {
        2 * self.cut <= self.n()
    }

    fn exhaustive(&self, cap: u128) -> Result<Found, ExpansionError> {
        let n = self.n();
        let mut needed: u128 = (1..self.cut).map(|s| binomial(n, s)).sum();
        if self.gap_possible() {
            needed += binomial(n, self.cut);
        }
        if needed > cap {
            return Err(ExpansionError::TooManySets { needed, cap });
        }
        let mut checked = 0u64;
        let mut shrink = None;
        'sizes: for s in 1..self.cut {
            let found = for_each_subset(n, s, |idx| {
                checked += 1;
                shrink = self.shrinks(&VertexSet::from_iter(n, idx.iter().copied()));
                shrink.is_some()
            });
            if found {
                break 'sizes;
            }
        }
        let mut gap = None;
        if self.gap_possible() {
            for_each_subset(n, self.cut, |idx| {
                checked += 1;
                gap = self.gap_for(&VertexSet::from_iter(n, idx.iter().copied()));
                gap.is_some()
            });
        }
        Ok((shrink, gap, checked))
    }

    fn sampled(&self, cfg: &CheckConfig) -> Found {
        let n = self.n();
        let mut checked = 0u64;

        // Every set of size at most 3 (or fewer when that is too many).
        let mut shrink = None;
        let mut swept = 0u128;
        for s in 1..self.cut.min(4) {
            swept += binomial(n, s);
            if swept > cfg.sweep_limit {
                break;
            }
            for_each_subset(n, s, |idx| {
                checked += 1;
                shrink = self.shrinks(&VertexSet::from_iter(n, idx.iter().copied()));
                shrink.is_some()
            });
            if shrink.is_some() {
                break;
            }
        }
        let mut gap = None;
        let gap_sweep = self.gap_possible() && binomial(n, self.cut) <= cfg.sweep_limit;
        if gap_sweep {
            for_each_subset(n, self.cut, |idx| {
                checked += 1;
                gap = self.gap_for(&VertexSet::from_iter(n, idx.iter().copied()));
                gap.is_some()
            });
        }

        let mut sequences = self.candidate_orders(cfg);
        if shrink.is_none() || (gap.is_none() && self.gap_possible() && !gap_sweep) {
            // Prefixes of each ordering are candidate sets for both conditions.
            let results: Vec<(Option<ShrinkWitness>, Option<GapWitness>, u64)> = sequences
                .par_iter()
                .map(|order| self.scan_prefixes(order, shrink.is_none(), !gap_sweep))
                .collect();
            for (s, gp, c) in results {
                checked += c;
                if shrink.is_none() {
                    shrink = s;
                }
                if gap.is_none() {
                    gap = gp;
                }
            }
        }
        sequences.clear();
        (shrink, gap, checked)
    }

    /// Vertex orders whose prefixes are tried as candidate sets: BFS balls,
    /// lowest degree into `W` first, `W` itself, and random orders.
    fn candidate_orders(&self, cfg: &CheckConfig) -> Vec<Vec<Vertex>> {
        let n = self.n();
        let len = self.cut.max(1);
        let mut orders = Vec::new();
        let mut by_degree: Vec<Vertex> = (0..n).collect();
        by_degree.sort_by_key(|&v| (self.g.degree_into(v, self.w), v));
        by_degree.truncate(len);
        orders.push(by_degree);
        let mut w_first: Vec<Vertex> = self.w.iter().collect();
        w_first.truncate(len);
        orders.push(w_first);
        let mut outside: Vec<Vertex> = (0..n).filter(|&v| !self.w.contains(v)).collect();
        outside.truncate(len);
        if !outside.is_empty() {
            orders.push(outside);
        }

        // BFS balls from every vertex when affordable, otherwise from a sample.
        let mut rng = cfg.seed.rng();
        let ball_limit = 4_000_000usize;
        let mut seeds: Vec<Vertex> = (0..n).collect();
        if n.saturating_mul(len) > ball_limit {
            seeds.shuffle(&mut rng);
            seeds.truncate((ball_limit / len).max(32).min(n));
        }
        let all = VertexSet::full(n);
        for s in seeds {
            let dist = self.g.bfs_distances(s, &all);
            let mut ball: Vec<Vertex> = (0..n).filter(|&v| dist[v] != usize::MAX).collect();
            ball.sort_by_key(|&v| (dist[v], v));
            ball.truncate(len);
            orders.push(ball);
        }

        let mut pool: Vec<Vertex> = (0..n).collect();
        let random_orders = cfg.budget.div_ceil(len.max(1)).max(usize::from(cfg.budget > 0));
        for _ in 0..random_orders {
            pool.shuffle(&mut rng);
            orders.push(pool[..len.min(n)].to_vec());
        }
        // A few sets of random sizes concentrated near the small end.
        for _ in 0..cfg.budget.min(4096) {
            let hi = self.cut.saturating_sub(1).max(1);
            let size = (hi as f64).powf(rng.random::<f64>()).floor().max(1.0) as usize;
            pool.shuffle(&mut rng);
            orders.push(pool[..size.min(n)].to_vec());
        }
        orders
    }

    fn scan_prefixes(&self, order: &[Vertex], want_shrink: bool, want_gap: bool) -> Found {
        let n = self.n();
        let all = VertexSet::full(n);
        let mut x = VertexSet::new(n);
        let mut reach = VertexSet::new(n);
        let mut checked = 0u64;
        let mut shrink = None;
        for (i, &v) in order.iter().enumerate() {
            x.insert(v);
            match self.g.neighbor_row(v) {
                Some(row) => reach.union_with(row),
                None => self.g.neighbors(v).iter().for_each(|&u| {
                    reach.insert(u);
                }),
            }
            let size = i + 1;
            if want_shrink && shrink.is_none() && size < self.cut {
                checked += 1;
                let mut nb = reach.difference(&x);
                nb.intersect_with(self.w);
                if (nb.len() as f64) < self.d * size as f64 {
                    shrink = Some(ShrinkWitness {
                        x: x.to_vec(),
                        neighbors: nb.len(),
                    });
                }
            }
            if size == self.cut {
                let gap = if want_gap && self.gap_possible() {
                    checked += 1;
                    let mut rest = all.difference(&x);
                    rest.difference_with(&reach);
                    (rest.len() >= self.cut).then(|| GapWitness {
                        x: x.to_vec(),
                        y: rest.iter().take(self.cut).collect(),
                    })
                } else {
                    None
                };
                return (shrink, gap, checked);
            }
        }
        (shrink, None, checked)
    }
}

/// Sampled check that every small set has at least `(d + 1)|X|` out- and
/// in-neighbours, for sets below `⌈n / 2d⌉`.
pub fn check_directed_expansion(
    h: &DiGraph,
    d: f64,
    budget: usize,
    seed: RngSeed,
) -> Result<Option<Vec<Vertex>>, ExpansionError> {
    if !(d > 0.0) {
        return Err(ExpansionError::BadFactor(d));
    }
    let n = h.n();
    let cut = cut_size(n, d).max(2);
    let all = VertexSet::full(n);
    let fails = |x: &VertexSet| {
        let need = (d + 1.0) * x.len() as f64;
        (h.out_neighborhood(x, &all).len() as f64) < need
            || (h.in_neighborhood(x, &all).len() as f64) < need
    };
    for v in 0..n {
        let x = VertexSet::from_iter(n, [v]);
        if fails(&x) {
            return Ok(Some(vec![v]));
        }
    }
    let mut rng = seed.rng();
    let mut pool: Vec<Vertex> = (0..n).collect();
    for _ in 0..budget {
        let size = rng.random_range(1..cut);
        pool.shuffle(&mut rng);
        let x = VertexSet::from_iter(n, pool[..size.min(n)].iter().copied());
        if fails(&x) {
            return Ok(Some(x.to_vec()));
        }
    }
    Ok(None)
}

/// Randomly partitions `W` into parts of the given sizes so that `G`
/// `(m_i / 5m) d`-expands into each part, resampling until a split verifies.
pub fn split_target(
    g: &Graph,
    w: &VertexSet,
    sizes: &[usize],
    d: f64,
    floor: f64,
    check: &CheckConfig,
    max_retries: usize,
) -> Result<Vec<VertexSet>, ExpansionError> {
    let m = w.len();
    let total: usize = sizes.iter().sum();
    if total != m {
        return Err(ExpansionError::SizeMismatch { got: total, want: m });
    }
    let factors: Vec<f64> = sizes.iter().map(|&mi| mi as f64 / (5 * m) as f64 * d).collect();
    for (index, &factor) in factors.iter().enumerate() {
        if factor < floor {
            return Err(ExpansionError::BelowFloor { index, factor, floor });
        }
    }
    if sizes.len() == 1 {
        return Ok(vec![w.clone()]);
    }
    let members: Vec<Vertex> = w.iter().collect();
    let mut last = None;
    for attempt in 0..max_retries.max(1) {
        let parts = random_partition(g.n(), &members, sizes, check.seed.derive(attempt as u64));
        let mut failed = None;
        for (i, part) in parts.iter().enumerate() {
            if sizes[i] == 0 {
                continue;
            }
            let sub = CheckConfig {
                seed: check.seed.derive(((attempt * sizes.len() + i) as u64) | (1 << 40)),
                ..check.clone()
            };
            let report = check_expands_into(g, part, factors[i], &sub)?;
            if !report.holds {
                failed = Some((i, report));
                break;
            }
        }
        match failed {
            None => return Ok(parts),
            Some(f) => last = Some(f),
        }
    }
    let (part, report) = last.expect("at least one attempt ran");
    Err(ExpansionError::RetriesExhausted {
        retries: max_retries.max(1),
        part,
        report: Box::new(report),
    })
}

/// Uniformly random partition of `members` into consecutive parts of `sizes`.
pub fn random_partition(
    n: usize,
    members: &[Vertex],
    sizes: &[usize],
    seed: RngSeed,
) -> Vec<VertexSet> {
    let mut shuffled = members.to_vec();
    shuffled.shuffle(&mut seed.rng());
    let mut parts = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &s in sizes {
        parts.push(VertexSet::from_iter(n, shuffled[at..at + s].iter().copied()));
        at += s;
    }
    parts
}

/// Edge probability `factor · d · ln n / n`, capped at 1.
pub fn expander_probability(n: usize, d: f64, factor: f64) -> f64 {
    (factor * d * (n as f64).ln() / n as f64).min(1.0)
}

/// Fraction of `G(n, 7d ln n / n)` samples the sampled checker accepts as
/// `(n, d)`-expanders.
pub fn verify_random_expansion(n: usize, d: f64, trials: usize, seed: RngSeed) -> f64 {
    verify_random_expansion_with(n, d, 7.0, trials, 2_000, seed)
}

pub fn verify_random_expansion_with(
    n: usize,
    d: f64,
    factor: f64,
    trials: usize,
    budget: usize,
    seed: RngSeed,
) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = expander_probability(n, d, factor);
    let passed = (0..trials)
        .filter(|&t| {
            let g = gen_gnp(n, p, seed.derive(t as u64)).expect("valid parameters");
            let cfg = CheckConfig::sampled(budget, seed.derive(t as u64 + (1 << 32)));
            check_expander(&g, d, &cfg).map(|r| r.holds).unwrap_or(false)
        })
        .count();
    passed as f64 / trials as f64
}
