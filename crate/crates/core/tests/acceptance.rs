//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line;
//! the process fails if any criterion does.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;
use treeweave::absorb::{
    build_absorbers, build_absorbing_structure, build_flex_template, build_reversible_path, cover_with_paths,
    cover_with_paths_directed, resilient_match, AbsorberShape, CoverConfig, FlexTemplate, Resilience,
    StructureConfig,
};
use treeweave::expansion::{check_expands_into, witness_is_genuine, CheckConfig, ExpansionReport, GapWitness, Witness};
use treeweave::graph::{gen_gnp, gen_gnp_directed};
use treeweave::paths::{connect_pairs_exact, ExactPath, PathConfig, PathRequest};
use treeweave::pipeline::{embed_spanning_tree, scan_trial, ScaleParams, ScanConfig};
use treeweave::tree::{bare_paths, classify, gen_random_tree, relabel_randomly, Branch, TreeFamily};
use treeweave::{DiGraph, Graph, RngSeed, TreeShape, Vertex, VertexSet};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn vertices_of(ps: &[ExactPath]) -> Vec<Vec<Vertex>> {
    ps.iter().map(|p| p.vertices.clone()).collect()
}

fn embedding_validity() -> Verdict {
    let ns = [64, 128, 256];
    let ps = [0.2, 0.35, 0.6];
    let (mut successes, mut trials) = (0, 0);
    for i in 0..500u64 {
        let fam = TreeFamily::ALL[i as usize % 5];
        let n = ns[(i as usize / 5) % 3];
        let p = ps[(i as usize / 15) % 3];
        let t = gen_random_tree(n, 3, fam, RngSeed::new(i)).map_err(|e| e.to_string())?;
        let trial = embed_spanning_tree(n, p, &t, &ScaleParams::desk(n, 3), RngSeed::new(10_000 + i));
        trials += 1;
        ensure(trial.embedding.is_some() == trial.record.succeeded(), || format!("trial {i}: record and embedding disagree"))?;
        if let Some(e) = &trial.embedding {
            successes += 1;
            let map: Vec<Option<Vertex>> = (0..n).map(|v| e.get(v)).collect();
            let edges: Vec<_> = t.edges().collect();
            ensure(common::is_copy(&common::matrix(&trial.host), n, &edges, &map), || {
                format!("trial {i} ({fam:?}, n={n}, p={p}) reported success with an invalid embedding")
            })?;
        }
    }
    Ok(format!("{successes}/{trials} successes, all re-verified"))
}

fn witness_of(r: &ExpansionReport) -> Option<Witness> {
    r.shrink
        .clone()
        .map(Witness::Shrink)
        .or_else(|| r.gap.clone().map(|g| Witness::Gap(GapWitness { x: g.x, y: g.y })))
}

fn witness_size(r: &ExpansionReport) -> usize {
    r.shrink.as_ref().map(|w| w.x.len()).or_else(|| r.gap.as_ref().map(|g| g.x.len())).unwrap_or(0)
}

fn expansion_agreement() -> Verdict {
    let start = Instant::now();
    let mut rng = RngSeed::new(7).rng();
    let (mut failing, mut small) = (0, 0);
    for i in 0..1000u64 {
        let n = rng.random_range(2..=14);
        let p = rng.random_range(0.0..=1.0);
        let d = rng.random_range(0.5..3.0);
        let g = gen_gnp(n, p, RngSeed::new(i)).map_err(|e| e.to_string())?;
        let w_mask: u32 = if i % 2 == 0 { (1 << n) - 1 } else { rng.random_range(1..1u32 << n) };
        let w = VertexSet::from_iter(n, (0..n).filter(|&v| w_mask >> v & 1 == 1));
        let ex = check_expands_into(&g, &w, d, &CheckConfig::exhaustive()).map_err(|e| e.to_string())?;
        let sa = check_expands_into(&g, &w, d, &CheckConfig::sampled(200, RngSeed::new(i ^ 99))).map_err(|e| e.to_string())?;
        let truth = common::expands_into(&common::matrix(&g), w_mask, d);
        ensure(ex.holds == truth, || format!("instance {i}: exhaustive says {} but brute force says {truth}", ex.holds))?;
        ensure(sa.holds || !ex.holds, || format!("instance {i}: sampled found a violation the exhaustive check missed"))?;
        if !ex.holds {
            failing += 1;
            if witness_size(&ex) <= 3 {
                small += 1;
                ensure(!sa.holds, || format!("instance {i}: sampled missed a violation of size ≤ 3"))?;
            }
        }
        for r in [&ex, &sa] {
            if let Some(wit) = witness_of(r) {
                ensure(witness_is_genuine(&g, &w, d, &wit), || format!("instance {i}: witness does not re-verify"))?;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.1}s"))?;
    Ok(format!("1000 graphs, {failing} non-expanding ({small} with small witnesses), 0 disagreements, {secs:.1}s"))
}

/// Mixed tree corpus: bounded-degree families plus unbounded random recursive trees.
fn tree_corpus() -> Vec<(TreeShape, usize)> {
    let mut rng = RngSeed::new(8).rng();
    (0..1000u64)
        .map(|i| {
            let n = rng.random_range(2..=500);
            let k = [3, 5, 10][i as usize % 3];
            let t = match i % 6 {
                5 => {
                    let parent = (0..n).map(|v| (v > 0).then(|| rng.random_range(0..v))).collect();
                    relabel_randomly(&TreeShape::from_parents(parent).unwrap(), RngSeed::new(i))
                }
                f => gen_random_tree(n, rng.random_range(3..7), TreeFamily::ALL[f as usize], RngSeed::new(i)).unwrap(),
            };
            (t, k)
        })
        .collect()
}

fn degrees(t: &TreeShape) -> Vec<usize> {
    let mut d = vec![0; t.n()];
    for (a, b) in t.edges() {
        d[a] += 1;
        d[b] += 1;
    }
    d
}

/// Disjoint, adjacent in `t`, interior of degree 2, `k` edges each.
fn packing_ok(t: &TreeShape, k: usize, paths: &[Vec<Vertex>]) -> bool {
    let edges: BTreeSet<(Vertex, Vertex)> = t.edges().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
    let deg = degrees(t);
    let mut used = BTreeSet::new();
    paths.iter().all(|p| {
        p.len() == k + 1
            && p.iter().all(|&v| used.insert(v))
            && p.windows(2).all(|w| edges.contains(&(w[0], w[1])))
            && p[1..k].iter().all(|&v| deg[v] == 2)
    })
}

fn bare_path_bound() -> Verdict {
    let corpus = tree_corpus();
    for (i, (t, k)) in corpus.iter().enumerate() {
        let found: Vec<Vec<Vertex>> = bare_paths(t, *k).into_iter().map(|p| p.vertices).collect();
        ensure(packing_ok(t, *k, &found), || format!("tree {i}: invalid packing"))?;
        let l = degrees(t).iter().filter(|&&d| d == 1).count() as f64;
        let bound = t.n() as f64 / (*k + 1) as f64 - (2.0 * l - 2.0);
        ensure(found.len() as f64 >= bound, || format!("tree {i} (n={}, k={k}): {} < {bound}", t.n(), found.len()))?;
    }
    Ok(format!("{} trees, k in {{3,5,10}}, 0 violations", corpus.len()))
}

fn dichotomy() -> Verdict {
    let corpus = tree_corpus();
    let mut leafy = 0;
    for (i, (t, k)) in corpus.iter().enumerate() {
        let threshold = t.n() as f64 / (4 * k) as f64;
        let deg = degrees(t);
        match classify(t, *k) {
            Ok(Branch::Leafy(ls)) => {
                leafy += 1;
                ensure(ls.len() as f64 >= threshold && ls.iter().all(|v| deg[v] == 1), || format!("tree {i}: bad leaf set"))?;
            }
            Ok(Branch::Pathy(ps)) => {
                let raw: Vec<Vec<Vertex>> = ps.into_iter().map(|p| p.vertices).collect();
                ensure(raw.len() as f64 >= threshold && packing_ok(t, *k, &raw), || format!("tree {i}: bad path set"))?;
            }
            Err(e) => return Err(format!("tree {i}: {e}")),
        }
    }
    Ok(format!("{} trees: {leafy} leafy, {} pathy", corpus.len(), corpus.len() - leafy))
}

fn hall_saturates(t: &FlexTemplate, z: &[usize]) -> bool {
    let m = t.m();
    let adj: Vec<Vec<usize>> = (0..t.n_x())
        .map(|x| t.neighbors(x).iter().copied().filter(|&r| r < m || z.contains(&(r - m))).collect())
        .collect();
    common::hall_holds(&adj, &vec![1; t.n_x()])
}

fn independent_max_degree(t: &FlexTemplate) -> usize {
    let mut right = vec![0usize; 2 * t.m()];
    let mut left = 0;
    for x in 0..t.n_x() {
        left = left.max(t.neighbors(x).len());
        t.neighbors(x).iter().for_each(|&r| right[r] += 1);
    }
    left.max(right.into_iter().max().unwrap_or(0))
}

fn flex_template() -> Verdict {
    let mut checked = 0;
    for n_x in [3, 6, 9] {
        for s in 0..5 {
            let t = build_flex_template(n_x, 20, Resilience::Exhaustive, 50, RngSeed::new(s)).map_err(|e| e.to_string())?;
            ensure(independent_max_degree(&t) <= 40, || format!("n_x={n_x}: degree above 40"))?;
            let m = t.m();
            for mask in 0u32..1 << m {
                if mask.count_ones() as usize != n_x / 3 {
                    continue;
                }
                let z: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                ensure(hall_saturates(&t, &z), || format!("n_x={n_x}: Z′={z:?} not matchable"))?;
                checked += 1;
            }
        }
    }
    for n_x in [30, 300] {
        for s in 0..3 {
            let t = build_flex_template(n_x, 20, Resilience::Sampled(200), 50, RngSeed::new(s)).map_err(|e| e.to_string())?;
            ensure(independent_max_degree(&t) <= 40, || format!("n_x={n_x}: degree above 40"))?;
            let m = t.m();
            let mut rng = RngSeed::new(1000 + s).rng();
            for _ in 0..200 {
                let mut all: Vec<usize> = (0..m).collect();
                rand::seq::SliceRandom::shuffle(all.as_mut_slice(), &mut rng);
                let z = &all[..n_x / 3];
                let mt = resilient_match(&t, z).map_err(|e| format!("n_x={n_x}: {e}"))?;
                let mut used = BTreeSet::new();
                let ok = mt.len() == n_x
                    && mt.iter().enumerate().all(|(x, &r)| {
                        t.neighbors(x).contains(&r) && (r < m || z.contains(&(r - m))) && used.insert(r)
                    });
                ensure(ok, || format!("n_x={n_x}: returned matching is invalid"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} choices of Z′ matched, Δ ≤ 40 throughout"))
}

fn absorber_definition_holds(adj: &[Vec<bool>], ab: &treeweave::absorb::Absorber) -> bool {
    let (skip, with) = (&ab.skip_path.vertices, &ab.absorb_path.vertices);
    let sorted = |vs: &[Vertex]| {
        let mut s = vs.to_vec();
        s.sort_unstable();
        s
    };
    common::is_simple_walk(adj, skip)
        && common::is_simple_walk(adj, with)
        && (skip[0], *skip.last().unwrap()) == (ab.r, ab.s)
        && (with[0], *with.last().unwrap()) == (ab.r, ab.s)
        && sorted(skip) == ab.set
        && sorted(&with.iter().copied().filter(|&u| u != ab.v).collect::<Vec<_>>()) == ab.set
        && with.len() == skip.len() + 1
}

fn absorber_traces() -> Verdict {
    let mut built = 0;
    let g = gen_gnp(400, 0.2, RngSeed::new(2)).map_err(|e| e.to_string())?;
    let adj = common::matrix(&g);
    let pool = VertexSet::from_iter(400, 10..400);
    for shape in [AbsorberShape::plain(0), AbsorberShape::plain(1), AbsorberShape::plain(2)] {
        let list = build_absorbers(&g, &[(0, 3), (1, 3), (2, 3)], &pool, &shape, &PathConfig::default(), RngSeed::new(5))
            .map_err(|e| e.to_string())?;
        for ab in list.iter().flatten() {
            ensure(absorber_definition_holds(&adj, ab), || format!("absorber for {} fails its witnesses", ab.v))?;
            built += 1;
        }
    }
    let d = gen_gnp_directed(300, 0.3, RngSeed::new(4)).map_err(|e| e.to_string())?;
    let arcs = common::arc_matrix(&d);
    let shape = AbsorberShape { k: 2, reversible: Some((2, 2)) };
    let list = build_absorbers(&d, &[(0, 2), (1, 2)], &VertexSet::from_iter(300, 5..300), &shape, &PathConfig::default(), RngSeed::new(1))
        .map_err(|e| e.to_string())?;
    for ab in list.iter().flatten() {
        ensure(absorber_definition_holds(&arcs, ab), || format!("directed absorber for {} fails", ab.v))?;
        built += 1;
    }

    let mut halves_checked = 0;
    for (seed, n, r, l) in [(21u64, 700usize, 3usize, 30usize), (22, 900, 3, 36)] {
        let g = gen_gnp(n, 0.2, RngSeed::new(seed)).map_err(|e| e.to_string())?;
        let adj = common::matrix(&g);
        let a: Vec<Vertex> = (0..2 * r).collect();
        let xs: Vec<Vertex> = (10..10 + 3 * r).collect();
        let ys: Vec<Vertex> = (30..30 + 3 * r).collect();
        let w = VertexSet::from_iter(n, 50..n);
        let s = build_absorbing_structure(&g, &a, &w, &xs, &ys, l, &StructureConfig::default(), RngSeed::new(3))
            .map_err(|e| e.to_string())?;
        ensure(s.footprint.len() == 3 * r * (l - 2) - r, || format!("footprint {} ≠ 3r(l−2)−r", s.footprint.len()))?;
        let pairs: Vec<(Vertex, Vertex)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        for mask in 0u32..1 << (2 * r) {
            if mask.count_ones() as usize != r {
                continue;
            }
            let chosen: Vec<Vertex> = (0..2 * r).filter(|&i| mask >> i & 1 == 1).map(|i| a[i]).collect();
            let ps = vertices_of(&s.absorb(&chosen).map_err(|e| e.to_string())?);
            let mut keep: Vec<Vertex> = s.footprint.iter().chain(chosen.iter().copied()).chain(xs.iter().copied()).chain(ys.iter().copied()).collect();
            keep.sort_unstable();
            let sub: Vec<Vec<bool>> = keep.iter().map(|&u| keep.iter().map(|&v| adj[u][v]).collect()).collect();
            let idx = |v: Vertex| keep.binary_search(&v).ok();
            let local_pairs: Vec<(Vertex, Vertex)> = pairs.iter().map(|&(x, y)| (idx(x).unwrap(), idx(y).unwrap())).collect();
            let local: Option<Vec<Vec<Vertex>>> = ps.iter().map(|p| p.iter().map(|&v| idx(v)).collect()).collect();
            let ok = local.is_some_and(|lp| common::is_exact_cover(&sub, &local_pairs, l, &lp));
            ensure(ok, || format!("absorbing {chosen:?} does not partition W′ ∪ A′"))?;
            halves_checked += 1;
        }
    }
    Ok(format!("{built} absorbers validated; 2 structures, {halves_checked} choices of A′ each partitioning W′ ∪ A′"))
}

fn exact_cover() -> Verdict {
    let c6 = Graph::cycle(6);
    let forced = cover_with_paths(&c6, &[(0, 2), (3, 5)], 3, &CoverConfig::default(), RngSeed::new(0)).map_err(|e| e.to_string())?;
    ensure(vertices_of(&forced) == vec![vec![0, 1, 2], vec![3, 4, 5]], || format!("C6 cover {forced:?}"))?;
    let (n, p, l) = (1200, 0.15, 30);
    let pairs: Vec<(Vertex, Vertex)> = (0..n / l).map(|i| (2 * i, 2 * i + 1)).collect();
    let mut ok = 0;
    let mut slowest: f64 = 0.0;
    for s in 0..10u64 {
        let g = gen_gnp(n, p, RngSeed::new(s)).map_err(|e| e.to_string())?;
        let t0 = Instant::now();
        let out = cover_with_paths(&g, &pairs, l, &CoverConfig::default(), RngSeed::new(s));
        let secs = t0.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        ensure(secs < 60.0, || format!("seed {s} took {secs:.1}s"))?;
        if let Ok(ps) = out {
            ensure(common::is_exact_cover(&common::matrix(&g), &pairs, l, &vertices_of(&ps)), || format!("seed {s}: not a partition"))?;
            ok += 1;
        }
    }
    ensure(ok >= 8, || format!("success {ok}/10 < 0.8"))?;
    Ok(format!("C6 forced cover reproduced; G(1200, 0.15), l=30: {ok}/10, slowest {slowest:.2}s"))
}

fn stage_invariants() -> Verdict {
    let (mut stages, mut later, mut runs) = (0, 0, 0);
    let default = PathConfig::default();
    // Small pools and search budgets push requests past the greedy first stage.
    let tight = |u_fraction, search_budget| PathConfig { u_fraction, search_budget, stages: 3, ..PathConfig::default() };
    let corpus = [
        (300usize, 0.1, 10usize, 5usize, default.clone(), true),
        (500, 0.08, 20, 6, default.clone(), true),
        (800, 0.05, 30, 8, default.clone(), true),
        (400, 0.2, 40, 4, default, true),
        (500, 0.05, 20, 8, tight(0.3, 100), false),
        (1000, 0.02, 40, 10, tight(0.5, 50), false),
        (1000, 0.03, 40, 10, tight(0.4, 60), false),
    ];
    for (n, p, count, k, cfg, must_route) in corpus {
        let g = gen_gnp(n, p, RngSeed::new(n as u64)).map_err(|e| e.to_string())?;
        let reqs: Vec<PathRequest> = (0..count).map(|i| PathRequest::new(2 * i, 2 * i + 1, k)).collect();
        let w = VertexSet::from_iter(n, 2 * count..n);
        let m = w.len() as f64 / (2 * cfg.d0) as f64;
        for s in 0..5 {
            let r = match connect_pairs_exact(&g, &reqs, &w, &cfg, RngSeed::new(s)) {
                Ok(r) => r,
                Err(e) if must_route => return Err(format!("n={n}: {e}")),
                Err(_) => continue,
            };
            runs += 1;
            for st in &r.trace {
                stages += 1;
                later += usize::from(st.alpha > 0);
                let bound = 2.0 * m / ((cfg.d0 + 1) as f64).powi(st.alpha as i32);
                ensure(st.surviving.len() as f64 <= bound + 1e-9, || format!("stage {}: {} > {bound}", st.alpha, st.surviving.len()))?;
                let want = (cfg.d0 + 1).pow(st.alpha as u32);
                let mut seen = VertexSet::new(n);
                for (s_set, t_set) in &st.ends {
                    ensure(s_set.len() == want && t_set.len() == want, || format!("stage {}: end-set size", st.alpha))?;
                    for &(v, _, _) in s_set.members.iter().chain(&t_set.members) {
                        ensure(seen.insert(v), || format!("stage {}: end-sets overlap at {v}", st.alpha))?;
                    }
                }
                for (_, p) in &st.done {
                    for &v in &p.vertices {
                        ensure(seen.insert(v), || format!("stage {}: finished path overlaps at {v}", st.alpha))?;
                    }
                }
                for (i, a) in st.reserves.iter().enumerate() {
                    ensure(a.is_disjoint(&st.pool), || format!("stage {}: reserve {i} meets the pool", st.alpha))?;
                    for b in &st.reserves[i + 1..] {
                        ensure(a.is_disjoint(b), || format!("stage {}: reserves overlap", st.alpha))?;
                    }
                }
                let v = st.violations(&g, &reqs);
                ensure(v.is_empty(), || format!("stage {}: {v:?}", st.alpha))?;
            }
        }
    }
    ensure(later >= 5, || format!("only {later} snapshots beyond the first stage"))?;
    Ok(format!("{runs} runs, {stages} stage snapshots ({later} past the first stage), 0 violations"))
}

fn small_oracle() -> Verdict {
    let mut rng = RngSeed::new(12).rng();
    let (mut routable, mut tried, mut i) = (0, 0, 0u64);
    while routable < 500 {
        i += 1;
        let n = rng.random_range(4..=12);
        let p = rng.random_range(0.2..0.9);
        let g = gen_gnp(n, p, RngSeed::new(i)).map_err(|e| e.to_string())?;
        let mut ends = 0u32;
        let mut reqs = Vec::new();
        for _ in 0..rng.random_range(1..=3) {
            let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
            if x == y || ends >> x & 1 == 1 || ends >> y & 1 == 1 {
                continue;
            }
            ends |= 1 << x | 1 << y;
            reqs.push(PathRequest::new(x, y, rng.random_range(1..=5)));
        }
        if reqs.is_empty() {
            continue;
        }
        let w_mask = rng.random_range(0..1u32 << n) & !ends;
        let w = VertexSet::from_iter(n, (0..n).filter(|&v| w_mask >> v & 1 == 1));
        tried += 1;
        let tuples: Vec<(Vertex, Vertex, usize)> = reqs.iter().map(|r| (r.x, r.y, r.k)).collect();
        let truth = common::routable(&common::matrix(&g), &tuples, w_mask);
        let got = connect_pairs_exact(&g, &reqs, &w, &PathConfig::default(), RngSeed::new(i));
        if truth {
            routable += 1;
            ensure(got.is_ok(), || format!("instance {i}: routable but the router failed"))?;
        } else {
            ensure(got.is_err(), || format!("instance {i}: router claims an impossible routing"))?;
        }
    }
    Ok(format!("{routable} routable instances (of {tried} drawn), all routed"))
}

fn pipeline_rate() -> Verdict {
    let n = 256;
    let params = ScaleParams::desk(n, 3);
    let ok = (0..30u64)
        .filter(|&s| {
            let t = gen_random_tree(n, 3, TreeFamily::UniformAttachment, RngSeed::new(s)).unwrap();
            embed_spanning_tree(n, 0.35, &t, &params, RngSeed::new(500 + s)).record.succeeded()
        })
        .count();
    ensure(ok >= 24, || format!("{ok}/30 < 0.8"))?;
    let cfg = ScanConfig {
        family: TreeFamily::UniformAttachment,
        delta: 3,
        ns: vec![n],
        ps: vec![0.1, 0.2, 0.35, 0.5],
        trials: 30,
        seed: 3,
        ..ScanConfig::default()
    };
    let rates: Vec<f64> = cfg
        .ps
        .iter()
        .map(|&p| (0..cfg.trials).filter(|&i| scan_trial(&cfg, n, p, i).succeeded()).count() as f64 / cfg.trials as f64)
        .collect();
    for w in rates.windows(2) {
        ensure(w[1] >= w[0] - 0.1, || format!("rates {rates:?} drop by more than 0.1"))?;
    }
    Ok(format!("n=256, p=0.35: {ok}/30; paired rates over p={:?}: {rates:?}", cfg.ps))
}

fn directed_suite() -> Verdict {
    let d = gen_gnp_directed(300, 0.3, RngSeed::new(9)).map_err(|e| e.to_string())?;
    let arcs = common::arc_matrix(&d);
    let pool = VertexSet::from_iter(300, 2..300);
    let mut gadgets = 0;
    for (m, h, s) in [(1, 1, 0u64), (1, 3, 1), (2, 2, 2), (3, 4, 3), (4, 2, 4)] {
        let rp = build_reversible_path(&d, 0, 1, &pool, m, h, 100_000, RngSeed::new(s)).map_err(|e| e.to_string())?;
        let (f, b) = (&rp.forward.vertices, &rp.backward.vertices);
        let as_set = |vs: &[Vertex]| vs.iter().copied().collect::<BTreeSet<_>>();
        let ok = common::is_simple_walk(&arcs, f)
            && common::is_simple_walk(&arcs, b)
            && (f[0], *f.last().unwrap()) == (0, 1)
            && (b[0], *b.last().unwrap()) == (1, 0)
            && as_set(f) == as_set(b);
        ensure(ok, || format!("reversible path m={m} h={h} fails a traversal"))?;
        gadgets += 1;
    }
    let (n, l) = (900, 30);
    let pairs: Vec<(Vertex, Vertex)> = (0..n / l).map(|i| (2 * i, 2 * i + 1)).collect();
    let mut ok = 0;
    for s in 0..10u64 {
        let d: DiGraph = gen_gnp_directed(n, 0.3, RngSeed::new(s)).map_err(|e| e.to_string())?;
        if let Ok(ps) = cover_with_paths_directed(&d, &pairs, l, &CoverConfig::default(), RngSeed::new(s)) {
            ensure(common::is_exact_cover(&common::arc_matrix(&d), &pairs, l, &vertices_of(&ps)), || {
                format!("seed {s}: a path breaks orientation or the partition")
            })?;
            ok += 1;
        }
    }
    ensure(ok >= 8, || format!("directed cover {ok}/10 < 0.8"))?;
    Ok(format!("{gadgets} reversible gadgets traversed both ways; directed cover n=900: {ok}/10, all correctly oriented"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("embedding validity", embedding_validity),
        ("expansion oracle equivalence", expansion_agreement),
        ("bare path bound", bare_path_bound),
        ("leaves or bare paths dichotomy", dichotomy),
        ("flex template resilience", flex_template),
        ("absorber traces", absorber_traces),
        ("exact-length cover", exact_cover),
        ("stage invariants", stage_invariants),
        ("small-instance routing oracle", small_oracle),
        ("pipeline success rate", pipeline_rate),
        ("directed suite", directed_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t0 = Instant::now();
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
