use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use treeweave::tree::{
    bare_paths, canonical_form, classify, gen_random_tree, leaves, reconstruct, relabel_randomly, strip, Branch,
    Reattach, Removal, TreeFamily,
};
use treeweave::{RngSeed, TreeShape, Vertex};

/// Random labelled tree: vertex `v` attaches to an earlier vertex, then all
/// ids are shuffled.
fn any_tree(max_n: usize) -> impl Strategy<Value = TreeShape> {
    (2..max_n, any::<u64>()).prop_flat_map(|(n, seed)| {
        prop::collection::vec(any::<u32>(), n - 1).prop_map(move |raw| {
            let mut parent = vec![None; n];
            for v in 1..n {
                parent[v] = Some(raw[v - 1] as usize % v);
            }
            relabel_randomly(&TreeShape::from_parents(parent).unwrap(), RngSeed::new(seed))
        })
    })
}

fn degrees(t: &TreeShape) -> Vec<usize> {
    let mut d = vec![0; t.n()];
    for (a, b) in t.edges() {
        d[a] += 1;
        d[b] += 1;
    }
    d
}

/// Checks a packing against the edge list alone.
fn packing_is_valid(t: &TreeShape, k: usize, paths: &[Vec<Vertex>]) -> bool {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_trees_respect_degree(n in 1usize..300, delta in 3usize..8, fam in 0usize..5, seed in any::<u64>()) {
        let t = gen_random_tree(n, delta, TreeFamily::ALL[fam], RngSeed::new(seed)).unwrap();
        prop_assert_eq!(t.n(), n);
        prop_assert_eq!(t.edges().count(), n - 1);
        prop_assert!(degrees(&t).iter().all(|&d| d <= delta));
        prop_assert_eq!(t.bfs_order().len(), n);
    }

    #[test]
    fn bare_path_packing_meets_bound(t in any_tree(200), k in 1usize..12) {
        let paths: Vec<Vec<Vertex>> = bare_paths(&t, k).into_iter().map(|p| p.vertices).collect();
        prop_assert!(packing_is_valid(&t, k, &paths));
        let l = degrees(&t).iter().filter(|&&d| d == 1).count() as f64;
        let bound = t.n() as f64 / (k + 1) as f64 - (2.0 * l - 2.0);
        prop_assert!(paths.len() as f64 >= bound, "{} < {bound}", paths.len());
    }

    #[test]
    fn dichotomy_always_resolves(t in any_tree(300), k in 3usize..12) {
        let threshold = t.n() as f64 / (4 * k) as f64;
        match classify(&t, k).unwrap() {
            Branch::Leafy(ls) => {
                prop_assert!(ls.len() as f64 >= threshold);
                prop_assert!(ls.iter().all(|v| t.degree(v) == 1));
            }
            Branch::Pathy(ps) => {
                prop_assert!((leaves(&t).len() as f64) < threshold);
                prop_assert!(ps.len() as f64 >= threshold);
                let raw: Vec<Vec<Vertex>> = ps.into_iter().map(|p| p.vertices).collect();
                prop_assert!(packing_is_valid(&t, k, &raw));
            }
        }
    }

    #[test]
    fn strip_paths_round_trips(t in any_tree(200), k in 2usize..8) {
        let paths = bare_paths(&t, k);
        prop_assume!(!paths.is_empty());
        let s = strip(&t, &Removal::Paths(paths.clone())).unwrap();
        prop_assert_eq!(s.forest.components.len(), paths.len() + 1);
        prop_assert_eq!(s.forest.vertex_count() + s.removed.len(), t.n());
        prop_assert_eq!(s.removed.len(), paths.len() * (k - 1));
        for r in &s.requests {
            let is_path = matches!(r, Reattach::Path { k: kk, .. } if *kk == k);
            prop_assert!(is_path);
        }
        let back = reconstruct(&s).unwrap();
        let want: BTreeSet<_> = t.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let got: BTreeSet<_> = back.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn strip_leaves_round_trips(t in any_tree(200)) {
        prop_assume!(t.n() >= 3);
        let ls = leaves(&t);
        let s = strip(&t, &Removal::Leaves(ls.clone())).unwrap();
        prop_assert_eq!(s.forest.components.len(), 1);
        prop_assert_eq!(s.forest.vertex_count(), t.n() - ls.len());
        let mut demand: HashMap<Vertex, usize> = HashMap::new();
        for v in ls.iter() {
            *demand.entry(t.neighbors(v).next().unwrap()).or_default() += 1;
        }
        for r in &s.requests {
            match *r {
                Reattach::Leaves { center, count } => prop_assert_eq!(demand.remove(&center), Some(count)),
                Reattach::Path { .. } => prop_assert!(false),
            }
        }
        prop_assert!(demand.is_empty());
        prop_assert_eq!(canonical_form(&reconstruct(&s).unwrap()), canonical_form(&t));
    }

    #[test]
    fn canonical_form_ignores_labels(t in any_tree(120), seed in any::<u64>()) {
        prop_assert_eq!(canonical_form(&relabel_randomly(&t, RngSeed::new(seed))), canonical_form(&t));
        let mut buf = Vec::new();
        t.write_tree(&mut buf).unwrap();
        let back = TreeShape::read_tree(buf.as_slice()).unwrap();
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), t.edges().collect::<Vec<_>>());
    }
}

#[test]
fn canonical_form_separates_shapes() {
    let forms: BTreeSet<String> = [TreeShape::path(7), TreeShape::star(6), TreeShape::complete_binary(7)]
        .iter()
        .map(canonical_form)
        .collect();
    assert_eq!(forms.len(), 3);
}

#[test]
fn overlapping_paths_are_rejected() {
    let t = TreeShape::path(6);
    let p = bare_paths(&t, 3);
    assert!(!p.is_empty());
    assert!(strip(&t, &Removal::Paths(vec![p[0].clone(), p[0].clone()])).is_err());
}
