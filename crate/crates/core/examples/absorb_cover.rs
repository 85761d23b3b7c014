//! Builds an absorbing structure, absorbs two different halves of its flexible
//! set, and then covers a whole random graph by paths of one length.

use treeweave::absorb::{build_absorbing_structure, cover_with_paths, CoverConfig, StructureConfig};
use treeweave::graph::gen_gnp;
use treeweave::{RngSeed, Vertex, VertexSet};

fn main() {
    let n = 700;
    let g = gen_gnp(n, 0.2, RngSeed::new(21)).expect("valid p");
    let (r, l) = (3, 30);
    let a: Vec<Vertex> = (0..2 * r).collect();
    let xs: Vec<Vertex> = (10..10 + 3 * r).collect();
    let ys: Vec<Vertex> = (30..30 + 3 * r).collect();
    let w = VertexSet::from_iter(n, 50..n);
    let s = build_absorbing_structure(&g, &a, &w, &xs, &ys, l, &StructureConfig::default(), RngSeed::new(3))
        .expect("dense enough");
    println!("footprint {} vertices", s.footprint.len());
    for half in [&a[..r], &a[r..]] {
        let paths = s.absorb(half).expect("any half is absorbable");
        println!("absorbed {half:?} using {} paths of {l} vertices", paths.len());
    }

    let (n, l) = (1200, 30);
    let g = gen_gnp(n, 0.15, RngSeed::new(0)).expect("valid p");
    let pairs: Vec<(Vertex, Vertex)> = (0..n / l).map(|i| (2 * i, 2 * i + 1)).collect();
    match cover_with_paths(&g, &pairs, l, &CoverConfig::default(), RngSeed::new(0)) {
        Ok(ps) => println!("covered all {n} vertices with {} paths", ps.len()),
        Err(e) => println!("cover failed in {}: {}", e.phase, e.detail),
    }
}
