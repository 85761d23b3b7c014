//! Reversible gadgets and an oriented path cover of a random digraph.

use treeweave::absorb::{build_reversible_path, cover_with_paths_directed, CoverConfig};
use treeweave::graph::gen_gnp_directed;
use treeweave::{RngSeed, Vertex, VertexSet};

fn main() {
    let d = gen_gnp_directed(300, 0.3, RngSeed::new(9)).expect("valid p");
    let pool = VertexSet::from_iter(300, 2..300);
    let rp = build_reversible_path(&d, 0, 1, &pool, 2, 2, 100_000, RngSeed::new(0)).expect("dense enough");
    println!("forward  {:?}", rp.forward.vertices);
    println!("backward {:?}", rp.backward.vertices);

    let (n, l) = (900, 30);
    let d = gen_gnp_directed(n, 0.3, RngSeed::new(1)).expect("valid p");
    let pairs: Vec<(Vertex, Vertex)> = (0..n / l).map(|i| (2 * i, 2 * i + 1)).collect();
    match cover_with_paths_directed(&d, &pairs, l, &CoverConfig::default(), RngSeed::new(1)) {
        Ok(ps) => println!("{} directed paths of {l} vertices cover the digraph", ps.len()),
        Err(e) => println!("cover failed in {}: {}", e.phase, e.detail),
    }
}
