//! Embeds a forest obtained by removing bare paths, then hangs leaves back on
//! as stars around their images.

use treeweave::embed::{attach_stars, embed_forest, EmbedConfig, StarDemand};
use treeweave::graph::gen_gnp;
use treeweave::tree::{bare_paths, gen_random_tree, strip, Removal, TreeFamily};
use treeweave::{RngSeed, VertexSet};

fn main() {
    let t = gen_random_tree(150, 3, TreeFamily::Broom, RngSeed::new(4)).expect("valid family");
    let s = strip(&t, &Removal::Paths(bare_paths(&t, 4))).expect("disjoint paths");
    let g = gen_gnp(400, 0.1, RngSeed::new(5)).expect("valid p");
    let allowed = VertexSet::from_iter(g.n(), 0..300);
    let e = embed_forest(&g, &s.forest, &allowed, &EmbedConfig::default(), RngSeed::new(6)).expect("sparse forest fits");
    println!("forest of {} vertices embedded into {} host vertices", s.forest.vertex_count(), e.used().len());

    let centers: Vec<_> = (0..10).map(|v| e.get(s.forest.vertices().iter().nth(v).unwrap()).unwrap()).collect();
    let demand = StarDemand { centers, demand: vec![3; 10], pool: VertexSet::from_iter(g.n(), 300..400) };
    match attach_stars(&g, &demand, RngSeed::new(8)) {
        Ok(leaves) => println!("attached {} leaves to 10 centres", leaves.iter().map(Vec::len).sum::<usize>()),
        Err(e) => println!("stars failed: {e}"),
    }
}
