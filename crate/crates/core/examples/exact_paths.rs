//! Joins vertex pairs by disjoint paths of prescribed lengths and reports how
//! many requests each stage still had open.

use treeweave::graph::gen_gnp;
use treeweave::paths::{connect_pairs_exact, PathConfig, PathRequest};
use treeweave::{RngSeed, VertexSet};

fn main() {
    let n = 600;
    let g = gen_gnp(n, 0.04, RngSeed::new(11)).expect("valid p");
    let reqs: Vec<PathRequest> = (0..30).map(|i| PathRequest::new(2 * i, 2 * i + 1, 6 + i % 5)).collect();
    let w = VertexSet::from_iter(n, 60..n);
    let r = connect_pairs_exact(&g, &reqs, &w, &PathConfig::default(), RngSeed::new(1)).expect("routable");
    let open: Vec<usize> = r.trace.iter().map(|s| s.surviving.len()).collect();
    println!("routed {} paths in {} attempt(s); open requests per stage {open:?}", r.paths.len(), r.attempts);
    for (p, q) in r.paths.iter().zip(&reqs).take(3) {
        println!("{} -> {} ({} edges): {:?}", q.x, q.y, q.k, p.vertices);
    }
}
