//! Certifies that `G(n, p)` expands, then splits a target set into parts that
//! keep expanding into it.

use treeweave::expansion::{check_expander, split_target, CheckConfig};
use treeweave::graph::gen_gnp;
use treeweave::{RngSeed, VertexSet};

fn main() {
    let g = gen_gnp(300, 0.3, RngSeed::new(1)).expect("valid p");
    let report = check_expander(&g, 10.0, &CheckConfig::sampled(2_000, RngSeed::new(2))).expect("check runs");
    println!("{}", report.to_record());

    let w = VertexSet::full(g.n());
    let cfg = CheckConfig::sampled(500, RngSeed::new(3));
    match split_target(&g, &w, &[150, 150], 10.0, 0.0, &cfg, 5) {
        Ok(parts) => println!("split into parts of sizes {:?}", parts.iter().map(VertexSet::len).collect::<Vec<_>>()),
        Err(e) => println!("split failed: {e}"),
    }

    // A cycle is a 1-expander but not a 2-expander; the witness says why.
    let c = treeweave::Graph::cycle(8);
    let r = check_expander(&c, 2.0, &CheckConfig::exhaustive()).expect("check runs");
    println!("C8 at d=2: {}", r.to_record());
}
