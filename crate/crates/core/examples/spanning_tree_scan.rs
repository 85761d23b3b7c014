//! One spanning-tree trial, then a small success-rate scan written as CSV.

use treeweave::pipeline::{embed_spanning_tree, threshold_scan, ScaleParams, ScanConfig};
use treeweave::tree::{gen_random_tree, TreeFamily};
use treeweave::RngSeed;

fn main() {
    let n = 256;
    let t = gen_random_tree(n, 3, TreeFamily::UniformAttachment, RngSeed::new(1)).expect("valid family");
    let trial = embed_spanning_tree(n, 0.35, &t, &ScaleParams::desk(n, 3), RngSeed::new(2));
    println!("{}", trial.record);

    let cfg = ScanConfig {
        family: TreeFamily::Caterpillar,
        delta: 3,
        ns: vec![128],
        ps: vec![0.1, 0.2, 0.4],
        trials: 10,
        seed: 5,
        ..ScanConfig::default()
    };
    threshold_scan(&cfg, std::io::stdout().lock()).expect("stdout is writable");
}
