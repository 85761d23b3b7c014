//! Every bounded-degree tree has many leaves or many bare paths. Prints which
//! side each family lands on and strips the tree accordingly.

use treeweave::tree::{classify, gen_random_tree, strip, Branch, Removal, TreeFamily};
use treeweave::RngSeed;

fn main() {
    let (n, k) = (400, 6);
    for fam in TreeFamily::ALL {
        let t = gen_random_tree(n, 3, fam, RngSeed::new(7)).expect("valid family");
        let (label, removal) = match classify(&t, k).expect("n ≥ 2") {
            Branch::Leafy(ls) => (format!("{} leaves", ls.len()), Removal::Leaves(ls)),
            Branch::Pathy(ps) => (format!("{} bare paths of length {k}", ps.len()), Removal::Paths(ps)),
        };
        let s = strip(&t, &removal).expect("classified sets strip cleanly");
        println!(
            "{fam:?}: {label}; stripped forest has {} vertices in {} components",
            s.forest.vertex_count(),
            s.forest.components.len()
        );
    }
}
