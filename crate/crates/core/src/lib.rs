//! Constructive spanning-tree embedding in sparse random graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: host graphs, vertex sets, seeded `G(n, p)` generation.
//! - [`tree`]: guest trees, leaves, bare paths and stripping.
//! - [`matching`]: capacitated bipartite matching with Hall certificates.
//! - [`expansion`]: expander certification and expansion-preserving splits.
//! - [`embed`]: forest, rooted directed tree and star embeddings.
//! - [`paths`]: disjoint paths of exact prescribed lengths.
//! - [`absorb`]: absorbers, the flexible matching template and path covers.
//! - [`pipeline`]: the end-to-end spanning tree embedding and experiment harness.

pub mod absorb;
pub mod embed;
pub mod expansion;
pub mod graph;
pub mod matching;
pub mod paths;
pub mod pipeline;
pub mod tree;

pub use graph::{DiGraph, Graph, RngSeed, Vertex, VertexSet};
pub use tree::TreeShape;
