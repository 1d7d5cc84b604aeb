//! Vertex-disjoint path sparsifiers.
//!
//! An `(α, β)`-path sparsifier of `G` is an edge subset `F` such that the
//! endpoints of every edge of `G` are joined in `G[F]` by `α` vertex-disjoint
//! paths of at most `β` hops. The construction regularizes degrees, samples
//! uniformly, keeps the edges of well-connected pieces of the sample and
//! repeats on whatever was cut.

pub mod expander;
pub mod flow;
pub mod partial;
pub mod regular;
pub mod sampling;
pub mod verify;

pub use expander::{
    expander_decompose, self_looped_subgraph, ExpanderDecomposition, ExpanderPiece,
};
pub use flow::vertex_disjoint_count;
pub use partial::{
    partial_path_sparsify, path_sparsify, CoveredEdge, PartialPathSparsifier, PathSparsifier,
};
pub use regular::{
    bipartite_split, decompose_bipartite, degree_lowerbound, regular_decomposition, RegularPiece,
};
pub use sampling::{uniform_sample_graph, UniformSample};
pub use verify::{verify_claims, verify_path_sparsifier, PathClaim, VerifyOptions, VerifyReport};
