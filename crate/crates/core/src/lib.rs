#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose so NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod config;
pub mod decompose;
pub mod error;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod path_sparsify;
pub mod rng;
pub mod solvers;
pub mod spectral_subgraph;
pub mod ultrasparsify;

pub use error::{Error, Result};
pub use graph::{build_graph, Edge, WeightedMultiGraph};
