//! Incremental PageRank on dynamic directed graphs.
//!
//! The crate provides a dynamic graph structure with batched edge updates
//! ([`graph::DynGraph`], [`graph::BatchUpdate`]), five rank-computation
//! strategies sharing one pull-based kernel ([`rank`]), experiment batch
//! construction from temporal streams or random sampling ([`dynamics`]),
//! reference ranks and error norms ([`metrics`]), dataset loaders and CSV
//! output ([`io`]), and the experiment pipelines behind the `dfrank` CLI
//! ([`harness`]).
//!
//! With the default `parallel` feature the rank kernel runs data-parallel
//! over affected vertices (rayon, dynamic chunks); with the feature disabled
//! or `threads = 1` it runs a deterministic sequential loop.

pub mod dynamics;
pub mod graph;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod rank;

pub use graph::{BatchUpdate, DynGraph, Edge, GraphError, VertexId};
pub use rank::{AffectedFlags, Engine, PrOptions, PrResult, Strategy};
