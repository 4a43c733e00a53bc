//! Exact triangle counting over an edge stream read twice, using a dynamic
//! chain of stage actors that change role as they learn about the graph.
//!
//! A stage first claims a responsible node from the first edge it sees, then
//! collects the neighbours of that node which no earlier stage has claimed,
//! and finally, on the second pass over the stream, counts the edges that
//! close a wedge centred on its responsible node. Summing the per-stage
//! counts gives the number of triangles.
//!
//! The crate also carries brute-force oracles, an in-memory simulation of
//! the MapReduce node-iterator baseline, and a parallelism-profile recorder.

pub mod baseline_mr;
pub mod cli;
pub mod engine;
pub mod graph_io;
pub mod metrics;
pub mod oracle;
pub mod stage;
pub mod verify;

pub use engine::{run_two_rounds, Capacity, PipelineResult, RunConfig, RunReport, Scheduler};
pub use graph_io::{Edge, EdgeSource, GeneratorSpec, Interner, Model, NodeId};
pub use stage::{AdjacencyMode, MultisetRule, StageState, StreamItem};
