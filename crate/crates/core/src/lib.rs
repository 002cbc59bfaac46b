//! Vertex-label distance oracles (static and label-dynamic) and vertex-label
//! spanners for undirected weighted graphs, with an exact baseline used to
//! verify every stretch and size guarantee.

pub mod dynamic_oracle;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod io;
pub mod levels;
pub mod paths;
pub mod script;
pub mod spanner;
pub mod static_oracle;
pub mod verify;

pub use dynamic_oracle::{DynamicOracle, LabelHeap, UpdateStats};
pub use error::{Error, Result};
pub use exact::ExactLabelTable;
pub use generate::{generate, ExperimentConfig, GraphModel, LabelModel, WeightModel};
pub use graph::{Edge, EdgeId, Graph, LabelAssignment, LabelId, NodeId};
pub use io::{read_graph, write_graph};
pub use levels::{BunchSet, LevelSampling, Pivot};
pub use paths::{ball, dijkstra, extract_path, hop_bounded_distances, DistanceMap, Residual};
pub use script::ScriptOp;
pub use spanner::{
    build_unweighted_spanner, build_weighted_spanner, vl_cover, wvl_cover, CoverOutput,
    SpannerResult,
};
pub use static_oracle::{OracleSize, StaticOracle};
pub use verify::{verify_oracle, verify_spanner, OracleMode, VerifyOptions, VerifyReport};
