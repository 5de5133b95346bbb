//! Maximum flow by weighted push-relabel over directed expander hierarchies.

pub mod builder;
pub mod cut_matching;
pub mod dynforest;
pub mod formats;
pub mod generators;
pub mod graph;
pub mod hierarchy;
pub mod maxflow;
pub mod push_relabel;
pub mod shortest;
pub mod sparse_cut;

pub use builder::{build_hierarchy, default_phi, expander_decompose, BuildConfig, BuildError, BuildResult};
pub use cut_matching::{cut_or_embed, CmConfig, CutMatchingError, CutOrEmbedOutcome};
pub use dynforest::{DynForest, ForestError};
pub use formats::{parse_diffusion, parse_dimacs, parse_instance, FormatError, InstanceFile, Terminals};
pub use generators::{generate, GenParams, Model};
pub use graph::{
    build_graph, condensation_topo_order, decompose_paths, flow_stats, residual, scc, Capacities, DiGraph,
    EdgeId, Flow, FlowInstance, FlowStats, GraphError, PathDecomposition, ResidualView,
};
pub use hierarchy::{
    induced_weights, respecting_topo_order, validate_hierarchy, Hierarchy, HierarchyError, Ratio,
    ValidationReport,
};
pub use maxflow::{
    capacity_scaled_max_flow, dag_approx_flow, edmonds_karp, max_flow_exact, ExactConfig, ExactResult,
    MaxFlowError,
};
pub use push_relabel::{label_gap_certificate, push_relabel, Mode, PrConfig, PushRelabelError, PushRelabelResult};
pub use sparse_cut::{sparse_cut, SparseCutConfig, SparseCutError, SparseCutOutcome};
