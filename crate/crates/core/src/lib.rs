//! Hopsets for weighted undirected graphs.
//!
//! A `(β, ε)`-hopset `H` for `G` is an edge set such that for every pair
//! `u, v` the graph `G ∪ H` contains a path of at most `β` edges whose
//! length lies within `[d_G(u,v), (1+ε)·d_G(u,v)]`.
//!
//! The crate builds such sets in two ways. *Direct* mode unions one
//! single-scale hopset per distance band `(2^k, 2^{k+1}]`, each built on `G`.
//! *Reduced* mode first contracts light edges into a laminar family of
//! nodes, builds the per-band hopsets on the small contracted graphs and
//! adds star edges inside nodes, which trades the hopbound `β` for `6β+5`.
//!
//! All weights are exact: integer numerators over one denominator per
//! hopset. Verification and queries run hop-limited Bellman-Ford over
//! `G ∪ H` and compare against Dijkstra without tolerances.

pub mod asp;
pub mod dimacs;
pub mod error;
pub mod explore;
pub mod generate;
pub mod graph;
pub mod hopset;
pub mod hopset_io;
pub mod laminar;
pub mod schedule;
pub mod single_scale;
pub mod verify;
pub mod weight;

pub use asp::{asp_estimates, extract_path, AspResult};
pub use dimacs::{load_graph, write_graph};
pub use error::{Error, Result};
pub use explore::{dijkstra, hop_limited_bellman_ford, EdgeRef, WeightedGraph};
pub use generate::{generate_graph, GraphModel};
pub use graph::{Edge, Graph, VertexId};
pub use hopset::{
    build_hopset, build_hopset_with_report, build_scale_hopset, plan, plan_for_graph, BuildReport,
    EdgeKind, Hopset, HopsetEdge, HopsetParams, Mode, Plan,
};
pub use hopset_io::{read_hopset, write_hopset};
pub use laminar::{
    build_laminar, materialize_scale_graph, relevant_scales, LaminarFamily, ScaleGraph,
};
pub use schedule::{compute_schedule, DegreeMode, PhaseSchedule};
pub use verify::{exact_apsp, size_stats, verify_stretch, PairMode, VerificationReport};
pub use weight::{parse_ratio, Weight};
