//! Shared inputs for the construction benchmarks.

use hopset_core::{generate_graph, Graph, GraphModel, HopsetParams, Mode};

/// Sparse random graph with about `avg_degree·n/2` edges and weights in
/// `[1, wmax]`.
pub fn sparse_graph(n: usize, avg_degree: f64, wmax: u64, seed: u64) -> Graph {
    let p = (avg_degree / n as f64).min(1.0);
    generate_graph(
        &GraphModel::Er {
            n,
            p,
            wmin: 1,
            wmax,
        },
        seed,
    )
    .expect("valid model")
}

pub fn params(mode: Mode, seed: u64) -> HopsetParams {
    HopsetParams {
        mode,
        seed,
        ..Default::default()
    }
}
