//! Workloads shared by the criterion benchmarks in `benches/`.

use plantgraph_core::generator::{classify_roles, generate_gnp, promote_switches};
use plantgraph_core::{FaultScenario, PlantGraph};

/// A classified G(n, 1/n) plant with `switch_fraction` of its hubs
/// promoted to switches.
pub fn plant(n: usize, switch_fraction: f64, seed: u64) -> PlantGraph {
    let base = classify_roles(&generate_gnp(n, 1.0 / n as f64, seed).expect("valid size"));
    promote_switches(&base, &[switch_fraction], seed)
        .expect("valid fraction")
        .remove(0)
}

/// Perturbation of the node with the most out-edges.
pub fn hub_fault(g: &PlantGraph) -> FaultScenario {
    let v = (0..g.node_count())
        .max_by_key(|&v| (g.out_edges(v).len(), std::cmp::Reverse(v)))
        .expect("nonempty graph");
    FaultScenario::new(g, &[g.node(v).id.as_str()])
}
