//! Efficiency and centrality measures on the directed weighted graph.
//!
//! * efficiency(u, v) = 1 / dist(u, v) for finite nonzero distances, else 0
//! * global efficiency = mean efficiency over ordered pairs u != v
//! * closeness(u) = reachable(u) / sum of distances to reachable nodes
//! * betweenness(v) = sum over s != v != t of sigma_st(v) / sigma_st,
//!   normalized by (n - 1)(n - 2)
//! * in/out degree = raw edge counts

use serde::{Deserialize, Serialize};

use crate::graph::PlantGraph;
use crate::paths::DistanceMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMeasures {
    pub id: String,
    pub in_degree: usize,
    pub out_degree: usize,
    /// Nodes other than this one reachable by a directed path.
    pub reach: usize,
    pub closeness: f64,
    pub betweenness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub global_efficiency: f64,
    pub nodes: Vec<NodeMeasures>,
    /// Row-major pairwise efficiency, rows and columns in `nodes` order.
    pub efficiency: Vec<Vec<f64>>,
}

impl MeasureSet {
    pub fn node(&self, id: &str) -> Option<&NodeMeasures> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

pub fn efficiency(distance: f64) -> f64 {
    if distance.is_finite() && distance > 0.0 {
        1.0 / distance
    } else {
        0.0
    }
}

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub fn measures(g: &PlantGraph, m: &DistanceMatrix) -> MeasureSet {
    let n = g.node_count();
    assert_eq!(m.len(), n, "distance matrix computed on a different graph");

    let efficiency: Vec<Vec<f64>> = (0..n)
        .map(|u| m.row(u).iter().map(|&d| efficiency(d)).collect())
        .collect();
    let global_efficiency = if n > 1 {
        let sum: f64 = efficiency.iter().flatten().sum();
        sum / (n * (n - 1)) as f64
    } else {
        0.0
    };

    let betweenness = betweenness(g, m);
    let nodes = (0..n)
        .map(|u| {
            let (reach, total) = m
                .row(u)
                .iter()
                .enumerate()
                .filter(|&(v, d)| v != u && d.is_finite())
                .fold((0usize, 0.0), |(c, s), (_, d)| (c + 1, s + d));
            NodeMeasures {
                id: g.node(u).id.clone(),
                in_degree: g.in_edges(u).len(),
                out_degree: g.out_edges(u).len(),
                reach,
                closeness: if reach > 0 { reach as f64 / total } else { 0.0 },
                betweenness: betweenness[u],
            }
        })
        .collect();

    MeasureSet {
        global_efficiency,
        nodes,
        efficiency,
    }
}

/// Brandes accumulation driven by the precomputed distances: for each
/// source, nodes are processed by increasing distance and an edge (u, v)
/// lies on a shortest path iff dist(s, u) + w = dist(s, v).
fn betweenness(g: &PlantGraph, m: &DistanceMatrix) -> Vec<f64> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    for s in 0..n {
        let row = m.row(s);
        let mut order: Vec<usize> = (0..n).filter(|&v| row[v].is_finite()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));

        sigma.iter_mut().for_each(|x| *x = 0.0);
        delta.iter_mut().for_each(|x| *x = 0.0);
        sigma[s] = 1.0;
        for &v in order.iter().skip(1) {
            sigma[v] = g
                .in_edges(v)
                .iter()
                .map(|&e| g.edge(e))
                .filter(|e| row[e.tail].is_finite() && same_length(row[e.tail] + e.weight, row[v]))
                .map(|e| sigma[e.tail])
                .sum();
        }
        for &w in order.iter().rev() {
            for &e in g.in_edges(w) {
                let edge = g.edge(e);
                let u = edge.tail;
                if row[u].is_finite() && same_length(row[u] + edge.weight, row[w]) && sigma[w] > 0.0 {
                    delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    if n > 2 {
        let norm = ((n - 1) * (n - 2)) as f64;
        bc.iter_mut().for_each(|x| *x /= norm);
    }
    bc
}
