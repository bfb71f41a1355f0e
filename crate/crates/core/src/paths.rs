//! All-pairs shortest paths.
//!
//! Two independent routes are provided: repeated Dijkstra (binary heap) for
//! sparse graphs and Floyd-Warshall for dense ones. [`all_pairs`] picks one
//! from the edge density unless an [`Algorithm`] is forced.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PlantGraph;

const NO_PRED: usize = usize::MAX;

/// Dense distance and predecessor matrices. `pred(u, v)` is the node
/// before `v` on a shortest `u -> v` path.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<f64>,
    pred: Vec<usize>,
}

impl DistanceMatrix {
    fn empty(n: usize) -> Self {
        let mut dist = vec![f64::INFINITY; n * n];
        for u in 0..n {
            dist[u * n + u] = 0.0;
        }
        DistanceMatrix {
            n,
            dist,
            pred: vec![NO_PRED; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Weighted distance; `+inf` when `v` is unreachable from `u`.
    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    pub fn pred(&self, u: usize, v: usize) -> Option<usize> {
        let p = self.pred[u * self.n + v];
        (p != NO_PRED).then_some(p)
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    /// Largest entrywise difference over finite entries; `inf` if the two
    /// matrices disagree on reachability.
    pub fn max_abs_diff(&self, other: &DistanceMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.dist
            .iter()
            .zip(&other.dist)
            .map(|(&a, &b)| match (a.is_finite(), b.is_finite()) {
                (true, true) => (a - b).abs(),
                (false, false) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Dijkstra when `|E| < |N|^1.5`, Floyd-Warshall otherwise.
    #[default]
    Auto,
    Dijkstra,
    FloydWarshall,
}

impl Algorithm {
    pub fn resolve(self, g: &PlantGraph) -> Algorithm {
        match self {
            Algorithm::Auto => {
                let n = g.node_count() as f64;
                if (g.edge_count() as f64) < n.powf(1.5) {
                    Algorithm::Dijkstra
                } else {
                    Algorithm::FloydWarshall
                }
            }
            other => other,
        }
    }
}

pub fn all_pairs(g: &PlantGraph, algorithm: Algorithm) -> DistanceMatrix {
    match algorithm.resolve(g) {
        Algorithm::FloydWarshall => floyd_warshall(g),
        _ => dijkstra_all_pairs(g),
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Single-source Dijkstra; returns (dist, pred) rows for `source`.
fn dijkstra_from(g: &PlantGraph, source: usize) -> (Vec<f64>, Vec<usize>) {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut visited = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse(HeapEntry(0.0, source)));
    while let Some(Reverse(HeapEntry(d, u))) = heap.pop() {
        if visited[u] {
            continue;
        }
        visited[u] = true;
        for &e in g.out_edges(u) {
            let edge = g.edge(e);
            let nd = d + edge.weight;
            if nd < dist[edge.head] {
                dist[edge.head] = nd;
                pred[edge.head] = u;
                heap.push(Reverse(HeapEntry(nd, edge.head)));
            }
        }
    }
    (dist, pred)
}

/// Dijkstra from every node, one source per rayon task.
pub fn dijkstra_all_pairs(g: &PlantGraph) -> DistanceMatrix {
    let n = g.node_count();
    let rows: Vec<_> = (0..n).into_par_iter().map(|s| dijkstra_from(g, s)).collect();
    let mut m = DistanceMatrix::empty(n);
    for (s, (dist, pred)) in rows.into_iter().enumerate() {
        m.dist[s * n..(s + 1) * n].copy_from_slice(&dist);
        m.pred[s * n..(s + 1) * n].copy_from_slice(&pred);
    }
    m
}

pub fn floyd_warshall(g: &PlantGraph) -> DistanceMatrix {
    let n = g.node_count();
    let mut m = DistanceMatrix::empty(n);
    for e in g.edges() {
        let idx = e.tail * n + e.head;
        if e.weight < m.dist[idx] {
            m.dist[idx] = e.weight;
            m.pred[idx] = e.tail;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = m.dist[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + m.dist[k * n + j];
                if cand < m.dist[i * n + j] {
                    m.dist[i * n + j] = cand;
                    m.pred[i * n + j] = m.pred[k * n + j];
                }
            }
        }
    }
    m
}

/// Reconstructs a shortest `u -> v` path as node indices, `u` first.
pub fn shortest_path(g: &PlantGraph, m: &DistanceMatrix, u: usize, v: usize) -> Result<Vec<usize>> {
    if !m.dist(u, v).is_finite() {
        return Err(Error::Unreachable {
            from: g.node(u).id.clone(),
            to: g.node(v).id.clone(),
        });
    }
    let mut path = vec![v];
    let mut cur = v;
    while cur != u {
        cur = m.pred(u, cur).expect("reachable node has a predecessor");
        path.push(cur);
    }
    path.reverse();
    Ok(path)
}
