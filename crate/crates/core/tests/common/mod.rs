#![allow(dead_code)]

use plantgraph_core::graph::{EdgeRecord, GraphDocument, NodeRecord};
use plantgraph_core::{EdgeLogic, NodeRole, PlantGraph, SwitchState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random plant: G(n, p) topology, random roles, weights, resistances and a
/// random mix of AND/OR logic on multi-predecessor heads.
pub fn random_plant(seed: u64, n: usize, p: f64) -> PlantGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.random_bool(p) {
                pairs.push((a, b));
            }
        }
    }
    let mut indeg = vec![0usize; n];
    for &(_, b) in &pairs {
        indeg[b] += 1;
    }
    let nodes = (0..n)
        .map(|i| {
            let role = match rng.random_range(0..10) {
                0..=1 => NodeRole::Source,
                2..=4 => NodeRole::Switch,
                5..=6 => NodeRole::User,
                _ => NodeRole::Hub,
            };
            NodeRecord {
                id: format!("n{i}"),
                role,
                area: format!("area{}", i % 3),
                passive_resistant: rng.random_bool(0.15),
                service: (role == NodeRole::Source).then(|| rng.random_range(1..4) as f64),
                switch: (role == NodeRole::Switch).then(|| rng.random_bool(0.8)),
                orphan: None,
            }
        })
        .collect();
    let edges = pairs
        .iter()
        .map(|&(a, b)| EdgeRecord {
            from: format!("n{a}"),
            to: format!("n{b}"),
            weight: rng.random_range(0.5..5.0),
            logic: if indeg[b] == 1 {
                EdgeLogic::Single
            } else if rng.random_bool(0.5) {
                EdgeLogic::And
            } else {
                EdgeLogic::Or
            },
        })
        .collect();
    PlantGraph::from_document(GraphDocument { nodes, edges }).expect("random plant is valid")
}

pub fn random_state(rng: &mut ChaCha8Rng, g: &PlantGraph) -> SwitchState {
    SwitchState::from_genes((0..g.switches().len()).map(|_| rng.random_bool(0.5)).collect())
}

pub fn random_perturbation(rng: &mut ChaCha8Rng, g: &PlantGraph, max: usize) -> Vec<String> {
    let k = rng.random_range(1..=max.min(g.node_count()));
    let mut out: Vec<String> = (0..k)
        .map(|_| g.node(rng.random_range(0..g.node_count())).id.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Break rules applied to the whole node set until nothing changes.
pub fn naive_broken(g: &PlantGraph, perturbed: &[String], state: &SwitchState) -> Vec<bool> {
    let n = g.node_count();
    let mut open = vec![false; n];
    for (&v, &closed) in g.switches().iter().zip(state.genes()) {
        open[v] = !closed;
    }
    let mut broken = vec![false; n];
    for id in perturbed {
        let v = g.index_of(id).unwrap();
        if !g.node(v).passive_resistant {
            broken[v] = true;
        }
    }
    loop {
        let mut next = broken.clone();
        for v in 0..n {
            if next[v] || g.node(v).passive_resistant || open[v] {
                continue;
            }
            let ins: Vec<_> = g.edges().iter().filter(|e| e.head == v).collect();
            let hard = ins
                .iter()
                .any(|e| matches!(e.logic, EdgeLogic::Single | EdgeLogic::And) && broken[e.tail]);
            let ors: Vec<_> = ins.iter().filter(|e| e.logic == EdgeLogic::Or).collect();
            let soft = !ors.is_empty() && ors.iter().all(|e| broken[e.tail]);
            if hard || soft {
                next[v] = true;
            }
        }
        if next == broken {
            return broken;
        }
        broken = next;
    }
}

/// Residual service from a transitive-closure reachability matrix.
pub fn closure_service(g: &PlantGraph, alive: &[bool], state: &SwitchState) -> Vec<f64> {
    let n = g.node_count();
    let mut open = vec![false; n];
    for (&v, &closed) in g.switches().iter().zip(state.genes()) {
        open[v] = !closed;
    }
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        reach[i][i] = alive[i];
    }
    for e in g.edges() {
        if !open[e.head] && alive[e.tail] && alive[e.head] {
            reach[e.tail][e.head] = true;
        }
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (x, &y) in row.iter_mut().zip(&via) {
                *x |= y;
            }
        }
    }
    let mut got = vec![0.0; n];
    for s in 0..n {
        if g.node(s).role != NodeRole::Source || !alive[s] {
            continue;
        }
        let users: Vec<usize> = (0..n)
            .filter(|&u| g.node(u).role == NodeRole::User && reach[s][u])
            .collect();
        for &u in &users {
            got[u] += g.node(s).service / users.len() as f64;
        }
    }
    got
}
