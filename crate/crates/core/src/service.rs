//! Residual service.
//!
//! Every alive SOURCE splits its service evenly over the alive USER nodes
//! it reaches in the effective graph through alive nodes. Reachability is
//! unweighted; edge weights play no role here.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{NodeRole, PlantGraph};
use crate::switches::SwitchState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceReport {
    /// Service received by every USER node (0 for broken or cut-off users).
    pub per_user: IndexMap<String, f64>,
    pub total: f64,
    /// Number of alive users each SOURCE splits its service over.
    pub per_source_user_count: IndexMap<String, usize>,
}

/// `alive[v]` marks surviving nodes; it must cover every node of `g`.
pub fn compute_service(g: &PlantGraph, alive: &[bool], state: &SwitchState) -> Result<ServiceReport> {
    let open = g.open_mask(state)?;
    Ok(service_with_mask(g, alive, &open))
}

pub(crate) fn service_with_mask(g: &PlantGraph, alive: &[bool], open: &[bool]) -> ServiceReport {
    let n = g.node_count();
    assert_eq!(alive.len(), n, "alive mask length");
    // per user: (split size, summed service of sources with that split);
    // numerators are added before dividing, so 3 sources over 5 users give 3/5
    let mut received: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut per_source_user_count = IndexMap::new();

    let mut stamp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut reached = Vec::new();
    for src in g.nodes_with_role(NodeRole::Source) {
        reached.clear();
        if alive[src] {
            stamp[src] = src;
            stack.push(src);
            while let Some(u) = stack.pop() {
                if g.node(u).role == NodeRole::User {
                    reached.push(u);
                }
                for &e in g.out_edges(u) {
                    let v = g.edge(e).head;
                    if !open[v] && alive[v] && stamp[v] != src {
                        stamp[v] = src;
                        stack.push(v);
                    }
                }
            }
        }
        per_source_user_count.insert(g.node(src).id.clone(), reached.len());
        if !reached.is_empty() {
            let (k, svc) = (reached.len(), g.node(src).service);
            for &u in &reached {
                match received[u].iter_mut().find(|(d, _)| *d == k) {
                    Some((_, acc)) => *acc += svc,
                    None => received[u].push((k, svc)),
                }
            }
        }
    }

    let per_user: IndexMap<String, f64> = g
        .nodes_with_role(NodeRole::User)
        .map(|u| {
            let parts = &mut received[u];
            parts.sort_by_key(|(k, _)| *k);
            (g.node(u).id.clone(), parts.iter().map(|&(k, s)| s / k as f64).sum())
        })
        .collect();
    let total = per_user.values().sum();
    ServiceReport {
        per_user,
        total,
        per_source_user_count,
    }
}
