//! Fault propagation over the effective graph.
//!
//! Break rules, evaluated to a fixed point:
//! 1. a perturbed node breaks unless it is passive resistant;
//! 2. a node breaks when the tail of any SINGLE or AND in-edge is broken;
//! 3. a node with OR in-edges breaks when every OR tail is broken;
//! 4. passive-resistant nodes never break.
//!
//! In-edges of False switches are absent from the effective graph, so an
//! open switch cannot be reached and a node left without in-edges survives.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeLogic, PlantGraph};
use crate::switches::SwitchState;

/// One step of a simulation, in the order it happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum StepEvent {
    SwitchSet {
        switch: String,
        from: bool,
        to: bool,
    },
    Perturbed {
        node: String,
    },
    Resisted {
        node: String,
    },
    Broken {
        node: String,
        via: String,
        logic: EdgeLogic,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationResult {
    pub broken: Vec<String>,
    pub alive: Vec<String>,
    pub n_alive: usize,
    #[serde(skip)]
    pub(crate) broken_mask: Vec<bool>,
    #[serde(skip)]
    pub(crate) trace: Vec<StepEvent>,
}

impl PropagationResult {
    /// `mask[v]` is true for broken nodes.
    pub fn broken_mask(&self) -> &[bool] {
        &self.broken_mask
    }

    pub fn alive_mask(&self) -> Vec<bool> {
        self.broken_mask.iter().map(|b| !b).collect()
    }

    pub fn trace(&self) -> &[StepEvent] {
        &self.trace
    }

    pub fn is_broken(&self, g: &PlantGraph, id: &str) -> bool {
        g.index_of(id).map(|v| self.broken_mask[v]).unwrap_or(false)
    }
}

/// Propagates a perturbation of the named nodes under `state`.
pub fn propagate(g: &PlantGraph, perturbed: &[String], state: &SwitchState) -> Result<PropagationResult> {
    let seeds = resolve(g, perturbed)?;
    let open = g.open_mask(state)?;
    Ok(propagate_indices(g, &seeds, &open, true))
}

pub(crate) fn resolve(g: &PlantGraph, perturbed: &[String]) -> Result<Vec<usize>> {
    if perturbed.is_empty() {
        return Err(Error::InvalidParameter("perturbation set is empty".into()));
    }
    perturbed.iter().map(|id| g.require(id)).collect()
}

/// Worklist evaluation in ascending node index. `open[v]` marks False
/// switches, whose in-edges are ignored.
pub(crate) fn propagate_indices(g: &PlantGraph, seeds: &[usize], open: &[bool], record: bool) -> PropagationResult {
    let n = g.node_count();
    let mut broken = vec![false; n];
    let mut or_total = vec![0usize; n];
    let mut or_broken = vec![0usize; n];
    for e in g.edges() {
        if e.logic == EdgeLogic::Or && !open[e.head] {
            or_total[e.head] += 1;
        }
    }

    let mut trace = Vec::new();
    let mut queue = BTreeSet::new();
    let mut sorted_seeds = seeds.to_vec();
    sorted_seeds.sort_unstable();
    sorted_seeds.dedup();
    for &v in &sorted_seeds {
        let node = g.node(v);
        if node.passive_resistant {
            if record {
                trace.push(StepEvent::Resisted { node: node.id.clone() });
            }
        } else if !broken[v] {
            broken[v] = true;
            queue.insert(v);
            if record {
                trace.push(StepEvent::Perturbed { node: node.id.clone() });
            }
        }
    }

    while let Some(u) = queue.pop_first() {
        for &e in g.out_edges(u) {
            let edge = g.edge(e);
            let v = edge.head;
            if open[v] || broken[v] || g.node(v).passive_resistant {
                continue;
            }
            let breaks = match edge.logic {
                EdgeLogic::Single | EdgeLogic::And => true,
                EdgeLogic::Or => {
                    or_broken[v] += 1;
                    or_broken[v] == or_total[v]
                }
            };
            if breaks {
                broken[v] = true;
                queue.insert(v);
                if record {
                    trace.push(StepEvent::Broken {
                        node: g.node(v).id.clone(),
                        via: g.node(u).id.clone(),
                        logic: edge.logic,
                    });
                }
            }
        }
    }

    let mut broken_ids = Vec::new();
    let mut alive_ids = Vec::new();
    for (v, &b) in broken.iter().enumerate() {
        if b {
            broken_ids.push(g.node(v).id.clone());
        } else {
            alive_ids.push(g.node(v).id.clone());
        }
    }
    PropagationResult {
        n_alive: alive_ids.len(),
        broken: broken_ids,
        alive: alive_ids,
        broken_mask: broken,
        trace,
    }
}

/// Only the broken count, for hot loops.
pub(crate) fn broken_mask(g: &PlantGraph, seeds: &[usize], open: &[bool]) -> Vec<bool> {
    propagate_indices(g, seeds, open, false).broken_mask
}
