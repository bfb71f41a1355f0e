//! Switch-state fitness and search.
//!
//! A candidate [`SwitchState`] is scored by
//! `w1 * n_actions - w2 * s_tot - w3 * n_alive` (lower is better), where
//! `n_actions` counts flips from the scenario's initial state, `s_tot` is the
//! residual service over all users and `n_alive` the surviving node count.

mod exhaustive;
mod genetic;

pub use exhaustive::{brute_force_best, DEFAULT_EXHAUSTIVE_CAP};
pub use genetic::{evolve, evolve_with, GaOutcome, GaParams, GenerationStats};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PlantGraph;
use crate::propagation::{self, PropagationResult};
use crate::service::{self, ServiceReport};
use crate::switches::{n_actions, SwitchState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl Default for FitnessWeights {
    fn default() -> Self {
        FitnessWeights {
            w1: 1.0,
            w2: 1.0,
            w3: 1.0,
        }
    }
}

impl FitnessWeights {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self> {
        let w = FitnessWeights { w1, w2, w3 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("w1", self.w1), ("w2", self.w2), ("w3", self.w3)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }

    pub fn fitness(&self, n_actions: usize, s_tot: f64, n_alive: usize) -> f64 {
        self.w1 * n_actions as f64 - self.w2 * s_tot - self.w3 * n_alive as f64
    }
}

/// Initially perturbed nodes, the pre-fault switch state and the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultScenario {
    pub perturbed: Vec<String>,
    pub initial_state: SwitchState,
    #[serde(default)]
    pub weights: FitnessWeights,
}

impl FaultScenario {
    /// Scenario starting from the graph's recorded switch values.
    pub fn new(g: &PlantGraph, perturbed: &[&str]) -> Self {
        FaultScenario {
            perturbed: perturbed.iter().map(|s| s.to_string()).collect(),
            initial_state: SwitchState::initial(g),
            weights: FitnessWeights::default(),
        }
    }

    pub fn with_weights(mut self, weights: FitnessWeights) -> Self {
        self.weights = weights;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedState {
    pub state: SwitchState,
    pub n_actions: usize,
    pub s_tot: f64,
    pub n_alive: usize,
    pub fitness: f64,
}

impl EvaluatedState {
    /// Fitness on a 1e-9 grid; equal keys count as ties.
    pub fn fitness_key(&self) -> i64 {
        (self.fitness * 1e9).round() as i64
    }

    /// Lower fitness first, then fewer actions, then lexicographic state
    /// (False before True).
    pub fn rank(&self, other: &EvaluatedState) -> Ordering {
        self.fitness_key()
            .cmp(&other.fitness_key())
            .then(self.n_actions.cmp(&other.n_actions))
            .then_with(|| self.state.cmp(&other.state))
    }
}

/// Scenario resolved against a graph, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Evaluator<'g> {
    graph: &'g PlantGraph,
    seeds: Vec<usize>,
    initial: SwitchState,
    weights: FitnessWeights,
}

impl<'g> Evaluator<'g> {
    pub fn new(graph: &'g PlantGraph, scenario: &FaultScenario) -> Result<Self> {
        let seeds = propagation::resolve(graph, &scenario.perturbed)?;
        if scenario.initial_state.len() != graph.switches().len() {
            return Err(Error::StateLength {
                expected: graph.switches().len(),
                found: scenario.initial_state.len(),
            });
        }
        scenario.weights.validate()?;
        Ok(Evaluator {
            graph,
            seeds,
            initial: scenario.initial_state.clone(),
            weights: scenario.weights,
        })
    }

    pub fn graph(&self) -> &'g PlantGraph {
        self.graph
    }

    pub fn initial(&self) -> &SwitchState {
        &self.initial
    }

    pub fn weights(&self) -> FitnessWeights {
        self.weights
    }

    pub fn gene_count(&self) -> usize {
        self.initial.len()
    }

    pub fn evaluate(&self, candidate: &SwitchState) -> Result<EvaluatedState> {
        let actions = n_actions(&self.initial, candidate)?;
        let open = self.graph.open_mask(candidate)?;
        let broken = propagation::broken_mask(self.graph, &self.seeds, &open);
        let alive: Vec<bool> = broken.iter().map(|b| !b).collect();
        let n_alive = alive.iter().filter(|&&a| a).count();
        let s_tot = service::service_with_mask(self.graph, &alive, &open).total;
        Ok(EvaluatedState {
            state: candidate.clone(),
            n_actions: actions,
            s_tot,
            n_alive,
            fitness: self.weights.fitness(actions, s_tot, n_alive),
        })
    }

    /// Full propagation and service reports for one state.
    pub fn simulate(&self, candidate: &SwitchState) -> Result<(PropagationResult, ServiceReport)> {
        let open = self.graph.open_mask(candidate)?;
        let prop = propagation::propagate_indices(self.graph, &self.seeds, &open, true);
        let alive = prop.alive_mask();
        let service = service::service_with_mask(self.graph, &alive, &open);
        Ok((prop, service))
    }
}

/// Runs propagation and service on `candidate` and scores it.
pub fn evaluate(g: &PlantGraph, scenario: &FaultScenario, candidate: &SwitchState) -> Result<EvaluatedState> {
    Evaluator::new(g, scenario)?.evaluate(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn switch_line_single_fault() {
        let g = fixtures::switch_line();
        let sc = FaultScenario::new(&g, &["1"]);
        let cand = SwitchState::from_pairs(&g, true, &[("S1", false)]).unwrap();
        let e = evaluate(&g, &sc, &cand).unwrap();
        assert_eq!((e.n_actions, e.s_tot, e.n_alive, e.fitness), (1, 2.0, 24, -25.0));
    }

    #[test]
    fn switch_line_node_two() {
        let g = fixtures::switch_line();
        let sc = FaultScenario::new(&g, &["2"]);
        let cand = SwitchState::from_pairs(&g, true, &[("S1", false), ("S2", false)]).unwrap();
        let e = evaluate(&g, &sc, &cand).unwrap();
        assert_eq!((e.n_actions, e.s_tot, e.n_alive, e.fitness), (2, 3.0, 24, -25.0));
    }

    #[test]
    fn switch_line_two_and_three() {
        let g = fixtures::switch_line();
        let sc = FaultScenario::new(&g, &["2", "3"]);
        let x2 = SwitchState::from_genes(vec![false, true, false, true, true, true, true, true]);
        let e = evaluate(&g, &sc, &x2).unwrap();
        assert_eq!((e.n_actions, e.s_tot, e.n_alive, e.fitness), (2, 3.0, 22, -23.0));
    }

    #[test]
    fn rank_breaks_ties_on_actions_then_state() {
        let mk = |genes: Vec<bool>, a, f| EvaluatedState {
            state: SwitchState::from_genes(genes),
            n_actions: a,
            s_tot: 0.0,
            n_alive: 0,
            fitness: f,
        };
        let a = mk(vec![false, false], 2, -3.0);
        let b = mk(vec![false, true], 1, -3.0 + 1e-13);
        let c = mk(vec![true, false], 1, -3.0);
        assert_eq!(b.rank(&a), Ordering::Less);
        assert_eq!(b.rank(&c), Ordering::Less);
        assert_eq!(a.rank(&mk(vec![], 0, -2.0)), Ordering::Less);
    }

    #[test]
    fn rejects_negative_weights() {
        assert!(FitnessWeights::new(1.0, -1.0, 1.0).is_err());
    }
}
