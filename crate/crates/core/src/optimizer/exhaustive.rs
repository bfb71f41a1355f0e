use rayon::prelude::*;

use super::{EvaluatedState, Evaluator, FaultScenario};
use crate::error::{Error, Result};
use crate::graph::PlantGraph;
use crate::switches::SwitchState;

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

/// Every minimizer of the fitness over all `2^k` switch states, sorted by
/// state vector. Ties are judged on the 1e-9 fitness grid.
pub fn brute_force_best(g: &PlantGraph, scenario: &FaultScenario, cap: usize) -> Result<Vec<EvaluatedState>> {
    let evaluator = Evaluator::new(g, scenario)?;
    let k = evaluator.gene_count();
    if k > cap.min(63) {
        return Err(Error::CapExceeded { switches: k, cap });
    }
    let all: Vec<EvaluatedState> = (0..1u64 << k)
        .into_par_iter()
        .map(|mask| evaluator.evaluate(&SwitchState::from_bits(mask, k)))
        .collect::<Result<_>>()?;
    let best = all
        .iter()
        .map(EvaluatedState::fitness_key)
        .min()
        .expect("at least one state");
    let mut winners: Vec<_> = all.into_iter().filter(|e| e.fitness_key() == best).collect();
    winners.sort_by(|a, b| a.state.cmp(&b.state));
    Ok(winners)
}
