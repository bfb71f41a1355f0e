use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EvaluatedState, Evaluator, FaultScenario};
use crate::error::{Error, Result};
use crate::graph::PlantGraph;
use crate::switches::SwitchState;

/// Genetic search parameters.
///
/// Each generation keeps the `nsel` fittest individuals and refills the
/// population: with probability `tresh` an offspring pair comes from uniform
/// crossover of two selected parents, otherwise one selected parent is
/// copied with every gene flipped with probability `indpb`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub npop: usize,
    pub ngen: usize,
    pub indpb: f64,
    pub tresh: f64,
    pub nsel: usize,
    pub seed: u64,
    /// Carry the best individual found so far into every generation.
    pub elitism: bool,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            npop: 400,
            ngen: 200,
            indpb: 0.7,
            tresh: 0.4,
            nsel: 100,
            seed: 0,
            elitism: true,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.npop == 0 {
            return bad("npop must be positive");
        }
        if self.nsel == 0 || self.nsel > self.npop {
            return bad("nsel must satisfy 0 < nsel <= npop");
        }
        if !(0.0..=1.0).contains(&self.indpb) {
            return bad("indpb must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.tresh) {
            return bad("tresh must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// 0 is the random initial population.
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaOutcome {
    pub best: EvaluatedState,
    pub log: Vec<GenerationStats>,
    /// Distinct states evaluated.
    pub evaluations: usize,
}

pub fn evolve(g: &PlantGraph, scenario: &FaultScenario, params: &GaParams) -> Result<GaOutcome> {
    evolve_with(g, scenario, params, |_| ControlFlow::Continue(()))
}

/// Like [`evolve`], reporting every generation to `observer`; returning
/// `ControlFlow::Break` aborts the run with [`Error::Cancelled`].
pub fn evolve_with<F>(g: &PlantGraph, scenario: &FaultScenario, params: &GaParams, mut observer: F) -> Result<GaOutcome>
where
    F: FnMut(&GenerationStats) -> ControlFlow<()>,
{
    params.validate()?;
    let evaluator = Evaluator::new(g, scenario)?;
    let k = evaluator.gene_count();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "genetic search needs at least one switch".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut cache: HashMap<SwitchState, EvaluatedState> = HashMap::new();
    let mut population: Vec<SwitchState> = (0..params.npop)
        .map(|_| SwitchState::from_genes((0..k).map(|_| rng.random_bool(0.5)).collect()))
        .collect();

    let mut log = Vec::with_capacity(params.ngen + 1);
    let mut best_so_far: Option<EvaluatedState> = None;

    for generation in 0..=params.ngen {
        if generation > 0 {
            let selected = select(&population, &cache, params.nsel);
            population = breed(
                &selected,
                best_so_far.as_ref().filter(|_| params.elitism),
                params,
                &mut rng,
            );
        }
        evaluate_all(&evaluator, &population, &mut cache)?;

        let scored: Vec<&EvaluatedState> = population.iter().map(|s| &cache[s]).collect();
        let gen_best = scored
            .iter()
            .copied()
            .min_by(|a, b| a.rank(b))
            .expect("population is nonempty");
        if best_so_far.as_ref().is_none_or(|b| gen_best.rank(b).is_lt()) {
            best_so_far = Some(gen_best.clone());
        }
        let stats = GenerationStats {
            generation,
            best: gen_best.fitness,
            mean: scored.iter().map(|e| e.fitness).sum::<f64>() / scored.len() as f64,
            best_so_far: best_so_far.as_ref().map(|b| b.fitness).unwrap_or(gen_best.fitness),
        };
        let flow = observer(&stats);
        log.push(stats);
        if flow.is_break() {
            return Err(Error::Cancelled);
        }
    }

    Ok(GaOutcome {
        best: best_so_far.expect("at least one generation"),
        log,
        evaluations: cache.len(),
    })
}

/// Evaluates the not-yet-seen states in parallel. The RNG is untouched here,
/// so parallelism cannot change the gene sequence.
fn evaluate_all(
    evaluator: &Evaluator<'_>,
    population: &[SwitchState],
    cache: &mut HashMap<SwitchState, EvaluatedState>,
) -> Result<()> {
    let mut seen = HashSet::new();
    let fresh: Vec<&SwitchState> = population
        .iter()
        .filter(|s| !cache.contains_key(*s) && seen.insert(*s))
        .collect();
    let scored: Vec<EvaluatedState> = fresh.par_iter().map(|s| evaluator.evaluate(s)).collect::<Result<_>>()?;
    for e in scored {
        cache.insert(e.state.clone(), e);
    }
    Ok(())
}

fn select(population: &[SwitchState], cache: &HashMap<SwitchState, EvaluatedState>, nsel: usize) -> Vec<SwitchState> {
    let mut ranked: Vec<&EvaluatedState> = population.iter().map(|s| &cache[s]).collect();
    ranked.sort_by(|a, b| a.rank(b));
    ranked.into_iter().take(nsel).map(|e| e.state.clone()).collect()
}

fn breed(
    selected: &[SwitchState],
    elite: Option<&EvaluatedState>,
    params: &GaParams,
    rng: &mut ChaCha8Rng,
) -> Vec<SwitchState> {
    let mut next = Vec::with_capacity(params.npop);
    if let Some(e) = elite {
        next.push(e.state.clone());
    }
    while next.len() < params.npop {
        if rng.random::<f64>() < params.tresh {
            let a = selected[rng.random_range(0..selected.len())].genes();
            let b = selected[rng.random_range(0..selected.len())].genes();
            let mut c1 = Vec::with_capacity(a.len());
            let mut c2 = Vec::with_capacity(a.len());
            for (&x, &y) in a.iter().zip(b) {
                if rng.random_bool(0.5) {
                    c1.push(x);
                    c2.push(y);
                } else {
                    c1.push(y);
                    c2.push(x);
                }
            }
            next.push(SwitchState::from_genes(c1));
            if next.len() < params.npop {
                next.push(SwitchState::from_genes(c2));
            }
        } else {
            let parent = selected[rng.random_range(0..selected.len())].genes();
            let child = parent
                .iter()
                .map(|&x| if rng.random_bool(params.indpb) { !x } else { x })
                .collect();
            next.push(SwitchState::from_genes(child));
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::optimizer::brute_force_best;

    fn small() -> GaParams {
        GaParams {
            npop: 40,
            ngen: 20,
            nsel: 10,
            ..GaParams::default()
        }
    }

    #[test]
    fn param_validation() {
        let g = fixtures::switch_line();
        let sc = FaultScenario::new(&g, &["1"]);
        for p in [
            GaParams { nsel: 0, ..small() },
            GaParams { nsel: 41, ..small() },
            GaParams { indpb: 1.5, ..small() },
            GaParams { tresh: -0.1, ..small() },
            GaParams { npop: 0, ..small() },
        ] {
            assert!(matches!(evolve(&g, &sc, &p), Err(Error::InvalidParameter(_))), "{p:?}");
        }
    }

    #[test]
    fn needs_a_switch() {
        let g = crate::testutil::hub_graph(&["a", "b"], &[("a", "b", 1.0)]);
        let sc = FaultScenario::new(&g, &["a"]);
        assert!(evolve(&g, &sc, &small()).is_err());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let g = fixtures::switch_line();
        let sc = FaultScenario::new(&g, &["2"]);
        let p = GaParams { seed: 11, ..small() };
        assert_eq!(evolve(&g, &sc, &p).unwrap(), evolve(&g, &sc, &p).unwrap());
    }

    #[test]
    fn single_switch_solved_in_first_generation() {
        let g = crate::testutil::one_switch();
        let sc = FaultScenario::new(&g, &["h"]);
        let out = evolve(
            &g,
            &sc,
            &GaParams {
                ngen: 1,
                seed: 3,
                ..small()
            },
        )
        .unwrap();
        let oracle = brute_force_best(&g, &sc, 20).unwrap();
        assert_eq!(oracle[0].fitness, -2.0);
        assert_eq!(out.log[1].best_so_far, oracle[0].fitness);
        assert_eq!(out.best.state.genes(), &[false]);
    }

    #[test]
    fn best_so_far_never_worsens() {
        let g = fixtures::switch_line();
        let sc = FaultScenario::new(&g, &["2", "3"]);
        let out = evolve(&g, &sc, &GaParams { seed: 5, ..small() }).unwrap();
        for w in out.log.windows(2) {
            assert!(w[1].best_so_far <= w[0].best_so_far);
        }
        let oracle = brute_force_best(&g, &sc, 20).unwrap();
        assert!(out.best.fitness >= oracle[0].fitness);
    }

    #[test]
    fn observer_can_cancel() {
        let g = fixtures::switch_line();
        let sc = FaultScenario::new(&g, &["1"]);
        let mut seen = 0;
        let res = evolve_with(&g, &sc, &small(), |s| {
            seen = s.generation;
            if s.generation == 3 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        assert!(matches!(res, Err(Error::Cancelled)));
        assert_eq!(seen, 3);
    }
}
