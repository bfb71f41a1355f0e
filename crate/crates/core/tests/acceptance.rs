//! Acceptance suite. Each test prints one `[PASS]` or `[FAIL]` line for
//! its criterion before asserting.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use plantgraph_core::generator::{classify_roles, convert_or_edges, generate_gnp, promote_switches};
use plantgraph_core::optimizer::{brute_force_best, evolve, Evaluator};
use plantgraph_core::paths::{dijkstra_all_pairs, floyd_warshall};
use plantgraph_core::{
    compute_service, fixtures, propagate, EvaluatedState, FaultScenario, FitnessWeights, GaParams, PlantGraph,
    SwitchState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const APSP_TOL: f64 = 1e-9;
const SERVICE_TOL: f64 = 1e-9;
const TOY_LIMIT: Duration = Duration::from_secs(1);
const GA_RUN_LIMIT: Duration = Duration::from_secs(60);
const APSP_LIMIT: Duration = Duration::from_secs(30);
const PROPERTY_LIMIT: Duration = Duration::from_secs(600);
const ORACLE_SWITCH_LIMIT: usize = 12;

fn report(name: &str, ok: bool, detail: String) {
    // written to the real stdout so the line survives test output capture
    let mut out = std::io::stdout().lock();
    writeln!(out, "[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" }).unwrap();
    assert!(ok, "{name} failed: {detail}");
}

fn ids(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn triple(e: &EvaluatedState) -> (usize, f64, usize) {
    (e.n_actions, e.s_tot, e.n_alive)
}

fn reference_ga(seed: u64) -> GaParams {
    GaParams {
        npop: 400,
        ngen: 200,
        indpb: 0.7,
        tresh: 0.4,
        nsel: 100,
        seed,
        elitism: true,
    }
}

#[test]
fn fixture_t_exact() {
    let start = Instant::now();
    let g = fixtures::toy();
    let everyone = vec![true; g.node_count()];
    let base = compute_service(&g, &everyone, &SwitchState::initial(&g)).unwrap();
    let state = SwitchState::from_pairs(&g, true, &[("2", false), ("3", false)]).unwrap();
    let post = propagate(&g, &ids(&["1"]), &state).unwrap();
    let after = compute_service(&g, &post.alive_mask(), &state).unwrap();
    let elapsed = start.elapsed();
    let ok =
        base.per_user["18"] == 3.0 && post.broken == ids(&["1"]) && after.per_user["18"] == 2.0 && elapsed < TOY_LIMIT;
    report(
        "Fixture T baseline and perturb {1}",
        ok,
        format!(
            "baseline 18 = {}, broken = {:?}, post 18 = {}, {:?}",
            base.per_user["18"], post.broken, after.per_user["18"], elapsed
        ),
    );
}

#[test]
fn fixture_l_baseline() {
    let g = fixtures::switch_line();
    let r = compute_service(&g, &vec![true; g.node_count()], &SwitchState::initial(&g)).unwrap();
    let ok = r.per_user.len() == 5 && r.per_user.values().all(|&s| s == 0.6);
    report("Fixture L baseline service", ok, format!("{:?}", r.per_user));
}

#[test]
fn fixture_l_perturb_1() {
    let g = fixtures::switch_line();
    let sc = FaultScenario::new(&g, &["1"]);
    let oracle = brute_force_best(&g, &sc, 20).unwrap();
    let s1_only = SwitchState::from_pairs(&g, true, &[("S1", false)]).unwrap();
    let oracle_ok = oracle.len() == 1
        && oracle[0].state == s1_only
        && triple(&oracle[0]) == (1, 2.0, 24)
        && oracle[0].fitness == -25.0;

    let mut hits = 0;
    let mut slowest = Duration::ZERO;
    for seed in 0..10 {
        let start = Instant::now();
        let out = evolve(&g, &sc, &reference_ga(seed)).unwrap();
        slowest = slowest.max(start.elapsed());
        if out.best.fitness == oracle[0].fitness {
            hits += 1;
        }
    }
    let ok = oracle_ok && hits >= 9 && slowest < GA_RUN_LIMIT;
    report(
        "Fixture L perturb {1}",
        ok,
        format!(
            "oracle {} at {:?}, GA matched {hits}/10, slowest run {slowest:?}",
            oracle[0].state,
            triple(&oracle[0])
        ),
    );
}

#[test]
fn fixture_l_perturb_2() {
    let g = fixtures::switch_line();
    let sc = FaultScenario::new(&g, &["2"]);
    let oracle = brute_force_best(&g, &sc, 20).unwrap();
    let want = SwitchState::from_pairs(&g, true, &[("S1", false), ("S2", false)]).unwrap();
    let (_, service) = Evaluator::new(&g, &sc).unwrap().simulate(&oracle[0].state).unwrap();
    let dist_ok = service.per_user["10"] == 1.0 && ["11", "12", "13", "14"].iter().all(|u| service.per_user[*u] == 0.5);
    let ok = oracle.len() == 1 && oracle[0].state == want && oracle[0].fitness == -25.0 && dist_ok;
    report(
        "Fixture L perturb {2}",
        ok,
        format!(
            "oracle {} fitness {}, service {:?}",
            oracle[0].state, oracle[0].fitness, service.per_user
        ),
    );
}

#[test]
fn fixture_l_perturb_2_3() {
    let g = fixtures::switch_line();
    let sc = FaultScenario::new(&g, &["2", "3"]);
    let oracle = brute_force_best(&g, &sc, 20).unwrap();
    let x1 = SwitchState::from_pairs(&g, true, &[("S1", false), ("S2", false), ("S3", false)]).unwrap();
    let x2 = SwitchState::from_pairs(&g, true, &[("S1", false), ("S3", false)]).unwrap();
    let mut got: Vec<_> = oracle.iter().map(|e| e.state.clone()).collect();
    got.sort();
    let mut want = vec![x1.clone(), x2.clone()];
    want.sort();
    let unit_ok = got == want && oracle.iter().all(|e| e.fitness == -23.0);

    let weighted = sc.clone().with_weights(FitnessWeights::new(2.0, 1.0, 1.0).unwrap());
    let best = brute_force_best(&g, &weighted, 20).unwrap();
    let weighted_ok = best.len() == 1 && best[0].state == x2 && best[0].n_actions == 2;
    report(
        "Fixture L perturb {2, 3}",
        unit_ok && weighted_ok,
        format!(
            "unit weights: {:?}; w1 = 2: {:?}",
            oracle
                .iter()
                .map(|e| (e.state.to_string(), e.fitness))
                .collect::<Vec<_>>(),
            best.iter()
                .map(|e| (e.state.to_string(), e.fitness))
                .collect::<Vec<_>>()
        ),
    );
}

#[test]
fn dijkstra_matches_floyd_warshall() {
    let start = Instant::now();
    let mut graphs: Vec<PlantGraph> = vec![fixtures::toy(), fixtures::switch_line()];
    for seed in 0..20 {
        graphs.push(generate_gnp(100, 0.01, seed).unwrap());
    }
    let worst = graphs
        .iter()
        .map(|g| dijkstra_all_pairs(g).max_abs_diff(&floyd_warshall(g)))
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    report(
        "Dijkstra vs Floyd-Warshall",
        worst <= APSP_TOL && elapsed < APSP_LIMIT,
        format!("{} graphs, max deviation {worst:e}, {elapsed:?}", graphs.len()),
    );
}

#[test]
fn worklist_matches_naive_fixed_point() {
    let mut mismatches = Vec::new();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=30);
        let p = rng.random_range(0.05..0.3);
        let g = common::random_plant(seed, n, p);
        let perturbed = common::random_perturbation(&mut rng, &g, 4);
        let state = common::random_state(&mut rng, &g);
        let fast = propagate(&g, &perturbed, &state).unwrap();
        if fast.broken_mask() != common::naive_broken(&g, &perturbed, &state).as_slice() {
            mismatches.push(seed);
        }
    }
    report(
        "Propagation worklist vs naive fixed point",
        mismatches.is_empty(),
        format!("100 graphs, mismatching seeds {mismatches:?}"),
    );
}

struct PropertyTally {
    instances: usize,
    oracle_levels: usize,
    violations: Vec<String>,
}

fn broken_count(g: &PlantGraph, perturbed: &[String], state: &SwitchState) -> usize {
    propagate(g, perturbed, state).unwrap().broken.len()
}

fn best_of(g: &PlantGraph, perturbed: &[String], weights: FitnessWeights) -> EvaluatedState {
    let sc = FaultScenario {
        perturbed: perturbed.to_vec(),
        initial_state: SwitchState::initial(g),
        weights,
    };
    let all = brute_force_best(g, &sc, ORACLE_SWITCH_LIMIT).unwrap();
    all.into_iter().min_by(|a, b| a.rank(b)).unwrap()
}

fn check_instance(seed: u64, tally: &mut PropertyTally) {
    let base = classify_roles(&generate_gnp(100, 0.01, seed).unwrap());
    let pcts: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let levels = promote_switches(&base, &pcts, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xACCE);

    let hub = (0..base.node_count())
        .max_by_key(|&v| (base.out_edges(v).len(), std::cmp::Reverse(v)))
        .unwrap();
    let mut scenarios = vec![vec![base.node(hub).id.clone()]];
    for _ in 0..3 {
        scenarios.push(common::random_perturbation(&mut rng, &base, 3));
    }
    let unit = FitnessWeights::default();
    tally.instances += 1;

    for perturbed in &scenarios {
        let none = broken_count(&base, perturbed, &SwitchState::initial(&base));

        // (c) OR edges never enlarge the broken set under all-True switches
        let or_graph = convert_or_edges(&base, 0.5, seed).unwrap();
        let and_broken = propagate(&base, perturbed, &SwitchState::initial(&base)).unwrap();
        let or_broken = propagate(&or_graph, perturbed, &SwitchState::initial(&or_graph)).unwrap();
        if or_broken
            .broken_mask()
            .iter()
            .zip(and_broken.broken_mask())
            .any(|(&o, &a)| o && !a)
        {
            tally.violations.push(format!(
                "seed {seed} {perturbed:?}: OR broken set not contained in AND set"
            ));
        }

        let mut previous = best_of(&base, perturbed, unit).fitness;
        for (pct, g) in pcts.iter().zip(&levels) {
            // (b) on arbitrary states of every level
            for _ in 0..5 {
                let state = common::random_state(&mut rng, g);
                if broken_count(g, perturbed, &state) > none {
                    tally
                        .violations
                        .push(format!("seed {seed} {pct}: random state breaks more than no switches"));
                }
            }
            if g.switches().len() > ORACLE_SWITCH_LIMIT {
                continue;
            }
            tally.oracle_levels += 1;
            let best = best_of(g, perturbed, unit);
            // (a)
            if best.fitness > previous {
                tally.violations.push(format!(
                    "seed {seed} {pct} {perturbed:?}: fitness rose {previous} -> {}",
                    best.fitness
                ));
            }
            previous = best.fitness;
            // (b) on the optimum
            if broken_count(g, perturbed, &best.state) > none {
                tally
                    .violations
                    .push(format!("seed {seed} {pct}: optimum breaks more than no switches"));
            }
            // (d)
            let heavy = |w: FitnessWeights| best_of(g, perturbed, w);
            let w1 = heavy(FitnessWeights::new(10.0, 1.0, 1.0).unwrap());
            let w2 = heavy(FitnessWeights::new(1.0, 10.0, 1.0).unwrap());
            let w3 = heavy(FitnessWeights::new(1.0, 1.0, 10.0).unwrap());
            if w1.n_actions > best.n_actions {
                tally
                    .violations
                    .push(format!("seed {seed} {pct}: w1 = 10 raised n_actions"));
            }
            if w2.s_tot < best.s_tot - SERVICE_TOL {
                tally
                    .violations
                    .push(format!("seed {seed} {pct}: w2 = 10 lowered S_tot"));
            }
            if w3.n_alive < best.n_alive {
                tally
                    .violations
                    .push(format!("seed {seed} {pct}: w3 = 10 lowered n_alive"));
            }
        }
    }
}

#[test]
fn random_plant_properties() {
    let start = Instant::now();
    let mut tally = PropertyTally {
        instances: 0,
        oracle_levels: 0,
        violations: Vec::new(),
    };
    for seed in 0..50 {
        check_instance(seed, &mut tally);
    }
    let elapsed = start.elapsed();
    let ok = tally.violations.is_empty() && tally.oracle_levels > 0 && elapsed < PROPERTY_LIMIT;
    report(
        "Random plant properties (a)-(d)",
        ok,
        format!(
            "{} instances, {} oracle levels, {elapsed:?}, violations {:?}",
            tally.instances,
            tally.oracle_levels,
            tally.violations.iter().take(5).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn fitness_identity_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut bad = 0;
    let graphs = [
        fixtures::toy(),
        fixtures::switch_line(),
        common::random_plant(7, 30, 0.1),
    ];
    while checked < 10_000 {
        let g = &graphs[checked % graphs.len()];
        let weights = FitnessWeights::new(
            rng.random_range(0.0..10.0),
            rng.random_range(0.0..10.0),
            rng.random_range(0.0..10.0),
        )
        .unwrap();
        let sc = FaultScenario {
            perturbed: common::random_perturbation(&mut rng, g, 3),
            initial_state: common::random_state(&mut rng, g),
            weights,
        };
        let e = Evaluator::new(g, &sc)
            .unwrap()
            .evaluate(&common::random_state(&mut rng, g))
            .unwrap();
        let expected = weights.w1 * e.n_actions as f64 - weights.w2 * e.s_tot - weights.w3 * e.n_alive as f64;
        if e.fitness.to_bits() != expected.to_bits() {
            bad += 1;
        }
        checked += 1;
    }
    report(
        "Fitness identity",
        bad == 0,
        format!("{checked} states, {bad} mismatches"),
    );
}
