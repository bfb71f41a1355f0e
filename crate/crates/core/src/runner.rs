//! End-to-end scenario execution and the diagnosis report.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PlantGraph;
use crate::measures::{measures, MeasureSet};
use crate::optimizer::{
    brute_force_best, evolve_with, EvaluatedState, Evaluator, FaultScenario, GaParams, GenerationStats,
};
use crate::paths::{all_pairs, Algorithm};
use crate::propagation::{PropagationResult, StepEvent};
use crate::service::{self, ServiceReport};
use crate::switches::SwitchState;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum RunMode {
    /// Evaluate one given switch state.
    FixedState(SwitchState),
    Genetic(GaParams),
    Exhaustive,
}

impl RunMode {
    fn label(&self) -> &'static str {
        match self {
            RunMode::FixedState(_) => "fixed-state",
            RunMode::Genetic(_) => "genetic",
            RunMode::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: RunMode,
    pub algorithm: Algorithm,
    /// Largest switch count for which all minimizers are enumerated.
    pub oracle_cap: usize,
}

impl RunConfig {
    pub fn new(mode: RunMode) -> Self {
        let oracle_cap = match mode {
            RunMode::Exhaustive => crate::optimizer::DEFAULT_EXHAUSTIVE_CAP,
            _ => 12,
        };
        RunConfig {
            mode,
            algorithm: Algorithm::Auto,
            oracle_cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub measures: MeasureSet,
    pub service: ServiceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostFault {
    pub propagation: PropagationResult,
    pub measures: MeasureSet,
    pub service: ServiceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDelta {
    pub id: String,
    pub in_degree: i64,
    pub out_degree: i64,
    pub reach: i64,
    pub closeness: f64,
    pub betweenness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDelta {
    pub global_efficiency: f64,
    pub nodes: Vec<NodeDelta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisReport {
    pub report_version: u32,
    pub graph_fingerprint: String,
    pub mode: String,
    pub switch_ids: Vec<String>,
    pub scenario: FaultScenario,
    pub baseline: Baseline,
    pub initial: EvaluatedState,
    pub chosen_state: EvaluatedState,
    /// Every fitness minimizer, when the switch count is within the cap.
    pub all_best_states: Option<Vec<EvaluatedState>>,
    pub flipped: Vec<String>,
    pub post: PostFault,
    pub delta: MeasureDelta,
    pub ga_log: Vec<GenerationStats>,
    pub step_trace: Vec<StepEvent>,
}

impl DiagnosisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Per-node and global differences `after - before`.
pub fn compare_measures(before: &MeasureSet, after: &MeasureSet) -> Result<MeasureDelta> {
    if before.nodes.len() != after.nodes.len() || before.nodes.iter().zip(&after.nodes).any(|(a, b)| a.id != b.id) {
        return Err(Error::UniverseMismatch);
    }
    let nodes = before
        .nodes
        .iter()
        .zip(&after.nodes)
        .map(|(b, a)| NodeDelta {
            id: b.id.clone(),
            in_degree: a.in_degree as i64 - b.in_degree as i64,
            out_degree: a.out_degree as i64 - b.out_degree as i64,
            reach: a.reach as i64 - b.reach as i64,
            closeness: a.closeness - b.closeness,
            betweenness: a.betweenness - b.betweenness,
        })
        .collect();
    Ok(MeasureDelta {
        global_efficiency: after.global_efficiency - before.global_efficiency,
        nodes,
    })
}

pub fn run_scenario(g: &PlantGraph, scenario: &FaultScenario, config: &RunConfig) -> Result<DiagnosisReport> {
    run_scenario_with(g, scenario, config, |_| ControlFlow::Continue(()))
}

/// `observer` sees every GA generation (genetic mode only) and may cancel.
pub fn run_scenario_with<F>(
    g: &PlantGraph,
    scenario: &FaultScenario,
    config: &RunConfig,
    observer: F,
) -> Result<DiagnosisReport>
where
    F: FnMut(&GenerationStats) -> ControlFlow<()>,
{
    let evaluator = Evaluator::new(g, scenario)?;
    let initial = evaluator.evaluate(&scenario.initial_state)?;
    let k = g.switches().len();

    let all_best = if k <= config.oracle_cap {
        Some(brute_force_best(g, scenario, config.oracle_cap)?)
    } else {
        None
    };

    let (chosen, ga_log) = match &config.mode {
        RunMode::FixedState(state) => (evaluator.evaluate(state)?, Vec::new()),
        RunMode::Exhaustive => {
            let best = all_best.as_ref().ok_or(Error::CapExceeded {
                switches: k,
                cap: config.oracle_cap,
            })?;
            let pick = best.iter().min_by(|a, b| a.rank(b)).expect("nonempty").clone();
            (pick, Vec::new())
        }
        RunMode::Genetic(params) => {
            if k == 0 {
                (initial.clone(), Vec::new())
            } else {
                let out = evolve_with(g, scenario, params, observer)?;
                // never report a state worse than doing nothing
                let best = if initial.rank(&out.best).is_lt() {
                    initial.clone()
                } else {
                    out.best
                };
                (best, out.log)
            }
        }
    };

    let baseline_graph = g.effective_graph(&scenario.initial_state)?;
    let baseline = Baseline {
        measures: measures(&baseline_graph, &all_pairs(&baseline_graph, config.algorithm)),
        service: service::compute_service(g, &vec![true; g.node_count()], &scenario.initial_state)?,
    };

    let (propagation, post_service) = evaluator.simulate(&chosen.state)?;
    let damaged = g.damaged_graph(&chosen.state, &propagation.alive_mask())?;
    let post_measures = measures(&damaged, &all_pairs(&damaged, config.algorithm));
    let delta = compare_measures(&baseline.measures, &post_measures)?;

    let mut step_trace: Vec<StepEvent> = g
        .switches()
        .iter()
        .zip(scenario.initial_state.genes().iter().zip(chosen.state.genes()))
        .filter(|(_, (a, b))| a != b)
        .map(|(&v, (&from, &to))| StepEvent::SwitchSet {
            switch: g.node(v).id.clone(),
            from,
            to,
        })
        .collect();
    step_trace.extend(propagation.trace().iter().cloned());

    Ok(DiagnosisReport {
        report_version: REPORT_VERSION,
        graph_fingerprint: g.fingerprint(),
        mode: config.mode.label().to_string(),
        switch_ids: g.switch_ids(),
        scenario: scenario.clone(),
        baseline,
        flipped: chosen.state.flipped(g, &scenario.initial_state),
        initial,
        chosen_state: chosen,
        all_best_states: all_best,
        post: PostFault {
            propagation,
            measures: post_measures,
            service: post_service,
        },
        delta,
        ga_log,
        step_trace,
    })
}

/// One line per event.
pub fn render_trace(trace: &[StepEvent]) -> String {
    let mut out = String::new();
    for (i, ev) in trace.iter().enumerate() {
        let line = match ev {
            StepEvent::SwitchSet { switch, from, to } => {
                format!("set switch {switch}: {} -> {}", py_bool(*from), py_bool(*to))
            }
            StepEvent::Perturbed { node } => format!("perturb {node}: broken"),
            StepEvent::Resisted { node } => format!("perturb {node}: resisted (passive resistance)"),
            StepEvent::Broken { node, via, logic } => format!("{node} broken via {logic} edge from {via}"),
        };
        let _ = writeln!(out, "{:>3}. {line}", i + 1);
    }
    out
}

fn py_bool(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

/// Human-readable summary followed by the step trace.
pub fn render_report(report: &DiagnosisReport) -> String {
    let c = &report.chosen_state;
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", report.mode);
    let _ = writeln!(out, "perturbed: {}", report.scenario.perturbed.join(", "));
    let _ = writeln!(out, "switches flipped: [{}]", report.flipped.join(", "));
    let _ = writeln!(
        out,
        "n_actions = {}, S_tot = {}, n_alive = {}, fitness = {}",
        c.n_actions, c.s_tot, c.n_alive, c.fitness
    );
    let _ = writeln!(out, "broken: [{}]", report.post.propagation.broken.join(", "));
    let _ = writeln!(
        out,
        "service: {} -> {}",
        report.baseline.service.total, report.post.service.total
    );
    for (user, s) in &report.post.service.per_user {
        let _ = writeln!(out, "  {user}: {s}");
    }
    let _ = writeln!(out, "steps:");
    out.push_str(&render_trace(&report.step_trace));
    out
}
