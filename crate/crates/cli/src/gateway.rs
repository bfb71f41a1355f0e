//! Request handling shared by the command line and the HTTP server, so
//! both front ends produce byte-identical reports for the same input.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::path::PathBuf;

use plantgraph_core::measures::{measures, MeasureSet};
use plantgraph_core::optimizer::{Evaluator, GenerationStats};
use plantgraph_core::paths::all_pairs;
use plantgraph_core::runner::run_scenario_with;
use plantgraph_core::{
    compute_service, Algorithm, DiagnosisReport, FaultScenario, FitnessWeights, GaParams, NodeRole, PlantGraph,
    RunConfig, RunMode, ServiceReport, SwitchState,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error(transparent)]
    Core(#[from] plantgraph_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl GatewayError {
    /// Bad input (exit code 1, HTTP 400) as opposed to a runtime failure.
    pub fn is_input_error(&self) -> bool {
        match self {
            GatewayError::Core(e) => e.is_input_error(),
            GatewayError::Io { .. } => false,
            GatewayError::Usage(_) => true,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GatewayError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, GatewayError>;

/// Starting point for the switch assignment of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StatePreset {
    /// The switch values stored in the graph.
    #[default]
    Initial,
    AllTrue,
    AllFalse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub perturb: Vec<String>,
    #[serde(default)]
    pub state: StatePreset,
    /// Per-switch values applied on top of `state`.
    #[serde(default)]
    pub switches: BTreeMap<String, bool>,
    #[serde(default)]
    pub weights: FitnessWeights,
    #[serde(default)]
    pub algorithm: Algorithm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeRequest {
    pub perturb: Vec<String>,
    #[serde(default)]
    pub weights: FitnessWeights,
    #[serde(default)]
    pub ga: GaParams,
    /// Enumerate every state instead of running the genetic search.
    #[serde(default)]
    pub exhaustive: bool,
    #[serde(default)]
    pub algorithm: Algorithm,
}

impl OptimizeRequest {
    /// Generations an optimize job goes through; 0 for exhaustive runs.
    pub fn generations(&self) -> usize {
        if self.exhaustive {
            0
        } else {
            self.ga.ngen
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub id: String,
    pub nodes: usize,
    pub edges: usize,
    pub sources: usize,
    pub users: usize,
    pub switches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuresReport {
    pub graph_fingerprint: String,
    pub algorithm: Algorithm,
    pub measures: MeasureSet,
    pub service: ServiceReport,
}

pub fn summarize(g: &PlantGraph) -> GraphSummary {
    GraphSummary {
        id: g.fingerprint(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        sources: g.nodes_with_role(NodeRole::Source).count(),
        users: g.nodes_with_role(NodeRole::User).count(),
        switches: g.switch_ids(),
    }
}

/// Diagnostics of the intact plant under its stored switch values.
pub fn measures_report(g: &PlantGraph, algorithm: Algorithm) -> Result<MeasuresReport> {
    let state = SwitchState::initial(g);
    let effective = g.effective_graph(&state)?;
    let algorithm = algorithm.resolve(&effective);
    Ok(MeasuresReport {
        graph_fingerprint: g.fingerprint(),
        algorithm,
        measures: measures(&effective, &all_pairs(&effective, algorithm)),
        service: compute_service(g, &vec![true; g.node_count()], &state)?,
    })
}

fn scenario(g: &PlantGraph, perturb: &[String], weights: FitnessWeights) -> Result<FaultScenario> {
    weights.validate()?;
    let sc = FaultScenario {
        perturbed: perturb.to_vec(),
        initial_state: SwitchState::initial(g),
        weights,
    };
    // rejects empty or unknown perturbations up front
    Evaluator::new(g, &sc)?;
    Ok(sc)
}

pub fn simulate(g: &PlantGraph, req: &SimulateRequest) -> Result<DiagnosisReport> {
    let sc = scenario(g, &req.perturb, req.weights)?;
    let base = match req.state {
        StatePreset::Initial => SwitchState::initial(g),
        StatePreset::AllTrue => SwitchState::all(g, true),
        StatePreset::AllFalse => SwitchState::all(g, false),
    };
    let state = base.with_overrides(g, &req.switches)?;
    let config = RunConfig {
        algorithm: req.algorithm,
        ..RunConfig::new(RunMode::FixedState(state))
    };
    Ok(run_scenario_with(g, &sc, &config, |_| ControlFlow::Continue(()))?)
}

/// Checks an optimize request and returns what [`run_prepared`] needs.
pub fn prepare_optimize(g: &PlantGraph, req: &OptimizeRequest) -> Result<(FaultScenario, RunConfig)> {
    let sc = scenario(g, &req.perturb, req.weights)?;
    let mode = if req.exhaustive {
        RunMode::Exhaustive
    } else {
        req.ga.validate()?;
        RunMode::Genetic(req.ga)
    };
    let config = RunConfig {
        algorithm: req.algorithm,
        ..RunConfig::new(mode)
    };
    if req.exhaustive && g.switches().len() > config.oracle_cap {
        return Err(plantgraph_core::Error::CapExceeded {
            switches: g.switches().len(),
            cap: config.oracle_cap,
        }
        .into());
    }
    Ok((sc, config))
}

pub fn run_prepared<F>(g: &PlantGraph, prepared: &(FaultScenario, RunConfig), observer: F) -> Result<DiagnosisReport>
where
    F: FnMut(&GenerationStats) -> ControlFlow<()>,
{
    Ok(run_scenario_with(g, &prepared.0, &prepared.1, observer)?)
}

pub fn optimize(g: &PlantGraph, req: &OptimizeRequest) -> Result<DiagnosisReport> {
    run_prepared(g, &prepare_optimize(g, req)?, |_| ControlFlow::Continue(()))
}

/// The exact bytes written by the CLI and served by the HTTP gateway.
pub fn report_json(report: &DiagnosisReport) -> String {
    let mut text = report.to_json();
    text.push('\n');
    text
}

/// Hex SHA-256 used as a content address for stored reports.
pub fn content_id(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Parses `S1=false,S2=true` into switch assignments.
pub fn parse_switch_list(text: &str) -> std::result::Result<BTreeMap<String, bool>, String> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (id, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected SWITCH=true|false, got `{item}`"))?;
        let value = match value.trim().to_ascii_lowercase().as_str() {
            "true" | "t" | "1" | "closed" => true,
            "false" | "f" | "0" | "open" => false,
            other => return Err(format!("switch `{id}`: `{other}` is not a boolean")),
        };
        out.insert(id.trim().to_string(), value);
    }
    Ok(out)
}
