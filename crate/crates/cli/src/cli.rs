//! Command line front end. [`run`] returns the process exit code:
//! 0 on success, 1 for invalid input or usage, 2 for runtime failures.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use plantgraph_core::generator::{generate, GenerationRecipe};
use plantgraph_core::runner::render_report;
use plantgraph_core::{Algorithm, DiagnosisReport, FitnessWeights, GaParams, PlantGraph};

use crate::gateway::{self, GatewayError, OptimizeRequest, Result, SimulateRequest, StatePreset};

#[derive(Debug, Parser)]
#[command(
    name = "plantgraph",
    version,
    about = "Fault propagation and switch reconfiguration for plant graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a graph document and print its summary.
    Validate(GraphArg),
    /// Centrality and efficiency measures of the intact plant.
    Measures {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
        algorithm: AlgorithmArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate a fault under a fixed switch state.
    Simulate(SimulateArgs),
    /// Search for the best switch reconfiguration after a fault.
    Optimize(OptimizeArgs),
    /// Generate random plants.
    Generate(GenerateArgs),
    /// Run the HTTP gateway.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct GraphArg {
    /// Graph document path, or `-` for stdin.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Dijkstra,
    FloydWarshall,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Auto => Algorithm::Auto,
            AlgorithmArg::Dijkstra => Algorithm::Dijkstra,
            AlgorithmArg::FloydWarshall => Algorithm::FloydWarshall,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Initially perturbed node ids, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    perturb: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    w1: f64,
    #[arg(long, default_value_t = 1.0)]
    w2: f64,
    #[arg(long, default_value_t = 1.0)]
    w3: f64,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn weights(&self) -> FitnessWeights {
        FitnessWeights {
            w1: self.w1,
            w2: self.w2,
            w3: self.w3,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = StatePreset::Initial)]
    state: StatePreset,
    /// Switch overrides such as `S1=false,S2=false`; repeatable.
    #[arg(long = "switch", value_parser = gateway::parse_switch_list)]
    switches: Vec<BTreeMap<String, bool>>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Enumerate all switch states instead of the genetic search.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = GaParams::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = GaParams::default().npop)]
    npop: usize,
    #[arg(long, default_value_t = GaParams::default().ngen)]
    ngen: usize,
    #[arg(long, default_value_t = GaParams::default().indpb)]
    indpb: f64,
    #[arg(long, default_value_t = GaParams::default().tresh)]
    tresh: f64,
    #[arg(long, default_value_t = GaParams::default().nsel)]
    nsel: usize,
    /// Do not carry the best individual into the next generation.
    #[arg(long)]
    no_elitism: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Recipe JSON file; replaces the individual flags.
    #[arg(long, conflicts_with_all = ["n", "p", "seed", "switch_pct", "or_fraction"])]
    recipe: Option<PathBuf>,
    #[arg(long, required_unless_present = "recipe")]
    n: Option<usize>,
    /// Edge probability, 1/n by default.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ascending switch fractions of the hub nodes, e.g. `0.1,0.5,0.9`.
    #[arg(long, value_delimiter = ',')]
    switch_pct: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    or_fraction: f64,
    /// Output file for a single graph.
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    /// Directory receiving one file per switch fraction.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "PLANTGRAPH_HOST", default_value = "127.0.0.1")]
    host: String,
    #[arg(long, env = "PLANTGRAPH_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "PLANTGRAPH_DATA_DIR", default_value = "plantgraph-data")]
    data_dir: PathBuf,
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| GatewayError::io("<stdin>", e))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| GatewayError::io(path, e))
    }
}

fn load_graph(arg: &GraphArg) -> Result<PlantGraph> {
    Ok(PlantGraph::load(&read_text(&arg.graph)?)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| GatewayError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn emit_report(report: &DiagnosisReport, args: &ScenarioArgs) -> Result<()> {
    let text = match args.format {
        Format::Json => gateway::report_json(report),
        Format::Text => render_report(report),
    };
    emit(&text, args.out.as_deref())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Validate(arg) => emit(&json_line(&gateway::summarize(&load_graph(&arg)?)), None),
        Command::Measures { graph, algorithm, out } => {
            let report = gateway::measures_report(&load_graph(&graph)?, algorithm.into())?;
            emit(&json_line(&report), out.as_deref())
        }
        Command::Simulate(args) => {
            let g = load_graph(&args.scenario.graph)?;
            let req = SimulateRequest {
                perturb: args.scenario.perturb.clone(),
                state: args.state,
                switches: args.switches.iter().flatten().map(|(k, v)| (k.clone(), *v)).collect(),
                weights: args.scenario.weights(),
                algorithm: args.scenario.algorithm.into(),
            };
            emit_report(&gateway::simulate(&g, &req)?, &args.scenario)
        }
        Command::Optimize(args) => {
            let g = load_graph(&args.scenario.graph)?;
            let req = OptimizeRequest {
                perturb: args.scenario.perturb.clone(),
                weights: args.scenario.weights(),
                ga: GaParams {
                    npop: args.npop,
                    ngen: args.ngen,
                    indpb: args.indpb,
                    tresh: args.tresh,
                    nsel: args.nsel,
                    seed: args.seed,
                    elitism: !args.no_elitism,
                },
                exhaustive: args.exhaustive,
                algorithm: args.scenario.algorithm.into(),
            };
            emit_report(&gateway::optimize(&g, &req)?, &args.scenario)
        }
        Command::Generate(args) => run_generate(args),
        Command::Serve(args) => {
            let addr: SocketAddr = format!("{}:{}", args.host, args.port)
                .parse()
                .map_err(|e| GatewayError::Usage(format!("bad listen address: {e}")))?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| GatewayError::io("tokio runtime", e))?;
            runtime
                .block_on(crate::server::serve(addr, &args.data_dir))
                .map_err(|e| GatewayError::io(&args.data_dir, e))
        }
    }
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let recipe = match &args.recipe {
        Some(path) => {
            serde_json::from_str::<GenerationRecipe>(&read_text(path)?).map_err(plantgraph_core::Error::from)?
        }
        None => GenerationRecipe {
            n: args.n.expect("clap enforces --n"),
            p: args.p,
            seed: args.seed,
            switch_percentages: args.switch_pct.clone(),
            or_fraction: args.or_fraction,
        },
    };
    let graphs = generate(&recipe)?;
    match (&args.out_dir, graphs.as_slice()) {
        (Some(dir), _) => {
            fs::create_dir_all(dir).map_err(|e| GatewayError::io(dir, e))?;
            let pcts: Vec<Option<f64>> = if recipe.switch_percentages.is_empty() {
                vec![None]
            } else {
                recipe.switch_percentages.iter().copied().map(Some).collect()
            };
            for (g, pct) in graphs.iter().zip(pcts) {
                let name = match pct {
                    Some(p) => format!("plant-n{}-seed{}-sw{}.json", recipe.n, recipe.seed, (p * 100.0).round()),
                    None => format!("plant-n{}-seed{}.json", recipe.n, recipe.seed),
                };
                let path = dir.join(name);
                fs::write(&path, g.save() + "\n").map_err(|e| GatewayError::io(&path, e))?;
                println!("{}", path.display());
            }
            Ok(())
        }
        (None, [g]) => emit(&(g.save() + "\n"), args.out.as_deref()),
        (None, _) => Err(GatewayError::Usage(
            "several switch fractions produce several graphs; pass --out-dir".into(),
        )),
    }
}
