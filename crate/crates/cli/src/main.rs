//! `dsec` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 property check failure,
//! 3 disconnected input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsec::report::{metrics_to_json, to_dot, ClusterReport};
use dsec::sim::{events_to_ndjson, run_simulation, MaintenanceEvent, Scenario, SimulationOptions, StepSummary};
use dsec::verify::verify_state;
use dsec::{
    build_graph, cluster, compute_metrics, deploy_random, DistanceTables, Error, Fixture, Graph64, Metrics64, Overrides,
};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "dsec", version, about = "Double-star embedded clustering for mobile ad hoc networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Form and adjust clusters once.
    Cluster(RunArgs),
    /// Cluster at t = 0, then move nodes and maintain the clusters.
    Simulate(SimArgs),
    /// Check a cluster report against its network.
    Verify(VerifyArgs),
    /// Dump per-node parameters and weights.
    Metrics(RunArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// Network given as adjacency and distance matrix.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Network deployed at random from a scenario file.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args, Debug)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    output: Output,
    /// Replaces the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Ignore weights supplied by a fixture and compute them.
    #[arg(long)]
    recompute_weights: bool,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    output: Output,
    #[arg(long)]
    seed: Option<u64>,
    /// Recompute weights at every neighbourhood refresh.
    #[arg(long)]
    recompute_weights: bool,
    /// Re-run formation at every neighbourhood refresh.
    #[arg(long)]
    force_recluster: bool,
    /// Also write the event log as one JSON object per line.
    #[arg(long)]
    events: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Cluster report produced by `cluster`.
    #[arg(long)]
    report: PathBuf,
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Property(String),
    Disconnected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Disconnected { .. } => Failure::Disconnected(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Network {
    graph: Graph64,
    tables: DistanceTables<f64>,
    metrics: Vec<Metrics64>,
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario<f64>, Failure> {
    let mut scenario = Scenario::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn load_network(input: &Input, seed: Option<u64>, recompute_weights: bool) -> Result<Network, Failure> {
    if let Some(path) = &input.fixture {
        let mut fixture = Fixture::<f64>::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        if recompute_weights {
            fixture.weight_override = None;
        }
        let ing = fixture.ingest()?;
        let metrics = compute_metrics(&ing.graph, &ing.tables, &ing.config, &ing.overrides)?;
        return Ok(Network { graph: ing.graph, tables: ing.tables, metrics });
    }
    let path = input.scenario.as_ref().expect("clap requires one input");
    let scenario = load_scenario(path, seed)?;
    let positions = deploy_random(scenario.node_count, scenario.terrain_size, scenario.seed)?;
    let graph = build_graph(&positions, scenario.range)?;
    graph.ensure_connected()?;
    let tables = DistanceTables::from_positions(&graph, &positions);
    let metrics = compute_metrics(&graph, &tables, &scenario.config(), &Overrides::default())?;
    Ok(Network { graph, tables, metrics })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_cluster(args: &RunArgs) -> Result<(), Failure> {
    let net = load_network(&args.input, args.seed, args.recompute_weights)?;
    let result = cluster(&net.graph, &net.tables.hop, &net.metrics)?;
    let text = match args.output.format {
        Format::Json => ClusterReport::from_clustering(&result).to_json()?,
        Format::Dot => to_dot(result.final_state(), &net.graph),
    };
    emit(args.output.out.as_deref(), &text)
}

fn run_metrics(args: &RunArgs) -> Result<(), Failure> {
    if args.output.format == Format::Dot {
        return Err(Failure::Usage("metrics are only available as json".into()));
    }
    let net = load_network(&args.input, args.seed, args.recompute_weights)?;
    emit(args.output.out.as_deref(), &metrics_to_json(&net.metrics)?)
}

#[derive(Serialize)]
struct SimulationReport {
    #[serde(flatten)]
    report: ClusterReport<MaintenanceEvent>,
    steps: Vec<StepSummary>,
}

fn run_simulate(args: &SimArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario, args.seed)?;
    let options =
        SimulationOptions { recompute_weights: args.recompute_weights, force_recluster: args.force_recluster };
    let outcome = run_simulation(&scenario, options)?;
    if let Some(path) = &args.events {
        emit(Some(path), &events_to_ndjson(&outcome.events)?)?;
    }
    let text = match args.output.format {
        Format::Json => {
            let report = SimulationReport {
                report: ClusterReport::with_events(&outcome.state, None, outcome.events.clone()),
                steps: outcome.summaries.clone(),
            };
            serde_json::to_string_pretty(&report)? + "\n"
        }
        Format::Dot => to_dot(&outcome.state, &outcome.graph),
    };
    emit(args.output.out.as_deref(), &text)?;
    match outcome.summaries.iter().find(|s| !s.partition_ok || !s.dominance_ok) {
        Some(s) => Err(Failure::Property(format!("maintenance checks failed at step {}", s.step))),
        None => Ok(()),
    }
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let text =
        std::fs::read_to_string(&args.report).map_err(|e| Failure::Usage(format!("{}: {e}", args.report.display())))?;
    let report: ClusterReport<serde_json::Value> =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", args.report.display())))?;
    let state = report.to_state()?;
    let net = load_network(&args.input, args.seed, false)?;
    if state.node_count != net.graph.node_count() {
        return Err(Failure::Usage(format!(
            "report covers {} nodes, network has {}",
            state.node_count,
            net.graph.node_count()
        )));
    }
    let checked = verify_state(&state, &net.graph, &net.tables.hop, report.classification)?;
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&checked)? + "\n"))?;
    if checked.passed() {
        Ok(())
    } else {
        let names: Vec<String> = checked.failures().map(|e| format!("{:?}", e.property)).collect();
        Err(Failure::Property(format!("failed: {}", names.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Cluster(a) => run_cluster(a),
        Command::Metrics(a) => run_metrics(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Property(msg)) => {
            eprintln!("property check failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Disconnected(msg)) => {
            eprintln!("refused: {msg}");
            ExitCode::from(3)
        }
    }
}
