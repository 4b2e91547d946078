use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use vhda::ahp::{derive_weights, ComparisonMatrix, CONSISTENCY_LIMIT};
use vhda::ga::{run_ga, SearchBox};
use vhda::initiation::{
    evaluate_initiation, HandoffDirection, InitiationInputs, DEFAULT_THRESHOLD,
};
use vhda::pipeline::{network_seed, run_pipeline, PipelineError, PipelineOptions};
use vhda::scenario::{load_scenario, ScenarioError};
use vhda::trace::{emit_trace, TraceFormat};

#[derive(Parser)]
#[command(
    name = "vhda",
    version,
    about = "Vertical handoff decisions for cellular/WiMAX networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every trigger of a scenario and emit the decision trace.
    Decide {
        scenario: PathBuf,
        #[arg(long, env = "VHDA_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value = "jsonl")]
        format: TraceFormat,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock timings (makes output non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Evaluate the initiation FIS for one set of measurements.
    FisEval {
        #[arg(long, allow_hyphen_values = true)]
        rssi: f64,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        coverage: f64,
        #[arg(long)]
        latency: f64,
        #[arg(long, default_value = "umts-to-wimax")]
        direction: HandoffDirection,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Derive weights from a pairwise comparison matrix (JSON).
    Weights {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Optimize one network's memberships with the GA.
    Ga {
        #[arg(long)]
        network: String,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, env = "VHDA_SEED")]
        seed: Option<u64>,
    },
}

enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => Failure::Runtime(e.into()),
            _ => Failure::Validation(e.into()),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Scenario(s) => s.into(),
            PipelineError::Initiation(vhda::initiation::InitiationError::InvalidThreshold(_)) => {
                Failure::Validation(e.into())
            }
            other => Failure::Runtime(other.into()),
        }
    }
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn open_sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(runtime)?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(runtime)?;
    writeln!(out).map_err(runtime)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Decide {
            scenario,
            seed,
            threshold,
            format,
            out,
            timings,
        } => {
            let config = load_scenario(&scenario)?;
            let options = PipelineOptions {
                seed,
                threshold,
                record_timings: timings,
            };
            let trace = run_pipeline(&config, &options)?;
            let mut sink = open_sink(out.as_ref())?;
            emit_trace(&trace, format, &mut sink).map_err(runtime)?;
        }
        Command::FisEval {
            rssi,
            rate,
            coverage,
            latency,
            direction,
            threshold,
        } => {
            let inputs = InitiationInputs::new(rssi, rate, coverage, latency);
            if !inputs.is_finite() {
                return Err(Failure::Validation(anyhow!("measurements must be finite")));
            }
            let d = evaluate_initiation(&inputs, direction, threshold)
                .map_err(|e| Failure::Validation(e.into()))?;
            print_json(&serde_json::json!({
                "direction": direction,
                "inputs": inputs,
                "factor": d.factor,
                "threshold": d.threshold,
                "initiate": d.initiate,
            }))?;
        }
        Command::Weights { matrix } => {
            let text = std::fs::read_to_string(&matrix)
                .with_context(|| format!("cannot read {}", matrix.display()))
                .map_err(runtime)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Failure::Validation(e.into()))?;
            let rows = value.get("matrix").cloned().unwrap_or(value);
            let b: ComparisonMatrix =
                serde_json::from_value(rows).map_err(|e| Failure::Validation(e.into()))?;
            let (w, eig) = derive_weights(&b).map_err(|e| match e {
                vhda::ahp::AhpError::Convergence { .. } => runtime(e),
                _ => Failure::Validation(e.into()),
            })?;
            if !eig.is_consistent() {
                eprintln!(
                    "warning: consistency ratio {:.4} exceeds {CONSISTENCY_LIMIT}; judgments may need revision",
                    eig.consistency_ratio
                );
            }
            print_json(&serde_json::json!({
                "weights": w,
                "lambda_max": eig.lambda_max,
                "consistency_ratio": eig.consistency_ratio,
                "iterations": eig.iterations,
            }))?;
        }
        Command::Ga {
            network,
            scenario,
            seed,
        } => {
            let config = load_scenario(&scenario)?;
            let profile = config
                .profile(&network)
                .ok_or_else(|| Failure::Validation(anyhow!("unknown network '{network}'")))??;
            let bounds = profile.bounds.as_ref().ok_or_else(|| {
                Failure::Validation(anyhow!("network '{network}' has no membership bounds"))
            })?;
            let weights = vhda::scenario::resolve_weights(&config.weights)?.weights;
            let index = config.network_index(&network).expect("profile exists");
            let seed = network_seed(seed.unwrap_or(config.ga.rng_seed), index);
            let res = run_ga(
                &weights,
                &SearchBox::from(bounds),
                &config.ga.clone().with_seed(seed),
            )
            .map_err(runtime)?;
            print_json(&serde_json::json!({
                "network": network,
                "seed": seed,
                "best_fitness": res.best_fitness,
                "memberships": res.best,
                "generations_run": res.generations_run,
                "converged_at": res.converged_at,
            }))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
