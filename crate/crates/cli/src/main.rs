//! Batch experiment driver: load sweeps under the ideal and path-loss
//! channels, asymptotic sweeps and capacity searches, bound tables,
//! parameter optimization, and the path-loss discretization, all driven by
//! TOML experiment files and emitting CSV/JSON for external plotting.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use irsa_core::analytic;
use irsa_core::bounds;
use irsa_core::de::{self, DEParameters};
use irsa_core::optimizer::{self, OptimizationProblem, OptimizerSettings};
use irsa_core::pathloss;
use irsa_core::{monte_carlo, Channel, PowerModel};

use config::{validate, CommandKind, ExperimentSpec};
use output::{de_sweep_csv, sweep_csv, trace_csv, write_atomic, SweepRow};

/// Configuration failures exit with 1, runtime failures with 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "irsa", about = "Random-access protocol simulator and analyzer", version)]
struct Cli {
    /// Worker threads for Monte-Carlo trials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Output path (overrides the file's `output`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Random seed (overrides the file's `seed`).
    #[arg(long)]
    seed: Option<u64>,

    /// Trials per load point (overrides the file's `trials`).
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo throughput sweep under the ideal channel.
    Simulate(CommonArgs),
    /// Asymptotic (density-evolution) throughput sweep.
    DeSweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Also dump the (iteration, p, q) trace at this load.
        #[arg(long)]
        trace_g: Option<f64>,
        /// Where to write the trace (default: <out>.trace.csv).
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Cap capture at the configured gap factor k instead of the
        /// large-gap idealization.
        #[arg(long)]
        exact_gap: bool,
    },
    /// Largest lossless load of the configured system.
    Capacity {
        #[command(flatten)]
        common: CommonArgs,
        /// Replace the power-choice distribution with {delta, 1-delta}.
        #[arg(long)]
        delta: Option<f64>,
        /// Upper end of the load search.
        #[arg(long, default_value_t = 4.0)]
        g_max: f64,
    },
    /// Throughput upper bounds for the configured repetition distribution.
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
        /// High-power probability for the two-level bounds (default:
        /// power_probs[0]).
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Monte-Carlo sweep under the path-loss channel.
    Pathloss(CommonArgs),
    /// Discretize the configured path-loss channel into power levels.
    Discretize(CommonArgs),
    /// Closed-form slotted-ALOHA throughput.
    SaAnalytic {
        /// Load (users per slot).
        #[arg(long)]
        g: f64,
        /// High-power probability (two levels).
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated power-choice probabilities (n levels).
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
    /// Search (lambda, delta, g) for the highest lossless load.
    Optimize {
        /// Maximum repetition degree; the support is 2..=deg.
        #[arg(long, default_value_t = 8)]
        deg: u32,
        /// Explicit degree support (overrides --deg).
        #[arg(long, value_delimiter = ',')]
        support: Option<Vec<u32>>,
        /// Number of power levels.
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Pin the power-choice distribution to {delta, 1-delta}.
        #[arg(long)]
        fix_delta: Option<f64>,
        /// Pin the edge-perspective coefficients (comma separated, aligned
        /// with the support).
        #[arg(long, value_delimiter = ',')]
        fix_lambda: Option<Vec<f64>>,
        /// Population size.
        #[arg(long, default_value_t = 50)]
        pop: usize,
        /// Generations.
        #[arg(long, default_value_t = 300)]
        gens: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the result JSON here (also printed to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("runtime error: building thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Runtime(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn load_spec(common: &CommonArgs, expect: CommandKind) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::config(format!("reading {}: {e}", common.config.display())))?;
    let mut spec = validate(&text)?;
    if let Some(cmd) = spec.command {
        if cmd != expect {
            return Err(CliError::config(format!(
                "config declares command `{}` but `{}` was invoked",
                cmd.name(),
                expect.name()
            )));
        }
    }
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    if let Some(trials) = common.trials {
        spec.trials = trials;
    }
    if common.out.is_some() {
        spec.output = common.out.clone();
    }
    Ok(spec)
}

fn output_path(spec: &ExperimentSpec) -> Result<&Path, CliError> {
    spec.output
        .as_deref()
        .ok_or_else(|| CliError::config("no output path: set `output` or pass --out".to_string()))
}

fn mc_sweep(spec: &ExperimentSpec, channel: &Channel) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut peak = (0.0f64, f64::NEG_INFINITY);
    for g in spec.loads() {
        let est = monte_carlo(&spec.config.with_load(g), spec.trials, spec.seed, channel)
            .map_err(|e| CliError::runtime(e.to_string()))?;
        if est.mean_throughput > peak.1 {
            peak = (g, est.mean_throughput);
        }
        rows.push(SweepRow {
            g,
            throughput_mean: est.mean_throughput,
            throughput_stderr: est.std_error,
            packet_loss_mean: est.mean_packet_loss,
            trials: est.trials,
            seed: est.seed,
        });
    }
    write_atomic(output_path(spec)?, &sweep_csv(&rows))?;
    println!("peak throughput {:.4} at g={:.4}", peak.1, peak.0);
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(common) => {
            let spec = load_spec(&common, CommandKind::Simulate)?;
            mc_sweep(&spec, &Channel::Ideal)
        }

        Command::Pathloss(common) => {
            let spec = load_spec(&common, CommandKind::Pathloss)?;
            let pl = spec
                .pathloss
                .clone()
                .ok_or_else(|| CliError::config("pathloss section required".to_string()))?;
            mc_sweep(&spec, &Channel::PathLoss(pl))
        }

        Command::DeSweep {
            common,
            trace_g,
            trace_out,
            exact_gap,
        } => {
            let spec = load_spec(&common, CommandKind::DeSweep)?;
            let params_at = |g: f64| {
                let mut p = DEParameters::new(g, &spec.config.repetition, spec.config.power.clone());
                p.exact_gap = exact_gap;
                p
            };
            let mut rows = Vec::new();
            let mut peak = (0.0f64, f64::NEG_INFINITY);
            for g in spec.loads() {
                let params = params_at(g);
                let out = de::run_de(&params, de::DEFAULT_MAX_ITER, de::DEFAULT_EPS)
                    .map_err(|e| CliError::runtime(e.to_string()))?;
                let loss = params
                    .node_distribution()
                    .eval(out.p_inf.clamp(0.0, 1.0))
                    .map_err(|e| CliError::runtime(e.to_string()))?;
                let t = g * (1.0 - loss);
                if t > peak.1 {
                    peak = (g, t);
                }
                rows.push((g, t, loss, out.p_inf, out.converged));
            }
            write_atomic(output_path(&spec)?, &de_sweep_csv(&rows))?;
            println!("peak asymptotic throughput {:.4} at g={:.4}", peak.1, peak.0);
            if let Some(g) = trace_g {
                let out = de::run_de(&params_at(g), de::DEFAULT_MAX_ITER, de::DEFAULT_EPS)
                    .map_err(|e| CliError::runtime(e.to_string()))?;
                let path = match trace_out {
                    Some(p) => p,
                    None => output_path(&spec)?.with_extension("trace.csv"),
                };
                write_atomic(&path, &trace_csv(&out.trace))?;
            }
            Ok(())
        }

        Command::Capacity {
            common,
            delta,
            g_max,
        } => {
            let spec = load_spec(&common, CommandKind::Capacity)?;
            let power = match delta {
                Some(d) => PowerModel::new(
                    vec![spec.config.power.gap_factor() as f64 * spec.config.power.beta(), 1.0],
                    vec![d, 1.0 - d],
                    spec.config.power.beta(),
                    spec.config.power.gap_factor(),
                )
                .map_err(|e| CliError::config(e.to_string()))?,
                None => spec.config.power.clone(),
            };
            let cap = de::capacity(&power, &spec.config.repetition, g_max)
                .map_err(|e| CliError::runtime(e.to_string()))?;
            println!("capacity {cap:.4}");
            if let Some(path) = &spec.output {
                write_atomic(path, &format!("{}\n", json!({ "capacity": cap })))?;
            }
            Ok(())
        }

        Command::Bounds { common, delta } => {
            let spec = load_spec(&common, CommandKind::Bounds)?;
            let delta = delta.unwrap_or_else(|| spec.config.power.probs()[0]);
            let report = bounds::bound_report(&spec.config.repetition, delta)
                .map_err(|e| CliError::runtime(e.to_string()))?;
            let text = format!("{}\n{}\n", bounds::BoundReport::csv_header(), report.csv_row());
            print!("{text}");
            if let Some(path) = &spec.output {
                write_atomic(path, &text)?;
            }
            println!(
                "T*={:.4} <= UB2={:.4} <= UB1={:.4}; UB3={:.4}; RI={:.4}",
                report.t_star, report.ub2, report.ub1, report.ub3, report.rate_independent
            );
            Ok(())
        }

        Command::Discretize(common) => {
            let spec = load_spec(&common, CommandKind::Discretize)?;
            let pl = spec
                .pathloss
                .clone()
                .ok_or_else(|| CliError::config("pathloss section required".to_string()))?;
            let disc = pathloss::discretize(&pl, spec.config.power.gap_factor(), spec.config.power.beta())
                .map_err(|e| CliError::config(e.to_string()))?;
            let doc = json!({
                "n": disc.n,
                "levels": disc.levels,
                "delta": disc.delta,
                "distances": disc.distances,
            });
            let text = format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"));
            print!("{text}");
            if let Some(path) = &spec.output {
                write_atomic(path, &text)?;
            }
            Ok(())
        }

        Command::SaAnalytic { g, delta, deltas } => {
            if g < 0.0 {
                return Err(CliError::config(format!("load must be >= 0, got {g}")));
            }
            let result = match (delta, deltas) {
                (Some(_), Some(_)) => {
                    return Err(CliError::config("give either --delta or --deltas".to_string()))
                }
                (Some(d), None) => {
                    if !(0.0..=1.0).contains(&d) {
                        return Err(CliError::config(format!("delta must be in [0,1], got {d}")));
                    }
                    analytic::sa_dpc_throughput(g, d)
                }
                (None, Some(ds)) => analytic::sa_npc_throughput(g, &ds)
                    .map_err(|e| CliError::config(e.to_string()))?,
                (None, None) => analytic::SAResult {
                    throughput: analytic::sa_throughput(g),
                    components: vec![analytic::sa_throughput(g)],
                },
            };
            let comps: Vec<String> = result.components.iter().map(|c| format!("{c:.4}")).collect();
            println!(
                "throughput {:.4} (per-level: {})",
                result.throughput,
                comps.join(", ")
            );
            Ok(())
        }

        Command::Optimize {
            deg,
            support,
            levels,
            fix_delta,
            fix_lambda,
            pop,
            gens,
            seed,
            out,
        } => {
            let support = support.unwrap_or_else(|| (2..=deg).collect());
            if levels < 1 {
                return Err(CliError::config("need at least one power level".to_string()));
            }
            let level_ratios: Vec<f64> = (0..levels)
                .map(|i| 10f64.powi((levels - 1 - i) as i32))
                .collect();
            let placeholder = vec![1.0 / levels as f64; levels];
            let power = PowerModel::new(level_ratios, placeholder, 2.0, 5)
                .map_err(|e| CliError::config(e.to_string()))?;
            let mut problem = OptimizationProblem::new(support.clone(), power)
                .map_err(|e| CliError::config(e.to_string()))?;
            if let Some(d) = fix_delta {
                if levels != 2 {
                    return Err(CliError::config("--fix-delta expects --levels 2".to_string()));
                }
                problem.fix_delta = Some(vec![d, 1.0 - d]);
            }
            problem.fix_lambda = fix_lambda;
            let settings = OptimizerSettings {
                population: pop,
                generations: gens,
                seed,
                ..Default::default()
            };
            let result = optimizer::optimize(&problem, &settings)
                .map_err(|e| CliError::config(e.to_string()))?;
            let node: Vec<(u32, f64)> = match result.edge_distribution(&problem) {
                Ok(edge) => edge
                    .node_perspective()
                    .coefficients()
                    .iter()
                    .map(|(l, p)| (*l, *p))
                    .collect(),
                Err(_) => Vec::new(),
            };
            let doc = json!({
                "best_g": result.best_g,
                "lambda_edge": support.iter().zip(&result.best_lambda)
                    .map(|(l, p)| json!({"degree": l, "prob": p})).collect::<Vec<_>>(),
                "lambda_node": node.iter()
                    .map(|(l, p)| json!({"degree": l, "prob": p})).collect::<Vec<_>>(),
                "delta": result.best_delta,
                "feasible": result.feasible,
            });
            let text = format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"));
            print!("{text}");
            if let Some(path) = &out {
                write_atomic(path, &text)?;
            }
            println!(
                "best feasible load {:.4} (feasible: {})",
                result.best_g, result.feasible
            );
            Ok(())
        }
    }
}
