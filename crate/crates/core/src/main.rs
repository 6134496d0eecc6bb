//! Thin command-line front-end over the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use srrls::config::{self, CaseKind, ExperimentConfig};
use srrls::harness;
use srrls::Variant;

#[derive(Parser)]
#[command(
    name = "srrls",
    about = "Sparse robust RLS system identification: seeded Monte-Carlo NMSD experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded Monte-Carlo experiment and write nmsd.csv, the
    /// resolved configuration, and a plot script.
    Run {
        /// Configuration file (see the README for the format).
        #[arg(long, conflicts_with = "case")]
        config: Option<PathBuf>,
        /// Start from a built-in preset instead of a file.
        #[arg(long, value_parser = parse_case)]
        case: Option<CaseKind>,
        /// Override the number of independent runs.
        #[arg(long)]
        runs: Option<usize>,
        /// Override the number of iterations per run.
        #[arg(long)]
        iterations: Option<usize>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated algorithm labels to keep (default: all configured).
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<String>>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available algorithm variants.
    ListAlgorithms,
    /// Parse and validate a configuration file, printing the resolved form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_case(s: &str) -> Result<CaseKind, String> {
    CaseKind::parse(s).ok_or_else(|| format!("unknown case `{s}` (use 1, 2, or custom)"))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> srrls::Result<()> {
    match cli.command {
        Command::Run {
            config,
            case,
            runs,
            iterations,
            seed,
            algorithms,
            out,
        } => {
            let mut cfg = match (&config, case) {
                (Some(path), _) => config::load_config(path)?,
                (None, Some(kind)) => ExperimentConfig::preset(kind),
                (None, None) => {
                    return Err(srrls::Error::Config(
                        "pass either --config PATH or --case {1,2,custom}".into(),
                    ))
                }
            };
            if let Some(r) = runs {
                cfg.runs = r;
            }
            if let Some(n) = iterations {
                cfg.iterations = n;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(labels) = algorithms {
                cfg.select_algorithms(&labels)?;
            }
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            cfg.validate()?;

            eprintln!(
                "running {} x {} iterations, {} algorithm(s), seed {}",
                cfg.runs,
                cfg.iterations,
                cfg.algorithms.len(),
                cfg.seed
            );
            let started = std::time::Instant::now();
            let curves = harness::run_experiment(&cfg)?;
            let output_dir = cfg.output_dir.clone();
            harness::emit_outputs(&curves, &cfg, &output_dir)?;

            println!("final NMSD after {} iterations:", cfg.iterations);
            for curve in &curves {
                println!(
                    "  {:<14} {:>9.2} dB",
                    curve.label,
                    curve.values.last().copied().unwrap_or(f64::NAN)
                );
            }
            println!(
                "outputs in {} (nmsd.csv, config_resolved, plot_nmsd.py) [{:.1}s]",
                output_dir.display(),
                started.elapsed().as_secs_f64()
            );
            Ok(())
        }
        Command::ListAlgorithms => {
            for v in Variant::ALL {
                println!("{:<14} {}", v.label(), describe(v));
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = config::load_config(&config)?;
            cfg.validate()?;
            print!("{}", config::format_config(&cfg));
            eprintln!("ok: {} is valid", config.display());
            Ok(())
        }
    }
}

fn describe(v: Variant) -> &'static str {
    match v {
        Variant::Rls => "exponentially weighted recursive least squares",
        Variant::SRls => "RLS with a fixed-weight log-penalty shrinkage step",
        Variant::Rlm => "robust RLS: impulses gated out by the clipping M-estimator",
        Variant::SRrls => "robust RLS plus the fixed-weight shrinkage step",
        Variant::SRrlsOpt => "robust sparse RLS with the online-adapted sparsity weight",
        Variant::SRrlsOptRs => "adaptive-weight variant plus covariance reset on system changes",
        Variant::JoSRrls => "jointly adapted sparsity weight and forgetting factor",
    }
}
