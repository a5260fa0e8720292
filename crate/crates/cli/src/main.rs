//! `prefweights`: survey-based objective weights and the parking-route GA.
//!
//! Failures print one line, `error[<code>]: <message>`, and exit nonzero.

mod commands;
mod survey;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{CountsSource, FitArgs, GaArgs, Method, OptimizeArgs};

#[derive(Parser, Debug)]
#[command(
    name = "prefweights",
    version,
    about = "Frequentist and empirical-Bayes weights for weighted-sum optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Survey file utilities.
    #[command(subcommand)]
    Survey(SurveyCommand),
    /// Estimate weights from vote counts.
    Estimate {
        #[command(flatten)]
        source: CountsSource,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        fit: FitArgs,
        /// Also write the result as JSON (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Estimator comparison table for a CSV of count rows (header n1..nl).
    Compare {
        input: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Monte-Carlo gain curve under known true weights.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        true_weights: String,
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = prefweights::simulation::DEFAULT_REPLICATIONS)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "gain_curve.csv")]
        out: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Route optimization with the genetic algorithm.
    Optimize {
        /// Graph document; the bundled demo graph when omitted.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Comma-separated time slots; all slots when omitted.
        #[arg(long)]
        slot: Option<String>,
        #[command(flatten)]
        source: CountsSource,
        /// Use these weights directly instead of estimating them.
        #[arg(long, conflicts_with_all = ["counts", "survey"], allow_hyphen_values = true)]
        weights: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        weighting: Method,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SurveyCommand {
    /// Count votes per category.
    Ingest {
        path: PathBuf,
        /// Category order; unknown categories become errors.
        #[arg(long)]
        categories: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Survey(SurveyCommand::Ingest { path, categories, json }) => {
            commands::survey_ingest(&path, categories.as_deref(), json)
        }
        Command::Estimate {
            source,
            method,
            fit,
            json,
        } => commands::estimate(&source, method, &fit, json.as_deref()),
        Command::Compare { input, out, fit } => {
            let file = File::open(&input).with_context(|| format!("cannot open {}", input.display()))?;
            let config = fit.config()?;
            let mut stderr = io::stderr();
            let bad = match out {
                Some(path) => {
                    let w = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
                    commands::compare(file, w, &config, &mut stderr)?
                }
                None => commands::compare(file, io::stdout().lock(), &config, &mut stderr)?,
            };
            if bad > 0 {
                writeln!(stderr, "skipped {bad} malformed row(s)")?;
            }
            Ok(())
        }
        Command::Simulate {
            true_weights,
            sizes,
            reps,
            seed,
            out,
            fit,
        } => commands::simulate(&true_weights, &sizes, reps, seed, &fit, &out),
        Command::Optimize {
            graph,
            slot,
            source,
            weights,
            weighting,
            ga,
            fit,
            out_dir,
        } => commands::optimize(OptimizeArgs {
            graph: graph.as_deref(),
            slots: slot.as_deref(),
            source: &source,
            weights: weights.as_deref(),
            weighting,
            ga: &ga,
            fit: &fit,
            out_dir: &out_dir,
        }),
    }
}

fn error_code(err: &anyhow::Error) -> &'static str {
    use prefweights::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::GraphParse { .. } | E::Graph(_) => "graph",
                E::Unreachable(_) => "unreachable",
                E::InvalidConfig(_) | E::SlotOutOfRange { .. } => "config",
                E::Io(_) => "io",
                E::Csv(_) => "csv",
                _ => "input",
            };
        }
        if cause.downcast_ref::<survey::SurveyError>().is_some() {
            return "survey";
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return "io";
        }
        if cause.downcast_ref::<csv::Error>().is_some() {
            return "csv";
        }
    }
    "input"
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[usage]: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", error_code(&e), one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
