//! `hardylab`: command-line front end for the laboratory.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::config::Settings;
use crate::error::{bad, CliResult, EXIT_BAD_INPUT, EXIT_CHECK_FAILED, EXIT_PASS};
use crate::output::Sinks;

/// Numerical laboratory for sharp Gaussian decay of magnetic Schrödinger evolutions.
///
/// Exit codes: 0 pass, 1 check failed, 2 bad input, 3 iteration budget exceeded.
#[derive(Debug, Parser)]
#[command(name = "hardylab", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write the CSV table to this path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// What to print on stdout: `json` (default) or `csv`.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Finite-difference residual and critical norms of the explicit example.
    VerifyExample(commands::verify::VerifyArgs),
    /// Run the weight-profile iteration from a ≡ μ.
    Iterate(commands::iterate::IterateArgs),
    /// Verdict and sharp weight profile for decay rates α, β.
    Hardy(commands::hardy::HardyArgs),
    /// Crank–Nicolson evolution and weighted-norm trace H(t).
    Evolve(commands::evolve::EvolveArgs),
    /// `evolve` plus log-convexity and interpolation-bound checks.
    Convexity(commands::evolve::ConvexityArgs),
    /// Crönstrom gauge transform of a preset vector potential.
    GaugeCheck(commands::gauge::GaugeArgs),
    /// Appell transform identities on closed-form Gaussian data.
    AppellCheck(commands::appell::AppellArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyExample(_) => "verify-example",
            Command::Iterate(_) => "iterate",
            Command::Hardy(_) => "hardy",
            Command::Evolve(_) => "evolve",
            Command::Convexity(_) => "convexity",
            Command::GaugeCheck(_) => "gauge-check",
            Command::AppellCheck(_) => "appell-check",
        }
    }
}

/// Config keys accepted by a subcommand: its own flags plus the output options.
fn allowed_keys(subcommand: &str) -> Vec<String> {
    let cli = Cli::command();
    let sub = cli.find_subcommand(subcommand).expect("registered subcommand");
    let mut keys: Vec<String> = sub
        .get_arguments()
        .map(|a| a.get_id().as_str().to_string())
        .filter(|k| !matches!(k.as_str(), "help" | "version" | "config"))
        .chain(["command", "json", "csv", "format"].map(String::from))
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("HARDYLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| bad(format!("HARDYLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| bad(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<bool> {
    configure_threads()?;
    let name = cli.command.name();
    let settings = Settings::load(cli.global.config.as_deref(), &allowed_keys(name))?;
    if let Some(cmd) = settings.opt::<String>("command", None)? {
        if cmd != name {
            return Err(bad(format!("config is for {cmd:?}, but {name:?} was invoked")));
        }
    }
    let format = settings.get("format", cli.global.format.clone(), "json".to_string())?;
    let csv_to_stdout = match format.as_str() {
        "json" => false,
        "csv" => true,
        other => return Err(bad(format!("unknown format {other:?}; expected json or csv"))),
    };
    let sinks = Sinks {
        json: settings.opt("json", cli.global.json.clone())?,
        csv: settings.opt("csv", cli.global.csv.clone())?,
        csv_to_stdout,
    };
    match &cli.command {
        Command::VerifyExample(a) => commands::verify::run(&settings, a, &sinks),
        Command::Iterate(a) => commands::iterate::run(&settings, a, &sinks),
        Command::Hardy(a) => commands::hardy::run(&settings, a, &sinks),
        Command::Evolve(a) => commands::evolve::run_evolve(&settings, a, &sinks),
        Command::Convexity(a) => commands::evolve::run_convexity(&settings, a, &sinks),
        Command::GaugeCheck(a) => commands::gauge::run(&settings, a, &sinks),
        Command::AppellCheck(a) => commands::appell::run(&settings, a, &sinks),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::from(EXIT_PASS),
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
