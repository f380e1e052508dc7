mod config;
mod run;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Mode, Overrides, ScenarioConfig};
use icausal::acceptance::{run_suite, Settings};
use run::{run_scenario, RunError};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Indefinite-causal-order protocols and their spacetime realizations.
#[derive(Parser, Debug)]
#[command(name = "icausal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Teleport a register from Alice to Bob.
    Teleport(RunArgs),
    /// Teleport a register from Bob back to Alice.
    Backteleport(RunArgs),
    /// Apply a channel across the parties by teleporting there and back.
    Channel(RunArgs),
    /// Entangle two product states with a two-order strategy.
    Entangle(RunArgs),
    /// Identify a shared Bell state.
    Bell(RunArgs),
    /// Distill an ebit from the four-party bound entangled state.
    Smolin(RunArgs),
    /// Reduce a nonlocality-without-entanglement set to a bipartite one.
    Nlwe(RunArgs),
    /// Search for a correction table.
    Search(RunArgs),
    /// Validate mass placements that realize every causal order.
    Spacetime(RunArgs),
    /// Run whichever protocol the config file names.
    Run(RunArgs),
    /// Run the acceptance suite and print a pass/fail table.
    Accept {
        /// Only run criteria whose name starts with this prefix.
        filter: Option<String>,
        /// Also write the results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON scenario config; `-` reads stdin.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Number of causal orders.
    #[arg(long)]
    m: Option<usize>,
    /// Named input such as random, B1..B4, smolin, nlwe-default, swap.
    #[arg(long)]
    preset: Option<String>,
    /// Input state (or corpus, for nlwe) JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Dimension of the factor that stays behind, for random inputs.
    #[arg(long)]
    dim: Option<usize>,
    /// Kraus channel JSON file, for the channel protocol.
    #[arg(long)]
    channel: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn tolerance() -> Result<f64, String> {
    match std::env::var("ICAUSAL_TOL") {
        Err(_) => Ok(icausal::ASSERT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(format!("ICAUSAL_TOL must be a positive number, got '{s}'")),
        },
    }
}

fn dispatch(command: Command) -> Result<u8, String> {
    let tol = tolerance()?;
    let (protocol, args) = match command {
        Command::Accept { filter, out } => return accept(filter.as_deref(), out.as_deref(), tol),
        Command::Teleport(a) => (Some("teleport"), a),
        Command::Backteleport(a) => (Some("backteleport"), a),
        Command::Channel(a) => (Some("channel"), a),
        Command::Entangle(a) => (Some("entangle"), a),
        Command::Bell(a) => (Some("bell"), a),
        Command::Smolin(a) => (Some("smolin"), a),
        Command::Nlwe(a) => (Some("nlwe"), a),
        Command::Search(a) => (Some("search"), a),
        Command::Spacetime(a) => (Some("spacetime"), a),
        Command::Run(a) => (None, a),
    };
    let start = Instant::now();
    let base = match &args.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    let protocol = match protocol.map(str::to_string).or_else(|| base.protocol.clone()) {
        Some(p) => p,
        None => return Err("the config does not name a protocol".into()),
    };
    let overrides = Overrides {
        seed: args.seed,
        mode: args.mode,
        m: args.m,
        dim: args.dim,
        preset: args.preset,
        input: args.input,
        channel: args.channel,
    };
    let cfg = base.merge(&protocol, overrides)?;
    let outcome = run_scenario(&cfg, tol, || start.elapsed().as_secs_f64() * 1e3).map_err(|e| match e {
        RunError::Config(s) => s,
    })?;
    let mut text = serde_json::to_string_pretty(&outcome.report).map_err(|e| e.to_string())?;
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    Ok(if outcome.passed { 0 } else { EXIT_FAIL })
}

fn load_config(path: &Path) -> Result<ScenarioConfig, String> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
    };
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| format!("stdout: {e}")),
    }
}

fn accept(filter: Option<&str>, out: Option<&Path>, tol: f64) -> Result<u8, String> {
    let settings = Settings { tol, ..Settings::default() };
    let results = run_suite(filter, &settings);
    if results.is_empty() {
        return Err(format!("no acceptance criterion matches '{}'", filter.unwrap_or_default()));
    }
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&results).map_err(|e| e.to_string())? + "\n";
        emit(Some(path), &text)?;
    }
    Ok(if failed == 0 { 0 } else { EXIT_FAIL })
}
