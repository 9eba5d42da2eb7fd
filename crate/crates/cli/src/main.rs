//! `optomech` command-line runner. Each subcommand reads a flat key-value
//! config file and writes a CSV (or JSON) table with a metadata header.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::Config;
use error::CliError;
use output::Report;

#[derive(Parser)]
#[command(name = "optomech", version, about = "Collective optomechanics of scatterer arrays in a cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (flat TOML key = value pairs); defaults apply when omitted
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Master seed, overrides the config value
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Free-space reflection of the array versus spacing
    Superscatterer,
    /// Cavity transmission while the array moves along its sinusoidal mode
    Spectrum,
    /// Per-element and collective couplings, linewidth, cooperativity
    Coupling,
    /// Couplings and cooperativity versus element count
    Scaling,
    /// Coupling spread under random fabrication errors
    Montecarlo,
    /// Absorption of an array of lossy elements versus spacing
    Absorption,
    /// Optimal element count versus element reflectivity
    Nopt,
    /// Dielectric plate as a scatterer
    Plate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Superscatterer => "superscatterer",
            Command::Spectrum => "spectrum",
            Command::Coupling => "coupling",
            Command::Scaling => "scaling",
            Command::Montecarlo => "montecarlo",
            Command::Absorption => "absorption",
            Command::Nopt => "nopt",
            Command::Plate => "plate",
        }
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config { line: None, message: format!("--threads: {e}") })?;
    }
    let cfg = match &cli.config {
        Some(path) => Config::parse(&std::fs::read_to_string(path)?)?,
        None => Config::empty(),
    };
    let name = cli.command.name();
    cfg.check_experiment(name)?;
    let mut report = match cli.command {
        Command::Superscatterer => commands::superscatterer(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Coupling => commands::coupling(&cfg),
        Command::Scaling => commands::scaling(&cfg),
        Command::Montecarlo => commands::montecarlo(&cfg, cli.seed),
        Command::Absorption => commands::absorption(&cfg),
        Command::Nopt => commands::nopt(&cfg),
        Command::Plate => commands::plate(&cfg),
    }?;
    let mut header = vec![
        ("tool".to_string(), format!("optomech {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), name.to_string()),
        ("config_sha256".to_string(), cfg.hash()),
    ];
    header.extend(cfg.resolved().into_iter().map(|(k, v)| (format!("config.{k}"), v)));
    report.header = header;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("optomech: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = match cli.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("optomech: {e}");
        return ExitCode::from(1);
    }
    for w in &report.warnings {
        eprintln!("optomech: warning: {w}");
    }
    if report.warnings.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
