use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smd::commands::{cmd_compare, cmd_evaluate, cmd_generate, parse_methods};
use smd::{load_config, CliError};

#[derive(Parser)]
#[command(name = "smd", version, about = "Sliced space-filling designs for mixture experiments")]
struct Cli {
    /// Overrides `solver.seed` from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a design and write its CSV and report.
    Generate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compute uniformity metrics of an existing design CSV.
    Evaluate {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare constructions over replicates.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated: MHED, SeqHED, SeqM, ComM, ParM, RandParM, RandomUniform.
        #[arg(long)]
        methods: String,
        #[arg(long)]
        replicates: usize,
        /// Long-format output `method,replicate,metric,value`.
        #[arg(long)]
        out: PathBuf,
        /// Median table path; stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let load = |path: &PathBuf| {
        let mut cfg = load_config(path)?;
        if let Some(seed) = cli.seed {
            cfg.set_seed(seed);
        }
        Ok::<_, CliError>(cfg)
    };
    match &cli.command {
        Command::Generate { config } => cmd_generate(&load(config)?),
        Command::Evaluate { design, config, out } => {
            cmd_evaluate(&load(config)?, design, out.as_deref())
        }
        Command::Compare {
            config,
            methods,
            replicates,
            out,
            summary,
        } => {
            let methods = parse_methods(methods)?;
            cmd_compare(&load(config)?, &methods, *replicates, out, summary.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
