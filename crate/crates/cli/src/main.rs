use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavelab_cli::{run_experiment, RunOptions};

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Scenario-driven waveform experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed_override: Option<u64>,
        /// Check the config and exit without running.
        #[arg(long)]
        validate_only: bool,
    },
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("WAVELAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("WAVELAB_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        out,
        seed_override,
        validate_only,
    } = Cli::parse().command;
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let Some(out) = out.or_else(|| validate_only.then(PathBuf::new)) else {
        eprintln!("error: --out is required unless --validate-only is given");
        return ExitCode::from(2);
    };
    let opts = RunOptions {
        config,
        out,
        seed_override,
        validate_only,
    };
    match run_experiment(&opts) {
        Ok(s) if validate_only => {
            println!("ok: {} (seed {})", s.experiment, s.seed);
            ExitCode::SUCCESS
        }
        Ok(s) => {
            for f in &s.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
