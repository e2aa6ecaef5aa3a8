use clap::Parser;
use renyi_cli::{parse_scenario, run, Command, Options, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

/// Rényi (α,z)-divergences, Hoeffding anti-divergences and hypothesis-testing
/// exponents from a JSON scenario file.
#[derive(Parser, Debug)]
#[command(name = "renyi", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Report logarithmic quantities in bits in the CSV files.
    #[arg(long)]
    bits: bool,
    /// Override `params.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Override `params.tolerances.conv_tol`.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides { seed: cli.seed, tol: cli.tol };
    let result = parse_scenario(&cli.scenario, overrides)
        .and_then(|res| run(cli.command, &res, &Options { out: cli.out.clone(), bits: cli.bits }));
    match result {
        Ok(files) => {
            for f in files {
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
