//! Command-line front end: runs a density sweep and writes the result CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use femtosim::sweep::run_sweep;
use femtosim::ScenarioConfig;

/// Simulates femtocell frequency-allocation schemes over random
/// deployments and reports outage and throughput per scheme and density.
#[derive(Debug, Parser)]
#[command(name = "simulate")]
struct Cli {
    /// Scenario file of `key = value` lines; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Path of the CSV to write.
    #[arg(long, required_unless_present = "print_defaults")]
    out: Option<PathBuf>,

    /// Base seed, overriding the scenario file.
    #[arg(long)]
    seed: Option<u64>,

    /// Schemes to run, comma separated
    /// (shared, dedicated, subband, static, dynamic).
    #[arg(long)]
    schemes: Option<String>,

    /// Femtocell counts to sweep, comma separated.
    #[arg(long)]
    counts: Option<String>,

    /// Print the default scenario text and exit.
    #[arg(long)]
    print_defaults: bool,
}

fn run(cli: &Cli) -> Result<(), Box<dyn std::error::Error>> {
    if cli.print_defaults {
        print!("{}", ScenarioConfig::default().to_config_text());
        return Ok(());
    }
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(schemes) = &cli.schemes {
        config.set("schemes", schemes)?;
    }
    if let Some(counts) = &cli.counts {
        config.set("femtocell_counts", counts)?;
    }
    config.validate()?;

    let out = cli.out.as_ref().expect("clap requires --out here");
    let result = run_sweep(&config)?;
    result.write_csv(out)?;
    print!("{}", result.summary(config.dense_threshold));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
