use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ilab_cli::{run_scenario, CliError, Scenario, ScenarioConfig};

/// Interference-lab scenario runner.
#[derive(Debug, Parser)]
#[command(name = "ilab", version)]
struct Args {
    scenario: Scenario,
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "ILAB_THREADS")]
    threads: Option<usize>,
}

fn run(args: Args) -> Result<(), CliError> {
    let mut config = ScenarioConfig::load(&args.config)?.resolve(args.scenario)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args
        .out
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(args.scenario.name()));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("key `threads`: must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("key `threads`: {e}")))?;
    let report = pool.install(|| run_scenario(&config, &out))?;
    for w in &report.manifest.warnings {
        eprintln!("warning: {w}");
    }
    for f in &report.manifest.files {
        println!("{}  {}", f.sha256, out.join(&f.name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ilab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
