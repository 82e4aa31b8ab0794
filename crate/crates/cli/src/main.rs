use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mrflock_core::{run_simulation, FlockError, ScenarioConfig};

/// Runs the leader-follower flocking scenario and writes CSV logs.
#[derive(Debug, Parser)]
#[command(name = "mrflock", version)]
struct Args {
    /// `key = value` scenario file; missing keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, default_value = ".")]
    out_dir: PathBuf,

    /// Overrides `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,

    /// Overrides `steps`.
    #[arg(long)]
    steps: Option<usize>,

    #[arg(long)]
    quiet: bool,
}

fn exit_code(err: &FlockError) -> u8 {
    match err {
        FlockError::Config { .. } | FlockError::InvalidArgument(_) | FlockError::NoMinimum(_) => 2,
        FlockError::InfeasibleScenario(_) | FlockError::InfeasibleState(_) => 3,
        _ => 1,
    }
}

fn load(args: &Args) -> Result<ScenarioConfig, FlockError> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::from_file(path).map_err(|e| match e {
            FlockError::Io(io) => FlockError::Config {
                line: 0,
                message: format!("cannot read {}: {io}", path.display()),
            },
            other => other,
        })?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> Result<(), FlockError> {
    let cfg = load(args)?;
    let log = run_simulation(&cfg)?;
    log.write_csv_dir(&args.out_dir)?;
    if !args.quiet {
        let last = log.ticks.last().unwrap_or(&log.initial);
        println!(
            "{} agents, {} steps, seed {}: collided={} final order={:.3} d_avg={:.3} -> {}",
            cfg.n_agents,
            cfg.steps,
            cfg.rng_seed,
            log.collided,
            last.metrics.order,
            last.metrics.d_avg,
            args.out_dir.display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mrflock: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
