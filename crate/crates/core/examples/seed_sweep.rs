//! Runs the default scenario over several seeds and prints flocking
//! statistics for each.
//!
//! `cargo run --release -p mrflock-core --example seed_sweep -- [pair_weight] [seed...]`

use std::time::Instant;

use mrflock_core::{run_simulation, ScenarioConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let pair_weight: f64 = args.next().map_or(1.0, |w| w.parse().expect("pair_weight is a number"));
    let seeds: Vec<u64> = args.map(|s| s.parse().expect("seed is an integer")).collect();
    let seeds = if seeds.is_empty() { (1..=10).collect() } else { seeds };

    println!("seed,d_avg_final20,order_final20,order_min_after25,d_min,collided,u_avg_followers,seconds");
    for seed in seeds {
        let mut cfg = ScenarioConfig { rng_seed: seed, ..ScenarioConfig::default() };
        cfg.controller.pair_weight = pair_weight;
        let start = Instant::now();
        let log = run_simulation(&cfg).expect("scenario runs");
        let end = cfg.steps as f64 * cfg.dt;
        let tail: Vec<_> = log.ticks.iter().filter(|r| r.t > end - 20.0 + 1e-9).collect();
        let d_avg = tail.iter().map(|r| r.metrics.d_avg).sum::<f64>() / tail.len() as f64;
        let order = tail.iter().map(|r| r.metrics.order).sum::<f64>() / tail.len() as f64;
        let order_min = log.ticks.iter().filter(|r| r.t > 25.0).map(|r| r.metrics.order).fold(1.0, f64::min);
        let d_min = log.records().map(|r| r.metrics.d_min).fold(f64::INFINITY, f64::min);
        let u_avg = log.summary[1..].iter().map(|s| s.u_avg).sum::<f64>() / (log.summary.len() - 1) as f64;
        println!(
            "{seed},{d_avg:.4},{order:.4},{order_min:.4},{d_min:.4},{},{u_avg:.4},{:.2}",
            log.collided,
            start.elapsed().as_secs_f64()
        );
    }
}
