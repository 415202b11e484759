//! Solver against exhaustive grid search on tiny instances.
//!
//! cargo run --release --example oracle_check -- [instances]

use rcc_alloc::fp_solver::{solve, SolverSettings};
use rcc_alloc::oracle::{brute_force, OracleSettings};
use rcc_alloc::scenario::{generate_channels_seeded, ScenarioConfig};

fn main() -> rcc_alloc::Result<()> {
    let instances = std::env::args().nth(1).map_or(10, |s| s.parse().expect("instances must be an integer"));
    let config = ScenarioConfig {
        n_subcarriers: 3,
        n_users: 2,
        sinr_floor_db: 10.0,
        ..Default::default()
    };
    let oracle = OracleSettings::default();
    for seed in 1..=instances as u64 {
        let channels = generate_channels_seeded(&config, seed)?;
        let truth = brute_force(&channels, &config, &oracle)?;
        let ours = solve(&channels, &config, &SolverSettings::default())?;
        println!(
            "seed {seed:>3}: solver {:>8.4} oracle {:>8.4} owners {:?} vs {:?}",
            ours.binary_sum_rate, truth.best_rate, ours.assignment.owner, truth.best.owner
        );
    }
    Ok(())
}
