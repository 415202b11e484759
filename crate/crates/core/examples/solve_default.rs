//! Solve one default-size scenario and print the allocation summary.
//!
//! cargo run --release --example solve_default -- [seed]

use std::time::Instant;

use rcc_alloc::fp_solver::{solve, SolverSettings};
use rcc_alloc::scenario::{generate_channels_seeded, ScenarioConfig};

fn main() -> rcc_alloc::Result<()> {
    let seed = std::env::args().nth(1).map_or(Ok(1), |s| s.parse()).expect("seed must be an integer");
    let config = ScenarioConfig::default();
    let channels = generate_channels_seeded(&config, seed)?;

    let started = Instant::now();
    let result = solve(&channels, &config, &SolverSettings::default())?;
    let elapsed = started.elapsed();

    let served = result.assignment.owner.iter().filter(|o| o.is_some()).count();
    println!("N={} K={} seed={seed}", config.n_subcarriers, config.n_users);
    println!("relaxed sum rate   {:.4} bpcu", result.relaxed_sum_rate);
    println!("binary sum rate    {:.4} bpcu", result.binary_sum_rate);
    println!("radar SINR         {:.3} dB (floor {} dB)", result.achieved_sinr_db, config.sinr_floor_db);
    println!("feasible: {}", result.feasible);
    println!("served subcarriers {served}/{}", config.n_subcarriers);
    println!("iterations         {} outer + {} refine", result.outer_iterations, result.refine_iterations);
    println!("elapsed            {:.3} s", elapsed.as_secs_f64());
    Ok(())
}
