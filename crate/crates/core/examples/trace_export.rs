//! Per-iteration objective trace of one solve, written as CSV to stdout.
//!
//! cargo run --release --example trace_export -- [seed] > trace.csv

use rcc_alloc::fp_solver::{solve, write_trace_csv, SolverSettings};
use rcc_alloc::scenario::{generate_channels_seeded, ScenarioConfig};

fn main() -> rcc_alloc::Result<()> {
    let seed = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seed must be an integer"));
    let config = ScenarioConfig {
        n_subcarriers: 32,
        ..Default::default()
    };
    let channels = generate_channels_seeded(&config, seed)?;
    let result = solve(&channels, &config, &SolverSettings::default())?;
    write_trace_csv(std::io::stdout().lock(), &result.trace)?;
    let worst_drop = result
        .trace
        .windows(2)
        .map(|w| w[0].sum_rate_bpcu - w[1].sum_rate_bpcu)
        .fold(0.0f64, f64::max);
    eprintln!("{} iterations, largest decrease {worst_drop:.3e}", result.outer_iterations);
    Ok(())
}
