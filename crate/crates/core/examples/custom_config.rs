//! Load a scenario from TOML, or print the defaults when no path is given.
//!
//! cargo run --release --example custom_config -- configs/default.toml

use rcc_alloc::fp_solver::{solve, SolverSettings};
use rcc_alloc::scenario::{generate_channels_seeded, ScenarioConfig};

fn main() -> rcc_alloc::Result<()> {
    let Some(path) = std::env::args().nth(1) else {
        print!("{}", ScenarioConfig::default().to_toml_string());
        return Ok(());
    };
    let config = ScenarioConfig::from_file(&path)?;
    for warning in config.warnings() {
        eprintln!("warning: {warning}");
    }
    let channels = generate_channels_seeded(&config, config.seed)?;
    match solve(&channels, &config, &SolverSettings::default()) {
        Ok(result) => {
            println!("{path}: N={} K={} mu={} dB", config.n_subcarriers, config.n_users, config.sinr_floor_db);
            println!("binary sum rate {:.4} bpcu at {:.2} dB radar SINR", result.binary_sum_rate, result.achieved_sinr_db);
        }
        Err(e) if e.is_infeasible() => println!("{path}: {e}"),
        Err(e) => return Err(e),
    }
    Ok(())
}
