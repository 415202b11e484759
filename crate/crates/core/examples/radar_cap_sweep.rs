//! Sum rate against the radar per-subcarrier power cap.
//!
//! cargo run --release --example radar_cap_sweep -- [trials]

use rcc_alloc::experiments::{curves_by_trial, run_sweep, SweepKind, SweepSpec};
use rcc_alloc::fp_solver::SolverSettings;
use rcc_alloc::scenario::ScenarioConfig;

fn main() -> rcc_alloc::Result<()> {
    let trials = std::env::args().nth(1).map_or(5, |s| s.parse().expect("trials must be an integer"));
    let mut spec = SweepSpec::new(SweepKind::PrCap, ScenarioConfig::default());
    spec.values = vec![22.0, 24.0, 26.0, 28.0, 30.0];
    spec.trials = trials;
    let rows = run_sweep(&spec, &SolverSettings::default())?;
    let curves = curves_by_trial(&rows, spec.values.len(), trials);
    for (i, cap) in spec.values.iter().enumerate() {
        let feasible: Vec<f64> = curves.iter().filter(|c| c[i].feasible).map(|c| c[i].sum_rate_bpcu).collect();
        let mean = feasible.iter().sum::<f64>() / feasible.len().max(1) as f64;
        println!("P_r cap {cap:>4.1} dBm: mean {mean:>9.3} bpcu over {} feasible trials", feasible.len());
    }
    Ok(())
}
