//! Sum rate against the communication power budget at a 24 dB SINR floor.
//!
//! cargo run --release --example power_saturation -- [trials]

use rcc_alloc::experiments::{curves_by_trial, run_sweep, SweepKind, SweepSpec};
use rcc_alloc::fp_solver::SolverSettings;
use rcc_alloc::scenario::ScenarioConfig;

fn main() -> rcc_alloc::Result<()> {
    let trials = std::env::args().nth(1).map_or(5, |s| s.parse().expect("trials must be an integer"));
    let base = ScenarioConfig {
        sinr_floor_db: 24.0,
        ..Default::default()
    };
    let mut spec = SweepSpec::new(SweepKind::PcMax, base);
    spec.trials = trials;
    let rows = run_sweep(&spec, &SolverSettings::default())?;

    print!("{:>6}", "trial");
    for v in &spec.values {
        print!(" {:>9}", format!("{v} dBm"));
    }
    println!();
    for (t, curve) in curves_by_trial(&rows, spec.values.len(), trials).iter().enumerate() {
        print!("{t:>6}");
        for row in curve {
            if row.feasible {
                print!(" {:>9.2}", row.sum_rate_bpcu);
            } else {
                print!(" {:>9}", "infeas.");
            }
        }
        println!();
    }
    Ok(())
}
