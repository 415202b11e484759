//! Sum rate against the radar SINR floor, with and without the radar.
//!
//! cargo run --release --example mu_sweep -- [trials] [out_dir]

use std::path::PathBuf;

use rcc_alloc::experiments::{curves_by_trial, run_sweep_with_baseline, write_csv, SweepKind, SweepSpec};
use rcc_alloc::fp_solver::SolverSettings;
use rcc_alloc::scenario::ScenarioConfig;

fn main() -> rcc_alloc::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().map_or(5, |s| s.parse().expect("trials must be an integer"));
    let out = args.next().map(PathBuf::from);

    let mut spec = SweepSpec::new(SweepKind::Mu, ScenarioConfig::default());
    spec.trials = trials;
    let tables = run_sweep_with_baseline(&spec, &SolverSettings::default())?;

    let n = spec.values.len();
    let coex = curves_by_trial(&tables.coexistence, n, trials);
    let base = curves_by_trial(&tables.no_radar, n, trials);
    println!("{:>8} {:>14} {:>14}", "mu [dB]", "with radar", "no radar");
    for (i, mu) in spec.values.iter().enumerate() {
        let mean = |curves: &[Vec<&rcc_alloc::experiments::SweepRow>]| {
            curves.iter().map(|c| c[i].sum_rate_bpcu).sum::<f64>() / trials as f64
        };
        println!("{mu:>8.1} {:>14.3} {:>14.3}", mean(&coex), mean(&base));
    }
    if let Some(dir) = out {
        println!("{}", write_csv(&dir, SweepKind::Mu, "example", &tables.coexistence)?.display());
        println!("{}", write_csv(&dir, SweepKind::Mu, "example-no-radar", &tables.no_radar)?.display());
    }
    Ok(())
}
