//! The pieces of one outer iteration by hand: project a point onto the
//! constraint set, build the auxiliary variables, and compare the surrogate
//! with the true objective.
//!
//! cargo run --release --example surrogate_internals

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcc_alloc::fp_solver::{find_feasible, q_gradient, q_value, update_y, InitialSplit, PowerPolytope, ProjectionMethod};
use rcc_alloc::model::{PowerMatrix, SystemModel};
use rcc_alloc::scenario::{generate_channels_seeded, ScenarioConfig};

fn main() -> rcc_alloc::Result<()> {
    let config = ScenarioConfig {
        n_subcarriers: 8,
        n_users: 3,
        ..Default::default()
    };
    let channels = generate_channels_seeded(&config, 11)?;
    let model = SystemModel::new(&channels, &config)?;
    let polytope = PowerPolytope::new(&config, &model.coeffs);

    let start = find_feasible(&model.coeffs, &polytope, InitialSplit::BestGain)?;
    println!("start: radar SINR {:.2} (floor {:.2})", model.radar_sinr(&start), polytope.sinr_floor());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let raw: Vec<f64> = (0..4 * 8).map(|_| rng.random::<f64>()).collect();
    let raw = PowerMatrix::from_rows(3, 8, raw)?;
    for method in [ProjectionMethod::Exact, ProjectionMethod::Dykstra] {
        let p = polytope.project(&raw, method, &Default::default())?;
        let y = update_y(&model, &p)?;
        let q = q_value(&model, &p, &y)?;
        let f = model.sum_relaxed_rate(&p)?;
        let g = q_gradient(&model, &p, &y, 1e-12)?;
        let g_norm = g.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
        println!("{method:?}: violation {:.1e}, Q {q:.6}, f {f:.6}, |grad Q| {g_norm:.3e}", polytope.max_violation(&p));
    }
    Ok(())
}
