#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcc_alloc::fp_solver::{PowerPolytope, ProjectionMethod};
use rcc_alloc::model::{Assignment, PowerMatrix, SystemModel};
use rcc_alloc::scenario::{generate_channels_seeded, ChannelSet, ScenarioConfig};

pub fn config(n: usize, k: usize) -> ScenarioConfig {
    ScenarioConfig {
        n_subcarriers: n,
        n_users: k,
        ..Default::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Instance {
    pub config: ScenarioConfig,
    pub channels: ChannelSet,
    pub model: SystemModel,
    pub polytope: PowerPolytope,
}

pub fn instance(config: ScenarioConfig, seed: u64) -> Instance {
    let channels = generate_channels_seeded(&config, seed).unwrap();
    let model = SystemModel::new(&channels, &config).unwrap();
    let polytope = PowerPolytope::new(&config, &model.coeffs);
    Instance {
        config,
        channels,
        model,
        polytope,
    }
}

/// Uniform point in the caps box, projected onto the constraint set.
pub fn random_feasible(inst: &Instance, rng: &mut ChaCha8Rng) -> PowerMatrix {
    let (k, n) = (inst.config.n_users, inst.config.n_subcarriers);
    let mut raw = Vec::with_capacity((k + 1) * n);
    for _ in 0..k * n {
        raw.push(rng.random::<f64>() * inst.config.comm_cap_w());
    }
    for _ in 0..n {
        raw.push(rng.random::<f64>() * inst.config.radar_cap_w());
    }
    let raw = PowerMatrix::from_rows(k, n, raw).unwrap();
    inst.polytope
        .project(&raw, ProjectionMethod::Exact, &Default::default())
        .unwrap()
}

/// Relaxed sum rate from raw gains (receiver-side penalty), in watts.
pub fn direct_sum_rate(channels: &ChannelSet, config: &ScenarioConfig, p: &PowerMatrix) -> f64 {
    let noise = config.comm_noise_w();
    let mut total = 0.0;
    for n in 0..config.n_subcarriers {
        let column: f64 = (0..config.n_users).map(|k| p.comm(k, n)).sum();
        for k in 0..config.n_users {
            let h2 = channels.h2(n, k);
            let w = p.comm(k, n);
            let denom = channels.s2(n, k) * p.radar(n) + config.eta * h2 * (column - w) + noise;
            total += (1.0 + h2 * w / denom).log2();
        }
    }
    total
}

/// Radar SINR (linear) from raw gains.
pub fn direct_radar_sinr(channels: &ChannelSet, config: &ScenarioConfig, p: &PowerMatrix) -> f64 {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for n in 0..config.n_subcarriers {
        let column: f64 = (0..config.n_users).map(|k| p.comm(k, n)).sum();
        signal += channels.g2[n] * p.radar(n);
        interference += channels.u2[n] * column + config.radar_noise_w();
    }
    signal / interference
}

/// Largest relative violation of caps, budgets and the SINR floor for a
/// binary assignment, from raw gains.
pub fn assignment_violation(a: &Assignment, channels: &ChannelSet, config: &ScenarioConfig) -> f64 {
    let rel = |value: f64, limit: f64| (value - limit) / limit.abs().max(1e-300);
    let mut worst = f64::NEG_INFINITY;
    for n in 0..a.n_subcarriers() {
        worst = worst.max(rel(a.comm_power[n], config.comm_cap_w()));
        worst = worst.max(rel(a.radar_power[n], config.radar_cap_w()));
        worst = worst.max(-a.comm_power[n]).max(-a.radar_power[n]);
        if a.owner[n].is_none() {
            worst = worst.max(a.comm_power[n]);
        }
    }
    worst = worst.max(rel(a.comm_power.iter().sum(), config.comm_budget_w()));
    worst = worst.max(rel(a.radar_power.iter().sum(), config.radar_budget_w()));
    if config.sinr_floor_db > f64::NEG_INFINITY {
        let p = a.to_power_matrix(config.n_users).unwrap();
        let sinr = direct_radar_sinr(channels, config, &p);
        let mu = config.sinr_floor_linear();
        worst = worst.max((mu - sinr) / mu);
    }
    worst
}

/// One subcarrier's surrogate value, written out term by term.
pub fn column_q(alpha: &[f64], beta: &[f64], eta: f64, w: &[f64], radar: f64, y: &[f64]) -> f64 {
    let column: f64 = w.iter().sum();
    let mut q = 0.0;
    for k in 0..w.len() {
        let d = beta[k] * radar + eta * alpha[k] * (column - w[k]) + 1.0;
        q += (1.0 + 2.0 * y[k] * (alpha[k] * w[k]).sqrt() - y[k] * y[k] * d).log2();
    }
    q
}
