mod common;

use proptest::prelude::*;
use rand::Rng;
use rcc_alloc::fp_solver::{
    find_feasible, max_radar_sinr, q_gradient, q_value, solve, solve_model, solve_subproblem, update_y, AuxiliaryMatrix,
    InitialSplit, PowerPolytope, ProjectionMethod, SolverSettings,
};
use rcc_alloc::model::{Coefficients, InterferenceGain, PowerMatrix, SystemModel};
use rcc_alloc::scenario::ScenarioConfig;
use rcc_alloc::Error;

use common::{column_q, instance, random_feasible, rng};

fn scalar_model(alpha: f64, beta: f64, xi: f64, gamma: f64) -> SystemModel {
    let coeffs = Coefficients::from_parts(1, 1, vec![alpha], vec![beta], vec![xi], vec![gamma]).unwrap();
    SystemModel::from_coefficients(coeffs, 0.5, InterferenceGain::Receiver)
}

#[test]
fn one_user_one_subcarrier_closed_form() {
    // SINR floor gives radar >= mu (gamma w + 1) / xi; the rate grows along
    // that edge, so w sits at the smaller of its cap and the radar-cap limit.
    for (radar_cap, w_star) in [(1.0, 1.0), (0.5, 0.5)] {
        let (alpha, beta, xi, gamma, mu) = (50.0, 2.0, 10.0, 3.0, 2.0);
        let model = scalar_model(alpha, beta, xi, gamma);
        let polytope = PowerPolytope::from_limits(&model.coeffs, 1.0, radar_cap, 10.0, 10.0, mu);
        let result = solve_model(&model, &polytope, &SolverSettings::default()).unwrap();
        let r_star = mu * (gamma * w_star + 1.0) / xi;
        let rate_star = (1.0 + alpha * w_star / (beta * r_star + 1.0)).log2();
        assert!(result.feasible);
        assert!(
            (result.binary_sum_rate - rate_star).abs() <= 1e-5 * rate_star,
            "{} vs {rate_star}",
            result.binary_sum_rate
        );
        assert!((result.power.comm(0, 0) - w_star).abs() < 1e-3);
        assert!((result.power.radar(0) - r_star).abs() < 1e-3);
    }
}

#[test]
fn strong_radar_without_cross_links_saturates_the_comm_cap() {
    let config = ScenarioConfig {
        n_subcarriers: 1,
        n_users: 1,
        ..Default::default()
    };
    let channels = rcc_alloc::scenario::ChannelSet::new(1, 1, vec![1e-9], vec![0.0], vec![1e3], vec![0.0]).unwrap();
    let result = solve(&channels, &config, &SolverSettings::default()).unwrap();
    let w = config.comm_cap_w().min(config.comm_budget_w());
    let alpha = 1e-9 / config.comm_noise_w();
    assert!((result.power.comm(0, 0) - w).abs() <= 1e-9 * w);
    assert!((result.binary_sum_rate - (1.0 + alpha * w).log2()).abs() <= 1e-9);
}

#[test]
fn transform_is_tight_at_optimal_y() {
    let inst = instance(common::config(16, 4), 21);
    let mut r = rng(21);
    for _ in 0..100 {
        let p = random_feasible(&inst, &mut r);
        let y = update_y(&inst.model, &p).unwrap();
        let q = q_value(&inst.model, &p, &y).unwrap();
        assert!((q - inst.model.sum_relaxed_rate(&p).unwrap()).abs() <= 1e-9);
    }
}

#[test]
fn surrogate_matches_written_out_formula_and_its_gradient() {
    let inst = instance(common::config(6, 3), 4);
    let (k_users, n_sub) = (3, 6);
    let mut r = rng(4);
    let h = 1e-6;
    for _ in 0..100 {
        let mut p = random_feasible(&inst, &mut r);
        // keep every entry interior so central differences stay in the domain
        for v in p.as_mut_slice() {
            *v = 0.05 + 0.9 * *v;
        }
        let y_point = random_feasible(&inst, &mut r);
        let y = update_y(&inst.model, &y_point.clone()).unwrap();
        let y = AuxiliaryMatrix::from_vec(n_sub, k_users, y.as_slice().iter().map(|v| 0.5 * v).collect()).unwrap();
        let grad = q_gradient(&inst.model, &p, &y, 1e-12).unwrap();
        let mut total = 0.0;
        for n in 0..n_sub {
            let alpha: Vec<f64> = (0..k_users).map(|k| inst.model.coeffs.alpha(n, k)).collect();
            let beta: Vec<f64> = (0..k_users).map(|k| inst.model.coeffs.beta(n, k)).collect();
            let yn: Vec<f64> = (0..k_users).map(|k| y.get(n, k)).collect();
            let w: Vec<f64> = (0..k_users).map(|k| p.comm(k, n)).collect();
            let f = |w: &[f64], radar: f64| column_q(&alpha, &beta, 0.5, w, radar, &yn);
            total += f(&w, p.radar(n));
            let mut fd = Vec::new();
            let mut an = Vec::new();
            for k in 0..k_users {
                let (mut up, mut down) = (w.clone(), w.clone());
                up[k] += h;
                down[k] -= h;
                fd.push((f(&up, p.radar(n)) - f(&down, p.radar(n))) / (2.0 * h));
                an.push(grad.comm(k, n));
            }
            fd.push((f(&w, p.radar(n) + h) - f(&w, p.radar(n) - h)) / (2.0 * h));
            an.push(grad.radar(n));
            let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = fd.iter().zip(&an).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err <= 1e-5 * scale, "column {n}: {an:?} vs {fd:?}");
        }
        let q = q_value(&inst.model, &p, &y).unwrap();
        assert!((q - total).abs() <= 1e-10 * total.abs().max(1.0));
    }
}

#[test]
fn exact_projection_satisfies_variational_inequality() {
    let inst = instance(common::config(8, 3), 6);
    let mut r = rng(6);
    let witnesses: Vec<PowerMatrix> = (0..10_000).map(|_| random_feasible(&inst, &mut r)).collect();
    for _ in 0..20 {
        let raw: Vec<f64> = (0..4 * 8).map(|_| r.random_range(-1.0..3.0)).collect();
        let z = PowerMatrix::from_rows(3, 8, raw).unwrap();
        let x = inst.polytope.project(&z, ProjectionMethod::Exact, &Default::default()).unwrap();
        assert!(inst.polytope.contains(&x, 1e-10));
        let d: Vec<f64> = z.as_slice().iter().zip(x.as_slice()).map(|(a, b)| a - b).collect();
        let dist2: f64 = d.iter().map(|v| v * v).sum();
        for v in &witnesses {
            let inner: f64 = d.iter().zip(v.as_slice().iter().zip(x.as_slice())).map(|(di, (vi, xi))| di * (vi - xi)).sum();
            assert!(inner <= 1e-9 * dist2.max(1.0), "witness closer than the projection: {inner}");
            let vd2: f64 = z.as_slice().iter().zip(v.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum();
            assert!(vd2 >= dist2 - 1e-9);
        }
    }
}

#[test]
fn dykstra_agrees_with_exact_projection() {
    let inst = instance(common::config(8, 3), 7);
    let mut r = rng(7);
    let dykstra = rcc_alloc::fp_solver::DykstraSettings {
        max_sweeps: 100_000,
        tolerance: 1e-13,
    };
    for _ in 0..50 {
        let raw: Vec<f64> = (0..4 * 8).map(|_| r.random_range(-1.0..3.0)).collect();
        let z = PowerMatrix::from_rows(3, 8, raw).unwrap();
        let exact = inst.polytope.project(&z, ProjectionMethod::Exact, &Default::default()).unwrap();
        let alt = inst.polytope.project(&z, ProjectionMethod::Dykstra, &dykstra).unwrap();
        let gap = exact.as_slice().iter().zip(alt.as_slice()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(gap <= 1e-6, "gap {gap}");
    }
}

#[test]
fn feasible_points_project_to_themselves() {
    let inst = instance(common::config(8, 3), 8);
    let mut r = rng(8);
    for _ in 0..50 {
        let p = random_feasible(&inst, &mut r);
        let again = inst.polytope.project(&p, ProjectionMethod::Exact, &Default::default()).unwrap();
        let gap = p.as_slice().iter().zip(again.as_slice()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(gap <= 1e-12);
    }
}

#[test]
fn max_radar_sinr_beats_random_feasible_points() {
    let inst = instance(common::config(8, 3), 9);
    let (best, radar) = max_radar_sinr(&inst.polytope);
    let mut p = PowerMatrix::zeros(3, 8);
    for (n, v) in radar.iter().enumerate() {
        p.set_radar(n, *v);
    }
    assert!((inst.model.radar_sinr(&p) - best).abs() <= 1e-12 * best);
    assert!(p.total_radar() <= inst.polytope.radar_budget() * (1.0 + 1e-12));
    let loose = inst.polytope.without_sinr_floor();
    let mut r = rng(9);
    for _ in 0..10_000 {
        let raw: Vec<f64> = (0..4 * 8).map(|_| r.random::<f64>()).collect();
        let z = PowerMatrix::from_rows(3, 8, raw).unwrap();
        let q = loose.project(&z, ProjectionMethod::Exact, &Default::default()).unwrap();
        assert!(inst.model.radar_sinr(&q) <= best * (1.0 + 1e-12));
    }
}

#[test]
fn infeasible_floor_is_reported_with_the_best_sinr() {
    let config = ScenarioConfig {
        sinr_floor_db: 80.0,
        ..common::config(8, 3)
    };
    let inst = instance(config, 10);
    let (best, _) = max_radar_sinr(&inst.polytope);
    match solve(&inst.channels, &inst.config, &SolverSettings::default()) {
        Err(Error::Infeasible { max_sinr, .. }) => assert!((max_sinr - best).abs() <= 1e-12 * best),
        other => panic!("expected infeasibility, got {other:?}"),
    }
    assert!(find_feasible(&inst.model.coeffs, &inst.polytope, InitialSplit::BestGain).is_err());
}

#[test]
fn subproblem_rejects_infeasible_start() {
    let inst = instance(common::config(4, 2), 11);
    let p = PowerMatrix::from_rows(2, 4, vec![5.0; 12]).unwrap();
    let y = update_y(&inst.model, &p).unwrap();
    let err = solve_subproblem(&inst.model, &inst.polytope, &y, &p, &SolverSettings::default()).unwrap_err();
    assert!(matches!(err, Error::InfeasibleStart { .. }));
}

#[test]
fn subproblem_matches_grid_search() {
    let (alpha, beta, xi, gamma, mu) = (30.0, 1.5, 6.0, 2.0, 1.5);
    let model = scalar_model(alpha, beta, xi, gamma);
    let polytope = PowerPolytope::from_limits(&model.coeffs, 1.0, 1.0, 10.0, 10.0, mu);
    let start = find_feasible(&model.coeffs, &polytope, InitialSplit::BestGain).unwrap();
    for y0 in [0.05, 0.2, 0.4] {
        let y = AuxiliaryMatrix::from_vec(1, 1, vec![y0]).unwrap();
        let settings = SolverSettings::default();
        let p = solve_subproblem(&model, &polytope, &y, &start, &settings).unwrap();
        let got = q_value(&model, &p, &y).unwrap();
        let mut best = f64::NEG_INFINITY;
        let steps = 2000;
        for i in 0..=steps {
            let w = i as f64 / steps as f64;
            // the surrogate falls with radar power, so the floor is tight
            let radar = (mu * (gamma * w + 1.0) / xi).max(0.0);
            if radar > 1.0 {
                break;
            }
            let arg = 1.0 + 2.0 * y0 * (alpha * w).sqrt() - y0 * y0 * (beta * radar + 1.0);
            if arg > 0.0 {
                best = best.max(arg.log2());
            }
        }
        assert!(got >= best - 1e-6, "y {y0}: {got} < grid {best}");
        assert!(got <= best + 1e-3, "y {y0}: {got} far above grid {best}");
    }
}

#[test]
fn trace_never_decreases() {
    for seed in 1..=5 {
        let inst = instance(common::config(16, 4), seed);
        let result = solve(&inst.channels, &inst.config, &SolverSettings::default()).unwrap();
        for trace in [&result.trace, &result.refine_trace] {
            for pair in trace.windows(2) {
                assert!(pair[1].sum_rate_bpcu >= pair[0].sum_rate_bpcu - 1e-9);
                assert!(pair[1].q_value >= pair[0].q_value - 1e-9);
            }
            for entry in trace.iter() {
                assert!(entry.sinr_db >= inst.config.sinr_floor_db - 1e-7);
            }
        }
        assert_eq!(result.outer_iterations + 1, result.trace.len());
    }
}

#[test]
fn solutions_are_feasible_and_single_owner() {
    for gain in [InterferenceGain::Receiver, InterferenceGain::Transmitter] {
        for seed in 1..=4 {
            let config = ScenarioConfig {
                interference_gain: gain,
                ..common::config(16, 4)
            };
            let inst = instance(config, seed);
            let result = solve(&inst.channels, &inst.config, &SolverSettings::default()).unwrap();
            assert!(result.feasible);
            assert!(result.power.is_single_owner());
            assert!(common::assignment_violation(&result.assignment, &inst.channels, &inst.config) <= 1e-8);
            assert!(result.binary_sum_rate > 0.0);
        }
    }
}

#[test]
fn dykstra_solver_reaches_a_similar_rate() {
    let inst = instance(common::config(8, 3), 12);
    let exact = solve(&inst.channels, &inst.config, &SolverSettings::default()).unwrap();
    let settings = SolverSettings {
        projection: ProjectionMethod::Dykstra,
        ..Default::default()
    };
    let alt = solve(&inst.channels, &inst.config, &settings).unwrap();
    assert!(alt.feasible);
    assert!((alt.binary_sum_rate - exact.binary_sum_rate).abs() <= 0.02 * exact.binary_sum_rate);
}

#[test]
fn feasible_start_for_every_seed() {
    for split in [InitialSplit::BestGain, InitialSplit::Shared] {
        for seed in 1..=20 {
            let inst = instance(common::config(16, 4), seed);
            let p = find_feasible(&inst.model.coeffs, &inst.polytope, split).unwrap();
            assert!(inst.polytope.contains(&p, 0.0), "seed {seed}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surrogate_is_concave_in_power(seed in 0u64..1000, t in 0.0f64..=1.0) {
        let inst = instance(common::config(4, 3), seed % 7 + 1);
        let mut r = rng(seed);
        let a = random_feasible(&inst, &mut r);
        let b = random_feasible(&inst, &mut r);
        let mid_data: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| 0.5 * (x + y)).collect();
        let mid = PowerMatrix::from_rows(3, 4, mid_data).unwrap();
        let y = update_y(&inst.model, &mid).unwrap();
        let (qa, qb) = match (q_value(&inst.model, &a, &y), q_value(&inst.model, &b, &y)) {
            (Ok(qa), Ok(qb)) => (qa, qb),
            _ => return Ok(()),
        };
        let c_data: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        let c = PowerMatrix::from_rows(3, 4, c_data).unwrap();
        let qc = q_value(&inst.model, &c, &y).unwrap();
        prop_assert!(qc >= t * qa + (1.0 - t) * qb - 1e-9);
    }

    #[test]
    fn transform_bounds_rate_for_any_y(seed in 0u64..1000, scale in 0.0f64..2.0) {
        let inst = instance(common::config(4, 3), seed % 5 + 1);
        let mut r = rng(seed);
        let p = random_feasible(&inst, &mut r);
        let y_star = update_y(&inst.model, &p).unwrap();
        let y = AuxiliaryMatrix::from_vec(4, 3, y_star.as_slice().iter().map(|v| v * scale).collect()).unwrap();
        if let Ok(q) = q_value(&inst.model, &p, &y) {
            prop_assert!(q <= inst.model.sum_relaxed_rate(&p).unwrap() + 1e-9);
        }
    }
}
