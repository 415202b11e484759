mod common;

use rcc_alloc::scenario::{
    db_to_linear, dbm_to_watts, generate_channels_seeded, linear_to_db, watts_to_dbm, PathlossModel, ScenarioConfig,
};
use rcc_alloc::Error;

#[test]
fn rayleigh_fading_has_unit_mean() {
    let base = ScenarioConfig {
        n_subcarriers: 10_000,
        n_users: 1,
        ..Default::default()
    };
    let flat = ScenarioConfig {
        rayleigh_fading: false,
        ..base.clone()
    };
    for seed in [1, 2, 3] {
        let faded = generate_channels_seeded(&base, seed).unwrap();
        let large_scale = generate_channels_seeded(&flat, seed).unwrap().h2[0];
        let ratios: Vec<f64> = faded.h2.iter().map(|h| h / large_scale).collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let second = ratios.iter().map(|r| r * r).sum::<f64>() / ratios.len() as f64;
        assert!((mean - 1.0).abs() < 0.03, "seed {seed}: mean {mean}");
        assert!((second - 2.0).abs() < 0.2, "seed {seed}: second moment {second}");
    }
}

#[test]
fn flat_channels_without_fading() {
    let config = ScenarioConfig {
        n_subcarriers: 16,
        n_users: 3,
        rayleigh_fading: false,
        ..Default::default()
    };
    let ch = generate_channels_seeded(&config, 4).unwrap();
    for k in 0..3 {
        for n in 1..16 {
            assert_eq!(ch.h2(n, k), ch.h2(0, k));
            assert_eq!(ch.s2(n, k), ch.s2(0, k));
        }
    }
}

#[test]
fn pathloss_is_monotone_in_distance() {
    let model = PathlossModel::default();
    assert!((model.loss_db(1.0).unwrap() - 41.0).abs() < 1e-12);
    assert!((model.loss_db(10.0).unwrap() - 76.0).abs() < 1e-12);
    let mut previous = f64::NEG_INFINITY;
    for i in 1..200 {
        let d = 1.0 + 5.0 * i as f64;
        let loss = model.loss_db(d).unwrap();
        assert!(loss > previous);
        assert!((model.gain(d).unwrap() - db_to_linear(-loss)).abs() <= 1e-15);
        previous = loss;
    }
    for bad in [0.0, -3.0, f64::NAN] {
        assert!(matches!(model.loss_db(bad), Err(Error::NonPositiveDistance(_))));
    }
}

#[test]
fn seeded_draws_are_reproducible() {
    let config = common::config(32, 5);
    let a = generate_channels_seeded(&config, 9).unwrap();
    let b = generate_channels_seeded(&config, 9).unwrap();
    let c = generate_channels_seeded(&config, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.n_subcarriers(), 32);
    assert_eq!(a.n_users(), 5);
    assert!(a.h2.iter().chain(&a.s2).chain(&a.g2).chain(&a.u2).all(|v| *v > 0.0));
}

#[test]
fn unit_conversions() {
    assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-12);
    assert!((dbm_to_watts(50.0) - 100.0).abs() < 1e-9);
    assert!((db_to_linear(20.0) - 100.0).abs() < 1e-9);
    for v in [-105.0, 0.0, 17.5, 45.0] {
        assert!((watts_to_dbm(dbm_to_watts(v)) - v).abs() < 1e-9);
        assert!((linear_to_db(db_to_linear(v)) - v).abs() < 1e-9);
    }
}

#[test]
fn config_toml_round_trip() {
    let config = ScenarioConfig {
        sinr_floor_db: 14.0,
        seed: 77,
        ..Default::default()
    };
    let parsed = ScenarioConfig::from_toml_str(&config.to_toml_string()).unwrap();
    assert_eq!(parsed, config);

    let partial = ScenarioConfig::from_toml_str("n_users = 3\n[geometry]\nbs_radar_dist_m = 90.0\n").unwrap();
    assert_eq!(partial.n_users, 3);
    assert_eq!(partial.geometry.bs_radar_dist_m, 90.0);
    assert_eq!(partial.n_subcarriers, 128);
}

#[test]
fn shipped_config_matches_defaults() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml");
    assert_eq!(ScenarioConfig::from_file(path).unwrap(), ScenarioConfig::default());
}

#[test]
fn bad_configs_are_rejected() {
    assert!(ScenarioConfig::from_toml_str("n_user = 3").is_err());
    assert!(ScenarioConfig::from_toml_str("n_users = 0").is_err());
    assert!(ScenarioConfig::from_toml_str("eta = 0.2").is_err());
    assert!(ScenarioConfig::from_toml_str("eta = 0.2\nallow_small_eta = true").is_ok());
    assert!(ScenarioConfig::from_toml_str("[geometry]\nbs_radar_dist_m = 0.0").is_err());
    assert!(ScenarioConfig::from_toml_str("interference_gain = \"sideways\"").is_err());
}

#[test]
fn cap_above_budget_warns() {
    let config = ScenarioConfig {
        p_c_cap_dbm: 52.0,
        ..Default::default()
    };
    assert_eq!(config.warnings().len(), 1);
    assert!(ScenarioConfig::default().warnings().is_empty());
}
