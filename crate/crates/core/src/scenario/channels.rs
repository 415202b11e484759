//! Randomized channel draws.
//!
//! Every power gain is `pathloss(distance) * shadowing * fading`:
//! log-normal shadowing is drawn once per link, unit-mean exponential
//! (Rayleigh power) fading once per link and subcarrier. The BS sits at the
//! origin, the radar receiver at `(bs_radar_dist_m, 0)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::config::ScenarioConfig;
use super::units::db_to_linear;
use crate::error::{Error, Result};

/// Squared channel magnitudes for one scenario. Matrices are indexed
/// `[n * n_users + k]` (subcarrier-major).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    n_subcarriers: usize,
    n_users: usize,
    /// BS -> user gains.
    pub h2: Vec<f64>,
    /// Radar -> user interference gains.
    pub s2: Vec<f64>,
    /// Radar round-trip gains.
    pub g2: Vec<f64>,
    /// BS -> radar interference gains.
    pub u2: Vec<f64>,
}

impl ChannelSet {
    pub fn new(
        n_subcarriers: usize,
        n_users: usize,
        h2: Vec<f64>,
        s2: Vec<f64>,
        g2: Vec<f64>,
        u2: Vec<f64>,
    ) -> Result<Self> {
        let nk = n_subcarriers * n_users;
        for (name, len, want) in [
            ("h2", h2.len(), nk),
            ("s2", s2.len(), nk),
            ("g2", g2.len(), n_subcarriers),
            ("u2", u2.len(), n_subcarriers),
        ] {
            if len != want {
                return Err(Error::DimensionMismatch {
                    expected: format!("{name} with {want} entries"),
                    got: format!("{len}"),
                });
            }
        }
        let set = Self {
            n_subcarriers,
            n_users,
            h2,
            s2,
            g2,
            u2,
        };
        if let Some(bad) = set
            .h2
            .iter()
            .chain(&set.s2)
            .chain(&set.g2)
            .chain(&set.u2)
            .find(|v| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "channel gains must be finite and non-negative, found {bad}"
            )));
        }
        Ok(set)
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn h2(&self, n: usize, k: usize) -> f64 {
        self.h2[n * self.n_users + k]
    }

    pub fn s2(&self, n: usize, k: usize) -> f64 {
        self.s2[n * self.n_users + k]
    }

    /// The same channels with the radar -> user interference removed.
    pub fn without_radar_interference(&self) -> Self {
        Self {
            s2: vec![0.0; self.s2.len()],
            ..self.clone()
        }
    }

    /// Relabel users: user `k` of the result is user `perm[k]` of `self`.
    pub fn permute_users(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_users];
        if perm.len() != self.n_users || perm.iter().any(|&p| p >= self.n_users || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{}",
                self.n_users
            )));
        }
        let mut out = self.clone();
        for n in 0..self.n_subcarriers {
            for (k, &src) in perm.iter().enumerate() {
                out.h2[n * self.n_users + k] = self.h2(n, src);
                out.s2[n * self.n_users + k] = self.s2(n, src);
            }
        }
        Ok(out)
    }

    pub fn check_matches(&self, config: &ScenarioConfig) -> Result<()> {
        if self.n_subcarriers != config.n_subcarriers || self.n_users != config.n_users {
            return Err(Error::DimensionMismatch {
                expected: format!("N={}, K={}", config.n_subcarriers, config.n_users),
                got: format!("N={}, K={}", self.n_subcarriers, self.n_users),
            });
        }
        Ok(())
    }
}

/// Uniform draw from the annulus `[r_min, r_max]`, returned as `(x, y)`.
fn uniform_in_annulus<R: Rng + ?Sized>(rng: &mut R, r_min: f64, r_max: f64) -> (f64, f64) {
    let u: f64 = rng.random();
    let r = (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    (r * theta.cos(), r * theta.sin())
}

struct LinkSampler<'a> {
    config: &'a ScenarioConfig,
}

impl LinkSampler<'_> {
    fn shadowing<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        db_to_linear(self.config.shadowing_sigma_db * z)
    }

    fn fading<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.config.rayleigh_fading {
            Exp1.sample(rng)
        } else {
            1.0
        }
    }

    /// One link's gains across all subcarriers.
    fn link<R: Rng + ?Sized>(&self, rng: &mut R, distance_m: f64, extra_loss_db: f64) -> Result<Vec<f64>> {
        let d = distance_m.max(self.config.pathloss.reference_dist_m);
        let large_scale = self.config.pathloss.gain(d)? * db_to_linear(-extra_loss_db) * self.shadowing(rng);
        Ok((0..self.config.n_subcarriers)
            .map(|_| large_scale * self.fading(rng))
            .collect())
    }
}

/// Draws one scenario. Identical `(config, rng state)` gives identical output.
pub fn generate_channels<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<ChannelSet> {
    config.validate()?;
    let n = config.n_subcarriers;
    let k_users = config.n_users;
    let geo = &config.geometry;
    if !(geo.bs_radar_dist_m > 0.0) {
        return Err(Error::NonPositiveDistance(geo.bs_radar_dist_m));
    }
    let sampler = LinkSampler { config };
    let radar_pos = (geo.bs_radar_dist_m, 0.0);

    let mut h2 = vec![0.0; n * k_users];
    let mut s2 = vec![0.0; n * k_users];
    for k in 0..k_users {
        let (x, y) = uniform_in_annulus(rng, config.pathloss.reference_dist_m, config.cell_radius_m);
        let d_bs = x.hypot(y);
        let d_radar = (x - radar_pos.0).hypot(y - radar_pos.1);
        let direct = sampler.link(rng, d_bs, 0.0)?;
        let scattered = sampler.link(rng, d_radar, geo.radar_target_area.scatter_loss_db)?;
        for sub in 0..n {
            h2[sub * k_users + k] = direct[sub];
            s2[sub * k_users + k] = scattered[sub];
        }
    }
    let g2 = sampler.link(rng, geo.radar_target_area.range_m, 0.0)?;
    let u2 = sampler.link(rng, geo.bs_radar_dist_m, 0.0)?;
    ChannelSet::new(n, k_users, h2, s2, g2, u2)
}

/// Channels drawn from a ChaCha8 stream seeded with `seed`.
pub fn generate_channels_seeded(config: &ScenarioConfig, seed: u64) -> Result<ChannelSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_channels(config, &mut rng)
}
