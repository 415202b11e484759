//! Exhaustive ground truth for tiny instances.
//!
//! Every owner pattern in `{none, 0..K}^N` is combined with every point of a
//! uniform power grid (`cap * i / (levels - 1)`, one communication and one
//! radar level per subcarrier). Points violating a budget or the radar SINR
//! floor are discarded; the best binary sum rate wins.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{binary_rate, Assignment};
use crate::scenario::{ChannelSet, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Power levels per variable, including 0 and the cap.
    pub grid_levels: usize,
    /// Largest allowed `(K + 1)^N * levels^(2N)`.
    pub max_evaluations: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            grid_levels: 9,
            max_evaluations: 5e7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_rate: f64,
    pub best: Assignment,
    pub evaluations: f64,
}

/// Grid points visited for `n` subcarriers and `k` users.
pub fn search_size(n_subcarriers: usize, n_users: usize, grid_levels: usize) -> f64 {
    (n_users as f64 + 1.0).powi(n_subcarriers as i32) * (grid_levels as f64).powi(2 * n_subcarriers as i32)
}

/// Relative margin kept on the SINR test so that an independent re-check
/// summing in another order still passes.
const SINR_MARGIN: f64 = 1e-12;

struct Search<'a> {
    n_sub: usize,
    levels: usize,
    comm_grid: Vec<f64>,
    radar_grid: Vec<f64>,
    comm_budget: f64,
    radar_budget: f64,
    mu: f64,
    noise_radar: f64,
    g2: &'a [f64],
    u2: &'a [f64],
    /// `rate[((n * (K + 1) + owner) * L + ci) * L + ri]`, owner slot 0 = none.
    rate: Vec<f64>,
    k_slots: usize,
}

#[derive(Clone, Copy)]
struct Best {
    rate: f64,
    comm: [usize; MAX_N],
    radar: [usize; MAX_N],
}

const MAX_N: usize = 16;

struct Partial {
    comm_sum: f64,
    radar_sum: f64,
    signal: f64,
    interference: f64,
    rate: f64,
}

impl Search<'_> {
    fn rate(&self, n: usize, slot: usize, ci: usize, ri: usize) -> f64 {
        self.rate[((n * self.k_slots + slot) * self.levels + ci) * self.levels + ri]
    }

    fn run(&self, owners: &[usize]) -> Option<Best> {
        let mut best = None;
        let mut comm = [0usize; MAX_N];
        let mut radar = [0usize; MAX_N];
        let start = Partial {
            comm_sum: 0.0,
            radar_sum: 0.0,
            signal: 0.0,
            interference: 0.0,
            rate: 0.0,
        };
        self.descend(owners, 0, &start, &mut comm, &mut radar, &mut best);
        best
    }

    fn descend(
        &self,
        owners: &[usize],
        n: usize,
        acc: &Partial,
        comm: &mut [usize; MAX_N],
        radar: &mut [usize; MAX_N],
        best: &mut Option<Best>,
    ) {
        if n == self.n_sub {
            let ok = acc.signal >= self.mu * acc.interference * (1.0 + SINR_MARGIN);
            if ok && best.is_none_or(|b| acc.rate > b.rate) {
                *best = Some(Best {
                    rate: acc.rate,
                    comm: *comm,
                    radar: *radar,
                });
            }
            return;
        }
        let comm_levels = if owners[n] == 0 { 1 } else { self.levels };
        for ci in 0..comm_levels {
            let c = self.comm_grid[ci];
            let comm_sum = acc.comm_sum + c;
            if comm_sum > self.comm_budget {
                break;
            }
            for ri in 0..self.levels {
                let r = self.radar_grid[ri];
                let radar_sum = acc.radar_sum + r;
                if radar_sum > self.radar_budget {
                    break;
                }
                comm[n] = ci;
                radar[n] = ri;
                let next = Partial {
                    comm_sum,
                    radar_sum,
                    signal: acc.signal + self.g2[n] * r,
                    interference: acc.interference + self.u2[n] * c + self.noise_radar,
                    rate: acc.rate + self.rate(n, owners[n], ci, ri),
                };
                self.descend(owners, n + 1, &next, comm, radar, best);
            }
        }
    }
}

fn decode(mut index: usize, slots: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for o in out.iter_mut() {
        *o = index % slots;
        index /= slots;
    }
    out
}

pub fn brute_force(channels: &ChannelSet, config: &ScenarioConfig, settings: &OracleSettings) -> Result<OracleResult> {
    config.validate()?;
    channels.check_matches(config)?;
    if settings.grid_levels < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid_levels must be at least 2, got {}",
            settings.grid_levels
        )));
    }
    let n_sub = config.n_subcarriers;
    let k_users = config.n_users;
    let levels = settings.grid_levels;
    let evaluations = search_size(n_sub, k_users, levels);
    if evaluations > settings.max_evaluations || n_sub > MAX_N {
        return Err(Error::BudgetExceeded {
            evaluations,
            budget: settings.max_evaluations,
        });
    }

    let grid = |cap: f64| -> Vec<f64> { (0..levels).map(|i| cap * i as f64 / (levels - 1) as f64).collect() };
    let comm_grid = grid(config.comm_cap_w());
    let radar_grid = grid(config.radar_cap_w());
    let noise = config.comm_noise_w();
    let k_slots = k_users + 1;
    let mut rate = vec![0.0; n_sub * k_slots * levels * levels];
    for n in 0..n_sub {
        for k in 0..k_users {
            for ci in 0..levels {
                for ri in 0..levels {
                    let sinr = channels.h2(n, k) * comm_grid[ci] / (channels.s2(n, k) * radar_grid[ri] + noise);
                    rate[((n * k_slots + k + 1) * levels + ci) * levels + ri] = (1.0 + sinr).log2();
                }
            }
        }
    }
    let search = Search {
        n_sub,
        levels,
        comm_grid,
        radar_grid,
        comm_budget: config.comm_budget_w(),
        radar_budget: config.radar_budget_w(),
        mu: config.sinr_floor_linear(),
        noise_radar: config.radar_noise_w(),
        g2: &channels.g2,
        u2: &channels.u2,
        rate,
        k_slots,
    };

    let patterns = k_slots.pow(n_sub as u32);
    let winner = (0..patterns)
        .into_par_iter()
        .filter_map(|index| {
            let owners = decode(index, k_slots, n_sub);
            search.run(&owners).map(|b| (index, b))
        })
        // highest rate, lowest pattern index on ties
        .reduce_with(|a, b| if b.1.rate > a.1.rate || (b.1.rate == a.1.rate && b.0 < a.0) { b } else { a });
    let Some((index, best)) = winner else {
        return Err(Error::OracleInfeasible);
    };

    let owners = decode(index, k_slots, n_sub);
    let owner: Vec<Option<usize>> = owners.iter().map(|&s| s.checked_sub(1)).collect();
    let comm_power = (0..n_sub).map(|n| search.comm_grid[best.comm[n]]).collect();
    let radar_power = (0..n_sub).map(|n| search.radar_grid[best.radar[n]]).collect();
    let best = Assignment::new(owner, comm_power, radar_power)?;
    let best_rate = binary_rate(&best, channels, config)?;
    Ok(OracleResult {
        best_rate,
        best,
        evaluations,
    })
}
