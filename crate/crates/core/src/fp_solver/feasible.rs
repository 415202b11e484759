//! Feasibility certificate and starting point.

use serde::{Deserialize, Serialize};

use super::projection::PowerPolytope;
use crate::error::{Error, Result};
use crate::model::{Coefficients, PowerMatrix};

/// How the provisional communication power of a subcarrier is split over
/// users in the starting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSplit {
    /// Everything to the user with the largest `alpha` on the subcarrier.
    #[default]
    BestGain,
    /// Equal shares for every user.
    Shared,
}

/// Largest radar SINR reachable with zero communication power, and the
/// radar allocation reaching it: caps are filled in descending `xi` order
/// until the budget runs out.
pub fn max_radar_sinr(polytope: &PowerPolytope) -> (f64, Vec<f64>) {
    let n = polytope.n_subcarriers();
    let xi = polytope.xi();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xi[b].total_cmp(&xi[a]).then(a.cmp(&b)));
    let mut remaining = polytope.radar_budget();
    let mut radar = vec![0.0; n];
    for i in order {
        if remaining <= 0.0 {
            break;
        }
        let take = polytope.radar_upper(i).min(remaining);
        radar[i] = take;
        remaining -= take;
    }
    let signal: f64 = xi.iter().zip(&radar).map(|(a, b)| a * b).sum();
    (signal / n as f64, radar)
}

/// A point of the polytope to start the ascent from.
///
/// Radar power follows [`max_radar_sinr`]. Every subcarrier then gets the
/// same communication power `t`, the largest value allowed by the per-entry
/// cap, an even share of the budget and the SINR floor, scaled by 0.9.
pub fn find_feasible(coeffs: &Coefficients, polytope: &PowerPolytope, split: InitialSplit) -> Result<PowerMatrix> {
    let n_sub = polytope.n_subcarriers();
    let k_users = polytope.n_users();
    let (best, radar) = max_radar_sinr(polytope);
    let mu = polytope.sinr_floor();
    if mu > 0.0 && best < mu {
        return Err(Error::infeasible(best));
    }

    // per-subcarrier receivers and the largest power each can take
    let mut users: Vec<Vec<usize>> = Vec::with_capacity(n_sub);
    let mut column_cap = Vec::with_capacity(n_sub);
    for n in 0..n_sub {
        let open: Vec<usize> = (0..k_users).filter(|&k| polytope.comm_upper(k, n) > 0.0).collect();
        let chosen = match split {
            InitialSplit::BestGain => open
                .iter()
                .copied()
                .max_by(|&a, &b| coeffs.alpha(n, a).total_cmp(&coeffs.alpha(n, b)).then(b.cmp(&a)))
                .into_iter()
                .collect(),
            InitialSplit::Shared => open,
        };
        let cap = chosen
            .iter()
            .map(|&k| polytope.comm_upper(k, n))
            .fold(f64::INFINITY, f64::min);
        column_cap.push(if chosen.is_empty() { 0.0 } else { cap });
        users.push(chosen);
    }

    let served = users.iter().filter(|u| !u.is_empty()).count();
    let mut t = if served == 0 {
        0.0
    } else {
        column_cap
            .iter()
            .copied()
            .filter(|c| *c > 0.0)
            .fold(polytope.comm_budget() / served as f64, f64::min)
    };
    if mu > 0.0 {
        // SINR(t) = S / (t * sum gamma + N) over served columns
        let signal: f64 = polytope.xi().iter().zip(&radar).map(|(a, b)| a * b).sum();
        let gamma_sum: f64 = (0..n_sub).filter(|&n| !users[n].is_empty()).map(|n| polytope.gamma()[n]).sum();
        if gamma_sum > 0.0 {
            t = t.min(((signal / mu - n_sub as f64) / gamma_sum).max(0.0));
        }
    }
    t *= 0.9;

    let mut p = PowerMatrix::zeros(k_users, n_sub);
    for n in 0..n_sub {
        for &k in &users[n] {
            p.set_comm(k, n, t / users[n].len() as f64);
        }
        p.set_radar(n, radar[n]);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polytope(xi: Vec<f64>, radar_cap: f64, radar_budget: f64, floor: f64) -> (Coefficients, PowerPolytope) {
        let n = xi.len();
        let c = Coefficients::from_parts(n, 1, vec![1.0; n], vec![0.0; n], xi, vec![1.0; n]).unwrap();
        let p = PowerPolytope::from_limits(&c, 1.0, radar_cap, 10.0, radar_budget, floor);
        (c, p)
    }

    #[test]
    fn greedy_prefers_strong_subcarriers() {
        let (_, poly) = polytope(vec![3.0, 1.0], 1.0, 1.0, 0.0);
        let (sinr, radar) = max_radar_sinr(&poly);
        assert_eq!(radar, vec![1.0, 0.0]);
        assert_eq!(sinr, 1.5);
    }

    #[test]
    fn large_budget_fills_every_cap() {
        let (_, poly) = polytope(vec![0.5, 2.0, 1.0], 0.7, 100.0, 0.0);
        assert_eq!(max_radar_sinr(&poly).1, vec![0.7; 3]);
    }

    #[test]
    fn unreachable_floor_is_infeasible() {
        let (c, poly) = polytope(vec![3.0, 1.0], 1.0, 1.0, 1.5 * (1.0 + 1e-9));
        let err = find_feasible(&c, &poly, InitialSplit::BestGain).unwrap_err();
        assert!(err.is_infeasible());
    }

    #[test]
    fn start_meets_the_floor() {
        let (c, poly) = polytope(vec![3.0, 1.0], 1.0, 2.0, 1.2);
        for split in [InitialSplit::BestGain, InitialSplit::Shared] {
            let p = find_feasible(&c, &poly, split).unwrap();
            assert!(poly.max_violation(&p) <= 1e-9);
            assert!(p.total_comm() > 0.0);
        }
    }
}
