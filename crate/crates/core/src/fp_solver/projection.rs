//! Euclidean projection onto the power polytope.
//!
//! The feasible set is the intersection of
//!
//! * the box `0 <= P <= upper` (per entry; masked entries have upper 0),
//! * the communication budget `sum(w) <= P_c^max`,
//! * the radar budget `sum(P_r) <= P_r^max`,
//! * the radar SINR floor, linear in `P`:
//!   `sum_n xi_n P_r[n] - mu * sum_n gamma_n sum_k w[k][n] >= mu * N`.
//!
//! Two routes are provided. [`ProjectionMethod::Exact`] dualizes only the
//! SINR halfspace: for a multiplier `lambda` the projection of
//! `z + lambda * a` onto box-and-budgets splits into two capped-simplex
//! problems, and `a . x(lambda)` is non-decreasing in `lambda`, so the
//! multiplier is a one-dimensional root. [`ProjectionMethod::Dykstra`] runs
//! Dykstra's alternating projections over the four sets.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coefficients, PowerMatrix};
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMethod {
    #[default]
    Exact,
    Dykstra,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DykstraSettings {
    pub max_sweeps: usize,
    pub tolerance: f64,
}

impl Default for DykstraSettings {
    fn default() -> Self {
        Self {
            max_sweeps: 100_000,
            tolerance: 1e-13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerPolytope {
    n_users: usize,
    n_subcarriers: usize,
    /// Per-entry upper bounds for the communication rows, row-major `[k * N + n]`.
    comm_upper: Vec<f64>,
    radar_upper: Vec<f64>,
    comm_budget: f64,
    radar_budget: f64,
    sinr_floor: f64,
    xi: Vec<f64>,
    gamma: Vec<f64>,
    /// Last SINR multiplier, reused to bracket the next root.
    last_lambda: Cell<f64>,
}

impl PowerPolytope {
    pub fn new(config: &ScenarioConfig, coeffs: &Coefficients) -> Self {
        let k = coeffs.n_users();
        let n = coeffs.n_subcarriers();
        Self {
            n_users: k,
            n_subcarriers: n,
            comm_upper: vec![config.comm_cap_w(); k * n],
            radar_upper: vec![config.radar_cap_w(); n],
            comm_budget: config.comm_budget_w(),
            radar_budget: config.radar_budget_w(),
            sinr_floor: config.sinr_floor_linear(),
            xi: coeffs.xi.clone(),
            gamma: coeffs.gamma.clone(),
            last_lambda: Cell::new(0.0),
        }
    }

    /// Polytope with explicit limits; `sinr_floor` is linear (0 disables it).
    #[allow(clippy::too_many_arguments)]
    pub fn from_limits(
        coeffs: &Coefficients,
        comm_cap: f64,
        radar_cap: f64,
        comm_budget: f64,
        radar_budget: f64,
        sinr_floor: f64,
    ) -> Self {
        let k = coeffs.n_users();
        let n = coeffs.n_subcarriers();
        Self {
            n_users: k,
            n_subcarriers: n,
            comm_upper: vec![comm_cap; k * n],
            radar_upper: vec![radar_cap; n],
            comm_budget,
            radar_budget,
            sinr_floor,
            xi: coeffs.xi.clone(),
            gamma: coeffs.gamma.clone(),
            last_lambda: Cell::new(0.0),
        }
    }

    /// The same polytope with every communication entry outside `owner`
    /// pinned to zero.
    pub fn with_owner_mask(&self, owner: &[Option<usize>]) -> Self {
        let mut out = self.clone();
        for k in 0..self.n_users {
            for n in 0..self.n_subcarriers {
                if owner[n] != Some(k) {
                    out.comm_upper[k * self.n_subcarriers + n] = 0.0;
                }
            }
        }
        out.last_lambda.set(0.0);
        out
    }

    /// Drops the SINR floor.
    pub fn without_sinr_floor(&self) -> Self {
        Self {
            sinr_floor: 0.0,
            ..self.clone()
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn comm_upper(&self, k: usize, n: usize) -> f64 {
        self.comm_upper[k * self.n_subcarriers + n]
    }

    pub fn radar_upper(&self, n: usize) -> f64 {
        self.radar_upper[n]
    }

    pub fn comm_budget(&self) -> f64 {
        self.comm_budget
    }

    pub fn radar_budget(&self) -> f64 {
        self.radar_budget
    }

    pub fn sinr_floor(&self) -> f64 {
        self.sinr_floor
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    fn comm_len(&self) -> usize {
        self.n_users * self.n_subcarriers
    }

    fn sinr_active(&self) -> bool {
        self.sinr_floor > 0.0
    }

    /// Normal `a` and offset `b` of the SINR halfspace `a . x >= b`.
    pub fn sinr_halfspace(&self) -> (Vec<f64>, f64) {
        let n = self.n_subcarriers;
        let mut a = vec![0.0; self.comm_len() + n];
        for k in 0..self.n_users {
            for i in 0..n {
                a[k * n + i] = -self.sinr_floor * self.gamma[i];
            }
        }
        a[self.comm_len()..].copy_from_slice(&self.xi);
        (a, self.sinr_floor * n as f64)
    }

    fn sinr_dot(&self, x: &[f64]) -> f64 {
        let n = self.n_subcarriers;
        let mut comm = 0.0;
        for k in 0..self.n_users {
            for i in 0..n {
                comm += self.gamma[i] * x[k * n + i];
            }
        }
        let radar: f64 = self.xi.iter().zip(&x[self.comm_len()..]).map(|(a, b)| a * b).sum();
        radar - self.sinr_floor * comm
    }

    /// Largest relative constraint violation of `p` (0 when feasible).
    pub fn max_violation(&self, p: &PowerMatrix) -> f64 {
        let x = p.as_slice();
        let n = self.n_subcarriers;
        let mut worst = 0.0f64;
        let rel = |excess: f64, scale: f64| excess / scale.max(f64::MIN_POSITIVE);
        // masked entries (upper bound 0) are checked in absolute terms
        let box_scale = |u: f64| if u > 0.0 { u } else { 1.0 };
        for (i, &v) in x[..self.comm_len()].iter().enumerate() {
            worst = worst.max(-v).max(rel(v - self.comm_upper[i], box_scale(self.comm_upper[i])));
        }
        for (i, &v) in x[self.comm_len()..].iter().enumerate() {
            worst = worst.max(-v).max(rel(v - self.radar_upper[i], box_scale(self.radar_upper[i])));
        }
        worst = worst.max(rel(p.total_comm() - self.comm_budget, self.comm_budget));
        worst = worst.max(rel(p.total_radar() - self.radar_budget, self.radar_budget));
        if self.sinr_active() {
            let signal: f64 = self.xi.iter().zip(p.radar_row()).map(|(a, b)| a * b).sum();
            let denom: f64 = (0..n).map(|i| self.gamma[i] * p.column_comm(i) + 1.0).sum();
            let required = self.sinr_floor * denom;
            worst = worst.max(rel(required - signal, required));
        }
        worst
    }

    pub fn contains(&self, p: &PowerMatrix, rel_tol: f64) -> bool {
        self.max_violation(p) <= rel_tol
    }

    pub fn project(&self, raw: &PowerMatrix, method: ProjectionMethod, dykstra: &DykstraSettings) -> Result<PowerMatrix> {
        if raw.n_users() != self.n_users || raw.n_subcarriers() != self.n_subcarriers {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.n_users + 1, self.n_subcarriers),
                got: format!("{}x{}", raw.n_users() + 1, raw.n_subcarriers()),
            });
        }
        let mut out = vec![0.0; raw.as_slice().len()];
        match method {
            ProjectionMethod::Exact => self.project_exact(raw.as_slice(), &mut out)?,
            ProjectionMethod::Dykstra => self.project_dykstra(raw.as_slice(), &mut out, dykstra)?,
        }
        PowerMatrix::from_rows(self.n_users, self.n_subcarriers, out)
    }

    /// Projection onto box and both budgets (the SINR halfspace ignored).
    fn project_box_budgets(&self, z: &[f64], inv_d: Option<&[f64]>, out: &mut [f64]) {
        let c = self.comm_len();
        let (w_comm, w_radar) = match inv_d {
            Some(w) => (Some(&w[..c]), Some(&w[c..])),
            None => (None, None),
        };
        capped_budget_projection(&z[..c], &self.comm_upper, self.comm_budget, w_comm, &mut out[..c]);
        capped_budget_projection(&z[c..], &self.radar_upper, self.radar_budget, w_radar, &mut out[c..]);
    }

    pub(crate) fn project_exact(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        self.project_exact_weighted(z, None, out)
    }

    /// Projection in the metric `sum_i (x_i - z_i)^2 / inv_d[i]`
    /// (Euclidean when `inv_d` is `None`).
    pub(crate) fn project_exact_weighted(&self, z: &[f64], inv_d: Option<&[f64]>, out: &mut [f64]) -> Result<()> {
        self.project_box_budgets(z, inv_d, out);
        if !self.sinr_active() {
            return Ok(());
        }
        let (a, b) = self.sinr_halfspace();
        let slack0 = self.sinr_dot(out) - b;
        if slack0 >= 0.0 {
            return Ok(());
        }
        // the multiplier moves z along D^{-1} a
        let dir: Vec<f64> = match inv_d {
            Some(w) => a.iter().zip(w).map(|(ai, wi)| ai * wi).collect(),
            None => a.clone(),
        };
        let mut shifted = vec![0.0; z.len()];
        let mut phi = |lambda: f64, out: &mut [f64]| {
            for ((s, zi), di) in shifted.iter_mut().zip(z).zip(&dir) {
                *s = zi + lambda * di;
            }
            self.project_box_budgets(&shifted, inv_d, out);
            self.sinr_dot(out) - b
        };

        let a_norm2: f64 = a.iter().zip(&dir).map(|(u, v)| u * v).sum();
        let mut lo = 0.0;
        let mut f_lo = slack0;
        let guess = self.last_lambda.get();
        let mut hi = if guess > 0.0 { guess } else { -slack0 / a_norm2 };
        let mut f_hi = phi(hi, out);
        let mut doublings = 0;
        while f_hi < 0.0 {
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
            f_hi = phi(hi, out);
            doublings += 1;
            if doublings > 2000 || !hi.is_finite() {
                return Err(Error::ProjectionDiverged {
                    sweeps: doublings,
                    residual: -f_hi,
                });
            }
        }
        let scale = b.abs().max(1.0);
        let (_, hi) = illinois(&mut phi, out, lo, f_lo, hi, f_hi, 1e-14 * scale);
        phi(hi, out);
        self.last_lambda.set(hi);
        Ok(())
    }

    pub(crate) fn project_dykstra(&self, z: &[f64], out: &mut [f64], settings: &DykstraSettings) -> Result<()> {
        self.project_dykstra_weighted(z, None, out, settings)
    }

    pub(crate) fn project_dykstra_weighted(
        &self,
        z: &[f64],
        inv_d: Option<&[f64]>,
        out: &mut [f64],
        settings: &DykstraSettings,
    ) -> Result<()> {
        let len = z.len();
        let c = self.comm_len();
        let (a, b) = self.sinr_halfspace();
        let ones = vec![1.0; len];
        let w = inv_d.unwrap_or(&ones);
        let a_norm2: f64 = a.iter().zip(w).map(|(ai, wi)| ai * ai * wi).sum();
        let w_comm: f64 = w[..c].iter().sum();
        let w_radar: f64 = w[c..].iter().sum();
        let mut x = z.to_vec();
        let mut corrections = vec![vec![0.0; len]; 4];
        let mut y = vec![0.0; len];
        let mut residual = f64::INFINITY;
        for sweep in 0..settings.max_sweeps {
            let prev = x.clone();
            for (set, corr) in corrections.iter_mut().enumerate() {
                for i in 0..len {
                    y[i] = x[i] + corr[i];
                }
                match set {
                    0 => {
                        for i in 0..c {
                            x[i] = y[i].clamp(0.0, self.comm_upper[i]);
                        }
                        for i in c..len {
                            x[i] = y[i].clamp(0.0, self.radar_upper[i - c]);
                        }
                    }
                    1 => {
                        x.copy_from_slice(&y);
                        let excess = y[..c].iter().sum::<f64>() - self.comm_budget;
                        if excess > 0.0 {
                            let shift = excess / w_comm;
                            x[..c].iter_mut().zip(&w[..c]).for_each(|(v, wi)| *v -= shift * wi);
                        }
                    }
                    2 => {
                        x.copy_from_slice(&y);
                        let excess = y[c..].iter().sum::<f64>() - self.radar_budget;
                        if excess > 0.0 {
                            let shift = excess / w_radar;
                            x[c..].iter_mut().zip(&w[c..]).for_each(|(v, wi)| *v -= shift * wi);
                        }
                    }
                    _ => {
                        x.copy_from_slice(&y);
                        if self.sinr_active() {
                            let deficit = b - self.sinr_dot(&y);
                            if deficit > 0.0 {
                                let t = deficit / a_norm2;
                                for i in 0..len {
                                    x[i] += t * a[i] * w[i];
                                }
                            }
                        }
                    }
                }
                for i in 0..len {
                    corr[i] = y[i] - x[i];
                }
            }
            residual = x.iter().zip(&prev).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if sweep > 0 && residual <= settings.tolerance * scale {
                for i in 0..c {
                    out[i] = x[i].clamp(0.0, self.comm_upper[i]);
                }
                for i in c..len {
                    out[i] = x[i].clamp(0.0, self.radar_upper[i - c]);
                }
                return Ok(());
            }
        }
        Err(Error::ProjectionDiverged {
            sweeps: settings.max_sweeps,
            residual,
        })
    }
}

/// Illinois (modified regula falsi) for a non-decreasing piecewise-linear
/// `f` with `f(lo) < 0 <= f(hi)`. Returns the final bracket; `hi` stays on
/// the non-negative side.
fn illinois<F>(f: &mut F, buf: &mut [f64], mut lo: f64, mut f_lo: f64, mut hi: f64, mut f_hi: f64, ftol: f64) -> (f64, f64)
where
    F: FnMut(f64, &mut [f64]) -> f64,
{
    let mut side = 0i8;
    for _ in 0..200 {
        if f_hi <= ftol || hi - lo <= 1e-15 * hi.abs() {
            break;
        }
        let mut mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let f_mid = f(mid, buf);
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    (lo, hi)
}

/// Projects `z` onto `{0 <= x <= upper, sum(x) <= budget}` in the metric
/// `sum_i (x_i - z_i)^2 / inv_d[i]`.
///
/// The solution is `clip(z - nu * inv_d, 0, upper)` with the smallest
/// `nu >= 0` meeting the budget; the clipped sum is piecewise linear in `nu`.
pub(crate) fn capped_budget_projection(z: &[f64], upper: &[f64], budget: f64, inv_d: Option<&[f64]>, out: &mut [f64]) {
    let clip_sum = |nu: f64, out: &mut [f64]| -> f64 {
        let mut s = 0.0;
        match inv_d {
            Some(w) => {
                for (((o, zi), ui), wi) in out.iter_mut().zip(z).zip(upper).zip(w) {
                    *o = (zi - nu * wi).clamp(0.0, *ui);
                    s += *o;
                }
            }
            None => {
                for ((o, zi), ui) in out.iter_mut().zip(z).zip(upper) {
                    *o = (zi - nu).clamp(0.0, *ui);
                    s += *o;
                }
            }
        }
        s
    };
    let total = clip_sum(0.0, out);
    if total <= budget {
        return;
    }
    let hi = match inv_d {
        Some(w) => z.iter().zip(w).fold(0.0f64, |m, (v, wi)| m.max(*v / wi)),
        None => z.iter().fold(0.0f64, |m, v| m.max(*v)),
    };
    let mut g = |nu: f64, out: &mut [f64]| budget - clip_sum(nu, out);
    let (_, nu) = illinois(&mut g, out, 0.0, budget - total, hi, budget, 1e-15 * budget.max(f64::MIN_POSITIVE));
    clip_sum(nu, out);
}
