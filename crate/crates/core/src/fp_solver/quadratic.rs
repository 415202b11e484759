//! Quadratic transform of the relaxed sum rate.
//!
//! Each ratio `A / B` with `A = alpha * w[k][n]` and
//! `B = beta * P_r[n] + penalty + 1` is replaced by `2 y sqrt(A) - y^2 B`.
//! For fixed `y >= 0` the resulting surrogate
//!
//! ```text
//! Q(P, Y) = sum_{n,k} log2(1 + 2 y[n][k] sqrt(A) - y[n][k]^2 B)
//! ```
//!
//! is concave in `P`, lower-bounds the relaxed sum rate, and touches it at
//! `y = sqrt(A) / B`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{InterferenceGain, PowerMatrix, SystemModel};

use super::ascent::{ConcaveObjective, CurvedObjective};

/// Quadratic-transform auxiliaries, indexed `[n * K + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryMatrix {
    n_subcarriers: usize,
    n_users: usize,
    y: Vec<f64>,
}

impl AuxiliaryMatrix {
    pub fn zeros(n_subcarriers: usize, n_users: usize) -> Self {
        Self {
            n_subcarriers,
            n_users,
            y: vec![0.0; n_subcarriers * n_users],
        }
    }

    pub fn from_vec(n_subcarriers: usize, n_users: usize, y: Vec<f64>) -> Result<Self> {
        if y.len() != n_subcarriers * n_users {
            return Err(Error::DimensionMismatch {
                expected: format!("{} auxiliaries", n_subcarriers * n_users),
                got: format!("{}", y.len()),
            });
        }
        if y.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("auxiliaries must be finite and non-negative".into()));
        }
        Ok(Self {
            n_subcarriers,
            n_users,
            y,
        })
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.y[n * self.n_users + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.y
    }

    fn check(&self, model: &SystemModel) -> Result<()> {
        if self.n_subcarriers != model.n_subcarriers() || self.n_users != model.n_users() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} auxiliaries", model.n_subcarriers(), model.n_users()),
                got: format!("{}x{}", self.n_subcarriers, self.n_users),
            });
        }
        Ok(())
    }
}

/// Optimal auxiliaries for fixed powers: `y = sqrt(A) / B`.
pub fn update_y(model: &SystemModel, p: &PowerMatrix) -> Result<AuxiliaryMatrix> {
    model.check(p)?;
    let n_sub = model.n_subcarriers();
    let k_users = model.n_users();
    let mut y = vec![0.0; n_sub * k_users];
    for n in 0..n_sub {
        let col = p.column_comm(n);
        let wcol = model.weighted_column(p, n);
        for k in 0..k_users {
            let a = model.coeffs.alpha(n, k) * p.comm(k, n);
            y[n * k_users + k] = a.sqrt() / model.denominator(p, n, k, col, wcol);
        }
    }
    Ok(AuxiliaryMatrix {
        n_subcarriers: n_sub,
        n_users: k_users,
        y,
    })
}

/// Column-wise evaluation kernel over a flat `(K + 1) x N` slice.
struct Kernel<'a> {
    model: &'a SystemModel,
    y: &'a AuxiliaryMatrix,
    n_sub: usize,
    k_users: usize,
}

impl<'a> Kernel<'a> {
    fn new(model: &'a SystemModel, y: &'a AuxiliaryMatrix) -> Self {
        Self {
            model,
            y,
            n_sub: model.n_subcarriers(),
            k_users: model.n_users(),
        }
    }

    #[inline]
    fn w(&self, x: &[f64], k: usize, n: usize) -> f64 {
        x[k * self.n_sub + n]
    }

    /// Log arguments of subcarrier `n`, written into `args`.
    fn column_args(&self, x: &[f64], n: usize, args: &mut [f64]) -> Result<()> {
        let coeffs = &self.model.coeffs;
        let eta = self.model.eta;
        let radar = x[self.k_users * self.n_sub + n];
        let mut col = 0.0;
        let mut weighted = 0.0;
        for k in 0..self.k_users {
            let w = self.w(x, k, n);
            col += w;
            weighted += coeffs.alpha(n, k) * w;
        }
        for k in 0..self.k_users {
            let y = self.y.get(n, k);
            if y == 0.0 {
                args[k] = 1.0;
                continue;
            }
            let w = self.w(x, k, n);
            let alpha = coeffs.alpha(n, k);
            let others = match self.model.gain {
                InterferenceGain::Receiver => alpha * (col - w),
                InterferenceGain::Transmitter => weighted - alpha * w,
            };
            let denom = coeffs.beta(n, k) * radar + eta * others.max(0.0) + 1.0;
            let arg = 1.0 + 2.0 * y * (alpha * w.max(0.0)).sqrt() - y * y * denom;
            if !(arg > 0.0) {
                return Err(Error::Domain {
                    subcarrier: n,
                    user: k,
                    value: arg,
                });
            }
            args[k] = arg;
        }
        Ok(())
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let mut args = vec![0.0; self.k_users];
        let mut total = 0.0;
        for n in 0..self.n_sub {
            self.column_args(x, n, &mut args)?;
            total += args.iter().map(|a| a.ln()).sum::<f64>();
        }
        Ok(total / LN_2)
    }

    /// `-diag` of the Hessian, floored at `1e-8` of its median positive entry.
    fn curvature(&self, x: &[f64], sqrt_floor: f64, out: &mut [f64]) -> Result<()> {
        let coeffs = &self.model.coeffs;
        let eta = self.model.eta;
        let mut args = vec![0.0; self.k_users];
        for n in 0..self.n_sub {
            self.column_args(x, n, &mut args)?;
            let mut s_alpha = 0.0;
            let mut s_one = 0.0;
            let mut radar = 0.0;
            for k in 0..self.k_users {
                let y2a = self.y.get(n, k).powi(2) / args[k];
                s_alpha += (y2a * coeffs.alpha(n, k)).powi(2);
                s_one += y2a * y2a;
                radar += (y2a * coeffs.beta(n, k)).powi(2);
            }
            out[self.k_users * self.n_sub + n] = radar / LN_2;
            for k in 0..self.k_users {
                let y = self.y.get(n, k);
                let alpha = coeffs.alpha(n, k);
                let y2a = y * y / args[k];
                let own = if y > 0.0 {
                    let w = self.w(x, k, n).max(sqrt_floor);
                    let first = y * alpha.sqrt() / (w.sqrt() * args[k]);
                    y * alpha.sqrt() / (2.0 * w * w.sqrt() * args[k]) + first * first
                } else {
                    0.0
                };
                let cross = match self.model.gain {
                    InterferenceGain::Receiver => eta * eta * (s_alpha - (y2a * alpha).powi(2)).max(0.0),
                    InterferenceGain::Transmitter => eta * eta * alpha * alpha * (s_one - y2a * y2a).max(0.0),
                };
                out[k * self.n_sub + n] = (own + cross) / LN_2;
            }
        }
        let mut positive: Vec<f64> = out.iter().copied().filter(|v| *v > 0.0).collect();
        let floor = if positive.is_empty() {
            1.0
        } else {
            let mid = positive.len() / 2;
            1e-8 * *positive.select_nth_unstable_by(mid, f64::total_cmp).1
        };
        out.iter_mut().for_each(|v| *v = v.max(floor));
        Ok(())
    }

    fn gradient(&self, x: &[f64], sqrt_floor: f64, out: &mut [f64]) -> Result<()> {
        let coeffs = &self.model.coeffs;
        let eta = self.model.eta;
        let mut args = vec![0.0; self.k_users];
        for n in 0..self.n_sub {
            self.column_args(x, n, &mut args)?;
            // t_sum: sum_j y_j^2 alpha_j / A_j (receiver form)
            // u_sum: sum_j y_j^2 / A_j (transmitter form)
            let mut t_sum = 0.0;
            let mut u_sum = 0.0;
            let mut radar = 0.0;
            for k in 0..self.k_users {
                let y = self.y.get(n, k);
                let y2a = y * y / args[k];
                t_sum += y2a * coeffs.alpha(n, k);
                u_sum += y2a;
                radar -= y2a * coeffs.beta(n, k);
            }
            out[self.k_users * self.n_sub + n] = radar / LN_2;
            for k in 0..self.k_users {
                let y = self.y.get(n, k);
                let alpha = coeffs.alpha(n, k);
                let own = if y > 0.0 {
                    y * alpha.sqrt() / (self.w(x, k, n).max(sqrt_floor).sqrt() * args[k])
                } else {
                    0.0
                };
                let y2a = y * y / args[k];
                let cross = match self.model.gain {
                    InterferenceGain::Receiver => eta * (t_sum - y2a * alpha),
                    InterferenceGain::Transmitter => eta * alpha * (u_sum - y2a),
                };
                out[k * self.n_sub + n] = (own - cross) / LN_2;
            }
        }
        Ok(())
    }
}

pub fn q_value(model: &SystemModel, p: &PowerMatrix, y: &AuxiliaryMatrix) -> Result<f64> {
    model.check(p)?;
    y.check(model)?;
    Kernel::new(model, y).value(p.as_slice())
}

/// Gradient of [`q_value`] with respect to every entry of `P`. The
/// `sqrt(w)` derivative is evaluated at `max(w, sqrt_floor)`.
pub fn q_gradient(model: &SystemModel, p: &PowerMatrix, y: &AuxiliaryMatrix, sqrt_floor: f64) -> Result<PowerMatrix> {
    model.check(p)?;
    y.check(model)?;
    let mut out = PowerMatrix::zeros(model.n_users(), model.n_subcarriers());
    Kernel::new(model, y).gradient(p.as_slice(), sqrt_floor, out.as_mut_slice())?;
    Ok(out)
}

/// `Q(., Y)` as an ascent objective over flat power matrices.
pub(crate) struct Surrogate<'a> {
    kernel: Kernel<'a>,
    sqrt_floor: f64,
}

impl<'a> Surrogate<'a> {
    pub(crate) fn new(model: &'a SystemModel, y: &'a AuxiliaryMatrix, sqrt_floor: f64) -> Self {
        Self {
            kernel: Kernel::new(model, y),
            sqrt_floor,
        }
    }
}

impl ConcaveObjective for Surrogate<'_> {
    fn value(&self, x: &[f64]) -> Option<f64> {
        self.kernel.value(x).ok()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        // only called at points where `value` succeeded
        if self.kernel.gradient(x, self.sqrt_floor, out).is_err() {
            out.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

impl CurvedObjective for Surrogate<'_> {
    fn curvature(&self, x: &[f64], out: &mut [f64]) {
        if self.kernel.curvature(x, self.sqrt_floor, out).is_err() {
            out.iter_mut().for_each(|v| *v = 1.0);
        }
    }
}
