//! Projected gradient ascent with Armijo backtracking.
//!
//! Trial steps shrink until the sufficient-increase condition
//! `f(x+) >= f(x) + c * g . (x+ - x)` holds, so accepted iterates never
//! decrease the objective. [`projected_ascent`] works in the Euclidean
//! metric with Barzilai-Borwein step estimates; [`scaled_ascent`] uses a
//! diagonal curvature estimate `d` as metric, taking steps
//! `x+ = Proj_D(x + t * g / d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A concave function on a convex domain. `value` returns `None` outside
/// the domain.
pub trait ConcaveObjective {
    fn value(&self, x: &[f64]) -> Option<f64>;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

/// A concave objective that can also report `-diag(Hessian)`.
pub trait CurvedObjective: ConcaveObjective {
    /// Writes positive diagonal curvature estimates into `out`.
    fn curvature(&self, x: &[f64], out: &mut [f64]);
}

pub trait Projector {
    fn project(&self, z: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Projection in the metric `sum_i (x_i - z_i)^2 / inv_d[i]`.
pub trait ScaledProjector {
    fn project_scaled(&self, z: &[f64], inv_d: &[f64], out: &mut [f64]) -> Result<()>;
}

impl<F> Projector for F
where
    F: Fn(&[f64], &mut [f64]) -> Result<()>,
{
    fn project(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        self(z, out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Armijo {
    pub shrink: f64,
    pub sufficient_increase: f64,
}

impl Default for Armijo {
    fn default() -> Self {
        Self {
            shrink: 0.5,
            sufficient_increase: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentSettings {
    /// Stop once the gradient mapping `|x+ - x| / step` falls below this.
    pub tol: f64,
    pub max_iters: usize,
    pub armijo: Armijo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

const MIN_STEP: f64 = 1e-30;
const MAX_STEP: f64 = 1e30;

pub fn projected_ascent<O, P>(objective: &O, projector: &P, x0: &[f64], settings: &AscentSettings) -> Result<AscentOutcome>
where
    O: ConcaveObjective + ?Sized,
    P: Projector + ?Sized,
{
    let len = x0.len();
    let mut x = x0.to_vec();
    let mut f = objective
        .value(&x)
        .ok_or_else(|| Error::InvalidArgument("ascent started outside the objective domain".into()))?;
    let mut g = vec![0.0; len];
    objective.gradient(&x, &mut g);

    let g_norm = norm(&g);
    if g_norm == 0.0 {
        return Ok(AscentOutcome {
            x,
            value: f,
            iterations: 0,
            converged: true,
        });
    }
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3);
    let mut step = (scale / g_norm).clamp(MIN_STEP, MAX_STEP);

    let mut z = vec![0.0; len];
    let mut trial = vec![0.0; len];
    let mut g_new = vec![0.0; len];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iters {
        iterations += 1;
        let accepted = loop {
            for i in 0..len {
                z[i] = x[i] + step * g[i];
            }
            projector.project(&z, &mut trial)?;
            let mut moved = 0.0;
            let mut directional = 0.0;
            for i in 0..len {
                let d = trial[i] - x[i];
                moved += d * d;
                directional += g[i] * d;
            }
            if moved == 0.0 {
                break None;
            }
            match objective.value(&trial) {
                Some(ft) if ft >= f + settings.armijo.sufficient_increase * directional && ft >= f => {
                    break Some((ft, moved.sqrt()));
                }
                _ => {
                    step *= settings.armijo.shrink;
                    if step < MIN_STEP {
                        break None;
                    }
                }
            }
        };
        let Some((ft, moved)) = accepted else {
            converged = true;
            break;
        };
        let mapping = moved / step;

        objective.gradient(&trial, &mut g_new);
        let mut ss = 0.0;
        let mut sy = 0.0;
        for i in 0..len {
            let s = trial[i] - x[i];
            ss += s * s;
            sy += s * (g_new[i] - g[i]);
        }
        // concave objective: s . (g_new - g) <= 0
        step = if sy < 0.0 { ss / -sy } else { step * 4.0 }.clamp(MIN_STEP, MAX_STEP);

        let improvement = ft - f;
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut g, &mut g_new);
        f = ft;
        if mapping < settings.tol || improvement <= 1e-15 * f.abs().max(1.0) {
            converged = mapping < settings.tol;
            break;
        }
    }
    Ok(AscentOutcome {
        x,
        value: f,
        iterations,
        converged,
    })
}

/// Diagonally scaled projected ascent. Stops when the projected gradient
/// `D (x+ - x) / t` has Euclidean norm below `settings.tol`.
pub fn scaled_ascent<O, P>(objective: &O, projector: &P, x0: &[f64], settings: &AscentSettings) -> Result<AscentOutcome>
where
    O: CurvedObjective + ?Sized,
    P: ScaledProjector + ?Sized,
{
    let len = x0.len();
    let mut x = x0.to_vec();
    let mut f = objective
        .value(&x)
        .ok_or_else(|| Error::InvalidArgument("ascent started outside the objective domain".into()))?;
    let mut g = vec![0.0; len];
    let mut d = vec![0.0; len];
    let mut inv_d = vec![0.0; len];
    let mut z = vec![0.0; len];
    let mut trial = vec![0.0; len];
    let mut t = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iters {
        iterations += 1;
        objective.gradient(&x, &mut g);
        objective.curvature(&x, &mut d);
        for i in 0..len {
            inv_d[i] = 1.0 / d[i];
        }
        let accepted = loop {
            for i in 0..len {
                z[i] = x[i] + t * g[i] * inv_d[i];
            }
            projector.project_scaled(&z, &inv_d, &mut trial)?;
            let mut moved = false;
            let mut directional = 0.0;
            for i in 0..len {
                let step = trial[i] - x[i];
                moved |= step != 0.0;
                directional += g[i] * step;
            }
            if !moved {
                break None;
            }
            match objective.value(&trial) {
                Some(ft) if ft >= f + settings.armijo.sufficient_increase * directional && ft >= f => break Some(ft),
                _ => {
                    t *= settings.armijo.shrink;
                    if t < MIN_STEP {
                        break None;
                    }
                }
            }
        };
        let Some(ft) = accepted else {
            converged = true;
            break;
        };
        let mut pg = 0.0;
        for i in 0..len {
            let v = d[i] * (trial[i] - x[i]) / t;
            pg += v * v;
        }
        let improvement = ft - f;
        std::mem::swap(&mut x, &mut trial);
        f = ft;
        if pg.sqrt() < settings.tol {
            converged = true;
            break;
        }
        if improvement <= 1e-15 * f.abs().max(1.0) {
            break;
        }
        t = (t * 2.0).min(1.0);
    }
    Ok(AscentOutcome {
        x,
        value: f,
        iterations,
        converged,
    })
}
