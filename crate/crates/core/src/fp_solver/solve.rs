use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ascent::{scaled_ascent, Armijo, AscentSettings, ScaledProjector};
use super::feasible::{find_feasible, InitialSplit};
use super::projection::{DykstraSettings, PowerPolytope, ProjectionMethod};
use super::quadratic::{update_y, AuxiliaryMatrix, Surrogate};
use crate::error::{Error, Result};
use crate::model::{extract_assignment, Assignment, PowerMatrix, SystemModel};
use crate::scenario::{linear_to_db, ChannelSet, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Relative change of the relaxed sum rate that ends the outer loop.
    pub outer_tol: f64,
    pub max_outer_iters: usize,
    /// Gradient-mapping norm that ends an inner ascent.
    pub inner_tol: f64,
    pub max_inner_iters: usize,
    pub armijo: Armijo,
    pub dykstra: DykstraSettings,
    pub sqrt_floor: f64,
    pub projection: ProjectionMethod,
    /// Re-optimize powers on the rounded assignment.
    pub refine: bool,
    pub initial_split: InitialSplit,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            outer_tol: 1e-6,
            max_outer_iters: 200,
            inner_tol: 1e-7,
            max_inner_iters: 500,
            armijo: Armijo::default(),
            dykstra: DykstraSettings::default(),
            sqrt_floor: 1e-12,
            projection: ProjectionMethod::default(),
            refine: true,
            initial_split: InitialSplit::default(),
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let tolerances = [
            ("outer_tol", self.outer_tol),
            ("inner_tol", self.inner_tol),
            ("dykstra.tolerance", self.dykstra.tolerance),
            ("armijo.shrink", self.armijo.shrink),
            ("armijo.sufficient_increase", self.armijo.sufficient_increase),
        ];
        for (name, v) in tolerances {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(self.sqrt_floor > 0.0 && self.sqrt_floor.is_finite()) {
            return Err(Error::InvalidArgument(format!("sqrt_floor must be positive, got {}", self.sqrt_floor)));
        }
        if self.max_outer_iters == 0 || self.max_inner_iters == 0 || self.dykstra.max_sweeps == 0 {
            return Err(Error::InvalidArgument("iteration limits must be positive".into()));
        }
        Ok(())
    }

    fn ascent(&self) -> AscentSettings {
        AscentSettings {
            tol: self.inner_tol,
            max_iters: self.max_inner_iters,
            armijo: self.armijo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Surrogate value reached by the inner solve (the starting relaxed rate
    /// on iteration 0).
    pub q_value: f64,
    pub sum_rate_bpcu: f64,
    pub sinr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Final single-owner powers.
    pub power: PowerMatrix,
    /// Output of the relaxed outer loop, before rounding.
    pub relaxed_power: PowerMatrix,
    pub assignment: Assignment,
    /// Relaxed objective at `relaxed_power`.
    pub relaxed_sum_rate: f64,
    /// Relaxed objective at the end of the refinement pass, or
    /// `relaxed_sum_rate` when refinement is off.
    pub refined_sum_rate: f64,
    pub binary_sum_rate: f64,
    pub achieved_sinr_db: f64,
    pub feasible: bool,
    pub outer_iterations: usize,
    pub refine_iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub refine_trace: Vec<TraceEntry>,
}

impl SolveResult {
    pub fn total_iterations(&self) -> usize {
        self.outer_iterations + self.refine_iterations
    }
}

struct Projection<'a> {
    polytope: &'a PowerPolytope,
    settings: &'a SolverSettings,
}

impl ScaledProjector for Projection<'_> {
    fn project_scaled(&self, z: &[f64], inv_d: &[f64], out: &mut [f64]) -> Result<()> {
        match self.settings.projection {
            ProjectionMethod::Exact => self.polytope.project_exact_weighted(z, Some(inv_d), out),
            ProjectionMethod::Dykstra => self.polytope.project_dykstra_weighted(z, Some(inv_d), out, &self.settings.dykstra),
        }
    }
}

fn projector<'a>(polytope: &'a PowerPolytope, settings: &'a SolverSettings) -> Projection<'a> {
    Projection { polytope, settings }
}

/// Maximizes `Q(., y)` over the polytope from a feasible `start`.
pub fn solve_subproblem(
    model: &SystemModel,
    polytope: &PowerPolytope,
    y: &AuxiliaryMatrix,
    start: &PowerMatrix,
    settings: &SolverSettings,
) -> Result<PowerMatrix> {
    model.check(start)?;
    let violation = polytope.max_violation(start);
    if violation > 1e-8 {
        return Err(Error::InfeasibleStart { violation });
    }
    super::quadratic::q_value(model, start, y)?;
    let objective = Surrogate::new(model, y, settings.sqrt_floor);
    let out = scaled_ascent(&objective, &projector(polytope, settings), start.as_slice(), &settings.ascent())?;
    PowerMatrix::from_rows(model.n_users(), model.n_subcarriers(), out.x)
}

fn trace_entry(model: &SystemModel, iteration: usize, q_value: f64, sum_rate: f64, p: &PowerMatrix) -> TraceEntry {
    TraceEntry {
        iteration,
        q_value,
        sum_rate_bpcu: sum_rate,
        sinr_db: linear_to_db(model.radar_sinr(p)),
    }
}

/// Outer alternation from `start`. Returns the last iterate and its relaxed
/// sum rate; `trace` receives one entry per round plus the start.
fn fp_rounds(
    model: &SystemModel,
    polytope: &PowerPolytope,
    start: PowerMatrix,
    settings: &SolverSettings,
    trace: &mut Vec<TraceEntry>,
) -> Result<(PowerMatrix, f64)> {
    let ascent = settings.ascent();
    let project = projector(polytope, settings);
    let mut p = start;
    let mut f = model.sum_relaxed_rate(&p)?;
    trace.push(trace_entry(model, 0, f, f, &p));
    for it in 1..=settings.max_outer_iters {
        let y = update_y(model, &p)?;
        let objective = Surrogate::new(model, &y, settings.sqrt_floor);
        let out = scaled_ascent(&objective, &project, p.as_slice(), &ascent)?;
        let next = PowerMatrix::from_rows(model.n_users(), model.n_subcarriers(), out.x)?;
        let f_next = model.sum_relaxed_rate(&next)?;
        trace.push(trace_entry(model, it, out.value, f_next, &next));
        let change = (f_next - f).abs();
        p = next;
        f = f_next;
        if change <= settings.outer_tol * f.abs() || f == 0.0 {
            break;
        }
    }
    Ok((p, f))
}

fn binary_power(model: &SystemModel, assignment: &Assignment) -> Result<(PowerMatrix, f64)> {
    let p = assignment.to_power_matrix(model.n_users())?;
    let rate = model.sum_relaxed_rate(&p)?;
    Ok((p, rate))
}

fn comm_cap(polytope: &PowerPolytope) -> f64 {
    let mut cap = 0.0f64;
    for k in 0..polytope.n_users() {
        for n in 0..polytope.n_subcarriers() {
            cap = cap.max(polytope.comm_upper(k, n));
        }
    }
    cap
}

fn solve_inner(model: &SystemModel, polytope: &PowerPolytope, start: PowerMatrix, settings: &SolverSettings) -> Result<SolveResult> {
    settings.validate()?;
    model.check(&start)?;
    let mut trace = Vec::new();
    let (relaxed_power, relaxed_sum_rate) = fp_rounds(model, polytope, start, settings, &mut trace)?;
    let cap = comm_cap(polytope);
    let rounded = extract_assignment(&relaxed_power, cap);

    let mut refine_trace = Vec::new();
    let (assignment, refined_sum_rate) = if settings.refine {
        let masked = polytope.with_owner_mask(&rounded.owner);
        let (mut start, _) = binary_power(model, &rounded)?;
        if masked.max_violation(&start) > 1e-9 {
            start = masked.project(&start, ProjectionMethod::Exact, &settings.dykstra)?;
        }
        let (refined, rate) = fp_rounds(model, &masked, start, settings, &mut refine_trace)?;
        (extract_assignment(&refined, cap), rate)
    } else {
        (rounded, relaxed_sum_rate)
    };
    let (power, binary_sum_rate) = binary_power(model, &assignment)?;
    let feasible = polytope.contains(&power, 1e-8);
    Ok(SolveResult {
        achieved_sinr_db: linear_to_db(model.radar_sinr(&power)),
        feasible,
        outer_iterations: trace.len() - 1,
        refine_iterations: refine_trace.len().saturating_sub(1),
        power,
        relaxed_power,
        assignment,
        relaxed_sum_rate,
        refined_sum_rate,
        binary_sum_rate,
        trace,
        refine_trace,
    })
}

/// Runs the solver on an explicit model and constraint set, starting from
/// [`find_feasible`].
pub fn solve_model(model: &SystemModel, polytope: &PowerPolytope, settings: &SolverSettings) -> Result<SolveResult> {
    let start = find_feasible(&model.coeffs, polytope, settings.initial_split)?;
    solve_inner(model, polytope, start, settings)
}

pub fn solve(channels: &ChannelSet, config: &ScenarioConfig, settings: &SolverSettings) -> Result<SolveResult> {
    config.validate()?;
    channels.check_matches(config)?;
    let model = SystemModel::new(channels, config)?;
    let polytope = PowerPolytope::new(config, &model.coeffs);
    solve_model(&model, &polytope, settings)
}

/// Like [`solve`] but starts from `start`, projected onto the constraint set
/// first if it lies outside.
pub fn solve_from(
    channels: &ChannelSet,
    config: &ScenarioConfig,
    start: &PowerMatrix,
    settings: &SolverSettings,
) -> Result<SolveResult> {
    config.validate()?;
    channels.check_matches(config)?;
    let model = SystemModel::new(channels, config)?;
    model.check(start)?;
    let polytope = PowerPolytope::new(config, &model.coeffs);
    let (best, _) = super::feasible::max_radar_sinr(&polytope);
    if polytope.sinr_floor() > 0.0 && best < polytope.sinr_floor() {
        return Err(Error::infeasible(best));
    }
    let start = if polytope.max_violation(start) > 1e-9 {
        polytope.project(start, ProjectionMethod::Exact, &settings.dykstra)?
    } else {
        start.clone()
    };
    solve_inner(&model, &polytope, start, settings)
}

/// The same scenario with the radar switched off: no radar-to-user
/// interference and no SINR floor.
pub fn solve_no_radar(channels: &ChannelSet, config: &ScenarioConfig, settings: &SolverSettings) -> Result<SolveResult> {
    let config = ScenarioConfig {
        sinr_floor_db: f64::NEG_INFINITY,
        ..config.clone()
    };
    solve(&channels.without_radar_interference(), &config, settings)
}

/// Writes `iteration,q_value,sum_rate_bpcu,sinr_db` rows.
pub fn write_trace_csv<W: Write>(writer: W, trace: &[TraceEntry]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for entry in trace {
        out.serialize(entry)?;
    }
    out.flush()?;
    Ok(())
}
