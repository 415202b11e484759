//! Quadratic-transform fractional programming over the power polytope.
//!
//! The outer loop alternates the closed-form auxiliary update with a
//! concave maximization of the surrogate `Q(., Y)`, solved by projected
//! gradient ascent. Since `Q(P, Y) <= f(P)` with equality at the optimal
//! `Y`, every round is an ascent step for the relaxed sum rate `f`.

pub mod ascent;
pub mod feasible;
pub mod projection;
pub mod quadratic;
mod solve;

pub use ascent::{projected_ascent, AscentOutcome, AscentSettings, Armijo, ConcaveObjective, Projector};
pub use feasible::{find_feasible, max_radar_sinr, InitialSplit};
pub use projection::{DykstraSettings, PowerPolytope, ProjectionMethod};
pub use quadratic::{q_gradient, q_value, update_y, AuxiliaryMatrix};
pub use solve::{
    solve, solve_from, solve_model, solve_no_radar, solve_subproblem, write_trace_csv, SolveResult, SolverSettings,
    TraceEntry,
};
