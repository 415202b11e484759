//! Seeded parameter sweeps over many channel draws.
//!
//! Within a trial the channels stay fixed while one parameter moves. Values
//! are visited from the most to the least constrained setting, and each
//! point keeps the better of a cold solve and a solve warm-started from the
//! previous point's allocation, which is still feasible there. Rows come out
//! value-major, trial-minor, whatever order the parallel trials finish in.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp_solver::{max_radar_sinr, solve, solve_from, PowerPolytope, SolveResult, SolverSettings};
use crate::model::{Coefficients, PowerMatrix};
use crate::scenario::{generate_channels_seeded, linear_to_db, ChannelSet, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Radar SINR floor, dB.
    Mu,
    /// Communication power budget, dBm.
    PcMax,
    /// Radar per-subcarrier cap, dBm.
    PrCap,
    /// Communication per-subcarrier cap, dBm.
    PcCap,
}

impl SweepKind {
    pub const ALL: [SweepKind; 4] = [SweepKind::Mu, SweepKind::PcMax, SweepKind::PrCap, SweepKind::PcCap];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Mu => "mu",
            SweepKind::PcMax => "pc_max",
            SweepKind::PrCap => "pr_cap",
            SweepKind::PcCap => "pc_cap",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepKind::Mu => vec![12.0, 16.0, 20.0, 24.0, 28.0],
            SweepKind::PcMax => (0..=5).map(|i| 40.0 + 2.0 * i as f64).collect(),
            SweepKind::PrCap | SweepKind::PcCap => (0..=5).map(|i| 20.0 + 2.0 * i as f64).collect(),
        }
    }

    /// `base` with the swept field set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut config = base.clone();
        match self {
            SweepKind::Mu => config.sinr_floor_db = value,
            SweepKind::PcMax => config.p_c_max_dbm = value,
            SweepKind::PrCap => config.p_r_cap_dbm = value,
            SweepKind::PcCap => config.p_c_cap_dbm = value,
        }
        config
    }

    /// Raising the SINR floor shrinks the feasible set; raising any power
    /// limit grows it.
    fn tightens_with_value(self) -> bool {
        matches!(self, SweepKind::Mu)
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sweep kind `{s}` (expected mu, pc_max, pr_cap or pc_cap)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub values: Vec<f64>,
    pub trials: usize,
    pub base: ScenarioConfig,
    pub seed_base: u64,
}

impl SweepSpec {
    pub const DEFAULT_TRIALS: usize = 20;

    pub fn new(kind: SweepKind, base: ScenarioConfig) -> Self {
        Self {
            kind,
            values: kind.default_values(),
            trials: Self::DEFAULT_TRIALS,
            seed_base: base.seed,
            base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one value".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sweep values must be finite".into()));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("sweep values must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("sweep needs at least one trial".into()));
        }
        self.base.validate()?;
        for &v in &self.values {
            self.kind.apply(&self.base, v).validate()?;
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed_base.wrapping_add(trial as u64)
    }

    pub fn channels(&self, trial: usize) -> Result<ChannelSet> {
        generate_channels_seeded(&self.base, self.trial_seed(trial))
    }

    /// Value indices from most to least constrained.
    fn continuation_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        if self.kind.tightens_with_value() {
            order.reverse();
        }
        order
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_kind: SweepKind,
    pub value_db: f64,
    pub trial: usize,
    /// Binary sum rate; 0 when infeasible.
    pub sum_rate_bpcu: f64,
    /// Achieved radar SINR, or the best reachable one when infeasible.
    pub sinr_db: f64,
    pub feasible: bool,
    pub iterations: usize,
}

pub const CSV_HEADER: &str = "sweep_kind,value_db,trial,sum_rate_bpcu,sinr_db,feasible,iterations";

/// Outcome of one sweep point.
#[derive(Debug, Clone)]
pub enum PointOutcome {
    Solved(Box<SolveResult>),
    Infeasible { max_sinr_db: f64 },
}

impl PointOutcome {
    pub fn result(&self) -> Option<&SolveResult> {
        match self {
            PointOutcome::Solved(r) => Some(r),
            PointOutcome::Infeasible { .. } => None,
        }
    }

    fn row(&self, kind: SweepKind, value: f64, trial: usize) -> SweepRow {
        match self {
            PointOutcome::Solved(r) => SweepRow {
                sweep_kind: kind,
                value_db: value,
                trial,
                sum_rate_bpcu: r.binary_sum_rate,
                sinr_db: r.achieved_sinr_db,
                feasible: r.feasible,
                iterations: r.total_iterations(),
            },
            PointOutcome::Infeasible { max_sinr_db } => SweepRow {
                sweep_kind: kind,
                value_db: value,
                trial,
                sum_rate_bpcu: 0.0,
                sinr_db: *max_sinr_db,
                feasible: false,
                iterations: 0,
            },
        }
    }
}

/// Both tables of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTables {
    pub coexistence: Vec<SweepRow>,
    pub no_radar: Vec<SweepRow>,
}

fn better(a: SolveResult, b: Option<SolveResult>) -> SolveResult {
    match b {
        Some(b) if b.binary_sum_rate > a.binary_sum_rate => b,
        _ => a,
    }
}

fn best_of(channels: &ChannelSet, config: &ScenarioConfig, starts: &[&PowerMatrix], settings: &SolverSettings) -> Result<SolveResult> {
    let mut best = solve(channels, config, settings)?;
    for start in starts {
        let warm = solve_from(channels, config, start, settings)?;
        best = better(best, Some(warm));
    }
    Ok(best)
}

fn max_sinr_db(channels: &ChannelSet, config: &ScenarioConfig) -> Result<f64> {
    let coeffs = Coefficients::new(channels, config)?;
    let (best, _) = max_radar_sinr(&PowerPolytope::new(config, &coeffs));
    Ok(linear_to_db(best))
}

/// Coexistence solutions of one trial, indexed like `spec.values`.
pub fn run_trial(spec: &SweepSpec, trial: usize, settings: &SolverSettings) -> Result<Vec<PointOutcome>> {
    let channels = spec.channels(trial)?;
    let mut out: Vec<Option<PointOutcome>> = vec![None; spec.values.len()];
    let mut previous: Option<PowerMatrix> = None;
    for i in spec.continuation_order() {
        let config = spec.kind.apply(&spec.base, spec.values[i]);
        let starts: Vec<&PowerMatrix> = previous.iter().collect();
        match best_of(&channels, &config, &starts, settings) {
            Ok(result) => {
                previous = Some(result.power.clone());
                out[i] = Some(PointOutcome::Solved(Box::new(result)));
            }
            Err(e) if e.is_infeasible() => {
                out[i] = Some(PointOutcome::Infeasible {
                    max_sinr_db: max_sinr_db(&channels, &config)?,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out.into_iter().map(|o| o.expect("every value visited")).collect())
}

/// No-radar solutions of one trial given its coexistence solutions, which
/// seed extra warm starts so the baseline never falls below them.
fn baseline_trial(spec: &SweepSpec, trial: usize, coexistence: &[PointOutcome], settings: &SolverSettings) -> Result<Vec<SolveResult>> {
    let channels = spec.channels(trial)?.without_radar_interference();
    let no_floor = |config: ScenarioConfig| ScenarioConfig {
        sinr_floor_db: f64::NEG_INFINITY,
        ..config
    };
    if spec.kind == SweepKind::Mu {
        // the floor is the only swept field, so one problem covers every value
        let config = no_floor(spec.base.clone());
        let starts: Vec<&PowerMatrix> = coexistence.iter().filter_map(|o| o.result()).map(|r| &r.power).collect();
        let result = best_of(&channels, &config, &starts, settings)?;
        return Ok(vec![result; spec.values.len()]);
    }
    let mut out: Vec<Option<SolveResult>> = vec![None; spec.values.len()];
    let mut previous: Option<PowerMatrix> = None;
    for i in spec.continuation_order() {
        let config = no_floor(spec.kind.apply(&spec.base, spec.values[i]));
        let mut starts: Vec<&PowerMatrix> = previous.iter().collect();
        if let Some(r) = coexistence[i].result() {
            starts.push(&r.power);
        }
        let result = best_of(&channels, &config, &starts, settings)?;
        previous = Some(result.power.clone());
        out[i] = Some(result);
    }
    Ok(out.into_iter().map(|o| o.expect("every value visited")).collect())
}

fn collect_rows(spec: &SweepSpec, per_trial: &[Vec<SweepRow>]) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(spec.values.len() * spec.trials);
    for i in 0..spec.values.len() {
        for trial_rows in per_trial {
            rows.push(trial_rows[i].clone());
        }
    }
    rows
}

fn coexistence_rows(spec: &SweepSpec, trial: usize, outcomes: &[PointOutcome]) -> Vec<SweepRow> {
    outcomes
        .iter()
        .zip(&spec.values)
        .map(|(o, &v)| o.row(spec.kind, v, trial))
        .collect()
}

pub fn run_sweep(spec: &SweepSpec, settings: &SolverSettings) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let per_trial = (0..spec.trials)
        .into_par_iter()
        .map(|trial| Ok(coexistence_rows(spec, trial, &run_trial(spec, trial, settings)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_rows(spec, &per_trial))
}

/// The sweep with radar-to-user interference removed and no SINR floor.
pub fn no_radar_baseline(spec: &SweepSpec, settings: &SolverSettings) -> Result<Vec<SweepRow>> {
    Ok(run_sweep_with_baseline(spec, settings)?.no_radar)
}

pub fn run_sweep_with_baseline(spec: &SweepSpec, settings: &SolverSettings) -> Result<SweepTables> {
    spec.validate()?;
    let per_trial = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let outcomes = run_trial(spec, trial, settings)?;
            let baseline = baseline_trial(spec, trial, &outcomes, settings)?;
            let base_rows = baseline
                .into_iter()
                .zip(&spec.values)
                .map(|(r, &v)| PointOutcome::Solved(Box::new(r)).row(spec.kind, v, trial))
                .collect();
            Ok((coexistence_rows(spec, trial, &outcomes), base_rows))
        })
        .collect::<Result<Vec<(Vec<SweepRow>, Vec<SweepRow>)>>>()?;
    let (coex, base): (Vec<_>, Vec<_>) = per_trial.into_iter().unzip();
    Ok(SweepTables {
        coexistence: collect_rows(spec, &coex),
        no_radar: collect_rows(spec, &base),
    })
}

/// `<sweep_kind>_<tag>.csv`.
pub fn csv_file_name(kind: SweepKind, tag: &str) -> String {
    format!("{}_{tag}.csv", kind.as_str())
}

pub fn write_rows<W: std::io::Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        out.write_record(CSV_HEADER.split(','))?;
    }
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `rows` to `dir/<sweep_kind>_<tag>.csv` and returns the path.
pub fn write_csv(dir: &Path, kind: SweepKind, tag: &str, rows: &[SweepRow]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(csv_file_name(kind, tag));
    write_rows(std::fs::File::create(&path)?, rows)?;
    Ok(path)
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::InvalidArgument(format!("unexpected CSV header `{header}`")));
    }
    Ok(reader.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?)
}

/// Per-trial curves of a value-major table: `curves[trial][value_index]`.
pub fn curves_by_trial(rows: &[SweepRow], n_values: usize, trials: usize) -> Vec<Vec<&SweepRow>> {
    let mut out = vec![Vec::with_capacity(n_values); trials];
    for row in rows {
        if row.trial < trials {
            out[row.trial].push(row);
        }
    }
    out
}
