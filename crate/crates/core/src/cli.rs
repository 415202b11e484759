//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when the radar SINR floor is unreachable,
//! 1 on usage, configuration or I/O errors and failed property checks.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::experiments::{run_sweep, run_sweep_with_baseline, write_csv, SweepKind, SweepSpec};
use crate::fp_solver::{q_value, solve, update_y, write_trace_csv, PowerPolytope, SolveResult, SolverSettings};
use crate::model::{no_sharing_inequality, PowerMatrix, SystemModel};
use crate::oracle::{brute_force, OracleSettings};
use crate::scenario::{generate_channels_seeded, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "rcc-alloc", version, about = "Subcarrier and power allocation for radar/communication coexistence")]
pub struct Cli {
    /// Worker threads for sweeps and oracle runs.
    #[arg(long, global = true, env = "RCC_ALLOC_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario TOML file; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Solver settings TOML file.
    #[arg(long)]
    pub solver: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// File name tag; a Unix timestamp when omitted.
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one scenario and write the allocation and iteration trace.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep one parameter over seeded channel draws.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// mu, pc_max, pr_cap or pc_cap.
        #[arg(long)]
        kind: SweepKind,
        /// Comma-separated dB/dBm values; the kind's default grid when omitted.
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value_t = SweepSpec::DEFAULT_TRIALS)]
        trials: usize,
        /// Also write the no-radar reference table.
        #[arg(long)]
        baseline: bool,
    },
    /// Compare the solver with exhaustive search on small instances.
    OracleCheck {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 9)]
        grid_levels: usize,
        /// Scenario TOML file supplying everything except N and K.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Randomized checks of the no-sharing inequality and transform tightness.
    PropCheck {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the outer-iteration trace of one solve as CSV.
    Trace {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_infeasible() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Solve { scenario, output } => cmd_solve(&scenario, &output),
        Command::Sweep {
            scenario,
            output,
            kind,
            values,
            trials,
            baseline,
        } => cmd_sweep(&scenario, &output, kind, values.as_deref(), trials, baseline),
        Command::OracleCheck {
            n,
            k,
            instances,
            seed,
            grid_levels,
            config,
        } => cmd_oracle_check(n, k, instances, seed, grid_levels, config.as_deref()),
        Command::PropCheck { samples, seed } => cmd_prop_check(samples, seed),
        Command::Trace { scenario, out } => cmd_trace(&scenario, out.as_deref()),
    })
}

fn load_config(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut config = match &args.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    for warning in config.warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(config)
}

fn load_settings(args: &ScenarioArgs) -> Result<SolverSettings> {
    let settings = match &args.solver {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<SolverSettings>(&text)?
        }
        None => SolverSettings::default(),
    };
    settings.validate()?;
    Ok(settings)
}

fn tag_or_timestamp(tag: &Option<String>) -> String {
    match tag {
        Some(t) => t.clone(),
        None => std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
            .to_string(),
    }
}

fn solve_config(args: &ScenarioArgs) -> Result<(ScenarioConfig, SolveResult)> {
    let config = load_config(args)?;
    let settings = load_settings(args)?;
    let channels = generate_channels_seeded(&config, config.seed)?;
    let result = solve(&channels, &config, &settings)?;
    Ok((config, result))
}

fn write_solution(path: &Path, result: &SolveResult) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    out.write_record(["subcarrier", "owner", "comm_power_w", "radar_power_w"])?;
    let a = &result.assignment;
    for n in 0..a.n_subcarriers() {
        let owner = a.owner[n].map_or_else(String::new, |k| k.to_string());
        out.write_record([n.to_string(), owner, a.comm_power[n].to_string(), a.radar_power[n].to_string()])?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_solve(scenario: &ScenarioArgs, output: &OutputArgs) -> Result<i32> {
    let (config, result) = solve_config(scenario)?;
    let tag = tag_or_timestamp(&output.tag);
    std::fs::create_dir_all(&output.out)?;
    let solution_path = output.out.join(format!("solution_{tag}.csv"));
    let trace_path = output.out.join(format!("trace_{tag}.csv"));
    write_solution(&solution_path, &result)?;
    write_trace_csv(std::fs::File::create(&trace_path)?, &result.trace)?;

    let served = result.assignment.owner.iter().filter(|o| o.is_some()).count();
    println!("scenario: N={} K={} seed={}", config.n_subcarriers, config.n_users, config.seed);
    println!("feasible: {}", result.feasible);
    println!("binary sum rate: {:.6} bpcu", result.binary_sum_rate);
    println!("relaxed sum rate: {:.6} bpcu", result.relaxed_sum_rate);
    println!("radar SINR: {:.4} dB (floor {} dB)", result.achieved_sinr_db, config.sinr_floor_db);
    println!("served subcarriers: {served}/{}", config.n_subcarriers);
    println!("iterations: {} outer, {} refinement", result.outer_iterations, result.refine_iterations);
    println!("solution: {}", solution_path.display());
    println!("trace: {}", trace_path.display());
    Ok(0)
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::InvalidArgument("--values is empty".into()));
    }
    Ok(values)
}

fn cmd_sweep(
    scenario: &ScenarioArgs,
    output: &OutputArgs,
    kind: SweepKind,
    values: Option<&str>,
    trials: usize,
    baseline: bool,
) -> Result<i32> {
    let config = load_config(scenario)?;
    let settings = load_settings(scenario)?;
    let mut spec = SweepSpec::new(kind, config);
    if let Some(text) = values {
        spec.values = parse_values(text)?;
    }
    spec.trials = trials;
    spec.validate()?;
    let tag = tag_or_timestamp(&output.tag);
    let rows = if baseline {
        let tables = run_sweep_with_baseline(&spec, &settings)?;
        let path = write_csv(&output.out, kind, &format!("{tag}-no-radar"), &tables.no_radar)?;
        println!("no-radar reference: {}", path.display());
        tables.coexistence
    } else {
        run_sweep(&spec, &settings)?
    };
    let path = write_csv(&output.out, kind, &tag, &rows)?;
    let infeasible = rows.iter().filter(|r| !r.feasible).count();
    println!("sweep {kind}: {} rows ({infeasible} infeasible)", rows.len());
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_oracle_check(n: usize, k: usize, instances: usize, seed: u64, grid_levels: usize, config: Option<&Path>) -> Result<i32> {
    let base = match config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    let config = ScenarioConfig {
        n_subcarriers: n,
        n_users: k,
        ..base
    };
    config.validate()?;
    let settings = SolverSettings::default();
    let oracle = OracleSettings {
        grid_levels,
        ..Default::default()
    };
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for i in 0..instances {
        let instance_seed = seed.wrapping_add(i as u64);
        let channels = generate_channels_seeded(&config, instance_seed)?;
        let truth = match brute_force(&channels, &config, &oracle) {
            Ok(t) => t,
            Err(e) if e.is_infeasible() => {
                println!("instance {i} (seed {instance_seed}): infeasible, skipped");
                continue;
            }
            Err(e) => return Err(e),
        };
        let solver = solve(&channels, &config, &settings)?.binary_sum_rate;
        let ratio = if truth.best_rate > 0.0 { solver / truth.best_rate } else { f64::INFINITY };
        worst = worst.min(ratio);
        checked += 1;
        println!(
            "instance {i} (seed {instance_seed}): solver {solver:.6} oracle {:.6} ratio {ratio:.4}",
            truth.best_rate
        );
    }
    println!("checked {checked}/{instances} instances");
    println!("min(solver/oracle) = {worst:.6}");
    Ok(0)
}

fn cmd_prop_check(samples: usize, seed: u64) -> Result<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp();

    let mut worst_slack = f64::INFINITY;
    for _ in 0..samples {
        let zeta1 = log_uniform(&mut rng, 1e-3, 1e3);
        let zeta2 = zeta1 * log_uniform(&mut rng, 1.0, 1e3);
        let total = log_uniform(&mut rng, 1e-3, 1e4);
        let delta = rng.random::<f64>() * total;
        let eta = 0.5 + 2.5 * rng.random::<f64>();
        let (lhs, rhs) = no_sharing_inequality(zeta1, zeta2, total, delta, eta)?;
        worst_slack = worst_slack.min(lhs - rhs);
    }
    let prop_ok = worst_slack >= -1e-12;
    println!("no-sharing inequality: {samples} samples, min(lhs - rhs) = {worst_slack:e} -> {}", verdict(prop_ok));

    let config = ScenarioConfig {
        n_subcarriers: 16,
        n_users: 4,
        ..Default::default()
    };
    let channels = generate_channels_seeded(&config, seed)?;
    let model = SystemModel::new(&channels, &config)?;
    let polytope = PowerPolytope::new(&config, &model.coeffs);
    let points = samples.min(1000);
    let mut worst_gap = 0.0f64;
    for _ in 0..points {
        let raw: Vec<f64> = (0..(config.n_users + 1) * config.n_subcarriers)
            .map(|_| rng.random::<f64>() * config.comm_cap_w().max(config.radar_cap_w()))
            .collect();
        let raw = PowerMatrix::from_rows(config.n_users, config.n_subcarriers, raw)?;
        let p = polytope.project(&raw, Default::default(), &Default::default())?;
        let y = update_y(&model, &p)?;
        worst_gap = worst_gap.max((q_value(&model, &p, &y)? - model.sum_relaxed_rate(&p)?).abs());
    }
    let tight_ok = worst_gap <= 1e-9;
    println!("transform tightness: {points} points, max |Q - f| = {worst_gap:e} -> {}", verdict(tight_ok));
    Ok(if prop_ok && tight_ok { 0 } else { 1 })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "VIOLATED"
    }
}

fn cmd_trace(scenario: &ScenarioArgs, out: Option<&Path>) -> Result<i32> {
    let (_, result) = solve_config(scenario)?;
    match out {
        Some(path) => write_trace_csv(std::fs::File::create(path)?, &result.trace)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_trace_csv(&mut lock, &result.trace)?;
            lock.flush()?;
        }
    }
    Ok(0)
}
