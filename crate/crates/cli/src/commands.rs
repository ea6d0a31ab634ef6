use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use turnpike_core::costs::{elliptic_cost, parabolic_cost, Horizon};
use turnpike_core::domain::io::write_mask;
use turnpike_core::domain::DomainMask;
use turnpike_core::experiments::{
    gamma_convergence_probe, quasi_optimality, restart_seeds, run_sweep, shrinking_hole_schedule,
    summary, SweepConfig,
};
use turnpike_core::optimizer::{optimize, polish, PolishStats};
use turnpike_core::pde::heat::{default_dt, solve_heat_sampled};
use turnpike_core::pde::linalg::SolverOptions;
use turnpike_core::pde::poisson::solve_poisson_with;
use turnpike_core::{Error, ScalarField};

use crate::config::{Equation, RunConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub force: bool,
}

struct Run {
    config: RunConfig,
    seed: u64,
    out: PathBuf,
    jobs: Option<usize>,
}

fn prepare(args: &RunArgs) -> CliResult<Run> {
    let config = RunConfig::load(&args.config)?;
    let out = &args.out;
    if out.exists() {
        if !out.is_dir() {
            return Err(CliError::Usage(format!("{} is not a directory", out.display())));
        }
        let non_empty = fs::read_dir(out)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", out.display())))?
            .next()
            .is_some();
        if non_empty && !args.force {
            return Err(CliError::Usage(format!(
                "output directory {} is not empty (use --force to write into it)",
                out.display()
            )));
        }
    }
    fs::create_dir_all(out).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out.display())))?;
    if args.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    Ok(Run {
        seed: args.seed.or(config.seed).unwrap_or(0),
        config,
        out: out.clone(),
        jobs: args.jobs,
    })
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e).into())
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let json = serde_json::to_string_pretty(value).expect("summary serializes");
    write_text(path, &format!("{json}\n"))
}

#[derive(Serialize)]
struct SolveStats {
    equation: Equation,
    active_cells: usize,
    residual: f64,
    iterations: usize,
    max_value: f64,
    max_abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
}

pub fn cmd_solve(args: &RunArgs) -> CliResult<()> {
    let run = prepare(args)?;
    let grid = run.config.grid;
    let section = run.config.section(&run.config.solve, "solve")?;
    let mask = section.mask.build(&grid, "solve.mask")?;
    let f = section.source.build(&grid, None, "solve.source")?;
    Manifest::new("solve", run.seed, Vec::new(), &run.config).write(&run.out)?;

    let (field, stats) = match section.equation {
        Equation::Poisson => {
            let (u, stats) = solve_poisson_with(&mask, &f, &SolverOptions::default())?;
            (
                u,
                SolveStats {
                    equation: Equation::Poisson,
                    active_cells: mask.active_count(),
                    residual: stats.residual,
                    iterations: stats.iterations,
                    max_value: 0.0,
                    max_abs: 0.0,
                    horizon: None,
                    dt: None,
                    steps: None,
                },
            )
        }
        Equation::Heat => {
            let horizon = section
                .horizon
                .ok_or_else(|| CliError::Config("solve.horizon is required for the heat equation".into()))?;
            let y0 = section.initial.build(&grid, None, "solve.initial")?;
            let dt = section.dt.unwrap_or_else(|| default_dt(&grid, horizon));
            let stride = if section.stride == 0 { usize::MAX } else { section.stride };
            let traj = solve_heat_sampled(&mask, &f, &y0, horizon, dt, stride, &SolverOptions::default())
                .map_err(|e| match e {
                    Error::InvalidInput(msg) => CliError::Config(format!("solve: {msg}")),
                    other => other.into(),
                })?;
            if section.stride > 0 {
                traj.write_csv(&run.out.join("states"))?;
            }
            let steps = ((horizon / traj.dt).round()) as usize;
            (
                traj.final_state().clone(),
                SolveStats {
                    equation: Equation::Heat,
                    active_cells: mask.active_count(),
                    residual: traj.stats.residual,
                    iterations: traj.stats.iterations,
                    max_value: 0.0,
                    max_abs: 0.0,
                    horizon: Some(horizon),
                    dt: Some(traj.dt),
                    steps: Some(steps),
                },
            )
        }
    };
    let stats = SolveStats {
        max_value: field.max_value(),
        max_abs: field.max_abs(),
        ..stats
    };
    field.write_csv(&run.out.join("solution.csv"))?;
    write_json(&run.out.join("stats.json"), &stats)?;
    println!("max value {:.6e}, residual {:.3e}", stats.max_value, stats.residual);
    Ok(())
}

#[derive(Serialize)]
struct OptimizeResult {
    horizon: Horizon,
    initial_cost: f64,
    anneal_cost: f64,
    final_cost: f64,
    best_step: usize,
    evaluations: usize,
    wall_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    polish: Option<PolishStats>,
}

pub fn cmd_optimize(args: &RunArgs) -> CliResult<()> {
    let run = prepare(args)?;
    let grid = run.config.grid;
    let section = run.config.section(&run.config.optimize, "optimize")?;
    let problem = run.config.problem()?;
    let init = section.init.build(&grid, "optimize.init")?;
    let schedule = section.schedule.with_seed(run.seed);
    schedule
        .validate()
        .map_err(|e| CliError::config("optimize.schedule", e))?;
    Manifest::new("optimize", run.seed, Vec::new(), &run.config).write(&run.out)?;

    let target = &problem.target;
    let horizon = section.horizon;
    let dt = section.dt;
    let cost = move |m: &DomainMask| -> turnpike_core::Result<f64> {
        Ok(match horizon {
            Horizon::Stationary => elliptic_cost(m, target)?.value,
            Horizon::Finite(t) => parabolic_cost(m, target, t, dt.unwrap_or_else(|| default_dt(m.grid(), t)))?.value,
        })
    };
    let (annealed, trace) = optimize(&cost, &problem.class, &init, &schedule)?;
    write_text(&run.out.join("trace.csv"), &trace.to_csv())?;
    let (best, polish_stats) = if section.polish {
        let (m, stats) = polish(&cost, &problem.class, &annealed)?;
        (m, Some(stats))
    } else {
        (annealed, None)
    };
    write_mask(&run.out.join("best_mask.txt"), &best)?;
    let result = OptimizeResult {
        horizon,
        initial_cost: trace.initial_cost,
        anneal_cost: trace.best_cost,
        final_cost: polish_stats.map_or(trace.best_cost, |s| s.final_cost),
        best_step: trace.best_step,
        evaluations: trace.evaluations + polish_stats.map_or(0, |s| s.evaluations),
        wall_time_secs: trace.wall_time_secs,
        polish: polish_stats,
    };
    write_json(&run.out.join("result.json"), &result)?;
    println!(
        "initial cost {:.6e}, final cost {:.6e} (ratio {:.3e})",
        result.initial_cost,
        result.final_cost,
        result.final_cost / result.initial_cost
    );
    Ok(())
}

pub fn cmd_sweep(args: &RunArgs) -> CliResult<()> {
    let run = prepare(args)?;
    let grid = run.config.grid;
    let section = run.config.section(&run.config.sweep, "sweep")?;
    let problem = run.config.problem()?;
    let init = section.init.build(&grid, "sweep.init")?;
    let seeds = restart_seeds(run.seed, section.restarts);
    Manifest::new("sweep", run.seed, seeds.clone(), &run.config).write(&run.out)?;

    let config = SweepConfig {
        class: problem.class,
        target: problem.target,
        init,
        horizons: section.horizons.clone(),
        dt: section.dt,
        steady: section.steady.with_seed(0),
        transient: section.transient.with_seed(0),
        polish: section.polish,
        seeds,
        output_dir: Some(run.out.clone()),
        jobs: run.jobs,
    };
    let report = run_sweep(&config).map_err(|e| match e {
        Error::InvalidInput(msg) | Error::InvalidSchedule(msg) => CliError::Config(format!("sweep: {msg}")),
        other => other.into(),
    })?;
    print!("{}", summary(&report));
    match &report.fit {
        Some(fit) => println!("slope = {:?}\nC = {:?}", fit.slope, fit.constant),
        None => eprintln!("warning: fewer than 4 positive gaps, no rate fit"),
    }
    let quasi = quasi_optimality(&report);
    if let Some(fit) = &quasi.fit {
        println!("quasi-gap slope = {:?}", fit.slope);
    }
    Ok(())
}

#[derive(Serialize)]
struct GammaSummary {
    monotone: bool,
    final_zero: bool,
    reduction: f64,
    rows: usize,
}

pub fn cmd_gamma_probe(args: &RunArgs) -> CliResult<()> {
    let run = prepare(args)?;
    let grid = run.config.grid;
    let section = run.config.section(&run.config.gamma_probe, "gamma_probe")?;
    let problem = run.config.problem()?;
    let base = section.base.build(&grid, "gamma_probe.base")?;
    let f: ScalarField = match &section.source {
        Some(spec) => spec.build(&grid, None, "gamma_probe.source")?,
        None => problem.target.f.clone(),
    };
    let schedule = shrinking_hole_schedule(&base, (section.anchor[0], section.anchor[1]), section.max_hole)?;
    Manifest::new("gamma-probe", run.seed, Vec::new(), &run.config).write(&run.out)?;
    let probe = gamma_convergence_probe(&base, &schedule, &problem.class, &f).map_err(|e| match e {
        Error::InvalidInput(msg) => CliError::Config(format!("gamma_probe: {msg}")),
        Error::InadmissiblePerturbation { index } => CliError::Config(format!(
            "gamma_probe: hole of side {} leaves the admissible class",
            section.max_hole - index
        )),
        other => other.into(),
    })?;
    write_text(&run.out.join("gamma.csv"), &probe.to_csv())?;
    let summary = GammaSummary {
        monotone: probe.monotone,
        final_zero: probe.final_zero,
        reduction: probe.reduction(),
        rows: probe.rows.len(),
    };
    write_json(&run.out.join("gamma.json"), &summary)?;
    println!(
        "rows {}, monotone {}, final zero {}, first/last {:e}",
        summary.rows, summary.monotone, summary.final_zero, summary.reduction
    );
    Ok(())
}
