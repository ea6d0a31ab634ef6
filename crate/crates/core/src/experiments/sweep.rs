use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costs::{elliptic_cost, parabolic_cost, TrackingTarget};
use crate::domain::distance::complementary_hausdorff;
use crate::domain::io::write_mask;
use crate::domain::mask::DomainMask;
use crate::domain::topology::AdmissibleClass;
use crate::error::{Error, Result};
use crate::experiments::plot::loglog_svg;
use crate::experiments::rate::{fit_rate, RateFit};
use crate::optimizer::{optimize, polish, AnnealSchedule};
use crate::pde::heat::default_dt;

/// Absolute slack added to the restart spread so that a sweep whose
/// restarts all agree still tolerates last-digit differences.
pub const NOISE_FLOOR_EPS: f64 = 1e-12;

pub const MIN_RESTARTS: usize = 3;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub class: AdmissibleClass,
    pub target: TrackingTarget,
    /// Starting mask shared by all restarts of the stationary search.
    pub init: DomainMask,
    pub horizons: Vec<f64>,
    /// Fixed time step; `None` uses [`default_dt`] per horizon.
    pub dt: Option<f64>,
    /// Schedule for the stationary problem (its seed is replaced per restart).
    pub steady: AnnealSchedule,
    /// Schedule for each finite-horizon problem, warm-started from the
    /// restart's stationary optimum.
    pub transient: AnnealSchedule,
    pub polish: bool,
    /// One seed per restart.
    pub seeds: Vec<u64>,
    pub output_dir: Option<PathBuf>,
    /// Worker threads; `None` uses all available cores.
    pub jobs: Option<usize>,
}

/// Derives `count` restart seeds from a single run seed.
pub fn restart_seeds(run_seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Seed for horizon `k` of the restart seeded with `seed`.
pub fn horizon_seed(seed: u64, k: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64 + 1);
    rng.next_u64()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() {
            return Err(Error::InvalidInput("no horizons given".into()));
        }
        if let Some(t) = self.horizons.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::InvalidInput(format!("horizon {t} is not positive")));
        }
        if self.horizons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("horizons must be strictly increasing".into()));
        }
        if self.seeds.len() < MIN_RESTARTS {
            return Err(Error::InvalidInput(format!(
                "at least {MIN_RESTARTS} restarts required, got {}",
                self.seeds.len()
            )));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidInput(format!("time step {dt} is not positive")));
            }
        }
        self.steady.validate()?;
        self.transient.validate()?;
        self.init.grid().ensure_same(self.class.omega().grid())?;
        self.init.grid().ensure_same(self.target.omega.grid())
    }

    pub fn dt_for(&self, horizon: f64) -> f64 {
        self.dt.unwrap_or_else(|| default_dt(self.init.grid(), horizon))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestartResult {
    pub restart: usize,
    pub seed: u64,
    pub cost: f64,
    pub anneal_cost: f64,
    pub evaluations: usize,
    #[serde(skip)]
    pub mask: Option<DomainMask>,
}

impl RestartResult {
    fn mask(&self) -> &DomainMask {
        self.mask.as_ref().expect("sweep results keep their masks")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub horizon: f64,
    /// `J^T(Ω_T)`, best over restarts.
    pub j_t: f64,
    /// `J^s(Ω^s)`, best over restarts.
    pub j_s: f64,
    /// `|J^T - J^s|`.
    pub gap: f64,
    /// `d_{H^c}(Ω_T, Ω^s)` for the best stationary mask.
    pub hc_best: f64,
    /// Smallest `d_{H^c}` from `Ω_T` to any restart's stationary mask.
    pub hc_nearest: f64,
    /// `J^T(Ω^s)`.
    pub j_t_of_s: f64,
    /// `J^T(Ω^s) - J^T(Ω_T)`.
    pub quasi_gap: f64,
    /// `J^s(Ω_T)`.
    pub j_s_of_t: f64,
    pub best_restart: usize,
    pub seeds: Vec<u64>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "horizon,j_t,j_s,gap,hc_best,hc_nearest,j_t_of_s,quasi_gap,j_s_of_t,best_restart,seeds";

    pub fn to_csv(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{},{}",
            self.horizon,
            self.j_t,
            self.j_s,
            self.gap,
            self.hc_best,
            self.hc_nearest,
            self.j_t_of_s,
            self.quasi_gap,
            self.j_s_of_t,
            self.best_restart,
            seeds.join(";")
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub steady: Vec<RestartResult>,
    pub best_steady: usize,
    /// Spread of the stationary optimum across restarts plus [`NOISE_FLOOR_EPS`].
    pub noise_floor: f64,
    /// Rate of `|J^T - J^s|`; absent with fewer than four positive gaps.
    pub fit: Option<RateFit>,
    pub seeds: Vec<u64>,
    pub h: f64,
    #[serde(skip)]
    pub transient_masks: Vec<DomainMask>,
}

/// Outcome of the two optimality cross-checks at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    /// `J^T(Ω_T) <= J^T(Ω^s) + floor`.
    pub transient: bool,
    /// `J^s(Ω^s) <= J^s(Ω_T) + floor`.
    pub stationary: bool,
}

impl SweepReport {
    pub fn best_steady_mask(&self) -> &DomainMask {
        self.steady[self.best_steady].mask()
    }

    pub fn cross_checks(&self) -> Vec<CrossCheck> {
        self.rows
            .iter()
            .map(|r| CrossCheck {
                transient: r.j_t <= r.j_t_of_s + self.noise_floor,
                stationary: r.j_s <= r.j_s_of_t + self.noise_floor,
            })
            .collect()
    }

    pub fn gap_points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.horizon, r.gap)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SweepRow::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv());
            out.push('\n');
        }
        out
    }
}

/// Per-horizon `J^T(Ω^s) - J^T` with its checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiOptimality {
    pub values: Vec<f64>,
    pub noise_floor: f64,
    /// Every value is at least `-noise_floor`.
    pub above_floor: bool,
    pub fit: Option<RateFit>,
    /// Horizons where `Ω_T` attains exactly `J^T(Ω^s)`.
    pub zero_count: usize,
}

pub fn quasi_optimality(report: &SweepReport) -> QuasiOptimality {
    let values: Vec<f64> = report.rows.iter().map(|r| r.quasi_gap).collect();
    let points: Vec<(f64, f64)> = report
        .rows
        .iter()
        .map(|r| (r.horizon, r.quasi_gap))
        .collect();
    QuasiOptimality {
        above_floor: values.iter().all(|v| *v >= -report.noise_floor),
        zero_count: values.iter().filter(|v| **v == 0.0).count(),
        fit: fit_rate(&points).ok(),
        noise_floor: report.noise_floor,
        values,
    }
}

fn best_of(results: &[RestartResult]) -> usize {
    // Strict comparison keeps the lowest restart index among equal costs.
    let mut best = 0;
    for (r, res) in results.iter().enumerate() {
        if res.cost < results[best].cost {
            best = r;
        }
    }
    best
}

fn search<F>(
    cost_fn: F,
    class: &AdmissibleClass,
    init: &DomainMask,
    schedule: &AnnealSchedule,
    do_polish: bool,
    restart: usize,
) -> Result<RestartResult>
where
    F: Fn(&DomainMask) -> Result<f64>,
{
    let (annealed, trace) = optimize(&cost_fn, class, init, schedule)?;
    let mut evaluations = trace.evaluations;
    let (mask, cost) = if do_polish {
        let (m, stats) = polish(&cost_fn, class, &annealed)?;
        evaluations += stats.evaluations;
        (m, stats.final_cost)
    } else {
        (annealed, trace.best_cost)
    };
    Ok(RestartResult {
        restart,
        seed: schedule.seed,
        cost,
        anneal_cost: trace.best_cost,
        evaluations,
        mask: Some(mask),
    })
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))
    }

    fn mask(&self, name: &str, mask: &DomainMask) -> Result<()> {
        write_mask(&self.dir.join(name), mask)
    }

    fn append(&self, name: &str, line: &str) -> Result<()> {
        let path = self.dir.join(name);
        let mut file = fs::OpenOptions::new()
            .append(true)
            .create(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        writeln!(file, "{line}").map_err(|e| Error::io(&path, e))
    }
}

/// File name of the finite-horizon optimum for horizon index `k`.
pub fn transient_mask_name(k: usize) -> String {
    format!("omega_t_{k:02}.txt")
}

/// Runs the stationary search once per restart, then every horizon warm
/// started from each restart's stationary optimum, recording the best of
/// restarts at each horizon.
///
/// With an output directory, `sweep.csv` is written row by row and the masks
/// as soon as they are known, so a failure leaves the completed part behind.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
    let out = match &config.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let out = Output { dir: dir.clone() };
            out.write("sweep.csv", &format!("{}\n", SweepRow::CSV_HEADER))?;
            Some(out)
        }
        None => None,
    };
    let target = &config.target;
    let class = &config.class;

    let steady_cost = |m: &DomainMask| Ok(elliptic_cost(m, target)?.value);
    let steady: Vec<RestartResult> = pool.install(|| {
        config
            .seeds
            .par_iter()
            .enumerate()
            .map(|(r, &seed)| {
                let schedule = config.steady.with_seed(seed);
                search(steady_cost, class, &config.init, &schedule, config.polish, r)
            })
            .collect::<Result<_>>()
    })?;
    let best_steady = best_of(&steady);
    let spread = steady.iter().map(|r| r.cost).fold(f64::NEG_INFINITY, f64::max)
        - steady[best_steady].cost;
    let noise_floor = spread + NOISE_FLOOR_EPS;
    let omega_s = steady[best_steady].mask().clone();
    let j_s = steady[best_steady].cost;
    log::info!(
        "stationary optimum {j_s:e} from restart {best_steady}, noise floor {noise_floor:e}"
    );
    if let Some(out) = &out {
        for res in &steady {
            out.mask(&format!("omega_s_r{}.txt", res.restart), res.mask())?;
        }
        out.mask("omega_s.txt", &omega_s)?;
    }

    let mut rows = Vec::with_capacity(config.horizons.len());
    let mut transient_masks = Vec::with_capacity(config.horizons.len());
    for (k, &horizon) in config.horizons.iter().enumerate() {
        let dt = config.dt_for(horizon);
        let cost = |m: &DomainMask| Ok(parabolic_cost(m, target, horizon, dt)?.value);
        let results: Vec<RestartResult> = pool.install(|| {
            steady
                .par_iter()
                .map(|s| {
                    let schedule = config.transient.with_seed(horizon_seed(s.seed, k));
                    search(cost, class, s.mask(), &schedule, config.polish, s.restart)
                })
                .collect::<Result<_>>()
        })?;
        let best = best_of(&results);
        let omega_t = results[best].mask().clone();
        let j_t = results[best].cost;
        let j_t_of_s = cost(&omega_s)?;
        let mut hc_nearest = f64::INFINITY;
        for s in &steady {
            hc_nearest = hc_nearest.min(complementary_hausdorff(&omega_t, s.mask())?);
        }
        let row = SweepRow {
            horizon,
            j_t,
            j_s,
            gap: (j_t - j_s).abs(),
            hc_best: complementary_hausdorff(&omega_t, &omega_s)?,
            hc_nearest,
            j_t_of_s,
            quasi_gap: j_t_of_s - j_t,
            j_s_of_t: elliptic_cost(&omega_t, target)?.value,
            best_restart: best,
            seeds: config.seeds.clone(),
        };
        log::info!("T = {horizon}: J^T = {j_t:e}, gap = {:e}, d_Hc = {:e}", row.gap, row.hc_best);
        if let Some(out) = &out {
            out.append("sweep.csv", &row.to_csv())?;
            out.mask(&transient_mask_name(k), &omega_t)?;
        }
        rows.push(row);
        transient_masks.push(omega_t);
    }

    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.horizon, r.gap)).collect();
    let fit = match fit_rate(&points) {
        Ok(fit) => Some(fit),
        Err(Error::InsufficientPoints { needed, got }) => {
            log::warn!("no rate fit: {got} positive gaps, {needed} needed");
            None
        }
        Err(e) => return Err(e),
    };
    let report = SweepReport {
        rows,
        steady,
        best_steady,
        noise_floor,
        fit,
        seeds: config.seeds.clone(),
        h: config.init.grid().h,
        transient_masks,
    };
    if let Some(out) = &out {
        write_summaries(out, &report)?;
    }
    Ok(report)
}

#[derive(Serialize)]
struct RateFile<'a> {
    gap: Option<&'a RateFit>,
    quasi_gap: Option<&'a RateFit>,
    noise_floor: f64,
    excluded_zero_gaps: usize,
}

fn write_summaries(out: &Output, report: &SweepReport) -> Result<()> {
    let quasi = quasi_optimality(report);
    let rate = RateFile {
        gap: report.fit.as_ref(),
        quasi_gap: quasi.fit.as_ref(),
        noise_floor: report.noise_floor,
        excluded_zero_gaps: report.rows.iter().filter(|r| r.gap <= 0.0).count(),
    };
    let json = serde_json::to_string_pretty(&rate).expect("rate summary serializes");
    out.write("rate.json", &format!("{json}\n"))?;

    let gaps = report.gap_points();
    let quasi_pts: Vec<_> = report.rows.iter().map(|r| (r.horizon, r.quasi_gap)).collect();
    out.write(
        "gap.svg",
        &loglog_svg(
            "|J^T - J^s| and J^T(Ω^s) - J^T",
            "T",
            &[("gap", &gaps), ("quasi-gap", &quasi_pts)],
            Some(-0.5),
        ),
    )?;
    let hc: Vec<_> = report.rows.iter().map(|r| (r.horizon, r.hc_best)).collect();
    out.write("hc.svg", &loglog_svg("d_Hc(Ω_T, Ω^s)", "T", &[("d_Hc", &hc)], None))
}

/// `|J^T(Ω) - J^s(Ω)|` for one fixed mask across horizons, with its rate.
pub fn fixed_domain_gaps(
    mask: &DomainMask,
    target: &TrackingTarget,
    horizons: &[f64],
    dt: Option<f64>,
) -> Result<(Vec<(f64, f64)>, Option<RateFit>)> {
    let j_s = elliptic_cost(mask, target)?.value;
    let mut points = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let dt = dt.unwrap_or_else(|| default_dt(mask.grid(), t));
        let j_t = parabolic_cost(mask, target, t, dt)?.value;
        points.push((t, (j_t - j_s).abs()));
    }
    let fit = fit_rate(&points).ok();
    Ok((points, fit))
}

/// Human-readable summary of a finished sweep.
pub fn summary(report: &SweepReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "horizons: {}", report.rows.len());
    let _ = writeln!(s, "noise floor: {:e}", report.noise_floor);
    match &report.fit {
        Some(f) => {
            let _ = writeln!(
                s,
                "slope: {:.4}  C: {:.4e}  residual: {:.3e}  points: {}",
                f.slope, f.constant, f.residual, f.points
            );
        }
        None => {
            let _ = writeln!(s, "slope: not fitted (fewer than 4 positive gaps)");
        }
    }
    s
}

pub fn write_report_csv(path: &Path, report: &SweepReport) -> Result<()> {
    fs::write(path, report.to_csv()).map_err(|e| Error::io(path, e))
}
