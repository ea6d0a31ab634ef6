//! Implicit-Euler time stepping of `y' - Δ_h y = f` with a time-independent
//! source: `(I + dt A) y_{k+1} = y_k + dt f`.

use serde::{Deserialize, Serialize};

use crate::domain::grid::GridSpec;
use crate::domain::mask::DomainMask;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::pde::laplacian::{assemble_laplacian, ActiveIndex};
use crate::pde::linalg::{LinearSolver, SolveStats, SolverOptions};

/// Minimum number of steps per horizon in the default step rule.
pub const MIN_STEPS: usize = 64;

/// Default step: `min(h, T / 64)`.
pub fn default_dt(grid: &GridSpec, horizon: f64) -> f64 {
    grid.h.min(horizon / MIN_STEPS as f64)
}

/// Number of steps and the step actually used so that the last step lands on
/// `horizon`: `n = ceil(T / dt)`, `dt' = T / n <= dt`.
pub fn time_grid(horizon: f64, dt: f64) -> Result<(usize, f64)> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= horizon) {
        return Err(Error::InvalidInput(format!(
            "time step must lie in (0, T] = (0, {horizon}], got {dt}"
        )));
    }
    let ratio = horizon / dt;
    // Tolerate representation error when T is an exact multiple of dt.
    let steps = (ratio - 1e-9 * ratio).ceil().max(1.0) as usize;
    Ok((steps, horizon / steps as f64))
}

/// Stateful stepper over the active cells of one mask.
#[derive(Debug, Clone)]
pub struct HeatStepper {
    solver: LinearSolver,
    source_dt: Vec<f64>,
    state: Vec<f64>,
    dt: f64,
    step: usize,
    stats: SolveStats,
    mask_id: u64,
}

impl HeatStepper {
    pub fn new(
        mask: &DomainMask,
        f: &ScalarField,
        y0: &ScalarField,
        dt: f64,
        options: &SolverOptions,
    ) -> Result<Self> {
        mask.grid().ensure_same(&f.grid)?;
        mask.grid().ensure_same(&y0.grid)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let a = assemble_laplacian(mask);
        let index = a.index();
        let source_dt = index.gather(f)?.into_iter().map(|v| dt * v).collect();
        let state = index.gather(y0)?;
        let solver = LinearSolver::new(a.shifted(1.0, dt), *options)?;
        Ok(Self {
            solver,
            source_dt,
            state,
            dt,
            step: 0,
            stats: SolveStats::default(),
            mask_id: mask.generation(),
        })
    }

    pub fn index(&self) -> &ActiveIndex {
        self.solver.operator().index()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    /// Current state on the active cells.
    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn field(&self) -> ScalarField {
        self.index().scatter(&self.state, Some(self.mask_id))
    }

    /// Worst relative residual and total iterations so far.
    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn advance(&mut self) -> Result<()> {
        let rhs: Vec<f64> = self
            .state
            .iter()
            .zip(&self.source_dt)
            .map(|(y, s)| y + s)
            .collect();
        let (next, stats) = self.solver.solve(&rhs, Some(&self.state))?;
        self.state = next;
        self.step += 1;
        self.stats.iterations += stats.iterations;
        self.stats.residual = self.stats.residual.max(stats.residual);
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ScalarField>,
    pub dt: f64,
    pub stats: SolveStats,
}

impl HeatTrajectory {
    pub fn final_state(&self) -> &ScalarField {
        self.states.last().expect("trajectory has the initial state")
    }

    /// Writes `state_<k>.csv` for every stored state and `times.csv`.
    pub fn write_csv(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut times = String::from("k,t\n");
        for (k, (t, state)) in self.times.iter().zip(&self.states).enumerate() {
            times.push_str(&format!("{k},{t:?}\n"));
            state.write_csv(&dir.join(format!("state_{k:05}.csv")))?;
        }
        let path = dir.join("times.csv");
        std::fs::write(&path, times).map_err(|e| Error::io(&path, e))
    }
}

/// Full implicit-Euler trajectory on `[0, T]`, every state stored.
pub fn solve_heat(
    mask: &DomainMask,
    f: &ScalarField,
    y0: &ScalarField,
    horizon: f64,
    dt: f64,
) -> Result<HeatTrajectory> {
    solve_heat_sampled(mask, f, y0, horizon, dt, 1, &SolverOptions::default())
}

/// Like [`solve_heat`] but stores only every `stride`-th state (the initial
/// and final states are always kept).
pub fn solve_heat_sampled(
    mask: &DomainMask,
    f: &ScalarField,
    y0: &ScalarField,
    horizon: f64,
    dt: f64,
    stride: usize,
    options: &SolverOptions,
) -> Result<HeatTrajectory> {
    let (steps, dt) = time_grid(horizon, dt)?;
    let stride = stride.max(1);
    let mut stepper = HeatStepper::new(mask, f, y0, dt, options)?;
    let mut times = vec![0.0];
    let mut states = vec![stepper.field()];
    for k in 1..=steps {
        stepper.advance()?;
        if k % stride == 0 || k == steps {
            times.push(if k == steps { horizon } else { k as f64 * dt });
            states.push(stepper.field());
        }
    }
    Ok(HeatTrajectory {
        times,
        states,
        dt,
        stats: stepper.stats(),
    })
}
