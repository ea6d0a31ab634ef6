//! Tracking costs over the observation region:
//! the stationary cost `J^s(Ω) = ||p - z||^2_{H^1(ω)}` and the time average
//! `J^T(Ω) = (1/T) ∫_0^T ||y(t) - z||^2_{H^1(ω)} dt`.
//!
//! Space: cell sums times `h^2`, forward-difference gradients of the
//! extended-by-zero state. Time: left-endpoint sum over implicit-Euler steps.

use std::fmt;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::mask::DomainMask;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::pde::heat::{time_grid, HeatStepper};
use crate::pde::laplacian::assemble_laplacian;
use crate::pde::linalg::{LinearSolver, SolverOptions};

/// Data of the tracking problem.
#[derive(Debug, Clone)]
pub struct TrackingTarget {
    pub z: ScalarField,
    pub omega: DomainMask,
    pub f: ScalarField,
    pub y0: ScalarField,
}

impl TrackingTarget {
    pub fn new(z: ScalarField, omega: DomainMask, f: ScalarField, y0: ScalarField) -> Result<Self> {
        let grid = omega.grid();
        for (name, field) in [("z", &z), ("f", &f), ("y0", &y0)] {
            grid.ensure_same(&field.grid)
                .map_err(|e| Error::InvalidInput(format!("{name}: {e}")))?;
        }
        if let Some(c) = (0..grid.len()).find(|&c| grid.is_frame(c) && z.values[c] != 0.0) {
            let (i, j) = grid.coords(c);
            return Err(Error::InvalidInput(format!(
                "target must vanish on the frame, z({i}, {j}) = {}",
                z.values[c]
            )));
        }
        Ok(Self { z, omega, f, y0 })
    }

    /// `(||e||^2_{L^2(ω)}, ||grad e||^2_{L^2(ω)})` for `e = state - z`.
    pub fn mismatch(&self, state: &ScalarField) -> Result<(f64, f64)> {
        state.sub(&self.z)?.norms_sq_on(&self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Stationary,
    Finite(f64),
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Stationary => f.write_str("stationary"),
            Horizon::Finite(t) => write!(f, "{t:?}"),
        }
    }
}

impl Serialize for Horizon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Horizon::Stationary => s.serialize_str("stationary"),
            Horizon::Finite(t) => s.serialize_f64(*t),
        }
    }
}

impl<'de> Deserialize<'de> for Horizon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(t) => Ok(Horizon::Finite(t)),
            Raw::Text(s) if s == "stationary" => Ok(Horizon::Stationary),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("unknown horizon {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PdeStats {
    /// Worst relative residual over all linear solves.
    pub residual: f64,
    /// Time steps on the horizon (0 for the stationary cost).
    pub steps: usize,
    /// Steps whose state matched the steady state to the tail tolerance and
    /// were summed without solving.
    pub tail_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub value: f64,
    pub l2_part: f64,
    pub h1_part: f64,
    pub horizon: Horizon,
    pub pde_stats: PdeStats,
}

impl CostReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostOptions {
    pub solver: SolverOptions,
    /// Once `max|y_k - p| <= tail_tol * max(|p|, |y0|)` the remaining states
    /// equal the steady state `p` to rounding and are summed in closed form.
    /// Zero disables the shortcut.
    pub tail_tol: f64,
}

impl Default for CostOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            tail_tol: 1e-13,
        }
    }
}

pub fn elliptic_cost(mask: &DomainMask, target: &TrackingTarget) -> Result<CostReport> {
    elliptic_cost_with(mask, target, &CostOptions::default())
}

pub fn elliptic_cost_with(
    mask: &DomainMask,
    target: &TrackingTarget,
    options: &CostOptions,
) -> Result<CostReport> {
    mask.grid().ensure_same(target.omega.grid())?;
    let solver = LinearSolver::new(assemble_laplacian(mask), options.solver)?;
    let index = solver.operator().index();
    let (p, stats) = solver.solve(&index.gather(&target.f)?, None)?;
    let (l2, h1) = target.mismatch(&index.scatter(&p, None))?;
    Ok(CostReport {
        value: l2 + h1,
        l2_part: l2,
        h1_part: h1,
        horizon: Horizon::Stationary,
        pde_stats: PdeStats {
            residual: stats.residual,
            steps: 0,
            tail_steps: 0,
        },
    })
}

pub fn parabolic_cost(
    mask: &DomainMask,
    target: &TrackingTarget,
    horizon: f64,
    dt: f64,
) -> Result<CostReport> {
    parabolic_cost_with(mask, target, horizon, dt, &CostOptions::default())
}

pub fn parabolic_cost_with(
    mask: &DomainMask,
    target: &TrackingTarget,
    horizon: f64,
    dt: f64,
    options: &CostOptions,
) -> Result<CostReport> {
    mask.grid().ensure_same(target.omega.grid())?;
    let (steps, dt) = time_grid(horizon, dt)?;
    let mut stepper = HeatStepper::new(mask, &target.f, &target.y0, dt, &options.solver)?;

    let mut residual = 0.0f64;
    let steady = if options.tail_tol > 0.0 {
        let solver = LinearSolver::new(assemble_laplacian(mask), options.solver)?;
        let (p, stats) = solver.solve(&solver.operator().index().gather(&target.f)?, None)?;
        residual = stats.residual;
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let scale = max_abs(&p).max(max_abs(stepper.state()));
        Some((p, options.tail_tol * scale))
    } else {
        None
    };

    let mut l2 = 0.0;
    let mut h1 = 0.0;
    let mut tail_steps = 0;
    for k in 0..steps {
        if let Some((p, tol)) = &steady {
            let close = stepper
                .state()
                .iter()
                .zip(p)
                .all(|(y, q)| (y - q).abs() <= *tol);
            if close {
                tail_steps = steps - k;
                let (a, b) = target.mismatch(&stepper.index().scatter(p, None))?;
                l2 += tail_steps as f64 * dt * a;
                h1 += tail_steps as f64 * dt * b;
                break;
            }
        }
        let (a, b) = target.mismatch(&stepper.field())?;
        l2 += dt * a;
        h1 += dt * b;
        if k + 1 < steps {
            stepper.advance()?;
        }
    }
    let l2 = l2 / horizon;
    let h1 = h1 / horizon;
    Ok(CostReport {
        value: l2 + h1,
        l2_part: l2,
        h1_part: h1,
        horizon: Horizon::Finite(horizon),
        pde_stats: PdeStats {
            residual: residual.max(stepper.stats().residual),
            steps,
            tail_steps,
        },
    })
}

pub const LEDGER_HEADER: &str = "mask_id,horizon,value,l2_part,h1_part";

/// Appends one `mask_id,horizon,value,l2_part,h1_part` row, writing the
/// header first if the file is new or empty.
pub fn append_ledger(path: &Path, mask_id: u64, report: &CostReport) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut text = String::new();
    if fresh {
        text.push_str(LEDGER_HEADER);
        text.push('\n');
    }
    text.push_str(&format!(
        "{mask_id},{},{:?},{:?},{:?}\n",
        report.horizon, report.value, report.l2_part, report.h1_part
    ));
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::domain::extend::extend_by_zero;
    use crate::domain::grid::{Block, GridSpec};
    use crate::pde::heat::default_dt;
    use crate::pde::poisson::solve_poisson;

    fn fixture(n: usize) -> (DomainMask, TrackingTarget) {
        let grid = GridSpec::unit_square(n).unwrap();
        let mask = DomainMask::interior_without(grid, &[Block::square(n / 4, n / 4, n / 6)]).unwrap();
        let omega = DomainMask::block(grid, Block::square(n / 2 - 2, n / 2 - 2, 4)).unwrap();
        let f = ScalarField::indicator(grid, Block::square(n / 2 + 2, n / 2 + 2, n / 5), 10.0);
        let z = ScalarField::from_fn(grid, |x, y| 0.05 * (PI * x).sin() * (PI * y).sin())
            .restricted_to(&DomainMask::interior(grid).unwrap())
            .unwrap();
        let target = TrackingTarget::new(z, omega, f, ScalarField::zeros(grid)).unwrap();
        (mask, target)
    }

    #[test]
    fn perfect_target_costs_nothing() {
        let (mask, mut target) = fixture(16);
        let p = solve_poisson(&mask, &target.f).unwrap();
        target.z = extend_by_zero(&mask, &p).unwrap();
        let r = elliptic_cost(&mask, &target).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.horizon, Horizon::Stationary);

        target.y0 = p;
        let r = parabolic_cost(&mask, &target, 2.0, 0.05).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.pde_stats.tail_steps, r.pde_stats.steps);
    }

    #[test]
    fn zero_data_costs_nothing() {
        let (mask, mut target) = fixture(12);
        let grid = *mask.grid();
        target.f = ScalarField::zeros(grid);
        target.z = ScalarField::zeros(grid);
        assert_eq!(elliptic_cost(&mask, &target).unwrap().value, 0.0);
        assert_eq!(parabolic_cost(&mask, &target, 1.0, 0.1).unwrap().value, 0.0);
    }

    #[test]
    fn target_on_the_frame_is_rejected() {
        let (_, target) = fixture(12);
        let mut z = target.z.clone();
        z.values[0] = 1.0;
        assert!(TrackingTarget::new(z, target.omega, target.f, target.y0).is_err());
    }

    #[test]
    fn quadratic_in_the_target() {
        let (mask, mut target) = fixture(16);
        let grid = *mask.grid();
        target.f = ScalarField::zeros(grid);
        let base_e = elliptic_cost(&mask, &target).unwrap().value;
        let base_p = parabolic_cost(&mask, &target, 1.5, 0.1).unwrap().value;
        assert!(base_e > 0.0);
        for alpha in [0.5, 3.0, -2.0] {
            let mut scaled = target.clone();
            scaled.z = target.z.scaled(alpha);
            let e = elliptic_cost(&mask, &scaled).unwrap().value;
            let p = parabolic_cost(&mask, &scaled, 1.5, 0.1).unwrap().value;
            assert!((e - alpha * alpha * base_e).abs() <= 1e-14 * e);
            assert!((p - alpha * alpha * base_p).abs() <= 1e-14 * p);
        }
    }

    #[test]
    fn tail_shortcut_matches_full_stepping() {
        let (mask, target) = fixture(20);
        let grid = *mask.grid();
        for horizon in [1.0, 4.0, 16.0] {
            let dt = default_dt(&grid, horizon);
            let fast = parabolic_cost(&mask, &target, horizon, dt).unwrap();
            let full = parabolic_cost_with(
                &mask,
                &target,
                horizon,
                dt,
                &CostOptions {
                    tail_tol: 0.0,
                    ..CostOptions::default()
                },
            )
            .unwrap();
            assert!((fast.value - full.value).abs() <= 1e-11 * full.value);
            assert_eq!(full.pde_stats.tail_steps, 0);
            if horizon >= 4.0 {
                assert!(fast.pde_stats.tail_steps > 0);
            }
        }
    }

    #[test]
    fn parts_add_up() {
        let (mask, target) = fixture(16);
        for r in [
            elliptic_cost(&mask, &target).unwrap(),
            parabolic_cost(&mask, &target, 2.0, 0.05).unwrap(),
        ] {
            assert!(r.l2_part >= 0.0 && r.h1_part >= 0.0);
            assert_eq!(r.value, r.l2_part + r.h1_part);
        }
    }

    #[test]
    fn report_json_and_ledger() {
        let (mask, target) = fixture(12);
        let r = parabolic_cost(&mask, &target, 2.0, 0.1).unwrap();
        let back: CostReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let s = elliptic_cost(&mask, &target).unwrap();
        assert!(s.to_json().contains("\"stationary\""));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        append_ledger(&path, 7, &s).unwrap();
        append_ledger(&path, 7, &r).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], LEDGER_HEADER);
        assert!(lines[1].starts_with("7,stationary,"));
        assert!(lines[2].starts_with("7,2.0,"));
    }
}
