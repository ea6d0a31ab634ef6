use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::mask::DomainMask;
use crate::domain::topology::{count_complement_components, AdmissibleClass};
use crate::error::{Error, Result};
use crate::optimizer::schedule::{AnnealSchedule, TemperatureScale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Activate,
    Deactivate,
}

/// A single-cell flip on the discrete boundary of the active set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveProposal {
    pub cell: usize,
    pub direction: Direction,
}

/// The legal flip of `cell`, if any: the cell must have a 4-neighbor of the
/// opposite state, frame cells never activate and ω cells never deactivate.
pub fn boundary_move(mask: &DomainMask, class: &AdmissibleClass, cell: usize) -> Option<MoveProposal> {
    let grid = mask.grid();
    if grid.is_frame(cell) {
        return None;
    }
    let active = mask.is_active(cell);
    if active && class.omega().is_active(cell) {
        return None;
    }
    let mut neighbors = grid.neighbors4(cell);
    if !neighbors.any(|n| mask.is_active(n) != active) {
        return None;
    }
    Some(MoveProposal {
        cell,
        direction: if active {
            Direction::Deactivate
        } else {
            Direction::Activate
        },
    })
}

/// All boundary moves in increasing cell order.
pub fn candidate_moves(mask: &DomainMask, class: &AdmissibleClass) -> Vec<MoveProposal> {
    (0..mask.grid().len())
        .filter_map(|c| boundary_move(mask, class, c))
        .collect()
}

/// Applies a move, returning the new mask and its complement component count
/// when the result is admissible.
fn try_move(
    mask: &DomainMask,
    class: &AdmissibleClass,
    mv: MoveProposal,
) -> Result<(Option<DomainMask>, usize)> {
    let next = mask.flipped(mv.cell)?;
    let components = count_complement_components(&next);
    // ω is never deactivated, so inclusion holds by construction; only the
    // component bound can fail.
    debug_assert!(next.contains(class.omega()));
    Ok(if components <= class.max_components() {
        (Some(next), components)
    } else {
        (None, components)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: usize,
    pub accepted: bool,
    /// `None` when the proposal left the admissible class and was never evaluated.
    pub cost: Option<f64>,
    pub components: usize,
    pub temperature: f64,
    pub cell: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub initial_cost: f64,
    pub entries: Vec<TraceEntry>,
    #[serde(skip)]
    pub best_mask: Option<DomainMask>,
    pub best_cost: f64,
    /// Step at which the best mask was reached (0 for the initial mask).
    pub best_step: usize,
    pub evaluations: usize,
    pub wall_time_secs: f64,
}

impl OptimizationTrace {
    pub const CSV_HEADER: &'static str = "step,accepted,cost,components,temperature,cell,direction";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        out.push_str(&format!("0,true,{:?},,,,initial\n", self.initial_cost));
        for e in &self.entries {
            let cost = e.cost.map(|c| format!("{c:?}")).unwrap_or_default();
            let dir = match e.direction {
                Direction::Activate => "activate",
                Direction::Deactivate => "deactivate",
            };
            out.push_str(&format!(
                "{},{},{},{},{:?},{},{}\n",
                e.step, e.accepted, cost, e.components, e.temperature, e.cell, dir
            ));
        }
        out
    }

    pub fn accepted_count(&self) -> usize {
        self.entries.iter().filter(|e| e.accepted).count()
    }
}

fn energy_increase(scale: TemperatureScale, from: f64, to: f64) -> f64 {
    match scale {
        TemperatureScale::LogCost if from > 0.0 => (to / from).ln(),
        // From zero cost nothing positive is ever accepted.
        TemperatureScale::LogCost => f64::INFINITY,
        _ => to - from,
    }
}

/// Proposal stream shared in spirit with [`polish`](crate::optimizer::polish):
/// passes over a snapshot of the boundary moves in cell order, skipping cells
/// that stopped being boundary cells earlier in the pass.
struct Passes {
    moves: Vec<MoveProposal>,
    pos: usize,
}

impl Passes {
    fn next(&mut self, mask: &DomainMask, class: &AdmissibleClass) -> Option<MoveProposal> {
        loop {
            while let Some(mv) = self.moves.get(self.pos) {
                self.pos += 1;
                if let Some(mv) = boundary_move(mask, class, mv.cell) {
                    return Some(mv);
                }
            }
            self.moves = candidate_moves(mask, class);
            self.pos = 0;
            if self.moves.is_empty() {
                return None;
            }
        }
    }
}

/// Simulated annealing over single-cell boundary flips.
///
/// Proposals come from a systematic scan: passes over a snapshot of the
/// boundary moves in cell order, the first pass starting at a seeded
/// position. Cells exposed during a pass wait for the next one, so a hole
/// grows or shrinks one layer per pass. Uniformly random proposals (or a scan
/// that follows newly exposed cells) stall in crack-shaped local minima: thin
/// diagonal walls and isolated cells inside holes. Proposals that leave the admissible class
/// are rejected without evaluating the cost. Each step draws one uniform
/// variate for the Metropolis test. Returns the best admissible mask visited
/// (earliest among equal costs).
pub fn optimize<F>(
    cost_fn: F,
    class: &AdmissibleClass,
    init: &DomainMask,
    schedule: &AnnealSchedule,
) -> Result<(DomainMask, OptimizationTrace)>
where
    F: Fn(&DomainMask) -> Result<f64>,
{
    schedule.validate()?;
    init.grid().ensure_same(class.omega().grid())?;
    if !class.is_admissible(init)? {
        return Err(Error::InfeasibleInit(format!(
            "contains ω: {}, complement components: {} (max {})",
            init.contains(class.omega()),
            count_complement_components(init),
            class.max_components()
        )));
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);

    let moves = candidate_moves(init, class);
    let pos = if moves.is_empty() { 0 } else { rng.gen_range(0..moves.len()) };
    let mut passes = Passes { moves, pos };
    let mut current = init.clone();
    let initial_cost = cost_fn(&current)?;
    let mut current_cost = initial_cost;
    let t0 = match schedule.scale {
        TemperatureScale::InitialCost => schedule.initial_temperature * current_cost.abs(),
        _ => schedule.initial_temperature,
    };
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut best_step = 0;
    let mut evaluations = 1;
    let mut entries = Vec::with_capacity(schedule.budget);

    for step in 1..=schedule.budget {
        let temperature = schedule.temperature(t0, step - 1);
        let Some(mv) = passes.next(&current, class) else {
            break;
        };
        let u: f64 = rng.gen();

        let (next, components) = try_move(&current, class, mv)?;
        let Some(next) = next else {
            entries.push(TraceEntry {
                step,
                accepted: false,
                cost: None,
                components,
                temperature,
                cell: mv.cell,
                direction: mv.direction,
            });
            continue;
        };
        let cost = cost_fn(&next)?;
        evaluations += 1;
        let accepted = cost < current_cost
            || (temperature > 0.0 && u < (-energy_increase(schedule.scale, current_cost, cost) / temperature).exp());
        if accepted {
            current = next;
            current_cost = cost;
            if cost < best_cost {
                best = current.clone();
                best_cost = cost;
                best_step = step;
            }
        }
        entries.push(TraceEntry {
            step,
            accepted,
            cost: Some(cost),
            components,
            temperature,
            cell: mv.cell,
            direction: mv.direction,
        });
    }

    let trace = OptimizationTrace {
        initial_cost,
        entries,
        best_mask: Some(best.clone()),
        best_cost,
        best_step,
        evaluations,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok((best, trace))
}
