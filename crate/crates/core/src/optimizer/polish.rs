use serde::{Deserialize, Serialize};

use crate::domain::mask::DomainMask;
use crate::domain::topology::AdmissibleClass;
use crate::error::{Error, Result};
use crate::optimizer::anneal::{boundary_move, candidate_moves};
use crate::domain::topology::count_complement_components;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolishStats {
    pub initial_cost: f64,
    pub final_cost: f64,
    pub passes: usize,
    pub improvements: usize,
    pub evaluations: usize,
}

/// Greedy first-improvement descent over admissible boundary flips, visiting
/// cells in index order, repeated until a full pass finds no strict
/// improvement. The result is a local minimum under single-cell flips.
pub fn polish<F>(cost_fn: F, class: &AdmissibleClass, mask: &DomainMask) -> Result<(DomainMask, PolishStats)>
where
    F: Fn(&DomainMask) -> Result<f64>,
{
    if !class.is_admissible(mask)? {
        return Err(Error::InfeasibleInit(
            "polish requires an admissible starting mask".into(),
        ));
    }
    let mut current = mask.clone();
    let initial_cost = cost_fn(&current)?;
    let mut stats = PolishStats {
        initial_cost,
        final_cost: initial_cost,
        passes: 0,
        improvements: 0,
        evaluations: 1,
    };
    loop {
        stats.passes += 1;
        let mut improved = false;
        for candidate in candidate_moves(&current, class) {
            // Earlier acceptances in this pass may have changed the boundary.
            if boundary_move(&current, class, candidate.cell).is_none() {
                continue;
            }
            let next = current.flipped(candidate.cell)?;
            if count_complement_components(&next) > class.max_components() {
                continue;
            }
            let cost = cost_fn(&next)?;
            stats.evaluations += 1;
            if cost < stats.final_cost {
                current = next;
                stats.final_cost = cost;
                stats.improvements += 1;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok((current, stats))
}
