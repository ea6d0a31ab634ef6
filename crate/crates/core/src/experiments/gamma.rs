use serde::{Deserialize, Serialize};

use crate::domain::distance::complementary_hausdorff;
use crate::domain::extend::extend_by_zero;
use crate::domain::grid::Block;
use crate::domain::mask::DomainMask;
use crate::domain::topology::AdmissibleClass;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::pde::poisson::solve_poisson;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    /// `d_{H^c}(Ω_n, Ω)`.
    pub hc_distance: f64,
    /// `||p_n - p||_{H^1(D)}` of the zero extensions.
    pub h1_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaProbe {
    pub rows: Vec<GammaRow>,
    /// The H¹ errors never increase along the schedule.
    pub monotone: bool,
    /// The last mask equals the base and its error is exactly zero.
    pub final_zero: bool,
}

impl GammaProbe {
    /// First-row error over the last positive error, i.e. the reduction up
    /// to the smallest genuine perturbation. `NaN` when no error is positive.
    pub fn reduction(&self) -> f64 {
        let last = self.rows.iter().rev().find(|r| r.h1_error > 0.0);
        match (self.rows.first(), last) {
            (Some(a), Some(b)) => a.h1_error / b.h1_error,
            _ => f64::NAN,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,hc_distance,h1_error\n");
        for (k, r) in self.rows.iter().enumerate() {
            out.push_str(&format!("{k},{:?},{:?}\n", r.hc_distance, r.h1_error));
        }
        out
    }
}

/// `base` with a square hole of side `size` whose lower-left cell is
/// `anchor`, clipped to the interior.
pub fn with_hole(base: &DomainMask, anchor: (usize, usize), size: usize) -> Result<DomainMask> {
    let grid = *base.grid();
    let hole = Block::square(anchor.0, anchor.1, size);
    DomainMask::from_fn(grid, |i, j| {
        base.is_active(grid.index(i, j)) && !hole.contains(i, j)
    })
}

/// Masks with holes of side `max_size, max_size - 1, ..., 0`, the last one
/// being `base` itself.
pub fn shrinking_hole_schedule(
    base: &DomainMask,
    anchor: (usize, usize),
    max_size: usize,
) -> Result<Vec<DomainMask>> {
    (0..=max_size)
        .rev()
        .map(|s| with_hole(base, anchor, s))
        .collect()
}

/// Pairs `d_{H^c}(Ω_n, Ω)` with the H¹ distance between the zero-extended
/// Poisson solutions on `Ω_n` and on `base`.
///
/// Every mask must be admissible, and the distances to `base` must decrease
/// strictly until they reach zero (repeated zeros are allowed).
pub fn gamma_convergence_probe(
    base: &DomainMask,
    schedule: &[DomainMask],
    class: &AdmissibleClass,
    f: &ScalarField,
) -> Result<GammaProbe> {
    if !class.is_admissible(base)? {
        return Err(Error::InvalidInput("base mask is not admissible".into()));
    }
    let mut distances = Vec::with_capacity(schedule.len());
    for (index, m) in schedule.iter().enumerate() {
        if !class.is_admissible(m)? {
            return Err(Error::InadmissiblePerturbation { index });
        }
        distances.push(complementary_hausdorff(m, base)?);
    }
    for (k, w) in distances.windows(2).enumerate() {
        if !(w[1] < w[0] || (w[1] == 0.0 && w[0] == 0.0)) {
            return Err(Error::InvalidInput(format!(
                "distances must decrease strictly: step {} has {} after {}",
                k + 1,
                w[1],
                w[0]
            )));
        }
    }
    let p = extend_by_zero(base, &solve_poisson(base, f)?)?;
    let mut rows = Vec::with_capacity(schedule.len());
    for (m, &hc_distance) in schedule.iter().zip(&distances) {
        let pn = extend_by_zero(m, &solve_poisson(m, f)?)?;
        let h1_error = pn.sub(&p)?.h1_norm_sq().sqrt();
        rows.push(GammaRow {
            hc_distance,
            h1_error,
        });
    }
    let slack = 1e-12 * rows.first().map_or(0.0, |r| r.h1_error);
    let monotone = rows.windows(2).all(|w| w[1].h1_error <= w[0].h1_error + slack);
    let final_zero = schedule.last().is_some_and(|m| m == base)
        && rows.last().is_some_and(|r| r.h1_error == 0.0);
    Ok(GammaProbe {
        rows,
        monotone,
        final_zero,
    })
}
