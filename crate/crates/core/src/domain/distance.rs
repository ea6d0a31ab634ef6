//! Hausdorff distances between finite point sets and between mask complements.

use crate::domain::mask::DomainMask;
use crate::error::{Error, Result};

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// `max_{x in from} min_{y in to} |x - y|`, squared.
fn directed_sq(from: &[[f64; 2]], to: &[[f64; 2]]) -> f64 {
    let mut worst = 0.0f64;
    for &x in from {
        let mut best = f64::INFINITY;
        for &y in to {
            let d = dist_sq(x, y);
            if d < best {
                best = d;
                // Cannot raise the running maximum any more.
                if best <= worst {
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Directed Hausdorff distance from `from` to `to`.
pub fn directed_hausdorff(from: &[[f64; 2]], to: &[[f64; 2]]) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed_sq(from, to).sqrt())
}

/// Symmetric Hausdorff distance with the Euclidean norm.
pub fn hausdorff_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed_sq(a, b).max(directed_sq(b, a)).sqrt())
}

/// Hausdorff distance between the complements of two masks, using the
/// complement cell centers as the point sets.
pub fn complementary_hausdorff(m1: &DomainMask, m2: &DomainMask) -> Result<f64> {
    m1.grid().ensure_same(m2.grid())?;
    if m1 == m2 {
        return Ok(0.0);
    }
    // Cells inactive in both masks are at distance zero from the other set,
    // so only the cells in the symmetric difference can realize the maximum.
    let c1 = m1.complement_points();
    let c2 = m2.complement_points();
    let only1: Vec<[f64; 2]> = m1
        .inactive_cells()
        .filter(|&c| m2.is_active(c))
        .map(|c| m1.grid().center(c))
        .collect();
    let only2: Vec<[f64; 2]> = m2
        .inactive_cells()
        .filter(|&c| m1.is_active(c))
        .map(|c| m2.grid().center(c))
        .collect();
    Ok(directed_sq(&only1, &c2).max(directed_sq(&only2, &c1)).sqrt())
}
