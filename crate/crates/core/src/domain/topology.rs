//! Connectivity of the complement and the admissible class `O_ω^N`.
//!
//! The active set uses 4-connectivity and the complement uses
//! 8-connectivity, so a diagonal crack of active cells never splits the
//! complement and a hole touching the frame diagonally merges with it.

use serde::{Deserialize, Serialize};

use crate::domain::mask::DomainMask;
use crate::error::{Error, Result};

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Smaller root wins so the labeling does not depend on union order.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Number of 8-connected components of the inactive cells.
pub fn count_complement_components(mask: &DomainMask) -> usize {
    let grid = mask.grid();
    let mut sets = DisjointSet::new(grid.len());
    let mut components = 0usize;
    // Raster scan: link each inactive cell to its already-visited neighbors
    // (W, SW, S, SE); every successful union merges two provisional labels.
    for cell in mask.inactive_cells() {
        components += 1;
        let (i, j) = grid.coords(cell);
        let mut back = [None; 4];
        if i > 0 {
            back[0] = Some(grid.index(i - 1, j));
        }
        if j > 0 {
            back[1] = Some(grid.index(i, j - 1));
            if i > 0 {
                back[2] = Some(grid.index(i - 1, j - 1));
            }
            if i + 1 < grid.nx {
                back[3] = Some(grid.index(i + 1, j - 1));
            }
        }
        for n in back.into_iter().flatten() {
            if !mask.is_active(n) && sets.union(cell, n) {
                components -= 1;
            }
        }
    }
    components
}

/// Number of 4-connected components of the active cells.
pub fn count_active_components(mask: &DomainMask) -> usize {
    let grid = mask.grid();
    let mut seen = vec![false; grid.len()];
    let mut stack = Vec::new();
    let mut components = 0;
    for start in mask.active_cells() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(c) = stack.pop() {
            for n in grid.neighbors4(c) {
                if mask.is_active(n) && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
    }
    components
}

/// Admissible designs: masks containing `omega` whose complement has at most
/// `max_components` components.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleClass {
    omega: DomainMask,
    max_components: usize,
}

impl AdmissibleClass {
    pub fn new(omega: DomainMask, max_components: usize) -> Result<Self> {
        if max_components == 0 {
            return Err(Error::InvalidInput("max_components must be at least 1".into()));
        }
        Ok(Self {
            omega,
            max_components,
        })
    }

    pub fn omega(&self) -> &DomainMask {
        &self.omega
    }

    pub fn max_components(&self) -> usize {
        self.max_components
    }

    pub fn is_admissible(&self, mask: &DomainMask) -> Result<bool> {
        is_admissible(mask, self)
    }
}

/// Serializable description of an admissibility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub contains_omega: bool,
    pub complement_components: usize,
}

pub fn admissibility(mask: &DomainMask, class: &AdmissibleClass) -> Result<Admissibility> {
    mask.grid().ensure_same(class.omega.grid())?;
    Ok(Admissibility {
        contains_omega: mask.contains(&class.omega),
        complement_components: count_complement_components(mask),
    })
}

pub fn is_admissible(mask: &DomainMask, class: &AdmissibleClass) -> Result<bool> {
    mask.grid().ensure_same(class.omega.grid())?;
    Ok(mask.contains(&class.omega) && count_complement_components(mask) <= class.max_components)
}

#[cfg(test)]
mod tests {
    use std::collections::VecDeque;

    use super::*;
    use crate::domain::grid::{Block, GridSpec};

    /// Breadth-first labeling, written independently of the union-find scan.
    fn bfs_components(mask: &DomainMask) -> usize {
        let g = mask.grid();
        let mut label = vec![usize::MAX; g.len()];
        let mut count = 0;
        for c in (0..g.len()).rev() {
            if mask.is_active(c) || label[c] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([c]);
            label[c] = count;
            while let Some(x) = queue.pop_front() {
                let (xi, xj) = g.coords(x);
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        let (ni, nj) = (xi as i64 + di, xj as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= g.nx as i64 || nj >= g.ny as i64 {
                            continue;
                        }
                        let n = g.index(ni as usize, nj as usize);
                        if !mask.is_active(n) && label[n] == usize::MAX {
                            label[n] = count;
                            queue.push_back(n);
                        }
                    }
                }
            }
            count += 1;
        }
        count
    }

    fn g(n: usize) -> GridSpec {
        GridSpec::unit_square(n).unwrap()
    }

    #[test]
    fn full_interior_has_one_component() {
        let m = DomainMask::interior(g(12)).unwrap();
        assert_eq!(count_complement_components(&m), 1);
    }

    #[test]
    fn two_disjoint_holes_give_three_components() {
        let m = DomainMask::interior_without(g(16), &[Block::square(3, 3, 3), Block::square(9, 9, 3)])
            .unwrap();
        assert_eq!(bfs_components(&m), 3);
        assert_eq!(count_complement_components(&m), 3);
    }

    #[test]
    fn diagonal_contact_with_frame_merges() {
        let grid = g(10);
        let corner = grid.index(1, 1);
        let m = DomainMask::interior(grid).unwrap().flipped(corner).unwrap();
        assert_eq!(count_complement_components(&m), 1);

        // Block (2..5)^2 is a hole; removing (1, 1) links it to the frame only
        // through the diagonal (1, 1)-(2, 2).
        let m = DomainMask::interior_without(grid, &[Block::square(2, 2, 3)]).unwrap();
        assert_eq!(count_complement_components(&m), 2);
        let m = m.flipped(corner).unwrap();
        assert_eq!(bfs_components(&m), 1);
        assert_eq!(count_complement_components(&m), 1);
    }

    #[test]
    fn admissibility_checks_inclusion_and_count() {
        let grid = g(16);
        let omega = DomainMask::block(grid, Block::square(6, 6, 4)).unwrap();
        let class = AdmissibleClass::new(omega.clone(), 1).unwrap();
        assert!(is_admissible(&omega, &class).unwrap());

        let missing = omega.flipped(grid.index(7, 7)).unwrap();
        assert!(!is_admissible(&missing, &class).unwrap());

        let holes = [Block::square(2, 2, 2), Block::square(12, 2, 2)];
        let two_holes = DomainMask::interior_without(grid, &holes).unwrap();
        assert_eq!(count_complement_components(&two_holes), 3);
        let class2 = AdmissibleClass::new(omega.clone(), 2).unwrap();
        assert!(!is_admissible(&two_holes, &class2).unwrap());
        let class3 = AdmissibleClass::new(omega, 3).unwrap();
        assert!(is_admissible(&two_holes, &class3).unwrap());
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let omega = DomainMask::interior(g(8)).unwrap();
        let class = AdmissibleClass::new(omega, 1).unwrap();
        let other = DomainMask::interior(g(9)).unwrap();
        assert!(matches!(
            is_admissible(&other, &class),
            Err(Error::GridMismatch { .. })
        ));
    }

    /// Exhaustive over the 2^16 masks of a 6x6 grid: the scan matches BFS, and
    /// activating a cell raises the count by at most (inactive 8-neighbors - 1).
    #[test]
    fn exhaustive_six_by_six() {
        let grid = g(6);
        let interior: Vec<usize> = (0..grid.len()).filter(|&c| !grid.is_frame(c)).collect();
        for bits in 1u32..(1 << interior.len()) {
            let mut active = vec![false; grid.len()];
            for (k, &c) in interior.iter().enumerate() {
                active[c] = bits & (1 << k) != 0;
            }
            let mask = DomainMask::new(grid, active).unwrap();
            let count = count_complement_components(&mask);
            assert_eq!(count, bfs_components(&mask), "bits {bits:#x}");

            for &c in &interior {
                if mask.is_active(c) {
                    continue;
                }
                let k = grid.neighbors8(c).filter(|&n| !mask.is_active(n)).count() as i64;
                let after = mask.flipped(c).unwrap();
                let delta = count_complement_components(&after) as i64 - count as i64;
                assert!(delta <= k - 1, "bits {bits:#x} cell {c}: delta {delta}, k {k}");
            }
        }
    }
}
