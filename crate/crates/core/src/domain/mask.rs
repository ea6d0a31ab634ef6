use crate::domain::grid::{Block, GridSpec};
use crate::error::{Error, Result};

/// A rasterized open set: the union of the active cells of a grid.
///
/// Frame cells are always inactive and at least one cell is active. The
/// `generation` counter is bumped by every edit; it stamps derived fields
/// but takes no part in equality.
#[derive(Debug, Clone)]
pub struct DomainMask {
    grid: GridSpec,
    active: Vec<bool>,
    generation: u64,
}

impl PartialEq for DomainMask {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.active == other.active
    }
}

impl Eq for DomainMask {}

impl DomainMask {
    pub fn new(grid: GridSpec, active: Vec<bool>) -> Result<Self> {
        grid.validate()?;
        if active.len() != grid.len() {
            return Err(Error::InvalidMask(format!(
                "expected {} cells, got {}",
                grid.len(),
                active.len()
            )));
        }
        if let Some(cell) = (0..grid.len()).find(|&c| active[c] && grid.is_frame(c)) {
            let (i, j) = grid.coords(cell);
            return Err(Error::InvalidMask(format!("frame cell ({i}, {j}) is active")));
        }
        if !active.iter().any(|&a| a) {
            return Err(Error::InvalidMask("no active cell".into()));
        }
        Ok(Self {
            grid,
            active,
            generation: 0,
        })
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let active = (0..grid.len())
            .map(|c| {
                let (i, j) = grid.coords(c);
                f(i, j)
            })
            .collect();
        Self::new(grid, active)
    }

    /// Every non-frame cell active.
    pub fn interior(grid: GridSpec) -> Result<Self> {
        Self::from_fn(grid, |i, j| i > 0 && j > 0 && i + 1 < grid.nx && j + 1 < grid.ny)
    }

    /// Interior with the given blocks removed.
    pub fn interior_without(grid: GridSpec, holes: &[Block]) -> Result<Self> {
        Self::from_fn(grid, |i, j| {
            i > 0
                && j > 0
                && i + 1 < grid.nx
                && j + 1 < grid.ny
                && !holes.iter().any(|b| b.contains(i, j))
        })
    }

    /// Exactly the cells of `block`.
    pub fn block(grid: GridSpec, block: Block) -> Result<Self> {
        if !block.fits(&grid) {
            return Err(Error::InvalidMask(format!("{block:?} exceeds the grid")));
        }
        Self::from_fn(grid, |i, j| block.contains(i, j))
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn generation(&self) -> u64 {
        self.generation
    }

    #[inline]
    pub fn is_active(&self, cell: usize) -> bool {
        self.active[cell]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn active_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.active.len()).filter(|&c| self.active[c])
    }

    pub fn inactive_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.active.len()).filter(|&c| !self.active[c])
    }

    /// Cell centers of the complement (inactive cells, frame included).
    pub fn complement_points(&self) -> Vec<[f64; 2]> {
        self.inactive_cells().map(|c| self.grid.center(c)).collect()
    }

    /// True when every active cell of `other` is active here.
    pub fn contains(&self, other: &DomainMask) -> bool {
        self.grid == other.grid && other.active_cells().all(|c| self.active[c])
    }

    /// A copy with `cell` toggled; the generation advances by one.
    pub fn flipped(&self, cell: usize) -> Result<Self> {
        if cell >= self.active.len() {
            return Err(Error::InvalidMask(format!("cell {cell} out of range")));
        }
        if self.grid.is_frame(cell) {
            return Err(Error::InvalidMask("frame cells cannot be toggled".into()));
        }
        let mut active = self.active.clone();
        active[cell] = !active[cell];
        if !active.iter().any(|&a| a) {
            return Err(Error::InvalidMask("no active cell".into()));
        }
        Ok(Self {
            grid: self.grid,
            active,
            generation: self.generation + 1,
        })
    }

    /// Number of cells on which the two masks differ.
    pub fn symmetric_difference(&self, other: &DomainMask) -> usize {
        self.active
            .iter()
            .zip(&other.active)
            .filter(|(a, b)| a != b)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::unit_square(8).unwrap()
    }

    #[test]
    fn rejects_active_frame_and_empty_masks() {
        let g = grid();
        assert!(DomainMask::from_fn(g, |_, _| true).is_err());
        assert!(DomainMask::from_fn(g, |_, _| false).is_err());
        let m = DomainMask::interior(g).unwrap();
        assert_eq!(m.active_count(), 36);
    }

    #[test]
    fn flipping_bumps_generation_but_not_identity() {
        let m = DomainMask::interior(grid()).unwrap();
        let c = m.grid().index(3, 3);
        let f = m.flipped(c).unwrap();
        assert_eq!(f.generation(), 1);
        assert!(!f.is_active(c));
        let back = f.flipped(c).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.generation(), 2);
        assert!(m.flipped(0).is_err());
    }

    #[test]
    fn single_cell_cannot_be_removed() {
        let g = grid();
        let m = DomainMask::block(g, Block::square(3, 3, 1)).unwrap();
        assert!(m.flipped(g.index(3, 3)).is_err());
    }
}
