use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform Cartesian cell grid covering the design rectangle.
///
/// Cell `(i, j)` has its center at `origin + ((i + 0.5) h, (j + 0.5) h)`;
/// `i` runs along x (columns) and `j` along y (rows). Cells are stored
/// row-major, `index = j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    #[serde(default)]
    pub origin: [f64; 2],
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, h: f64, origin: [f64; 2]) -> Result<Self> {
        let grid = Self { nx, ny, h, origin };
        grid.validate()?;
        Ok(grid)
    }

    /// `n x n` cells of side `1/n` on `[0, 1]^2`.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0 / n as f64, [0.0, 0.0])
    }

    /// Grid whose frame cell centers lie on the boundary of `[0, L]^2`.
    ///
    /// There are `n + 1` cells per axis of side `L / n`; the centers sit on the
    /// nodes `k L / n`, so the discrete Dirichlet condition imposed on the
    /// frame is exactly the condition on the boundary of the square.
    pub fn node_centered_square(n: usize, side: f64) -> Result<Self> {
        let h = side / n as f64;
        Self::new(n + 1, n + 1, h, [-0.5 * h, -0.5 * h])
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 4 || self.ny < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4x4 cells, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidGrid(format!("cell size must be positive, got {}", self.h)));
        }
        if !(self.origin[0].is_finite() && self.origin[1].is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.nx, cell / self.nx)
    }

    pub fn center(&self, cell: usize) -> [f64; 2] {
        let (i, j) = self.coords(cell);
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    #[inline]
    pub fn is_frame(&self, cell: usize) -> bool {
        let (i, j) = self.coords(cell);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    pub fn area(&self) -> f64 {
        self.nx as f64 * self.ny as f64 * self.h * self.h
    }

    /// Area element `h^2` used by all cell quadratures.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// The 4-neighbors of `cell` that lie on the grid.
    pub fn neighbors4(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(cell, &[(-1, 0), (1, 0), (0, -1), (0, 1)])
    }

    /// The 8-neighbors of `cell` that lie on the grid.
    pub fn neighbors8(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors(
            cell,
            &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        )
    }

    fn neighbors<'a>(
        &'a self,
        cell: usize,
        offsets: &'a [(isize, isize)],
    ) -> impl Iterator<Item = usize> + 'a {
        let (i, j) = self.coords(cell);
        offsets.iter().filter_map(move |&(di, dj)| {
            let ni = i as isize + di;
            let nj = j as isize + dj;
            if ni < 0 || nj < 0 || ni >= self.nx as isize || nj >= self.ny as isize {
                None
            } else {
                Some(self.index(ni as usize, nj as usize))
            }
        })
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.describe(),
                right: other.describe(),
            })
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{}x{} h={} origin=({}, {})",
            self.nx, self.ny, self.h, self.origin[0], self.origin[1]
        )
    }
}

/// Half-open rectangle of cells `[i0, i1) x [j0, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl Block {
    pub fn new(i0: usize, i1: usize, j0: usize, j1: usize) -> Self {
        Self { i0, i1, j0, j1 }
    }

    /// Square block of side `size` with lower-left cell `(i0, j0)`.
    pub fn square(i0: usize, j0: usize, size: usize) -> Self {
        Self::new(i0, i0 + size, j0, j0 + size)
    }

    pub fn is_empty(&self) -> bool {
        self.i1 <= self.i0 || self.j1 <= self.j0
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i0..self.i1).contains(&i) && (self.j0..self.j1).contains(&j)
    }

    pub fn fits(&self, grid: &GridSpec) -> bool {
        self.i1 <= grid.nx && self.j1 <= grid.ny
    }

    pub fn cells<'a>(&self, grid: &'a GridSpec) -> impl Iterator<Item = usize> + 'a {
        let b = *self;
        (b.j0..b.j1).flat_map(move |j| (b.i0..b.i1).map(move |i| grid.index(i, j)))
    }
}
