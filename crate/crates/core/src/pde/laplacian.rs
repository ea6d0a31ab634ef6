use crate::domain::grid::GridSpec;
use crate::domain::mask::DomainMask;
use crate::error::Result;
use crate::field::ScalarField;

/// Bijection between the active cells of a mask (row-major order) and the
/// unknowns of the linear systems.
#[derive(Debug, Clone)]
pub struct ActiveIndex {
    grid: GridSpec,
    cells: Vec<usize>,
    position: Vec<usize>,
}

impl ActiveIndex {
    pub fn new(mask: &DomainMask) -> Self {
        let grid = *mask.grid();
        let mut position = vec![usize::MAX; grid.len()];
        let cells: Vec<usize> = mask.active_cells().collect();
        for (k, &c) in cells.iter().enumerate() {
            position[c] = k;
        }
        Self {
            grid,
            cells,
            position,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Unknown index of `cell`, if active.
    pub fn position(&self, cell: usize) -> Option<usize> {
        match self.position[cell] {
            usize::MAX => None,
            k => Some(k),
        }
    }

    /// Values of `field` on the active cells.
    pub fn gather(&self, field: &ScalarField) -> Result<Vec<f64>> {
        self.grid.ensure_same(&field.grid)?;
        Ok(self.cells.iter().map(|&c| field.values[c]).collect())
    }

    /// Full-grid field from active values, zero elsewhere.
    pub fn scatter(&self, values: &[f64], mask_id: Option<u64>) -> ScalarField {
        debug_assert_eq!(values.len(), self.cells.len());
        let mut field = ScalarField::zeros(self.grid);
        for (&c, &v) in self.cells.iter().zip(values) {
            field.values[c] = v;
        }
        field.mask_id = mask_id;
        field
    }
}

/// Compressed sparse row matrix acting on active-cell vectors.
///
/// Produced by [`assemble_laplacian`] as the 5-point `-Δ_h` with homogeneous
/// Dirichlet data on inactive cells, or as a shift `αI + β(-Δ_h)` of it.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    index: ActiveIndex,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    scale: f64,
}

pub fn assemble_laplacian(mask: &DomainMask) -> SparseOperator {
    let index = ActiveIndex::new(mask);
    let grid = *mask.grid();
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let n = index.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    row_ptr.push(0);
    for &cell in index.cells() {
        let (i, j) = grid.coords(cell);
        let me = index.position(cell).expect("active");
        // Row-major numbering keeps south < west < self < east < north.
        let south = (j > 0).then(|| grid.index(i, j - 1));
        let west = (i > 0).then(|| grid.index(i - 1, j));
        let east = (i + 1 < grid.nx).then(|| grid.index(i + 1, j));
        let north = (j + 1 < grid.ny).then(|| grid.index(i, j + 1));
        for nb in [south, west] {
            if let Some(k) = nb.and_then(|c| index.position(c)) {
                col_idx.push(k);
                values.push(-inv_h2);
            }
        }
        col_idx.push(me);
        values.push(4.0 * inv_h2);
        for nb in [east, north] {
            if let Some(k) = nb.and_then(|c| index.position(c)) {
                col_idx.push(k);
                values.push(-inv_h2);
            }
        }
        row_ptr.push(col_idx.len());
    }
    SparseOperator {
        index,
        row_ptr,
        col_idx,
        values,
        scale: grid.h,
    }
}

impl SparseOperator {
    pub fn dimension(&self) -> usize {
        self.index.len()
    }

    /// Cell size the operator was assembled with.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn index(&self) -> &ActiveIndex {
        &self.index
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row `r` as `(column, value)` pairs in increasing column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(k, _)| k == c).map_or(0.0, |(_, v)| v)
    }

    /// `y = M x`.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        y
    }

    /// `alpha * I + beta * self`.
    pub fn shifted(&self, alpha: f64, beta: f64) -> SparseOperator {
        let mut out = self.clone();
        for r in 0..self.dimension() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.values[k] = beta * self.values[k] + if self.col_idx[k] == r { alpha } else { 0.0 };
            }
        }
        out
    }

    /// Dense row-major copy, for small-matrix checks.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dimension();
        let mut dense = vec![vec![0.0; n]; n];
        for (r, row) in dense.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        dense
    }

    /// `⟨M x, x⟩` without weights.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let y = self.apply(x);
        y.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}
