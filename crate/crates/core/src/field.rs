//! Grid functions and their discrete norms.
//!
//! All norms use the cell quadrature `h^2 * sum`. Gradients are forward
//! differences on the full grid, with values beyond the last row or column
//! taken as zero (those cells are frame cells, so states vanish there anyway).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::grid::{Block, GridSpec};
use crate::domain::mask::DomainMask;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    /// Generation of the mask this field lives on; `None` for full-grid data.
    #[serde(default)]
    pub mask_id: Option<u64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            mask_id: None,
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at cell {k}")));
        }
        Ok(Self {
            grid,
            values,
            mask_id: None,
        })
    }

    /// Samples `f(x, y)` at the cell centers.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|c| {
                let [x, y] = grid.center(c);
                f(x, y)
            })
            .collect();
        Self {
            grid,
            values,
            mask_id: None,
        }
    }

    /// `value` on the cells of `block`, zero elsewhere.
    pub fn indicator(grid: GridSpec, block: Block, value: f64) -> Self {
        let mut field = Self::zeros(grid);
        for c in block.cells(&grid) {
            field.values[c] = value;
        }
        field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Copy with every inactive cell set to zero, stamped with the mask.
    pub fn restricted_to(&self, mask: &DomainMask) -> Result<Self> {
        self.grid.ensure_same(mask.grid())?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(c, &v)| if mask.is_active(c) { v } else { 0.0 })
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
            mask_id: Some(mask.generation()),
        })
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            mask_id: None,
        })
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            mask_id: None,
        })
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| alpha * v).collect(),
            mask_id: self.mask_id,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Squared forward-difference gradient at one cell, already multiplied by `h^2`.
    #[inline]
    pub fn scaled_gradient_sq_at(&self, cell: usize) -> f64 {
        let (i, j) = self.grid.coords(cell);
        let v = self.values[cell];
        let east = if i + 1 < self.grid.nx { self.values[cell + 1] } else { 0.0 };
        let north = if j + 1 < self.grid.ny {
            self.values[cell + self.grid.nx]
        } else {
            0.0
        };
        (east - v) * (east - v) + (north - v) * (north - v)
    }

    /// `||u||^2_{L^2(D)}`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// `||grad_h u||^2_{L^2(D)}` with forward differences.
    pub fn gradient_norm_sq(&self) -> f64 {
        // h^2 * |(u_E - u)/h|^2 = (u_E - u)^2, so the cell area cancels.
        (0..self.values.len()).map(|c| self.scaled_gradient_sq_at(c)).sum()
    }

    pub fn h1_norm_sq(&self) -> f64 {
        self.l2_norm_sq() + self.gradient_norm_sq()
    }

    /// `(||u||^2_{L^2(region)}, ||grad_h u||^2_{L^2(region)})` summed over the
    /// active cells of `region`.
    pub fn norms_sq_on(&self, region: &DomainMask) -> Result<(f64, f64)> {
        self.grid.ensure_same(region.grid())?;
        let area = self.grid.cell_area();
        let mut l2 = 0.0;
        let mut grad = 0.0;
        for c in region.active_cells() {
            l2 += area * self.values[c] * self.values[c];
            grad += self.scaled_gradient_sq_at(c);
        }
        Ok((l2, grad))
    }

    /// CSV with a header line and one `i,j,value` row per cell, rows of `j`
    /// outermost. Values use the shortest representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        out.push_str("i,j,value\n");
        for (c, v) in self.values.iter().enumerate() {
            let (i, j) = self.grid.coords(c);
            let _ = writeln!(out, "{i},{j},{v:?}");
        }
        out
    }

    pub fn from_csv(grid: GridSpec, text: &str) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        let mut seen = vec![false; grid.len()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('i')) {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::Parse(format!("field CSV line {}: {line:?}", lineno + 1));
            if parts.len() != 3 {
                return Err(bad());
            }
            let i: usize = parts[0].parse().map_err(|_| bad())?;
            let j: usize = parts[1].parse().map_err(|_| bad())?;
            let v: f64 = parts[2].parse().map_err(|_| bad())?;
            if i >= grid.nx || j >= grid.ny || !v.is_finite() {
                return Err(bad());
            }
            let c = grid.index(i, j);
            values[c] = v;
            seen[c] = true;
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            let (i, j) = grid.coords(c);
            return Err(Error::Parse(format!("field CSV has no row for cell ({i}, {j})")));
        }
        Ok(Self {
            grid,
            values,
            mask_id: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("field serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let field: ScalarField =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("field JSON: {e}")))?;
        field.grid.validate()?;
        let ScalarField {
            grid,
            values,
            mask_id,
        } = field;
        let mut f = Self::from_values(grid, values)?;
        f.mask_id = mask_id;
        Ok(f)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_round_trip() {
        let grid = GridSpec::unit_square(5).unwrap();
        let f = ScalarField::from_fn(grid, |x, y| (x * 7.1).sin() + y / 3.0);
        assert_eq!(ScalarField::from_csv(grid, &f.to_csv()).unwrap(), f);
        assert_eq!(ScalarField::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn csv_with_missing_cell_is_rejected() {
        let grid = GridSpec::unit_square(4).unwrap();
        let f = ScalarField::zeros(grid);
        let csv = f.to_csv();
        let truncated: String = csv.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(ScalarField::from_csv(grid, &truncated).is_err());
    }

    #[test]
    fn single_bump_norms() {
        let grid = GridSpec::unit_square(6).unwrap();
        let mut f = ScalarField::zeros(grid);
        f.values[grid.index(2, 3)] = 1.0;
        let h2 = grid.cell_area();
        assert!((f.l2_norm_sq() - h2).abs() < 1e-15);
        // Four edges with a unit jump.
        assert!((f.gradient_norm_sq() - 4.0).abs() < 1e-15);
    }
}
