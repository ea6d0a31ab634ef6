#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use turnpike_core::domain::{AdmissibleClass, Block, DomainMask, GridSpec};
use turnpike_core::pde::assemble_laplacian;
use turnpike_core::ScalarField;

/// Interior minus up to three random blocks, redrawn until admissible.
pub fn random_admissible(rng: &mut impl Rng, class: &AdmissibleClass) -> DomainMask {
    let grid = *class.omega().grid();
    loop {
        let holes: Vec<Block> = (0..rng.gen_range(0..=3))
            .map(|_| {
                let w = rng.gen_range(1..=grid.nx / 4);
                let h = rng.gen_range(1..=grid.ny / 4);
                let i0 = rng.gen_range(1..grid.nx - w);
                let j0 = rng.gen_range(1..grid.ny - h);
                Block::new(i0, i0 + w, j0, j0 + h)
            })
            .collect();
        if let Ok(mask) = DomainMask::interior_without(grid, &holes) {
            if class.is_admissible(&mask).unwrap() {
                return mask;
            }
        }
    }
}

/// Random field with values in [-1, 1] on the active cells of `mask`.
pub fn random_field(rng: &mut impl Rng, mask: &DomainMask) -> ScalarField {
    let grid = *mask.grid();
    let values = (0..grid.len())
        .map(|c| if mask.is_active(c) { rng.gen_range(-1.0..=1.0) } else { 0.0 })
        .collect();
    ScalarField::from_values(grid, values).unwrap()
}

/// Smallest eigenvalue of the discrete Dirichlet Laplacian by dense
/// symmetric eigendecomposition.
pub fn dense_lambda1(mask: &DomainMask) -> f64 {
    let rows = assemble_laplacian(mask).to_dense();
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
    SymmetricEigen::new(m).eigenvalues.min()
}

pub fn centered_class(grid: GridSpec, side: usize, max_components: usize) -> AdmissibleClass {
    let i0 = (grid.nx - side) / 2;
    let j0 = (grid.ny - side) / 2;
    let omega = DomainMask::block(grid, Block::new(i0, i0 + side, j0, j0 + side)).unwrap();
    AdmissibleClass::new(omega, max_components).unwrap()
}
