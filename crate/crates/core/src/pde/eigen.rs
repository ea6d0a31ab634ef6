//! Smallest Dirichlet eigenvalue by inverse power iteration.

use serde::{Deserialize, Serialize};

use crate::domain::mask::DomainMask;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::pde::laplacian::assemble_laplacian;
use crate::pde::linalg::{LinearSolver, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Stop when successive Rayleigh quotients differ by at most `tol * λ`.
    pub tol: f64,
    pub max_iter: usize,
    pub solver: SolverOptions,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 20_000,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit `L^2(Ω)` norm, nonnegative sum.
    pub vector: ScalarField,
    pub iterations: usize,
}

pub fn smallest_eigenvalue(mask: &DomainMask) -> Result<Eigenpair> {
    smallest_eigenvalue_with(mask, &EigenOptions::default())
}

pub fn smallest_eigenvalue_with(mask: &DomainMask, options: &EigenOptions) -> Result<Eigenpair> {
    let solver = LinearSolver::new(assemble_laplacian(mask), options.solver)?;
    let a = solver.operator();
    let n = a.dimension();
    let unit = |v: &mut [f64]| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    // Deterministic start with a component along every positive eigenvector.
    let mut x: Vec<f64> = (0..n).map(|k| 1.0 + 0.25 * ((k * 7919) % 13) as f64 / 13.0).collect();
    unit(&mut x);
    let mut rho = a.quadratic_form(&x);
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < options.max_iter {
        let (mut y, _) = solver.solve(&x, Some(&x))?;
        unit(&mut y);
        x = y;
        let next = a.quadratic_form(&x);
        change = (next - rho).abs();
        rho = next;
        iterations += 1;
        if change <= options.tol * rho.abs() {
            break;
        }
    }
    if change > options.tol * rho.abs() {
        return Err(Error::EigenNoConvergence { change, iterations });
    }

    // Euclidean unit norm -> unit L^2 norm with the h^2 weight.
    let h = mask.grid().h;
    let sign = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    x.iter_mut().for_each(|v| *v *= sign / h);
    Ok(Eigenpair {
        value: rho,
        vector: a.index().scatter(&x, Some(mask.generation())),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::domain::grid::GridSpec;

    #[test]
    fn unit_square_and_scaling() {
        let n = 32;
        for side in [1.0, 2.5] {
            let grid = GridSpec::node_centered_square(n, side).unwrap();
            let pair = smallest_eigenvalue(&DomainMask::interior(grid).unwrap()).unwrap();
            let exact = 2.0 * PI * PI / (side * side);
            // Discrete value: (8 / h^2) sin^2(π h / (2 L)).
            let h = grid.h;
            let discrete = 8.0 / (h * h) * (PI * h / (2.0 * side)).sin().powi(2);
            assert!((pair.value - discrete).abs() <= 1e-7 * discrete);
            assert!((pair.value - exact).abs() <= 0.01 * exact);
            assert!((pair.vector.l2_norm_sq() - 1.0).abs() < 1e-12);
            assert!(pair.vector.values.iter().sum::<f64>() > 0.0);
        }
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let grid = GridSpec::unit_square(20).unwrap();
        let opts = EigenOptions {
            max_iter: 1,
            ..EigenOptions::default()
        };
        let err = smallest_eigenvalue_with(&DomainMask::interior(grid).unwrap(), &opts).unwrap_err();
        assert!(matches!(err, Error::EigenNoConvergence { iterations: 1, .. }));
    }
}
