use crate::domain::mask::DomainMask;
use crate::error::Result;
use crate::field::ScalarField;
use crate::pde::laplacian::assemble_laplacian;
use crate::pde::linalg::{LinearSolver, SolveStats, SolverOptions};

/// Solves `-Δ_h p = f` on the active cells with `p = 0` elsewhere.
pub fn solve_poisson(mask: &DomainMask, f: &ScalarField) -> Result<ScalarField> {
    solve_poisson_with(mask, f, &SolverOptions::default()).map(|(p, _)| p)
}

pub fn solve_poisson_with(
    mask: &DomainMask,
    f: &ScalarField,
    options: &SolverOptions,
) -> Result<(ScalarField, SolveStats)> {
    mask.grid().ensure_same(&f.grid)?;
    let solver = LinearSolver::new(assemble_laplacian(mask), *options)?;
    let b = solver.operator().index().gather(f)?;
    let (x, stats) = solver.solve(&b, None)?;
    Ok((
        solver.operator().index().scatter(&x, Some(mask.generation())),
        stats,
    ))
}
