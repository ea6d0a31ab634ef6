//! Discrete Dirichlet Laplacian on masks and the solvers built on it.

pub mod eigen;
pub mod heat;
pub mod laplacian;
pub mod linalg;
pub mod poisson;

pub use eigen::{smallest_eigenvalue, smallest_eigenvalue_with, EigenOptions, Eigenpair};
pub use heat::{
    default_dt, solve_heat, solve_heat_sampled, time_grid, HeatStepper, HeatTrajectory,
};
pub use laplacian::{assemble_laplacian, ActiveIndex, SparseOperator};
pub use linalg::{LinearSolver, SolveStats, SolverKind, SolverOptions};
pub use poisson::{solve_poisson, solve_poisson_with};
