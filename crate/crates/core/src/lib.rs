//! Shape optimization of the Dirichlet heat equation on pixel domains and its
//! long-horizon comparison with the stationary (Poisson) design problem.
//!
//! Module map:
//! - [`domain`]: grids, masks, complement topology, Hausdorff distances.
//! - [`pde`]: discrete Dirichlet Laplacian, Poisson and heat solvers,
//!   smallest eigenvalue.
//! - [`costs`]: stationary and time-averaged tracking costs.
//! - [`optimizer`]: simulated annealing and greedy polishing over masks.
//! - [`experiments`]: horizon sweeps, rate fits and the Γ/H^c probe.

pub mod costs;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod field;
pub mod optimizer;
pub mod pde;

pub use error::{Error, Result};
pub use field::ScalarField;
