//! Long-horizon experiments: horizon sweeps comparing finite-horizon and
//! stationary optima, log-log rate fits, and the Γ/H^c convergence probe.

pub mod gamma;
pub mod plot;
pub mod rate;
pub mod sweep;

pub use gamma::{gamma_convergence_probe, shrinking_hole_schedule, with_hole, GammaProbe, GammaRow};
pub use rate::{fit_rate, RateFit, MIN_FIT_POINTS};
pub use sweep::{
    fixed_domain_gaps, horizon_seed, quasi_optimality, restart_seeds, run_sweep, summary,
    transient_mask_name, CrossCheck, QuasiOptimality, RestartResult, SweepConfig, SweepReport,
    SweepRow, MIN_RESTARTS, NOISE_FLOOR_EPS,
};
