//! Shape search over admissible masks: simulated annealing on boundary
//! flips, followed by a greedy polish to a local minimum.

pub mod anneal;
pub mod polish;
pub mod schedule;

pub use anneal::{
    boundary_move, candidate_moves, optimize, Direction, MoveProposal, OptimizationTrace,
    TraceEntry,
};
pub use polish::{polish, PolishStats};
pub use schedule::{AnnealSchedule, TemperatureScale};
