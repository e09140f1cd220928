//! The four manufactured-solution wave problems on a uniform finite-difference
//! grid, a uniform-step convergence driver and order utilities.

mod problems;
mod reference;
mod runs;

pub use problems::{build_problem, DiscreteSystem, ProblemId, ProblemSpec};
pub use reference::{Reference, ReferenceSolution};
pub use runs::{
    convergence_order, loglog_slope, nodal_errors, run_adaptive, run_uniform, AdaptiveRun,
    UniformRun,
};
