//! Finite-dimensional realization of `A`, the block operator `M`, the energy
//! norm and the propagator `exp(-tM)`.

pub mod dense;
mod eigen;
mod operator;
mod propagator;
mod state;

pub use eigen::{jacobi_eigen, Eigen};
pub use operator::SpdOperator;
pub use propagator::{Backend, Propagator};
pub use state::StateVector;
