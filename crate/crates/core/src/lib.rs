//! Integrating-factor (Lawson) midpoint time stepping for linear second-order
//! systems `u'' + A u = f`, together with computable a posteriori error
//! estimators and a tolerance-driven step-size controller.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command-line runner live in the companion `ifmid` crate.
//!
//! Module map:
//!
//! * [`linops`]: the SPD operator `A`, the block operator `M = [[0, -I], [A, 0]]`,
//!   the energy norm and the actions of `exp(-tM)`.
//! * [`stepper`]: one midpoint step, the piecewise-linear approximant and its residual.
//! * [`reconstruct`]: the piecewise-quadratic time reconstruction and the
//!   second-order estimator integrand.
//! * [`estimate`]: quadrature, global and local estimators, effectivity indices.
//! * [`control`]: adaptive step-size selection.
//! * [`bench`]: the four manufactured-solution benchmark problems and the
//!   uniform-step convergence driver.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bench;
pub mod control;
pub mod error;
pub mod estimate;
pub mod linops;
pub(crate) mod math;
pub mod reconstruct;
pub mod stepper;

pub use error::{Error, Result};
pub use linops::{Backend, Propagator, SpdOperator, StateVector};
