//! Preventive-maintenance scheduling for a fleet of components that share a
//! spare-parts stock.
//!
//! The crate is organised bottom-up:
//!
//! - [`sysmodel`]: exact integer-regime dynamics, failure law and costs.
//! - [`relax`]: the piecewise-linear relaxation of the dynamics and its
//!   analytic partial derivatives.
//! - [`dsearch`]: a small mesh-adaptive direct search used as blackbox solver.
//! - [`appdecomp`]: auxiliary subproblems, adjoint multipliers and the
//!   fixed-point driver.
//! - [`evalharness`]: scenarios, sample-average objective and the evaluation
//!   report.
//! - [`tuning`]: Latin hypercube designs and the parameter tuner.
//! - [`io`]: config, strategy and report files.

// Index loops mirror the matrix notation; negated float comparisons are
// there to reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod appdecomp;
pub mod dsearch;
pub mod error;
pub mod evalharness;
pub mod exec;
pub mod io;
pub mod relax;
pub mod sysmodel;
pub mod tuning;

pub use error::{Error, Result};
pub use exec::Exec;
