//! The method of ellipcenters (ME) for minimizing strongly convex quadratics
//! `f(w) = 1/2 w^T A w - b^T w + c`, together with the usual first-order
//! baselines, seeded instance generators, executable convergence checks and
//! a benchmark harness.
//!
//! Vector kernels run on rayon when the `parallel` feature is enabled (the
//! default) and fall back to plain loops otherwise. Both paths produce
//! bitwise identical results.

pub mod baselines;
pub mod bench;
pub mod ellipcenter;
pub mod error;
pub mod generators;
pub mod io;
pub mod kernels;
pub mod operator;
pub mod problem;
pub mod rng;
pub mod solve;
pub mod theory;

pub use ellipcenter::{me_iterate, me_solve, Branch, IterationRecord};
pub use error::{Error, Result};
pub use operator::{EigenBounds, LinearOperator};
pub use problem::QuadraticProblem;
pub use solve::{EpsilonMode, SolveOptions, SolverResult, Termination};
