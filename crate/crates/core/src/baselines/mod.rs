//! Comparison solvers: optimal-step gradient, conjugate gradient,
//! Barzilai-Borwein (long and short steps), Nesterov's fast gradient, and
//! gradient with a Wolfe line search.

mod bb;
mod cg;
mod fast_gradient;
mod gradient;
mod wolfe;

pub use bb::{bb_solve, BBVariant};
pub use cg::{cg_solve, CgStep, ConjugateGradient, CG_EXTRA_ITERATIONS};
pub use fast_gradient::{fast_gradient_solve, fast_gradient_solve_with, FastGradient};
pub use gradient::{gradient_optimal_step_solve, gradient_step, gradient_wolfe_solve};
pub use wolfe::{wolfe_search, WolfeParams, WolfeStep};
