use crate::error::{check_dim, check_finite, Error, Result};
use crate::kernels;
use crate::problem::QuadraticProblem;
use crate::solve::{LoopState, SolveOptions, SolverResult, TraceRow};

use super::wolfe::{wolfe_search, WolfeParams};

/// Exact line-search step `||r||^2 / r^T A r` along the residual `r`.
fn optimal_step(p: &QuadraticProblem, r: &[f64]) -> Result<f64> {
    let ar = p.operator().apply_unchecked(r);
    let rar = kernels::dot(r, &ar);
    let t = kernels::dot(r, r) / rar;
    if !(rar > 0.0) {
        return Err(Error::NonPositiveCurvature { curvature: rar });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite {
            context: "optimal gradient step".into(),
        });
    }
    Ok(t)
}

/// One optimal-step gradient iterate from `x`.
pub fn gradient_step(p: &QuadraticProblem, x: &[f64]) -> Result<Vec<f64>> {
    let r = p.grad(x)?;
    let t = optimal_step(p, &r)?;
    Ok(kernels::lincomb(1.0, x, -t, &r))
}

/// Steepest descent with exact line search.
pub fn gradient_optimal_step_solve(
    p: &QuadraticProblem,
    x1: &[f64],
    opts: &SolveOptions,
) -> Result<SolverResult> {
    opts.validate()?;
    check_dim(p.dim(), x1.len())?;
    check_finite(x1, "starting point")?;
    let mut x = x1.to_vec();
    let mut r = p.grad_unchecked(&x);
    let mut rn = kernels::norm(&r);
    let mut state = LoopState::new(opts, rn);
    let mut k = 0;
    while rn > state.eps && k < opts.max_iterations {
        let t = optimal_step(p, &r)?;
        if state.trace.is_some() {
            let f = p.eval(&x)?;
            state.push(|| {
                let mut row = TraceRow::plain(k + 1, f, rn);
                row.t = Some(t);
                row
            });
        }
        kernels::axpy(-t, &r, &mut x);
        r = p.grad_unchecked(&x);
        rn = kernels::norm(&r);
        k += 1;
    }
    let f = p.eval(&x)?;
    Ok(state.finish(x, k, f, rn))
}

/// Steepest descent with a Wolfe line search.
pub fn gradient_wolfe_solve(
    p: &QuadraticProblem,
    x1: &[f64],
    wolfe: &WolfeParams,
    opts: &SolveOptions,
) -> Result<SolverResult> {
    opts.validate()?;
    wolfe.validate()?;
    check_dim(p.dim(), x1.len())?;
    check_finite(x1, "starting point")?;
    let oracle = |z: &[f64]| p.value_and_grad(z);
    let mut x = x1.to_vec();
    let (mut f, mut g) = p.value_and_grad(&x)?;
    let mut gn = kernels::norm(&g);
    let mut state = LoopState::new(opts, gn);
    let mut k = 0;
    while gn > state.eps && k < opts.max_iterations {
        let d = kernels::scale(-1.0, &g);
        let step = wolfe_search(oracle, &x, &d, wolfe)?;
        state.push(|| {
            let mut row = TraceRow::plain(k + 1, f, gn);
            row.t = Some(step.t);
            row
        });
        kernels::axpy(step.t, &d, &mut x);
        (f, g) = p.value_and_grad(&x)?;
        gn = kernels::norm(&g);
        k += 1;
    }
    Ok(state.finish(x, k, f, gn))
}
