use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::kernels;
use crate::problem::QuadraticProblem;
use crate::solve::{LoopState, SolveOptions, SolverResult, TraceRow};

use super::wolfe::{wolfe_search, WolfeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBVariant {
    pub short_steps: bool,
}

impl BBVariant {
    pub const LONG: BBVariant = BBVariant { short_steps: false };
    pub const SHORT: BBVariant = BBVariant { short_steps: true };

    /// Two-point step from `s = x - x_prev` and `y = d_prev - d`, where `d`
    /// is the negative gradient. `None` when the denominator is not positive.
    pub fn step(&self, s: &[f64], y: &[f64]) -> Option<f64> {
        let sy = kernels::dot(s, y);
        let t = if self.short_steps {
            let yy = kernels::dot(y, y);
            if !(yy > 0.0 && sy > 0.0) {
                return None;
            }
            sy / yy
        } else {
            if !(sy > 0.0) {
                return None;
            }
            kernels::dot(s, s) / sy
        };
        t.is_finite().then_some(t)
    }
}

/// Barzilai-Borwein iteration. The first step, and any step whose two-point
/// formula degenerates, comes from a Wolfe search along `d = b - A x`.
pub fn bb_solve(
    p: &QuadraticProblem,
    x1: &[f64],
    variant: BBVariant,
    wolfe: &WolfeParams,
    opts: &SolveOptions,
) -> Result<SolverResult> {
    opts.validate()?;
    wolfe.validate()?;
    check_dim(p.dim(), x1.len())?;
    check_finite(x1, "starting point")?;
    let oracle = |z: &[f64]| p.value_and_grad(z);
    let neg_grad = |z: &[f64]| kernels::sub(p.b(), &p.operator().apply_unchecked(z));

    let mut x = x1.to_vec();
    let mut d = neg_grad(&x);
    let mut dn = kernels::norm(&d);
    let mut state = LoopState::new(opts, dn);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut k = 0;
    while dn > state.eps && k < opts.max_iterations {
        let two_point = prev.as_ref().and_then(|(x_prev, d_prev)| {
            let s = kernels::sub(&x, x_prev);
            let y = kernels::sub(d_prev, &d);
            variant.step(&s, &y)
        });
        let t = match two_point {
            Some(t) => t,
            None => wolfe_search(oracle, &x, &d, wolfe)?.t,
        };
        if state.trace.is_some() {
            let f = p.eval(&x)?;
            state.push(|| {
                let mut row = TraceRow::plain(k + 1, f, dn);
                row.t = Some(t);
                row
            });
        }
        let mut x_new = x.clone();
        kernels::axpy(t, &d, &mut x_new);
        if !kernels::all_finite(&x_new) {
            return Err(Error::NonFinite {
                context: "Barzilai-Borwein update".into(),
            });
        }
        let d_new = neg_grad(&x_new);
        prev = Some((std::mem::replace(&mut x, x_new), std::mem::replace(&mut d, d_new)));
        dn = kernels::norm(&d);
        k += 1;
    }
    let f = p.eval(&x)?;
    Ok(state.finish(x, k, f, dn))
}
