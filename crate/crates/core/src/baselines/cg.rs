use crate::error::{check_dim, check_finite, Error, Result};
use crate::kernels;
use crate::problem::QuadraticProblem;
use crate::solve::{LoopState, SolveOptions, SolverResult, TraceRow};

/// Iterations allowed beyond `n` before CG gives up on finite termination.
pub const CG_EXTRA_ITERATIONS: usize = 20;

/// Conjugate gradient state. Directions are built from the gradient itself,
/// `d0 = g0` and `dk = gk + theta d(k-1)` with
/// `theta = -<gk, A d(k-1)> / <d(k-1), A d(k-1)>`, and the step is
/// `t = -<dk, gk> / <dk, A dk>`, so steps are negative multiples of `dk`.
#[derive(Debug, Clone)]
pub struct ConjugateGradient {
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    /// Previous direction and its image under `A`.
    prev: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgStep {
    pub direction: Vec<f64>,
    pub theta: Option<f64>,
    pub t: f64,
}

impl ConjugateGradient {
    pub fn new(p: &QuadraticProblem, x1: &[f64]) -> Result<Self> {
        Ok(Self {
            x: x1.to_vec(),
            g: p.grad(x1)?,
            prev: None,
        })
    }

    /// Advances one iteration and returns the direction used.
    pub fn step(&mut self, p: &QuadraticProblem) -> Result<CgStep> {
        let a = p.operator();
        let (d, theta) = match self.prev.take() {
            None => (self.g.clone(), None),
            Some((d_prev, ad_prev)) => {
                let theta = -kernels::dot(&self.g, &ad_prev) / kernels::dot(&d_prev, &ad_prev);
                (kernels::lincomb(1.0, &self.g, theta, &d_prev), Some(theta))
            }
        };
        let ad = a.apply_unchecked(&d);
        let dad = kernels::dot(&d, &ad);
        if !(dad > 0.0) {
            return Err(Error::NonPositiveCurvature { curvature: dad });
        }
        let t = -kernels::dot(&d, &self.g) / dad;
        if !t.is_finite() {
            return Err(Error::NonFinite {
                context: "conjugate gradient step".into(),
            });
        }
        kernels::axpy(t, &d, &mut self.x);
        self.g = p.grad_unchecked(&self.x);
        self.prev = Some((d.clone(), ad));
        Ok(CgStep { direction: d, theta, t })
    }
}

/// Conjugate gradient without restarts, capped at `n + CG_EXTRA_ITERATIONS`
/// iterations (or `opts.max_iterations` if smaller).
pub fn cg_solve(p: &QuadraticProblem, x1: &[f64], opts: &SolveOptions) -> Result<SolverResult> {
    opts.validate()?;
    check_dim(p.dim(), x1.len())?;
    check_finite(x1, "starting point")?;
    let cap = opts.max_iterations.min(p.dim() + CG_EXTRA_ITERATIONS);
    let mut cg = ConjugateGradient::new(p, x1)?;
    let mut gn = kernels::norm(&cg.g);
    let mut state = LoopState::new(opts, gn);
    let mut k = 0;
    while gn > state.eps && k < cap {
        let f = if state.trace.is_some() { p.eval(&cg.x)? } else { 0.0 };
        let s = cg.step(p)?;
        state.push(|| {
            let mut row = TraceRow::plain(k + 1, f, gn);
            row.t = Some(s.t);
            row
        });
        gn = kernels::norm(&cg.g);
        k += 1;
    }
    let f = p.eval(&cg.x)?;
    Ok(state.finish(cg.x, k, f, gn))
}
