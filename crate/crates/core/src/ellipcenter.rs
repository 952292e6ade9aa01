//! The method of ellipcenters for strongly convex quadratics.
//!
//! Each iteration steps from `x` along `-grad f(x)` to the point `y` on the
//! same level set, then jumps to the center of the ellipse cut from that level
//! set by the plane through `x` spanned by `grad f(x)` and `grad f(y)`. The
//! center is also the minimizer of `f` on that plane. When the two gradients
//! are parallel the plane degenerates to a line and the iterate becomes the
//! midpoint of `x` and `y`, which is the optimal-step gradient iterate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::kernels;
use crate::problem::QuadraticProblem;
use crate::solve::{LoopState, SolveOptions, SolverResult, TraceRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    EllipseCenter,
    Midpoint,
    Converged,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::EllipseCenter => "EllipseCenter",
            Branch::Midpoint => "Midpoint",
            Branch::Converged => "Converged",
        };
        f.write_str(s)
    }
}

/// Everything one ME step computed. Step fields are `None` on the
/// `Converged` branch; `delta`, `alpha` and `beta` are set on the
/// `EllipseCenter` branch only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub x: Vec<f64>,
    pub g_x: Vec<f64>,
    pub t: Option<f64>,
    pub y: Option<Vec<f64>>,
    pub g_y: Option<Vec<f64>>,
    pub branch: Branch,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub f_value: f64,
    pub grad_norm: f64,
    pub x_next: Vec<f64>,
    pub f_next: f64,
}

impl IterationRecord {
    pub fn trace_row(&self, iter: usize) -> TraceRow {
        TraceRow {
            iter,
            branch: Some(self.branch.to_string()),
            f: self.f_value,
            grad_norm: self.grad_norm,
            t: self.t,
            delta: self.delta,
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

/// Coefficients of the ellipse center `x + alpha g_x + beta g_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterCoefficients {
    /// Determinant of the A-Gram matrix of `(g_x, g_y)`.
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// The A-Gram matrix of `(g_x, g_y)` and the right-hand side of the
/// stationarity system on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneSystem {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
    pub q1: f64,
    pub q2: f64,
}

impl PlaneSystem {
    fn build(g_x: &[f64], g_y: &[f64], ag_x: &[f64], ag_y: &[f64]) -> Self {
        Self {
            m11: kernels::dot(g_x, ag_x),
            m12: kernels::dot(g_x, ag_y),
            m22: kernels::dot(g_y, ag_y),
            q1: -kernels::dot(g_x, g_x),
            q2: -kernels::dot(g_x, g_y),
        }
    }

    pub fn delta(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    /// `delta <= tau * ||g_x||_A^2 ||g_y||_A^2`
    pub fn is_dependent(&self, tau: f64) -> bool {
        self.delta() <= tau * self.m11 * self.m22
    }

    /// Cramer's rule on the 2x2 system.
    pub fn solve_cramer(&self) -> CenterCoefficients {
        let delta = self.delta();
        CenterCoefficients {
            delta,
            alpha: (self.q1 * self.m22 - self.m12 * self.q2) / delta,
            beta: (self.m11 * self.q2 - self.m12 * self.q1) / delta,
        }
    }
}

/// The plane minimizer written in the A-orthogonal basis `(g_x, w)` with
/// `w = g_y - (m12 / m11) g_x`. Mathematically equal to Cramer's rule but
/// loses far fewer digits when the two gradients are nearly parallel.
struct OrthogonalCenter {
    coeffs: CenterCoefficients,
    a: f64,
    c: f64,
    w: Vec<f64>,
}

impl OrthogonalCenter {
    fn new(sys: &PlaneSystem, g_x: &[f64], g_y: &[f64], ag_x: &[f64], ag_y: &[f64]) -> Self {
        let r = sys.m12 / sys.m11;
        let w = kernels::lincomb(1.0, g_y, -r, g_x);
        let aw = kernels::lincomb(1.0, ag_y, -r, ag_x);
        let s = kernels::dot(&w, &aw);
        let a = sys.q1 / sys.m11;
        let c = -kernels::dot(g_x, &w) / s;
        Self {
            coeffs: CenterCoefficients {
                delta: sys.m11 * s,
                alpha: a - c * r,
                beta: c,
            },
            a,
            c,
            w,
        }
    }

    fn apply(&self, x: &[f64], g_x: &[f64]) -> Vec<f64> {
        let mut xn = kernels::lincomb(1.0, x, self.a, g_x);
        kernels::axpy(self.c, &self.w, &mut xn);
        xn
    }
}

/// Level step: `t = 2 ||g||^2 / g^T A g` and `y = x - t g`, so that
/// `f(y) = f(x)`.
pub fn level_step(p: &QuadraticProblem, x: &[f64], g_x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(p.dim(), x.len())?;
    check_dim(p.dim(), g_x.len())?;
    let ag = p.operator().apply_unchecked(g_x);
    let t = step_length(g_x, &ag)?;
    Ok((t, kernels::lincomb(1.0, x, -t, g_x)))
}

fn step_length(g: &[f64], ag: &[f64]) -> Result<f64> {
    let gg = kernels::dot(g, g);
    if gg == 0.0 {
        return Err(Error::ZeroGradient("level step needs a nonzero gradient".into()));
    }
    let gag = kernels::dot(g, ag);
    let t = 2.0 * gg / gag;
    if !(gag > 0.0) || !t.is_finite() {
        return Err(Error::NonPositiveCurvature { curvature: gag });
    }
    Ok(t)
}

/// Center coefficients for two A-independent gradients.
///
/// Fails with [`Error::DependentGradients`] when the Gram determinant is
/// within `tau` (relative) of zero; the caller should have taken the midpoint
/// branch.
pub fn ellipse_center_coeffs(
    p: &QuadraticProblem,
    g_x: &[f64],
    g_y: &[f64],
    tau: f64,
) -> Result<CenterCoefficients> {
    check_dim(p.dim(), g_x.len())?;
    check_dim(p.dim(), g_y.len())?;
    let a = p.operator();
    let (ag_x, ag_y) = (a.apply_unchecked(g_x), a.apply_unchecked(g_y));
    let sys = PlaneSystem::build(g_x, g_y, &ag_x, &ag_y);
    let center = OrthogonalCenter::new(&sys, g_x, g_y, &ag_x, &ag_y);
    if is_dependent(&center, &sys, tau) {
        return Err(Error::DependentGradients {
            delta: center.coeffs.delta,
            threshold: tau * sys.m11 * sys.m22,
        });
    }
    Ok(center.coeffs)
}

/// `delta <= tau * ||g_x||_A^2 ||g_y||_A^2`, with `delta` from the
/// orthogonalized form.
fn is_dependent(center: &OrthogonalCenter, sys: &PlaneSystem, tau: f64) -> bool {
    !(center.coeffs.delta > tau * sys.m11 * sys.m22)
}

/// The same coefficients written out term by term as sums of products of
/// plain and A-weighted inner products. Kept as a second route for checking
/// [`PlaneSystem::solve`].
pub fn expanded_center_coeffs(p: &QuadraticProblem, g_x: &[f64], g_y: &[f64]) -> Result<CenterCoefficients> {
    let gy_agy = p.a_inner(g_y, g_y)?;
    let gx_agx = p.a_inner(g_x, g_x)?;
    let gx_agy = p.a_inner(g_x, g_y)?;
    let gy_agx = p.a_inner(g_y, g_x)?;
    let gy_gx = kernels::dot(g_y, g_x);
    let gx_gx = kernels::dot(g_x, g_x);
    let delta = gy_agy * gx_agx - gx_agy * gx_agy;
    let alpha = (gy_gx * gx_agy - gx_gx * gy_agy) / delta;
    let beta = (-gy_gx * gx_agx + gx_gx * gy_agx) / delta;
    Ok(CenterCoefficients { delta, alpha, beta })
}

/// One ME step from `x` given its gradient and value.
pub(crate) fn step(
    p: &QuadraticProblem,
    x: &[f64],
    g_x: &[f64],
    f_x: f64,
    eps: f64,
    tau: f64,
) -> Result<IterationRecord> {
    let grad_norm = kernels::norm(g_x);
    if grad_norm <= eps {
        return Ok(IterationRecord {
            x: x.to_vec(),
            g_x: g_x.to_vec(),
            t: None,
            y: None,
            g_y: None,
            branch: Branch::Converged,
            delta: None,
            alpha: None,
            beta: None,
            f_value: f_x,
            grad_norm,
            x_next: x.to_vec(),
            f_next: f_x,
        });
    }

    let a = p.operator();
    let ag_x = a.apply_unchecked(g_x);
    let t = step_length(g_x, &ag_x)?;
    let y = kernels::lincomb(1.0, x, -t, g_x);
    let g_y = p.grad_unchecked(&y);
    let ag_y = a.apply_unchecked(&g_y);
    let sys = PlaneSystem::build(g_x, &g_y, &ag_x, &ag_y);
    let center = OrthogonalCenter::new(&sys, g_x, &g_y, &ag_x, &ag_y);

    let (branch, coeffs, x_next) = if is_dependent(&center, &sys, tau) {
        // (x + y) / 2 written as x - (t/2) g_x, which reproduces the
        // optimal-step gradient iterate bit for bit.
        (Branch::Midpoint, None, kernels::lincomb(1.0, x, -0.5 * t, g_x))
    } else {
        let xn = center.apply(x, g_x);
        (Branch::EllipseCenter, Some(center.coeffs), xn)
    };
    if !kernels::all_finite(&x_next) {
        return Err(Error::NonFinite {
            context: format!("ME {branch} update"),
        });
    }
    let f_next = p.eval(&x_next)?;

    Ok(IterationRecord {
        x: x.to_vec(),
        g_x: g_x.to_vec(),
        t: Some(t),
        y: Some(y),
        g_y: Some(g_y),
        branch,
        delta: coeffs.map(|c| c.delta),
        alpha: coeffs.map(|c| c.alpha),
        beta: coeffs.map(|c| c.beta),
        f_value: f_x,
        grad_norm,
        x_next,
        f_next,
    })
}

/// One ME iteration from `x`, treating `x` as the starting point when the
/// tolerance is relative.
pub fn me_iterate(p: &QuadraticProblem, x: &[f64], opts: &SolveOptions) -> Result<IterationRecord> {
    opts.validate()?;
    let (f_x, g_x) = p.value_and_grad(x)?;
    let eps = opts.effective_epsilon(kernels::norm(&g_x));
    step(p, x, &g_x, f_x, eps, opts.dependence_tolerance)
}

/// Runs ME from `x1` until the gradient tolerance or the iteration cap.
/// `iterations` counts x-updates; the convergence test precedes each update.
pub fn me_solve(p: &QuadraticProblem, x1: &[f64], opts: &SolveOptions) -> Result<SolverResult> {
    opts.validate()?;
    check_dim(p.dim(), x1.len())?;
    check_finite(x1, "starting point")?;
    let (mut f, mut g) = p.value_and_grad(x1)?;
    let mut state = LoopState::new(opts, kernels::norm(&g));
    let mut records = opts.record_trace.then(Vec::new);
    let mut x = x1.to_vec();
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        let rec = step(p, &x, &g, f, state.eps, opts.dependence_tolerance)?;
        if rec.branch == Branch::Converged {
            break;
        }
        iterations += 1;
        state.push(|| rec.trace_row(iterations));
        x = rec.x_next.clone();
        (f, g) = p.value_and_grad(&x)?;
        if let Some(r) = records.as_mut() {
            r.push(rec);
        }
    }

    let gn = kernels::norm(&g);
    let mut result = state.finish(x, iterations, f, gn);
    result.me_records = records;
    Ok(result)
}
