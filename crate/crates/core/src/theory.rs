//! Executable checks of the convergence guarantees: the Kantorovich
//! inequality, the per-step linear rate of ME, dominance over the
//! optimal-step gradient iterate, and the level-point search for general
//! strongly convex oracles.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::gradient_step;
use crate::ellipcenter::{self, Branch, IterationRecord};
use crate::error::{check_dim, Error, Result};
use crate::kernels;
use crate::operator::{EigenBounds, LinearOperator};
use crate::problem::QuadraticProblem;

/// Dense problems up to this size get an exact reference by direct solve.
pub const DIRECT_SOLVE_MAX_N: usize = 2000;

/// Rate checks skip steps whose optimality gap is below this fraction of the
/// initial gap; there the iterates are at rounding level.
pub const RATE_GAP_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kantorovich {
    pub lhs: f64,
    pub bound: f64,
}

impl Kantorovich {
    pub fn margin(&self) -> f64 {
        self.lhs - self.bound
    }
}

/// Both sides of `(y'y)^2 / ((y'Ay)(y'A^{-1}y)) >= 4 l1 ln / (l1 + ln)^2`.
/// Needs exact eigen bounds and a closed-form inverse, so dense operators
/// are rejected.
pub fn kantorovich_check(a: &LinearOperator, y: &[f64]) -> Result<Kantorovich> {
    check_dim(a.dim(), y.len())?;
    if y.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidArgument("Kantorovich check needs y != 0".into()));
    }
    let bounds = a.eigen_bounds()?;
    let (l1, ln) = match (bounds.exact, bounds.lambda_min) {
        (true, Some(lo)) => (lo, bounds.lambda_max),
        _ => {
            return Err(Error::Unsupported(
                "Kantorovich check needs exact eigen bounds".into(),
            ))
        }
    };
    let yy = kernels::dot(y, y);
    let yay = a.inner(y, y)?;
    let yainvy = kernels::dot(y, &a.inverse_apply(y)?);
    Ok(Kantorovich {
        lhs: yy * yy / (yay * yainvy),
        bound: 4.0 * l1 * ln / ((l1 + ln) * (l1 + ln)),
    })
}

/// Reference optimum for rate checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub f_star: f64,
    pub x_star: Option<Vec<f64>>,
}

impl Optimum {
    /// Exact minimizer by direct solve. Dense problems above
    /// [`DIRECT_SOLVE_MAX_N`] are refused.
    pub fn direct(p: &QuadraticProblem) -> Result<Self> {
        if matches!(p.operator(), LinearOperator::Dense(_)) && p.dim() > DIRECT_SOLVE_MAX_N {
            return Err(Error::Unsupported(format!(
                "direct solve is limited to n <= {DIRECT_SOLVE_MAX_N} for dense operators"
            )));
        }
        let x = p.minimizer()?;
        let f_star = p.c() - 0.5 * kernels::dot(p.b(), &x);
        Ok(Self {
            f_star,
            x_star: Some(x),
        })
    }

    /// Best of several converged objective values, lowered by `margin`.
    pub fn from_best(values: &[f64], margin: f64) -> Result<Self> {
        let best = values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            return Err(Error::InvalidArgument("no finite objective value".into()));
        }
        Ok(Self {
            f_star: best - margin.abs(),
            x_star: None,
        })
    }

    /// Direct solve when allowed, otherwise the best of `fallback`.
    pub fn for_problem(p: &QuadraticProblem, fallback: &[f64]) -> Result<Self> {
        match Self::direct(p) {
            Ok(o) => Ok(o),
            Err(Error::Unsupported(_)) => {
                let best = fallback.iter().copied().fold(f64::INFINITY, f64::min);
                Self::from_best(fallback, 1e-12 * best.abs().max(1.0))
            }
            Err(e) => Err(e),
        }
    }

    /// `f(x) - f*`, computed as `||x - x*||_A^2 / 2` when `x*` is known.
    pub fn gap(&self, p: &QuadraticProblem, x: &[f64], f_x: f64) -> Result<f64> {
        match &self.x_star {
            Some(xs) => Ok(0.5 * p.a_norm_sq(&kernels::sub(x, xs))?),
            None => Ok(f_x - self.f_star),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// `1 - lambda_min / lambda_max`
    pub eta_bound: f64,
    /// `((lambda_max - lambda_min) / (lambda_max + lambda_min))^2`
    pub sharper_bound: f64,
    pub per_step_ratios: Vec<f64>,
    pub max_ratio: f64,
    pub satisfied: bool,
    pub sharper_satisfied: bool,
    /// Cumulative A-norm bound, checked when `x*` is known.
    pub a_norm_satisfied: Option<bool>,
    /// Steps left out because the gap was at rounding level.
    pub skipped: usize,
}

/// Tolerance added to the rate bounds.
pub const RATE_TOL: f64 = 1e-10;

/// Streaming form of [`linear_rate_check`]: feed ME records in order, then
/// call [`RateMonitor::finish`]. Only the scalar ratios are kept.
#[derive(Debug, Clone)]
pub struct RateMonitor<'a> {
    p: &'a QuadraticProblem,
    optimum: &'a Optimum,
    eta_bound: f64,
    sharper_bound: f64,
    sqrt_eta: f64,
    ratios: Vec<f64>,
    skipped: usize,
    a_norm_ok: bool,
    gap1: Option<f64>,
    steps: usize,
    carry: Option<(Vec<f64>, f64)>,
}

impl<'a> RateMonitor<'a> {
    pub fn new(p: &'a QuadraticProblem, optimum: &'a Optimum, bounds: &EigenBounds) -> Result<Self> {
        let l1 = bounds
            .lambda_min
            .ok_or_else(|| Error::Unsupported("rate check needs lambda_min".into()))?;
        let ln = bounds.lambda_max;
        let eta_bound = 1.0 - l1 / ln;
        Ok(Self {
            p,
            optimum,
            eta_bound,
            sharper_bound: ((ln - l1) / (ln + l1)).powi(2),
            sqrt_eta: eta_bound.sqrt(),
            ratios: Vec::new(),
            skipped: 0,
            a_norm_ok: true,
            gap1: None,
            steps: 0,
            carry: None,
        })
    }

    fn gap(&self, x: &[f64], f: f64) -> Result<f64> {
        if let Some((prev_x, g)) = &self.carry {
            if prev_x.as_slice() == x {
                return Ok(*g);
            }
        }
        self.optimum.gap(self.p, x, f)
    }

    pub fn observe(&mut self, rec: &IterationRecord) -> Result<()> {
        if rec.branch == Branch::Converged {
            return Ok(());
        }
        let gap_now = self.gap(&rec.x, rec.f_value)?;
        let gap_next = self.optimum.gap(self.p, &rec.x_next, rec.f_next)?;
        self.carry = Some((rec.x_next.clone(), gap_next));
        let k = self.steps;
        self.steps += 1;
        let first = *self.gap1.get_or_insert(gap_now);
        if self.optimum.x_star.is_some() && first > 0.0 {
            // ||x^{k+1} - x*||_A <= sqrt(eta)^k ||x^1 - x*||_A, k counted from 1
            let lhs = (gap_next / first).sqrt();
            let rhs = self.sqrt_eta.powi(k as i32 + 1);
            if lhs > rhs + RATE_TOL {
                self.a_norm_ok = false;
            }
        }
        let floor = match self.optimum.x_star {
            Some(_) => RATE_GAP_FLOOR * first,
            None => 1e-12 * self.optimum.f_star.abs().max(1.0),
        };
        if !(gap_now > floor) {
            self.skipped += 1;
            return Ok(());
        }
        self.ratios.push(gap_next.max(0.0) / gap_now);
        Ok(())
    }

    pub fn finish(self) -> RateReport {
        let max_ratio = self.ratios.iter().copied().fold(0.0, f64::max);
        RateReport {
            eta_bound: self.eta_bound,
            sharper_bound: self.sharper_bound,
            satisfied: max_ratio <= self.eta_bound + RATE_TOL,
            sharper_satisfied: max_ratio <= self.sharper_bound + RATE_TOL,
            per_step_ratios: self.ratios,
            max_ratio,
            a_norm_satisfied: self.optimum.x_star.as_ref().map(|_| self.a_norm_ok),
            skipped: self.skipped,
        }
    }
}

/// Per-step contraction of the optimality gap along an ME trace.
pub fn linear_rate_check(
    p: &QuadraticProblem,
    trace: &[IterationRecord],
    optimum: &Optimum,
    bounds: &EigenBounds,
) -> Result<RateReport> {
    let mut monitor = RateMonitor::new(p, optimum, bounds)?;
    for rec in trace {
        monitor.observe(rec)?;
    }
    Ok(monitor.finish())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub f_me: f64,
    pub f_grad: f64,
    pub branch: Branch,
}

impl Dominance {
    /// `f_grad - f_me`, nonnegative when dominance holds.
    pub fn margin(&self) -> f64 {
        self.f_grad - self.f_me
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.f_me <= self.f_grad + rel_tol * self.f_grad.abs().max(1.0)
    }
}

/// One ME step and one optimal-step gradient step from the same `x`.
pub fn dominance_check(p: &QuadraticProblem, x: &[f64], tau: f64) -> Result<Dominance> {
    let (f_x, g_x) = p.value_and_grad(x)?;
    if kernels::norm(&g_x) == 0.0 {
        return Err(Error::ZeroGradient("dominance check needs grad f(x) != 0".into()));
    }
    let rec = ellipcenter::step(p, x, &g_x, f_x, 0.0, tau)?;
    let x_grad = gradient_step(p, x)?;
    Ok(Dominance {
        f_me: rec.f_next,
        f_grad: p.eval(&x_grad)?,
        branch: rec.branch,
    })
}

/// Budget of step doublings before the oracle is declared non-coercive.
pub const EXPANSION_BUDGET: usize = 200;

/// The unique `t > 0` with `f(x - t grad f(x)) = f(x)` for a strongly convex
/// oracle, by doubling from `t = 1` until the value rises above `f(x)` and
/// then bisecting on the sign of `f(x - t grad f(x)) - f(x)`.
pub fn level_point_bisection<F>(oracle: F, x: &[f64], tol: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (f0, g0) = oracle(x)?;
    if kernels::norm(&g0) == 0.0 {
        return Err(Error::ZeroGradient("x is a stationary point of the oracle".into()));
    }
    let h = |t: f64| -> Result<f64> { Ok(oracle(&kernels::lincomb(1.0, x, -t, &g0))?.0 - f0) };
    let scale = f0.abs().max(1.0);

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while h(hi)? <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > EXPANSION_BUDGET {
            return Err(Error::ExpansionBudget {
                budget: EXPANSION_BUDGET,
            });
        }
    }

    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let hm = h(mid)?;
        if hm.abs() <= tol * scale && hi - lo <= tol * hi {
            return Ok(mid);
        }
        if hm <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Sign changes of `f(x - t grad f(x)) - f(x)` over an even grid of
/// `points` values of `t` on `(0, t_max]`. Exact zeros keep the previous sign.
pub fn level_sign_changes<F>(oracle: F, x: &[f64], t_max: f64, points: usize) -> Result<usize>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let (f0, g0) = oracle(x)?;
    let mut prev: Option<bool> = None;
    let mut changes = 0;
    for i in 1..=points {
        let t = t_max * i as f64 / points as f64;
        let v = oracle(&kernels::lincomb(1.0, x, -t, &g0))?.0 - f0;
        if v == 0.0 {
            continue;
        }
        let pos = v > 0.0;
        if let Some(p) = prev {
            if p != pos {
                changes += 1;
            }
        }
        prev = Some(pos);
    }
    Ok(changes)
}

/// One line of the check log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub instance_id: String,
    pub satisfied: bool,
    pub worst_margin: f64,
}

pub fn write_check_jsonl<W: Write>(records: &[CheckRecord], mut out: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}
