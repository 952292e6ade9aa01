//! Wolfe line search by extrapolation and bisection.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::kernels;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WolfeParams {
    /// Extrapolation factor while no upper bracket is known.
    pub a: f64,
    /// Sufficient-decrease constant.
    pub m1: f64,
    /// Curvature constant.
    pub m2: f64,
    pub max_trials: usize,
}

impl Default for WolfeParams {
    fn default() -> Self {
        Self {
            a: 2.0,
            m1: 1e-4,
            m2: 0.9,
            max_trials: 100,
        }
    }
}

impl WolfeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 1.0) {
            return Err(Error::Config(format!("Wolfe a = {} must exceed 1", self.a)));
        }
        if !(0.0 < self.m1 && self.m1 < self.m2 && self.m2 < 1.0) {
            return Err(Error::Config(format!(
                "Wolfe constants must satisfy 0 < m1 < m2 < 1 (got m1 = {}, m2 = {})",
                self.m1, self.m2
            )));
        }
        if self.max_trials == 0 {
            return Err(Error::Config("Wolfe max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfeStep {
    pub t: f64,
    pub trials: usize,
    /// False when the trial budget ran out; `t` is then the largest step
    /// found that satisfies sufficient decrease only.
    pub satisfied: bool,
}

/// Finds `t > 0` with
/// `f(x + t d) <= f(x) + m1 t d^T g(x)` and `d^T g(x + t d) >= m2 d^T g(x)`.
///
/// Starts at `t = 1` with bracket `[0, inf)`. A step failing sufficient
/// decrease becomes the right end, a step passing decrease but failing
/// curvature becomes the left end. While the right end is infinite the step
/// is multiplied by `a`, afterwards the bracket is bisected.
pub fn wolfe_search<F>(oracle: F, x: &[f64], d: &[f64], params: &WolfeParams) -> Result<WolfeStep>
where
    F: Fn(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    params.validate()?;
    check_dim(x.len(), d.len())?;
    let (f0, g0) = oracle(x)?;
    let slope0 = kernels::dot(d, &g0);
    if !(slope0 < 0.0) {
        return Err(Error::NotDescent { slope: slope0 });
    }

    let mut t = 1.0;
    let mut t_lo = 0.0;
    let mut t_hi = f64::INFINITY;
    for trial in 1..=params.max_trials {
        let xt = kernels::lincomb(1.0, x, t, d);
        let (ft, gt) = oracle(&xt)?;
        let slope = kernels::dot(d, &gt);
        let decrease = ft <= f0 + params.m1 * t * slope0;
        if decrease && slope >= params.m2 * slope0 {
            return Ok(WolfeStep {
                t,
                trials: trial,
                satisfied: true,
            });
        } else if decrease {
            t_lo = t;
        } else {
            t_hi = t;
        }
        t = if t_hi.is_infinite() {
            params.a * t
        } else {
            0.5 * (t_lo + t_hi)
        };
    }
    if t_lo > 0.0 {
        Ok(WolfeStep {
            t: t_lo,
            trials: params.max_trials,
            satisfied: false,
        })
    } else {
        Err(Error::LineSearchFailed {
            trials: params.max_trials,
        })
    }
}
