//! Options, results and traces shared by all solvers.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ellipcenter::IterationRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsilonMode {
    /// Stop when `||grad f(x)|| <= epsilon`.
    Absolute,
    /// Stop when `||grad f(x)|| <= epsilon * ||grad f(x1)||`.
    RelativeToInitial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub epsilon: f64,
    pub epsilon_mode: EpsilonMode,
    pub max_iterations: usize,
    /// Relative Gram-determinant threshold below which two gradients count
    /// as linearly dependent.
    pub dependence_tolerance: f64,
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            epsilon_mode: EpsilonMode::RelativeToInitial,
            max_iterations: 100_000,
            dependence_tolerance: 1e-12,
            record_trace: false,
        }
    }
}

impl SolveOptions {
    pub fn relative(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn absolute(epsilon: f64) -> Self {
        Self {
            epsilon,
            epsilon_mode: EpsilonMode::Absolute,
            ..Self::default()
        }
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.dependence_tolerance >= 0.0) {
            return Err(Error::Config("dependence_tolerance must be nonnegative".into()));
        }
        Ok(())
    }

    /// Gradient-norm threshold given the gradient norm at the starting point.
    pub fn effective_epsilon(&self, initial_grad_norm: f64) -> f64 {
        match self.epsilon_mode {
            EpsilonMode::Absolute => self.epsilon,
            EpsilonMode::RelativeToInitial => self.epsilon * initial_grad_norm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    GradientTolerance,
    MaxIterations,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::GradientTolerance => f.write_str("GradientTolerance"),
            Termination::MaxIterations => f.write_str("MaxIterations"),
        }
    }
}

/// One row of a solver trace. ME-specific columns are `None` for the other
/// methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub branch: Option<String>,
    pub f: f64,
    pub grad_norm: f64,
    pub t: Option<f64>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl TraceRow {
    pub(crate) fn plain(iter: usize, f: f64, grad_norm: f64) -> Self {
        Self {
            iter,
            branch: None,
            f,
            grad_norm,
            t: None,
            delta: None,
            alpha: None,
            beta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub x_final: Vec<f64>,
    /// Number of x-updates performed.
    pub iterations: usize,
    pub f_final: f64,
    pub grad_norm_final: f64,
    /// The gradient-norm threshold actually used.
    pub epsilon_effective: f64,
    pub wall_time_seconds: f64,
    pub terminated_by: Termination,
    pub trace: Option<Vec<TraceRow>>,
    /// Full per-iteration artifacts, filled by the ME solver only.
    pub me_records: Option<Vec<IterationRecord>>,
}

pub const TRACE_HEADER: &str = "iter,branch,f,grad_norm,t,delta,alpha,beta";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_full).unwrap_or_default()
}

/// 17 significant digits.
pub fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.iter,
            r.branch.as_deref().unwrap_or(""),
            fmt_full(r.f),
            fmt_full(r.grad_norm),
            fmt_opt(r.t),
            fmt_opt(r.delta),
            fmt_opt(r.alpha),
            fmt_opt(r.beta),
        )?;
    }
    Ok(())
}

/// Bookkeeping common to the iterative loops: the stopping threshold, the
/// optional trace and the timer.
pub(crate) struct LoopState {
    pub eps: f64,
    pub trace: Option<Vec<TraceRow>>,
    pub start: std::time::Instant,
}

impl LoopState {
    pub fn new(opts: &SolveOptions, initial_grad_norm: f64) -> Self {
        Self {
            eps: opts.effective_epsilon(initial_grad_norm),
            trace: opts.record_trace.then(Vec::new),
            start: std::time::Instant::now(),
        }
    }

    pub fn push(&mut self, row: impl FnOnce() -> TraceRow) {
        if let Some(t) = self.trace.as_mut() {
            t.push(row());
        }
    }

    pub fn finish(
        self,
        x_final: Vec<f64>,
        iterations: usize,
        f_final: f64,
        grad_norm_final: f64,
    ) -> SolverResult {
        let terminated_by = if grad_norm_final <= self.eps {
            Termination::GradientTolerance
        } else {
            Termination::MaxIterations
        };
        SolverResult {
            x_final,
            iterations,
            f_final,
            grad_norm_final,
            epsilon_effective: self.eps,
            wall_time_seconds: self.start.elapsed().as_secs_f64(),
            terminated_by,
            trace: self.trace,
            me_records: None,
        }
    }
}
