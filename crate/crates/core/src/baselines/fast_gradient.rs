use crate::error::{check_dim, check_finite, Error, Result};
use crate::kernels;
use crate::problem::QuadraticProblem;
use crate::solve::{LoopState, SolveOptions, SolverResult, TraceRow};

/// Nesterov's fast-gradient recurrence on `(x, y, C)` with Lipschitz
/// constant `L`:
///
/// ```text
/// a   = (1 + sqrt(1 + 4 L C)) / (2 L)
/// C+  = C + a
/// xt  = (C y + a x) / C+
/// y+  = xt + (b - A xt) / L
/// x   = (C+ / a) y+ - (C / a) y
/// ```
#[derive(Debug, Clone)]
pub struct FastGradient {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub c: f64,
    pub lipschitz: f64,
}

impl FastGradient {
    pub fn new(x1: &[f64], lipschitz: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::InvalidArgument(format!("Lipschitz constant {lipschitz} must be positive")));
        }
        Ok(Self {
            x: x1.to_vec(),
            y: x1.to_vec(),
            c: 0.0,
            lipschitz,
        })
    }

    /// Advances one iteration and returns the weight `a` it used.
    pub fn step(&mut self, p: &QuadraticProblem) -> Result<f64> {
        let l = self.lipschitz;
        let a = (1.0 + (1.0 + 4.0 * l * self.c).sqrt()) / (2.0 * l);
        let c_next = self.c + a;
        let xt = kernels::lincomb(self.c / c_next, &self.y, a / c_next, &self.x);
        let mut y_next = xt.clone();
        let residual = kernels::sub(p.b(), &p.operator().apply_unchecked(&xt));
        kernels::axpy(1.0 / l, &residual, &mut y_next);
        self.x = kernels::lincomb(c_next / a, &y_next, -self.c / a, &self.y);
        self.y = y_next;
        self.c = c_next;
        if !kernels::all_finite(&self.x) {
            return Err(Error::NonFinite {
                context: "fast-gradient update".into(),
            });
        }
        Ok(a)
    }
}

/// Fast gradient with `L = lambda_max(A)`. Stops on `||A x - b||` of the
/// x-sequence.
pub fn fast_gradient_solve(p: &QuadraticProblem, x1: &[f64], opts: &SolveOptions) -> Result<SolverResult> {
    opts.validate()?;
    check_dim(p.dim(), x1.len())?;
    check_finite(x1, "starting point")?;
    let start = std::time::Instant::now();
    let lipschitz = p.eigen_bounds()?.lambda_max;
    let mut r = fast_gradient_solve_with(p, x1, lipschitz, opts)?;
    r.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(r)
}

/// Fast gradient with a caller-supplied Lipschitz constant.
pub fn fast_gradient_solve_with(
    p: &QuadraticProblem,
    x1: &[f64],
    lipschitz: f64,
    opts: &SolveOptions,
) -> Result<SolverResult> {
    opts.validate()?;
    check_dim(p.dim(), x1.len())?;
    check_finite(x1, "starting point")?;
    let mut fg = FastGradient::new(x1, lipschitz)?;
    let (mut f, g) = p.value_and_grad(x1)?;
    let mut gn = kernels::norm(&g);
    let mut state = LoopState::new(opts, gn);
    let mut k = 0;
    while gn > state.eps && k < opts.max_iterations {
        let a = fg.step(p)?;
        state.push(|| {
            let mut row = TraceRow::plain(k + 1, f, gn);
            row.t = Some(a);
            row
        });
        let (fx, gx) = p.value_and_grad(&fg.x)?;
        f = fx;
        gn = kernels::norm(&gx);
        k += 1;
    }
    Ok(state.finish(fg.x, k, f, gn))
}
