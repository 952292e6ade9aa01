//! Symmetric positive definite operators.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::kernels;
use crate::rng::SplitMix64;

/// Seed of the power-iteration start vector.
pub const POWER_SEED: u64 = 0x00C0_FFEE;
pub const POWER_REL_TOL: f64 = 1e-10;
pub const POWER_MAX_ITERS: usize = 10_000;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Builds from row-major entries, rejecting non-square or asymmetric input.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOperator("empty matrix".into()));
        }
        check_dim(n * n, entries.len())?;
        if !kernels::all_finite(&entries) {
            return Err(Error::InvalidOperator("non-finite matrix entry".into()));
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..n {
            if entries[i * n + i] <= 0.0 {
                return Err(Error::InvalidOperator(format!(
                    "diagonal entry {i} is not positive"
                )));
            }
            for j in (i + 1)..n {
                if (entries[i * n + j] - entries[j * n + i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidOperator(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LinearOperator {
    Dense(DenseMatrix),
    Diagonal(Vec<f64>),
    /// `v v^T + sigma I`
    RankOnePlusScaledIdentity { v: Vec<f64>, sigma: f64 },
}

/// Extreme eigenvalues of an operator.
///
/// `lambda_min` is `None` for dense operators, where only the top of the
/// spectrum is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenBounds {
    pub lambda_min: Option<f64>,
    pub lambda_max: f64,
    pub exact: bool,
}

impl EigenBounds {
    pub fn condition_number(&self) -> Option<f64> {
        self.lambda_min.map(|lo| self.lambda_max / lo)
    }

    /// `1 - lambda_min / lambda_max`, the per-step contraction factor bound.
    pub fn eta_bound(&self) -> Option<f64> {
        self.lambda_min.map(|lo| 1.0 - lo / self.lambda_max)
    }
}

impl LinearOperator {
    pub fn dense(n: usize, entries: Vec<f64>) -> Result<Self> {
        DenseMatrix::new(n, entries).map(LinearOperator::Dense)
    }

    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidOperator("empty diagonal".into()));
        }
        if let Some(i) = diag.iter().position(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidOperator(format!(
                "diagonal entry {i} = {} is not a positive finite number",
                diag[i]
            )));
        }
        Ok(LinearOperator::Diagonal(diag))
    }

    pub fn rank_one(v: Vec<f64>, sigma: f64) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidOperator("empty rank-one vector".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidOperator(format!("sigma = {sigma} must be positive")));
        }
        if !kernels::all_finite(&v) {
            return Err(Error::InvalidOperator("non-finite rank-one entry".into()));
        }
        Ok(LinearOperator::RankOnePlusScaledIdentity { v, sigma })
    }

    pub fn dim(&self) -> usize {
        match self {
            LinearOperator::Dense(m) => m.dim(),
            LinearOperator::Diagonal(d) => d.len(),
            LinearOperator::RankOnePlusScaledIdentity { v, .. } => v.len(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LinearOperator::Dense(m) => kernels::dense_matvec(m.n, &m.entries, x),
            LinearOperator::Diagonal(d) => kernels::hadamard(d, x),
            LinearOperator::RankOnePlusScaledIdentity { v, sigma } => {
                let vx = kernels::dot(v, x);
                kernels::lincomb(vx, v, *sigma, x)
            }
        }
    }

    /// `u^T A v`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u.len())?;
        let av = self.apply(v)?;
        Ok(kernels::dot(u, &av))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let entries = match self {
            LinearOperator::Dense(m) => m.entries.clone(),
            LinearOperator::Diagonal(d) => {
                let mut e = vec![0.0; n * n];
                for (i, di) in d.iter().enumerate() {
                    e[i * n + i] = *di;
                }
                e
            }
            LinearOperator::RankOnePlusScaledIdentity { v, sigma } => {
                let mut e = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        e[i * n + j] = v[i] * v[j];
                    }
                    e[i * n + i] += sigma;
                }
                e
            }
        };
        DenseMatrix { n, entries }
    }

    pub fn eigen_bounds(&self) -> Result<EigenBounds> {
        match self {
            LinearOperator::Diagonal(d) => {
                let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = d.iter().copied().fold(0.0, f64::max);
                Ok(EigenBounds {
                    lambda_min: Some(lo),
                    lambda_max: hi,
                    exact: true,
                })
            }
            LinearOperator::RankOnePlusScaledIdentity { v, sigma } => {
                let vv = kernels::dot(v, v);
                // A rank-one term on n = 1 leaves no eigenvalue at sigma.
                let lo = if v.len() == 1 { sigma + vv } else { *sigma };
                Ok(EigenBounds {
                    lambda_min: Some(lo),
                    lambda_max: sigma + vv,
                    exact: true,
                })
            }
            LinearOperator::Dense(_) => {
                let lambda_max = power_iteration(self, POWER_REL_TOL, POWER_MAX_ITERS)?;
                Ok(EigenBounds {
                    lambda_min: None,
                    lambda_max,
                    exact: false,
                })
            }
        }
    }

    /// `A^{-1} y` in closed form. Dense operators are not supported here; see
    /// [`LinearOperator::solve`] for a general direct solve.
    pub fn inverse_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), y.len())?;
        match self {
            LinearOperator::Diagonal(d) => Ok(y.iter().zip(d).map(|(a, b)| a / b).collect()),
            LinearOperator::RankOnePlusScaledIdentity { v, sigma } => {
                // Sherman-Morrison
                let vv = kernels::dot(v, v);
                let vy = kernels::dot(v, y);
                let k = vy / (sigma * (sigma + vv));
                Ok(kernels::lincomb(1.0 / sigma, y, -k, v))
            }
            LinearOperator::Dense(_) => Err(Error::Unsupported(
                "closed-form inverse is only available for diagonal and rank-one operators".into(),
            )),
        }
    }

    /// Direct solve of `A x = y`. Dense operators use a Cholesky factorization,
    /// which also rejects matrices that are not positive definite.
    pub fn solve(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            LinearOperator::Dense(m) => {
                check_dim(m.n, y.len())?;
                let chol = nalgebra::Cholesky::new(m.to_nalgebra()).ok_or_else(|| {
                    Error::InvalidOperator("matrix is not positive definite".into())
                })?;
                let x = chol.solve(&nalgebra::DVector::from_column_slice(y));
                Ok(x.iter().copied().collect())
            }
            _ => self.inverse_apply(y),
        }
    }

    /// Cholesky-based positive definiteness test.
    pub fn is_positive_definite(&self) -> bool {
        match self {
            LinearOperator::Dense(m) => nalgebra::Cholesky::new(m.to_nalgebra()).is_some(),
            // Validated at construction.
            _ => true,
        }
    }
}

/// Largest eigenvalue by power iteration with a Rayleigh-quotient estimate.
///
/// Starts from a fixed SplitMix64 vector and stops when the relative change of
/// the estimate drops to `rel_tol`.
pub fn power_iteration(op: &LinearOperator, rel_tol: f64, max_iters: usize) -> Result<f64> {
    let n = op.dim();
    let mut rng = SplitMix64::new(POWER_SEED);
    let mut v = rng.vector(n, -1.0, 1.0);
    let nv = kernels::norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut estimate = f64::NAN;
    for _ in 0..max_iters {
        let w = op.apply_unchecked(&v);
        let lambda = kernels::dot(&v, &w);
        let nw = kernels::norm(&w);
        if !(nw.is_finite() && nw > 0.0) {
            return Err(Error::NonFinite {
                context: "power iteration".into(),
            });
        }
        let converged = (lambda - estimate).abs() <= rel_tol * lambda.abs();
        estimate = lambda;
        if converged {
            return Ok(estimate);
        }
        v = kernels::scale(1.0 / nw, &w);
    }
    Err(Error::PowerIterationNotConverged {
        iterations: max_iters,
        estimate,
    })
}
