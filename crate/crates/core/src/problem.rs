//! The quadratic objective `f(w) = 1/2 w^T A w - b^T w + c`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::kernels;
use crate::operator::{EigenBounds, LinearOperator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticProblem {
    a: LinearOperator,
    b: Vec<f64>,
    c: f64,
}

impl QuadraticProblem {
    pub fn new(a: LinearOperator, b: Vec<f64>, c: f64) -> Result<Self> {
        check_dim(a.dim(), b.len())?;
        if !kernels::all_finite(&b) || !c.is_finite() {
            return Err(Error::InvalidArgument("b and c must be finite".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.a.apply(x)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let ax = self.a.apply_unchecked(x);
        Ok(self.eval_with_ax(x, &ax))
    }

    pub(crate) fn eval_with_ax(&self, x: &[f64], ax: &[f64]) -> f64 {
        0.5 * kernels::dot(x, ax) - kernels::dot(&self.b, x) + self.c
    }

    /// `A x - b`
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.grad_unchecked(x))
    }

    pub(crate) fn grad_unchecked(&self, x: &[f64]) -> Vec<f64> {
        kernels::sub(&self.a.apply_unchecked(x), &self.b)
    }

    /// Value and gradient from a single product with `A`.
    pub fn value_and_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dim(), x.len())?;
        let ax = self.a.apply_unchecked(x);
        let f = self.eval_with_ax(x, &ax);
        Ok((f, kernels::sub(&ax, &self.b)))
    }

    /// `u^T A v`
    pub fn a_inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u.len())?;
        self.a.inner(u, v)
    }

    /// `||v||_A^2`
    pub fn a_norm_sq(&self, v: &[f64]) -> Result<f64> {
        self.a_inner(v, v)
    }

    pub fn eigen_bounds(&self) -> Result<EigenBounds> {
        self.a.eigen_bounds()
    }

    /// The unique minimizer `A^{-1} b`, by direct solve.
    pub fn minimizer(&self) -> Result<Vec<f64>> {
        self.a.solve(&self.b)
    }

    /// `f(x*) = c - 1/2 b^T A^{-1} b`.
    pub fn optimal_value(&self) -> Result<f64> {
        let x = self.minimizer()?;
        Ok(self.c - 0.5 * kernels::dot(&self.b, &x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag14() -> QuadraticProblem {
        QuadraticProblem::new(LinearOperator::diagonal(vec![1.0, 4.0]).unwrap(), vec![0.0, 0.0], 0.0)
            .unwrap()
    }

    fn identity2(b: Vec<f64>) -> QuadraticProblem {
        QuadraticProblem::new(LinearOperator::diagonal(vec![1.0, 1.0]).unwrap(), b, 0.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(diag14().eval(&[2.0, 1.0]).unwrap(), 4.0);
        assert_eq!(identity2(vec![1.0, 1.0]).eval(&[1.0, 1.0]).unwrap(), -1.0);
        let p = QuadraticProblem::new(
            LinearOperator::dense(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap(),
            vec![1.0, 0.0],
            5.0,
        )
        .unwrap();
        // 1/2 * 7 - 1 + 5
        assert_eq!(p.eval(&[1.0, 1.0]).unwrap(), 7.5);
    }

    #[test]
    fn grad_examples() {
        assert_eq!(diag14().grad(&[2.0, 1.0]).unwrap(), vec![2.0, 4.0]);
        assert_eq!(identity2(vec![3.0, 3.0]).grad(&[1.0, 1.0]).unwrap(), vec![-2.0, -2.0]);
        let p = QuadraticProblem::new(
            LinearOperator::dense(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap(),
            vec![1.0, -2.0],
            0.0,
        )
        .unwrap();
        let g = p.grad(&p.minimizer().unwrap()).unwrap();
        assert!(kernels::norm(&g) <= 1e-14);
    }

    #[test]
    fn a_inner_examples() {
        let p = diag14();
        assert_eq!(p.a_inner(&[2.0, 4.0], &[2.0, 4.0]).unwrap(), 68.0);
        assert_eq!(p.a_inner(&[0.0, 0.0], &[2.0, 4.0]).unwrap(), 0.0);
        assert_eq!(identity2(vec![0.0; 2]).a_inner(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_errors() {
        let p = diag14();
        assert!(p.eval(&[1.0]).is_err());
        assert!(p.grad(&[1.0, 2.0, 3.0]).is_err());
        assert!(p.a_inner(&[1.0], &[1.0, 2.0]).is_err());
        assert!(QuadraticProblem::new(LinearOperator::diagonal(vec![1.0]).unwrap(), vec![1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn optimal_value_closed_form() {
        let p = QuadraticProblem::new(LinearOperator::diagonal(vec![2.0, 4.0]).unwrap(), vec![2.0, 4.0], 1.0)
            .unwrap();
        // x* = (1, 1), f* = 1/2 (2 + 4) - 6 + 1
        assert_eq!(p.minimizer().unwrap(), vec![1.0, 1.0]);
        assert_eq!(p.optimal_value().unwrap(), -2.0);
    }
}
