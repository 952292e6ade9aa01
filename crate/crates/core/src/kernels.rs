//! Dense vector kernels shared by every solver.
//!
//! Reductions are evaluated as a fixed two-level sum: each block of
//! [`BLOCK`] consecutive entries is summed left to right, then the block
//! partials are summed left to right. The sequential and the rayon paths use
//! the same blocking, so results are bitwise identical whichever path runs
//! and however many threads the pool has.
//!
//! The free functions dispatch to [`par`] when the `parallel` feature is on
//! and the vectors are at least [`PAR_THRESHOLD`] long, otherwise to [`seq`].

/// Block length of the two-level reduction.
pub const BLOCK: usize = 2048;

/// Vectors shorter than this always take the sequential path.
pub const PAR_THRESHOLD: usize = 32 * 1024;

#[inline]
fn block_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

/// Single-threaded kernels.
pub mod seq {
    use super::{block_dot, BLOCK};

    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.chunks(BLOCK)
            .zip(b.chunks(BLOCK))
            .map(|(x, y)| block_dot(x, y))
            .fold(0.0, |acc, p| acc + p)
    }

    /// `alpha * x + beta * y`
    pub fn lincomb(alpha: f64, x: &[f64], beta: f64, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), y.len());
        x.iter().zip(y).map(|(a, b)| alpha * a + beta * b).collect()
    }

    /// `y += alpha * x`
    pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), y.len());
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    }

    /// Elementwise product.
    pub fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }

    /// Row-major dense matrix times vector.
    pub fn dense_matvec(n: usize, entries: &[f64], x: &[f64]) -> Vec<f64> {
        entries.chunks(n).map(|row| dot(row, x)).collect()
    }
}

/// Rayon kernels. Same blocking as [`seq`], same results.
#[cfg(feature = "parallel")]
pub mod par {
    use super::{block_dot, BLOCK};
    use rayon::prelude::*;

    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let partials: Vec<f64> = a
            .par_chunks(BLOCK)
            .zip(b.par_chunks(BLOCK))
            .map(|(x, y)| block_dot(x, y))
            .collect();
        partials.into_iter().fold(0.0, |acc, p| acc + p)
    }

    pub fn lincomb(alpha: f64, x: &[f64], beta: f64, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), y.len());
        x.par_iter()
            .zip(y)
            .map(|(a, b)| alpha * a + beta * b)
            .collect()
    }

    pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), y.len());
        y.par_iter_mut()
            .zip(x)
            .for_each(|(yi, xi)| *yi += alpha * xi);
    }

    pub fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(a.len(), b.len());
        a.par_iter().zip(b).map(|(x, y)| x * y).collect()
    }

    pub fn dense_matvec(n: usize, entries: &[f64], x: &[f64]) -> Vec<f64> {
        entries
            .par_chunks(n)
            .map(|row| super::seq::dot(row, x))
            .collect()
    }
}

macro_rules! dispatch {
    ($len:expr, $name:ident ( $($arg:expr),* )) => {{
        #[cfg(feature = "parallel")]
        {
            if $len >= PAR_THRESHOLD {
                par::$name($($arg),*)
            } else {
                seq::$name($($arg),*)
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            seq::$name($($arg),*)
        }
    }};
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    dispatch!(a.len(), dot(a, b))
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn lincomb(alpha: f64, x: &[f64], beta: f64, y: &[f64]) -> Vec<f64> {
    dispatch!(x.len(), lincomb(alpha, x, beta, y))
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    dispatch!(x.len(), axpy(alpha, x, y))
}

pub fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    dispatch!(a.len(), hadamard(a, b))
}

/// `x - y`
pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    lincomb(1.0, x, -1.0, y)
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub fn dense_matvec(n: usize, entries: &[f64], x: &[f64]) -> Vec<f64> {
    // Rows are the parallel unit, so the threshold is on the whole matrix.
    dispatch!(entries.len(), dense_matvec(n, entries, x))
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize, k: f64) -> Vec<f64> {
        (0..n).map(|i| ((i as f64) * k).sin() + 0.25).collect()
    }

    #[test]
    fn small_kernels() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]), 11.0);
        assert_eq!(lincomb(2.0, &[1.0, 1.0], -1.0, &[0.5, 3.0]), vec![1.5, -1.0]);
        let mut y = vec![1.0, 1.0];
        axpy(3.0, &[1.0, -1.0], &mut y);
        assert_eq!(y, vec![4.0, -2.0]);
        assert_eq!(hadamard(&[1.0, 4.0], &[2.0, 1.0]), vec![2.0, 4.0]);
        assert_eq!(dense_matvec(2, &[2.0, 1.0, 1.0, 3.0], &[1.0, 1.0]), vec![3.0, 4.0]);
    }

    #[test]
    fn blocked_sum_matches_naive_closely() {
        let a = ramp(10_000, 0.37);
        let b = ramp(10_000, 1.13);
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((seq::dot(&a, &b) - naive).abs() <= 1e-10 * naive.abs().max(1.0));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_path_is_bitwise_sequential() {
        for n in [1, 2047, 2048, 2049, 100_003] {
            let a = ramp(n, 0.71);
            let b = ramp(n, 0.19);
            assert_eq!(par::dot(&a, &b).to_bits(), seq::dot(&a, &b).to_bits());
            assert_eq!(par::lincomb(0.3, &a, -2.0, &b), seq::lincomb(0.3, &a, -2.0, &b));
            assert_eq!(par::hadamard(&a, &b), seq::hadamard(&a, &b));
        }
        let n = 300;
        let m = ramp(n * n, 0.011);
        let x = ramp(n, 0.5);
        assert_eq!(par::dense_matvec(n, &m, &x), seq::dense_matvec(n, &m, &x));
    }
}
