//! Small dense symmetric solves, used by the exhaustive active-set oracle.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> DenseMatrix {
        let mut m = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    /// Solves `self x = b` by Cholesky; fails on a nonpositive pivot.
    pub fn cholesky_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::Singular(format!("dense pivot {s:e} at {i}")));
                    }
                    l[i * n + i] = math::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[i * n + k] * y[k];
            }
            y[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l[k * n + i] * y[k];
            }
            y[i] /= l[i * n + i];
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_two_by_two() {
        let a = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let x = a.cholesky_solve(&[1.0, 2.0]).unwrap();
        // Cramer's rule: det 11
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-15);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(a.cholesky_solve(&[1.0, 1.0]).is_err());
    }
}
