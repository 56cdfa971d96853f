//! Compressed sparse row matrices, reverse Cuthill-McKee ordering and an
//! envelope (skyline) Cholesky factorisation for the reduced SPD systems.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Square sparse matrix in CSR form with sorted, duplicate-free columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate `(row, col, value)` triplets.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut vals: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &sorted {
            assert!(r < n && c < n, "triplet index out of range");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, &t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        math_dot(x, &self.mul_vec(x))
    }

    /// `self + t * other`, on the union of both patterns.
    pub fn add_scaled(&self, other: &CsrMatrix, t: f64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut trip = self.to_coo();
        trip.extend(other.to_coo().into_iter().map(|(i, j, v)| (i, j, t * v)));
        CsrMatrix::from_triplets(self.n, &trip)
    }

    pub fn to_coo(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            out.extend(self.row(i).map(|(j, v)| (i, j, v)));
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.to_coo().iter().map(|&(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn submatrix(&self, idx: &[usize]) -> CsrMatrix {
        let mut local = vec![usize::MAX; self.n];
        for (k, &i) in idx.iter().enumerate() {
            local[i] = k;
        }
        let mut trip = Vec::new();
        for (k, &i) in idx.iter().enumerate() {
            for (j, v) in self.row(i) {
                if local[j] != usize::MAX {
                    trip.push((k, local[j], v));
                }
            }
        }
        CsrMatrix::from_triplets(idx.len(), &trip)
    }

    /// Whether off-diagonal entries are nonpositive and the diagonal positive.
    pub fn is_z_matrix(&self, tol: f64) -> bool {
        self.to_coo().iter().all(|&(i, j, v)| if i == j { v > 0.0 } else { v <= tol })
    }
}

fn math_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reverse Cuthill-McKee permutation: `perm[k]` is the original index placed at position `k`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nb.sort_by_key(|&j| (degree[j], j));
            for j in nb {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope Cholesky factor `A = L Lᵀ` of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    /// First column of the envelope in row `i` (permuted numbering).
    first: Vec<usize>,
    /// Row `i` of `L` from column `first[i]` through the diagonal.
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    /// Factorises `a` after an RCM reordering. Fails with [`Error::Singular`]
    /// on a nonpositive pivot.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let perm = rcm_ordering(a);
        let mut inv = vec![0; n];
        for (k, &i) in perm.iter().enumerate() {
            inv[i] = k;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (i, &pi) in perm.iter().enumerate() {
            for (j, _) in a.row(pi) {
                first[i] = first[i].min(inv[j]);
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for (i, &pi) in perm.iter().enumerate() {
            for (j, v) in a.row(pi) {
                let jj = inv[j];
                if jj <= i {
                    data[start[i] + jj - first[i]] = v;
                }
            }
        }
        let scale = a.diag().iter().fold(0.0f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut sum = data[start[i] + j - fi];
                for k in lo..j {
                    sum -= data[start[i] + k - fi] * data[start[j] + k - fj];
                }
                if j == i {
                    if !(sum > 1e-14 * scale) {
                        return Err(Error::Singular(format!("nonpositive pivot {sum:e} at row {}", perm[i])));
                    }
                    data[start[i] + i - fi] = math::sqrt(sum);
                } else {
                    data[start[i] + j - fi] = sum / data[start[j] + j - fj];
                }
            }
        }
        Ok(SkylineCholesky { perm, first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= row[k - fi] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn triplets_are_summed() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplace_1d(9);
        let mut p = rcm_ordering(&a);
        p.sort_unstable();
        assert_eq!(p, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn cholesky_solves_tridiagonal() {
        let a = laplace_1d(30);
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x);
        let f = SkylineCholesky::factor(&a).unwrap();
        let y = f.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_detected() {
        // graph Laplacian of a path has constants in its kernel
        let mut t = vec![(0, 0, 1.0), (2, 2, 1.0), (1, 1, 2.0)];
        t.extend([(0, 1, -1.0), (1, 0, -1.0), (1, 2, -1.0), (2, 1, -1.0)]);
        let a = CsrMatrix::from_triplets(3, &t);
        assert!(matches!(SkylineCholesky::factor(&a), Err(Error::Singular(_))));
    }

    #[test]
    fn submatrix_and_add_scaled() {
        let a = laplace_1d(4);
        let s = a.submatrix(&[3, 1]);
        assert_eq!(s.get(0, 0), 2.0);
        assert_eq!(s.get(0, 1), 0.0);
        let b = a.add_scaled(&CsrMatrix::identity(4), 0.5);
        assert_eq!(b.get(2, 2), 2.5);
        assert_eq!(b.get(2, 3), -1.0);
    }
}
