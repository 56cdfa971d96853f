use alloc::vec;
use alloc::vec::Vec;

use super::qp::BoundQp;
use super::QpSolution;
use crate::dense::DenseMatrix;
use crate::{Error, Result};

/// Largest number of bounded indices the oracle enumerates.
pub const ORACLE_LIMIT: usize = 20;

/// One active-set candidate of the enumeration.
#[derive(Clone, Debug)]
pub struct Candidate {
    /// Active flags over the bounded indices (in [`BoundQp::bounded`] order).
    pub active: Vec<bool>,
    pub v: Vec<f64>,
    pub objective: f64,
    /// `v ≥ ψ` within tolerance.
    pub primal_feasible: bool,
    /// Primal feasible with nonnegative multipliers on the active set.
    pub kkt: bool,
}

/// Solves the reduced system of every active set with a dense Cholesky factorisation.
pub fn enumerate_candidates(qp: &BoundQp, tol: f64) -> Result<Vec<Candidate>> {
    let bounded = qp.bounded();
    let k = bounded.len();
    if k > ORACLE_LIMIT {
        return Err(Error::TooLarge { constrained: k, limit: ORACLE_LIMIT });
    }
    let n = qp.dim();
    let mut dense = DenseMatrix::zeros(n);
    for (i, j, v) in qp.a.to_coo() {
        dense.set(i, j, v);
    }
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0u32..(1u32 << k) {
        let mut fixed = vec![false; n];
        let mut v = vec![0.0; n];
        let mut active = vec![false; k];
        for (bit, &i) in bounded.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                fixed[i] = true;
                active[bit] = true;
                v[i] = qp.lower[i].unwrap();
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
        if !free.is_empty() {
            let rhs: Vec<f64> = free
                .iter()
                .map(|&i| qp.b[i] - (0..n).filter(|&j| fixed[j]).map(|j| dense.get(i, j) * v[j]).sum::<f64>())
                .collect();
            let x = match dense.submatrix(&free).cholesky_solve(&rhs) {
                Ok(x) => x,
                Err(Error::Singular(_)) => continue,
                Err(e) => return Err(e),
            };
            for (&i, xi) in free.iter().zip(x) {
                v[i] = xi;
            }
        }
        let av = dense.mul_vec(&v);
        let primal_feasible = bounded.iter().all(|&i| v[i] >= qp.lower[i].unwrap() - tol);
        let dual_ok = bounded.iter().enumerate().all(|(bit, &i)| !active[bit] || av[i] - qp.b[i] >= -tol);
        let objective = v.iter().zip(&av).zip(&qp.b).map(|((x, ax), b)| 0.5 * x * ax - b * x).sum();
        out.push(Candidate { active, v, objective, primal_feasible, kkt: primal_feasible && dual_ok });
    }
    Ok(out)
}

/// Exhaustive active-set solve: the KKT candidate of least objective.
pub fn oracle(qp: &BoundQp, tol: f64) -> Result<QpSolution> {
    let cands = enumerate_candidates(qp, tol)?;
    let count = cands.len();
    let best = cands
        .into_iter()
        .filter(|c| c.kkt)
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .ok_or_else(|| Error::NotConverged { method: "oracle", iterations: count, residuals: Vec::new() })?;
    Ok(QpSolution::new(qp, best.v, count, Vec::new()))
}
