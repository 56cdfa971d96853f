use alloc::vec;
use alloc::vec::Vec;

use super::qp::BoundQp;
use super::{QpSolution, SolverOptions};
use crate::sparse::SkylineCholesky;
use crate::{Error, Result};

/// Primal-dual active set iteration.
///
/// Index `i` is active when `λ_i + c A_ii (ψ_i - v_i) ≥ -tie`; ties count as
/// active. Stops when the active set repeats.
pub fn pdas(qp: &BoundQp, opts: &SolverOptions, init: Option<&[f64]>) -> Result<QpSolution> {
    let n = qp.dim();
    let diag = qp.a.diag();
    let tol = opts.kkt_tol();
    let tie = 1e-2 * tol;
    let bounded = qp.bounded();
    let mut active = vec![false; n];
    for &i in &bounded {
        let psi = qp.lower[i].unwrap();
        active[i] = match init {
            Some(v) => v[i] <= psi + tie,
            None => true,
        };
    }
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let v = solve_with_active(qp, &active)?;
        let lambda = qp.gradient(&v);
        let res = qp.residuals(&v);
        history.push(res.max());
        let mut next = vec![false; n];
        for &i in &bounded {
            let psi = qp.lower[i].unwrap();
            let lam = if active[i] { lambda[i] } else { 0.0 };
            next[i] = lam + opts.c_pdas * diag[i] * (psi - v[i]) >= -tie;
        }
        if next == active {
            return Ok(QpSolution::new(qp, v, it, history));
        }
        active = next;
    }
    Err(Error::NotConverged { method: "pdas", iterations: opts.max_iter, residuals: history })
}

/// Minimiser with `v_i = ψ_i` on active indices and no bound elsewhere.
pub(crate) fn solve_with_active(qp: &BoundQp, active: &[bool]) -> Result<Vec<f64>> {
    let n = qp.dim();
    let mut v = vec![0.0; n];
    for i in 0..n {
        if active[i] {
            v[i] = qp.lower[i].expect("active index must be bounded");
        }
    }
    let inactive: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
    if inactive.is_empty() {
        return Ok(v);
    }
    let rhs: Vec<f64> = inactive
        .iter()
        .map(|&i| qp.b[i] - qp.a.row(i).filter(|&(j, _)| active[j]).map(|(j, a)| a * v[j]).sum::<f64>())
        .collect();
    let sub = qp.a.submatrix(&inactive);
    let x = SkylineCholesky::factor(&sub)?.solve(&rhs);
    for (&i, xi) in inactive.iter().zip(x) {
        v[i] = xi;
    }
    Ok(v)
}
