use alloc::vec::Vec;

use super::qp::BoundQp;
use super::{QpSolution, SolverOptions};
use crate::{Error, Result};

/// Projected successive over-relaxation with projection after each nodal update.
///
/// Stops when the largest update of a sweep is below `step_tol` and all KKT
/// residuals are below `kkt_tol`.
pub fn pgs(qp: &BoundQp, opts: &SolverOptions, init: Option<&[f64]>) -> Result<QpSolution> {
    let n = qp.dim();
    let diag = qp.a.diag();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Singular("PGS needs a positive diagonal".into()));
    }
    let mut v: Vec<f64> = match init {
        Some(v0) => v0.to_vec(),
        None => (0..n).map(|i| qp.lower[i].unwrap_or(0.0)).collect(),
    };
    for i in 0..n {
        if let Some(psi) = qp.lower[i] {
            v[i] = v[i].max(psi);
        }
    }
    let tol = opts.kkt_tol();
    let mut history = Vec::new();
    let mut energy = Vec::new();
    if opts.record_energy {
        energy.push(qp.objective(&v));
    }
    for sweep in 1..=opts.max_iter {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let r: f64 = qp.b[i] - qp.a.row(i).map(|(j, a)| a * v[j]).sum::<f64>();
            let mut x = v[i] + opts.omega * r / diag[i];
            if let Some(psi) = qp.lower[i] {
                x = x.max(psi);
            }
            max_step = max_step.max((x - v[i]).abs());
            v[i] = x;
        }
        if opts.record_energy {
            energy.push(qp.objective(&v));
        }
        if max_step <= opts.step_tol || sweep % 16 == 0 {
            let res = qp.residuals(&v).max();
            history.push(res);
            if max_step <= opts.step_tol && res <= tol {
                let mut sol = QpSolution::new(qp, v, sweep, history);
                sol.energy = energy;
                return Ok(sol);
            }
        }
    }
    Err(Error::NotConverged { method: "pgs", iterations: opts.max_iter, residuals: history })
}
