//! Solvers for the discrete Signorini variational inequality.
//!
//! After Dirichlet elimination the discrete problem is the bound-constrained
//! quadratic program `min ½vᵀ(K + αM)v - Fᵀv` subject to `v ≥ ψ_h` on the
//! Signorini nodes.

mod oracle;
mod pdas;
mod pgs;
mod qp;

use alloc::format;
use alloc::vec::Vec;

pub use oracle::{enumerate_candidates, oracle, Candidate, ORACLE_LIMIT};
pub use pdas::pdas;
pub use pgs::pgs;
pub use qp::{BoundQp, KktResiduals, ReducedSystem};

use crate::assembly::DiscreteSystem;
use crate::math;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    Pgs,
    Pdas,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pgs => "pgs",
            Method::Pdas => "pdas",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub method: Method,
    /// Iterations (PDAS) or sweeps (PGS).
    pub max_iter: usize,
    /// KKT tolerance; `None` selects 1e-10 for PDAS and 1e-8 for PGS.
    pub kkt_tol: Option<f64>,
    /// PGS relaxation factor.
    pub omega: f64,
    /// PGS stops only once a sweep moves no value by more than this.
    pub step_tol: f64,
    /// PDAS complementarity constant (scaled by the matrix diagonal).
    pub c_pdas: f64,
    /// Record the PGS objective after every sweep.
    pub record_energy: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self::new(Method::Pdas)
    }
}

impl SolverOptions {
    pub fn new(method: Method) -> Self {
        SolverOptions {
            method,
            max_iter: match method {
                Method::Pdas => 500,
                Method::Pgs => 200_000,
            },
            kkt_tol: None,
            omega: 1.5,
            step_tol: 1e-13,
            c_pdas: 1.0,
            record_energy: false,
        }
    }

    pub fn kkt_tol(&self) -> f64 {
        self.kkt_tol.unwrap_or(match self.method {
            Method::Pdas => 1e-10,
            Method::Pgs => 1e-8,
        })
    }
}

/// Solution of a [`BoundQp`].
#[derive(Clone, Debug)]
pub struct QpSolution {
    pub v: Vec<f64>,
    /// `Av - b` on bounded indices, zero elsewhere.
    pub lambda: Vec<f64>,
    /// Bounded indices with `v_i = ψ_i`.
    pub active: Vec<usize>,
    pub iterations: usize,
    pub residuals: KktResiduals,
    pub history: Vec<f64>,
    pub energy: Vec<f64>,
}

impl QpSolution {
    pub(crate) fn new(qp: &BoundQp, v: Vec<f64>, iterations: usize, history: Vec<f64>) -> Self {
        let g = qp.gradient(&v);
        let mut lambda = alloc::vec![0.0; qp.dim()];
        let mut active = Vec::new();
        for i in qp.bounded() {
            lambda[i] = g[i];
            if v[i] <= qp.lower[i].unwrap() {
                active.push(i);
            }
        }
        let residuals = qp.residuals(&v);
        QpSolution { v, lambda, active, iterations, residuals, history, energy: Vec::new() }
    }
}

/// Solves `qp` with the method selected in `opts`.
pub fn solve_qp(qp: &BoundQp, opts: &SolverOptions, init: Option<&[f64]>) -> Result<QpSolution> {
    match opts.method {
        Method::Pdas => pdas(qp, opts, init),
        Method::Pgs => pgs(qp, opts, init),
    }
}

/// Nodal solution of the discrete Signorini problem.
#[derive(Clone, Debug)]
pub struct Solution {
    pub u: Vec<f64>,
    /// `((K + αM)u - F)_i` on constrained nodes, in `sys.constrained` order.
    pub multipliers: Vec<f64>,
    /// Constrained nodes with `u_i = ψ_i`, sorted.
    pub active: Vec<usize>,
    pub alpha: f64,
    pub method: Method,
    pub iterations: usize,
    pub residuals: KktResiduals,
    pub history: Vec<f64>,
    pub energy: Vec<f64>,
}

impl Solution {
    /// Whether all KKT residuals are within `tol`.
    pub fn satisfies_kkt(&self, tol: f64) -> bool {
        self.residuals.max() <= tol
    }

    /// `max(0, max u)`, the one-sided bound used as `M` in barrier constants.
    pub fn sup_positive(&self) -> f64 {
        self.u.iter().fold(0.0, |m: f64, &x| m.max(x))
    }

    pub fn sup_abs(&self) -> f64 {
        self.u.iter().fold(0.0, |m: f64, &x| m.max(x.abs()))
    }
}

fn finish(sys: &DiscreteSystem, red: &ReducedSystem, qs: QpSolution, alpha: f64, method: Method) -> Solution {
    let u = red.lift(sys, &qs.v);
    let multipliers = red.constrained_local.iter().map(|&k| qs.lambda[k]).collect();
    let mut active: Vec<usize> = qs.active.iter().map(|&k| red.free[k]).collect();
    active.sort_unstable();
    Solution {
        u,
        multipliers,
        active,
        alpha,
        method,
        iterations: qs.iterations,
        residuals: qs.residuals,
        history: qs.history,
        energy: qs.energy,
    }
}

/// Problem α: requires `α > 0`, or `α = 0` with Dirichlet nodes.
pub fn solve_alpha(sys: &DiscreteSystem, alpha: f64, opts: &SolverOptions) -> Result<Solution> {
    solve_alpha_from(sys, alpha, opts, None)
}

/// [`solve_alpha`] warm-started from the nodal vector `init`.
pub fn solve_alpha_from(sys: &DiscreteSystem, alpha: f64, opts: &SolverOptions, init: Option<&[f64]>) -> Result<Solution> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite and nonnegative, got {alpha}")));
    }
    if alpha == 0.0 && sys.dirichlet.is_empty() {
        return Err(Error::InvalidArgument(
            "alpha = 0 without Dirichlet nodes is semicoercive; use the continuation solver".into(),
        ));
    }
    let red = ReducedSystem::new(sys, alpha)?;
    let init_v = init.map(|u| red.restrict(u));
    let qs = solve_qp(&red.qp, opts, init_v.as_deref())?;
    Ok(finish(sys, &red, qs, alpha, opts.method))
}

/// Mixed Dirichlet-Signorini problem with `α = 0`.
pub fn solve_dirichlet_signorini(sys: &DiscreteSystem, opts: &SolverOptions) -> Result<Solution> {
    if sys.dirichlet.is_empty() {
        return Err(Error::InvalidArgument("the mixed problem needs Dirichlet nodes".into()));
    }
    solve_alpha(sys, 0.0, opts)
}

/// Exhaustive active-set solution (at most [`ORACLE_LIMIT`] constrained nodes).
pub fn oracle_solve(sys: &DiscreteSystem, alpha: f64, tol: f64) -> Result<Solution> {
    if sys.constrained.len() > ORACLE_LIMIT {
        return Err(Error::TooLarge { constrained: sys.constrained.len(), limit: ORACLE_LIMIT });
    }
    let red = ReducedSystem::new(sys, alpha)?;
    let qs = oracle(&red.qp, tol)?;
    Ok(finish(sys, &red, qs, alpha, Method::Pdas))
}

/// Solutions along a decreasing α schedule.
#[derive(Clone, Debug)]
pub struct Continuation {
    pub solutions: Vec<Solution>,
    /// `‖u_k - u_{k+1}‖` in the norm of `K + M`.
    pub increments: Vec<f64>,
    /// Increments failed to decrease over three consecutive steps.
    pub stagnation: bool,
}

impl Continuation {
    /// The approximation of the α = 0 problem (last schedule entry).
    pub fn last(&self) -> &Solution {
        self.solutions.last().expect("continuation has at least one solution")
    }
}

/// Default schedule `α_k = 10^-k`, `k = 0..=6`.
pub fn default_schedule() -> Vec<f64> {
    (0..=6).map(|k| math::pow(10.0, -(k as f64))).collect()
}

/// Problem 1 by continuation in α with warm starts.
///
/// Without Dirichlet nodes the load must satisfy the compatibility condition.
pub fn solve_problem_one(sys: &DiscreteSystem, schedule: &[f64], opts: &SolverOptions) -> Result<Continuation> {
    if schedule.is_empty() || schedule.iter().any(|&a| !(a > 0.0)) || schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("alpha schedule must be positive and strictly decreasing".into()));
    }
    if let Some(c) = sys.compatibility() {
        if !c.admissible {
            return Err(Error::Incompatible { value: c.value });
        }
    }
    let norm_op = sys.stiffness.add_scaled(&sys.mass, 1.0);
    let mut solutions: Vec<Solution> = Vec::with_capacity(schedule.len());
    let mut increments = Vec::new();
    for &alpha in schedule {
        let init = solutions.last().map(|s| s.u.clone());
        let sol = solve_alpha_from(sys, alpha, opts, init.as_deref())?;
        if let Some(prev) = solutions.last() {
            let d: Vec<f64> = sol.u.iter().zip(&prev.u).map(|(a, b)| a - b).collect();
            increments.push(math::sqrt(norm_op.quadratic_form(&d).max(0.0)));
        }
        solutions.push(sol);
    }
    let stagnation = increments.windows(4).any(|w| w[1] >= w[0] && w[2] >= w[1] && w[3] >= w[2]);
    Ok(Continuation { solutions, increments, stagnation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CsrMatrix;
    use alloc::vec;

    fn two_by_two() -> BoundQp {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)]);
        BoundQp::new(a, vec![0.0, -3.0], vec![None, Some(0.0)]).unwrap()
    }

    /// Active candidate: v₂ = 0, v₁ = 0, λ₂ = -1·0 + 2·0 + 3 = 3 ≥ 0.
    /// Inactive candidate: v = A⁻¹b = (-1, -2), infeasible.
    #[test]
    fn two_by_two_example() {
        let qp = two_by_two();
        for opts in [SolverOptions::new(Method::Pdas), SolverOptions::new(Method::Pgs)] {
            let s = solve_qp(&qp, &opts, None).unwrap();
            assert!(s.v[0].abs() < 1e-9 && s.v[1].abs() < 1e-12);
            assert!((s.lambda[1] - 3.0).abs() < 1e-8);
            assert_eq!(s.active, vec![1]);
        }
        let o = oracle(&qp, 1e-12).unwrap();
        assert_eq!(o.v, vec![0.0, 0.0]);
        assert_eq!(o.lambda[1], 3.0);
        let cands = enumerate_candidates(&qp, 1e-12).unwrap();
        assert_eq!(cands.len(), 2);
        let inactive = cands.iter().find(|c| !c.active[0]).unwrap();
        assert!((inactive.v[0] + 1.0).abs() < 1e-15 && (inactive.v[1] + 2.0).abs() < 1e-15);
        assert!(!inactive.primal_feasible);
    }

    #[test]
    fn pgs_energy_is_monotone() {
        let n = 12;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, &t);
        let b: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { -1.0 } else { 0.7 }).collect();
        let lower: Vec<Option<f64>> = (0..n).map(|i| if i % 3 == 0 { Some(0.1) } else { None }).collect();
        let qp = BoundQp::new(a, b, lower).unwrap();
        let mut opts = SolverOptions::new(Method::Pgs);
        opts.record_energy = true;
        let s = pgs(&qp, &opts, None).unwrap();
        assert!(s.energy.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        let o = oracle(&qp, 1e-12).unwrap();
        let p = pdas(&qp, &SolverOptions::default(), None).unwrap();
        for i in 0..n {
            assert!((s.v[i] - o.v[i]).abs() < 1e-8);
            assert!((p.v[i] - o.v[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_size_limit() {
        let n = ORACLE_LIMIT + 1;
        let a = CsrMatrix::identity(n);
        let qp = BoundQp::new(a, vec![0.0; n], vec![Some(0.0); n]).unwrap();
        assert!(matches!(enumerate_candidates(&qp, 1e-12), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn schedule_validation() {
        assert_eq!(default_schedule().len(), 7);
        assert!((default_schedule()[6] - 1e-6).abs() < 1e-20);
    }
}
