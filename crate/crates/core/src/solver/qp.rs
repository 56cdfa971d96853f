use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::DiscreteSystem;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// `min ½vᵀAv - bᵀv` subject to `v_i ≥ lower_i` where a lower bound is given.
#[derive(Clone, Debug)]
pub struct BoundQp {
    pub a: CsrMatrix,
    pub b: Vec<f64>,
    pub lower: Vec<Option<f64>>,
}

/// Worst violations of the optimality conditions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KktResiduals {
    /// `max(ψ - v)⁺` over bounded indices.
    pub primal: f64,
    /// `max(-λ)⁺` over bounded indices.
    pub dual: f64,
    /// `max |λ (v - ψ)|` over bounded indices.
    pub complementarity: f64,
    /// `max |Av - b|` over unbounded indices.
    pub stationarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.complementarity).max(self.stationarity)
    }
}

impl BoundQp {
    pub fn new(a: CsrMatrix, b: Vec<f64>, lower: Vec<Option<f64>>) -> Result<Self> {
        if a.dim() != b.len() || b.len() != lower.len() {
            return Err(Error::InvalidArgument(format!(
                "QP dimensions disagree: A {}, b {}, bounds {}",
                a.dim(),
                b.len(),
                lower.len()
            )));
        }
        Ok(BoundQp { a, b, lower })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn bounded(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.lower[i].is_some()).collect()
    }

    pub fn objective(&self, v: &[f64]) -> f64 {
        let av = self.a.mul_vec(v);
        v.iter().zip(&av).zip(&self.b).map(|((x, ax), b)| 0.5 * x * ax - b * x).sum()
    }

    /// Gradient `Av - b`; on bounded indices this is the multiplier.
    pub fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let mut g = self.a.mul_vec(v);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi -= bi;
        }
        g
    }

    pub fn residuals(&self, v: &[f64]) -> KktResiduals {
        let g = self.gradient(v);
        let mut r = KktResiduals::default();
        for i in 0..self.dim() {
            match self.lower[i] {
                Some(psi) => {
                    r.primal = r.primal.max(psi - v[i]);
                    r.dual = r.dual.max(-g[i]);
                    r.complementarity = r.complementarity.max((g[i] * (v[i] - psi)).abs());
                }
                None => r.stationarity = r.stationarity.max(g[i].abs()),
            }
        }
        r
    }
}

/// Reduction of a [`DiscreteSystem`] to its free (non-Dirichlet) nodes.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub qp: BoundQp,
    /// Node id of each QP unknown.
    pub free: Vec<usize>,
    /// QP index of each constrained node, in `sys.constrained` order.
    pub constrained_local: Vec<usize>,
}

impl ReducedSystem {
    pub fn new(sys: &DiscreteSystem, alpha: f64) -> Result<Self> {
        let n = sys.node_count();
        let op = sys.operator(alpha);
        let mut is_dirichlet = vec![false; n];
        let mut ud = vec![0.0; n];
        for (&d, &v) in sys.dirichlet.iter().zip(&sys.dirichlet_values) {
            is_dirichlet[d] = true;
            ud[d] = v;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !is_dirichlet[i]).collect();
        let a = op.submatrix(&free);
        let b: Vec<f64> = free
            .iter()
            .map(|&i| {
                let coupling: f64 = op.row(i).filter(|&(j, _)| is_dirichlet[j]).map(|(j, v)| v * ud[j]).sum();
                sys.load[i] - coupling
            })
            .collect();
        let mut local = vec![usize::MAX; n];
        for (k, &i) in free.iter().enumerate() {
            local[i] = k;
        }
        let mut lower = vec![None; free.len()];
        let mut constrained_local = Vec::with_capacity(sys.constrained.len());
        for (&c, &psi) in sys.constrained.iter().zip(&sys.obstacle) {
            if local[c] == usize::MAX {
                return Err(Error::InvalidArgument(format!("node {c} is both constrained and Dirichlet")));
            }
            lower[local[c]] = Some(psi);
            constrained_local.push(local[c]);
        }
        Ok(ReducedSystem { qp: BoundQp::new(a, b, lower)?, free, constrained_local })
    }

    /// Nodal vector from QP unknowns and the Dirichlet values.
    pub fn lift(&self, sys: &DiscreteSystem, v: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; sys.node_count()];
        for (&d, &val) in sys.dirichlet.iter().zip(&sys.dirichlet_values) {
            u[d] = val;
        }
        for (&i, &x) in self.free.iter().zip(v) {
            u[i] = x;
        }
        u
    }

    /// QP unknowns from a nodal vector.
    pub fn restrict(&self, u: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| u[i]).collect()
    }
}
