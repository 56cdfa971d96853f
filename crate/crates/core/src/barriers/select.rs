use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ode::{ode_barrier, ode_barrier_extrapolated};
use crate::math;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BarrierKind {
    Quadratic,
    Ring,
    Intrinsic,
    Ode,
}

impl BarrierKind {
    pub fn name(self) -> &'static str {
        match self {
            BarrierKind::Quadratic => "quadratic",
            BarrierKind::Ring => "ring",
            BarrierKind::Intrinsic => "intrinsic",
            BarrierKind::Ode => "ode",
        }
    }
}

/// Inputs of [`select_constants`]; geometry entries are used by the kinds that need them.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionInput {
    pub kind: BarrierKind,
    pub eps: f64,
    pub delta: f64,
    /// Sup-norm bound `M` of the shifted solution.
    pub m: f64,
    pub n: u32,
    /// Comparison radius `R`.
    pub r: Option<f64>,
    /// `dist(x₀, Γ \ Γ_{ε,δ})`, the largest radius keeping `∂₂D` on the target segment.
    pub dist_to_complement: Option<f64>,
    pub theta0: Option<f64>,
    pub c_delta: Option<f64>,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub r_eps: Option<f64>,
    /// `b = (N - 1)H` for the ODE barrier.
    pub b: Option<f64>,
    /// Allow the flat limit of the ODE barrier when `b = 0`.
    pub extrapolated: bool,
}

impl SelectionInput {
    pub fn new(kind: BarrierKind, eps: f64, delta: f64, m: f64) -> Self {
        SelectionInput {
            kind,
            eps,
            delta,
            m,
            n: 2,
            r: None,
            dist_to_complement: None,
            theta0: None,
            c_delta: None,
            r0: None,
            r1: None,
            r_eps: None,
            b: None,
            extrapolated: false,
        }
    }
}

/// One selection inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        let slack = 1e-12 * (1.0 + lhs.abs().max(rhs.abs()));
        Inequality { name: name.to_string(), lhs, rhs, holds: lhs <= rhs + slack }
    }
}

/// Constants stored on a certificate.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BarrierConstants {
    pub c: f64,
    pub r: Option<f64>,
    pub m: f64,
    pub eps: f64,
    pub delta: f64,
    pub theta0: Option<f64>,
    pub b: Option<f64>,
    pub c_delta: Option<f64>,
    pub n: u32,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub r_eps: Option<f64>,
    /// Upper bound on `c` implied by the kind's admissibility inequality.
    pub c_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Selection {
    pub kind: BarrierKind,
    pub constants: BarrierConstants,
    pub checks: Vec<Inequality>,
    pub feasible: bool,
}

impl Selection {
    /// Turns the first violated inequality into [`Error::Infeasible`].
    pub fn require_feasible(self) -> Result<Self> {
        if let Some(bad) = self.checks.iter().find(|c| !c.holds) {
            return Err(Error::Infeasible { inequality: leak_name(&bad.name), lhs: bad.lhs, rhs: bad.rhs });
        }
        Ok(self)
    }

    pub fn violated(&self) -> impl Iterator<Item = &Inequality> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

fn leak_name(name: &str) -> &'static str {
    INEQUALITY_NAMES.iter().copied().find(|n| *n == name).unwrap_or("selection inequality")
}

const INEQ_C_POSITIVE: &str = "0 < c";
const INEQ_C_EPS: &str = "c <= eps";
const INEQ_RADIUS: &str = "2NM/c <= R";
const INEQ_THETA: &str = "c <= delta N / (theta0 R)";
const INEQ_DIST: &str = "R <= dist(x0, boundary outside target)";
const INEQ_RING_C: &str = "c <= (eps/2)(1 + ((N-1)/R0)(R_eps - R0))^-1";
const INEQ_RING_RADIUS: &str = "R0 + 2 (M N R1 / (eps R0))^(1/2) <= R_eps";
const INEQ_RING_OUTER: &str = "R_eps <= R1";
const INEQ_INTRINSIC_C: &str = "c <= min(delta c_delta, eps)";
const INEQ_INTRINSIC_CAP: &str = "M <= (c / c_delta) R";
const INEQ_ODE_INTERVAL: &str = "R <= length of the interval where phi >= 0";

const INEQUALITY_NAMES: [&str; 11] = [
    INEQ_C_POSITIVE,
    INEQ_C_EPS,
    INEQ_RADIUS,
    INEQ_THETA,
    INEQ_DIST,
    INEQ_RING_C,
    INEQ_RING_RADIUS,
    INEQ_RING_OUTER,
    INEQ_INTRINSIC_C,
    INEQ_INTRINSIC_CAP,
    INEQ_ODE_INTERVAL,
];

fn need(v: Option<f64>, what: &'static str) -> Result<f64> {
    v.ok_or(Error::MissingInput(what))
}

/// Largest admissible barrier scale `c` for the kind, with every paired inequality evaluated.
///
/// Infeasibility is reported through [`Selection::feasible`] and the failing
/// [`Inequality`] entries; [`Selection::require_feasible`] turns it into an error.
pub fn select_constants(input: &SelectionInput) -> Result<Selection> {
    let SelectionInput { kind, eps, delta, m, n, .. } = *input;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if !(delta >= 0.0) || !(m >= 0.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need delta >= 0, M >= 0 and N >= 1 (delta = {delta}, M = {m}, N = {n})"
        )));
    }
    let nf = n as f64;
    let mut k = BarrierConstants { m, eps, delta, n, ..Default::default() };
    let mut checks = Vec::new();
    match kind {
        BarrierKind::Quadratic => {
            let r = need(input.r, "comparison radius R")?;
            let theta0 = input.theta0.unwrap_or(0.0);
            let mut c_max = eps;
            if theta0 > 0.0 {
                c_max = c_max.min(delta * nf / (theta0 * r));
            }
            let c = c_max;
            checks.push(Inequality::le(INEQ_C_POSITIVE, 0.0, c));
            checks.push(Inequality::le(INEQ_C_EPS, c, eps));
            if theta0 > 0.0 {
                checks.push(Inequality::le(INEQ_THETA, c, delta * nf / (theta0 * r)));
            }
            let need_r = if c > 0.0 { 2.0 * nf * m / c } else { f64::INFINITY };
            checks.push(Inequality::le(INEQ_RADIUS, need_r, r));
            if let Some(d) = input.dist_to_complement {
                checks.push(Inequality::le(INEQ_DIST, r, d));
            }
            k.c = c;
            k.c_max = c_max;
            k.r = Some(r);
            k.theta0 = Some(theta0);
        }
        BarrierKind::Ring => {
            let r0 = need(input.r0, "inner radius R0")?;
            let r1 = need(input.r1, "outer radius R1")?;
            if !(r0 > 0.0 && r1 > r0) {
                return Err(Error::InvalidArgument(format!("ring needs 0 < R0 < R1 (R0 = {r0}, R1 = {r1})")));
            }
            let r_eps = input.r_eps.unwrap_or(r1);
            let c = eps * r0 / (4.0 * nf * r1);
            let c_max = 0.5 * eps / (1.0 + (nf - 1.0) / r0 * (r_eps - r0));
            checks.push(Inequality::le(INEQ_RING_C, c, c_max));
            let need_r = r0 + 2.0 * math::sqrt(m * nf * r1 / (eps * r0));
            checks.push(Inequality::le(INEQ_RING_RADIUS, need_r, r_eps));
            checks.push(Inequality::le(INEQ_RING_OUTER, r_eps, r1));
            k.c = c;
            k.c_max = c_max;
            k.r0 = Some(r0);
            k.r1 = Some(r1);
            k.r_eps = Some(r_eps);
            k.r = Some(r_eps - r0);
        }
        BarrierKind::Intrinsic => {
            let r = need(input.r, "comparison radius R")?;
            let c_delta = need(input.c_delta, "Laplacian bound c_delta")?;
            if !(c_delta > 0.0) {
                return Err(Error::InvalidArgument(format!("c_delta must be positive, got {c_delta}")));
            }
            let c = (delta * c_delta).min(eps);
            checks.push(Inequality::le(INEQ_C_POSITIVE, 0.0, c));
            checks.push(Inequality::le(INEQ_INTRINSIC_C, c, (delta * c_delta).min(eps)));
            checks.push(Inequality::le(INEQ_INTRINSIC_CAP, m, c / c_delta * r));
            if let Some(d) = input.dist_to_complement {
                checks.push(Inequality::le(INEQ_DIST, r, d));
            }
            k.c = c;
            k.c_max = c;
            k.r = Some(r);
            k.c_delta = Some(c_delta);
            k.theta0 = input.theta0;
        }
        BarrierKind::Ode => {
            let b = need(input.b, "b = (N-1)H")?;
            let ode = if b == 0.0 && input.extrapolated {
                ode_barrier_extrapolated(eps, delta)?
            } else {
                ode_barrier(eps, delta, b)?
            };
            k.c = eps;
            k.c_max = eps;
            k.b = Some(b);
            if let Some(r) = input.r {
                let iv = ode.validity_interval(r.max(1.0) * 1e3);
                let len = iv.left.map_or(f64::INFINITY, |l| -l);
                checks.push(Inequality::le(INEQ_ODE_INTERVAL, r, len));
                k.r = Some(r);
            }
        }
    }
    let feasible = checks.iter().all(|c| c.holds);
    Ok(Selection { kind, constants: k, checks, feasible })
}
