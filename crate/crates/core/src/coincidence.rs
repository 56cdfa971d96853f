//! Discrete coincidence set `{u_h = ψ_h}` on the Signorini boundary, its
//! coverage of a target segment and its stability along an α schedule.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::DiscreteSystem;
use crate::fields::{ObstacleExtension, ScalarField};
use crate::geometry::TriMesh;
use crate::math::{self, GAUSS8};
use crate::solver::Solution;
use crate::{Error, Result};

/// Default coincidence tolerance `max(10 kkt_tol, 0.01 h ‖u_h‖∞)`.
pub fn default_tolerance(kkt_tol: f64, h: f64, u: &[f64]) -> f64 {
    let sup = u.iter().fold(0.0, |m: f64, &x| m.max(x.abs()));
    (10.0 * kkt_tol).max(0.01 * h * sup)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoincidenceReport {
    /// Sorted constrained nodes with `u_h - ψ_h ≤ tol`.
    pub nodes: Vec<usize>,
    /// Length of Signorini boundary edges with both endpoints in the set.
    pub covered_length: f64,
    /// Total length of the Signorini boundary.
    pub target_length: f64,
    pub coverage: f64,
    pub tol: f64,
    /// `(node, u_h - ψ_h)` for every constrained node.
    pub gaps: Vec<(usize, f64)>,
}

impl CoincidenceReport {
    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    /// Nodes of the set that lie on segment `tag`.
    pub fn restricted_to(&self, mesh: &TriMesh, tag: usize) -> Vec<usize> {
        let on: BTreeSet<usize> = mesh.segment_nodes(tag).into_iter().collect();
        self.nodes.iter().copied().filter(|n| on.contains(n)).collect()
    }
}

/// Coincidence set of `sol` against the nodal obstacle of `sys`.
pub fn extract_coincidence(mesh: &TriMesh, sys: &DiscreteSystem, sol: &Solution, tol: f64) -> Result<CoincidenceReport> {
    let n = mesh.node_count();
    if sol.u.len() != n || sys.node_count() != n {
        return Err(Error::InvalidArgument(format!(
            "solution ({}) and system ({}) do not match the mesh ({n} nodes)",
            sol.u.len(),
            sys.node_count()
        )));
    }
    let mut constrained = vec![false; n];
    let mut inside = vec![false; n];
    let mut gaps = Vec::with_capacity(sys.constrained.len());
    let mut nodes = Vec::new();
    for (&i, &psi) in sys.constrained.iter().zip(&sys.obstacle) {
        let gap = sol.u[i] - psi;
        constrained[i] = true;
        gaps.push((i, gap));
        if gap <= tol {
            inside[i] = true;
            nodes.push(i);
        }
    }
    nodes.sort_unstable();
    gaps.sort_unstable_by_key(|g| g.0);
    let mut covered = 0.0;
    let mut target = 0.0;
    for e in mesh.boundary_edges() {
        let [a, b] = e.nodes;
        if constrained[a] && constrained[b] {
            let l = mesh.edge_length(e);
            target += l;
            if inside[a] && inside[b] {
                covered += l;
            }
        }
    }
    let coverage = if target > 0.0 { covered / target } else { 0.0 };
    Ok(CoincidenceReport { nodes, covered_length: covered, target_length: target, coverage, tol, gaps })
}

/// Fraction of the arc length of segment `tag` whose edges have both endpoints in the set.
pub fn coverage(report: &CoincidenceReport, mesh: &TriMesh, tag: &str) -> Result<f64> {
    let t = mesh.tag_index(tag)?;
    let mut covered = 0.0;
    let mut total = 0.0;
    for e in mesh.segment_edges(t) {
        let l = mesh.edge_length(e);
        total += l;
        if report.contains(e.nodes[0]) && report.contains(e.nodes[1]) {
            covered += l;
        }
    }
    if total == 0.0 {
        return Err(Error::UnknownSegment(format!("{tag} (no edges on the mesh)")));
    }
    Ok(covered / total)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityReport {
    pub stable: bool,
    /// `(α, coverage of the target)` in schedule order.
    pub per_alpha: Vec<(f64, f64)>,
    /// Target node sets of the last two schedule entries agree.
    pub last_two_equal: bool,
    /// Coverage never decreases along the entries with `α < 0.1`.
    pub monotone_small_alpha: bool,
}

/// Threshold below which coverage must be non-decreasing in α-stability.
pub const STABILITY_ALPHA: f64 = 0.1;

/// α-stability of the coincidence set restricted to segment `tag`.
pub fn alpha_stability(
    mesh: &TriMesh,
    sys: &DiscreteSystem,
    solutions: &[Solution],
    tag: &str,
    tol: f64,
) -> Result<StabilityReport> {
    if solutions.is_empty() {
        return Err(Error::InvalidArgument("no solutions to compare".into()));
    }
    let t = mesh.tag_index(tag)?;
    let mut per_alpha = Vec::with_capacity(solutions.len());
    let mut sets = Vec::with_capacity(solutions.len());
    for sol in solutions {
        let rep = extract_coincidence(mesh, sys, sol, tol)?;
        per_alpha.push((sol.alpha, coverage(&rep, mesh, tag)?));
        sets.push(rep.restricted_to(mesh, t));
    }
    let last_two_equal = sets.len() < 2 || sets[sets.len() - 1] == sets[sets.len() - 2];
    let small: Vec<f64> = per_alpha.iter().filter(|(a, _)| *a < STABILITY_ALPHA).map(|&(_, c)| c).collect();
    let monotone_small_alpha = small.windows(2).all(|w| w[1] >= w[0]);
    Ok(StabilityReport { stable: last_two_equal && monotone_small_alpha, per_alpha, last_two_equal, monotone_small_alpha })
}

/// `∫ (g - ∂_νΨ)` over the covered edges of the set, by 8-point Gauss quadrature per edge.
///
/// `∂_νΨ` is taken from `ext` on its segment and is zero elsewhere.
pub fn flux_balance_integral(
    mesh: &TriMesh,
    report: &CoincidenceReport,
    g: &ScalarField,
    ext: Option<&ObstacleExtension>,
) -> Result<f64> {
    let mut total = 0.0;
    for e in mesh.boundary_edges() {
        let [a, b] = e.nodes;
        if !(report.contains(a) && report.contains(b)) {
            continue;
        }
        let (pa, pb) = (mesh.nodes()[a], mesh.nodes()[b]);
        let half = 0.5 * mesh.edge_length(e);
        for &(x, w) in &GAUSS8 {
            let p = math::add(math::scale(pa, 0.5 * (1.0 - x)), math::scale(pb, 0.5 * (1.0 + x)));
            let mut v = g.eval(p)?;
            if let Some(ext) = ext {
                if let Ok((t, _)) = ext.frame.from_xy(p) {
                    v -= ext.normal_derivative(t)?;
                }
            }
            total += w * half * v;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_system, BoundaryCondition, BoundaryLayout, ProblemData};
    use crate::geometry::{build_mesh, DomainDescriptor};
    use crate::solver::{KktResiduals, Method};
    use alloc::string::ToString;

    fn ring_system() -> (TriMesh, DiscreteSystem) {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let mesh = build_mesh(&dd, 16).unwrap();
        let data = ProblemData { f: ScalarField::constant(-1.0), g: ScalarField::zero(), psi: ScalarField::zero() };
        let layout = BoundaryLayout {
            conditions: vec![
                ("gamma0".to_string(), BoundaryCondition::Signorini),
                ("gamma1".to_string(), BoundaryCondition::Dirichlet(ScalarField::zero())),
            ],
        };
        let sys = assemble_system(&mesh, &data, &layout).unwrap();
        (mesh, sys)
    }

    fn fake(u: Vec<f64>, alpha: f64) -> Solution {
        Solution {
            u,
            multipliers: Vec::new(),
            active: Vec::new(),
            alpha,
            method: Method::Pdas,
            iterations: 0,
            residuals: KktResiduals::default(),
            history: Vec::new(),
            energy: Vec::new(),
        }
    }

    #[test]
    fn full_and_empty_coverage() {
        let (mesh, sys) = ring_system();
        let n = mesh.node_count();
        let full = extract_coincidence(&mesh, &sys, &fake(vec![0.0; n], 1.0), 1e-12).unwrap();
        assert_eq!(full.coverage, 1.0);
        assert_eq!(coverage(&full, &mesh, "gamma0").unwrap(), 1.0);
        assert_eq!(coverage(&full, &mesh, "gamma1").unwrap(), 0.0);
        let empty = extract_coincidence(&mesh, &sys, &fake(vec![1.0; n], 1.0), 1e-3).unwrap();
        assert!(empty.nodes.is_empty());
        assert_eq!(empty.coverage, 0.0);
        assert!(matches!(coverage(&empty, &mesh, "nope"), Err(Error::UnknownSegment(_))));
    }

    #[test]
    fn single_node_covers_no_arc() {
        let (mesh, sys) = ring_system();
        let mut u = vec![1.0; mesh.node_count()];
        u[sys.constrained[0]] = 0.0;
        let r = extract_coincidence(&mesh, &sys, &fake(u, 1.0), 1e-9).unwrap();
        assert_eq!(r.nodes.len(), 1);
        assert_eq!(r.covered_length, 0.0);
    }

    #[test]
    fn default_tolerance_couples_to_scale() {
        assert_eq!(default_tolerance(1e-10, 0.1, &[0.0, -2.0]), 0.002);
        assert_eq!(default_tolerance(1e-10, 0.1, &[0.0]), 1e-9);
    }

    #[test]
    fn stability_of_constant_sets() {
        let (mesh, sys) = ring_system();
        let n = mesh.node_count();
        let sols: Vec<Solution> = [1.0, 0.1, 0.01, 0.001].iter().map(|&a| fake(vec![0.0; n], a)).collect();
        let s = alpha_stability(&mesh, &sys, &sols, "gamma0", 1e-12).unwrap();
        assert!(s.stable && s.last_two_equal && s.monotone_small_alpha);
        assert_eq!(s.per_alpha.len(), 4);
        let mut sols = sols;
        sols[3].u = vec![1.0; n];
        let s = alpha_stability(&mesh, &sys, &sols, "gamma0", 1e-12).unwrap();
        assert!(!s.stable && !s.last_two_equal && !s.monotone_small_alpha);
    }

    #[test]
    fn balance_integral_of_constant_flux() {
        let (mesh, sys) = ring_system();
        let r = extract_coincidence(&mesh, &sys, &fake(vec![0.0; mesh.node_count()], 1.0), 1e-12).unwrap();
        let v = flux_balance_integral(&mesh, &r, &ScalarField::constant(-0.5), None).unwrap();
        assert!((v + 0.5 * r.covered_length).abs() < 1e-12);
    }
}
