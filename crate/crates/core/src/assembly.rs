//! P1 finite-element assembly of the stiffness and mass forms, the load
//! functional and the discrete Signorini system.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::fields::ScalarField;
use crate::geometry::TriMesh;
use crate::math;
use crate::sparse::CsrMatrix;
use crate::{Error, Point, Result};

const MIN_AREA: f64 = 1e-14;

fn element_geometry(p: [Point; 3]) -> Result<(f64, [Point; 3])> {
    let area = math::signed_area(p[0], p[1], p[2]);
    if !(area >= MIN_AREA) {
        return Err(Error::DegenerateTriangle { element: usize::MAX, area });
    }
    // ∇φ_i = rot90(p_{i+2} - p_{i+1}) / (2A)
    let mut grads = [[0.0; 2]; 3];
    for i in 0..3 {
        let a = p[(i + 1) % 3];
        let b = p[(i + 2) % 3];
        grads[i] = [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)];
    }
    Ok((area, grads))
}

/// `∫_T ∇φ_i · ∇φ_j`.
pub fn element_stiffness(p: [Point; 3]) -> Result<[[f64; 3]; 3]> {
    let (area, g) = element_geometry(p)?;
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * math::dot(g[i], g[j]);
        }
    }
    Ok(k)
}

/// `∫_T φ_i φ_j = (A/12) (1 + δ_ij)`.
pub fn element_mass(p: [Point; 3]) -> Result<[[f64; 3]; 3]> {
    let (area, _) = element_geometry(p)?;
    let mut m = [[area / 12.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = area / 6.0;
    }
    Ok(m)
}

fn with_element<T>(e: usize, r: Result<T>) -> Result<T> {
    r.map_err(|err| match err {
        Error::DegenerateTriangle { area, .. } => Error::DegenerateTriangle { element: e, area },
        other => Error::ElementEvaluation { element: e, source: Box::new(other) },
    })
}

fn assemble(mesh: &TriMesh, local: fn([Point; 3]) -> Result<[[f64; 3]; 3]>) -> Result<CsrMatrix> {
    let mut trip = Vec::with_capacity(9 * mesh.triangles().len());
    for (e, tri) in mesh.triangles().iter().enumerate() {
        let k = with_element(e, local(mesh.triangle_points(e)))?;
        for i in 0..3 {
            for j in 0..3 {
                trip.push((tri[i], tri[j], k[i][j]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(mesh.node_count(), &trip))
}

pub fn assemble_stiffness(mesh: &TriMesh) -> Result<CsrMatrix> {
    assemble(mesh, element_stiffness)
}

pub fn assemble_mass(mesh: &TriMesh) -> Result<CsrMatrix> {
    assemble(mesh, element_mass)
}

/// `F_i = ∫_Ω f φ_i + Σ_tags ∫_Γ g φ_i`.
///
/// Interior integrals use the three-point edge-midpoint rule, boundary
/// integrals two-point Gauss on each edge of the listed tags.
pub fn assemble_load(mesh: &TriMesh, f: &ScalarField, g: &ScalarField, g_tags: &[usize]) -> Result<Vec<f64>> {
    let mut load = vec![0.0; mesh.node_count()];
    for (e, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.triangle_points(e);
        let area = with_element(e, element_geometry(p))?.0;
        for m in 0..3 {
            // midpoint of the edge opposite vertex m
            let a = p[(m + 1) % 3];
            let b = p[(m + 2) % 3];
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let fv = with_element(e, f.eval(mid))?;
            let w = area / 3.0 * fv * 0.5;
            load[tri[(m + 1) % 3]] += w;
            load[tri[(m + 2) % 3]] += w;
        }
    }
    let gp = 0.5 / math::sqrt(3.0);
    for edge in mesh.boundary_edges().iter().filter(|e| g_tags.contains(&e.tag)) {
        let [i, j] = edge.nodes;
        let (a, b) = (mesh.nodes()[i], mesh.nodes()[j]);
        let len = mesh.edge_length(edge);
        for lam in [0.5 - gp, 0.5 + gp] {
            let x = [a[0] + lam * (b[0] - a[0]), a[1] + lam * (b[1] - a[1])];
            let gv = g.eval(x)?;
            load[i] += 0.5 * len * gv * (1.0 - lam);
            load[j] += 0.5 * len * gv * lam;
        }
    }
    Ok(load)
}

/// Boundary condition imposed on one tagged segment.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryCondition {
    /// `u ≥ ψ`, `∂_νu ≥ g`, `(u - ψ)(∂_νu - g) = 0`.
    Signorini,
    /// `u = value`.
    Dirichlet(ScalarField),
}

/// One condition per mesh tag.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLayout {
    pub conditions: Vec<(String, BoundaryCondition)>,
}

impl BoundaryLayout {
    pub fn all_signorini(mesh: &TriMesh) -> Self {
        BoundaryLayout { conditions: mesh.tags().iter().map(|t| (t.clone(), BoundaryCondition::Signorini)).collect() }
    }

    /// Checks that every mesh tag has exactly one condition and no unknown tag is named.
    pub fn validate(&self, mesh: &TriMesh) -> Result<()> {
        for (name, _) in &self.conditions {
            mesh.tag_index(name)?;
            if self.conditions.iter().filter(|(n, _)| n == name).count() != 1 {
                return Err(Error::InvalidArgument(format!("segment `{name}` has more than one boundary condition")));
            }
        }
        for t in mesh.tags() {
            if !self.conditions.iter().any(|(n, _)| n == t) {
                return Err(Error::InvalidArgument(format!("segment `{t}` has no boundary condition")));
            }
        }
        Ok(())
    }

    pub fn has_dirichlet(&self) -> bool {
        self.conditions.iter().any(|(_, c)| matches!(c, BoundaryCondition::Dirichlet(_)))
    }
}

/// Data `(f, g, ψ)` of the Signorini problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemData {
    pub f: ScalarField,
    pub g: ScalarField,
    pub psi: ScalarField,
}

/// Result of the compatibility functional `∫f + <g, 1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Compatibility {
    pub value: f64,
    pub admissible: bool,
    /// `value` vanishes to rounding: constant shifts may not be determined.
    pub borderline: bool,
}

/// Assembled discrete Signorini system.
#[derive(Clone, Debug)]
pub struct DiscreteSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub load: Vec<f64>,
    /// Signorini nodes, sorted.
    pub constrained: Vec<usize>,
    /// `ψ_h` at `constrained`.
    pub obstacle: Vec<f64>,
    /// Dirichlet nodes, sorted.
    pub dirichlet: Vec<usize>,
    pub dirichlet_values: Vec<f64>,
}

/// `1ᵀF` with `F` the load of `f` and of `g` on `g_tags`.
pub fn check_compatibility(mesh: &TriMesh, f: &ScalarField, g: &ScalarField, g_tags: &[usize]) -> Result<Compatibility> {
    let load = assemble_load(mesh, f, g, g_tags)?;
    Ok(compatibility_of(&load))
}

fn compatibility_of(load: &[f64]) -> Compatibility {
    let value: f64 = load.iter().sum();
    let scale: f64 = load.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    Compatibility { value, admissible: value <= 1e-12 * scale, borderline: value.abs() <= 1e-12 * scale }
}

/// Assembles the system for `data` under `layout`. Nodes shared between a
/// Dirichlet and a Signorini segment are Dirichlet.
pub fn assemble_system(mesh: &TriMesh, data: &ProblemData, layout: &BoundaryLayout) -> Result<DiscreteSystem> {
    layout.validate(mesh)?;
    let stiffness = assemble_stiffness(mesh)?;
    let mass = assemble_mass(mesh)?;
    let mut signorini_tags = Vec::new();
    let mut dirichlet_value: Vec<Option<&ScalarField>> = vec![None; mesh.node_count()];
    for (name, cond) in &layout.conditions {
        let tag = mesh.tag_index(name)?;
        match cond {
            BoundaryCondition::Signorini => signorini_tags.push(tag),
            BoundaryCondition::Dirichlet(v) => {
                for n in mesh.segment_nodes(tag) {
                    dirichlet_value[n] = Some(v);
                }
            }
        }
    }
    let load = assemble_load(mesh, &data.f, &data.g, &signorini_tags)?;
    let mut dirichlet = Vec::new();
    let mut dirichlet_values = Vec::new();
    for (n, v) in dirichlet_value.iter().enumerate() {
        if let Some(v) = v {
            dirichlet.push(n);
            dirichlet_values.push(v.eval(mesh.nodes()[n])?);
        }
    }
    let mut constrained: Vec<usize> = signorini_tags
        .iter()
        .flat_map(|&t| mesh.segment_nodes(t))
        .filter(|&n| dirichlet_value[n].is_none())
        .collect();
    constrained.sort_unstable();
    constrained.dedup();
    let obstacle = constrained.iter().map(|&n| data.psi.eval(mesh.nodes()[n])).collect::<Result<Vec<_>>>()?;
    Ok(DiscreteSystem { stiffness, mass, load, constrained, obstacle, dirichlet, dirichlet_values })
}

impl DiscreteSystem {
    pub fn node_count(&self) -> usize {
        self.load.len()
    }

    /// Compatibility of the load; `None` when Dirichlet nodes make the check unnecessary.
    pub fn compatibility(&self) -> Option<Compatibility> {
        if self.dirichlet.is_empty() {
            Some(compatibility_of(&self.load))
        } else {
            None
        }
    }

    /// `K + αM`.
    pub fn operator(&self, alpha: f64) -> CsrMatrix {
        if alpha == 0.0 {
            self.stiffness.clone()
        } else {
            self.stiffness.add_scaled(&self.mass, alpha)
        }
    }

    /// The system for `ũ = u - w`: load `F - (K + αM)w`, obstacle `ψ - w`,
    /// Dirichlet values shifted accordingly.
    pub fn shifted(&self, w: &[f64], alpha: f64) -> DiscreteSystem {
        let aw = self.operator(alpha).mul_vec(w);
        let mut s = self.clone();
        for (f, a) in s.load.iter_mut().zip(&aw) {
            *f -= a;
        }
        for (k, &n) in self.constrained.iter().enumerate() {
            s.obstacle[k] -= w[n];
        }
        for (k, &n) in self.dirichlet.iter().enumerate() {
            s.dirichlet_values[k] -= w[n];
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_field;
    use crate::geometry::{build_mesh, DomainDescriptor};

    fn unit_square() -> TriMesh {
        let dd = DomainDescriptor::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        TriMesh::from_parts(nodes, vec![[0, 1, 2], [0, 2, 3]], dd.tag_names(), |x| dd.classify(x)).unwrap()
    }

    #[test]
    fn unit_right_triangle_stiffness() {
        let k = element_stiffness([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-15);
            }
            assert!(k[i].iter().sum::<f64>().abs() < 1e-15);
        }
    }

    #[test]
    fn element_mass_formula() {
        let p = [[0.2, 0.1], [1.7, 0.4], [0.5, 1.3]];
        let a = math::signed_area(p[0], p[1], p[2]);
        let m = element_mass(p).unwrap();
        assert!((m[0][0] - a / 6.0).abs() < 1e-15 && (m[1][2] - a / 12.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_element_rejected() {
        assert!(element_stiffness([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
    }

    #[test]
    fn square_energy_of_x_is_one() {
        let mesh = unit_square();
        let k = assemble_stiffness(&mesh).unwrap();
        let u: Vec<f64> = mesh.nodes().iter().map(|p| p[0]).collect();
        assert!((k.quadratic_form(&u) - 1.0).abs() < 1e-14);
        let m = assemble_mass(&mesh).unwrap();
        let mx = m.mul_vec(&u);
        assert!((mx.iter().sum::<f64>() - 0.5).abs() < 1e-12);
        let total: f64 = m.to_coo().iter().map(|t| t.2).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn load_integrals() {
        let mesh = unit_square();
        let all: Vec<usize> = (0..mesh.tags().len()).collect();
        let one = ScalarField::constant(1.0);
        let zero = ScalarField::zero();
        let l = assemble_load(&mesh, &one, &zero, &all).unwrap();
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let x = parse_field("x").unwrap();
        let l = assemble_load(&mesh, &x, &zero, &all).unwrap();
        assert!((l.iter().sum::<f64>() - 0.5).abs() < 1e-12);
        let c = check_compatibility(&mesh, &zero, &ScalarField::constant(-1.0), &all).unwrap();
        assert!((c.value + 4.0).abs() < 1e-14 && c.admissible);
        let c = check_compatibility(&mesh, &ScalarField::constant(-1.0), &zero, &all).unwrap();
        assert!((c.value + 1.0).abs() < 1e-14 && c.admissible);
        let c = check_compatibility(&mesh, &one, &zero, &all).unwrap();
        assert!((c.value - 1.0).abs() < 1e-14 && !c.admissible);
    }

    #[test]
    fn ring_boundary_measure() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let mesh = build_mesh(&dd, 16).unwrap();
        let g0 = mesh.tag_index("gamma0").unwrap();
        let l = assemble_load(&mesh, &ScalarField::zero(), &ScalarField::constant(1.0), &[g0]).unwrap();
        assert!((l.iter().sum::<f64>() - mesh.segment_length(g0)).abs() < 1e-13);
    }

    #[test]
    fn stiffness_kernel_and_symmetry() {
        let dd = DomainDescriptor::star(1.0, 0.2, 5).unwrap();
        let mesh = build_mesh(&dd, 24).unwrap();
        let k = assemble_stiffness(&mesh).unwrap();
        assert!(k.row_sums().iter().all(|s| s.abs() < 1e-12));
        assert!(k.max_asymmetry() < 1e-15);
        // affine functions are discretely harmonic
        let u: Vec<f64> = mesh.nodes().iter().map(|p| 0.3 + 2.0 * p[0] - p[1]).collect();
        let ku = k.mul_vec(&u);
        let bnd = mesh.boundary_nodes();
        for (i, v) in ku.iter().enumerate() {
            if bnd.binary_search(&i).is_err() {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dirichlet_wins_and_sets_are_disjoint() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let mesh = build_mesh(&dd, 16).unwrap();
        let layout = BoundaryLayout {
            conditions: vec![
                ("gamma0".into(), BoundaryCondition::Signorini),
                ("gamma1".into(), BoundaryCondition::Dirichlet(ScalarField::zero())),
            ],
        };
        let data = ProblemData { f: ScalarField::constant(-1.0), g: ScalarField::zero(), psi: ScalarField::zero() };
        let sys = assemble_system(&mesh, &data, &layout).unwrap();
        assert!(sys.compatibility().is_none());
        assert!(sys.constrained.iter().all(|c| sys.dirichlet.binary_search(c).is_err()));
        assert_eq!(sys.constrained.len(), mesh.segment_nodes(0).len());
        let bad = BoundaryLayout { conditions: vec![("gamma0".into(), BoundaryCondition::Signorini)] };
        assert!(assemble_system(&mesh, &data, &bad).is_err());
    }
}
