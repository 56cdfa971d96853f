use alloc::collections::BTreeSet;

use super::field::ScalarField;
use super::obstacle::ObstacleExtension;
use crate::geometry::TriMesh;
use crate::{Point, Result};

/// Sampling controls for [`check_balance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceRegion {
    /// Collar depth: interior samples satisfy `-depth ≤ s`.
    pub depth: f64,
    /// Regularisation parameter entering `f̃ = f + ΔΨ - αΨ`.
    pub alpha: f64,
    /// Barycentric lattice subdivisions per triangle.
    pub density: usize,
}

/// Achieved force and flux margins on a collar.
#[derive(Clone, Debug, PartialEq)]
pub struct BalanceData {
    pub eps: f64,
    pub delta: f64,
    /// `-max(f + ΔΨ - αΨ)` over interior samples.
    pub interior_margin: f64,
    /// `-max(g - ∂_νΨ)` over segment nodes.
    pub flux_margin: f64,
    pub interior_pass: bool,
    pub flux_pass: bool,
    pub interior_samples: usize,
    pub flux_samples: usize,
    pub worst_interior_point: Option<Point>,
    pub worst_flux_node: Option<usize>,
}

impl BalanceData {
    pub fn pass(&self) -> bool {
        self.interior_pass && self.flux_pass
    }
}

/// Samples the shifted data on the collar of `ext.frame` and compares with `(ε, δ)`.
///
/// Interior samples are barycentric lattice points of every triangle whose
/// tubular coordinates lie on the segment with `-depth ≤ s ≤ h²` (chords of
/// concave arcs sit slightly outside the curve). Flux samples are the mesh
/// nodes of the segment.
pub fn check_balance(
    mesh: &TriMesh,
    f: &ScalarField,
    g: &ScalarField,
    ext: &ObstacleExtension,
    region: BalanceRegion,
    eps: f64,
    delta: f64,
) -> Result<BalanceData> {
    let frame = &ext.frame;
    let h = mesh.h();
    let n = region.density.max(1);
    let mut worst_f = f64::NEG_INFINITY;
    let mut worst_pt = None;
    let mut count = 0;
    let mut seen = BTreeSet::new();
    for e in 0..mesh.triangles().len() {
        let [a, b, c] = mesh.triangle_points(e);
        for i in 0..=n {
            for j in 0..=n - i {
                let k = n - i - j;
                let w = [i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64];
                let p = [
                    w[0] * a[0] + w[1] * b[0] + w[2] * c[0],
                    w[0] * a[1] + w[1] * b[1] + w[2] * c[1],
                ];
                let Ok((t, s)) = frame.from_xy(p) else { continue };
                if s < -region.depth || s > h * h || frame.locate(t).is_none() {
                    continue;
                }
                let key = [libm::round(p[0] * 1e9) as i64, libm::round(p[1] * 1e9) as i64];
                if !seen.insert(key) {
                    continue;
                }
                let mut v = f.eval(p)? + ext.laplacian(p)?;
                if region.alpha != 0.0 {
                    v -= region.alpha * ext.value(p)?;
                }
                count += 1;
                if v > worst_f {
                    worst_f = v;
                    worst_pt = Some(p);
                }
            }
        }
    }
    let tag = mesh.tag_index(&frame.tag)?;
    let mut worst_g = f64::NEG_INFINITY;
    let mut worst_node = None;
    let nodes = mesh.segment_nodes(tag);
    for &node in &nodes {
        let p = mesh.nodes()[node];
        let (t, _) = frame.from_xy_clamped(p);
        let v = g.eval(p)? - ext.normal_derivative(t)?;
        if v > worst_g {
            worst_g = v;
            worst_node = Some(node);
        }
    }
    let interior_margin = if count == 0 { f64::INFINITY } else { -worst_f };
    let flux_margin = if nodes.is_empty() { f64::INFINITY } else { -worst_g };
    Ok(BalanceData {
        eps,
        delta,
        interior_margin,
        flux_margin,
        interior_pass: interior_margin >= eps,
        flux_pass: flux_margin >= delta,
        interior_samples: count,
        flux_samples: nodes.len(),
        worst_interior_point: worst_pt,
        worst_flux_node: worst_node,
    })
}
