//! Registered exact solutions and discrete error norms.

use serde::{Deserialize, Serialize};
use signorini_core::geometry::{DomainKind, TriMesh};
use signorini_core::Point;

use crate::config::{ExactConfig, FieldSpec, ScenarioConfig};
use crate::LabError;

/// `u(r) = -f r²/4 + A ln r + B` with `u(R₀) = u(R₁) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRadial {
    pub f: f64,
    pub r0: f64,
    pub r1: f64,
    pub a: f64,
    pub b: f64,
}

impl AnnulusRadial {
    pub fn new(f: f64, r0: f64, r1: f64) -> Self {
        let a = f * (r1 * r1 - r0 * r0) / (4.0 * (r1 / r0).ln());
        let b = f * r0 * r0 / 4.0 - a * r0.ln();
        AnnulusRadial { f, r0, r1, a, b }
    }

    pub fn radial(&self, r: f64) -> f64 {
        -self.f * r * r / 4.0 + self.a * r.ln() + self.b
    }

    pub fn radial_derivative(&self, r: f64) -> f64 {
        -self.f * r / 2.0 + self.a / r
    }

    pub fn value(&self, p: Point) -> f64 {
        self.radial(p[0].hypot(p[1]))
    }

    pub fn gradient(&self, p: Point) -> Point {
        let r = p[0].hypot(p[1]);
        let d = self.radial_derivative(r) / r;
        [d * p[0], d * p[1]]
    }

    /// `∂_νu` on the inner circle, with `ν` pointing into the hole.
    pub fn inner_flux(&self) -> f64 {
        -self.radial_derivative(self.r0)
    }
}

pub fn build(cfg: &ScenarioConfig) -> Result<Option<AnnulusRadial>, LabError> {
    let Some(ExactConfig::AnnulusRadial) = &cfg.exact else { return Ok(None) };
    let DomainKind::Ring { inner, outer } = cfg.domain.shape else {
        return Err(LabError::Config("exact annulus-radial needs a ring domain".into()));
    };
    let f = match &cfg.fields.f {
        FieldSpec::Num(v) => *v,
        other => other
            .build()?
            .as_constant()
            .ok_or_else(|| LabError::Config("exact annulus-radial needs a constant f".into()))?,
    };
    Ok(Some(AnnulusRadial::new(f, inner, outer)))
}

/// `(‖u - u_h‖_{L²}, ‖u - u_h‖_{H¹})` on the mesh, with the three-midpoint rule per triangle.
pub fn error_norms(mesh: &TriMesh, uh: &[f64], exact: &AnnulusRadial) -> (f64, f64) {
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for (e, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.triangle_points(e);
        let area = mesh.triangle_area(e);
        let v = [uh[tri[0]], uh[tri[1]], uh[tri[2]]];
        // constant gradient of the P1 interpolant
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let gx = ((v[1] - v[0]) * (p[2][1] - p[0][1]) - (v[2] - v[0]) * (p[1][1] - p[0][1])) / det;
        let gy = ((v[2] - v[0]) * (p[1][0] - p[0][0]) - (v[1] - v[0]) * (p[2][0] - p[0][0])) / det;
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let m = [0.5 * (p[i][0] + p[j][0]), 0.5 * (p[i][1] + p[j][1])];
            let d = exact.value(m) - 0.5 * (v[i] + v[j]);
            let g = exact.gradient(m);
            l2 += area / 3.0 * d * d;
            semi += area / 3.0 * ((g[0] - gx).powi(2) + (g[1] - gy).powi(2));
        }
    }
    (l2.sqrt(), (l2 + semi).sqrt())
}

/// Least-squares slope of `log e` against `log h`.
pub fn loglog_slope(h: &[f64], e: &[f64]) -> Option<f64> {
    if h.len() < 2 || h.len() != e.len() || h.iter().chain(e).any(|&v| !(v > 0.0)) {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use signorini_core::geometry::{build_mesh, DomainDescriptor};

    #[test]
    fn unit_ring_closed_form() {
        let u = AnnulusRadial::new(-1.0, 1.0, 2.0);
        let ln2 = 2f64.ln();
        assert!((u.a + 3.0 / (4.0 * ln2)).abs() < 1e-15);
        assert!((u.b + 0.25).abs() < 1e-15);
        assert!(u.radial(1.0).abs() < 1e-15 && u.radial(2.0).abs() < 1e-15);
        assert!((u.inner_flux() - (3.0 / (4.0 * ln2) - 0.5)).abs() < 1e-15);
        // -Δu = f by central differences
        let p = [1.2, 0.7];
        let h = 1e-3;
        let lap = (u.value([p[0] + h, p[1]]) + u.value([p[0] - h, p[1]]) + u.value([p[0], p[1] + h])
            + u.value([p[0], p[1] - h])
            - 4.0 * u.value(p))
            / (h * h);
        assert!((-lap - u.f).abs() < 1e-5);
    }

    #[test]
    fn interpolant_error_is_first_order() {
        let u = AnnulusRadial::new(-1.0, 1.0, 2.0);
        let mut hs = Vec::new();
        let mut es = Vec::new();
        for res in [16, 32, 64] {
            let mesh = build_mesh(&DomainDescriptor::ring(1.0, 2.0).unwrap(), res).unwrap();
            let uh: Vec<f64> = mesh.nodes().iter().map(|&p| u.value(p)).collect();
            hs.push(mesh.h());
            es.push(error_norms(&mesh, &uh, &u).1);
        }
        let s = loglog_slope(&hs, &es).unwrap();
        assert!((s - 1.0).abs() < 0.15, "slope {s}");
    }

    #[test]
    fn slope_of_exact_power_law() {
        let h = [0.4, 0.2, 0.1];
        let e: Vec<f64> = h.iter().map(|v| 3.0 * v * v).collect();
        assert!((loglog_slope(&h, &e).unwrap() - 2.0).abs() < 1e-12);
    }
}
