use alloc::format;

use super::field::ScalarField;
use crate::geometry::TubularFrame;
use crate::math;
use crate::{Error, Point, Result};

/// Quintic cutoff `η(s)` equal to 1 at `s = 0` and 0 for `s ≤ -width`,
/// with vanishing first and second derivatives at both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuinticCutoff {
    pub width: f64,
}

impl QuinticCutoff {
    pub fn value(&self, s: f64) -> f64 {
        let z = self.z(s);
        z * z * z * (10.0 - 15.0 * z + 6.0 * z * z)
    }

    pub fn d1(&self, s: f64) -> f64 {
        let z = self.z(s);
        if z <= 0.0 || z >= 1.0 {
            return 0.0;
        }
        30.0 * z * z * (1.0 - z) * (1.0 - z) / self.width
    }

    pub fn d2(&self, s: f64) -> f64 {
        let z = self.z(s);
        if z <= 0.0 || z >= 1.0 {
            return 0.0;
        }
        60.0 * z * (1.0 - z) * (1.0 - 2.0 * z) / (self.width * self.width)
    }

    fn z(&self, s: f64) -> f64 {
        (1.0 + s / self.width).clamp(0.0, 1.0)
    }
}

/// Nonnegative extension `Ψ(ξ + sν) = ψ(ξ) η(s)` of a boundary obstacle into the collar.
///
/// Outside the frame's tube `Ψ = 0`. Past the ends of an open segment the
/// boundary value is continued from the nearest endpoint.
#[derive(Clone, Debug)]
pub struct ObstacleExtension {
    pub psi: ScalarField,
    pub frame: TubularFrame,
    pub cutoff: QuinticCutoff,
    /// Finite-difference spacing for `ΔΨ`.
    pub step: f64,
}

/// Builds the extension of `psi` from segment `frame` with cutoff `width`.
///
/// `h` is the mesh size; finite differences use `h/4`. `samples` boundary
/// points are checked for `ψ ≥ 0`.
pub fn extend_obstacle(
    psi: &ScalarField,
    frame: &TubularFrame,
    width: f64,
    h: f64,
    samples: usize,
) -> Result<ObstacleExtension> {
    if !(width > 0.0) || width > frame.rho_max {
        return Err(Error::InvalidArgument(format!(
            "cutoff width {width} must lie in (0, {}]",
            frame.rho_max
        )));
    }
    for t in frame.sample_params(samples.max(2)) {
        let p = frame.point(t);
        let v = psi.eval(p)?;
        if v < 0.0 {
            return Err(Error::NegativeObstacle { point: p, value: v });
        }
    }
    Ok(ObstacleExtension { psi: psi.clone(), frame: frame.clone(), cutoff: QuinticCutoff { width }, step: h / 4.0 })
}

impl ObstacleExtension {
    fn coords(&self, x: Point) -> Option<(f64, f64)> {
        let guess = match self.frame.curve.kind {
            crate::geometry::CurveKind::Line { start, dir } => math::dot(math::sub(x, start), dir),
            _ => math::atan2(x[1], x[0]),
        };
        let t = self.frame.curve.project(x, guess);
        let s = math::dot(math::sub(x, self.frame.point(t)), self.frame.normal(t));
        if s.abs() >= self.frame.rho_max {
            return None;
        }
        let t = match self.frame.locate(t) {
            Some(t) => t,
            None => self.nearest_end(t),
        };
        Some((t, s))
    }

    fn nearest_end(&self, t: f64) -> f64 {
        let f = &self.frame;
        if f.curve.is_periodic() {
            let past_end = math::wrap_angle(t - f.t_end);
            let before_start = math::wrap_angle(f.t_start - t);
            if past_end <= before_start {
                f.t_end
            } else {
                f.t_start
            }
        } else {
            t.clamp(f.t_start, f.t_end)
        }
    }

    /// Boundary value `ψ(ξ(t))`.
    pub fn boundary_value(&self, t: f64) -> Result<f64> {
        self.psi.eval(self.frame.point(t))
    }

    pub fn value(&self, x: Point) -> Result<f64> {
        match self.coords(x) {
            None => Ok(0.0),
            Some((t, s)) => {
                let eta = self.cutoff.value(s);
                if eta == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.boundary_value(t)? * eta)
            }
        }
    }

    /// `∂_νΨ` at the boundary point `ξ(t)`, equal to `ψ(ξ) η'(0)`.
    pub fn normal_derivative(&self, t: f64) -> Result<f64> {
        Ok(self.boundary_value(t)? * self.cutoff.d1(0.0))
    }

    /// `ΔΨ(x)`: analytic for constant `ψ`, central differences otherwise.
    pub fn laplacian(&self, x: Point) -> Result<f64> {
        if let Some(c) = self.psi.as_constant() {
            return Ok(match self.coords(x) {
                None => 0.0,
                Some((t, s)) => {
                    let k = self.frame.offset_curvature(t, s);
                    c * (self.cutoff.d2(s) + k * self.cutoff.d1(s))
                }
            });
        }
        math::fd_laplacian(|p| self.value(p), x, self.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{tubular_frame, Component, DomainDescriptor, DomainKind, SegmentSpec};
    use crate::math::PI;
    use alloc::vec;

    fn flat_frame() -> TubularFrame {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let dd = DomainDescriptor::new(
            DomainKind::Polygon { vertices: sq },
            vec![
                SegmentSpec::arc("bottom", Component::Outer, -0.75 * PI, -0.25 * PI),
                SegmentSpec::arc("rest", Component::Outer, -0.25 * PI, 1.25 * PI),
            ],
        )
        .unwrap();
        tubular_frame(&dd, "bottom").unwrap()
    }

    #[test]
    fn cutoff_end_conditions() {
        let c = QuinticCutoff { width: 0.3 };
        assert_eq!(c.value(0.0), 1.0);
        assert_eq!(c.d1(0.0), 0.0);
        assert_eq!(c.d2(0.0), 0.0);
        assert_eq!(c.value(-0.3), 0.0);
        assert_eq!(c.d1(-0.3), 0.0);
        assert_eq!(c.d2(-0.3), 0.0);
        assert_eq!(c.value(-1.0), 0.0);
        // derivative formulas against differences of the value
        let h = 1e-5;
        for &s in &[-0.25, -0.15, -0.05] {
            assert!(((c.value(s + h) - c.value(s - h)) / (2.0 * h) - c.d1(s)).abs() < 1e-7);
            assert!(((c.d1(s + h) - c.d1(s - h)) / (2.0 * h) - c.d2(s)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_obstacle_extends_to_zero() {
        let f = flat_frame();
        let ext = extend_obstacle(&ScalarField::zero(), &f, 0.3, 0.1, 50).unwrap();
        for &p in &[[0.5, 0.0], [0.2, 0.1], [0.7, 0.29]] {
            assert_eq!(ext.value(p).unwrap(), 0.0);
            assert_eq!(ext.laplacian(p).unwrap(), 0.0);
        }
        assert_eq!(ext.normal_derivative(0.4).unwrap(), 0.0);
    }

    /// Quintic second derivative written out by hand from `6z⁵ - 15z⁴ + 10z³`.
    #[test]
    fn unit_obstacle_on_flat_side_has_eta_second_derivative() {
        let f = flat_frame();
        let w = 0.45;
        let unit = crate::fields::parse_field("1 + 0*x").unwrap();
        let ext = extend_obstacle(&unit, &f, w, 1e-3, 50).unwrap();
        for &y in &[0.05, 0.1, 0.2, 0.4] {
            let z: f64 = 1.0 - y / w;
            let eta2 = (120.0 * z * z * z - 180.0 * z * z + 60.0 * z) / (w * w);
            let x = [0.5, y];
            assert!((ext.value(x).unwrap() - QuinticCutoff { width: w }.value(-y)).abs() < 1e-15);
            assert!((ext.laplacian(x).unwrap() - eta2).abs() < 1e-4);
        }
        let ext_c = extend_obstacle(&ScalarField::constant(1.0), &f, w, 0.02, 50).unwrap();
        let z: f64 = 1.0 - 0.1 / w;
        let eta2 = (120.0 * z * z * z - 180.0 * z * z + 60.0 * z) / (w * w);
        assert!((ext_c.laplacian([0.5, 0.1]).unwrap() - eta2).abs() < 1e-12);
    }

    #[test]
    fn boundary_values_reproduce_obstacle() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let f = tubular_frame(&dd, "gamma0").unwrap();
        let psi = crate::fields::parse_field("0.1 + 0.05*cos(theta)").unwrap();
        let ext = extend_obstacle(&psi, &f, 0.5, 0.05, 64).unwrap();
        for t in f.sample_params(40) {
            let x = f.point(t);
            assert!((ext.value(x).unwrap() - psi.eval(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn curved_constant_laplacian_matches_differences() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let f = tubular_frame(&dd, "gamma0").unwrap();
        let ext = extend_obstacle(&ScalarField::constant(0.2), &f, 0.5, 0.05, 16).unwrap();
        for &r in &[1.1, 1.25, 1.4] {
            let x = [r * math::cos(0.3), r * math::sin(0.3)];
            let fd = math::fd_laplacian(|p| ext.value(p), x, 1e-3).unwrap();
            assert!((ext.laplacian(x).unwrap() - fd).abs() < 1e-4);
        }
    }

    #[test]
    fn negative_obstacle_rejected() {
        let f = flat_frame();
        let psi = crate::fields::parse_field("x - 0.5").unwrap();
        match extend_obstacle(&psi, &f, 0.2, 0.1, 11) {
            Err(Error::NegativeObstacle { point, value }) => {
                assert!(value < 0.0 && point[0] < 0.5);
            }
            other => panic!("{other:?}"),
        }
    }
}
