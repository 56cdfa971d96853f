use crate::math;
use crate::Point;

/// Analytic parametrisations of smooth boundary pieces.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveKind {
    /// `center + radius (cos t, sin t)`.
    Circle { center: Point, radius: f64 },
    /// `r(t) (cos t, sin t)` with `r(t) = mean + amplitude cos(lobes t)`.
    Star { mean: f64, amplitude: f64, lobes: f64 },
    /// `start + t dir` with `dir` a unit vector.
    Line { start: Point, dir: Point },
}

/// A parametrised curve together with the side the domain lies on.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve {
    pub kind: CurveKind,
    /// The domain lies to the left of the direction of increasing parameter.
    pub interior_left: bool,
}

impl BoundaryCurve {
    pub fn point(&self, t: f64) -> Point {
        match self.kind {
            CurveKind::Circle { center, radius } => {
                [center[0] + radius * math::cos(t), center[1] + radius * math::sin(t)]
            }
            CurveKind::Star { mean, amplitude, lobes } => {
                let r = mean + amplitude * math::cos(lobes * t);
                [r * math::cos(t), r * math::sin(t)]
            }
            CurveKind::Line { start, dir } => math::add(start, math::scale(dir, t)),
        }
    }

    /// First and second parameter derivatives.
    pub fn derivatives(&self, t: f64) -> (Point, Point) {
        match self.kind {
            CurveKind::Circle { radius, .. } => {
                let (s, c) = (math::sin(t), math::cos(t));
                ([-radius * s, radius * c], [-radius * c, -radius * s])
            }
            CurveKind::Star { mean, amplitude, lobes } => {
                let (s, c) = (math::sin(t), math::cos(t));
                let r = mean + amplitude * math::cos(lobes * t);
                let r1 = -amplitude * lobes * math::sin(lobes * t);
                let r2 = -amplitude * lobes * lobes * math::cos(lobes * t);
                let d1 = [r1 * c - r * s, r1 * s + r * c];
                let d2 = [r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s];
                (d1, d2)
            }
            CurveKind::Line { dir, .. } => (dir, [0.0, 0.0]),
        }
    }

    pub fn speed(&self, t: f64) -> f64 {
        math::norm(self.derivatives(t).0)
    }

    pub fn tangent(&self, t: f64) -> Point {
        let d = self.derivatives(t).0;
        math::scale(d, 1.0 / math::norm(d))
    }

    /// Outward unit normal.
    pub fn normal(&self, t: f64) -> Point {
        let tg = self.tangent(t);
        if self.interior_left {
            [tg[1], -tg[0]]
        } else {
            [-tg[1], tg[0]]
        }
    }

    /// Signed curvature, positive where the boundary is convex seen from inside.
    pub fn curvature(&self, t: f64) -> f64 {
        let (d1, d2) = self.derivatives(t);
        let sp = math::norm(d1);
        let k = math::cross(d1, d2) / (sp * sp * sp);
        if self.interior_left {
            k
        } else {
            -k
        }
    }

    /// Arc length between parameters `a <= b`.
    pub fn arc_length(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            CurveKind::Circle { radius, .. } => radius * (b - a),
            CurveKind::Line { .. } => b - a,
            CurveKind::Star { lobes, .. } => {
                let panels = (libm::ceil((b - a).abs() * lobes * 4.0) as usize).max(1);
                math::integrate(|t| self.speed(t), a, b, panels)
            }
        }
    }

    /// Whether the parameter is an angle (periodic with period 2π).
    pub fn is_periodic(&self) -> bool {
        !matches!(self.kind, CurveKind::Line { .. })
    }

    /// Parameter of the closest curve point near the initial guess `t0`.
    pub fn project(&self, x: Point, t0: f64) -> f64 {
        match self.kind {
            CurveKind::Circle { center, .. } => {
                let d = math::sub(x, center);
                math::atan2(d[1], d[0])
            }
            CurveKind::Line { start, dir } => math::dot(math::sub(x, start), dir),
            CurveKind::Star { .. } => {
                let mut t = t0;
                for _ in 0..60 {
                    let p = self.point(t);
                    let (d1, d2) = self.derivatives(t);
                    let diff = math::sub(p, x);
                    let g = math::dot(diff, d1);
                    let gp = math::dot(d1, d1) + math::dot(diff, d2);
                    let step = if gp > 0.0 { g / gp } else { g / math::dot(d1, d1) };
                    t -= step;
                    if step.abs() < 1e-15 {
                        break;
                    }
                }
                t
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_curvature_sign() {
        let outer = BoundaryCurve { kind: CurveKind::Circle { center: [0.0, 0.0], radius: 2.0 }, interior_left: true };
        let hole = BoundaryCurve { kind: CurveKind::Circle { center: [0.0, 0.0], radius: 2.0 }, interior_left: false };
        assert!((outer.curvature(0.3) - 0.5).abs() < 1e-15);
        assert!((hole.curvature(0.3) + 0.5).abs() < 1e-15);
        let n = outer.normal(0.0);
        assert!((n[0] - 1.0).abs() < 1e-15);
        let n = hole.normal(0.0);
        assert!((n[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn star_derivatives_match_differences() {
        let c = BoundaryCurve { kind: CurveKind::Star { mean: 1.0, amplitude: 0.2, lobes: 5.0 }, interior_left: true };
        let h = 1e-5;
        for &t in &[0.0, 0.4, 1.3, 2.9] {
            let (d1, d2) = c.derivatives(t);
            let pp = c.point(t + h);
            let pm = c.point(t - h);
            let p0 = c.point(t);
            for k in 0..2 {
                assert!(((pp[k] - pm[k]) / (2.0 * h) - d1[k]).abs() < 1e-8);
                assert!(((pp[k] - 2.0 * p0[k] + pm[k]) / (h * h) - d2[k]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn star_projection_recovers_parameter() {
        let c = BoundaryCurve { kind: CurveKind::Star { mean: 1.0, amplitude: 0.1, lobes: 5.0 }, interior_left: true };
        for &t in &[0.1, 0.6, 2.0] {
            let x = math::add(c.point(t), math::scale(c.normal(t), -0.05));
            let tp = c.project(x, math::atan2(x[1], x[0]));
            assert!((tp - t).abs() < 1e-12);
        }
    }
}
