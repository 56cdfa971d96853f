use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::curve::{BoundaryCurve, CurveKind};
use super::domain::{Component, DomainDescriptor, DomainKind};
use crate::math::{self, TAU};
use crate::{Error, Point, Result};

/// Tubular coordinates `x = ξ(t) + s ν(ξ(t))` along one boundary segment.
///
/// `s < 0` points into the domain. The parameter `t` ranges over
/// `[t_start, t_end]` (an angle for circles and stars, arc length for lines).
#[derive(Clone, Debug, PartialEq)]
pub struct TubularFrame {
    pub tag: String,
    pub curve: BoundaryCurve,
    pub t_start: f64,
    pub t_end: f64,
    /// Maximal inner width for which the offset map is injective.
    pub rho_max: f64,
}

/// Builds the tubular frame of segment `tag`.
///
/// Polygon segments are accepted only when they lie within a single side
/// (a corner would break the C² requirement).
pub fn tubular_frame(dd: &DomainDescriptor, tag: &str) -> Result<TubularFrame> {
    let seg = &dd.segments[dd.segment_index(tag)?];
    let (a, b) = seg.range.unwrap_or((0.0, TAU));
    let (curve, t_start, t_end, inner_bound) = match &dd.kind {
        DomainKind::Ring { inner, outer } => {
            let (radius, left) = match seg.component {
                Component::Inner => (*inner, false),
                Component::Outer => (*outer, true),
            };
            let c = BoundaryCurve { kind: CurveKind::Circle { center: [0.0, 0.0], radius }, interior_left: left };
            (c, a, b, outer - inner)
        }
        DomainKind::Disk { radius } => {
            let c = BoundaryCurve {
                kind: CurveKind::Circle { center: [0.0, 0.0], radius: *radius },
                interior_left: true,
            };
            (c, a, b, *radius)
        }
        DomainKind::Star { mean, amplitude, lobes } => {
            let c = BoundaryCurve {
                kind: CurveKind::Star { mean: *mean, amplitude: *amplitude, lobes: *lobes as f64 },
                interior_left: true,
            };
            (c, a, b, mean - amplitude)
        }
        DomainKind::Polygon { vertices } => {
            let center = dd.center();
            let n = vertices.len();
            let angle = |p: Point| {
                let d = math::sub(p, center);
                math::atan2(d[1], d[0])
            };
            let inside = |theta: f64| seg.contains_angle(theta);
            // corners strictly inside the range break smoothness
            let strictly_inside = |theta: f64| {
                seg.range.is_none() || {
                    let w = math::wrap_angle(theta - a);
                    w > 1e-12 && w < (b - a) - 1e-12
                }
            };
            if vertices.iter().any(|v| strictly_inside(angle(*v))) {
                return Err(Error::NonSmoothSegment(format!("segment `{tag}` contains a polygon corner")));
            }
            let mid_angle = a + 0.5 * (b - a);
            let side = (0..n)
                .find(|&i| {
                    let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                    let ta = angle(p);
                    let span = math::wrap_angle(angle(q) - ta);
                    math::wrap_angle(mid_angle - ta) <= span && inside(mid_angle)
                })
                .ok_or_else(|| Error::NonSmoothSegment(format!("segment `{tag}` matches no polygon side")))?;
            let (p, q) = (vertices[side], vertices[(side + 1) % n]);
            let len = math::dist(p, q);
            let dir = math::scale(math::sub(q, p), 1.0 / len);
            let curve = BoundaryCurve { kind: CurveKind::Line { start: p, dir }, interior_left: true };
            // parameter range: arc-length positions of the angular limits along the side
            let at = |theta: f64| {
                let d = [math::cos(theta), math::sin(theta)];
                let r = dd.outer_radius(theta);
                math::dot(math::sub(math::add(center, math::scale(d, r)), p), dir)
            };
            let (ts, te) = if seg.range.is_none() { (0.0, len) } else { (at(a), at(b)) };
            let dist_center = math::cross(dir, math::sub(center, p)).abs();
            (curve, ts.max(0.0), te.min(len), dist_center)
        }
    };
    let mut frame = TubularFrame { tag: tag.to_string(), curve, t_start, t_end, rho_max: 0.0 };
    let sup_k = frame.sup_abs_curvature(2048);
    let curvature_bound = if sup_k > 0.0 { 1.0 / sup_k } else { f64::INFINITY };
    frame.rho_max = 0.99 * inner_bound.min(curvature_bound);
    Ok(frame)
}

impl TubularFrame {
    pub fn is_closed(&self) -> bool {
        self.curve.is_periodic() && (self.t_end - self.t_start - TAU).abs() < 1e-12
    }

    /// Uniformly spaced parameters over the segment (endpoints included).
    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        (0..n).map(|i| self.t_start + (self.t_end - self.t_start) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn sup_abs_curvature(&self, samples: usize) -> f64 {
        self.sample_params(samples).into_iter().map(|t| self.curve.curvature(t).abs()).fold(0.0, f64::max)
    }

    /// Normalises a parameter into the segment's range if it belongs to it.
    pub fn locate(&self, t: f64) -> Option<f64> {
        if self.curve.is_periodic() {
            let w = math::wrap_angle(t - self.t_start);
            if self.is_closed() || w <= self.t_end - self.t_start + 1e-12 {
                return Some(self.t_start + w);
            }
            // allow tiny negative excursions at the start of an open arc
            if TAU - w < 1e-12 {
                return Some(self.t_start);
            }
            None
        } else if t >= self.t_start - 1e-12 && t <= self.t_end + 1e-12 {
            Some(t.clamp(self.t_start, self.t_end))
        } else {
            None
        }
    }

    pub fn point(&self, t: f64) -> Point {
        self.curve.point(t)
    }

    pub fn normal(&self, t: f64) -> Point {
        self.curve.normal(t)
    }

    pub fn tangent(&self, t: f64) -> Point {
        self.curve.tangent(t)
    }

    /// Signed curvature of the boundary at `ξ(t)`; positive for convex.
    pub fn curvature(&self, t: f64) -> f64 {
        self.curve.curvature(t)
    }

    /// Curvature of the parallel curve at depth `s`: `κ / (1 + s κ)`.
    ///
    /// In two dimensions this is `(N - 1) H(ξ, s)`.
    pub fn offset_curvature(&self, t: f64, s: f64) -> f64 {
        let k = self.curvature(t);
        k / (1.0 + s * k)
    }

    pub fn to_xy(&self, t: f64, s: f64) -> Point {
        math::add(self.point(t), math::scale(self.normal(t), s))
    }

    /// Tubular coordinates `(t, s)` of `x`, with `t` normalised into the segment range.
    ///
    /// Fails if the foot point is not on the segment.
    pub fn from_xy(&self, x: Point) -> Result<(f64, f64)> {
        let guess = match self.curve.kind {
            CurveKind::Line { .. } => 0.0,
            _ => math::atan2(x[1], x[0]),
        };
        let t = self.curve.project(x, guess);
        let t = self.locate(t).ok_or_else(|| {
            Error::OutOfRegion(format!("({}, {}) projects outside segment `{}`", x[0], x[1], self.tag))
        })?;
        let s = math::dot(math::sub(x, self.point(t)), self.normal(t));
        Ok((t, s))
    }

    /// Like [`Self::from_xy`], but a foot point past a segment end is moved to that end.
    ///
    /// Meshes do not place nodes at segment ends, so the nodes of a tagged
    /// segment can overshoot its range by up to one edge.
    pub fn from_xy_clamped(&self, x: Point) -> (f64, f64) {
        let guess = match self.curve.kind {
            CurveKind::Line { .. } => 0.0,
            _ => math::atan2(x[1], x[0]),
        };
        let raw = self.curve.project(x, guess);
        let t = self.locate(raw).unwrap_or_else(|| {
            if self.curve.is_periodic() {
                let past_end = math::wrap_angle(raw - self.t_end);
                let before_start = math::wrap_angle(self.t_start - raw);
                if past_end <= before_start { self.t_end } else { self.t_start }
            } else {
                raw.clamp(self.t_start, self.t_end)
            }
        });
        (t, math::dot(math::sub(x, self.point(t)), self.normal(t)))
    }

    /// Arc length between two segment parameters.
    pub fn arc_length(&self, a: f64, b: f64) -> f64 {
        if a <= b {
            self.curve.arc_length(a, b)
        } else {
            self.curve.arc_length(b, a)
        }
    }

    pub fn length(&self) -> f64 {
        self.arc_length(self.t_start, self.t_end)
    }
}
