use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::math::{self, PI, TAU};
use crate::{Error, Point, Result};

/// Shape of the computational domain.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum DomainKind {
    /// Annulus `inner < |x| < outer` centred at the origin.
    Ring { inner: f64, outer: f64 },
    /// Disk `|x| < radius` centred at the origin.
    Disk { radius: f64 },
    /// Simple polygon, star-shaped with respect to its vertex centroid.
    Polygon { vertices: Vec<Point> },
    /// Smooth star `r(θ) = mean + amplitude·cos(lobes·θ)` with `mean > amplitude > 0`.
    Star { mean: f64, amplitude: f64, lobes: u32 },
}

/// Boundary component a segment lives on. Only rings have an inner component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Component {
    Outer,
    Inner,
}

/// A named piece of the boundary: an angular range `[start, end]` about the
/// domain centre on one component, or the whole component when `range` is `None`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentSpec {
    pub name: String,
    pub component: Component,
    pub range: Option<(f64, f64)>,
}

impl SegmentSpec {
    pub fn full(name: &str, component: Component) -> Self {
        SegmentSpec { name: name.to_string(), component, range: None }
    }

    pub fn arc(name: &str, component: Component, start: f64, end: f64) -> Self {
        SegmentSpec { name: name.to_string(), component, range: Some((start, end)) }
    }

    /// Whether the polar angle `theta` falls inside the range.
    pub fn contains_angle(&self, theta: f64) -> bool {
        match self.range {
            None => true,
            Some((a, b)) => math::wrap_angle(theta - a) <= b - a,
        }
    }

    pub fn angular_length(&self) -> f64 {
        self.range.map_or(TAU, |(a, b)| b - a)
    }
}

/// Domain geometry plus a tagging of its boundary into named segments.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainDescriptor {
    pub kind: DomainKind,
    pub segments: Vec<SegmentSpec>,
}

impl DomainDescriptor {
    /// Validates the shape and checks that the segments tile every boundary component.
    pub fn new(kind: DomainKind, segments: Vec<SegmentSpec>) -> Result<Self> {
        let mut kind = kind;
        match &mut kind {
            DomainKind::Ring { inner, outer } => {
                if !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    return Err(Error::InvalidDomain(format!(
                        "ring requires 0 < R0 < R1, got R0 = {inner}, R1 = {outer}"
                    )));
                }
            }
            DomainKind::Disk { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidDomain(format!("disk radius must be positive, got {radius}")));
                }
            }
            DomainKind::Star { mean, amplitude, lobes } => {
                if !(*amplitude > 0.0 && mean > amplitude && mean.is_finite()) || *lobes == 0 {
                    return Err(Error::InvalidDomain(format!(
                        "star requires mean > amplitude > 0 and lobes >= 1, got {mean}, {amplitude}, {lobes}"
                    )));
                }
            }
            DomainKind::Polygon { vertices } => validate_polygon(vertices)?,
        }
        let dd = DomainDescriptor { kind, segments };
        dd.validate_segments()?;
        Ok(dd)
    }

    /// Ring with the inner circle tagged `gamma0` and the outer circle `gamma1`.
    pub fn ring(inner: f64, outer: f64) -> Result<Self> {
        Self::new(
            DomainKind::Ring { inner, outer },
            alloc::vec![
                SegmentSpec::full("gamma0", Component::Inner),
                SegmentSpec::full("gamma1", Component::Outer),
            ],
        )
    }

    /// Disk with a single `boundary` segment.
    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(DomainKind::Disk { radius }, alloc::vec![SegmentSpec::full("boundary", Component::Outer)])
    }

    /// Polygon with a single `boundary` segment.
    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Self::new(DomainKind::Polygon { vertices }, alloc::vec![SegmentSpec::full("boundary", Component::Outer)])
    }

    pub fn star(mean: f64, amplitude: f64, lobes: u32) -> Result<Self> {
        Self::new(
            DomainKind::Star { mean, amplitude, lobes },
            alloc::vec![SegmentSpec::full("boundary", Component::Outer)],
        )
    }

    fn validate_segments(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidDomain("no boundary segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if self.segments[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::InvalidDomain(format!("duplicate segment tag `{}`", s.name)));
            }
            if s.component == Component::Inner && !matches!(self.kind, DomainKind::Ring { .. }) {
                return Err(Error::InvalidDomain(format!(
                    "segment `{}` is on the inner component, which only rings have",
                    s.name
                )));
            }
            if let Some((a, b)) = s.range {
                if !(a.is_finite() && b.is_finite() && b > a && b - a <= TAU + 1e-12) {
                    return Err(Error::InvalidDomain(format!(
                        "segment `{}` has an invalid angular range [{a}, {b}]",
                        s.name
                    )));
                }
            }
        }
        let components: &[Component] = match self.kind {
            DomainKind::Ring { .. } => &[Component::Inner, Component::Outer],
            _ => &[Component::Outer],
        };
        for &c in components {
            let segs: Vec<&SegmentSpec> = self.segments.iter().filter(|s| s.component == c).collect();
            if segs.is_empty() {
                return Err(Error::InvalidDomain(format!("boundary component {c:?} has no segment")));
            }
            if segs.iter().any(|s| s.range.is_none()) {
                if segs.len() > 1 {
                    return Err(Error::InvalidDomain(format!(
                        "component {c:?}: a full-component segment must be the only one"
                    )));
                }
                continue;
            }
            let mut ranges: Vec<(f64, f64)> = segs
                .iter()
                .map(|s| {
                    let (a, b) = s.range.unwrap();
                    let a0 = math::wrap_angle(a);
                    (a0, a0 + (b - a))
                })
                .collect();
            ranges.sort_by(|x, y| x.0.total_cmp(&y.0));
            let total: f64 = ranges.iter().map(|r| r.1 - r.0).sum();
            if (total - TAU).abs() > 1e-9 {
                return Err(Error::InvalidDomain(format!(
                    "component {c:?}: segments cover {total} radians instead of 2π (overlap or gap)"
                )));
            }
            for w in 0..ranges.len() {
                let end = ranges[w].1;
                let next = if w + 1 < ranges.len() { ranges[w + 1].0 } else { ranges[0].0 + TAU };
                if (end - next).abs() > 1e-9 {
                    return Err(Error::InvalidDomain(format!(
                        "component {c:?}: segments are not contiguous near angle {end}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn segment_index(&self, name: &str) -> Result<usize> {
        self.segments
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSegment(name.to_string()))
    }

    pub fn tag_names(&self) -> Vec<String> {
        self.segments.iter().map(|s| s.name.clone()).collect()
    }

    /// Centre used for angular segment ranges and polar meshing.
    pub fn center(&self) -> Point {
        match &self.kind {
            DomainKind::Polygon { vertices } => polygon_centroid(vertices),
            _ => [0.0, 0.0],
        }
    }

    /// `V - E + F` of the continuous domain.
    pub fn euler_characteristic(&self) -> i64 {
        match self.kind {
            DomainKind::Ring { .. } => 0,
            _ => 1,
        }
    }

    /// Exact area of the continuous domain.
    pub fn area(&self) -> f64 {
        match &self.kind {
            DomainKind::Ring { inner, outer } => PI * (outer * outer - inner * inner),
            DomainKind::Disk { radius } => PI * radius * radius,
            DomainKind::Star { mean, amplitude, .. } => PI * (mean * mean + 0.5 * amplitude * amplitude),
            DomainKind::Polygon { vertices } => polygon_area(vertices),
        }
    }

    /// Boundary radius of the outer component at polar angle `theta` about [`Self::center`].
    pub fn outer_radius(&self, theta: f64) -> f64 {
        match &self.kind {
            DomainKind::Ring { outer, .. } => *outer,
            DomainKind::Disk { radius } => *radius,
            DomainKind::Star { mean, amplitude, lobes } => mean + amplitude * math::cos(*lobes as f64 * theta),
            DomainKind::Polygon { vertices } => {
                let c = polygon_centroid(vertices);
                let d = [math::cos(theta), math::sin(theta)];
                let n = vertices.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let a = math::sub(vertices[i], c);
                    let b = math::sub(vertices[(i + 1) % n], c);
                    let e = math::sub(b, a);
                    let den = math::cross(d, e);
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let t = math::cross(a, e) / den;
                    let u = math::cross(a, d) / den;
                    if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                        best = best.min(t);
                    }
                }
                best
            }
        }
    }

    /// Whether `x` lies in the open domain.
    pub fn contains(&self, x: Point) -> bool {
        let c = self.center();
        let d = math::sub(x, c);
        let r = math::norm(d);
        match &self.kind {
            DomainKind::Ring { inner, outer } => r > *inner && r < *outer,
            DomainKind::Disk { radius } => r < *radius,
            _ => r < self.outer_radius(math::atan2(d[1], d[0])),
        }
    }

    /// Segment index owning the boundary point `x` (classified by component and angle).
    pub fn classify(&self, x: Point) -> Option<usize> {
        let c = self.center();
        let d = math::sub(x, c);
        let theta = math::atan2(d[1], d[0]);
        let component = match self.kind {
            DomainKind::Ring { inner, outer } => {
                if math::norm(d) < 0.5 * (inner + outer) {
                    Component::Inner
                } else {
                    Component::Outer
                }
            }
            _ => Component::Outer,
        };
        self.segments.iter().position(|s| s.component == component && s.contains_angle(theta))
    }
}

fn polygon_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| math::cross(v[i], v[(i + 1) % n])).sum::<f64>() * 0.5
}

fn polygon_centroid(v: &[Point]) -> Point {
    let n = v.len() as f64;
    let s = v.iter().fold([0.0, 0.0], |acc, p| math::add(acc, *p));
    math::scale(s, 1.0 / n)
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = math::cross(math::sub(p2, p1), math::sub(q1, p1));
    let d2 = math::cross(math::sub(p2, p1), math::sub(q2, p1));
    let d3 = math::cross(math::sub(q2, q1), math::sub(p1, q1));
    let d4 = math::cross(math::sub(q2, q1), math::sub(p2, q1));
    ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

fn validate_polygon(v: &mut [Point]) -> Result<()> {
    let n = v.len();
    if n < 3 {
        return Err(Error::InvalidDomain(format!("polygon needs at least 3 vertices, got {n}")));
    }
    if v.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::InvalidDomain("polygon vertex is not finite".into()));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (j + 1) % n == i || i + 1 == j {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(Error::InvalidDomain(format!(
                    "polygon is self-intersecting (edges {i} and {j})"
                )));
            }
        }
    }
    let area = polygon_area(v);
    if area.abs() < 1e-14 {
        return Err(Error::InvalidDomain("polygon has zero area".into()));
    }
    if area < 0.0 {
        v.reverse();
    }
    let c = polygon_centroid(v);
    for i in 0..n {
        if math::signed_area(c, v[i], v[(i + 1) % n]) <= 1e-14 {
            return Err(Error::InvalidDomain(
                "polygon must be star-shaped with respect to its vertex centroid".into(),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_requires_ordered_radii() {
        assert!(matches!(DomainDescriptor::ring(2.0, 1.0), Err(Error::InvalidDomain(_))));
        assert!(matches!(DomainDescriptor::ring(1.0, 1.0), Err(Error::InvalidDomain(_))));
        assert!(DomainDescriptor::ring(1.0, 2.0).is_ok());
    }

    #[test]
    fn self_intersecting_polygon_rejected() {
        let bowtie = alloc::vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        let err = DomainDescriptor::polygon(bowtie).unwrap_err();
        assert!(format!("{err}").contains("self-intersecting"));
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let cw = alloc::vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let dd = DomainDescriptor::polygon(cw).unwrap();
        assert!((dd.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn segments_must_tile_the_boundary() {
        let kind = DomainKind::Disk { radius: 1.0 };
        let gap = alloc::vec![
            SegmentSpec::arc("a", Component::Outer, 0.0, 1.0),
            SegmentSpec::arc("b", Component::Outer, 1.5, TAU),
        ];
        assert!(DomainDescriptor::new(kind.clone(), gap).is_err());
        let overlap = alloc::vec![
            SegmentSpec::arc("a", Component::Outer, -1.0, 1.0),
            SegmentSpec::arc("b", Component::Outer, 0.5, TAU - 1.0),
        ];
        assert!(DomainDescriptor::new(kind.clone(), overlap).is_err());
        let ok = alloc::vec![
            SegmentSpec::arc("a", Component::Outer, -1.0, 1.0),
            SegmentSpec::arc("b", Component::Outer, 1.0, TAU - 1.0),
        ];
        let dd = DomainDescriptor::new(kind, ok).unwrap();
        assert_eq!(dd.classify([1.0, 0.0]), Some(0));
        assert_eq!(dd.classify([-1.0, 0.0]), Some(1));
    }

    #[test]
    fn inner_component_only_on_rings() {
        let segs = alloc::vec![SegmentSpec::full("x", Component::Inner), SegmentSpec::full("y", Component::Outer)];
        assert!(DomainDescriptor::new(DomainKind::Disk { radius: 1.0 }, segs).is_err());
    }

    #[test]
    fn polygon_radial_function() {
        let sq = DomainDescriptor::polygon(alloc::vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!((sq.outer_radius(0.0) - 0.5).abs() < 1e-14);
        assert!((sq.outer_radius(PI / 4.0) - 0.5 * math::sqrt(2.0)).abs() < 1e-12);
        assert!(sq.contains([0.9, 0.9]));
        assert!(!sq.contains([1.1, 0.5]));
    }
}
