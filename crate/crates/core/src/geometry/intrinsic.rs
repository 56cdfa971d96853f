use alloc::format;
use alloc::vec::Vec;

use super::curve::CurveKind;
use super::mesh::TriMesh;
use super::tubular::TubularFrame;
use crate::math::{self, PI, TAU};
use crate::{Error, Point, Result};

/// Collar region `D = {x = ξ + sν : tau_min ≤ d̃₀(x) ≤ radius, -depth ≤ s ≤ 0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntrinsicRegion {
    /// Lower cutoff on `d̃₀`; must be positive so that `x₀ ∉ D`.
    pub tau_min: f64,
    pub radius: f64,
    pub depth: f64,
    /// Samples per direction when estimating `c_d`, `C_d` and `c_Δ`.
    pub samples: usize,
}

/// Intrinsic boundary distance to a base point and its collar extension.
#[derive(Clone, Debug)]
pub struct IntrinsicMetric {
    pub frame: TubularFrame,
    pub x0: Point,
    pub t0: f64,
    /// Segment nodes in chain order with their polyline distance to `x₀`.
    pub nodes: Vec<(usize, f64)>,
    pub region: IntrinsicRegion,
    pub c_d: f64,
    pub big_c_d: f64,
    pub c_delta: f64,
    /// Largest finite-difference Laplacian seen before the safety factor.
    pub max_laplacian: f64,
}

const LAPLACIAN_SAFETY: f64 = 1.1;
const SAMPLING_MARGIN: f64 = 0.01;

/// Builds the intrinsic metric of `frame` based at the boundary point `x0`.
///
/// `d₀` at mesh nodes is accumulated along the boundary polyline of the
/// frame's segment; the smooth evaluator uses the exact arc length of the
/// parametrised curve.
pub fn intrinsic_distance(
    frame: &TubularFrame,
    x0: Point,
    mesh: &TriMesh,
    region: IntrinsicRegion,
) -> Result<IntrinsicMetric> {
    let (t0, s0) = frame.from_xy(x0)?;
    if s0.abs() > 1e-8 * (1.0 + math::norm(x0)) {
        return Err(Error::OutOfRegion(format!(
            "base point ({}, {}) is not on segment `{}` (offset {s0})",
            x0[0], x0[1], frame.tag
        )));
    }
    if !(region.tau_min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "region must exclude the base point (tau_min = {})",
            region.tau_min
        )));
    }
    if !(region.radius > region.tau_min) || !(region.depth > 0.0) || region.samples < 2 {
        return Err(Error::InvalidArgument("empty intrinsic region".into()));
    }
    if region.depth >= frame.rho_max {
        return Err(Error::InvalidArgument(format!(
            "region depth {} exceeds the tubular width {}",
            region.depth, frame.rho_max
        )));
    }
    let x0 = frame.point(t0);
    let nodes = polyline_distances(frame, x0, mesh)?;
    let mut metric = IntrinsicMetric {
        frame: frame.clone(),
        x0,
        t0,
        nodes,
        region,
        c_d: 0.0,
        big_c_d: 0.0,
        c_delta: 0.0,
        max_laplacian: 0.0,
    };
    metric.estimate_constants(mesh.h())?;
    Ok(metric)
}

fn polyline_distances(frame: &TubularFrame, x0: Point, mesh: &TriMesh) -> Result<Vec<(usize, f64)>> {
    let tag = mesh.tag_index(&frame.tag)?;
    let pts = mesh.nodes();
    // chain and edge closest to x0
    let mut best: Option<(f64, usize, usize, f64)> = None;
    let chains = mesh.segment_chains(tag);
    for (ci, chain) in chains.iter().enumerate() {
        for k in 0..chain.len() - 1 {
            let (a, b) = (pts[chain[k]], pts[chain[k + 1]]);
            let ab = math::sub(b, a);
            let lam = (math::dot(math::sub(x0, a), ab) / math::dot(ab, ab)).clamp(0.0, 1.0);
            let d = math::dist(x0, math::add(a, math::scale(ab, lam)));
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, ci, k, lam));
            }
        }
    }
    let (_, ci, k, lam) = best.ok_or_else(|| Error::InvalidMesh(format!("segment `{}` has no edges", frame.tag)))?;
    let chain = &chains[ci];
    let mut arc = Vec::with_capacity(chain.len());
    let mut acc = 0.0;
    arc.push(0.0);
    for w in chain.windows(2) {
        acc += math::dist(pts[w[0]], pts[w[1]]);
        arc.push(acc);
    }
    let total = acc;
    let closed = chain.first() == chain.last();
    let base = arc[k] + lam * (arc[k + 1] - arc[k]);
    let n = if closed { chain.len() - 1 } else { chain.len() };
    Ok((0..n)
        .map(|i| {
            let d = (arc[i] - base).abs();
            (chain[i], if closed { d.min(total - d) } else { d })
        })
        .collect())
}

impl IntrinsicMetric {
    /// Polyline distance at a mesh node of the segment.
    pub fn node_d0(&self, node: usize) -> Option<f64> {
        self.nodes.iter().find(|(n, _)| *n == node).map(|&(_, d)| d)
    }

    /// Parameter `t` unwrapped to the branch nearest to `t₀`.
    fn unwrap(&self, t: f64) -> f64 {
        if self.frame.curve.is_periodic() {
            let mut d = math::wrap_angle(t - self.t0);
            if d > PI {
                d -= TAU;
            }
            self.t0 + d
        } else {
            t
        }
    }

    /// Signed arc length from `x₀` to `ξ(t)` along the shortest direction.
    pub fn signed_d0(&self, t: f64) -> f64 {
        let t = self.unwrap(t);
        let a = if t >= self.t0 { self.frame.curve.arc_length(self.t0, t) } else { -self.frame.curve.arc_length(t, self.t0) };
        if self.frame.is_closed() && !matches!(self.frame.curve.kind, CurveKind::Circle { .. }) {
            let total = self.frame.curve.arc_length(0.0, TAU);
            if a > 0.5 * total {
                return a - total;
            }
            if a < -0.5 * total {
                return a + total;
            }
        }
        a
    }

    /// Smooth `d₀(ξ(t))`.
    pub fn d0(&self, t: f64) -> f64 {
        self.signed_d0(t).abs()
    }

    /// `d̃₀(ξ, s) = sqrt(s² + d₀(ξ)²)`.
    pub fn d_tilde_ts(&self, t: f64, s: f64) -> f64 {
        math::hypot(s, self.d0(t))
    }

    /// `d̃₀` at a Cartesian point of the two-sided tube.
    pub fn d_tilde(&self, x: Point) -> Result<f64> {
        let (t, s) = self.coords(x)?;
        Ok(self.d_tilde_ts(t, s))
    }

    /// Tubular coordinates without restricting `t` to the segment (for stencils near its ends).
    pub fn coords(&self, x: Point) -> Result<(f64, f64)> {
        let guess = match self.frame.curve.kind {
            CurveKind::Line { .. } => self.t0,
            _ => math::atan2(x[1], x[0]),
        };
        let t = self.frame.curve.project(x, guess);
        let s = math::dot(math::sub(x, self.frame.point(t)), self.frame.normal(t));
        if s.abs() >= self.frame.rho_max {
            return Err(Error::OutOfRegion(format!("({}, {}) lies outside the tubular neighbourhood", x[0], x[1])));
        }
        Ok((t, s))
    }

    /// Analytic gradient of `d̃₀` in Cartesian components.
    pub fn gradient(&self, x: Point) -> Result<Point> {
        let (t, s) = self.coords(x)?;
        let sd = self.signed_d0(t);
        let dt = math::hypot(s, sd);
        if dt == 0.0 {
            return Err(Error::OutOfRegion("d̃₀ is not differentiable at the base point".into()));
        }
        let stretch = 1.0 + s * self.frame.curvature(t);
        let tangential = sd / (dt * stretch);
        let normal = s / dt;
        Ok(math::add(math::scale(self.frame.tangent(t), tangential), math::scale(self.frame.normal(t), normal)))
    }

    /// Central-difference Laplacian of `d̃₀` with spacing `step`.
    pub fn laplacian_fd(&self, x: Point, step: f64) -> Result<f64> {
        math::fd_laplacian(|p| self.d_tilde(p), x, step)
    }

    /// Whether `(t, s)` lies in the region `D`.
    pub fn in_region(&self, t: f64, s: f64) -> bool {
        let r = &self.region;
        if s > 0.0 || s < -r.depth || self.frame.locate(t).is_none() {
            return false;
        }
        let d = self.d_tilde_ts(t, s);
        d >= r.tau_min && d <= r.radius
    }

    /// Sample points `(t, s)` of `D` on a tensor grid of `n × n` parameters.
    pub fn region_samples(&self, n: usize) -> Vec<(f64, f64)> {
        let (ta, tb) = self.param_window();
        let mut out = Vec::new();
        for i in 0..n {
            let t = ta + (tb - ta) * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let s = -self.region.depth * j as f64 / (n - 1) as f64;
                if self.in_region(t, s) {
                    out.push((t, s));
                }
            }
        }
        out
    }

    /// Parameter window around `t₀` containing the boundary trace of `D`.
    pub fn param_window(&self) -> (f64, f64) {
        let sp_min = self
            .frame
            .sample_params(512)
            .into_iter()
            .map(|t| self.frame.curve.speed(t))
            .fold(f64::INFINITY, f64::min);
        let half = (self.region.radius / sp_min) * 1.05;
        let half = if self.frame.curve.is_periodic() { half.min(PI) } else { half };
        let (mut a, mut b) = (self.t0 - half, self.t0 + half);
        if !self.frame.is_closed() {
            let lo = self.unwrap_start();
            let hi = lo + (self.frame.t_end - self.frame.t_start);
            a = a.max(lo);
            b = b.min(hi);
        }
        (a, b)
    }

    fn unwrap_start(&self) -> f64 {
        if self.frame.curve.is_periodic() {
            self.t0 - math::wrap_angle(self.t0 - self.frame.t_start)
        } else {
            self.frame.t_start
        }
    }

    fn estimate_constants(&mut self, h: f64) -> Result<()> {
        let n = self.region.samples;
        let pts = self.region_samples(n);
        if pts.is_empty() {
            return Err(Error::InvalidArgument("intrinsic region contains no sample points".into()));
        }
        let mut m = f64::INFINITY;
        let mut big_m: f64 = 0.0;
        let mut l = f64::INFINITY;
        let mut big_l: f64 = 0.0;
        let mut lap: f64 = f64::NEG_INFINITY;
        let step = h / 4.0;
        for &(t, s) in &pts {
            let x = self.frame.to_xy(t, s);
            let d = self.d_tilde_ts(t, s);
            let r = math::dist(x, self.x0);
            m = m.min(d);
            big_m = big_m.max(d);
            l = l.min(r);
            big_l = big_l.max(r);
            lap = lap.max(self.laplacian_fd(x, step)?);
        }
        // the extreme values of d̃₀ over D are attained on its level sets
        m = m.min(self.region.tau_min);
        big_m = big_m.max(self.region.radius);
        self.c_d = m / (big_l * (1.0 + SAMPLING_MARGIN));
        self.big_c_d = big_m / (l * (1.0 - SAMPLING_MARGIN));
        self.max_laplacian = lap;
        self.c_delta = LAPLACIAN_SAFETY * lap.max(0.0);
        if !(self.c_delta > 0.0) {
            return Err(Error::InvalidArgument("Laplacian bound c_Δ is not positive on the region".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, tubular_frame, Component, DomainDescriptor, DomainKind, SegmentSpec};
    use alloc::vec;

    fn disk(r: f64) -> DomainDescriptor {
        DomainDescriptor::new(
            DomainKind::Disk { radius: r },
            vec![
                SegmentSpec::arc("arc", Component::Outer, -PI / 2.0, PI / 2.0),
                SegmentSpec::arc("rest", Component::Outer, PI / 2.0, 1.5 * PI),
            ],
        )
        .unwrap()
    }

    fn region() -> IntrinsicRegion {
        IntrinsicRegion { tau_min: 0.1, radius: 0.8, depth: 0.3, samples: 40 }
    }

    #[test]
    fn circle_arc_length_quarter_pi() {
        let dd = disk(2.0);
        let mesh = build_mesh(&dd, 32).unwrap();
        let f = tubular_frame(&dd, "arc").unwrap();
        let m = intrinsic_distance(&f, [2.0, 0.0], &mesh, region()).unwrap();
        assert!((m.d0(PI / 4.0) - PI / 2.0).abs() < 1e-14);
        assert!((m.d0(-PI / 4.0) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn pythagorean_extension() {
        let dd = disk(2.0);
        let mesh = build_mesh(&dd, 16).unwrap();
        let f = tubular_frame(&dd, "arc").unwrap();
        let m = intrinsic_distance(&f, [2.0, 0.0], &mesh, region()).unwrap();
        // d₀ = 3 at t = 1.5 on a circle of radius 2
        assert!((m.d_tilde_ts(1.5, -4.0) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn polyline_distance_close_to_arc() {
        let dd = disk(1.0);
        let mesh = build_mesh(&dd, 64).unwrap();
        let f = tubular_frame(&dd, "arc").unwrap();
        let m = intrinsic_distance(&f, [1.0, 0.0], &mesh, region()).unwrap();
        let h = mesh.h();
        for &(node, d) in &m.nodes {
            let p = mesh.nodes()[node];
            let exact = math::atan2(p[1], p[0]).abs();
            assert!(d <= exact + 1e-12);
            assert!(exact - d <= h);
        }
        assert_eq!(m.node_d0(m.nodes.iter().find(|(_, d)| *d == 0.0).unwrap().0), Some(0.0));
    }

    #[test]
    fn rejects_base_point_inside_region() {
        let dd = disk(1.0);
        let mesh = build_mesh(&dd, 16).unwrap();
        let f = tubular_frame(&dd, "arc").unwrap();
        let mut r = region();
        r.tau_min = 0.0;
        assert!(intrinsic_distance(&f, [1.0, 0.0], &mesh, r).is_err());
        assert!(intrinsic_distance(&f, [0.5, 0.0], &mesh, region()).is_err());
        assert!(intrinsic_distance(&f, [-1.0, 0.0], &mesh, region()).is_err());
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let dd = disk(1.0);
        let mesh = build_mesh(&dd, 32).unwrap();
        let f = tubular_frame(&dd, "arc").unwrap();
        let m = intrinsic_distance(&f, [1.0, 0.0], &mesh, region()).unwrap();
        for &(t, s) in &[(0.3, -0.1), (-0.5, -0.2), (0.2, 0.0)] {
            let x = f.to_xy(t, s);
            let g = m.gradient(x).unwrap();
            let gf = math::fd_gradient(|p| m.d_tilde(p), x, 1e-6).unwrap();
            assert!(math::dist(g, gf) < 1e-7, "{g:?} vs {gf:?}");
        }
    }

    #[test]
    fn bounds_hold_on_region_samples() {
        let dd = disk(1.0);
        let mesh = build_mesh(&dd, 32).unwrap();
        let f = tubular_frame(&dd, "arc").unwrap();
        let m = intrinsic_distance(&f, [1.0, 0.0], &mesh, region()).unwrap();
        assert!(m.c_d > 0.0 && m.c_d <= m.big_c_d);
        for (t, s) in m.region_samples(97) {
            let r = math::dist(f.to_xy(t, s), m.x0);
            let d = m.d_tilde_ts(t, s);
            assert!(m.c_d * r <= d && d <= m.big_c_d * r);
        }
    }

    #[test]
    fn symmetric_and_increasing_in_depth() {
        let dd = disk(1.0);
        let mesh = build_mesh(&dd, 16).unwrap();
        let f = tubular_frame(&dd, "arc").unwrap();
        let m = intrinsic_distance(&f, [1.0, 0.0], &mesh, region()).unwrap();
        for &t in &[-0.4, 0.0, 0.7] {
            let mut prev = m.d_tilde_ts(t, 0.0);
            for k in 1..10 {
                let s = 0.03 * k as f64;
                assert_eq!(m.d_tilde_ts(t, s), m.d_tilde_ts(t, -s));
                let cur = m.d_tilde_ts(t, -s);
                assert!(cur > prev);
                prev = cur;
            }
        }
    }
}
