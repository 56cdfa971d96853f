use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::evaluators::Supersolution;
use super::ode::OdeBarrier;
use super::select::{BarrierKind, Selection};
use crate::geometry::{DomainDescriptor, IntrinsicMetric, TriMesh, TubularFrame};
use crate::math::{self, PI, TAU};
use crate::{Error, Point, Result};

/// Pass threshold for every residual family.
pub const RESIDUAL_TOL: f64 = -1e-10;

/// Comparison region `D` of a certificate.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum BarrierRegion {
    /// `D = Ω ∩ B(x₀, R)`; `∂₂D` lies on `segment`.
    Ball { x0: Point, radius: f64, segment: String },
    /// `D = {inner < |x - center| < outer}`; `∂₂D` is the inner circle `segment`.
    Annulus { center: Point, inner: f64, outer: f64, segment: String },
    /// `D = Ω ∩ {d̃₀ < radius, s > -depth}` around `x₀` on `segment`.
    Collar { x0: Point, radius: f64, depth: f64, segment: String },
    /// `s ∈ (-length, 0)` for the one-dimensional profile.
    Interval { length: f64 },
}

impl BarrierRegion {
    /// Whether `x` lies in the closure of `D`. Collar regions need the metric.
    pub fn contains(&self, x: Point, metric: Option<&IntrinsicMetric>) -> Result<bool> {
        let slack = 1e-12;
        match self {
            BarrierRegion::Ball { x0, radius, .. } => Ok(math::dist(x, *x0) <= radius + slack),
            BarrierRegion::Annulus { center, inner, outer, .. } => {
                let r = math::dist(x, *center);
                Ok(r >= inner - slack && r <= outer + slack)
            }
            BarrierRegion::Collar { radius, depth, .. } => {
                let metric = metric.ok_or(Error::MissingInput("intrinsic metric for a collar region"))?;
                match metric.coords(x) {
                    Ok((t, s)) => Ok(s <= slack
                        && s >= -depth - slack
                        && metric.frame.locate(t).is_some()
                        && metric.d_tilde_ts(t, s) <= radius + slack),
                    Err(Error::OutOfRegion(_)) => Ok(false),
                    Err(e) => Err(e),
                }
            }
            BarrierRegion::Interval { .. } => {
                Err(Error::InvalidArgument("an interval region has no planar points".into()))
            }
        }
    }
}

/// Sample points of the three inequality families.
#[derive(Clone, Debug, Default)]
pub struct RegionSamples {
    /// Points of `D`.
    pub interior: Vec<Point>,
    /// Points of `∂₁D = ∂D \ Γ`.
    pub cap: Vec<Point>,
    /// Points of `∂₂D` with the outward unit normal there.
    pub flux: Vec<(Point, Point)>,
}

/// Quadrature points (vertices, edge midpoints, centroid) of the triangles, filtered by `keep`.
fn triangle_points(mesh: &TriMesh, mut keep: impl FnMut(Point) -> bool) -> Vec<Point> {
    let mut out = Vec::new();
    for e in 0..mesh.triangles().len() {
        let [a, b, c] = mesh.triangle_points(e);
        let pts = [
            math::scale(math::add(math::add(a, b), c), 1.0 / 3.0),
            math::scale(math::add(a, b), 0.5),
            math::scale(math::add(b, c), 0.5),
            math::scale(math::add(c, a), 0.5),
        ];
        for p in pts {
            if keep(p) {
                out.push(p);
            }
        }
    }
    out
}

impl RegionSamples {
    /// Samples of `Ω ∩ B(x₀, R)` with `∂₂D` on the frame's segment.
    pub fn ball(
        mesh: &TriMesh,
        domain: &DomainDescriptor,
        frame: &TubularFrame,
        x0: Point,
        radius: f64,
        density: usize,
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        let interior = triangle_points(mesh, |p| math::dist(p, x0) < radius);
        let m = density.max(16) * 8;
        let cap = (0..m)
            .map(|i| {
                let a = TAU * i as f64 / m as f64;
                [x0[0] + radius * math::cos(a), x0[1] + radius * math::sin(a)]
            })
            .filter(|&p| domain.contains(p))
            .collect();
        let tag = mesh.tag_index(&frame.tag)?;
        let mut flux = Vec::new();
        for node in mesh.segment_nodes(tag) {
            let p = mesh.nodes()[node];
            if math::dist(p, x0) <= radius {
                let (t, _) = frame.from_xy_clamped(p);
                flux.push((frame.point(t), frame.normal(t)));
            }
        }
        Ok(RegionSamples { interior, cap, flux })
    }

    /// Samples of the annulus between `inner` and `outer`; `∂₂D` is the inner circle
    /// (mesh nodes of `inner_tag`) with normal pointing into the hole.
    pub fn annulus(
        mesh: &TriMesh,
        center: Point,
        inner: f64,
        outer: f64,
        inner_tag: &str,
        density: usize,
    ) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::InvalidArgument(format!("annulus needs 0 < inner < outer ({inner}, {outer})")));
        }
        let interior = triangle_points(mesh, |p| {
            let r = math::dist(p, center);
            r > inner && r < outer
        });
        let m = density.max(16) * 8;
        let cap = (0..m)
            .map(|i| {
                let a = TAU * i as f64 / m as f64;
                [center[0] + outer * math::cos(a), center[1] + outer * math::sin(a)]
            })
            .collect();
        let tag = mesh.tag_index(inner_tag)?;
        let flux = mesh
            .segment_nodes(tag)
            .into_iter()
            .map(|n| {
                let p = mesh.nodes()[n];
                let d = math::sub(center, p);
                let r = math::norm(d);
                let xi = math::add(center, math::scale(d, -inner / r));
                (xi, math::scale(d, 1.0 / r))
            })
            .collect();
        Ok(RegionSamples { interior, cap, flux })
    }

    /// Samples of the intrinsic collar `{d̃₀ ≤ R, -depth ≤ s ≤ 0}` of `metric`.
    ///
    /// Interior points come from the metric's own sampling of `D` (which keeps
    /// `d̃₀ ≥ tau_min`); cap points cover `d̃₀ = R` and the bottom `s = -depth`.
    pub fn collar(metric: &IntrinsicMetric, mesh: &TriMesh, density: usize) -> Result<Self> {
        let n = density.max(8);
        let region = metric.region;
        let frame = &metric.frame;
        let interior = metric.region_samples(n).into_iter().map(|(t, s)| frame.to_xy(t, s)).collect();
        let mut cap = Vec::new();
        let m = n * 4;
        for i in 0..=m {
            let a = PI * i as f64 / m as f64;
            let s = -region.radius * math::sin(a);
            if s < -region.depth {
                continue;
            }
            if let Some(t) = param_at_signed_distance(metric, region.radius * math::cos(a)) {
                cap.push(frame.to_xy(t, s));
            }
        }
        if region.depth < region.radius {
            let half = math::sqrt(region.radius * region.radius - region.depth * region.depth);
            for i in 0..=m {
                let d = -half + 2.0 * half * i as f64 / m as f64;
                if let Some(t) = param_at_signed_distance(metric, d) {
                    cap.push(frame.to_xy(t, -region.depth));
                }
            }
        }
        let mut flux = Vec::new();
        for &(node, d) in &metric.nodes {
            if d > region.radius || d == 0.0 {
                continue;
            }
            let (t, _) = frame.from_xy(mesh.nodes()[node])?;
            if metric.d0(t) <= 1e-12 {
                continue;
            }
            flux.push((frame.point(t), frame.normal(t)));
        }
        Ok(RegionSamples { interior, cap, flux })
    }
}

/// Parameter of the segment point at signed intrinsic distance `d` from `x₀`, if it exists.
pub fn param_at_signed_distance(metric: &IntrinsicMetric, d: f64) -> Option<f64> {
    let (mut lo, mut hi) = metric.param_window();
    let f = |t: f64| metric.signed_d0(t) - d;
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    metric.frame.locate(t).map(|_| t)
}

/// Worst residual of one inequality family.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FamilyResidual {
    /// Smallest `lhs - rhs` over the samples (`+∞` without samples).
    pub worst: f64,
    pub samples: usize,
    pub worst_at: Option<Point>,
    pub pass: bool,
}

impl FamilyResidual {
    fn collect(items: impl Iterator<Item = Result<(Point, f64)>>) -> Result<Self> {
        let mut worst = f64::INFINITY;
        let mut at = None;
        let mut samples = 0;
        for item in items {
            let (p, r) = item?;
            samples += 1;
            if r < worst || r.is_nan() {
                worst = r;
                at = Some(p);
            }
        }
        Ok(FamilyResidual { worst, samples, worst_at: at, pass: worst >= RESIDUAL_TOL })
    }
}

/// Residuals of the interior, cap and flux inequalities.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    /// `-Δū + αū + ε` on `D`.
    pub interior: FamilyResidual,
    /// `ū - M` on `∂₁D`.
    pub cap: FamilyResidual,
    /// `∂_ν ū + δ` on `∂₂D`.
    pub flux: FamilyResidual,
    pub pass: bool,
}

impl VerificationReport {
    fn new(interior: FamilyResidual, cap: FamilyResidual, flux: FamilyResidual) -> Self {
        let pass = interior.pass && cap.pass && flux.pass;
        VerificationReport { interior, cap, flux, pass }
    }
}

/// Evaluates the supersolution inequalities `-Δū + αū ≥ -ε` in `D`, `ū ≥ M` on
/// `∂₁D` and `∂_ν ū ≥ -δ` on `∂₂D` at the sample points.
pub fn verify_supersolution(
    cert: &BarrierCertificate,
    barrier: &dyn Supersolution,
    samples: &RegionSamples,
    alpha: f64,
) -> Result<VerificationReport> {
    let k = &cert.constants;
    let interior = FamilyResidual::collect(
        samples.interior.iter().map(|&p| Ok((p, -barrier.laplacian(p)? + alpha * barrier.value(p)? + k.eps))),
    )?;
    let cap = FamilyResidual::collect(samples.cap.iter().map(|&p| Ok((p, barrier.value(p)? - k.m))))?;
    let flux = FamilyResidual::collect(
        samples.flux.iter().map(|&(p, nu)| Ok((p, barrier.normal_derivative(p, nu)? + k.delta))),
    )?;
    Ok(VerificationReport::new(interior, cap, flux))
}

/// ODE profile: residual `-φ'' - bφ' - c` on `(-R, 0]`, `φ ≥ 0` there and `φ'(0) + δ`.
pub fn verify_ode(cert: &BarrierCertificate, ode: &OdeBarrier, samples: usize) -> Result<VerificationReport> {
    let r = cert.constants.r.ok_or(Error::MissingInput("interval length R"))?;
    let n = samples.max(2);
    let s_at = |i: usize| -r * i as f64 / (n - 1) as f64;
    let interior = FamilyResidual::collect((0..n).map(|i| Ok(([s_at(i), 0.0], ode.residual(s_at(i))))))?;
    let cap = FamilyResidual::collect((0..n).map(|i| Ok(([s_at(i), 0.0], ode.phi(s_at(i))))))?;
    // the boundary condition φ'(0) = -δ is an equality; both signs count as violations
    let flux = FamilyResidual::collect(core::iter::once(Ok(([0.0, 0.0], -(ode.d1(0.0) + ode.delta).abs()))))?;
    Ok(VerificationReport::new(interior, cap, flux))
}

/// Barrier kind, constants, region and (after verification) residuals.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BarrierCertificate {
    pub kind: BarrierKind,
    pub constants: super::select::BarrierConstants,
    pub checks: Vec<super::select::Inequality>,
    pub feasible: bool,
    pub region: BarrierRegion,
    pub report: Option<VerificationReport>,
}

impl BarrierCertificate {
    pub fn new(selection: Selection, region: BarrierRegion) -> Self {
        BarrierCertificate {
            kind: selection.kind,
            constants: selection.constants,
            checks: selection.checks,
            feasible: selection.feasible,
            region,
            report: None,
        }
    }

    pub fn with_report(mut self, report: VerificationReport) -> Self {
        self.report = Some(report);
        self
    }

    /// Feasible constants and a passing verification.
    pub fn pass(&self) -> bool {
        self.feasible && self.report.as_ref().is_some_and(|r| r.pass)
    }
}

/// Nodewise check of `ũ_h ≤ ū + tol` on `D`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    /// `max (ũ_h - ū)` over the nodes of `D`.
    pub worst_gap: f64,
    pub worst_node: Option<usize>,
    pub nodes_checked: usize,
    pub tol: f64,
    pub pass: bool,
    /// `max ũ_h` over the target-segment nodes inside `D`.
    pub trace_max: Option<f64>,
}

/// Compares the shifted solution `u - shift` with the barrier at every mesh node of `D`.
pub fn comparison_check(
    u: &[f64],
    shift: Option<&[f64]>,
    barrier: &dyn Supersolution,
    region: &BarrierRegion,
    metric: Option<&IntrinsicMetric>,
    mesh: &TriMesh,
    tol: f64,
) -> Result<ComparisonReport> {
    let n = mesh.node_count();
    if u.len() != n || shift.is_some_and(|s| s.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "solution has {} values but the mesh has {n} nodes",
            u.len()
        )));
    }
    let segment = match region {
        BarrierRegion::Ball { segment, .. }
        | BarrierRegion::Annulus { segment, .. }
        | BarrierRegion::Collar { segment, .. } => segment,
        BarrierRegion::Interval { .. } => {
            return Err(Error::InvalidArgument("comparison needs a planar region".into()))
        }
    };
    let tag = mesh.tag_index(segment)?;
    let mut on_target = alloc::vec![false; n];
    for i in mesh.segment_nodes(tag) {
        on_target[i] = true;
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_node = None;
    let mut checked = 0;
    let mut trace_max: Option<f64> = None;
    for (i, &p) in mesh.nodes().iter().enumerate() {
        if !region.contains(p, metric)? {
            continue;
        }
        let ut = u[i] - shift.map_or(0.0, |s| s[i]);
        let gap = ut - barrier.value(p)?;
        checked += 1;
        if gap > worst {
            worst = gap;
            worst_node = Some(i);
        }
        if on_target[i] {
            trace_max = Some(trace_max.map_or(ut, |m| m.max(ut)));
        }
    }
    if checked == 0 {
        return Err(Error::InvalidArgument("no mesh node lies in the comparison region".into()));
    }
    Ok(ComparisonReport { worst_gap: worst, worst_node, nodes_checked: checked, tol, pass: worst <= tol, trace_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::{
        intrinsic_barrier, ode_barrier, quadratic_barrier, ring_barrier, select_constants, SelectionInput,
    };
    use crate::geometry::{
        build_mesh, intrinsic_distance, tubular_frame, Component, DomainKind, IntrinsicRegion, SegmentSpec,
    };
    use alloc::vec;

    fn ring_certificate(mesh: &TriMesh, eps: f64, m: f64) -> (BarrierCertificate, RegionSamples) {
        let mut inp = SelectionInput::new(BarrierKind::Ring, eps, 0.0, m);
        inp.r0 = Some(1.0);
        inp.r1 = Some(6.0);
        inp.r_eps = Some(6.0);
        let sel = select_constants(&inp).unwrap();
        let region = BarrierRegion::Annulus { center: [0.0, 0.0], inner: 1.0, outer: 6.0, segment: "gamma0".into() };
        let samples = RegionSamples::annulus(mesh, [0.0, 0.0], 1.0, 6.0, "gamma0", 16).unwrap();
        (BarrierCertificate::new(sel, region), samples)
    }

    #[test]
    fn ring_barrier_with_recipe_constants_passes() {
        let dd = DomainDescriptor::ring(1.0, 6.0).unwrap();
        let mesh = build_mesh(&dd, 32).unwrap();
        let (cert, samples) = ring_certificate(&mesh, 0.5, 0.0);
        assert!(cert.feasible);
        let b = ring_barrier(1.0, cert.constants.c, 2).unwrap();
        let rep = verify_supersolution(&cert, &b, &samples, 0.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.interior.samples > 100 && rep.cap.samples > 100 && rep.flux.samples == 32);
        assert!(rep.flux.worst.abs() < 1e-15);
    }

    #[test]
    fn quadratic_with_doubled_constant_fails_interior() {
        let dd = DomainDescriptor::disk(1.0).unwrap();
        let mesh = build_mesh(&dd, 32).unwrap();
        let frame = tubular_frame(&dd, "boundary").unwrap();
        let eps = 0.2;
        let mut inp = SelectionInput::new(BarrierKind::Quadratic, eps, 0.1, 0.0);
        inp.r = Some(0.5);
        let mut sel = select_constants(&inp).unwrap();
        sel.constants.c = 2.0 * eps;
        let x0 = [1.0, 0.0];
        let region = BarrierRegion::Ball { x0, radius: 0.5, segment: "boundary".into() };
        let cert = BarrierCertificate::new(sel, region);
        let samples = RegionSamples::ball(&mesh, &dd, &frame, x0, 0.5, 16).unwrap();
        let q = quadratic_barrier(x0, cert.constants.c, 2).unwrap();
        let rep = verify_supersolution(&cert, &q, &samples, 0.0).unwrap();
        assert!(!rep.interior.pass);
        assert!((rep.interior.worst + eps).abs() < 1e-12);
        assert!(rep.flux.pass);
    }

    #[test]
    fn zero_data_valid_certificate_passes() {
        let dd = DomainDescriptor::disk(1.0).unwrap();
        let mesh = build_mesh(&dd, 16).unwrap();
        let frame = tubular_frame(&dd, "boundary").unwrap();
        let mut inp = SelectionInput::new(BarrierKind::Quadratic, 0.3, 0.1, 0.0);
        inp.r = Some(0.4);
        let sel = select_constants(&inp).unwrap();
        let x0 = [0.0, 1.0];
        let cert = BarrierCertificate::new(sel, BarrierRegion::Ball { x0, radius: 0.4, segment: "boundary".into() });
        let samples = RegionSamples::ball(&mesh, &dd, &frame, x0, 0.4, 16).unwrap();
        let q = quadratic_barrier(x0, cert.constants.c, 2).unwrap();
        let rep = verify_supersolution(&cert, &q, &samples, 0.5).unwrap();
        assert!(rep.pass, "{rep:?}");
        let zero = vec![0.0; mesh.node_count()];
        let cmp = comparison_check(&zero, None, &q, &cert.region, None, &mesh, 1e-12).unwrap();
        assert!(cmp.pass);
        assert!(cmp.worst_gap <= 0.0);
        assert!(cmp.nodes_checked > 0);
    }

    #[test]
    fn comparison_detects_violation_and_mismatch() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let mesh = build_mesh(&dd, 16).unwrap();
        let b = ring_barrier(1.0, 0.1, 2).unwrap();
        let region = BarrierRegion::Annulus { center: [0.0, 0.0], inner: 1.0, outer: 2.0, segment: "gamma0".into() };
        let u = vec![0.05; mesh.node_count()];
        let cmp = comparison_check(&u, None, &b, &region, None, &mesh, 1e-8).unwrap();
        assert!(!cmp.pass);
        assert!((cmp.worst_gap - 0.05).abs() < 1e-12);
        assert_eq!(cmp.trace_max, Some(0.05));
        let shifted = comparison_check(&u, Some(&u), &b, &region, None, &mesh, 1e-8).unwrap();
        assert!(shifted.pass);
        assert!(comparison_check(&u[1..], None, &b, &region, None, &mesh, 1e-8).is_err());
    }

    #[test]
    fn ode_verification() {
        let mut inp = SelectionInput::new(BarrierKind::Ode, 1.0, 0.5, 0.0);
        inp.b = Some(1.0);
        inp.r = Some(1.0);
        let cert = BarrierCertificate::new(select_constants(&inp).unwrap(), BarrierRegion::Interval { length: 1.0 });
        let ode = ode_barrier(1.0, 0.5, 1.0).unwrap();
        let rep = verify_ode(&cert, &ode, 100).unwrap();
        assert!(rep.pass, "{rep:?}");
        let mut long = cert.clone();
        long.constants.r = Some(2.5);
        assert!(!verify_ode(&long, &ode, 100).unwrap().cap.pass);
    }

    #[test]
    fn intrinsic_barrier_on_circle_arc() {
        let dd = DomainDescriptor::new(
            DomainKind::Disk { radius: 1.0 },
            vec![
                SegmentSpec::arc("arc", Component::Outer, -PI / 2.0, PI / 2.0),
                SegmentSpec::arc("rest", Component::Outer, PI / 2.0, 1.5 * PI),
            ],
        )
        .unwrap();
        let mesh = build_mesh(&dd, 32).unwrap();
        let frame = tubular_frame(&dd, "arc").unwrap();
        let region = IntrinsicRegion { tau_min: 0.05, radius: 0.6, depth: 0.3, samples: 40 };
        let metric = intrinsic_distance(&frame, [1.0, 0.0], &mesh, region).unwrap();
        let mut inp = SelectionInput::new(BarrierKind::Intrinsic, 0.5, 0.2, 0.0);
        inp.r = Some(0.6);
        inp.c_delta = Some(metric.c_delta);
        inp.theta0 = Some(0.0);
        let sel = select_constants(&inp).unwrap();
        assert_eq!(sel.constants.c, (0.2 * metric.c_delta).min(0.5));
        let cert = BarrierCertificate::new(
            sel,
            BarrierRegion::Collar { x0: [1.0, 0.0], radius: 0.6, depth: 0.3, segment: "arc".into() },
        );
        let b = intrinsic_barrier(&metric, cert.constants.c).unwrap();
        assert!(b.value([1.0, 0.0]).unwrap() == 0.0);
        assert!(b.gradient([1.0, 0.0]).is_err());
        let t = 0.3;
        let xi = frame.point(t);
        assert!((b.value(xi).unwrap() - b.scale() * t).abs() < 1e-12);
        let samples = RegionSamples::collar(&metric, &mesh, 24).unwrap();
        assert!(!samples.cap.is_empty() && !samples.flux.is_empty());
        let rep = verify_supersolution(&cert, &b, &samples, 0.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        // the extension is even in s, so its normal derivative vanishes on the boundary
        assert!(rep.flux.worst >= cert.constants.delta - 1e-12);
    }
}
