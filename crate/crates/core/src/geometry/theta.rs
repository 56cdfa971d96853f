use super::tubular::TubularFrame;
use crate::math;
use crate::{Error, Result};

/// Non-convexity indicator of a boundary segment.
///
/// Returns `max(0, -min cos(ν(ξ), ξ - x₀))` over pairs of segment points
/// `x₀, ξ` with `0 < |ξ - x₀| ≤ radius`, sampled with `density` points along
/// the segment. The value lies in `[0, 1]` and vanishes on convex or flat
/// segments; it bounds the normal derivative of the quadratic barrier from
/// below by `-(c/N) radius θ₀`.
pub fn theta0(frame: &TubularFrame, radius: f64, density: usize) -> Result<f64> {
    if !(radius > 0.0) || density < 2 {
        return Err(Error::InvalidArgument("theta0 needs a positive radius and at least two samples".into()));
    }
    let ts = frame.sample_params(density);
    let pts: alloc::vec::Vec<_> = ts.iter().map(|&t| (frame.point(t), frame.normal(t))).collect();
    let mut worst = f64::INFINITY;
    for (i, &(x0, _)) in pts.iter().enumerate() {
        for (j, &(xi, nu)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = math::sub(xi, x0);
            let r = math::norm(d);
            if r == 0.0 || r > radius {
                continue;
            }
            worst = worst.min(math::dot(nu, d) / r);
        }
    }
    if worst == f64::INFINITY {
        return Err(Error::InvalidArgument("theta0 sample set is empty".into()));
    }
    Ok((-worst).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{tubular_frame, Component, DomainDescriptor, DomainKind, SegmentSpec};
    use crate::math::{PI, TAU};
    use alloc::vec;

    fn star_valley() -> TubularFrame {
        let dd = DomainDescriptor::new(
            DomainKind::Star { mean: 1.0, amplitude: 0.1, lobes: 5 },
            vec![
                SegmentSpec::arc("valley", Component::Outer, PI / 5.0 - 0.15, PI / 5.0 + 0.15),
                SegmentSpec::arc("rest", Component::Outer, PI / 5.0 + 0.15, PI / 5.0 - 0.15 + TAU),
            ],
        )
        .unwrap();
        tubular_frame(&dd, "valley").unwrap()
    }

    #[test]
    fn convex_disk_gives_zero() {
        let dd = DomainDescriptor::new(
            DomainKind::Disk { radius: 1.0 },
            vec![
                SegmentSpec::arc("a", Component::Outer, -1.0, 1.0),
                SegmentSpec::arc("b", Component::Outer, 1.0, TAU - 1.0),
            ],
        )
        .unwrap();
        let f = tubular_frame(&dd, "a").unwrap();
        assert_eq!(theta0(&f, 1.0, 200).unwrap(), 0.0);
    }

    #[test]
    fn flat_side_gives_zero() {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let dd = DomainDescriptor::new(
            DomainKind::Polygon { vertices: sq },
            vec![
                SegmentSpec::arc("bottom", Component::Outer, -0.75 * PI, -0.25 * PI),
                SegmentSpec::arc("rest", Component::Outer, -0.25 * PI, 1.25 * PI),
            ],
        )
        .unwrap();
        let f = tubular_frame(&dd, "bottom").unwrap();
        assert!(theta0(&f, 0.5, 100).unwrap().abs() < 1e-15);
    }

    #[test]
    fn concave_star_arc_is_positive_and_converged() {
        let f = star_valley();
        let coarse = theta0(&f, 0.3, 60).unwrap();
        let fine = theta0(&f, 0.3, 600).unwrap();
        assert!(coarse > 0.0);
        assert!((fine - coarse).abs() < 1e-3);
    }

    #[test]
    fn monotone_in_radius() {
        let f = star_valley();
        let mut prev = 0.0;
        for k in 1..8 {
            let v = theta0(&f, 0.05 * k as f64, 120).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn empty_sample_set_rejected() {
        let f = star_valley();
        assert!(theta0(&f, 1e-9, 10).is_err());
    }
}
