use alloc::format;

use crate::geometry::IntrinsicMetric;
use crate::math;
use crate::{Error, Point, Result};

/// Explicit supersolution candidate with value, gradient and Laplacian.
pub trait Supersolution {
    fn value(&self, x: Point) -> Result<f64>;
    fn gradient(&self, x: Point) -> Result<Point>;
    fn laplacian(&self, x: Point) -> Result<f64>;

    /// `∂_ν ū = ∇ū · ν`.
    fn normal_derivative(&self, x: Point, normal: Point) -> Result<f64> {
        Ok(math::dot(self.gradient(x)?, normal))
    }
}

/// `ū(x) = c |x - x₀|² / (2N)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticBarrier {
    pub x0: Point,
    pub c: f64,
    pub n: u32,
}

pub fn quadratic_barrier(x0: Point, c: f64, n: u32) -> Result<QuadraticBarrier> {
    if !(c > 0.0) || n == 0 {
        return Err(Error::InvalidArgument(format!("quadratic barrier needs c > 0 and N >= 1 (c = {c}, N = {n})")));
    }
    Ok(QuadraticBarrier { x0, c, n })
}

impl QuadraticBarrier {
    /// `c N⁻¹ |ξ - x₀| cos(ν(ξ), ξ - x₀)`.
    pub fn normal_derivative_formula(&self, xi: Point, normal: Point) -> f64 {
        let d = math::sub(xi, self.x0);
        let r = math::norm(d);
        if r == 0.0 {
            return 0.0;
        }
        let cos = math::dot(normal, d) / (r * math::norm(normal));
        self.c / self.n as f64 * r * cos
    }
}

impl Supersolution for QuadraticBarrier {
    fn value(&self, x: Point) -> Result<f64> {
        let d = math::sub(x, self.x0);
        Ok(self.c * math::dot(d, d) / (2.0 * self.n as f64))
    }

    fn gradient(&self, x: Point) -> Result<Point> {
        Ok(math::scale(math::sub(x, self.x0), self.c / self.n as f64))
    }

    fn laplacian(&self, _x: Point) -> Result<f64> {
        Ok(self.c)
    }
}

/// `ū(x) = c (|x - center| - R₀)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingBarrier {
    pub center: Point,
    pub r0: f64,
    pub c: f64,
    pub n: u32,
}

pub fn ring_barrier(r0: f64, c: f64, n: u32) -> Result<RingBarrier> {
    if !(c > 0.0) || !(r0 > 0.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "ring barrier needs c > 0, R0 > 0 and N >= 1 (c = {c}, R0 = {r0}, N = {n})"
        )));
    }
    Ok(RingBarrier { center: [0.0, 0.0], r0, c, n })
}

impl RingBarrier {
    fn radius(&self, x: Point) -> Result<f64> {
        let r = math::dist(x, self.center);
        if r == 0.0 {
            return Err(Error::OutOfRegion("ring barrier is singular at the center".into()));
        }
        Ok(r)
    }

    /// `dū/dr = 2c (r - R₀)`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        2.0 * self.c * (r - self.r0)
    }

    /// `-Δū = -2c - ((N - 1)/r) 2c (r - R₀)`.
    pub fn minus_laplacian(&self, x: Point) -> Result<f64> {
        let r = self.radius(x)?;
        let n1 = (self.n - 1) as f64;
        Ok(-2.0 * self.c - n1 / r * 2.0 * self.c * (r - self.r0))
    }
}

impl Supersolution for RingBarrier {
    fn value(&self, x: Point) -> Result<f64> {
        let r = self.radius(x)?;
        Ok(self.c * (r - self.r0) * (r - self.r0))
    }

    fn gradient(&self, x: Point) -> Result<Point> {
        let r = self.radius(x)?;
        Ok(math::scale(math::sub(x, self.center), self.radial_derivative(r) / r))
    }

    fn laplacian(&self, x: Point) -> Result<f64> {
        Ok(-self.minus_laplacian(x)?)
    }
}

/// `ū(x) = c c_Δ⁻¹ d̃₀(x)`.
#[derive(Clone, Debug)]
pub struct IntrinsicBarrier<'a> {
    pub metric: &'a IntrinsicMetric,
    pub c: f64,
    /// Finite-difference spacing for the Laplacian.
    pub step: f64,
}

pub fn intrinsic_barrier(metric: &IntrinsicMetric, c: f64) -> Result<IntrinsicBarrier<'_>> {
    if !(c > 0.0) || !(metric.c_delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "intrinsic barrier needs c > 0 and c_delta > 0 (c = {c}, c_delta = {})",
            metric.c_delta
        )));
    }
    let step = 1e-3 * metric.region.tau_min.min(metric.region.depth);
    Ok(IntrinsicBarrier { metric, c, step })
}

impl IntrinsicBarrier<'_> {
    pub fn scale(&self) -> f64 {
        self.c / self.metric.c_delta
    }

    fn reject_base_point(&self, x: Point) -> Result<()> {
        if math::dist(x, self.metric.x0) <= 1e-12 * (1.0 + math::norm(x)) {
            return Err(Error::OutOfRegion("the intrinsic barrier is not differentiable at the base point".into()));
        }
        Ok(())
    }
}

impl Supersolution for IntrinsicBarrier<'_> {
    fn value(&self, x: Point) -> Result<f64> {
        Ok(self.scale() * self.metric.d_tilde(x)?)
    }

    fn gradient(&self, x: Point) -> Result<Point> {
        self.reject_base_point(x)?;
        Ok(math::scale(self.metric.gradient(x)?, self.scale()))
    }

    fn laplacian(&self, x: Point) -> Result<f64> {
        self.reject_base_point(x)?;
        Ok(self.scale() * self.metric.laplacian_fd(x, self.step)?)
    }
}
