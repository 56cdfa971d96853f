use alloc::format;

use crate::math;
use crate::{Error, Result};

/// Closed-form solution of `-φ'' - bφ' = c`, `φ(0) = 0`, `φ'(0) = -δ`:
/// `φ(s) = (c/b² - δ/b)(1 - e^{-bs}) - (c/b)s`.
///
/// With `extrapolated` set and `b = 0` the flat limit `φ(s) = -δs - (c/2)s²` is used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeBarrier {
    pub c: f64,
    pub delta: f64,
    pub b: f64,
    pub extrapolated: bool,
}

/// Nonnegativity interval `(left, 0]` of `φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidityInterval {
    /// First sign change to the left of 0; `None` if `φ ≥ 0` up to the search limit.
    pub left: Option<f64>,
    pub search_limit: f64,
}

pub fn ode_barrier(c: f64, delta: f64, b: f64) -> Result<OdeBarrier> {
    if b == 0.0 {
        return Err(Error::InvalidArgument(
            "b = 0: the closed form degenerates on flat boundaries (use the extrapolated limit explicitly)".into(),
        ));
    }
    check_finite(c, delta, b)?;
    Ok(OdeBarrier { c, delta, b, extrapolated: false })
}

/// Flat-boundary limit `φ(s) = -δs - (c/2)s²`.
pub fn ode_barrier_extrapolated(c: f64, delta: f64) -> Result<OdeBarrier> {
    check_finite(c, delta, 0.0)?;
    Ok(OdeBarrier { c, delta, b: 0.0, extrapolated: true })
}

fn check_finite(c: f64, delta: f64, b: f64) -> Result<()> {
    if !(c.is_finite() && delta.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite ODE constants c = {c}, delta = {delta}, b = {b}")));
    }
    Ok(())
}

impl OdeBarrier {
    fn flat(&self) -> bool {
        self.b == 0.0
    }

    /// Coefficient `c/b² - δ/b` of the homogeneous part.
    fn amplitude(&self) -> f64 {
        self.c / (self.b * self.b) - self.delta / self.b
    }

    pub fn phi(&self, s: f64) -> f64 {
        if self.flat() {
            return -self.delta * s - 0.5 * self.c * s * s;
        }
        // 1 - e^{-bs} = -expm1(-bs)
        -self.amplitude() * libm::expm1(-self.b * s) - self.c / self.b * s
    }

    pub fn d1(&self, s: f64) -> f64 {
        if self.flat() {
            return -self.delta - self.c * s;
        }
        self.b * self.amplitude() * libm::expm1(-self.b * s) - self.delta
    }

    pub fn d2(&self, s: f64) -> f64 {
        if self.flat() {
            return -self.c;
        }
        (self.b * self.delta - self.c) * math::exp(-self.b * s)
    }

    /// `-φ'' - bφ' - c`.
    pub fn residual(&self, s: f64) -> f64 {
        -self.d2(s) - self.b * self.d1(s) - self.c
    }

    /// Scans left from 0 with geometrically growing steps and bisects the first sign change.
    pub fn validity_interval(&self, search_limit: f64) -> ValidityInterval {
        let mut prev = 0.0;
        let mut step = 1e-6 * search_limit.max(1e-300);
        let scan = 1e-3 * search_limit;
        loop {
            let s = (prev - step).max(-search_limit);
            if self.phi(s) < 0.0 {
                let (mut lo, mut hi) = (s, prev);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    if self.phi(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return ValidityInterval { left: Some(hi), search_limit };
            }
            if s <= -search_limit {
                return ValidityInterval { left: None, search_limit };
            }
            prev = s;
            step = (step * 1.5).min(scan);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_conditions() {
        for &(c, d, b) in &[(1.0, 0.5, 1.0), (0.3, 2.0, -0.7), (5.0, 0.0, 3.0)] {
            let o = ode_barrier(c, d, b).unwrap();
            assert_eq!(o.phi(0.0), 0.0);
            assert_eq!(o.d1(0.0), -d);
        }
    }

    #[test]
    fn worked_example() {
        let o = ode_barrier(1.0, 0.5, 1.0).unwrap();
        for k in 0..20 {
            let s = -0.1 * k as f64;
            let direct = 0.5 * (1.0 - (-s).exp()) - s;
            assert!((o.phi(s) - direct).abs() < 1e-14);
        }
        assert_eq!(o.d1(0.0), -0.5);
    }

    #[test]
    fn residual_vanishes() {
        let o = ode_barrier(1.3, 0.4, 0.8).unwrap();
        for k in 0..100 {
            let s = -2.0 * k as f64 / 99.0;
            assert!(o.residual(s).abs() < 1e-12);
        }
    }

    #[test]
    fn interval_brackets_sign_change() {
        let o = ode_barrier(1.0, 0.5, 1.0).unwrap();
        let iv = o.validity_interval(10.0);
        let left = iv.left.unwrap();
        assert!(left < -1.0 && left > -2.0);
        assert!(o.phi(left) >= 0.0);
        assert!(o.phi(left - 1e-9) < 0.0);
        for k in 1..100 {
            assert!(o.phi(left * k as f64 / 100.0) >= 0.0);
        }
    }

    #[test]
    fn unbounded_interval_when_amplitude_nonpositive() {
        let o = ode_barrier(1.0, 2.0, 1.0).unwrap();
        assert_eq!(o.validity_interval(50.0).left, None);
    }

    #[test]
    fn flat_case_requires_flag() {
        assert!(ode_barrier(1.0, 0.5, 0.0).is_err());
        let o = ode_barrier_extrapolated(1.0, 0.5).unwrap();
        assert_eq!(o.phi(0.0), 0.0);
        assert_eq!(o.d1(0.0), -0.5);
        let left = o.validity_interval(10.0).left.unwrap();
        assert!((left + 1.0).abs() < 1e-12);
        let near = ode_barrier(1.0, 0.5, 1e-3).unwrap();
        assert!((near.phi(-0.7) - o.phi(-0.7)).abs() < 1e-3);
    }
}
