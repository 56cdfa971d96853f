//! Float helpers routed through `libm` so results do not depend on `std`.

use crate::Point;

pub use core::f64::consts::{PI, TAU};

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}
#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}
#[inline]
pub fn scale(a: Point, t: f64) -> Point {
    [a[0] * t, a[1] * t]
}
#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
#[inline]
pub fn norm(a: Point) -> f64 {
    hypot(a[0], a[1])
}
#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = libm::fmod(t, TAU);
    if w < 0.0 {
        w + TAU
    } else {
        w
    }
}

/// Signed area of the triangle `(a, b, c)`, positive for counter-clockwise order.
#[inline]
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

/// Central finite-difference Laplacian of `f` at `x` with spacing `h`.
pub fn fd_laplacian<E>(
    f: impl Fn(Point) -> Result<f64, E>,
    x: Point,
    h: f64,
) -> Result<f64, E> {
    let c = f(x)?;
    let xp = f([x[0] + h, x[1]])?;
    let xm = f([x[0] - h, x[1]])?;
    let yp = f([x[0], x[1] + h])?;
    let ym = f([x[0], x[1] - h])?;
    Ok((xp + xm + yp + ym - 4.0 * c) / (h * h))
}

/// Central finite-difference gradient of `f` at `x` with spacing `h`.
pub fn fd_gradient<E>(f: impl Fn(Point) -> Result<f64, E>, x: Point, h: f64) -> Result<Point, E> {
    let dx = (f([x[0] + h, x[1]])? - f([x[0] - h, x[1]])?) / (2.0 * h);
    let dy = (f([x[0], x[1] + h])? - f([x[0], x[1] - h])?) / (2.0 * h);
    Ok([dx, dy])
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, 8 points.
pub const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Integrates `f` over `[a, b]` with composite 8-point Gauss-Legendre on `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + w * p as f64;
        let mid = lo + 0.5 * w;
        for &(x, wt) in GAUSS8.iter() {
            total += wt * f(mid + 0.5 * w * x);
        }
    }
    total * 0.5 * w
}
