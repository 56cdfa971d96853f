use alloc::string::String;
use core::fmt;

use super::expr::{parse_expr, Expr};
use crate::math;
use crate::{Error, Point, Result};

/// Where a scalar field comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSource {
    Expr(Expr),
    Constant(f64),
    /// `inside + (outside - inside) (1 + tanh((r - radius)/width)) / 2`.
    RadialStep { radius: f64, inside: f64, outside: f64, width: f64 },
    /// `amplitude exp(-|x - center|² / (2 sigma²))`.
    GaussianBump { center: Point, amplitude: f64, sigma: f64 },
}

/// A scalar field on the plane, with analytic derivatives for catalog fields.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub source: FieldSource,
}

/// Parses an expression string into a field.
pub fn parse_field(text: &str) -> Result<ScalarField> {
    let e = parse_expr(text)?;
    if e.is_constant() {
        let v = e.eval([0.0, 0.0])?;
        return Ok(ScalarField { source: FieldSource::Constant(v) });
    }
    Ok(ScalarField { source: FieldSource::Expr(e) })
}

impl ScalarField {
    pub fn constant(v: f64) -> Self {
        ScalarField { source: FieldSource::Constant(v) }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn radial_step(radius: f64, inside: f64, outside: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !(radius >= 0.0) {
            return Err(Error::InvalidArgument("radial-step needs width > 0 and radius >= 0".into()));
        }
        Ok(ScalarField { source: FieldSource::RadialStep { radius, inside, outside, width } })
    }

    pub fn gaussian_bump(center: Point, amplitude: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument("gaussian-bump needs sigma > 0".into()));
        }
        Ok(ScalarField { source: FieldSource::GaussianBump { center, amplitude, sigma } })
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.source {
            FieldSource::Constant(v) => Some(v),
            _ => None,
        }
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        !matches!(self.source, FieldSource::Expr(_))
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        match &self.source {
            FieldSource::Expr(e) => e.eval(p),
            FieldSource::Constant(v) => Ok(*v),
            FieldSource::RadialStep { radius, inside, outside, width } => {
                let z = (math::norm(p) - radius) / width;
                Ok(inside + (outside - inside) * 0.5 * (1.0 + libm::tanh(z)))
            }
            FieldSource::GaussianBump { center, amplitude, sigma } => {
                let d = math::sub(p, *center);
                Ok(amplitude * math::exp(-math::dot(d, d) / (2.0 * sigma * sigma)))
            }
        }
    }

    /// Analytic gradient, if the field provides one.
    pub fn analytic_gradient(&self, p: Point) -> Option<Result<Point>> {
        match &self.source {
            FieldSource::Expr(_) => None,
            FieldSource::Constant(_) => Some(Ok([0.0, 0.0])),
            FieldSource::RadialStep { .. } => Some(self.radial_profile(p).and_then(|(_, d1, _, r)| {
                if r == 0.0 {
                    Err(Error::Evaluation { pos: 0, msg: "radial-step gradient undefined at the origin".into() })
                } else {
                    Ok(math::scale(p, d1 / r))
                }
            })),
            FieldSource::GaussianBump { center, sigma, .. } => Some(self.eval(p).map(|v| {
                let d = math::sub(p, *center);
                math::scale(d, -v / (sigma * sigma))
            })),
        }
    }

    /// Analytic Laplacian, if the field provides one.
    pub fn analytic_laplacian(&self, p: Point) -> Option<Result<f64>> {
        match &self.source {
            FieldSource::Expr(_) => None,
            FieldSource::Constant(_) => Some(Ok(0.0)),
            FieldSource::RadialStep { .. } => Some(self.radial_profile(p).and_then(|(_, d1, d2, r)| {
                if r == 0.0 {
                    Err(Error::Evaluation { pos: 0, msg: "radial-step Laplacian undefined at the origin".into() })
                } else {
                    Ok(d2 + d1 / r)
                }
            })),
            FieldSource::GaussianBump { center, sigma, .. } => Some(self.eval(p).map(|v| {
                let d = math::sub(p, *center);
                let s2 = sigma * sigma;
                v * (math::dot(d, d) / (s2 * s2) - 2.0 / s2)
            })),
        }
    }

    /// Gradient: analytic when available, otherwise central differences with `step`.
    pub fn gradient(&self, p: Point, step: f64) -> Result<Point> {
        match self.analytic_gradient(p) {
            Some(g) => g,
            None => math::fd_gradient(|q| self.eval(q), p, step),
        }
    }

    /// Laplacian: analytic when available, otherwise central differences with `step`.
    pub fn laplacian(&self, p: Point, step: f64) -> Result<f64> {
        match self.analytic_laplacian(p) {
            Some(l) => l,
            None => math::fd_laplacian(|q| self.eval(q), p, step),
        }
    }

    /// Radial-step profile `(φ, φ', φ'', r)`.
    fn radial_profile(&self, p: Point) -> Result<(f64, f64, f64, f64)> {
        let FieldSource::RadialStep { radius, inside, outside, width } = self.source else {
            unreachable!()
        };
        let r = math::norm(p);
        let z = (r - radius) / width;
        let t = libm::tanh(z);
        let sech2 = 1.0 - t * t;
        let a = outside - inside;
        let v = inside + a * 0.5 * (1.0 + t);
        let d1 = a * 0.5 * sech2 / width;
        let d2 = -a * sech2 * t / (width * width);
        Ok((v, d1, d2, r))
    }

    pub fn describe(&self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            FieldSource::Expr(e) => write!(f, "{e}"),
            FieldSource::Constant(v) => write!(f, "{v}"),
            FieldSource::RadialStep { radius, inside, outside, width } => {
                write!(f, "radial-step(radius={radius}, inside={inside}, outside={outside}, width={width})")
            }
            FieldSource::GaussianBump { center, amplitude, sigma } => write!(
                f,
                "gaussian-bump(center=({}, {}), amplitude={amplitude}, sigma={sigma})",
                center[0], center[1]
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_expressions_fold() {
        let f = parse_field("-0.5").unwrap();
        assert_eq!(f.as_constant(), Some(-0.5));
        assert_eq!(f.eval([12.0, -3.0]).unwrap(), -0.5);
        assert!(parse_field("x").unwrap().as_constant().is_none());
    }

    #[test]
    fn catalog_derivatives_match_differences() {
        let fields = [
            ScalarField::radial_step(1.5, -1.0, 0.5, 0.2).unwrap(),
            ScalarField::gaussian_bump([0.3, -0.2], 2.0, 0.4).unwrap(),
            ScalarField::constant(3.0),
        ];
        let h = 1e-4;
        for f in &fields {
            for &p in &[[1.2, 0.4], [-0.3, 1.1], [0.9, -0.9]] {
                let g = f.analytic_gradient(p).unwrap().unwrap();
                let gf = math::fd_gradient(|q| f.eval(q), p, h).unwrap();
                assert!(math::dist(g, gf) < 1e-7, "{f}");
                let l = f.analytic_laplacian(p).unwrap().unwrap();
                let lf = math::fd_laplacian(|q| f.eval(q), p, h).unwrap();
                assert!((l - lf).abs() < 1e-5, "{f}: {l} vs {lf}");
            }
        }
    }

    #[test]
    fn expression_derivatives_fall_back_to_differences() {
        let f = parse_field("x^2 + 3*y^2").unwrap();
        assert!(!f.has_analytic_derivatives());
        assert!((f.laplacian([0.2, 0.7], 1e-3).unwrap() - 8.0).abs() < 1e-6);
        let g = f.gradient([1.0, 2.0], 1e-4).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-7 && (g[1] - 12.0).abs() < 1e-7);
    }
}
