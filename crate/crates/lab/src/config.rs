//! Scenario configuration (JSON).
//!
//! A scenario names a domain, the data `(f, g, ψ)`, one boundary condition per
//! segment tag, an optional balance target with the barriers to certify on it,
//! solver options and the assertions a run must satisfy.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use signorini_core::assembly::{BoundaryCondition, BoundaryLayout};
use signorini_core::fields::{parse_expr, parse_field, ScalarField};
use signorini_core::geometry::{Component, DomainDescriptor, DomainKind, SegmentSpec};
use signorini_core::solver::{default_schedule, Method, SolverOptions};
use signorini_core::Point;

use crate::LabError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub domain: DomainConfig,
    /// Mesh resolutions; the last one is the main run, the others feed refinement studies.
    #[serde(default = "default_resolutions")]
    pub resolutions: Vec<usize>,
    pub fields: FieldsConfig,
    /// Boundary condition per segment tag.
    pub boundary: BTreeMap<String, ConditionSpec>,
    #[serde(default)]
    pub target: Option<TargetConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub barriers: Vec<BarrierConfig>,
    #[serde(default)]
    pub exact: Option<ExactConfig>,
    #[serde(default)]
    pub expect: ExpectConfig,
}

fn default_resolutions() -> Vec<usize> {
    vec![32]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    #[serde(flatten)]
    pub shape: DomainKind,
    /// Segment tags; the shape's default tags when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegmentConfig>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub name: String,
    #[serde(default = "outer")]
    pub component: Component,
    /// Polar angle range `[start, end]` about the domain centre; the whole component when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[Scalar; 2]>,
}

fn outer() -> Component {
    Component::Outer
}

/// A number, or a constant expression such as `"pi/5 - 0.15"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Expr(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64, LabError> {
        match self {
            Scalar::Num(v) => Ok(*v),
            Scalar::Expr(s) => {
                let e = parse_expr(s).map_err(|e| LabError::Config(format!("`{s}`: {e}")))?;
                if !e.is_constant() {
                    return Err(LabError::Config(format!("`{s}` must be a constant expression")));
                }
                Ok(e.eval([0.0, 0.0])?)
            }
        }
    }
}

/// A data field: a number, an expression over `x, y, r, theta`, or a catalog entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Num(f64),
    Expr(String),
    Catalog(CatalogField),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "catalog", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CatalogField {
    RadialStep { radius: f64, inside: f64, outside: f64, width: f64 },
    GaussianBump { center: Point, amplitude: f64, sigma: f64 },
}

impl FieldSpec {
    pub fn build(&self) -> Result<ScalarField, LabError> {
        Ok(match self {
            FieldSpec::Num(v) => ScalarField::constant(*v),
            FieldSpec::Expr(s) => parse_field(s).map_err(|e| LabError::Config(format!("field `{s}`: {e}")))?,
            FieldSpec::Catalog(CatalogField::RadialStep { radius, inside, outside, width }) => {
                ScalarField::radial_step(*radius, *inside, *outside, *width)?
            }
            FieldSpec::Catalog(CatalogField::GaussianBump { center, amplitude, sigma }) => {
                ScalarField::gaussian_bump(*center, *amplitude, *sigma)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsConfig {
    pub f: FieldSpec,
    #[serde(default = "zero_field")]
    pub g: FieldSpec,
    #[serde(default = "zero_field")]
    pub psi: FieldSpec,
}

fn zero_field() -> FieldSpec {
    FieldSpec::Num(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ConditionSpec {
    Signorini,
    Dirichlet(FieldSpec),
}

/// Balance target `Γ_{ε,δ}`: `f̃ ≤ -ε` on its collar and `g̃ ≤ -δ` on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub segment: String,
    pub eps: f64,
    pub delta: f64,
    /// Collar depth of the force-balance check.
    #[serde(default = "default_depth")]
    pub depth: f64,
    /// Cutoff width of the obstacle extension; `min(depth, ρ_max)` when absent.
    #[serde(default)]
    pub obstacle_width: Option<f64>,
    /// Barycentric subdivisions per triangle in the balance check.
    #[serde(default = "default_balance_density")]
    pub density: usize,
}

fn default_depth() -> f64 {
    0.25
}

fn default_balance_density() -> usize {
    3
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub kkt_tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub omega: Option<f64>,
    /// α values of the continuation for pure Signorini layouts (default `10⁰ … 10⁻⁶`).
    #[serde(default)]
    pub alpha_schedule: Option<Vec<f64>>,
    /// Coincidence tolerance; `max(10 kkt_tol, 0.01 h ‖u_h‖∞)` when absent.
    #[serde(default)]
    pub coincidence_tol: Option<f64>,
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        let mut o = SolverOptions::new(self.method.unwrap_or(Method::Pdas));
        o.kkt_tol = self.kkt_tol;
        if let Some(m) = self.max_iter {
            o.max_iter = m;
        }
        if let Some(w) = self.omega {
            o.omega = w;
        }
        o
    }

    pub fn schedule(&self) -> Vec<f64> {
        self.alpha_schedule.clone().unwrap_or_else(default_schedule)
    }
}

/// Base point on the target segment: Cartesian, or by polar angle about the domain centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasePoint {
    Xy(Point),
    Angle { angle: Scalar },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BarrierConfig {
    /// `c(|x| - R₀)²` on `R₀ < |x| < R_ε` of a ring whose inner circle is the target.
    Ring {
        #[serde(default)]
        r_eps: Option<f64>,
        #[serde(default = "yes")]
        assert: bool,
        #[serde(default = "default_density")]
        density: usize,
    },
    /// `c|x - x₀|²/(2N)` on `Ω ∩ B(x₀, R)`, `R = min(dist(x₀, Γ∖Γ_{ε,δ}), ρ)`.
    Quadratic {
        x0: BasePoint,
        /// Collar knob `ρ`; the frame's maximal width when absent.
        #[serde(default)]
        rho: Option<f64>,
        #[serde(default = "default_theta_density")]
        theta_density: usize,
        #[serde(default = "yes")]
        assert: bool,
        #[serde(default = "default_density")]
        density: usize,
    },
    /// `(c/c_Δ) d̃₀` on the collar `{τ_min ≤ d̃₀ ≤ R, -depth ≤ s ≤ 0}`.
    Intrinsic {
        x0: BasePoint,
        radius: f64,
        depth: f64,
        tau_min: f64,
        #[serde(default = "default_intrinsic_samples")]
        samples: usize,
        #[serde(default = "yes")]
        assert: bool,
        #[serde(default = "default_density")]
        density: usize,
    },
    /// One-dimensional profile `φ` with `b = (N-1)H`; the curvature at `x₀` when `b` is absent.
    Ode {
        x0: BasePoint,
        length: f64,
        #[serde(default)]
        b: Option<f64>,
        #[serde(default = "yes")]
        assert: bool,
        #[serde(default = "default_ode_samples")]
        density: usize,
    },
}

fn yes() -> bool {
    true
}

fn default_density() -> usize {
    16
}

fn default_theta_density() -> usize {
    400
}

fn default_intrinsic_samples() -> usize {
    40
}

fn default_ode_samples() -> usize {
    100
}

impl BarrierConfig {
    pub fn asserted(&self) -> bool {
        match self {
            BarrierConfig::Ring { assert, .. }
            | BarrierConfig::Quadratic { assert, .. }
            | BarrierConfig::Intrinsic { assert, .. }
            | BarrierConfig::Ode { assert, .. } => *assert,
        }
    }
}

/// Registered exact solutions for convergence tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExactConfig {
    /// Radial solution on a ring with constant `f`, `u = 0` on both circles
    /// (full contact on the inner one).
    AnnulusRadial,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectConfig {
    /// Minimum coverage of the target segment by the coincidence set.
    #[serde(default)]
    pub coverage_min: Option<f64>,
    /// Coverage is non-decreasing along `resolutions`.
    #[serde(default)]
    pub refinement_monotone: bool,
    /// Admissible range of the H¹ error slope against `h`.
    #[serde(default)]
    pub h1_slope: Option<[f64; 2]>,
    /// Relative tolerance on the mean normal flux over the contact segment.
    #[serde(default)]
    pub flux_rel_tol: Option<f64>,
    /// `max u_h` over the target segment.
    #[serde(default)]
    pub trace_max: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            LabError::Config(m) => LabError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn descriptor(&self) -> Result<DomainDescriptor, LabError> {
        let shape = self.domain.shape.clone();
        let dd = match &self.domain.segments {
            None => match shape {
                DomainKind::Ring { inner, outer } => DomainDescriptor::ring(inner, outer)?,
                DomainKind::Disk { radius } => DomainDescriptor::disk(radius)?,
                DomainKind::Star { mean, amplitude, lobes } => DomainDescriptor::star(mean, amplitude, lobes)?,
                DomainKind::Polygon { vertices } => DomainDescriptor::polygon(vertices)?,
            },
            Some(segs) => {
                let specs = segs
                    .iter()
                    .map(|s| {
                        Ok(match &s.range {
                            None => SegmentSpec::full(&s.name, s.component),
                            Some([a, b]) => SegmentSpec::arc(&s.name, s.component, a.value()?, b.value()?),
                        })
                    })
                    .collect::<Result<Vec<_>, LabError>>()?;
                DomainDescriptor::new(shape, specs)?
            }
        };
        Ok(dd)
    }

    pub fn layout(&self) -> Result<BoundaryLayout, LabError> {
        let conditions = self
            .boundary
            .iter()
            .map(|(tag, c)| {
                Ok((
                    tag.clone(),
                    match c {
                        ConditionSpec::Signorini => BoundaryCondition::Signorini,
                        ConditionSpec::Dirichlet(v) => BoundaryCondition::Dirichlet(v.build()?),
                    },
                ))
            })
            .collect::<Result<Vec<_>, LabError>>()?;
        Ok(BoundaryLayout { conditions })
    }

    pub fn is_pure_signorini(&self) -> bool {
        self.boundary.values().all(|c| matches!(c, ConditionSpec::Signorini))
    }

    /// Schema-level checks: tags exist and each has exactly one condition, targets are Signorini.
    pub fn validate(&self) -> Result<(), LabError> {
        if self.resolutions.is_empty() || self.resolutions.iter().any(|&r| r < 4) {
            return Err(LabError::Config("resolutions must be a non-empty list of integers >= 4".into()));
        }
        let dd = self.descriptor()?;
        let tags = dd.tag_names();
        for tag in self.boundary.keys() {
            if !tags.contains(tag) {
                return Err(LabError::Config(format!("boundary: unknown segment tag `{tag}` (domain has {tags:?})")));
            }
        }
        for tag in &tags {
            if !self.boundary.contains_key(tag) {
                return Err(LabError::Config(format!("boundary: segment `{tag}` has no condition")));
            }
        }
        if let Some(t) = &self.target {
            match self.boundary.get(&t.segment) {
                Some(ConditionSpec::Signorini) => {}
                Some(_) => return Err(LabError::Config(format!("target: segment `{}` is not Signorini", t.segment))),
                None => return Err(LabError::Config(format!("target: unknown segment tag `{}`", t.segment))),
            }
            if !(t.eps >= 0.0 && t.delta >= 0.0 && t.depth > 0.0) {
                return Err(LabError::Config("target: need eps >= 0, delta >= 0 and depth > 0".into()));
            }
        } else if !self.barriers.is_empty() {
            return Err(LabError::Config("barriers need a target segment".into()));
        }
        if let Some(s) = &self.solver.alpha_schedule {
            if s.is_empty() || s.iter().any(|&a| !(a > 0.0)) || s.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(LabError::Config("solver.alpha_schedule must be positive and strictly decreasing".into()));
            }
        }
        self.fields.f.build()?;
        self.fields.g.build()?;
        self.fields.psi.build()?;
        self.layout()?;
        Ok(())
    }
}

/// Polar point on the boundary component of `segment` at angle `theta` about the domain centre.
pub fn boundary_point(dd: &DomainDescriptor, segment: &str, theta: f64) -> Result<Point, LabError> {
    let seg = &dd.segments[dd.segment_index(segment)?];
    let c = dd.center();
    let r = match (&dd.kind, seg.component) {
        (DomainKind::Ring { inner, .. }, Component::Inner) => *inner,
        _ => dd.outer_radius(theta),
    };
    Ok([c[0] + r * theta.cos(), c[1] + r * theta.sin()])
}

impl BasePoint {
    pub fn resolve(&self, dd: &DomainDescriptor, segment: &str) -> Result<Point, LabError> {
        match self {
            BasePoint::Xy(p) => Ok(*p),
            BasePoint::Angle { angle } => boundary_point(dd, segment, angle.value()?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "t",
        "domain": {"kind": "ring", "inner": 1, "outer": 2},
        "fields": {"f": "-1"},
        "boundary": {"gamma0": "signorini", "gamma1": {"dirichlet": 0}}
    }"#;

    #[test]
    fn minimal_config_round_trips() {
        let c = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.resolutions, vec![32]);
        assert!(!c.is_pure_signorini());
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_tag_is_located() {
        let bad = MINIMAL.replace("gamma1", "gamma9");
        let e = ScenarioConfig::from_json(&bad).unwrap_err().to_string();
        assert!(e.contains("gamma9"), "{e}");
    }

    #[test]
    fn schema_violation_is_rejected() {
        let bad = MINIMAL.replace("\"fields\"", "\"feilds\"");
        assert!(matches!(ScenarioConfig::from_json(&bad), Err(LabError::Config(_))));
    }

    #[test]
    fn angles_accept_constant_expressions() {
        assert_eq!(Scalar::Expr("pi/4".into()).value().unwrap(), std::f64::consts::FRAC_PI_4);
        assert!(Scalar::Expr("x".into()).value().is_err());
    }

    #[test]
    fn catalog_fields_parse() {
        let f: FieldSpec =
            serde_json::from_str(r#"{"catalog": "radial-step", "radius": 1, "inside": -1, "outside": 0, "width": 0.1}"#)
                .unwrap();
        assert!(f.build().unwrap().has_analytic_derivatives());
    }
}
