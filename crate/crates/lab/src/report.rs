//! Machine-readable run reports.
//!
//! Every pass/fail flag sits next to the number it was decided on.

use serde::{Deserialize, Serialize};
use signorini_core::barriers::{BarrierCertificate, ComparisonReport};
use signorini_core::coincidence::StabilityReport;
use signorini_core::solver::{KktResiduals, Method};

use crate::config::ScenarioConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub resolution: usize,
    pub mesh: MeshSummary,
    /// `∫f + <g,1>`; `checked` is false when Dirichlet data make it unnecessary.
    pub compatibility: CompatibilityReport,
    pub balance: Option<BalanceReport>,
    pub solves: Vec<SolveReport>,
    pub continuation: Option<ContinuationReport>,
    pub coincidence: CoincidenceSummary,
    pub stability: Option<StabilityReport>,
    pub certificates: Vec<CertificateReport>,
    pub convergence: Option<ConvergenceTable>,
    pub refinement: Vec<RefinementRow>,
    pub trace: Vec<TraceRow>,
    /// `[x, y, u_h]` per node.
    pub field: Vec<[f64; 3]>,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
    pub timings: Timings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub nodes: usize,
    pub triangles: usize,
    pub boundary_edges: usize,
    pub h: f64,
    pub area: f64,
    pub euler_characteristic: i64,
    pub weakly_acute: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub checked: bool,
    pub value: f64,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub segment: String,
    pub eps: f64,
    pub delta: f64,
    pub alpha: f64,
    /// `-max(f + ΔΨ - αΨ)` over the collar samples.
    pub interior_margin: f64,
    /// `-max(g - ∂_νΨ)` over the segment nodes.
    pub flux_margin: f64,
    pub interior_pass: bool,
    pub flux_pass: bool,
    pub interior_samples: usize,
    pub flux_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub alpha: f64,
    pub method: Method,
    pub iterations: usize,
    pub residuals: KktResiduals,
    pub kkt_tol: f64,
    pub kkt_pass: bool,
    pub active: usize,
    /// Coverage of the target segment (of all Signorini edges without a target).
    pub coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationReport {
    pub schedule: Vec<f64>,
    /// `‖u_{α_{k+1}} - u_{α_k}‖_{H¹}` in the `K + M` norm.
    pub increments: Vec<f64>,
    /// Increments after the first step are strictly decreasing.
    pub decreasing_after_first: bool,
    pub stagnation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceSummary {
    pub tol: f64,
    pub nodes: Vec<usize>,
    /// Coverage of all Signorini edges.
    pub coverage: f64,
    pub segment: Option<String>,
    pub segment_coverage: Option<f64>,
    /// Target-segment nodes in the set over all target-segment constrained nodes.
    pub segment_nodes: Option<(usize, usize)>,
    /// `max (u_h - ψ_h)` over the target segment.
    pub segment_max_gap: Option<f64>,
    /// `∫ (g - ∂_νΨ)` over the covered edges.
    pub flux_balance_integral: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub certificate: BarrierCertificate,
    pub comparison: Option<ComparisonReport>,
    /// `max(0, max ũ_h)` used as `M`.
    pub m_measured: f64,
    /// `‖ũ_h‖∞` for reference.
    pub sup_abs: f64,
    pub asserted: bool,
    /// Comparison failures count only on weakly acute meshes.
    pub comparison_enforced: bool,
    pub pass: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub h: f64,
    pub l2_error: f64,
    pub h1_error: f64,
    /// Mean `∂_νu_h` over the contact segment from the discrete multipliers.
    pub flux: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub h1_slope: Option<f64>,
    pub exact_flux: f64,
    pub flux_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub resolution: usize,
    pub h: f64,
    pub coverage: f64,
}

/// One constrained node along a Signorini segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub segment: String,
    pub arc_length: f64,
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub gap: f64,
    pub multiplier: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    /// Human-readable comparison, e.g. `<= 1e-10`.
    pub requirement: String,
    pub pass: bool,
}

impl Assertion {
    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Assertion { name: name.into(), value, requirement: format!("<= {bound:e}"), pass: value <= bound }
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Assertion { name: name.into(), value, requirement: format!(">= {bound}"), pass: value >= bound }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Assertion { name: name.into(), value, requirement: format!("in [{lo}, {hi}]"), pass: (lo..=hi).contains(&value) }
    }

    /// A boolean outcome recorded together with the number it was derived from.
    pub fn flag(name: impl Into<String>, value: f64, requirement: impl Into<String>, pass: bool) -> Self {
        Assertion { name: name.into(), value, requirement: requirement.into(), pass }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub mesh_ms: f64,
    pub assemble_ms: f64,
    pub solve_ms: f64,
    pub certify_ms: f64,
    pub total_ms: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report with timings zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> RunReport {
        RunReport { timings: Timings::default(), ..self.clone() }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: resolution {}, {} nodes, coverage {:.4}",
            self.scenario, self.resolution, self.mesh.nodes, self.coincidence.coverage
        );
        if let (Some(seg), Some(c)) = (&self.coincidence.segment, self.coincidence.segment_coverage) {
            s.push_str(&format!(" ({seg}: {c:.4})"));
        }
        s.push_str(if self.pass { " PASS" } else { " FAIL" });
        s
    }
}
