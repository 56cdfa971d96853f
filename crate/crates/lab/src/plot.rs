//! CSV series extracted from run reports.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::report::RunReport;
use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// `segment, arc_length, gap, multiplier` along the Signorini segments.
    BoundaryTrace,
    /// `x, y, u` per node.
    FieldHeatmap,
    /// `alpha, coverage` over the continuation.
    CoverageVsAlpha,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::BoundaryTrace, PlotKind::FieldHeatmap, PlotKind::CoverageVsAlpha];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::BoundaryTrace => "boundary-trace",
            PlotKind::FieldHeatmap => "field-heatmap",
            PlotKind::CoverageVsAlpha => "coverage-vs-alpha",
        }
    }
}

impl FromStr for PlotKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        PlotKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| LabError::Plot {
            kind: s.into(),
            msg: format!(
                "unknown plot kind; expected one of {}",
                PlotKind::ALL.map(PlotKind::name).join(", ")
            ),
        })
    }
}

fn missing(kind: PlotKind, what: &str) -> LabError {
    LabError::Plot { kind: kind.name().into(), msg: format!("report has no {what}") }
}

/// CSV text with a header row.
pub fn render(report: &RunReport, kind: PlotKind) -> Result<String, LabError> {
    let mut s = String::new();
    match kind {
        PlotKind::BoundaryTrace => {
            if report.trace.is_empty() {
                return Err(missing(kind, "Signorini boundary trace"));
            }
            s.push_str("segment,arc_length,gap,multiplier\n");
            for r in &report.trace {
                let _ = writeln!(s, "{},{},{:e},{:e}", r.segment, r.arc_length, r.gap, r.multiplier);
            }
        }
        PlotKind::FieldHeatmap => {
            if report.field.is_empty() {
                return Err(missing(kind, "nodal field"));
            }
            s.push_str("x,y,u\n");
            for [x, y, u] in &report.field {
                let _ = writeln!(s, "{x},{y},{u:e}");
            }
        }
        PlotKind::CoverageVsAlpha => {
            if report.continuation.is_none() {
                return Err(missing(kind, "alpha continuation"));
            }
            s.push_str("alpha,coverage\n");
            for r in &report.solves {
                let _ = writeln!(s, "{:e},{}", r.alpha, r.coverage);
            }
        }
    }
    Ok(s)
}
