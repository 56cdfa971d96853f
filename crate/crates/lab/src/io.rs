//! File output: reports, meshes, COO matrices and gap tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use signorini_core::geometry::TriMesh;
use signorini_core::sparse::CsrMatrix;

use crate::pipeline::Artifacts;
use crate::report::{RunReport, TraceRow};
use crate::LabError;

fn write(path: &Path, text: &str) -> Result<(), LabError> {
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn read_report(path: &Path) -> Result<RunReport, LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| LabError::Json { path: path.to_path_buf(), source: e })
}

/// `x y` per node.
pub fn nodes_text(mesh: &TriMesh) -> String {
    let mut s = String::new();
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:.17e} {:.17e}", p[0], p[1]);
    }
    s
}

/// `i j k` per triangle, zero-based.
pub fn elements_text(mesh: &TriMesh) -> String {
    let mut s = String::new();
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    s
}

/// `i j tag` per boundary edge.
pub fn edges_text(mesh: &TriMesh) -> String {
    let mut s = String::new();
    for e in mesh.boundary_edges() {
        let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], mesh.tags()[e.tag]);
    }
    s
}

/// `row col value` per stored entry, zero-based, preceded by a `% n nnz` line.
pub fn coo_text(a: &CsrMatrix) -> String {
    let mut s = format!("% {} {}\n", a.dim(), a.nnz());
    for (i, j, v) in a.to_coo() {
        let _ = writeln!(s, "{i} {j} {v:.17e}");
    }
    s
}

pub fn gap_csv(rows: &[TraceRow]) -> String {
    let mut s = String::from("segment,arc_length,node,x,y,gap,multiplier\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{:e},{:e}", r.segment, r.arc_length, r.node, r.x, r.y, r.gap, r.multiplier);
    }
    s
}

/// Writes `<name>.json`, `.node`, `.ele`, `.edge`, `.K.coo`, `.M.coo` and `.gap.csv` into `dir`.
pub fn write_outputs(dir: &Path, art: &Artifacts) -> Result<Vec<PathBuf>, LabError> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let name = &art.report.scenario;
    let mesh = &art.stage.mesh;
    let sys = &art.stage.system;
    let files = [
        ("json", art.report.to_json()),
        ("node", nodes_text(mesh)),
        ("ele", elements_text(mesh)),
        ("edge", edges_text(mesh)),
        ("K.coo", coo_text(&sys.stiffness)),
        ("M.coo", coo_text(&sys.mass)),
        ("gap.csv", gap_csv(&art.report.trace)),
    ];
    let mut out = Vec::new();
    for (ext, text) in files {
        let p = dir.join(format!("{name}.{ext}"));
        write(&p, &text)?;
        out.push(p);
    }
    Ok(out)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), LabError> {
    write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use signorini_core::geometry::{build_mesh, DomainDescriptor};

    #[test]
    fn mesh_text_has_one_line_per_entity() {
        let mesh = build_mesh(&DomainDescriptor::ring(1.0, 2.0).unwrap(), 16).unwrap();
        assert_eq!(nodes_text(&mesh).lines().count(), mesh.node_count());
        assert_eq!(elements_text(&mesh).lines().count(), mesh.triangles().len());
        assert_eq!(edges_text(&mesh).lines().count(), mesh.boundary_edges().len());
    }

    #[test]
    fn coo_round_trips() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)]);
        let text = coo_text(&a);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("% 2 4"));
        let t: Vec<(usize, usize, f64)> = lines
            .map(|l| {
                let v: Vec<&str> = l.split_whitespace().collect();
                (v[0].parse().unwrap(), v[1].parse().unwrap(), v[2].parse().unwrap())
            })
            .collect();
        assert_eq!(CsrMatrix::from_triplets(2, &t), a);
    }
}
