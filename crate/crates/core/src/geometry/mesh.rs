use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::domain::{DomainDescriptor, DomainKind};
use crate::math::{self, TAU};
use crate::{Error, Point, Result};

/// Boundary edge oriented with the domain on its left, carrying a segment tag index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: usize,
}

/// Two-dimensional triangle mesh with tagged boundary edges.
#[derive(Clone, Debug)]
pub struct TriMesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    tags: Vec<String>,
    h: f64,
}

impl TriMesh {
    /// Builds a mesh from raw nodes and counter-clockwise triangles.
    ///
    /// Boundary edges are detected topologically and tagged by `classify`,
    /// evaluated at each edge midpoint.
    pub fn from_parts(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        tags: Vec<String>,
        classify: impl Fn(Point) -> Option<usize>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        for (e, t) in triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= nodes.len()) {
                return Err(Error::InvalidMesh(format!("triangle {e} references a missing node")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!("triangle {e} repeats a vertex")));
            }
            let area = math::signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
            if area < 1e-14 {
                return Err(Error::DegenerateTriangle { element: e, area });
            }
        }
        // directed edge -> count; an interior edge appears once in each direction
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &triangles {
            for k in 0..3 {
                let key = (t[k], t[(k + 1) % 3]);
                *directed.entry(key).or_insert(0) += 1;
            }
        }
        let mut boundary_edges = Vec::new();
        for (&(a, b), &count) in &directed {
            if count > 1 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({a}, {b}) is traversed twice in the same direction (inconsistent orientation)"
                )));
            }
            if !directed.contains_key(&(b, a)) {
                let mid = math::scale(math::add(nodes[a], nodes[b]), 0.5);
                let tag = classify(mid).ok_or_else(|| {
                    Error::InvalidMesh(format!("boundary edge ({a}, {b}) matches no segment tag"))
                })?;
                if tag >= tags.len() {
                    return Err(Error::InvalidMesh(format!("tag index {tag} out of range")));
                }
                boundary_edges.push(BoundaryEdge { nodes: [a, b], tag });
            }
        }
        let mut h: f64 = 0.0;
        for t in &triangles {
            for k in 0..3 {
                h = h.max(math::dist(nodes[t[k]], nodes[t[(k + 1) % 3]]));
            }
        }
        Ok(TriMesh { nodes, triangles, boundary_edges, tags, h })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Longest edge length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn tag_index(&self, name: &str) -> Result<usize> {
        self.tags.iter().position(|t| t == name).ok_or_else(|| Error::UnknownSegment(name.to_string()))
    }

    pub fn triangle_points(&self, e: usize) -> [Point; 3] {
        let t = self.triangles[e];
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]
    }

    pub fn triangle_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.triangle_points(e);
        math::signed_area(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|e| self.triangle_area(e)).sum()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        let interior = (3 * self.triangles.len() - self.boundary_edges.len()) / 2;
        interior + self.boundary_edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    pub fn edge_length(&self, edge: &BoundaryEdge) -> f64 {
        math::dist(self.nodes[edge.nodes[0]], self.nodes[edge.nodes[1]])
    }

    /// Outward unit normal of a boundary edge.
    pub fn outward_normal(&self, edge: &BoundaryEdge) -> Point {
        let d = math::sub(self.nodes[edge.nodes[1]], self.nodes[edge.nodes[0]]);
        let l = math::norm(d);
        [d[1] / l, -d[0] / l]
    }

    pub fn segment_edges(&self, tag: usize) -> impl Iterator<Item = &BoundaryEdge> + '_ {
        self.boundary_edges.iter().filter(move |e| e.tag == tag)
    }

    /// Sorted nodes touched by edges of segment `tag`.
    pub fn segment_nodes(&self, tag: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.segment_edges(tag).flat_map(|e| e.nodes).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn segment_length(&self, tag: usize) -> f64 {
        self.segment_edges(tag).map(|e| self.edge_length(e)).sum()
    }

    /// Sorted nodes on the whole boundary.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.boundary_edges.iter().flat_map(|e| e.nodes).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Half the length of the boundary edges of segment `tag` adjacent to `node`.
    pub fn lumped_length(&self, node: usize, tag: usize) -> f64 {
        self.segment_edges(tag)
            .filter(|e| e.nodes.contains(&node))
            .map(|e| 0.5 * self.edge_length(e))
            .sum()
    }

    /// Ordered node chains along segment `tag`, following edge orientation.
    ///
    /// A closed component yields one chain whose first and last node coincide.
    pub fn segment_chains(&self, tag: usize) -> Vec<Vec<usize>> {
        let edges: Vec<[usize; 2]> = self.segment_edges(tag).map(|e| e.nodes).collect();
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        let mut has_pred: BTreeMap<usize, bool> = BTreeMap::new();
        for e in &edges {
            next.insert(e[0], e[1]);
            has_pred.insert(e[1], true);
        }
        let mut used: BTreeMap<usize, bool> = BTreeMap::new();
        let mut chains = Vec::new();
        let starts: Vec<usize> = edges.iter().map(|e| e[0]).filter(|a| !has_pred.contains_key(a)).collect();
        for s in starts {
            let mut chain = vec![s];
            let mut cur = s;
            while let Some(&n) = next.get(&cur) {
                used.insert(cur, true);
                chain.push(n);
                cur = n;
            }
            chains.push(chain);
        }
        for e in &edges {
            if used.contains_key(&e[0]) {
                continue;
            }
            let s = e[0];
            let mut chain = vec![s];
            let mut cur = s;
            loop {
                used.insert(cur, true);
                let n = next[&cur];
                chain.push(n);
                if n == s {
                    break;
                }
                cur = n;
            }
            chains.push(chain);
        }
        chains
    }

    /// Returns a copy with nodes relabelled: new index of old node `i` is `perm[i]`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nodes.len() {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        let mut nodes = vec![[0.0; 2]; self.nodes.len()];
        for (old, &new) in perm.iter().enumerate() {
            nodes[new] = self.nodes[old];
        }
        let triangles = self.triangles.iter().map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]]).collect();
        let mut boundary_edges: Vec<BoundaryEdge> = self
            .boundary_edges
            .iter()
            .map(|e| BoundaryEdge { nodes: [perm[e.nodes[0]], perm[e.nodes[1]]], tag: e.tag })
            .collect();
        boundary_edges.sort_by_key(|e| e.nodes);
        Ok(TriMesh { nodes, triangles, boundary_edges, tags: self.tags.clone(), h: self.h })
    }

    /// Returns a copy with the triangle list reordered (`order[k]` is the old index of new triangle `k`).
    pub fn reorder_triangles(&self, order: &[usize]) -> Self {
        let triangles = order.iter().map(|&k| self.triangles[k]).collect();
        TriMesh { triangles, ..self.clone() }
    }

    /// Whether every interior edge has opposite angles summing to at most π and
    /// every boundary edge has an opposite angle of at most π/2 (Delaunay-type
    /// condition giving an M-matrix stiffness).
    pub fn is_weakly_acute(&self, tol: f64) -> bool {
        let mut cot_sum: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in 0..self.triangles.len() {
            let t = self.triangles[e];
            let p = self.triangle_points(e);
            for k in 0..3 {
                let (i, j, o) = (k, (k + 1) % 3, (k + 2) % 3);
                let u = math::sub(p[i], p[o]);
                let v = math::sub(p[j], p[o]);
                let cot = math::dot(u, v) / math::cross(u, v).abs();
                let key = if t[i] < t[j] { (t[i], t[j]) } else { (t[j], t[i]) };
                *cot_sum.entry(key).or_insert(0.0) += cot;
            }
        }
        cot_sum.values().all(|&c| c >= -tol)
    }
}

/// Triangulates a domain at the given resolution.
///
/// Resolution is the number of angular divisions for rings, the number of
/// boundary divisions per polygon side group for polygons, and four times the
/// number of concentric node rings for disks and stars.
pub fn build_mesh(dd: &DomainDescriptor, resolution: usize) -> Result<TriMesh> {
    if resolution < 4 {
        return Err(Error::InvalidArgument(format!("resolution must be at least 4, got {resolution}")));
    }
    match &dd.kind {
        DomainKind::Ring { inner, outer } => {
            let radial = libm::ceil(math::ln(outer / inner) * resolution as f64 / TAU - 1e-9) as usize;
            ring_mesh(dd, resolution, radial.max(2))
        }
        DomainKind::Disk { .. } | DomainKind::Star { .. } => {
            let rings = resolution.div_ceil(4);
            radial_hex_mesh(dd, rings)
        }
        DomainKind::Polygon { vertices } => {
            let per_side = resolution.div_ceil(vertices.len()).max(1);
            polygon_fan_mesh(dd, vertices, per_side)
        }
    }
}

/// Structured ring mesh with `angular` divisions and `radial` geometrically graded layers.
///
/// Node `k * angular + i` sits at radius `R0 (R1/R0)^(k/radial)` and angle `2π i / angular`,
/// which keeps the cells close to squares.
pub fn ring_mesh(dd: &DomainDescriptor, angular: usize, radial: usize) -> Result<TriMesh> {
    let DomainKind::Ring { inner, outer } = dd.kind else {
        return Err(Error::InvalidArgument("ring_mesh needs a ring descriptor".into()));
    };
    if angular < 3 || radial < 1 {
        return Err(Error::InvalidArgument("ring mesh needs >= 3 angular and >= 1 radial divisions".into()));
    }
    let mut nodes = Vec::with_capacity(angular * (radial + 1));
    for k in 0..=radial {
        let r = if k == radial { outer } else { inner * math::pow(outer / inner, k as f64 / radial as f64) };
        for i in 0..angular {
            let t = TAU * i as f64 / angular as f64;
            nodes.push([r * math::cos(t), r * math::sin(t)]);
        }
    }
    let id = |k: usize, i: usize| k * angular + (i % angular);
    let mut triangles = Vec::with_capacity(2 * angular * radial);
    for k in 0..radial {
        for i in 0..angular {
            let (a, b, c, d) = (id(k, i), id(k, i + 1), id(k + 1, i + 1), id(k + 1, i));
            triangles.push([a, d, c]);
            triangles.push([a, c, b]);
        }
    }
    TriMesh::from_parts(nodes, triangles, dd.tag_names(), |x| dd.classify(x))
}

/// Concentric hexagonal-lattice mesh: ring `k` carries `6k` nodes, mapped radially
/// onto the domain's boundary radius.
fn radial_hex_mesh(dd: &DomainDescriptor, rings: usize) -> Result<TriMesh> {
    let c = dd.center();
    let mut nodes = vec![c];
    for k in 1..=rings {
        let t = k as f64 / rings as f64;
        for j in 0..6 * k {
            let theta = TAU * j as f64 / (6 * k) as f64;
            let r = t * dd.outer_radius(theta);
            nodes.push([c[0] + r * math::cos(theta), c[1] + r * math::sin(theta)]);
        }
    }
    // first node index of ring k
    let start = |k: usize| if k == 0 { 0 } else { 1 + 3 * k * (k - 1) };
    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for k in 1..=rings {
        let inner = |m: usize| if k == 1 { 0 } else { start(k - 1) + m % (6 * (k - 1)) };
        let outer = |m: usize| start(k) + m % (6 * k);
        for s in 0..6 {
            let (i0, o0) = (s * (k - 1), s * k);
            for m in 0..k {
                triangles.push([outer(o0 + m), outer(o0 + m + 1), inner(i0 + m)]);
            }
            for m in 0..k.saturating_sub(1) {
                triangles.push([inner(i0 + m), outer(o0 + m + 1), inner(i0 + m + 1)]);
            }
        }
    }
    orient_ccw(&nodes, &mut triangles);
    TriMesh::from_parts(nodes, triangles, dd.tag_names(), |x| dd.classify(x))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum FanKey {
    Center,
    Spoke(usize, usize),
    Inner(usize, usize, usize),
}

/// Structured right-triangle mesh of an axis-aligned rectangle with `nx × ny` cells.
///
/// Each cell is split along the diagonal whose direction alternates in a
/// checkerboard pattern; all angles are at most π/2.
pub fn grid_mesh(dd: &DomainDescriptor, nx: usize, ny: usize) -> Result<TriMesh> {
    let DomainKind::Polygon { vertices } = &dd.kind else {
        return Err(Error::InvalidDomain("grid meshes need a rectangle polygon".into()));
    };
    let xs: Vec<f64> = vertices.iter().map(|v| v[0]).collect();
    let ys: Vec<f64> = vertices.iter().map(|v| v[1]).collect();
    let (x0, x1) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.iter().copied().fold(f64::INFINITY, f64::min), ys.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let corner = |v: &Point| (v[0] == x0 || v[0] == x1) && (v[1] == y0 || v[1] == y1);
    if vertices.len() != 4 || !vertices.iter().all(corner) {
        return Err(Error::InvalidDomain("grid meshes need an axis-aligned rectangle".into()));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument("grid needs at least one cell per direction".into()));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([x0 + (x1 - x0) * i as f64 / nx as f64, y0 + (y1 - y0) * j as f64 / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    TriMesh::from_parts(nodes, triangles, dd.tag_names(), |x| dd.classify(x))
}

fn polygon_fan_mesh(dd: &DomainDescriptor, vertices: &[Point], n: usize) -> Result<TriMesh> {
    let m = vertices.len();
    let c = dd.center();
    let mut ids: BTreeMap<FanKey, usize> = BTreeMap::new();
    let mut nodes: Vec<Point> = Vec::new();
    let mut node_id = |key: FanKey, p: Point, nodes: &mut Vec<Point>| -> usize {
        *ids.entry(key).or_insert_with(|| {
            nodes.push(p);
            nodes.len() - 1
        })
    };
    // barycentric lattice point (a, b) of fan i: c + a/n (v_i - c) + b/n (v_{i+1} - c)
    let mut lattice = |i: usize, a: usize, b: usize, nodes: &mut Vec<Point>| -> usize {
        let vi = math::sub(vertices[i], c);
        let vj = math::sub(vertices[(i + 1) % m], c);
        let p = math::add(c, math::add(math::scale(vi, a as f64 / n as f64), math::scale(vj, b as f64 / n as f64)));
        let key = if a == 0 && b == 0 {
            FanKey::Center
        } else if b == 0 {
            FanKey::Spoke(i, a)
        } else if a == 0 {
            FanKey::Spoke((i + 1) % m, b)
        } else {
            FanKey::Inner(i, a, b)
        };
        node_id(key, p, nodes)
    };
    let mut triangles = Vec::new();
    for i in 0..m {
        for a in 0..n {
            for b in 0..n - a {
                let p00 = lattice(i, a, b, &mut nodes);
                let p10 = lattice(i, a + 1, b, &mut nodes);
                let p01 = lattice(i, a, b + 1, &mut nodes);
                triangles.push([p00, p10, p01]);
                if a + b + 1 < n {
                    let p11 = lattice(i, a + 1, b + 1, &mut nodes);
                    triangles.push([p10, p11, p01]);
                }
            }
        }
    }
    orient_ccw(&nodes, &mut triangles);
    TriMesh::from_parts(nodes, triangles, dd.tag_names(), |x| dd.classify(x))
}

fn orient_ccw(nodes: &[Point], triangles: &mut [[usize; 3]]) {
    for t in triangles.iter_mut() {
        if math::signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Component, SegmentSpec};
    use crate::math::PI;

    #[test]
    fn ring_8x3_counts() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let m = ring_mesh(&dd, 8, 2).unwrap();
        assert_eq!(m.node_count(), 24);
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(build_mesh(&dd, 8).unwrap().node_count(), 24);
    }

    #[test]
    fn disk_is_contractible() {
        let dd = DomainDescriptor::disk(1.0).unwrap();
        for res in [4, 5, 16, 33] {
            assert_eq!(build_mesh(&dd, res).unwrap().euler_characteristic(), 1);
        }
    }

    #[test]
    fn ring_area_within_two_percent() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let m = build_mesh(&dd, 32).unwrap();
        let exact = PI * 3.0;
        assert!(m.area() < exact);
        assert!((exact - m.area()) / exact < 0.02);
    }

    #[test]
    fn boundary_tags_and_normals() {
        let dd = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let m = build_mesh(&dd, 16).unwrap();
        let g0 = m.tag_index("gamma0").unwrap();
        for e in m.segment_edges(g0) {
            let n = m.outward_normal(e);
            assert!((math::norm(n) - 1.0).abs() < 1e-12);
            let mid = math::scale(math::add(m.nodes()[e.nodes[0]], m.nodes()[e.nodes[1]]), 0.5);
            // outward normal of the hole boundary points to the centre
            assert!(math::dot(n, mid) < 0.0);
        }
        assert_eq!(m.segment_nodes(g0).len(), 16);
        assert!(matches!(m.tag_index("nope"), Err(Error::UnknownSegment(_))));
    }

    #[test]
    fn every_boundary_edge_in_one_triangle() {
        let dd = DomainDescriptor::star(1.0, 0.2, 5).unwrap();
        let m = build_mesh(&dd, 24).unwrap();
        for e in m.boundary_edges() {
            let owners = m
                .triangles()
                .iter()
                .filter(|t| t.contains(&e.nodes[0]) && t.contains(&e.nodes[1]))
                .count();
            assert_eq!(owners, 1);
        }
    }

    #[test]
    fn polygon_mesh_is_exact_and_conforming() {
        let dd = DomainDescriptor::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let m = build_mesh(&dd, 16).unwrap();
        assert!((m.area() - 1.0).abs() < 1e-14);
        assert_eq!(m.euler_characteristic(), 1);
        assert!((m.segment_length(0) - 4.0).abs() < 1e-14);
        assert!(m.is_weakly_acute(1e-12));
    }

    #[test]
    fn refinement_shrinks_h() {
        let ring = DomainDescriptor::ring(1.0, 2.0).unwrap();
        let disk = DomainDescriptor::disk(1.0).unwrap();
        for dd in [ring, disk] {
            for r in [8, 16, 32] {
                let h1 = build_mesh(&dd, r).unwrap().h();
                let h2 = build_mesh(&dd, 2 * r).unwrap().h();
                assert!(h2 <= 0.6 * h1, "{h1} -> {h2}");
            }
        }
    }

    #[test]
    fn segment_chain_follows_orientation() {
        let dd = DomainDescriptor::new(
            DomainKind::Disk { radius: 1.0 },
            vec![
                SegmentSpec::arc("arc", Component::Outer, -PI / 4.0, PI / 4.0),
                SegmentSpec::arc("rest", Component::Outer, PI / 4.0, 7.0 * PI / 4.0),
            ],
        )
        .unwrap();
        let m = build_mesh(&dd, 32).unwrap();
        let chains = m.segment_chains(0);
        assert_eq!(chains.len(), 1);
        let ch = &chains[0];
        let len: f64 = ch.windows(2).map(|w| math::dist(m.nodes()[w[0]], m.nodes()[w[1]])).sum();
        assert!((len - m.segment_length(0)).abs() < 1e-14);
        let full = m.segment_chains(1);
        assert_eq!(full.len(), 1);
        let closed = DomainDescriptor::disk(1.0).unwrap();
        let mc = build_mesh(&closed, 8).unwrap();
        let c = &mc.segment_chains(0)[0];
        assert_eq!(c.first(), c.last());
    }

    #[test]
    fn grid_mesh_is_weakly_acute() {
        let dd = DomainDescriptor::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]).unwrap();
        let m = grid_mesh(&dd, 5, 3).unwrap();
        assert_eq!(m.node_count(), 24);
        assert_eq!(m.euler_characteristic(), 1);
        assert!((m.area() - 2.0).abs() < 1e-12);
        assert!(m.is_weakly_acute(1e-12));
        let tri = DomainDescriptor::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(grid_mesh(&tri, 2, 2).is_err());
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        let err = TriMesh::from_parts(nodes, vec![[0, 1, 2]], vec!["b".into()], |_| Some(0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateTriangle { element: 0, .. }));
    }
}
