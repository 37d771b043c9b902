//! Conforming triangulations of polygonal (and disk) domains with tagged boundary and
//! interface edges, plus uniform and graded refinement.

mod builders;
mod io;
mod refine;
mod triangulate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{orient, point_segment_distance, Point};

pub use builders::{broken_line_disk_mesh, delta_box_mesh, disk_mesh, domain_mesh, sector_mesh, ArtificialBc, InterfaceShape};
pub use io::{read_mesh, write_mesh};
pub use refine::{
    arc_edge_marks, graded_marker, refine_by, refine_graded, refine_to_size, refine_uniform, GradingPolicy, DEFAULT_NODE_CAP,
};
pub use triangulate::triangulate;

/// Boundary condition carried by a group of edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// `du/dn = alpha * weight * u`.
    Robin,
    Neumann,
    Dirichlet,
    /// Interior curve carrying a delta interaction of strength `alpha * weight`.
    Interface,
}

/// Exact geometry of the curve an edge tag discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeGeometry {
    Segment { a: Point, b: Point },
    /// Counter-clockwise arc from `a` to `b` on the circle `(center, radius)`; at most a
    /// quarter turn.
    Arc { a: Point, b: Point, center: Point, radius: f64 },
}

impl EdgeGeometry {
    pub fn distance(&self, p: Point) -> f64 {
        match *self {
            EdgeGeometry::Segment { a, b } => point_segment_distance(p, a, b),
            EdgeGeometry::Arc { a, b, center, radius } => {
                let v = p.sub(center);
                let inside = a.sub(center).cross(v) >= 0.0 && v.cross(b.sub(center)) >= 0.0;
                if inside {
                    (v.norm() - radius).abs()
                } else {
                    p.dist(a).min(p.dist(b))
                }
            }
        }
    }

    /// Where a split of the straight edge `(p, q)` lying on this curve puts the new node.
    pub fn split_point(&self, p: Point, q: Point) -> Point {
        let m = p.midpoint(q);
        match *self {
            EdgeGeometry::Segment { .. } => m,
            EdgeGeometry::Arc { center, radius, .. } => {
                let v = m.sub(center);
                center.add(v.scale(radius / v.norm()))
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            EdgeGeometry::Segment { a, b } => a.dist(b),
            EdgeGeometry::Arc { a, b, center, radius } => {
                let u = a.sub(center);
                let v = b.sub(center);
                radius * u.cross(v).atan2(u.dot(v)).abs()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeTag {
    pub kind: EdgeKind,
    pub weight: f64,
    pub geometry: EdgeGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedEdge {
    pub nodes: [usize; 2],
    pub tag: usize,
}

/// A conforming triangulation. Triangles are counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<TaggedEdge>,
    pub interface_edges: Vec<TaggedEdge>,
    pub tags: Vec<EdgeTag>,
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub nodes: usize,
    pub triangles: usize,
    pub boundary_edges: usize,
    pub interface_edges: usize,
    /// Degrees.
    pub min_angle: f64,
    pub max_angle: f64,
    pub min_edge: f64,
    /// Smallest and largest diameter among triangles with a boundary or interface edge.
    pub min_boundary_diameter: f64,
    pub max_boundary_diameter: f64,
    pub violations: Vec<String>,
}

impl Mesh {
    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * orient(a, b, c)
    }

    /// Longest edge of triangle `t`.
    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        a.dist(b).max(b.dist(c)).max(c.dist(a))
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, e: &TaggedEdge) -> f64 {
        self.nodes[e.nodes[0]].dist(self.nodes[e.nodes[1]])
    }

    /// Summed length of boundary edges per tag.
    pub fn boundary_length_by_tag(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.tags.len()];
        for e in self.boundary_edges.iter().chain(&self.interface_edges) {
            out[e.tag] += self.edge_length(e);
        }
        out
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges.iter().map(|e| self.edge_length(e)).sum()
    }

    pub fn interface_length(&self) -> f64 {
        self.interface_edges.iter().map(|e| self.edge_length(e)).sum()
    }

    pub fn scaled(&self, t: f64) -> Mesh {
        let sp = |p: Point| p.scale(t);
        let mut m = self.clone();
        m.nodes.iter_mut().for_each(|p| *p = sp(*p));
        for tag in &mut m.tags {
            tag.geometry = match tag.geometry {
                EdgeGeometry::Segment { a, b } => EdgeGeometry::Segment { a: sp(a), b: sp(b) },
                EdgeGeometry::Arc { a, b, center, radius } => {
                    EdgeGeometry::Arc { a: sp(a), b: sp(b), center: sp(center), radius: radius * t }
                }
            };
        }
        m
    }

    /// Nodes lying on a Dirichlet edge.
    pub fn dirichlet_nodes(&self) -> Vec<bool> {
        let mut fixed = vec![false; self.nodes.len()];
        for e in &self.boundary_edges {
            if self.tags[e.tag].kind == EdgeKind::Dirichlet {
                fixed[e.nodes[0]] = true;
                fixed[e.nodes[1]] = true;
            }
        }
        fixed
    }

    pub(crate) fn edge_incidence(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut inc: HashMap<(usize, usize), Vec<usize>> = HashMap::with_capacity(self.triangles.len() * 2);
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                inc.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default().push(t);
            }
        }
        inc
    }

    /// Lists broken invariants: conformity, orientation, tagging and tag geometry.
    pub fn audit(&self) -> Vec<String> {
        let mut v = Vec::new();
        let n = self.nodes.len();
        let scale = self.length_scale();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                v.push(format!("triangle {t} references a missing node"));
                return v;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                v.push(format!("triangle {t} repeats a node"));
                continue;
            }
            let a = self.triangle_area(t);
            if !(a > 0.0) {
                v.push(format!("triangle {t} has non-positive area {a:.3e}"));
            }
        }
        let inc = self.edge_incidence();
        let mut tagged: HashMap<(usize, usize), bool> = HashMap::new();
        for e in &self.boundary_edges {
            if e.tag >= self.tags.len() {
                v.push(format!("boundary edge {:?} has unknown tag {}", e.nodes, e.tag));
                continue;
            }
            let k = edge_key(e.nodes[0], e.nodes[1]);
            tagged.insert(k, true);
            match inc.get(&k).map(Vec::len) {
                Some(1) => {}
                other => v.push(format!("boundary edge {:?} belongs to {} triangles", e.nodes, other.unwrap_or(0))),
            }
        }
        for e in &self.interface_edges {
            if e.tag >= self.tags.len() {
                v.push(format!("interface edge {:?} has unknown tag {}", e.nodes, e.tag));
                continue;
            }
            let k = edge_key(e.nodes[0], e.nodes[1]);
            tagged.insert(k, false);
            match inc.get(&k).map(Vec::len) {
                Some(2) => {}
                other => v.push(format!("interface edge {:?} belongs to {} triangles", e.nodes, other.unwrap_or(0))),
            }
        }
        let mut keys: Vec<_> = inc.iter().collect();
        keys.sort_by_key(|(k, _)| **k);
        for (k, ts) in keys {
            if ts.len() > 2 {
                v.push(format!("edge {k:?} shared by {} triangles", ts.len()));
            } else if ts.len() == 1 && tagged.get(k) != Some(&true) {
                v.push(format!("edge {k:?} lies on the boundary but is untagged"));
            }
        }
        for e in self.boundary_edges.iter().chain(&self.interface_edges) {
            if e.tag >= self.tags.len() {
                continue;
            }
            let g = self.tags[e.tag].geometry;
            for &i in &e.nodes {
                let d = g.distance(self.nodes[i]);
                if d > 1e-10 * scale {
                    v.push(format!("node {i} of edge {:?} is {d:.3e} off its tagged curve", e.nodes));
                }
            }
        }
        v
    }

    fn length_scale(&self) -> f64 {
        let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &self.nodes {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        lo.dist(hi).max(f64::MIN_POSITIVE)
    }

    pub fn stats(&self) -> MeshStats {
        let mut min_angle = f64::INFINITY;
        let mut max_angle: f64 = 0.0;
        let mut min_edge = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for k in 0..3 {
                let a = p[k];
                let b = p[(k + 1) % 3];
                let c = p[(k + 2) % 3];
                min_edge = min_edge.min(a.dist(b));
                let u = b.sub(a);
                let w = c.sub(a);
                let ang = u.cross(w).abs().atan2(u.dot(w)).to_degrees();
                min_angle = min_angle.min(ang);
                max_angle = max_angle.max(ang);
            }
        }
        let inc = self.edge_incidence();
        let mut min_bd = f64::INFINITY;
        let mut max_bd: f64 = 0.0;
        for e in self.boundary_edges.iter().chain(&self.interface_edges) {
            if let Some(ts) = inc.get(&edge_key(e.nodes[0], e.nodes[1])) {
                for &t in ts {
                    let d = self.triangle_diameter(t);
                    min_bd = min_bd.min(d);
                    max_bd = max_bd.max(d);
                }
            }
        }
        MeshStats {
            nodes: self.nodes.len(),
            triangles: self.triangles.len(),
            boundary_edges: self.boundary_edges.len(),
            interface_edges: self.interface_edges.len(),
            min_angle,
            max_angle,
            min_edge,
            min_boundary_diameter: min_bd,
            max_boundary_diameter: max_bd,
            violations: self.audit(),
        }
    }
}

/// Quality report of a mesh.
pub fn mesh_stats(m: &Mesh) -> MeshStats {
    m.stats()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;

    #[test]
    fn square_stats() {
        let m = triangulate(&Polygon::unit_square()).unwrap();
        let s = m.stats();
        assert!((s.min_angle - 45.0).abs() < 1e-12);
        assert!(s.violations.is_empty());
        let r = refine_uniform(&m, 2).unwrap();
        let s2 = r.stats();
        assert!((s2.min_angle - 45.0).abs() < 1e-9);
        assert!((s2.max_angle - 90.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_triangle_flagged() {
        let mut m = triangulate(&Polygon::unit_square()).unwrap();
        m.nodes.push(Point::new(0.5, 0.5));
        let n = m.nodes.len() - 1;
        m.triangles.push([0, 2, n]);
        let v = m.stats().violations;
        assert!(v.iter().any(|s| s.contains("non-positive area")));
    }

    #[test]
    fn untagged_boundary_flagged() {
        let mut m = triangulate(&Polygon::unit_square()).unwrap();
        m.boundary_edges.pop();
        assert!(m.audit().iter().any(|s| s.contains("untagged")));
    }

    #[test]
    fn arc_distance() {
        let g = EdgeGeometry::Arc {
            a: Point::new(1.0, 0.0),
            b: Point::new(0.0, 1.0),
            center: Point::new(0.0, 0.0),
            radius: 1.0,
        };
        assert!((g.distance(Point::new(0.5, 0.5)) - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((g.distance(Point::new(2.0, -1.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.length() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
