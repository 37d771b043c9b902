use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{edge_key, EdgeGeometry, EdgeKind, Mesh, TaggedEdge};
use crate::error::{Error, Result};
use crate::geometry::{orient, point_segment_distance, Corner, Point};

pub const DEFAULT_NODE_CAP: usize = 2_000_000;

/// Geometric grading toward the Robin boundary (or delta interface) and corners.
///
/// Moving away from the boundary, band `j = 0, 1, ...` has width `1/alpha` and holds
/// elements of size `first_layer / ratio^j`. Around a listed corner, element
/// size drops to `first_layer * ratio^k` inside the radius `first_layer * ratio^(k-2)`,
/// for `k = 1..=layers`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradingPolicy {
    pub alpha: f64,
    pub layers: usize,
    pub ratio: f64,
    pub first_layer: f64,
    /// Global cap on element diameter.
    pub max_size: Option<f64>,
    pub node_cap: usize,
}

impl GradingPolicy {
    /// Policy with `first_layer = c_bl / alpha`.
    pub fn new(alpha: f64, c_bl: f64, layers: usize, ratio: f64) -> Self {
        GradingPolicy { alpha, layers, ratio, first_layer: c_bl / alpha, max_size: None, node_cap: DEFAULT_NODE_CAP }
    }

    pub fn with_max_size(mut self, h: f64) -> Self {
        self.max_size = Some(h);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Mesh(format!("grading parameter alpha must be positive, got {}", self.alpha)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Mesh(format!("grading ratio must lie in (0,1), got {}", self.ratio)));
        }
        if !(self.first_layer > 0.0 && self.first_layer.is_finite()) {
            return Err(Error::Mesh(format!("first layer width must be positive, got {}", self.first_layer)));
        }
        if let Some(h) = self.max_size {
            if !(h > 0.0) {
                return Err(Error::Mesh(format!("max element size must be positive, got {h}")));
            }
        }
        Ok(())
    }

    /// Target element diameter at distance `d` from the boundary features.
    pub fn boundary_target(&self, d: f64) -> f64 {
        let band = (d * self.alpha).floor().clamp(0.0, 64.0);
        self.first_layer * self.ratio.powf(-band)
    }

    /// Target element diameter at distance `d` from a listed corner.
    pub fn corner_target(&self, d: f64) -> f64 {
        let mut target = f64::INFINITY;
        for k in 1..=self.layers {
            let radius = self.first_layer * self.ratio.powi(k as i32 - 2);
            if d <= radius {
                target = self.first_layer * self.ratio.powi(k as i32);
            }
        }
        target
    }
}

fn point_triangle_distance(p: Point, t: [Point; 3]) -> f64 {
    if orient(t[0], t[1], p) >= 0.0 && orient(t[1], t[2], p) >= 0.0 && orient(t[2], t[0], p) >= 0.0 {
        return 0.0;
    }
    point_segment_distance(p, t[0], t[1]).min(point_segment_distance(p, t[1], t[2])).min(point_segment_distance(p, t[2], t[0]))
}

fn feature_triangle_distance(g: &EdgeGeometry, t: [Point; 3]) -> f64 {
    let (a, b) = match *g {
        EdgeGeometry::Segment { a, b } => (a, b),
        EdgeGeometry::Arc { a, b, .. } => (a, b),
    };
    let mut d = g.distance(t[0]).min(g.distance(t[1])).min(g.distance(t[2]));
    d = d.min(point_triangle_distance(a, t)).min(point_triangle_distance(b, t));
    d
}

/// Marking rule for [`GradingPolicy`]: `true` when triangle `t` is larger than its target.
pub fn graded_marker(mesh: &Mesh, g: &GradingPolicy, corners: &[Corner]) -> impl Fn(&Mesh, usize) -> bool {
    let features: Vec<EdgeGeometry> = mesh
        .tags
        .iter()
        .filter(|t| match t.kind {
            EdgeKind::Robin => t.weight > 0.0,
            EdgeKind::Interface => true,
            _ => false,
        })
        .map(|t| t.geometry)
        .collect();
    let corners: Vec<Point> = corners.iter().map(|c| c.position).collect();
    let g = *g;
    move |m: &Mesh, t: usize| {
        let diam = m.triangle_diameter(t);
        if g.max_size.is_some_and(|h| diam > h) {
            return true;
        }
        if diam <= g.first_layer * g.ratio.powi(g.layers as i32) {
            return false;
        }
        let pts = m.triangle_points(t);
        let db = features.iter().map(|f| feature_triangle_distance(f, pts)).fold(f64::INFINITY, f64::min);
        let dc = corners.iter().map(|&c| point_triangle_distance(c, pts)).fold(f64::INFINITY, f64::min);
        diam > g.boundary_target(db).min(g.corner_target(dc))
    }
}

/// Graded longest-edge refinement driven by `g`.
pub fn refine_graded(m: &Mesh, g: &GradingPolicy, corners: &[Corner]) -> Result<Mesh> {
    g.validate()?;
    let marker = graded_marker(m, g, corners);
    refine_to_size(m, marker, g.node_cap)
}

/// Repeats longest-edge bisection of every triangle flagged by `mark` until none is.
pub fn refine_to_size(m: &Mesh, mark: impl Fn(&Mesh, usize) -> bool, node_cap: usize) -> Result<Mesh> {
    refine_by(m, |mesh| (0..mesh.triangles.len()).map(|t| mark(mesh, t)).collect(), node_cap)
}

/// Repeats longest-edge bisection of the triangles flagged by `marks` (one flag per
/// triangle, recomputed on every pass) until none is flagged.
pub fn refine_by(m: &Mesh, marks: impl Fn(&Mesh) -> Vec<bool>, node_cap: usize) -> Result<Mesh> {
    let mut mesh = m.clone();
    for _ in 0..256 {
        let marked = marks(&mesh);
        if !marked.iter().any(|&b| b) {
            return Ok(mesh);
        }
        if mesh.nodes.len() > node_cap {
            return Err(Error::Budget { nodes: mesh.nodes.len(), cap: node_cap, resolution: mesh.stats().min_boundary_diameter });
        }
        mesh = bisect_marked(&mesh, &marked)?;
    }
    Err(Error::Mesh("graded refinement did not terminate".into()))
}

/// Flags the triangles owning an arc-shaped boundary or interface edge longer than
/// `max_len`.
pub fn arc_edge_marks(m: &Mesh, max_len: f64) -> Vec<bool> {
    let long: HashSet<(usize, usize)> = m
        .boundary_edges
        .iter()
        .chain(&m.interface_edges)
        .filter(|e| matches!(m.tags[e.tag].geometry, EdgeGeometry::Arc { .. }) && m.edge_length(e) > max_len)
        .map(|e| edge_key(e.nodes[0], e.nodes[1]))
        .collect();
    m.triangles
        .iter()
        .map(|t| (0..3).any(|k| long.contains(&edge_key(t[k], t[(k + 1) % 3]))))
        .collect()
}

struct TagLookup {
    map: HashMap<(usize, usize), usize>,
}

impl TagLookup {
    fn new(m: &Mesh) -> Self {
        let mut map = HashMap::with_capacity(m.boundary_edges.len() + m.interface_edges.len());
        for e in m.boundary_edges.iter().chain(&m.interface_edges) {
            map.insert(edge_key(e.nodes[0], e.nodes[1]), e.tag);
        }
        TagLookup { map }
    }

    fn split_point(&self, m: &Mesh, a: usize, b: usize) -> Point {
        let (pa, pb) = (m.nodes[a], m.nodes[b]);
        match self.map.get(&edge_key(a, b)) {
            Some(&tag) => m.tags[tag].geometry.split_point(pa, pb),
            None => pa.midpoint(pb),
        }
    }
}

fn split_tagged(edges: &[TaggedEdge], mid: &HashMap<(usize, usize), usize>) -> Vec<TaggedEdge> {
    let mut out = Vec::with_capacity(edges.len() * 2);
    for e in edges {
        match mid.get(&edge_key(e.nodes[0], e.nodes[1])) {
            Some(&c) => {
                out.push(TaggedEdge { nodes: [e.nodes[0], c], tag: e.tag });
                out.push(TaggedEdge { nodes: [c, e.nodes[1]], tag: e.tag });
            }
            None => out.push(*e),
        }
    }
    out
}

fn check_orientation(m: &Mesh) -> Result<()> {
    for t in 0..m.triangles.len() {
        if !(m.triangle_area(t) > 0.0) {
            return Err(Error::Mesh(format!("refinement inverted triangle {t} (curved boundary snap too coarse)")));
        }
    }
    Ok(())
}

/// Each level splits every triangle into four through its edge midpoints.
pub fn refine_uniform(m: &Mesh, levels: usize) -> Result<Mesh> {
    let mut mesh = m.clone();
    for _ in 0..levels {
        let tags = TagLookup::new(&mesh);
        let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(mesh.triangles.len() * 2);
        let mut nodes = mesh.nodes.clone();
        let mut tris = Vec::with_capacity(mesh.triangles.len() * 4);
        for tri in &mesh.triangles {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                mids[k] = *mid.entry(edge_key(a, b)).or_insert_with(|| {
                    nodes.push(tags.split_point(&mesh, a, b));
                    nodes.len() - 1
                });
            }
            let [a, b, c] = *tri;
            let [ab, bc, ca] = mids;
            tris.push([a, ab, ca]);
            tris.push([ab, b, bc]);
            tris.push([ca, bc, c]);
            tris.push([ab, bc, ca]);
        }
        let boundary_edges = split_tagged(&mesh.boundary_edges, &mid);
        let interface_edges = split_tagged(&mesh.interface_edges, &mid);
        mesh = Mesh { nodes, triangles: tris, boundary_edges, interface_edges, tags: mesh.tags.clone() };
        check_orientation(&mesh)?;
    }
    Ok(mesh)
}

fn longest_local_edge(m: &Mesh, tri: &[usize; 3]) -> usize {
    let mut best = 0;
    let mut best_len = -1.0;
    for k in 0..3 {
        let p = m.nodes[tri[k]];
        let q = m.nodes[tri[(k + 1) % 3]];
        let l = p.sub(q).dot(p.sub(q));
        if l > best_len {
            best_len = l;
            best = k;
        }
    }
    best
}

/// Longest-edge bisection of the marked triangles, closed under conformity: every
/// triangle with a split edge also has its longest edge split.
pub(crate) fn bisect_marked(m: &Mesh, marked: &[bool]) -> Result<Mesh> {
    let longest: Vec<usize> = m.triangles.iter().map(|t| longest_local_edge(m, t)).collect();
    let key = |t: usize, k: usize| {
        let tri = &m.triangles[t];
        edge_key(tri[k], tri[(k + 1) % 3])
    };
    let mut split: HashSet<(usize, usize)> = HashSet::new();
    for (t, &mk) in marked.iter().enumerate() {
        if mk {
            split.insert(key(t, longest[t]));
        }
    }
    loop {
        let mut changed = false;
        for t in 0..m.triangles.len() {
            let lk = key(t, longest[t]);
            if split.contains(&lk) {
                continue;
            }
            if (0..3).any(|k| split.contains(&key(t, k))) {
                split.insert(lk);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let tags = TagLookup::new(m);
    let mut nodes = m.nodes.clone();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(split.len());
    for t in 0..m.triangles.len() {
        for k in 0..3 {
            let e = key(t, k);
            if split.contains(&e) && !mid.contains_key(&e) {
                nodes.push(tags.split_point(m, e.0, e.1));
                mid.insert(e, nodes.len() - 1);
            }
        }
    }

    let mut tris = Vec::with_capacity(m.triangles.len() + 2 * mid.len());
    for (t, tri) in m.triangles.iter().enumerate() {
        let k = longest[t];
        let (q, r, p) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
        let Some(&mqr) = mid.get(&edge_key(q, r)) else {
            tris.push(*tri);
            continue;
        };
        match mid.get(&edge_key(p, q)) {
            Some(&mpq) => {
                tris.push([p, mpq, mqr]);
                tris.push([mpq, q, mqr]);
            }
            None => tris.push([p, q, mqr]),
        }
        match mid.get(&edge_key(r, p)) {
            Some(&mrp) => {
                tris.push([p, mqr, mrp]);
                tris.push([mrp, mqr, r]);
            }
            None => tris.push([p, mqr, r]),
        }
    }
    let out = Mesh {
        nodes,
        triangles: tris,
        boundary_edges: split_tagged(&m.boundary_edges, &mid),
        interface_edges: split_tagged(&m.interface_edges, &mid),
        tags: m.tags.clone(),
    };
    check_orientation(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use crate::mesher::triangulate;

    #[test]
    fn uniform_counts() {
        let m = triangulate(&Polygon::unit_square()).unwrap();
        assert_eq!(refine_uniform(&m, 0).unwrap(), m);
        assert_eq!(refine_uniform(&m, 1).unwrap().triangles.len(), 8);
        let r2 = refine_uniform(&m, 2).unwrap();
        assert_eq!(r2.triangles.len(), 32);
        assert!(r2.audit().is_empty());
        assert_eq!(r2.boundary_edges.len(), 16);
    }

    #[test]
    fn bisection_keeps_conformity() {
        let m = refine_uniform(&triangulate(&Polygon::l_shape()).unwrap(), 1).unwrap();
        let mut marked = vec![false; m.triangles.len()];
        marked[3] = true;
        let r = bisect_marked(&m, &marked).unwrap();
        assert!(r.audit().is_empty(), "{:?}", r.audit());
        assert!(r.triangles.len() > m.triangles.len());
        assert!((r.area() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn band_targets() {
        let g = GradingPolicy::new(8.0, 0.5, 3, 0.5);
        let f = 0.0625;
        assert_eq!(g.boundary_target(0.0), f);
        assert_eq!(g.boundary_target(0.124), f);
        assert_eq!(g.boundary_target(0.126), 2.0 * f);
        assert_eq!(g.boundary_target(0.3), 4.0 * f);
        assert_eq!(g.boundary_target(1.0), 256.0 * f);
        assert_eq!(g.corner_target(0.0), f * 0.125);
        assert_eq!(g.corner_target(1.5 * f), f * 0.5);
        assert_eq!(g.corner_target(0.9 * f), f * 0.25);
        assert_eq!(g.corner_target(2.5 * f), f64::INFINITY);
        let flat = GradingPolicy::new(8.0, 0.5, 0, 0.5);
        assert_eq!(flat.corner_target(0.0), f64::INFINITY);
        assert_eq!(flat.boundary_target(0.5 * f), f);
        assert!(GradingPolicy::new(8.0, 0.5, 3, 1.0).validate().is_err());
    }
}
