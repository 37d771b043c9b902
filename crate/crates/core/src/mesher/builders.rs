//! Coarse meshes for the model geometries: polygons, disks, truncated sectors,
//! broken-line interfaces in a disk, and closed interfaces inside a box.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::triangulate::{delaunay_flips, ear_clip};
use super::{edge_key, triangulate, EdgeGeometry, EdgeKind, EdgeTag, Mesh, TaggedEdge};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point, Polygon};

/// Boundary condition on an artificial (truncation) boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtificialBc {
    Dirichlet,
    Neumann,
}

impl ArtificialBc {
    fn kind(self) -> EdgeKind {
        match self {
            ArtificialBc::Dirichlet => EdgeKind::Dirichlet,
            ArtificialBc::Neumann => EdgeKind::Neumann,
        }
    }
}

impl std::str::FromStr for ArtificialBc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(ArtificialBc::Dirichlet),
            "neumann" => Ok(ArtificialBc::Neumann),
            other => Err(Error::Config(format!("unknown boundary condition `{other}` (dirichlet|neumann)"))),
        }
    }
}

impl std::fmt::Display for ArtificialBc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArtificialBc::Dirichlet => "dirichlet",
            ArtificialBc::Neumann => "neumann",
        })
    }
}

/// Closed curve carrying a delta interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterfaceShape {
    Polygon(Polygon),
    Circle { center: Point, radius: f64 },
}

impl InterfaceShape {
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            InterfaceShape::Polygon(p) => p.bounding_box(),
            InterfaceShape::Circle { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            InterfaceShape::Polygon(p) => p.diameter(),
            InterfaceShape::Circle { radius, .. } => 2.0 * radius,
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            InterfaceShape::Polygon(p) => p.perimeter(),
            InterfaceShape::Circle { radius, .. } => 2.0 * PI * radius,
        }
    }
}

#[derive(Default)]
struct Builder {
    nodes: Vec<Point>,
    tris: Vec<[usize; 3]>,
    boundary: Vec<TaggedEdge>,
    interface: Vec<TaggedEdge>,
    tags: Vec<EdgeTag>,
}

impl Builder {
    fn node(&mut self, p: Point) -> usize {
        self.nodes.push(p);
        self.nodes.len() - 1
    }

    fn tag(&mut self, kind: EdgeKind, weight: f64, geometry: EdgeGeometry) -> usize {
        self.tags.push(EdgeTag { kind, weight, geometry });
        self.tags.len() - 1
    }

    fn edge(&mut self, a: usize, b: usize, tag: usize) {
        let e = TaggedEdge { nodes: [a, b], tag };
        if self.tags[tag].kind == EdgeKind::Interface {
            self.interface.push(e);
        } else {
            self.boundary.push(e);
        }
    }

    /// Straight edge with its own tag.
    fn segment(&mut self, a: usize, b: usize, kind: EdgeKind, weight: f64) {
        let g = EdgeGeometry::Segment { a: self.nodes[a], b: self.nodes[b] };
        let t = self.tag(kind, weight, g);
        self.edge(a, b, t);
    }

    /// Counter-clockwise arc nodes from angle `start` over `sweep`, every piece at most
    /// `max_piece` radians; returns the node indices including both ends. `first` reuses
    /// an existing start node, `last` an existing end node.
    #[allow(clippy::too_many_arguments)]
    fn arc(
        &mut self,
        center: Point,
        radius: f64,
        start: f64,
        sweep: f64,
        max_piece: f64,
        first: Option<usize>,
        last: Option<usize>,
        kind: EdgeKind,
        weight: f64,
    ) -> Vec<usize> {
        let pieces = (sweep / max_piece).ceil().max(1.0) as usize;
        let at = |k: usize| {
            let t = start + sweep * k as f64 / pieces as f64;
            Point::new(center.x + radius * t.cos(), center.y + radius * t.sin())
        };
        let mut ids = Vec::with_capacity(pieces + 1);
        ids.push(first.unwrap_or_else(|| self.node(at(0))));
        for k in 1..pieces {
            ids.push(self.node(at(k)));
        }
        ids.push(last.unwrap_or_else(|| self.node(at(pieces))));
        for w in ids.windows(2) {
            let g = EdgeGeometry::Arc { a: self.nodes[w[0]], b: self.nodes[w[1]], center, radius };
            let t = self.tag(kind, weight, g);
            self.edge(w[0], w[1], t);
        }
        ids
    }

    fn fan(&mut self, apex: usize, rim: &[usize]) {
        for w in rim.windows(2) {
            self.tris.push([apex, w[0], w[1]]);
        }
    }

    fn ring(&mut self, ring: &[usize]) -> Result<()> {
        let tris = ear_clip(&self.nodes, ring)?;
        self.tris.extend(tris);
        Ok(())
    }

    fn finish(mut self) -> Result<Mesh> {
        let constrained: HashSet<(usize, usize)> =
            self.boundary.iter().chain(&self.interface).map(|e| edge_key(e.nodes[0], e.nodes[1])).collect();
        delaunay_flips(&self.nodes, &mut self.tris, &constrained);
        let m = Mesh {
            nodes: self.nodes,
            triangles: self.tris,
            boundary_edges: self.boundary,
            interface_edges: self.interface,
            tags: self.tags,
        };
        let v = m.audit();
        if let Some(first) = v.first() {
            return Err(Error::Mesh(format!("coarse mesh construction failed: {first}")));
        }
        Ok(m)
    }
}

const ARC_PIECE: f64 = PI / 3.0;

/// Coarse mesh of a domain; a disk is a centre fan over eight snapped arcs.
pub fn domain_mesh(d: &DomainSpec) -> Result<Mesh> {
    d.validate()?;
    match d {
        DomainSpec::Polygon(p) => triangulate(p),
        DomainSpec::Disk { radius } => disk_mesh(*radius, EdgeKind::Robin),
    }
}

/// Disk of radius `radius` centred at the origin whose boundary arcs carry `kind`.
pub fn disk_mesh(radius: f64, kind: EdgeKind) -> Result<Mesh> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("disk radius must be positive, got {radius}")));
    }
    let mut b = Builder::default();
    let c = b.node(Point::new(0.0, 0.0));
    let mut rim = Vec::new();
    for k in 0..8 {
        let t = 2.0 * PI * k as f64 / 8.0;
        rim.push(b.node(Point::new(radius * t.cos(), radius * t.sin())));
    }
    rim.push(rim[0]);
    for w in rim.windows(2) {
        let g = EdgeGeometry::Arc { a: b.nodes[w[0]], b: b.nodes[w[1]], center: Point::new(0.0, 0.0), radius };
        let t = b.tag(kind, 1.0, g);
        b.edge(w[0], w[1], t);
    }
    b.fan(c, &rim);
    b.finish()
}

/// Truncated sector `{r < radius, 0 < phi < theta}` with Robin (weight 1) straight sides
/// and `arc_bc` on the arc. The apex is node 0.
pub fn sector_mesh(theta: f64, radius: f64, arc_bc: ArtificialBc) -> Result<Mesh> {
    if !(theta > 0.0 && theta < 2.0 * PI) || !(radius > 0.0) {
        return Err(Error::Domain(format!("bad truncated sector: theta {theta}, radius {radius}")));
    }
    let mut b = Builder::default();
    let o = b.node(Point::new(0.0, 0.0));
    let rim = b.arc(Point::new(0.0, 0.0), radius, 0.0, theta, ARC_PIECE, None, None, arc_bc.kind(), 1.0);
    b.segment(o, rim[0], EdgeKind::Robin, 1.0);
    b.segment(*rim.last().unwrap(), o, EdgeKind::Robin, 1.0);
    b.fan(o, &rim);
    b.finish()
}

/// Disk of radius `radius` crossed by a broken-line interface: two rays from the centre
/// at angles `-theta/2` and `theta/2`. The centre is node 0.
pub fn broken_line_disk_mesh(theta: f64, radius: f64, arc_bc: ArtificialBc) -> Result<Mesh> {
    if !(theta > 0.0 && theta < 2.0 * PI) || !(radius > 0.0) {
        return Err(Error::Domain(format!("bad broken line: theta {theta}, radius {radius}")));
    }
    let c = Point::new(0.0, 0.0);
    let mut b = Builder::default();
    let o = b.node(c);
    let a_rim = b.arc(c, radius, -0.5 * theta, theta, ARC_PIECE, None, None, arc_bc.kind(), 1.0);
    let (p_lo, p_hi) = (a_rim[0], *a_rim.last().unwrap());
    let b_rim = b.arc(c, radius, 0.5 * theta, 2.0 * PI - theta, ARC_PIECE, Some(p_hi), Some(p_lo), arc_bc.kind(), 1.0);
    b.segment(o, p_lo, EdgeKind::Interface, 1.0);
    b.segment(o, p_hi, EdgeKind::Interface, 1.0);
    b.fan(o, &a_rim);
    b.fan(o, &b_rim);
    b.finish()
}

/// Box `[lo, hi]` with Neumann sides containing a closed interface curve. The region
/// outside the interface is split into two simple polygons by horizontal bridges from
/// the leftmost and rightmost interface vertices to the box.
pub fn delta_box_mesh(interface: &InterfaceShape, lo: Point, hi: Point) -> Result<Mesh> {
    let (ilo, ihi) = interface.bounding_box();
    if !(ilo.x > lo.x && ilo.y > lo.y && ihi.x < hi.x && ihi.y < hi.y) {
        return Err(Error::Domain("interface must lie strictly inside the box".into()));
    }
    let mut b = Builder::default();
    let ring: Vec<usize> = match interface {
        InterfaceShape::Polygon(p) => {
            p.ensure_valid()?;
            let ids: Vec<usize> = p.vertices.iter().map(|&v| b.node(v)).collect();
            for k in 0..ids.len() {
                b.segment(ids[k], ids[(k + 1) % ids.len()], EdgeKind::Interface, p.weight(k));
            }
            b.ring(&ids)?;
            ids
        }
        InterfaceShape::Circle { center, radius } => {
            if !(*radius > 0.0) {
                return Err(Error::Domain(format!("interface radius must be positive, got {radius}")));
            }
            let oc = b.node(*center);
            let n0 = b.node(Point::new(center.x + radius, center.y));
            let rim = b.arc(*center, *radius, 0.0, 2.0 * PI, PI / 4.0, Some(n0), Some(n0), EdgeKind::Interface, 1.0);
            b.fan(oc, &rim);
            rim[..rim.len() - 1].to_vec()
        }
    };
    let n = ring.len();
    let pts: Vec<Point> = ring.iter().map(|&i| b.nodes[i]).collect();
    let mut l = 0;
    let mut r = 0;
    for k in 1..n {
        if (pts[k].x, pts[k].y) < (pts[l].x, pts[l].y) {
            l = k;
        }
        if (pts[k].x, pts[k].y) > (pts[r].x, pts[r].y) {
            r = k;
        }
    }
    let lb = b.node(Point::new(lo.x, pts[l].y));
    let rb = b.node(Point::new(hi.x, pts[r].y));
    let bl = b.node(lo);
    let br = b.node(Point::new(hi.x, lo.y));
    let tr = b.node(hi);
    let tl = b.node(Point::new(lo.x, hi.y));
    let side = |b: &mut Builder, p: Point, q: Point| b.tag(EdgeKind::Neumann, 0.0, EdgeGeometry::Segment { a: p, b: q });
    let bottom = side(&mut b, lo, Point::new(hi.x, lo.y));
    let right = side(&mut b, Point::new(hi.x, lo.y), hi);
    let top = side(&mut b, hi, Point::new(lo.x, hi.y));
    let left = side(&mut b, Point::new(lo.x, hi.y), lo);
    b.edge(bl, br, bottom);
    b.edge(br, rb, right);
    b.edge(rb, tr, right);
    b.edge(tr, tl, top);
    b.edge(tl, lb, left);
    b.edge(lb, bl, left);

    let mut upper = vec![lb];
    let mut k = l;
    loop {
        upper.push(ring[k]);
        if k == r {
            break;
        }
        k = (k + n - 1) % n;
    }
    upper.extend([rb, tr, tl]);
    let mut lower = vec![lb, bl, br, rb];
    let mut k = r;
    loop {
        lower.push(ring[k]);
        if k == l {
            break;
        }
        k = (k + n - 1) % n;
    }
    b.ring(&upper)?;
    b.ring(&lower)?;
    b.finish()
}
