//! Planar polygonal domains and their corner data.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Openings within this distance of `pi` are regular boundary points.
pub const ANGLE_TOL: f64 = 1e-9;

/// Relative (to the diameter) distance below which two consecutive vertices coincide.
const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, t: f64) -> Point {
        Point::new(self.x * t, self.y * t)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

/// Twice the signed area of the triangle `(a, b, c)`.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

/// A simple polygon with counter-clockwise vertices and optional per-edge weights.
///
/// Edge `k` runs from vertex `k` to vertex `k + 1 (mod n)`; its weight is the
/// boundary-condition weight on that edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
    pub edge_weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub vertex_index: usize,
    pub position: Point,
    /// Interior opening in radians.
    pub opening: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooFewVertices { count: usize },
    NonFinite { vertex: usize },
    DuplicateVertex { vertex: usize },
    SelfIntersection { edge_a: usize, edge_b: usize },
    NotCounterClockwise { signed_area: f64 },
    WeightCountMismatch { weights: usize, edges: usize },
    NonPositiveWeight { edge: usize, weight: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewVertices { count } => write!(f, "polygon has {count} vertices, need at least 3"),
            Violation::NonFinite { vertex } => write!(f, "vertex {vertex} has a non-finite coordinate"),
            Violation::DuplicateVertex { vertex } => {
                write!(f, "vertex {vertex} coincides with the next vertex (zero-length edge)")
            }
            Violation::SelfIntersection { edge_a, edge_b } => {
                write!(f, "edges {edge_a} and {edge_b} intersect (at vertex {edge_a})")
            }
            Violation::NotCounterClockwise { signed_area } => {
                write!(f, "signed area {signed_area:.6e} is not positive; vertices must be counter-clockwise")
            }
            Violation::WeightCountMismatch { weights, edges } => {
                write!(f, "{weights} edge weights given for {edges} edges")
            }
            Violation::NonPositiveWeight { edge, weight } => write!(f, "edge {edge} has non-positive weight {weight}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Polygon {
    /// Builds a polygon without checking it; see [`Polygon::validate`].
    pub fn new(vertices: Vec<Point>) -> Self {
        Polygon { vertices, edge_weights: None }
    }

    pub fn with_weights(vertices: Vec<Point>, weights: Vec<f64>) -> Self {
        Polygon { vertices, edge_weights: Some(weights) }
    }

    /// Builds and validates; the first violation becomes the error.
    pub fn checked(vertices: Vec<Point>, edge_weights: Option<Vec<f64>>) -> Result<Self> {
        let p = Polygon { vertices, edge_weights };
        p.ensure_valid()?;
        Ok(p)
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Self {
        Polygon::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn unit_square() -> Self {
        Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Polygon::from_coords(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    }

    pub fn l_shape() -> Self {
        Polygon::from_coords(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])
    }

    /// Regular `n`-gon of circumradius `r` centred at the origin, first vertex on the x-axis.
    pub fn regular(n: usize, r: f64) -> Self {
        Polygon::new(
            (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    Point::new(r * t.cos(), r * t.sin())
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, k: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % n])
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.edge_weights.as_ref().map_or(1.0, |w| w[edge])
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for k in 0..n {
            let (a, b) = self.edge(k);
            s += a.cross(b);
        }
        0.5 * s
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|k| {
            let (a, b) = self.edge(k);
            a.dist(b)
        }).sum()
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn transformed(&self, f: impl Fn(Point) -> Point) -> Polygon {
        Polygon { vertices: self.vertices.iter().map(|&p| f(p)).collect(), edge_weights: self.edge_weights.clone() }
    }

    pub fn scaled(&self, t: f64) -> Polygon {
        self.transformed(|p| p.scale(t))
    }

    /// Lists every invariant violation; empty iff the polygon is valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.vertices.len();
        if n < 3 {
            violations.push(Violation::TooFewVertices { count: n });
            return ValidationReport { violations };
        }
        for (i, p) in self.vertices.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                violations.push(Violation::NonFinite { vertex: i });
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        let diam = self.diameter();
        let mut duplicate = false;
        for i in 0..n {
            let (a, b) = self.edge(i);
            if a.dist(b) <= DUPLICATE_TOL * diam {
                violations.push(Violation::DuplicateVertex { vertex: i });
                duplicate = true;
            }
        }
        if !duplicate {
            for i in 0..n {
                let (a, b) = self.edge(i);
                // adjacent edges only overlap when the boundary folds back on itself
                let (_, c) = self.edge((i + 1) % n);
                if orient(a, b, c) == 0.0 && b.sub(a).dot(c.sub(b)) < 0.0 {
                    violations.push(Violation::SelfIntersection { edge_a: i, edge_b: (i + 1) % n });
                }
                for j in i + 2..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    let (c, d) = self.edge(j);
                    if segments_intersect(a, b, c, d) {
                        violations.push(Violation::SelfIntersection { edge_a: i, edge_b: j });
                    }
                }
            }
        }
        let sa = self.signed_area();
        if !(sa > 0.0) {
            violations.push(Violation::NotCounterClockwise { signed_area: sa });
        }
        if let Some(w) = &self.edge_weights {
            if w.len() != n {
                violations.push(Violation::WeightCountMismatch { weights: w.len(), edges: n });
            } else {
                for (e, &wt) in w.iter().enumerate() {
                    if !(wt > 0.0) || !wt.is_finite() {
                        violations.push(Violation::NonPositiveWeight { edge: e, weight: wt });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidPolygon(v.to_string())),
        }
    }

    /// Interior angle at every vertex, in `(0, 2pi)`, without reclassification.
    pub fn interior_angles(&self) -> Vec<f64> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let prev = self.vertices[(i + n - 1) % n];
                let cur = self.vertices[i];
                let next = self.vertices[(i + 1) % n];
                let e1 = cur.sub(prev);
                let e2 = next.sub(cur);
                let turn = e1.cross(e2).atan2(e1.dot(e2));
                PI - turn
            })
            .collect()
    }

    /// Corners of the polygon: vertices whose opening differs from `pi` by more than
    /// [`ANGLE_TOL`].
    pub fn corner_openings(&self) -> Result<Vec<Corner>> {
        self.ensure_valid()?;
        Ok(self
            .interior_angles()
            .into_iter()
            .enumerate()
            .filter(|(_, a)| (a - PI).abs() > ANGLE_TOL)
            .map(|(i, opening)| Corner { vertex_index: i, position: self.vertices[i], opening })
            .collect())
    }

    /// Parses the plain-text polygon format: a `polygon n` header and `x y [weight]` lines.
    pub fn parse(text: &str) -> Result<Polygon> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty polygon file".into() })?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("polygon") {
            return Err(Error::Parse { line: hline, msg: format!("expected `polygon n`, got `{header}`") });
        }
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(Error::Parse { line: hline, msg: "missing vertex count".into() })?;
        let mut vertices = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut any_weight = false;
        for _ in 0..n {
            let (ln, l) = lines
                .next()
                .ok_or(Error::Parse { line: hline, msg: format!("expected {n} vertex lines") })?;
            let nums: Vec<f64> = l
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
            match nums.as_slice() {
                [x, y] => {
                    vertices.push(Point::new(*x, *y));
                    weights.push(1.0);
                }
                [x, y, w] => {
                    vertices.push(Point::new(*x, *y));
                    weights.push(*w);
                    any_weight = true;
                }
                _ => return Err(Error::Parse { line: ln, msg: format!("expected `x y [weight]`, got `{l}`") }),
            }
        }
        if let Some((ln, l)) = lines.next() {
            return Err(Error::Parse { line: ln, msg: format!("unexpected trailing line `{l}`") });
        }
        Ok(Polygon { vertices, edge_weights: any_weight.then_some(weights) })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("polygon {}\n", self.len());
        for (k, p) in self.vertices.iter().enumerate() {
            match &self.edge_weights {
                Some(w) => s.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", p.x, p.y, w[k])),
                None => s.push_str(&format!("{:.17e} {:.17e}\n", p.x, p.y)),
            }
        }
        s
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Polygon> {
        Polygon::parse(&std::fs::read_to_string(path)?)
    }
}

/// Computational domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Polygon(Polygon),
    /// Disk of the given radius centred at the origin.
    Disk { radius: f64 },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Polygon(p) => p.ensure_valid(),
            DomainSpec::Disk { radius } => {
                if *radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("disk radius must be positive, got {radius}")))
                }
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            DomainSpec::Polygon(p) => p.area(),
            DomainSpec::Disk { radius } => PI * radius * radius,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            DomainSpec::Polygon(p) => p.perimeter(),
            DomainSpec::Disk { radius } => 2.0 * PI * radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            DomainSpec::Polygon(p) => p.diameter(),
            DomainSpec::Disk { radius } => 2.0 * radius,
        }
    }

    /// Corners as seen by the mesher and the symbolic energy; a disk has none.
    pub fn corners(&self) -> Result<Vec<Corner>> {
        match self {
            DomainSpec::Polygon(p) => p.corner_openings(),
            DomainSpec::Disk { .. } => Ok(Vec::new()),
        }
    }

    /// Resolves a named built-in domain (`square`, `lshape`, `hexagon`, `disk`) or reads a
    /// polygon file.
    pub fn from_name_or_path(s: &str) -> Result<DomainSpec> {
        match s {
            "square" => Ok(DomainSpec::Polygon(Polygon::unit_square())),
            "lshape" | "l-shape" => Ok(DomainSpec::Polygon(Polygon::l_shape())),
            "hexagon" => Ok(DomainSpec::Polygon(Polygon::regular(6, 1.0))),
            "disk" => Ok(DomainSpec::Disk { radius: 1.0 }),
            path => Ok(DomainSpec::Polygon(Polygon::read(path)?)),
        }
    }
}
