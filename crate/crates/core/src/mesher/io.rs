//! Plain-text mesh format:
//!
//! ```text
//! mesh
//! nodes n        followed by n lines `x y`
//! triangles m    followed by m lines `i j k`
//! bedges b       followed by b lines `i j tag`
//! iedges k       (optional) followed by k lines `i j tag`
//! ```

use std::fmt::Write as _;

use super::{EdgeGeometry, EdgeKind, EdgeTag, Mesh, TaggedEdge};
use crate::error::{Error, Result};

pub fn write_mesh(m: &Mesh) -> String {
    let mut s = String::with_capacity(64 * (m.nodes.len() + m.triangles.len()));
    s.push_str("mesh\n");
    let _ = writeln!(s, "nodes {}", m.nodes.len());
    for p in &m.nodes {
        let _ = writeln!(s, "{:.17e} {:.17e}", p.x, p.y);
    }
    let _ = writeln!(s, "triangles {}", m.triangles.len());
    for t in &m.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "bedges {}", m.boundary_edges.len());
    for e in &m.boundary_edges {
        let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.tag);
    }
    if !m.interface_edges.is_empty() {
        let _ = writeln!(s, "iedges {}", m.interface_edges.len());
        for e in &m.interface_edges {
            let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.tag);
        }
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.inner.next().ok_or(Error::Parse { line: 0, msg: "unexpected end of mesh file".into() })
    }

    fn section(&mut self, name: &str) -> Result<usize> {
        let (ln, l) = self.next()?;
        let mut it = l.split_whitespace();
        if it.next() != Some(name) {
            return Err(Error::Parse { line: ln, msg: format!("expected `{name} <count>`, got `{l}`") });
        }
        it.next()
            .and_then(|c| c.parse().ok())
            .ok_or(Error::Parse { line: ln, msg: format!("bad count in `{l}`") })
    }

    fn numbers<T: std::str::FromStr>(&mut self, count: usize) -> Result<Vec<T>> {
        let (ln, l) = self.next()?;
        let v: Vec<T> = l
            .split_whitespace()
            .map(|s| s.parse::<T>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: ln, msg: format!("cannot parse `{l}`") })?;
        if v.len() != count {
            return Err(Error::Parse { line: ln, msg: format!("expected {count} values, got `{l}`") });
        }
        Ok(v)
    }
}

/// Reads the text format. Tags are reconstructed as straight Robin edges of weight 1
/// (interface tags as weight-1 interfaces) spanning the extent of their edges.
pub fn read_mesh(text: &str) -> Result<Mesh> {
    let iter: Box<dyn Iterator<Item = (usize, &str)>> = Box::new(
        text.lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty()),
    );
    let mut lines = Lines { inner: iter.peekable() };
    let (ln, head) = lines.next()?;
    if head != "mesh" {
        return Err(Error::Parse { line: ln, msg: format!("expected `mesh`, got `{head}`") });
    }
    let n = lines.section("nodes")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let v: Vec<f64> = lines.numbers(2)?;
        nodes.push(crate::geometry::Point::new(v[0], v[1]));
    }
    let m = lines.section("triangles")?;
    let mut triangles = Vec::with_capacity(m);
    for _ in 0..m {
        let v: Vec<usize> = lines.numbers(3)?;
        triangles.push([v[0], v[1], v[2]]);
    }
    let read_edges = |lines: &mut Lines, count: usize| -> Result<Vec<TaggedEdge>> {
        (0..count)
            .map(|_| {
                let v: Vec<usize> = lines.numbers(3)?;
                Ok(TaggedEdge { nodes: [v[0], v[1]], tag: v[2] })
            })
            .collect()
    };
    let b = lines.section("bedges")?;
    let boundary_edges = read_edges(&mut lines, b)?;
    let interface_edges = if lines.inner.peek().is_some() {
        let k = lines.section("iedges")?;
        read_edges(&mut lines, k)?
    } else {
        Vec::new()
    };
    for e in boundary_edges.iter().chain(&interface_edges) {
        if e.nodes.iter().any(|&i| i >= nodes.len()) {
            return Err(Error::Parse { line: 0, msg: format!("edge {:?} references a missing node", e.nodes) });
        }
    }
    if triangles.iter().flatten().any(|&i| i >= nodes.len()) {
        return Err(Error::Parse { line: 0, msg: "triangle references a missing node".into() });
    }

    let ntags = boundary_edges.iter().chain(&interface_edges).map(|e| e.tag + 1).max().unwrap_or(0);
    let mut tags: Vec<Option<EdgeTag>> = vec![None; ntags];
    for (edges, kind) in [(&boundary_edges, EdgeKind::Robin), (&interface_edges, EdgeKind::Interface)] {
        for e in edges {
            let (a, b) = (nodes[e.nodes[0]], nodes[e.nodes[1]]);
            let slot = &mut tags[e.tag];
            *slot = Some(match slot.take() {
                None => EdgeTag { kind, weight: 1.0, geometry: EdgeGeometry::Segment { a, b } },
                Some(t) => {
                    let EdgeGeometry::Segment { a: ta, b: tb } = t.geometry else { unreachable!() };
                    // extend the segment to the farthest pair of endpoints seen so far
                    let cands = [ta, tb, a, b];
                    let mut best = (ta, tb);
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if cands[i].dist(cands[j]) > best.0.dist(best.1) {
                                best = (cands[i], cands[j]);
                            }
                        }
                    }
                    EdgeTag { geometry: EdgeGeometry::Segment { a: best.0, b: best.1 }, ..t }
                }
            });
        }
    }
    let tags = tags
        .into_iter()
        .map(|t| t.unwrap_or(EdgeTag { kind: EdgeKind::Neumann, weight: 0.0, geometry: EdgeGeometry::Segment { a: nodes[0], b: nodes[0] } }))
        .collect();
    Ok(Mesh { nodes, triangles, boundary_edges, interface_edges, tags })
}
