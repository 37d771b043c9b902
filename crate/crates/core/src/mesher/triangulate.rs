use std::collections::{HashMap, HashSet};

use super::{edge_key, EdgeGeometry, EdgeKind, EdgeTag, Mesh, TaggedEdge};
use crate::error::{Error, Result};
use crate::geometry::{orient, Point, Polygon};

fn min_angle(a: Point, b: Point, c: Point) -> f64 {
    let ang = |p: Point, q: Point, r: Point| {
        let u = q.sub(p);
        let w = r.sub(p);
        u.cross(w).abs().atan2(u.dot(w))
    };
    ang(a, b, c).min(ang(b, c, a)).min(ang(c, a, b))
}

fn in_closed_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
}

/// Ear clipping of a simple counter-clockwise ring of node indices. At every step the
/// ear with the largest minimum angle is removed.
pub(crate) fn ear_clip(nodes: &[Point], ring: &[usize]) -> Result<Vec<[usize; 3]>> {
    let n = ring.len();
    if n < 3 {
        return Err(Error::Mesh(format!("cannot triangulate a ring of {n} nodes")));
    }
    let scale = {
        let mut s: f64 = 0.0;
        for &i in ring {
            s = s.max(nodes[i].x.abs()).max(nodes[i].y.abs());
        }
        s.max(f64::MIN_POSITIVE)
    };
    let convex_eps = 1e-14 * scale * scale;

    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut alive = vec![true; n];
    // quality of the ear at each ring position, None when not an ear
    let mut ear: Vec<Option<f64>> = vec![None; n];

    let eval = |i: usize, prev: &[usize], next: &[usize], alive: &[bool]| -> Option<f64> {
        let (ip, inx) = (prev[i], next[i]);
        let (a, b, c) = (nodes[ring[ip]], nodes[ring[i]], nodes[ring[inx]]);
        if orient(a, b, c) <= convex_eps {
            return None;
        }
        let mut j = next[inx];
        while j != ip {
            if alive[j] {
                let q = ring[j];
                if q != ring[ip] && q != ring[i] && q != ring[inx] && in_closed_triangle(nodes[q], a, b, c) {
                    return None;
                }
            }
            j = next[j];
        }
        Some(min_angle(a, b, c))
    };

    for i in 0..n {
        ear[i] = eval(i, &prev, &next, &alive);
    }
    let mut tris = Vec::with_capacity(n - 2);
    let mut remaining = n;
    let mut start = 0;
    while remaining > 3 {
        let mut best: Option<(usize, f64)> = None;
        let mut i = start;
        for _ in 0..remaining {
            if let Some(q) = ear[i] {
                if best.map_or(true, |(_, bq)| q > bq) {
                    best = Some((i, q));
                }
            }
            i = next[i];
        }
        let (i, _) = match best {
            Some(b) => b,
            None => {
                // a clipped vertex may have blocked ears elsewhere; re-evaluate everything once
                let mut j = start;
                let mut found = None;
                for _ in 0..remaining {
                    ear[j] = eval(j, &prev, &next, &alive);
                    if let Some(q) = ear[j] {
                        if found.map_or(true, |(_, bq)| q > bq) {
                            found = Some((j, q));
                        }
                    }
                    j = next[j];
                }
                found.ok_or_else(|| {
                    Error::Mesh(format!("ear clipping found no ear with {remaining} vertices left (ring start {})", ring[start]))
                })?
            }
        };
        let (ip, inx) = (prev[i], next[i]);
        tris.push([ring[ip], ring[i], ring[inx]]);
        alive[i] = false;
        next[ip] = inx;
        prev[inx] = ip;
        remaining -= 1;
        start = inx;
        ear[ip] = eval(ip, &prev, &next, &alive);
        ear[inx] = eval(inx, &prev, &next, &alive);
    }
    let i = start;
    let tri = [ring[prev[i]], ring[i], ring[next[i]]];
    if orient(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) <= 0.0 {
        return Err(Error::Mesh("ear clipping produced a degenerate final triangle".into()));
    }
    tris.push(tri);
    Ok(tris)
}

fn in_circle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

/// Lawson flips toward the constrained Delaunay triangulation. Edges in `constrained`
/// never flip.
pub(crate) fn delaunay_flips(nodes: &[Point], tris: &mut [[usize; 3]], constrained: &HashSet<(usize, usize)>) {
    let max_passes = 4 * tris.len() + 8;
    for _ in 0..max_passes {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(tris.len() * 3);
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                owner.insert((tri[k], tri[(k + 1) % 3]), t);
            }
        }
        let mut dirty = vec![false; tris.len()];
        let mut flipped = false;
        for t1 in 0..tris.len() {
            for k in 0..3 {
                if dirty[t1] {
                    break;
                }
                let tri = tris[t1];
                let (a, b, c) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                if constrained.contains(&edge_key(a, b)) {
                    continue;
                }
                let Some(&t2) = owner.get(&(b, a)) else { continue };
                if dirty[t2] || t2 == t1 {
                    continue;
                }
                let t2v = tris[t2];
                let d = t2v.iter().copied().find(|&v| v != a && v != b).unwrap();
                let (pa, pb, pc, pd) = (nodes[a], nodes[b], nodes[c], nodes[d]);
                let scale = pa.dist(pb).max(pc.dist(pd));
                let s4 = scale.powi(4);
                if in_circle(pa, pb, pc, pd) <= 1e-12 * s4 {
                    continue;
                }
                let s2 = scale * scale;
                if orient(pa, pd, pc) <= 1e-12 * s2 || orient(pd, pb, pc) <= 1e-12 * s2 {
                    continue;
                }
                tris[t1] = [a, d, c];
                tris[t2] = [d, b, c];
                dirty[t1] = true;
                dirty[t2] = true;
                flipped = true;
            }
        }
        if !flipped {
            break;
        }
    }
}

/// Coarse conforming triangulation of a valid polygon: ear clipping followed by
/// Delaunay edge flips. Boundary edge `k` is tagged `k` (Robin, weight of edge `k`).
pub fn triangulate(p: &Polygon) -> Result<Mesh> {
    p.ensure_valid()?;
    let n = p.len();
    let ring: Vec<usize> = (0..n).collect();
    let mut tris = ear_clip(&p.vertices, &ring)?;
    let mut constrained = HashSet::new();
    let mut boundary_edges = Vec::with_capacity(n);
    let mut tags = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = p.edge(k);
        constrained.insert(edge_key(k, (k + 1) % n));
        boundary_edges.push(TaggedEdge { nodes: [k, (k + 1) % n], tag: k });
        tags.push(EdgeTag { kind: EdgeKind::Robin, weight: p.weight(k), geometry: EdgeGeometry::Segment { a, b } });
    }
    delaunay_flips(&p.vertices, &mut tris, &constrained);
    Ok(Mesh { nodes: p.vertices.clone(), triangles: tris, boundary_edges, interface_edges: Vec::new(), tags })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let sq = triangulate(&Polygon::unit_square()).unwrap();
        assert_eq!(sq.triangles.len(), 2);
        assert_eq!(sq.boundary_edges.len(), 4);
        assert!(sq.audit().is_empty());

        let tri = triangulate(&Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_eq!(tri.triangles.len(), 1);

        let l = triangulate(&Polygon::l_shape()).unwrap();
        assert_eq!(l.triangles.len(), 4);
        assert!(l.audit().is_empty());
        assert!((l.area() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn comb_polygon() {
        // non-convex comb with many reflex vertices
        let mut pts = vec![(0.0, 0.0), (9.0, 0.0), (9.0, 3.0)];
        for k in (0..4).rev() {
            let x = 2.0 * k as f64 + 1.0;
            pts.push((x + 1.0, 3.0));
            pts.push((x + 1.0, 1.0));
            pts.push((x, 1.0));
            pts.push((x, 3.0));
        }
        pts.push((0.0, 3.0));
        let p = Polygon::from_coords(&pts);
        p.ensure_valid().unwrap();
        let m = triangulate(&p).unwrap();
        assert_eq!(m.triangles.len(), p.len() - 2);
        assert!(m.audit().is_empty(), "{:?}", m.audit());
        assert!((m.area() - p.area()).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        let bowtie = Polygon::from_coords(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert!(triangulate(&bowtie).is_err());
    }
}
