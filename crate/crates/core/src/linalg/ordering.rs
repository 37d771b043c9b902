use std::collections::VecDeque;

const LEAF: usize = 48;

struct Nd<'a> {
    adj: &'a [Vec<usize>],
    stamp: Vec<usize>,
    level: Vec<usize>,
    epoch: usize,
    order: Vec<usize>,
}

impl Nd<'_> {
    fn mark(&mut self, set: &[usize]) -> usize {
        self.epoch += 1;
        for &v in set {
            self.stamp[v] = self.epoch;
        }
        self.epoch
    }

    /// BFS inside the set carrying `stamp == ep`; returns nodes in visiting order and
    /// writes their levels.
    fn bfs(&mut self, root: usize, ep: usize) -> Vec<usize> {
        let seen = ep + 1;
        self.epoch = seen;
        let mut out = vec![root];
        self.level[root] = 0;
        self.stamp[root] = seen;
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if self.stamp[w] == ep {
                    self.stamp[w] = seen;
                    self.level[w] = self.level[v] + 1;
                    out.push(w);
                    q.push_back(w);
                }
            }
        }
        out
    }

    fn dissect(&mut self, set: Vec<usize>) {
        if set.len() <= LEAF {
            self.order.extend(set);
            return;
        }
        let ep = self.mark(&set);
        let visit = self.bfs(set[0], ep);
        if visit.len() < set.len() {
            // split off the connected component just found
            let comp_ep = self.epoch;
            let rest: Vec<usize> = set.iter().copied().filter(|&v| self.stamp[v] != comp_ep).collect();
            self.dissect(visit);
            self.dissect(rest);
            return;
        }
        // pseudo-peripheral root: restart from the last node until the depth stops growing
        let mut root = *visit.last().unwrap();
        let mut depth = self.level[root];
        let mut visit = visit;
        for _ in 0..4 {
            let ep = self.mark(&set);
            let v2 = self.bfs(root, ep);
            let far = *v2.last().unwrap();
            let d = self.level[far];
            visit = v2;
            if d <= depth {
                break;
            }
            depth = d;
            root = far;
        }
        let depth = self.level[*visit.last().unwrap()];
        if depth < 2 {
            self.order.extend(set);
            return;
        }
        // middle level by node count
        let mut counts = vec![0usize; depth + 1];
        for &v in &visit {
            counts[self.level[v]] += 1;
        }
        let half = visit.len() / 2;
        let mut acc = 0;
        let mut mid = 1;
        for (l, &c) in counts.iter().enumerate() {
            acc += c;
            if acc >= half {
                mid = l.clamp(1, depth - 1);
                break;
            }
        }
        let (mut lower, mut upper, mut sep) = (Vec::new(), Vec::new(), Vec::new());
        for &v in &visit {
            let l = self.level[v];
            if l < mid {
                lower.push(v);
            } else if l > mid {
                upper.push(v);
            } else if self.adj[v].iter().any(|&w| self.level[w] == mid + 1 && self.stamp[w] == self.epoch) {
                sep.push(v);
            } else {
                lower.push(v);
            }
        }
        self.dissect(lower);
        self.dissect(upper);
        self.order.extend(sep);
    }
}

/// Fill-reducing nested-dissection ordering from BFS level-set separators. Returns
/// `perm` with `perm[new] = old`.
pub fn nested_dissection(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut nd = Nd { adj, stamp: vec![0; n], level: vec![0; n], epoch: 0, order: Vec::with_capacity(n) };
    nd.dissect((0..n).collect());
    nd.order
}

struct Geo<'a> {
    pts: &'a [[f64; 2]],
    adj: &'a [Vec<usize>],
    side: Vec<u8>,
    stamp: Vec<usize>,
    epoch: usize,
    order: Vec<usize>,
}

impl Geo<'_> {
    fn dissect(&mut self, mut set: Vec<usize>) {
        if set.len() <= LEAF {
            self.order.extend(set);
            return;
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for &v in &set {
            for a in 0..2 {
                lo[a] = lo[a].min(self.pts[v][a]);
                hi[a] = hi[a].max(self.pts[v][a]);
            }
        }
        let axis = if hi[0] - lo[0] >= hi[1] - lo[1] { 0 } else { 1 };
        let half = set.len() / 2;
        let pts = self.pts;
        set.select_nth_unstable_by(half, |&a, &b| pts[a][axis].total_cmp(&pts[b][axis]).then(a.cmp(&b)));
        self.epoch += 1;
        let ep = self.epoch;
        for (r, &v) in set.iter().enumerate() {
            self.stamp[v] = ep;
            self.side[v] = u8::from(r >= half);
        }
        let mut left = Vec::with_capacity(half);
        let mut right = Vec::with_capacity(set.len() - half);
        let mut sep = Vec::new();
        for &v in &set {
            if self.side[v] == 0 {
                left.push(v);
            } else if self.adj[v].iter().any(|&w| self.stamp[w] == ep && self.side[w] == 0) {
                sep.push(v);
            } else {
                right.push(v);
            }
        }
        left.sort_unstable();
        right.sort_unstable();
        sep.sort_unstable();
        self.dissect(left);
        self.dissect(right);
        self.order.extend(sep);
    }
}

/// Nested dissection by recursive median splits of node coordinates along the longer
/// bounding-box axis. Returns `perm` with `perm[new] = old`.
pub fn coordinate_dissection(pts: &[[f64; 2]], adj: &[Vec<usize>]) -> Vec<usize> {
    assert_eq!(pts.len(), adj.len());
    let n = pts.len();
    let mut g = Geo { pts, adj, side: vec![0; n], stamp: vec![0; n], epoch: 0, order: Vec::with_capacity(n) };
    g.dissect((0..n).collect());
    g.order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(k: usize) -> Vec<Vec<usize>> {
        let id = |i: usize, j: usize| i * k + j;
        let mut adj = vec![Vec::new(); k * k];
        for i in 0..k {
            for j in 0..k {
                if i + 1 < k {
                    adj[id(i, j)].push(id(i + 1, j));
                    adj[id(i + 1, j)].push(id(i, j));
                }
                if j + 1 < k {
                    adj[id(i, j)].push(id(i, j + 1));
                    adj[id(i, j + 1)].push(id(i, j));
                }
            }
        }
        adj
    }

    #[test]
    fn is_permutation() {
        for k in [1, 5, 20, 41] {
            let p = nested_dissection(&grid(k));
            let mut s = p.clone();
            s.sort_unstable();
            assert_eq!(s, (0..k * k).collect::<Vec<_>>());
        }
        // disconnected graph
        let mut adj = grid(10);
        adj.extend(grid(10).into_iter().map(|l| l.into_iter().map(|v| v + 100).collect()));
        let mut s = nested_dissection(&adj);
        s.sort_unstable();
        assert_eq!(s, (0..200).collect::<Vec<_>>());

        let k = 30;
        let pts: Vec<[f64; 2]> = (0..k * k).map(|v| [(v / k) as f64, (v % k) as f64]).collect();
        let mut s = coordinate_dissection(&pts, &grid(k));
        s.sort_unstable();
        assert_eq!(s, (0..k * k).collect::<Vec<_>>());
    }
}
