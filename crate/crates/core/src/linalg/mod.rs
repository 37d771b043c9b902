//! Symmetric sparse matrices, a sparse LDLᵀ factorization and a shift-invert Lanczos
//! solver for the generalized problem `A u = λ M u`.

mod lanczos;
mod ldl;
mod ordering;

pub use lanczos::{lanczos_smallest, lanczos_smallest_ordered, LanczosOptions, LanczosOutcome};
pub use ldl::Ldl;
pub use ordering::{coordinate_dissection, nested_dissection};

use std::fmt::Write as _;

/// Symmetric matrix stored by its upper triangle in compressed rows: row `i` holds
/// the entries `(i, j)` with `j >= i`, columns sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricSparseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Builds from `(i, j, v)` triplets; either triangle may be given and duplicates are
    /// summed in input order.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut t: Vec<(usize, usize, f64)> =
            triplets.into_iter().map(|(i, j, v)| if i <= j { (i, j, v) } else { (j, i, v) }).collect();
        assert!(t.iter().all(|&(_, j, _)| j < n), "triplet index out of range");
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored (upper-triangle) entry count.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Upper-triangle entries `(j, value)` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    /// All stored entries `(i, j, v)` with `i <= j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let xi = x[i];
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                let v = self.vals[k];
                acc += v * x[j];
                if j != i {
                    y[j] += v * xi;
                }
            }
            y[i] += acc;
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_into(x, &mut y);
        y
    }

    /// `xᵀ A x`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                let v = self.vals[k] * x[i] * x[j];
                s += if i == j { v } else { 2.0 * v };
            }
        }
        s
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { vals: self.vals.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// `Σ c_k A_k` over matrices of equal dimension.
    pub fn combination(terms: &[(f64, &SymmetricSparseMatrix)]) -> Self {
        let n = terms.first().map_or(0, |t| t.1.n);
        assert!(terms.iter().all(|t| t.1.n == n), "dimension mismatch");
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut acc: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            acc.clear();
            for &(c, m) in terms {
                acc.extend(m.row(i).map(|(j, v)| (j, c * v)));
            }
            acc.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < acc.len() {
                let j = acc[k].0;
                let mut v = 0.0;
                while k < acc.len() && acc[k].0 == j {
                    v += acc[k].1;
                    k += 1;
                }
                cols.push(j);
                vals.push(v);
            }
            row_ptr[i + 1] = cols.len();
        }
        Self { n, row_ptr, cols, vals }
    }

    /// Principal submatrix on the rows/columns `keep` (in that order).
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let t = keep.iter().flat_map(|&i| {
            let map = &map;
            self.row(i).filter(move |&(j, _)| map[j] != usize::MAX).map(move |(j, v)| (map[i], map[j], v))
        });
        Self::from_triplets(keep.len(), t)
    }

    /// Same matrix with rows/columns renumbered: entry `(i, j)` moves to `(p[i], p[j])`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        Self::from_triplets(self.n, self.entries().map(|(i, j, v)| (p[i], p[j], v)))
    }

    /// Adjacency lists of the off-diagonal pattern.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, j, _) in self.entries() {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        adj
    }

    /// Coordinate text, one `i j value` line per stored upper-triangle entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        for (i, j, v) in self.entries() {
            let _ = writeln!(s, "{i} {j} {v:.17e}");
        }
        s
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.entries() {
            d[i][j] = v;
            d[j][i] = v;
        }
        d
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SymmetricSparseMatrix {
        SymmetricSparseMatrix::from_triplets(
            3,
            [(0, 0, 2.0), (1, 0, -1.0), (0, 1, 0.0), (1, 1, 2.0), (2, 1, -1.0), (2, 2, 2.0), (2, 2, 1.0)],
        )
    }

    #[test]
    fn triplets_sum_and_symmetrize() {
        let a = sample();
        assert_eq!(a.nnz(), 5);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.get(0, 1), -1.0);
        assert_eq!(a.get(2, 2), 3.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.mul(&[1.0, 1.0, 1.0]), vec![1.0, 0.0, 2.0]);
        assert_eq!(a.quad(&[1.0, 1.0, 1.0]), 3.0);
    }

    #[test]
    fn combination_restrict_permute() {
        let a = sample();
        let i = SymmetricSparseMatrix::from_diagonal(&[1.0, 1.0, 1.0]);
        let c = SymmetricSparseMatrix::combination(&[(1.0, &a), (-2.0, &i)]);
        assert_eq!(c.diagonal(), vec![0.0, 0.0, 1.0]);
        assert_eq!(c.get(1, 2), -1.0);
        let r = a.restrict(&[2, 1]);
        assert_eq!(r.to_dense(), vec![vec![3.0, -1.0], vec![-1.0, 2.0]]);
        let p = a.permuted(&[2, 1, 0]);
        assert_eq!(p.get(0, 0), 3.0);
        assert_eq!(p.get(2, 1), -1.0);
        assert_eq!(a.to_coordinate_text().lines().count(), 5);
    }
}
