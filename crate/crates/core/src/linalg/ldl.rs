use super::{nested_dissection, SymmetricSparseMatrix};
use crate::error::SolverError;

const NONE: usize = usize::MAX;

/// Sparse `P A Pᵀ = L D Lᵀ` factorization (up-looking, elimination-tree driven) of a
/// symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Ldl {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<f64>,
    d: Vec<f64>,
}

impl Ldl {
    /// Factors `a`, returning an error naming the first pivot that is not positive.
    pub fn factor(a: &SymmetricSparseMatrix) -> Result<Self, SolverError> {
        let perm = nested_dissection(&a.adjacency());
        Self::factor_with(a, perm)
    }

    pub fn factor_with(a: &SymmetricSparseMatrix, perm: Vec<usize>) -> Result<Self, SolverError> {
        let n = a.dim();
        if n == 0 {
            return Err(SolverError::Empty);
        }
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        // column k of the permuted upper triangle: entries (i, k) with i <= k
        let mut col_cnt = vec![0usize; n + 1];
        for (i, j, _) in a.entries() {
            let (pi, pj) = (inv[i], inv[j]);
            col_cnt[pi.max(pj) + 1] += 1;
        }
        for k in 0..n {
            col_cnt[k + 1] += col_cnt[k];
        }
        let ap = col_cnt.clone();
        let mut fill = col_cnt;
        let mut ai = vec![0usize; a.nnz()];
        let mut ax = vec![0.0; a.nnz()];
        for (i, j, v) in a.entries() {
            let (pi, pj) = (inv[i], inv[j]);
            let (r, c) = if pi <= pj { (pi, pj) } else { (pj, pi) };
            ai[fill[c]] = r;
            ax[fill[c]] = v;
            fill[c] += 1;
        }

        // symbolic: elimination tree and column counts
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for p in ap[k]..ap[k + 1] {
                let mut i = ai[p];
                while i < k && flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }

        // numeric
        let total = lp[n];
        let mut li = vec![0usize; total];
        let mut lx = vec![0.0; total];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        lnz.iter_mut().for_each(|c| *c = 0);
        flag.iter_mut().for_each(|f| *f = NONE);
        for k in 0..n {
            y[k] = 0.0;
            let mut top = n;
            flag[k] = k;
            let mut diag_scale: f64 = 0.0;
            for p in ap[k]..ap[k + 1] {
                let mut i = ai[p];
                y[i] += ax[p];
                if i == k {
                    diag_scale = ax[p].abs();
                }
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            d[k] = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let p2 = lp[i] + lnz[i];
                for p in lp[i]..p2 {
                    y[li[p]] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                d[k] -= l_ki * yi;
                li[p2] = k;
                lx[p2] = l_ki;
                lnz[i] += 1;
            }
            if !(d[k] > 1e-14 * diag_scale) || !d[k].is_finite() {
                return Err(SolverError::NotPositiveDefinite { pivot: perm[k], value: d[k] });
            }
        }
        Ok(Self { n, perm, col_ptr: lp, rows: li, vals: lx, d })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros of the factor `L` (strictly lower part).
    pub fn factor_nnz(&self) -> usize {
        self.vals.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                    x[self.rows[p]] -= self.vals[p] * xj;
                }
            }
        }
        for j in 0..self.n {
            x[j] /= self.d[j];
        }
        for j in (0..self.n).rev() {
            let mut s = x[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                s -= self.vals[p] * x[self.rows[p]];
            }
            x[j] = s;
        }
        let mut out = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    fn laplacian_2d(k: usize, shift: f64) -> SymmetricSparseMatrix {
        let id = |i: usize, j: usize| i * k + j;
        let mut t = Vec::new();
        for i in 0..k {
            for j in 0..k {
                t.push((id(i, j), id(i, j), 4.0 + shift));
                if i + 1 < k {
                    t.push((id(i, j), id(i + 1, j), -1.0));
                }
                if j + 1 < k {
                    t.push((id(i, j), id(i, j + 1), -1.0));
                }
            }
        }
        SymmetricSparseMatrix::from_triplets(k * k, t)
    }

    #[test]
    fn solves_grid_laplacian() {
        let a = laplacian_2d(37, 0.01);
        let f = Ldl::factor(&a).unwrap();
        let xs: Vec<f64> = (0..a.dim()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let b = a.mul(&xs);
        let x = f.solve(&b);
        let err: Vec<f64> = x.iter().zip(&xs).map(|(p, q)| p - q).collect();
        assert!(norm2(&err) < 1e-10 * norm2(&xs));
        // nested dissection keeps the fill well below the dense band width
        assert!(f.factor_nnz() < 37 * 37 * 37 / 2, "fill {}", f.factor_nnz());
    }

    #[test]
    fn natural_order_small() {
        let a = SymmetricSparseMatrix::from_triplets(2, [(0, 0, 4.0), (0, 1, 2.0), (1, 1, 3.0)]);
        let f = Ldl::factor_with(&a, vec![0, 1]).unwrap();
        let x = f.solve(&[2.0, 1.0]);
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite() {
        let a = laplacian_2d(10, -1.0);
        assert!(matches!(Ldl::factor(&a), Err(SolverError::NotPositiveDefinite { .. })));
        let z = SymmetricSparseMatrix::zeros(0);
        assert!(matches!(Ldl::factor(&z), Err(SolverError::Empty)));
    }
}
