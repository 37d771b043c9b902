use nalgebra::{DMatrix, SymmetricEigen};

use super::{dot, norm2, Ldl, SymmetricSparseMatrix};
use crate::error::SolverError;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Bound on `‖A u − λ M u‖₂ / (‖M u‖₂ · max(1, |λ|))`.
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub shift_retries: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-8, krylov_dim: 60, max_restarts: 20, shift_retries: 5 }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOutcome {
    pub lambda: f64,
    /// M-normalized, with nonnegative component sum.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub shift: f64,
}

/// Factors `A − σM`, moving the shift down by `σ ← 2σ − 1` until the factorization is
/// positive definite.
fn factor_shifted(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    mut sigma: f64,
    retries: usize,
    perm: Option<&[usize]>,
) -> Result<(Ldl, f64), SolverError> {
    for attempt in 0..=retries {
        let shifted = SymmetricSparseMatrix::combination(&[(1.0, a), (-sigma, m)]);
        let f = match perm {
            Some(p) => Ldl::factor_with(&shifted, p.to_vec()),
            None => Ldl::factor(&shifted),
        };
        match f {
            Ok(f) => return Ok((f, sigma)),
            Err(SolverError::NotPositiveDefinite { .. }) if attempt < retries => sigma = 2.0 * sigma - 1.0,
            Err(SolverError::NotPositiveDefinite { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Err(SolverError::Factorization { retries, shift: sigma })
}

fn residual(a: &SymmetricSparseMatrix, m: &SymmetricSparseMatrix, u: &[f64]) -> (f64, f64, Vec<f64>) {
    let au = a.mul(u);
    let mu = m.mul(u);
    let lambda = dot(u, &au) / dot(u, &mu);
    let r: Vec<f64> = au.iter().zip(&mu).map(|(x, y)| x - lambda * y).collect();
    let res = norm2(&r) / (norm2(&mu) * lambda.abs().max(1.0));
    (lambda, res, mu)
}

/// Smallest eigenpair of `A u = λ M u` (`M` positive definite) by shift-invert Lanczos
/// in the M-inner product with full reorthogonalization and explicit restarts. The
/// shift `sigma` must lie below the spectrum; it is lowered automatically when the
/// shifted matrix is not positive definite.
pub fn lanczos_smallest(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    sigma: f64,
    opts: &LanczosOptions,
) -> Result<LanczosOutcome, SolverError> {
    lanczos_smallest_ordered(a, m, sigma, opts, None)
}

/// As [`lanczos_smallest`] with a given fill-reducing ordering (`perm[new] = old`).
pub fn lanczos_smallest_ordered(
    a: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    sigma: f64,
    opts: &LanczosOptions,
    perm: Option<&[usize]>,
) -> Result<LanczosOutcome, SolverError> {
    let n = a.dim();
    if n == 0 {
        return Err(SolverError::Empty);
    }
    if m.dim() != n {
        return Err(SolverError::Dimension(format!("A is {n}x{n}, M is {0}x{0}", m.dim())));
    }
    let (fact, sigma) = factor_shifted(a, m, sigma, opts.shift_retries, perm)?;
    let kdim = opts.krylov_dim.clamp(1, n);

    let mut start = vec![1.0; n];
    let mut iterations = 0;
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for _ in 0..=opts.max_restarts {
        let ms = m.mul(&start);
        let nrm = dot(&start, &ms).sqrt();
        let mut q: Vec<Vec<f64>> = vec![start.iter().map(|v| v / nrm).collect()];
        let mut mq: Vec<Vec<f64>> = vec![ms.iter().map(|v| v / nrm).collect()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut ritz: Option<(f64, Vec<f64>)> = None;
        for j in 0..kdim {
            iterations += 1;
            let mut w = fact.solve(&mq[j]);
            let mut aj = 0.0;
            for _pass in 0..2 {
                for i in 0..=j {
                    let c = dot(&w, &mq[i]);
                    if i == j {
                        aj += c;
                    }
                    for (wk, qk) in w.iter_mut().zip(&q[i]) {
                        *wk -= c * qk;
                    }
                }
            }
            alpha.push(aj);
            let mw = m.mul(&w);
            let b = dot(&w, &mw).max(0.0).sqrt();

            let k = j + 1;
            let t = DMatrix::from_fn(k, k, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let (imax, &theta) =
                eig.eigenvalues.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("nonempty");
            let s: Vec<f64> = eig.eigenvectors.column(imax).iter().copied().collect();
            let estimate = (b * s[k - 1]).abs() / theta.abs().max(f64::MIN_POSITIVE);
            let breakdown = b <= 1e-13 * theta.abs();
            ritz = Some((theta, s));
            if estimate <= 1e-3 * opts.tol || breakdown || k == kdim {
                break;
            }
            beta.push(b);
            q.push(w.iter().map(|v| v / b).collect());
            mq.push(mw.iter().map(|v| v / b).collect());
        }
        let (_, s) = ritz.expect("at least one Lanczos step");
        let mut u = vec![0.0; n];
        for (qi, si) in q.iter().zip(&s) {
            for (uk, qk) in u.iter_mut().zip(qi) {
                *uk += si * qk;
            }
        }
        let (lambda, res, mu) = residual(a, m, &u);
        let unorm = dot(&u, &mu).sqrt();
        let sign = if u.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        u.iter_mut().for_each(|v| *v *= sign / unorm);
        if res <= opts.tol {
            return Ok(LanczosOutcome { lambda, vector: u, residual: res, iterations, shift: sigma });
        }
        if best.as_ref().map_or(true, |b| res < b.1) {
            best = Some((lambda, res, u.clone()));
        }
        start = u;
    }
    let (lambda, residual, eigenvector) = best.expect("at least one restart");
    Err(SolverError::NotConverged { iterations, lambda, residual, eigenvector })
}
