//! P1 finite elements for the Robin and δ-interaction quadratic forms.

use serde::Serialize;

use crate::error::{Error, Result, SolverError};
use crate::linalg::{coordinate_dissection, lanczos_smallest_ordered, LanczosOptions, SymmetricSparseMatrix};
use crate::mesher::{EdgeKind, Mesh, TaggedEdge};

fn check_triangle(m: &Mesh, t: usize) -> Result<f64> {
    let a = m.triangle_area(t);
    let scale = m.triangle_diameter(t);
    if !(a > 1e-14 * scale * scale) || !a.is_finite() {
        return Err(Error::Assembly(format!("triangle {t} {:?} is degenerate (area {a:e})", m.triangles[t])));
    }
    Ok(a)
}

/// Element stiffness `∫ ∇φ_i·∇φ_j` of a positively oriented triangle.
pub fn element_stiffness(p: [crate::geometry::Point; 3]) -> [[f64; 3]; 3] {
    let area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    // gradient of φ_i is (b_i, c_i)/area2
    let b = [p[1].y - p[2].y, p[2].y - p[0].y, p[0].y - p[1].y];
    let c = [p[2].x - p[1].x, p[0].x - p[2].x, p[1].x - p[0].x];
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2);
        }
    }
    k
}

pub fn assemble_stiffness(m: &Mesh) -> Result<SymmetricSparseMatrix> {
    let mut t = Vec::with_capacity(6 * m.triangles.len());
    for (ti, tri) in m.triangles.iter().enumerate() {
        check_triangle(m, ti)?;
        let k = element_stiffness(m.triangle_points(ti));
        for i in 0..3 {
            for j in i..3 {
                t.push((tri[i], tri[j], k[i][j]));
            }
        }
    }
    Ok(SymmetricSparseMatrix::from_triplets(m.nodes.len(), t))
}

/// Consistent mass matrix.
pub fn assemble_mass(m: &Mesh) -> Result<SymmetricSparseMatrix> {
    let mut t = Vec::with_capacity(6 * m.triangles.len());
    for (ti, tri) in m.triangles.iter().enumerate() {
        let a = check_triangle(m, ti)?;
        for i in 0..3 {
            for j in i..3 {
                t.push((tri[i], tri[j], if i == j { a / 6.0 } else { a / 12.0 }));
            }
        }
    }
    Ok(SymmetricSparseMatrix::from_triplets(m.nodes.len(), t))
}

fn edge_mass(m: &Mesh, edges: &[TaggedEdge], weights: &[f64]) -> Result<SymmetricSparseMatrix> {
    let mut t = Vec::with_capacity(3 * edges.len());
    for (k, e) in edges.iter().enumerate() {
        let w = *weights
            .get(e.tag)
            .ok_or_else(|| Error::Assembly(format!("edge {k} {:?} has unknown tag {}", e.nodes, e.tag)))?;
        if w == 0.0 {
            continue;
        }
        let l = m.edge_length(e);
        let [a, b] = e.nodes;
        t.push((a, a, w * l / 3.0));
        t.push((b, b, w * l / 3.0));
        t.push((a, b, w * l / 6.0));
    }
    Ok(SymmetricSparseMatrix::from_triplets(m.nodes.len(), t))
}

/// Per-tag weights of the Robin term: the tag weight on Robin edges, zero elsewhere.
pub fn robin_weights(m: &Mesh) -> Vec<f64> {
    m.tags.iter().map(|t| if t.kind == EdgeKind::Robin { t.weight } else { 0.0 }).collect()
}

/// Per-tag weights of the interface term.
pub fn interface_weights(m: &Mesh) -> Vec<f64> {
    m.tags.iter().map(|t| if t.kind == EdgeKind::Interface { t.weight } else { 0.0 }).collect()
}

/// Boundary mass `Σ_e w_tag(e) ∫_e φ_i φ_j` with `weights` indexed by tag. Every free
/// edge of the triangulation must be a tagged boundary edge.
pub fn assemble_boundary_mass(m: &Mesh, weights: &[f64]) -> Result<SymmetricSparseMatrix> {
    let tagged: std::collections::HashSet<(usize, usize)> =
        m.boundary_edges.iter().map(|e| crate::mesher::edge_key(e.nodes[0], e.nodes[1])).collect();
    for (key, tris) in m.edge_incidence() {
        if tris.len() == 1 && !tagged.contains(&key) {
            return Err(Error::Assembly(format!("boundary edge {key:?} is untagged")));
        }
    }
    edge_mass(m, &m.boundary_edges, weights)
}

/// Interface mass over `interface_edges`, assembled like the boundary mass.
pub fn assemble_interface_mass(m: &Mesh, weights: &[f64]) -> Result<SymmetricSparseMatrix> {
    edge_mass(m, &m.interface_edges, weights)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub alpha: f64,
    pub lambda: f64,
    /// Nodal values, M-normalized; zero at Dirichlet nodes.
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub shift: f64,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Predicted energy `ℰ` with `λ ≈ α²ℰ`, used to place the shift.
    pub energy_estimate: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-8, krylov_dim: 60, max_restarts: 20, energy_estimate: None }
    }
}

impl SolverConfig {
    pub fn with_energy(mut self, e: f64) -> Self {
        self.energy_estimate = Some(e);
        self
    }

    pub fn shift(&self, alpha: f64) -> f64 {
        match self.energy_estimate {
            Some(e) => (1.5 * alpha * alpha * e - 1.0).min(-1.0),
            None => -2.0 * alpha * alpha - 1.0,
        }
    }
}

/// Smallest eigenpair of `(K − αB) u = λ M u`.
pub fn smallest_eig(
    k: &SymmetricSparseMatrix,
    b: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    alpha: f64,
    cfg: &SolverConfig,
) -> std::result::Result<SpectralResult, SolverError> {
    smallest_eig_free(k, b, m, alpha, None, cfg)
}

/// As [`smallest_eig`], restricted to the degrees of freedom listed in `free`
/// (homogeneous Dirichlet values elsewhere).
pub fn smallest_eig_free(
    k: &SymmetricSparseMatrix,
    b: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    alpha: f64,
    free: Option<&[usize]>,
    cfg: &SolverConfig,
) -> std::result::Result<SpectralResult, SolverError> {
    solve_ordered(k, b, m, alpha, free, None, cfg)
}

fn solve_ordered(
    k: &SymmetricSparseMatrix,
    b: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    alpha: f64,
    free: Option<&[usize]>,
    perm: Option<&[usize]>,
    cfg: &SolverConfig,
) -> std::result::Result<SpectralResult, SolverError> {
    let n = k.dim();
    if b.dim() != n || m.dim() != n {
        return Err(SolverError::Dimension(format!("K {n}, B {}, M {}", b.dim(), m.dim())));
    }
    if !(alpha >= 0.0) || !(cfg.tol > 0.0) {
        return Err(SolverError::Dimension(format!("need alpha >= 0 and tol > 0 (alpha {alpha}, tol {})", cfg.tol)));
    }
    let a = SymmetricSparseMatrix::combination(&[(1.0, k), (-alpha, b)]);
    let opts = LanczosOptions { tol: cfg.tol, krylov_dim: cfg.krylov_dim, max_restarts: cfg.max_restarts, ..Default::default() };
    let sigma = cfg.shift(alpha);
    let expand = |v: Vec<f64>| -> Vec<f64> {
        match free {
            None => v,
            Some(f) => {
                let mut full = vec![0.0; n];
                for (&i, x) in f.iter().zip(v) {
                    full[i] = x;
                }
                full
            }
        }
    };
    let out = match free {
        None => lanczos_smallest_ordered(&a, m, sigma, &opts, perm),
        Some(f) => lanczos_smallest_ordered(&a.restrict(f), &m.restrict(f), sigma, &opts, perm),
    };
    match out {
        Ok(o) => Ok(SpectralResult {
            alpha,
            lambda: o.lambda,
            eigenvector: expand(o.vector),
            residual: o.residual,
            iterations: o.iterations,
            shift: o.shift,
        }),
        Err(SolverError::NotConverged { iterations, lambda, residual, eigenvector }) => {
            Err(SolverError::NotConverged { iterations, lambda, residual, eigenvector: expand(eigenvector) })
        }
        Err(e) => Err(e),
    }
}

/// `(uᵀKu − α uᵀBu) / uᵀMu`.
pub fn rayleigh_quotient(
    k: &SymmetricSparseMatrix,
    b: &SymmetricSparseMatrix,
    m: &SymmetricSparseMatrix,
    alpha: f64,
    u: &[f64],
) -> Result<f64> {
    if u.len() != k.dim() {
        return Err(Error::Domain(format!("vector of length {} for a {}-node system", u.len(), k.dim())));
    }
    let den = m.quad(u);
    if !(den > 0.0) {
        return Err(Error::Domain("Rayleigh quotient of the zero vector".into()));
    }
    Ok((k.quad(u) - alpha * b.quad(u)) / den)
}

/// Assembled matrices of one mesh: `K`, the weighted boundary or interface matrix `B`,
/// `M`, and the free degrees of freedom when Dirichlet edges are present.
#[derive(Clone, Debug)]
pub struct FemSystem {
    pub k: SymmetricSparseMatrix,
    pub b: SymmetricSparseMatrix,
    pub m: SymmetricSparseMatrix,
    pub free: Option<Vec<usize>>,
    /// Fill-reducing ordering of the free degrees of freedom from node coordinates.
    pub ordering: Vec<usize>,
}

impl FemSystem {
    fn with_b(mesh: &Mesh, b: SymmetricSparseMatrix) -> Result<Self> {
        let dir = mesh.dirichlet_nodes();
        let free = if dir.iter().any(|&d| d) {
            let f: Vec<usize> = (0..mesh.nodes.len()).filter(|&i| !dir[i]).collect();
            if f.is_empty() {
                return Err(Error::Solver(SolverError::Empty));
            }
            Some(f)
        } else {
            None
        };
        let k = assemble_stiffness(mesh)?;
        let ids: Vec<usize> = free.clone().unwrap_or_else(|| (0..mesh.nodes.len()).collect());
        let pts: Vec<[f64; 2]> = ids.iter().map(|&i| [mesh.nodes[i].x, mesh.nodes[i].y]).collect();
        let pattern = match &free {
            Some(f) => k.restrict(f),
            None => k.clone(),
        };
        let ordering = coordinate_dissection(&pts, &pattern.adjacency());
        Ok(Self { k, b, m: assemble_mass(mesh)?, free, ordering })
    }

    /// Robin problem: `B` from the Robin-tagged boundary edges.
    pub fn robin(mesh: &Mesh) -> Result<Self> {
        let b = assemble_boundary_mass(mesh, &robin_weights(mesh))?;
        Self::with_b(mesh, b)
    }

    /// δ-interaction problem: `B` from the interface edges; Robin-tagged boundary
    /// edges are rejected.
    pub fn interface(mesh: &Mesh) -> Result<Self> {
        if mesh.boundary_edges.iter().any(|e| mesh.tags[e.tag].kind == EdgeKind::Robin) {
            return Err(Error::Assembly("interface problem with Robin boundary edges".into()));
        }
        assemble_boundary_mass(mesh, &vec![0.0; mesh.tags.len()])?;
        let b = assemble_interface_mass(mesh, &interface_weights(mesh))?;
        Self::with_b(mesh, b)
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn solve(&self, alpha: f64, cfg: &SolverConfig) -> std::result::Result<SpectralResult, SolverError> {
        solve_ordered(&self.k, &self.b, &self.m, alpha, self.free.as_deref(), Some(&self.ordering), cfg)
    }

    pub fn rayleigh_quotient(&self, alpha: f64, u: &[f64]) -> Result<f64> {
        rayleigh_quotient(&self.k, &self.b, &self.m, alpha, u)
    }

    /// Coordinate dumps of `K`, `B` and `M`.
    pub fn dump(&self) -> [String; 3] {
        [self.k.to_coordinate_text(), self.b.to_coordinate_text(), self.m.to_coordinate_text()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Polygon};
    use crate::mesher::{refine_uniform, triangulate};
    use approx::assert_relative_eq;

    fn square(levels: usize) -> Mesh {
        refine_uniform(&triangulate(&Polygon::unit_square()).unwrap(), levels).unwrap()
    }

    #[test]
    fn reference_element() {
        let p = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let k = element_stiffness(p);
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(k[i][j], want[i][j], epsilon = 1e-15);
            }
        }
        let mesh = Mesh {
            nodes: p.to_vec(),
            triangles: vec![[0, 1, 2]],
            boundary_edges: vec![],
            interface_edges: vec![],
            tags: vec![],
        };
        let m = assemble_mass(&mesh).unwrap();
        assert_relative_eq!(m.get(0, 0), 1.0 / 12.0, epsilon = 1e-16);
        assert_relative_eq!(m.get(0, 1), 1.0 / 24.0, epsilon = 1e-16);
    }

    #[test]
    fn stiffness_kills_constants_and_mass_integrates_area() {
        let m = square(3);
        let k = assemble_stiffness(&m).unwrap();
        let ones = vec![1.0; m.nodes.len()];
        assert!(k.mul(&ones).iter().all(|v| v.abs() < 1e-12));
        let mm = assemble_mass(&m).unwrap();
        assert_relative_eq!(mm.quad(&ones), 1.0, max_relative = 1e-12);
        let b = assemble_boundary_mass(&m, &robin_weights(&m)).unwrap();
        assert_relative_eq!(b.quad(&ones), 4.0, max_relative = 1e-12);

        let mut w = robin_weights(&m);
        w[0] = 2.0;
        let b2 = assemble_boundary_mass(&m, &w).unwrap();
        assert_relative_eq!(b2.quad(&ones), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn unit_edge_block() {
        let mesh = triangulate(&Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap();
        let mut w = vec![0.0; 3];
        w[0] = 1.0;
        let b = assemble_boundary_mass(&mesh, &w).unwrap();
        assert_relative_eq!(b.get(0, 0), 1.0 / 3.0, epsilon = 1e-16);
        assert_relative_eq!(b.get(0, 1), 1.0 / 6.0, epsilon = 1e-16);
        assert_eq!(b.get(2, 2), 0.0);
    }

    #[test]
    fn untagged_edge_and_degenerate_triangle() {
        let mut m = square(1);
        m.boundary_edges.pop();
        assert!(matches!(assemble_boundary_mass(&m, &robin_weights(&m)), Err(Error::Assembly(_))));
        let mut m = square(0);
        m.nodes[2] = m.nodes[0];
        assert!(matches!(assemble_stiffness(&m), Err(Error::Assembly(_))));
    }

    #[test]
    fn neumann_ground_state_and_constant_quotient() {
        let sys = FemSystem::robin(&square(3)).unwrap();
        let r = sys.solve(0.0, &SolverConfig::default()).unwrap();
        assert!(r.lambda.abs() < 1e-10);
        let c = r.eigenvector[0];
        assert!(r.eigenvector.iter().all(|v| (v - c).abs() < 1e-8));
        assert_relative_eq!(c, 1.0, max_relative = 1e-8);
        let ones = vec![1.0; sys.dim()];
        assert_relative_eq!(sys.rayleigh_quotient(1.0, &ones).unwrap(), -4.0, max_relative = 1e-12);
        assert!(sys.rayleigh_quotient(1.0, &vec![0.0; sys.dim()]).is_err());
    }

    #[test]
    fn eigenpair_is_consistent() {
        let sys = FemSystem::robin(&square(4)).unwrap();
        let cfg = SolverConfig::default().with_energy(-2.0);
        let r = sys.solve(4.0, &cfg).unwrap();
        assert!(r.residual <= cfg.tol);
        assert_relative_eq!(sys.m.quad(&r.eigenvector), 1.0, max_relative = 1e-10);
        assert_relative_eq!(sys.rayleigh_quotient(4.0, &r.eigenvector).unwrap(), r.lambda, max_relative = 1e-10);
        assert!(r.lambda < -16.0 && r.lambda > -40.0);
    }
}
