//! Python bindings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use robin_corner::applications;
use robin_corner::asymptotics::{self, MeshPolicy, SweepOptions};
use robin_corner::cone_energy;
use robin_corner::cone_oracle::{self, TruncationSpec};
use robin_corner::delta::{self, DeltaMeshPolicy, DeltaProblem};
use robin_corner::fem::SolverConfig;
use robin_corner::geometry::{DomainSpec, Point, Polygon};
use robin_corner::mesher::{ArtificialBc, InterfaceShape};
use robin_corner::reference;
use robin_corner::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Solver(s) => PyRuntimeError::new_err(s.to_string()),
        Error::Budget { .. } | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn bc(s: &str) -> PyResult<ArtificialBc> {
    s.parse().map_err(err)
}

fn policy(c_bl: Option<f64>, layers: Option<usize>, max_size: Option<f64>, levels: Option<usize>) -> MeshPolicy {
    let d = MeshPolicy::default();
    MeshPolicy {
        c_bl: c_bl.unwrap_or(d.c_bl),
        layers: layers.unwrap_or(d.layers),
        max_size: max_size.unwrap_or(d.max_size),
        levels: levels.unwrap_or(d.levels),
        ..d
    }
}

/// Simple polygon with counter-clockwise vertices and optional per-edge weights.
#[pyclass(name = "Polygon", module = "robin_corner", frozen)]
struct PyPolygon {
    inner: Polygon,
}

#[pymethods]
impl PyPolygon {
    #[new]
    #[pyo3(signature = (vertices, weights=None))]
    fn new(vertices: Vec<(f64, f64)>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let pts = vertices.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        Ok(Self { inner: Polygon::checked(pts, weights).map_err(err)? })
    }

    #[staticmethod]
    fn square() -> Self {
        Self { inner: Polygon::unit_square() }
    }

    #[staticmethod]
    fn l_shape() -> Self {
        Self { inner: Polygon::l_shape() }
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: Polygon::parse(text).map_err(err)? })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn perimeter(&self) -> f64 {
        self.inner.perimeter()
    }

    /// `(vertex_index, x, y, opening)` per corner.
    fn corners(&self) -> PyResult<Vec<(usize, f64, f64, f64)>> {
        Ok(self
            .inner
            .corner_openings()
            .map_err(err)?
            .into_iter()
            .map(|c| (c.vertex_index, c.position.x, c.position.y, c.opening))
            .collect())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Polygon({} vertices)", self.inner.len())
    }
}

/// Polygon or disk domain.
#[pyclass(name = "Domain", module = "robin_corner", frozen)]
struct PyDomain {
    inner: DomainSpec,
}

#[pymethods]
impl PyDomain {
    #[staticmethod]
    fn polygon(p: &PyPolygon) -> Self {
        Self { inner: DomainSpec::Polygon(p.inner.clone()) }
    }

    #[staticmethod]
    fn disk(radius: f64) -> PyResult<Self> {
        let d = DomainSpec::Disk { radius };
        d.validate().map_err(err)?;
        Ok(Self { inner: d })
    }

    /// Built-in name (`square`, `lshape`, `hexagon`, `disk`) or polygon file path.
    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        Ok(Self { inner: DomainSpec::from_name_or_path(name).map_err(err)? })
    }

    fn energy(&self) -> PyResult<f64> {
        Ok(cone_energy::domain_energy(&self.inner).map_err(err)?.energy.value())
    }

    #[pyo3(signature = (alpha, c_bl=None, layers=None, max_size=None, levels=None, tol=1e-8))]
    fn solve(
        &self,
        alpha: f64,
        c_bl: Option<f64>,
        layers: Option<usize>,
        max_size: Option<f64>,
        levels: Option<usize>,
        tol: f64,
    ) -> PyResult<SpectralResult> {
        let cfg = SolverConfig { tol, ..SolverConfig::default() };
        let (r, mesh) = asymptotics::solve_domain(&self.inner, alpha, &policy(c_bl, layers, max_size, levels), &cfg).map_err(err)?;
        Ok(SpectralResult { alpha, eigenvalue: r.lambda, residual: r.residual, nodes: mesh.nodes.len(), eigenvector: r.eigenvector })
    }

    #[pyo3(signature = (alphas, c_bl=None, threads=None))]
    fn sweep(&self, alphas: Vec<f64>, c_bl: Option<f64>, threads: Option<usize>) -> PyResult<SweepTable> {
        let opts = SweepOptions { policy: policy(c_bl, None, None, None), threads, ..SweepOptions::default() };
        Ok(SweepTable { inner: asymptotics::sweep(&self.inner, &alphas, &opts).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            DomainSpec::Polygon(p) => format!("Domain.polygon({} vertices)", p.len()),
            DomainSpec::Disk { radius } => format!("Domain.disk({radius})"),
        }
    }
}

#[pyclass(module = "robin_corner", frozen, get_all)]
struct SpectralResult {
    alpha: f64,
    eigenvalue: f64,
    residual: f64,
    nodes: usize,
    eigenvector: Vec<f64>,
}

#[pymethods]
impl SpectralResult {
    fn __repr__(&self) -> String {
        format!("SpectralResult(alpha={}, eigenvalue={}, residual={:e}, nodes={})", self.alpha, self.eigenvalue, self.residual, self.nodes)
    }
}

#[pyclass(module = "robin_corner", frozen)]
struct SweepTable {
    inner: asymptotics::SweepTable,
}

#[pymethods]
impl SweepTable {
    /// `(alpha, lambda, residual, nodes)` per row.
    fn rows(&self) -> Vec<(f64, f64, f64, usize)> {
        self.inner.rows.iter().map(|r| (r.alpha, r.lambda, r.residual, r.nodes)).collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn predicted_energy(&self) -> f64 {
        self.inner.predicted_energy
    }

    fn rate_fit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let f = asymptotics::rate_fit(&self.inner).map_err(err)?;
        let env = asymptotics::envelope_check(&self.inner, &asymptotics::RateModel::polygon(), &f);
        let d = PyDict::new(py);
        d.set_item("status", f.status.to_string())?;
        d.set_item("c", f.c)?;
        d.set_item("rho", f.rho)?;
        d.set_item("r_squared", f.r_squared)?;
        d.set_item("envelope_passes", env.passes)?;
        Ok(d)
    }
}

#[pyclass(module = "robin_corner", frozen, get_all)]
struct OracleRun {
    theta: f64,
    radius: f64,
    bc: String,
    energy: f64,
    residual: f64,
    nodes: usize,
    status: String,
}

impl From<cone_oracle::OracleRun> for OracleRun {
    fn from(r: cone_oracle::OracleRun) -> Self {
        Self {
            theta: r.theta,
            radius: r.radius,
            bc: r.bc.to_string(),
            energy: r.energy,
            residual: r.residual,
            nodes: r.nodes,
            status: r.status.to_string(),
        }
    }
}

#[pymethods]
impl OracleRun {
    fn __repr__(&self) -> String {
        format!("OracleRun(theta={}, R={}, bc={}, energy={}, status={})", self.theta, self.radius, self.bc, self.energy, self.status)
    }
}

#[pyfunction]
fn sector_energy(theta: f64) -> PyResult<f64> {
    Ok(cone_energy::sector_energy(theta).map_err(err)?.value())
}

#[pyfunction]
#[pyo3(signature = (theta, radius=16.0, bc="dirichlet"))]
fn sector_oracle(theta: f64, radius: f64, bc: &str) -> PyResult<OracleRun> {
    let spec = TruncationSpec::new(radius, self::bc(bc)?);
    Ok(cone_oracle::sector_run(theta, &spec, &SolverConfig::default()).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (theta, radius=16.0, bc="neumann", margin=0.0125))]
fn delta_corner_oracle(theta: f64, radius: f64, bc: &str, margin: f64) -> PyResult<OracleRun> {
    let spec = TruncationSpec::new(radius, self::bc(bc)?);
    Ok(cone_oracle::delta_corner_energy_numeric(theta, &spec, margin, &SolverConfig::default()).map_err(err)?.into())
}

/// δ-interaction ground state on a polygon, or on a circle of radius `circle`.
#[pyfunction]
#[pyo3(signature = (alpha, margin, polygon=None, circle=None))]
fn delta_solve(alpha: f64, margin: f64, polygon: Option<&PyPolygon>, circle: Option<f64>) -> PyResult<SpectralResult> {
    let shape = match (polygon, circle) {
        (Some(p), None) => InterfaceShape::Polygon(p.inner.clone()),
        (None, Some(r)) => InterfaceShape::Circle { center: Point::new(0.0, 0.0), radius: r },
        _ => return Err(PyValueError::new_err("give exactly one of polygon, circle")),
    };
    let p = DeltaProblem::with_margin(shape, margin, alpha);
    let mesh = delta::build_delta_mesh(&p, &DeltaMeshPolicy::default(), 0).map_err(err)?;
    let r = delta::solve_delta(&p, &mesh, 1e-8).map_err(err)?;
    Ok(SpectralResult { alpha, eigenvalue: r.lambda, residual: r.residual, nodes: mesh.nodes.len(), eigenvector: r.eigenvector })
}

/// `(C(ε), ε C(ε) / |ℰ|)`.
#[pyfunction]
fn ehrling_constant(domain: &PyDomain, epsilon: f64) -> PyResult<(f64, f64)> {
    let r = applications::ehrling_constant(&domain.inner, epsilon, &MeshPolicy::default(), &SolverConfig::default()).map_err(err)?;
    Ok((r.c_eps, r.limit_ratio))
}

#[pyfunction]
#[pyo3(signature = (domain, t_c0, xi0, b, eigenvalue=None))]
fn critical_temperature(domain: &PyDomain, t_c0: f64, xi0: f64, b: f64, eigenvalue: Option<f64>) -> PyResult<f64> {
    let r = match eigenvalue {
        Some(l) => applications::critical_temperature_from_lambda(t_c0, xi0, b, l),
        None => applications::critical_temperature(&domain.inner, t_c0, xi0, b, &MeshPolicy::default(), &SolverConfig::default()),
    };
    Ok(r.map_err(err)?.t_c)
}

#[pyfunction]
fn disk_robin_eigenvalue(alpha: f64, radius: f64) -> PyResult<f64> {
    reference::disk_robin_eigenvalue(alpha, radius).map_err(err)
}

#[pyfunction]
fn circle_delta_eigenvalue(alpha: f64, radius: f64) -> PyResult<f64> {
    reference::circle_delta_eigenvalue(alpha, radius).map_err(err)
}

#[pymodule]
#[pyo3(name = "robin_corner")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolygon>()?;
    m.add_class::<PyDomain>()?;
    m.add_class::<SpectralResult>()?;
    m.add_class::<SweepTable>()?;
    m.add_class::<OracleRun>()?;
    m.add_function(wrap_pyfunction!(sector_energy, m)?)?;
    m.add_function(wrap_pyfunction!(sector_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(delta_corner_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(delta_solve, m)?)?;
    m.add_function(wrap_pyfunction!(ehrling_constant, m)?)?;
    m.add_function(wrap_pyfunction!(critical_temperature, m)?)?;
    m.add_function(wrap_pyfunction!(disk_robin_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(circle_delta_eigenvalue, m)?)?;
    m.add("DELTA_LINE_ENERGY", cone_oracle::DELTA_LINE_ENERGY)?;
    Ok(())
}
