//! δ-interaction on a closed curve, truncated to a Neumann box.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::cone_oracle::{delta_corner_energy_numeric, richardson_in_r, TruncationSpec, DELTA_LINE_ENERGY, R_LADDER};
use crate::error::{Error, Result};
use crate::fem::{FemSystem, SolverConfig, SpectralResult};
use crate::geometry::{Corner, Point, Polygon};
use crate::mesher::{delta_box_mesh, refine_graded, refine_uniform, ArtificialBc, GradingPolicy, InterfaceShape, Mesh};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaProblem {
    pub interface: InterfaceShape,
    pub lo: Point,
    pub hi: Point,
    pub alpha: f64,
}

impl DeltaProblem {
    /// Box around the interface's bounding box, enlarged by `margin` on every side.
    pub fn with_margin(interface: InterfaceShape, margin: f64, alpha: f64) -> Self {
        let (lo, hi) = interface.bounding_box();
        Self {
            interface,
            lo: Point::new(lo.x - margin, lo.y - margin),
            hi: Point::new(hi.x + margin, hi.y + margin),
            alpha,
        }
    }

    /// Smallest gap between the interface's bounding box and the box.
    pub fn margin(&self) -> f64 {
        let (lo, hi) = self.interface.bounding_box();
        (lo.x - self.lo.x).min(lo.y - self.lo.y).min(self.hi.x - hi.x).min(self.hi.y - hi.y)
    }

    /// Smallest admissible margin, `max(4/α, diam/4)`.
    pub fn required_margin(&self) -> f64 {
        let decay = if self.alpha > 0.0 { 4.0 / self.alpha } else { 0.0 };
        decay.max(0.25 * self.interface.diameter())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!("interface strength must be nonnegative, got {}", self.alpha)));
        }
        if let InterfaceShape::Polygon(p) = &self.interface {
            p.ensure_valid()?;
        }
        let m = self.margin();
        if !(m > 0.0) {
            return Err(Error::Domain("interface must lie strictly inside the box".into()));
        }
        let need = self.required_margin();
        if m < need * (1.0 - 1e-12) {
            return Err(Error::Domain(format!("box margin {m} below the required {need}")));
        }
        Ok(())
    }

    fn corners(&self) -> Result<Vec<Corner>> {
        match &self.interface {
            InterfaceShape::Polygon(p) => p.corner_openings(),
            InterfaceShape::Circle { .. } => Ok(Vec::new()),
        }
    }

    /// Rate of decay of the ground state away from the interface, `α/2`.
    fn decay(&self) -> f64 {
        (0.5 * self.alpha).max(1.0 / self.interface.diameter())
    }
}

/// Mesh refinement parameters for δ problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaMeshPolicy {
    pub c_bl: f64,
    pub layers: usize,
    pub ratio: f64,
    pub node_cap: usize,
}

impl Default for DeltaMeshPolicy {
    fn default() -> Self {
        Self { c_bl: 0.25, layers: 3, ratio: 0.5, node_cap: crate::mesher::DEFAULT_NODE_CAP }
    }
}

/// Conforming box mesh with interface edges graded toward the curve and its corners,
/// followed by `levels` uniform refinements.
pub fn build_delta_mesh(p: &DeltaProblem, policy: &DeltaMeshPolicy, levels: usize) -> Result<Mesh> {
    p.validate()?;
    let coarse = delta_box_mesh(&p.interface, p.lo, p.hi)?;
    let decay = p.decay();
    let g = GradingPolicy {
        alpha: decay,
        layers: policy.layers,
        ratio: policy.ratio,
        first_layer: policy.c_bl / decay,
        max_size: Some(0.25 * (p.hi.x - p.lo.x).max(p.hi.y - p.lo.y)),
        node_cap: policy.node_cap,
    };
    let graded = refine_graded(&coarse, &g, &p.corners()?)?;
    refine_uniform(&graded, levels)
}

/// Ground state of `(K − αB_S) u = λ M u` with Neumann conditions on the box.
pub fn solve_delta(p: &DeltaProblem, mesh: &Mesh, tol: f64) -> Result<SpectralResult> {
    p.validate()?;
    let sys = FemSystem::interface(mesh)?;
    let cfg = SolverConfig { tol, energy_estimate: Some(-0.3), ..SolverConfig::default() };
    Ok(sys.solve(p.alpha, &cfg)?)
}

/// Predicted `λ/α²` limit of a δ interface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaPrediction {
    pub energy: f64,
    /// Truncation error bar of the minimizing corner value (zero for the line value).
    pub error_bar: f64,
    /// Set when the minimizing corner value is not separated from −1/4 by its error bar.
    pub flagged: bool,
    pub per_corner: Vec<(Corner, f64)>,
}

fn oracle_cache() -> &'static Mutex<HashMap<(u64, u64), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Broken-line energy at opening `theta` and radius `r` (Neumann truncation), memoized
/// per process.
pub fn cached_delta_corner_energy(theta: f64, r: f64) -> Result<f64> {
    let key = (theta.to_bits(), r.to_bits());
    if let Some(&v) = oracle_cache().lock().expect("oracle cache").get(&key) {
        return Ok(v);
    }
    let spec = TruncationSpec::new(r, ArtificialBc::Neumann);
    let v = delta_corner_energy_numeric(theta, &spec, 0.0, &SolverConfig::default())?.energy;
    oracle_cache().lock().expect("oracle cache").insert(key, v);
    Ok(v)
}

/// `min(−1/4, min_k E^δ(θ_k))` over the corners of the polygon.
pub fn delta_energy_prediction(p: &Polygon) -> Result<DeltaPrediction> {
    p.ensure_valid()?;
    let mut best = DeltaPrediction { energy: DELTA_LINE_ENERGY, error_bar: 0.0, flagged: false, per_corner: Vec::new() };
    for c in p.corner_openings()? {
        let coarse = cached_delta_corner_energy(c.opening, R_LADDER[0])?;
        let fine = cached_delta_corner_energy(c.opening, R_LADDER[1])?;
        let est = richardson_in_r(coarse, fine);
        best.per_corner.push((c, est.estimate));
        if est.estimate < best.energy {
            best.energy = est.estimate;
            best.error_bar = est.error_bar;
            best.flagged = est.estimate + est.error_bar >= DELTA_LINE_ENERGY;
        }
    }
    Ok(best)
}

/// Prediction for a smooth closed curve: the line value.
pub fn smooth_delta_energy() -> DeltaPrediction {
    DeltaPrediction { energy: DELTA_LINE_ENERGY, error_bar: 0.0, flagged: false, per_corner: Vec::new() }
}
