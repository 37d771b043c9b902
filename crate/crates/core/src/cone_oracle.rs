//! Truncated-domain estimates of model-cone ground-state energies at parameter 1.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::cone_energy::sector_energy;
use crate::error::{Error, Result};
use crate::fem::{FemSystem, SolverConfig};
use crate::geometry::{Corner, Point};
use crate::mesher::{
    arc_edge_marks, broken_line_disk_mesh, graded_marker, refine_by, refine_uniform, sector_mesh, ArtificialBc, GradingPolicy,
    Mesh, DEFAULT_NODE_CAP,
};

/// Energy of the δ-interaction on a straight line at unit strength.
pub const DELTA_LINE_ENERGY: f64 = -0.25;

/// Default truncation radii.
pub const R_LADDER: [f64; 2] = [8.0, 16.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationSpec {
    pub radius: f64,
    pub artificial_bc: ArtificialBc,
    /// Uniform refinements applied after grading.
    pub levels: usize,
    pub c_bl: f64,
    pub layers: usize,
    pub ratio: f64,
    pub node_cap: usize,
}

impl TruncationSpec {
    pub fn new(radius: f64, artificial_bc: ArtificialBc) -> Self {
        Self { radius, artificial_bc, levels: 0, c_bl: 0.25, layers: 3, ratio: 0.5, node_cap: DEFAULT_NODE_CAP }
    }

    pub fn with_bc(self, artificial_bc: ArtificialBc) -> Self {
        Self { artificial_bc, ..self }
    }

    pub fn with_radius(self, radius: f64) -> Self {
        Self { radius, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Domain(format!("truncation radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    /// Number of chords the arc is resolved into: `ceil(8 R)`.
    pub fn arc_chords(&self) -> usize {
        (8.0 * self.radius).ceil() as usize
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self::new(16.0, ArtificialBc::Dirichlet)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleStatus {
    /// Dirichlet and Neumann truncations agree within the requested tolerance.
    Certified,
    /// The truncation gap exceeds the requested tolerance.
    Inconclusive,
    /// δ value below `−1/4 − margin`: a discrete level under the line threshold.
    BelowThreshold,
    /// δ value not separated from `−1/4` by the margin.
    AtThreshold,
}

impl fmt::Display for OracleStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleStatus::Certified => "certified",
            OracleStatus::Inconclusive => "inconclusive",
            OracleStatus::BelowThreshold => "below-threshold",
            OracleStatus::AtThreshold => "at-threshold",
        })
    }
}

/// One truncated eigensolve.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRun {
    pub theta: f64,
    pub radius: f64,
    pub bc: ArtificialBc,
    pub energy: f64,
    pub residual: f64,
    pub nodes: usize,
    pub status: OracleStatus,
}

impl OracleRun {
    pub const CSV_HEADER: &'static str = "theta,R,bc,E,residual,status";

    pub fn csv_row(&self) -> String {
        format!("{:.16e},{:.16e},{},{:.16e},{:.16e},{}", self.theta, self.radius, self.bc, self.energy, self.residual, self.status)
    }
}

/// Truncation certificate of a sector estimate.
#[derive(Debug, Clone, Serialize)]
pub struct SectorCertificate {
    /// Dirichlet truncation: an upper bound for the sector energy.
    pub dirichlet: f64,
    pub neumann: f64,
    pub gap: f64,
    pub status: OracleStatus,
}

fn graded_truncation(coarse: &Mesh, spec: &TruncationSpec, decay: f64, apex: Option<Point>, theta: f64) -> Result<Mesh> {
    let policy = GradingPolicy {
        alpha: decay,
        layers: spec.layers,
        ratio: spec.ratio,
        first_layer: spec.c_bl / decay,
        max_size: Some(spec.radius / 4.0),
        node_cap: spec.node_cap,
    };
    policy.validate()?;
    let corners: Vec<Corner> = apex.into_iter().map(|p| Corner { vertex_index: 0, position: p, opening: theta }).collect();
    let chord = 2.0 * PI * spec.radius / spec.arc_chords() as f64;
    let marker = graded_marker(coarse, &policy, &corners);
    let graded = refine_by(
        coarse,
        |m| {
            let arc = arc_edge_marks(m, chord);
            (0..m.triangles.len()).map(|t| arc[t] || marker(m, t)).collect()
        },
        spec.node_cap,
    )?;
    refine_uniform(&graded, spec.levels)
}

fn check_opening(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 2.0 * PI) || (theta - PI).abs() <= crate::geometry::ANGLE_TOL {
        return Err(Error::Domain(format!("opening must lie in (0, 2π) minus π, got {theta}")));
    }
    Ok(())
}

/// Robin (α = 1) ground state of the truncated sector `{r < R, 0 < φ < θ}` with the
/// artificial condition of `spec` on the arc.
pub fn sector_run(theta: f64, spec: &TruncationSpec, cfg: &SolverConfig) -> Result<OracleRun> {
    check_opening(theta)?;
    spec.validate()?;
    let coarse = sector_mesh(theta, spec.radius, spec.artificial_bc)?;
    let decay = if theta < PI { 1.0 / (0.5 * theta).sin() } else { 1.0 };
    let mesh = graded_truncation(&coarse, spec, decay, Some(Point::new(0.0, 0.0)), theta)?;
    let sys = FemSystem::robin(&mesh)?;
    let exact = sector_energy(theta)?.value();
    let r = sys.solve(1.0, &SolverConfig { energy_estimate: Some(exact), ..cfg.clone() })?;
    Ok(OracleRun {
        theta,
        radius: spec.radius,
        bc: spec.artificial_bc,
        energy: r.lambda,
        residual: r.residual,
        nodes: mesh.nodes.len(),
        status: OracleStatus::Certified,
    })
}

/// Sector energy estimate with the artificial condition of `spec`, certified by the
/// Dirichlet/Neumann truncation gap: `Inconclusive` when the gap exceeds `gap_tol`
/// (relative to the Dirichlet value).
pub fn sector_energy_numeric(
    theta: f64,
    spec: &TruncationSpec,
    gap_tol: f64,
    cfg: &SolverConfig,
) -> Result<(OracleRun, SectorCertificate)> {
    let d = sector_run(theta, &spec.with_bc(ArtificialBc::Dirichlet), cfg)?;
    let n = sector_run(theta, &spec.with_bc(ArtificialBc::Neumann), cfg)?;
    let gap = (d.energy - n.energy).abs();
    let status = if gap <= gap_tol * d.energy.abs() { OracleStatus::Certified } else { OracleStatus::Inconclusive };
    let cert = SectorCertificate { dirichlet: d.energy, neumann: n.energy, gap, status };
    let mut run = match spec.artificial_bc {
        ArtificialBc::Dirichlet => d,
        ArtificialBc::Neumann => n,
    };
    run.status = status;
    Ok((run, cert))
}

/// Ground state of the unit-strength δ-interaction on a broken line of opening `theta`
/// (two rays from the centre of the disk of radius `R`), with `spec`'s artificial
/// condition on the circle. The status is `BelowThreshold` when the value lies below
/// `−1/4 − margin`.
pub fn delta_corner_energy_numeric(theta: f64, spec: &TruncationSpec, margin: f64, cfg: &SolverConfig) -> Result<OracleRun> {
    if !(theta > 0.0 && theta < 2.0 * PI) {
        return Err(Error::Domain(format!("opening must lie in (0, 2π), got {theta}")));
    }
    spec.validate()?;
    let coarse = broken_line_disk_mesh(theta, spec.radius, spec.artificial_bc)?;
    let apex = ((theta - PI).abs() > crate::geometry::ANGLE_TOL).then(|| Point::new(0.0, 0.0));
    let mesh = graded_truncation(&coarse, spec, 0.5, apex, theta)?;
    let sys = FemSystem::interface(&mesh)?;
    let r = sys.solve(1.0, &SolverConfig { energy_estimate: Some(-1.0), ..cfg.clone() })?;
    let status = if r.lambda < DELTA_LINE_ENERGY - margin { OracleStatus::BelowThreshold } else { OracleStatus::AtThreshold };
    Ok(OracleRun {
        theta,
        radius: spec.radius,
        bc: spec.artificial_bc,
        energy: r.lambda,
        residual: r.residual,
        nodes: mesh.nodes.len(),
        status,
    })
}

/// Extrapolation across the truncation ladder `R → 2R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RichardsonEstimate {
    pub estimate: f64,
    pub error_bar: f64,
}

/// Reports `v(2R)` with error bar `|v(2R) − v(R)|`.
pub fn richardson_in_r(v_r: f64, v_2r: f64) -> RichardsonEstimate {
    RichardsonEstimate { estimate: v_2r, error_bar: (v_2r - v_r).abs() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_arithmetic() {
        let r = richardson_in_r(-1.98, -1.999);
        assert_eq!(r.estimate, -1.999);
        assert!((r.error_bar - 0.019).abs() < 1e-12);
        assert_eq!(richardson_in_r(-2.0, -2.0).error_bar, 0.0);
    }

    #[test]
    fn rejects_bad_openings() {
        let spec = TruncationSpec::new(4.0, ArtificialBc::Dirichlet);
        let cfg = SolverConfig::default();
        assert!(sector_run(PI, &spec, &cfg).is_err());
        assert!(sector_run(0.0, &spec, &cfg).is_err());
        assert!(delta_corner_energy_numeric(2.0 * PI, &spec, 0.0, &cfg).is_err());
        assert!(sector_run(1.0, &TruncationSpec::new(-1.0, ArtificialBc::Neumann), &cfg).is_err());
    }

    #[test]
    fn small_sector_is_close() {
        let spec = TruncationSpec::new(6.0, ArtificialBc::Dirichlet);
        let run = sector_run(PI / 2.0, &spec, &SolverConfig::default()).unwrap();
        assert!(run.energy >= -2.0 && run.energy < -1.95, "{}", run.energy);
        assert_eq!(run.csv_row().split(',').count(), 6);
    }
}
