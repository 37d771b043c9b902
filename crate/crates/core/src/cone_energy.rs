//! Symbolic ground-state energies of the model cones of a corner domain.
//!
//! All energies are taken at Robin parameter 1; on the domain itself they are
//! multiplied by `alpha^2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Corner, DomainSpec, Polygon, ANGLE_TOL};

/// Ground-state energy of a model cone. Always `<= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyValue(pub f64);

impl EnergyValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Tangent cone at a point of a planar domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeDescriptor2D {
    FullPlane,
    HalfPlane,
    Sector { opening: f64 },
}

impl ConeDescriptor2D {
    pub fn sector(opening: f64) -> Result<Self> {
        check_opening(opening)?;
        Ok(ConeDescriptor2D::Sector { opening })
    }

    /// Tangent cone for an opening, folding near-`pi` openings into the half-plane.
    pub fn from_opening(opening: f64) -> Result<Self> {
        if opening > 0.0 && opening < 2.0 * PI && (opening - PI).abs() <= ANGLE_TOL {
            return Ok(ConeDescriptor2D::HalfPlane);
        }
        ConeDescriptor2D::sector(opening)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ConeDescriptor2D::Sector { opening } => check_opening(opening),
            _ => Ok(()),
        }
    }
}

/// Section of a three-dimensional cone by the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cone3DSection {
    /// Smooth section (e.g. a circular cone).
    Smooth,
    /// Curvilinear polygon on the sphere given by its vertex openings.
    SphericalPolygon { openings: Vec<f64> },
}

fn check_opening(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 2.0 * PI) || theta == PI {
        return Err(Error::Domain(format!("sector opening must lie in (0, 2pi) minus {{pi}}, got {theta}")));
    }
    Ok(())
}

/// Energy of the infinite planar sector of opening `theta`.
pub fn sector_energy(theta: f64) -> Result<EnergyValue> {
    check_opening(theta)?;
    if theta < PI {
        // sin²(θ/2) = (1 − cos θ)/2 with cos θ = sin(π/2 − θ), exact at θ = π/2
        let s2 = if theta >= FRAC_PI_4 { 0.5 * (1.0 - (FRAC_PI_2 - theta).sin()) } else { (0.5 * theta).sin().powi(2) };
        Ok(EnergyValue(-1.0 / s2))
    } else {
        Ok(EnergyValue(-1.0))
    }
}

pub fn local_energy(c: ConeDescriptor2D) -> Result<EnergyValue> {
    match c {
        ConeDescriptor2D::FullPlane => Ok(EnergyValue(0.0)),
        ConeDescriptor2D::HalfPlane => Ok(EnergyValue(-1.0)),
        ConeDescriptor2D::Sector { opening } => sector_energy(opening),
    }
}

/// Infimum of the local energies over the proper singular chains of the cone.
///
/// The reduced cone of a sector is the sector itself; the endpoints of its section arc
/// see half-planes. The reduced cone of a half-plane is a half-line whose section is a
/// single point, so every proper chain ends in the full plane.
pub fn second_energy_level(c: ConeDescriptor2D) -> Result<EnergyValue> {
    c.validate()?;
    Ok(match c {
        ConeDescriptor2D::Sector { .. } => EnergyValue(-1.0),
        ConeDescriptor2D::HalfPlane | ConeDescriptor2D::FullPlane => EnergyValue(0.0),
    })
}

/// Whether the bottom of the spectrum of the model operator is a discrete eigenvalue.
pub fn has_discrete_ground_state(c: ConeDescriptor2D) -> Result<bool> {
    Ok(local_energy(c)?.0 < second_energy_level(c)?.0)
}

/// Bottom of the essential spectrum of a 3-D cone, i.e. the energy of its section.
///
/// The tangent cone at a vertex of a spherical polygon splits off a line times a planar
/// sector, so each vertex contributes its sector energy; smooth points contribute `-1`.
pub fn essential_spectrum_bottom_3d(s: &Cone3DSection) -> Result<EnergyValue> {
    match s {
        Cone3DSection::Smooth => Ok(EnergyValue(-1.0)),
        Cone3DSection::SphericalPolygon { openings } => {
            if openings.is_empty() {
                return Err(Error::Domain("spherical polygon needs at least one vertex opening".into()));
            }
            let mut e = -1.0f64;
            for &t in openings {
                e = e.min(sector_energy(t)?.0);
            }
            Ok(EnergyValue(e))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MinimizerKind {
    /// Index into the polygon's vertex list.
    Corner { index: usize },
    RegularBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerEnergy {
    pub corner: Corner,
    /// Local energy times the squared corner weight.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainEnergyReport {
    pub energy: EnergyValue,
    pub minimizer: MinimizerKind,
    pub per_corner: Vec<CornerEnergy>,
}

/// Weight seen at a corner joining two edges of different weight.
fn corner_weight(p: &Polygon, vertex: usize) -> f64 {
    let n = p.len();
    p.weight(vertex).min(p.weight((vertex + n - 1) % n))
}

/// Infimum over the boundary of `G(x)^2 E(Pi_x)`.
pub fn domain_energy(d: &DomainSpec) -> Result<DomainEnergyReport> {
    d.validate()?;
    match d {
        DomainSpec::Disk { .. } => Ok(DomainEnergyReport {
            energy: EnergyValue(-1.0),
            minimizer: MinimizerKind::RegularBoundary,
            per_corner: Vec::new(),
        }),
        DomainSpec::Polygon(p) => {
            let corners = p.corner_openings()?;
            let per_corner: Vec<CornerEnergy> = corners
                .iter()
                .map(|c| {
                    let w = corner_weight(p, c.vertex_index);
                    Ok(CornerEnergy { corner: *c, energy: w * w * sector_energy(c.opening)?.0 })
                })
                .collect::<Result<_>>()?;
            let mut best = f64::INFINITY;
            let mut minimizer = MinimizerKind::RegularBoundary;
            for ce in &per_corner {
                if ce.energy < best {
                    best = ce.energy;
                    minimizer = MinimizerKind::Corner { index: ce.corner.vertex_index };
                }
            }
            for e in 0..p.len() {
                let w = p.weight(e);
                if -w * w < best {
                    best = -w * w;
                    minimizer = MinimizerKind::RegularBoundary;
                }
            }
            Ok(DomainEnergyReport { energy: EnergyValue(best), minimizer, per_corner })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use approx::assert_relative_eq;

    #[test]
    fn sector_values() {
        assert_eq!(sector_energy(PI / 2.0).unwrap().0, -2.0);
        assert_relative_eq!(sector_energy(PI / 3.0).unwrap().0, -4.0, max_relative = 1e-15);
        assert_eq!(sector_energy(1.5 * PI).unwrap().0, -1.0);
        assert!(sector_energy(PI).is_err());
        assert!(sector_energy(0.0).is_err());
        assert!(sector_energy(2.0 * PI).is_err());
        assert!(sector_energy(-1.0).is_err());
    }

    #[test]
    fn local_energies() {
        assert_eq!(local_energy(ConeDescriptor2D::FullPlane).unwrap().0, 0.0);
        assert_eq!(local_energy(ConeDescriptor2D::HalfPlane).unwrap().0, -1.0);
        assert_relative_eq!(
            local_energy(ConeDescriptor2D::Sector { opening: PI / 2.0 }).unwrap().0,
            -2.0,
            max_relative = 1e-15
        );
        assert!(local_energy(ConeDescriptor2D::Sector { opening: PI }).is_err());
    }

    #[test]
    fn discrete_ground_state() {
        assert!(has_discrete_ground_state(ConeDescriptor2D::Sector { opening: PI / 2.0 }).unwrap());
        assert!(!has_discrete_ground_state(ConeDescriptor2D::Sector { opening: 1.5 * PI }).unwrap());
        assert!(has_discrete_ground_state(ConeDescriptor2D::HalfPlane).unwrap());
        assert!(!has_discrete_ground_state(ConeDescriptor2D::FullPlane).unwrap());
    }

    #[test]
    fn essential_bottoms() {
        assert_eq!(essential_spectrum_bottom_3d(&Cone3DSection::Smooth).unwrap().0, -1.0);
        let one = Cone3DSection::SphericalPolygon { openings: vec![PI / 2.0] };
        assert_eq!(essential_spectrum_bottom_3d(&one).unwrap().0, -2.0);
        let tri = Cone3DSection::SphericalPolygon { openings: vec![2.0 * PI / 3.0; 3] };
        assert_relative_eq!(essential_spectrum_bottom_3d(&tri).unwrap().0, -4.0 / 3.0, max_relative = 1e-14);
        let reflex = Cone3DSection::SphericalPolygon { openings: vec![1.5 * PI] };
        assert_eq!(essential_spectrum_bottom_3d(&reflex).unwrap().0, -1.0);
        assert!(essential_spectrum_bottom_3d(&Cone3DSection::SphericalPolygon { openings: vec![] }).is_err());
    }

    #[test]
    fn domain_energies() {
        let sq = domain_energy(&DomainSpec::Polygon(Polygon::unit_square())).unwrap();
        assert_eq!(sq.energy.0, -2.0);
        assert!(matches!(sq.minimizer, MinimizerKind::Corner { .. }));

        let l = domain_energy(&DomainSpec::Polygon(Polygon::l_shape())).unwrap();
        assert_eq!(l.energy.0, -2.0);
        match l.minimizer {
            MinimizerKind::Corner { index } => assert_ne!(index, 3),
            _ => panic!("expected a corner minimizer"),
        }
        let reflex = l.per_corner.iter().find(|c| c.corner.vertex_index == 3).unwrap();
        assert_eq!(reflex.energy, -1.0);

        let disk = domain_energy(&DomainSpec::Disk { radius: 1.0 }).unwrap();
        assert_eq!(disk.energy.0, -1.0);
        assert_eq!(disk.minimizer, MinimizerKind::RegularBoundary);
    }

    #[test]
    fn weighted_domain_energy() {
        // corner 1 joins edges of weight 1 and 0.5: min weight enters squared.
        let p = Polygon::with_weights(Polygon::unit_square().vertices, vec![1.0, 0.5, 0.5, 0.5]);
        let r = domain_energy(&DomainSpec::Polygon(p)).unwrap();
        assert_relative_eq!(r.energy.0, -1.0, max_relative = 1e-15);
        // heavy edge dominates the corners
        let p = Polygon::with_weights(Polygon::unit_square().vertices, vec![3.0, 1.0, 1.0, 1.0]);
        let r = domain_energy(&DomainSpec::Polygon(p)).unwrap();
        assert_eq!(r.energy.0, -9.0);
        assert_eq!(r.minimizer, MinimizerKind::RegularBoundary);
    }

    #[test]
    fn invalid_polygon_propagates() {
        let bowtie = Polygon::from_coords(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert!(domain_energy(&DomainSpec::Polygon(bowtie)).is_err());
    }
}
