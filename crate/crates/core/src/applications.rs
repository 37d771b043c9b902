//! Ehrling constant and critical temperature from the ground-state energy.

use serde::Serialize;

use crate::asymptotics::{solve_domain, MeshPolicy};
use crate::cone_energy::domain_energy;
use crate::error::{Error, Result};
use crate::fem::SolverConfig;
use crate::geometry::DomainSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EhrlingResult {
    pub epsilon: f64,
    pub lambda: f64,
    /// `C(ε) = −ε λ(Ω, 1/ε)`.
    pub c_eps: f64,
    /// `ε C(ε) / |ℰ(Ω)|`.
    pub limit_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TcResult {
    pub t_c0: f64,
    pub xi0: f64,
    pub b: f64,
    pub alpha: f64,
    pub lambda: f64,
    /// `T_c0 − T_c0 λ(Ω, ξ0/|b|)`.
    pub t_c: f64,
}

/// Ehrling constant from a given `λ(Ω, 1/ε)`.
pub fn ehrling_from_lambda(epsilon: f64, lambda: f64, energy: f64) -> Result<EhrlingResult> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let c_eps = -epsilon * lambda;
    Ok(EhrlingResult { epsilon, lambda, c_eps, limit_ratio: epsilon * c_eps / energy.abs() })
}

pub fn ehrling_constant(d: &DomainSpec, epsilon: f64, policy: &MeshPolicy, cfg: &SolverConfig) -> Result<EhrlingResult> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let energy = domain_energy(d)?.energy.value();
    let (r, _) = solve_domain(d, 1.0 / epsilon, policy, cfg)?;
    ehrling_from_lambda(epsilon, r.lambda, energy)
}

fn check_tc(t_c0: f64, xi0: f64, b: f64) -> Result<f64> {
    if !(t_c0 > 0.0 && xi0 > 0.0 && b < 0.0) {
        return Err(Error::Domain(format!("need T_c0 > 0, xi0 > 0, b < 0 (got {t_c0}, {xi0}, {b})")));
    }
    Ok(xi0 / b.abs())
}

/// Critical temperature from a given `λ(Ω, ξ0/|b|)`.
pub fn critical_temperature_from_lambda(t_c0: f64, xi0: f64, b: f64, lambda: f64) -> Result<TcResult> {
    let alpha = check_tc(t_c0, xi0, b)?;
    Ok(TcResult { t_c0, xi0, b, alpha, lambda, t_c: t_c0 - t_c0 * lambda })
}

pub fn critical_temperature(
    d: &DomainSpec,
    t_c0: f64,
    xi0: f64,
    b: f64,
    policy: &MeshPolicy,
    cfg: &SolverConfig,
) -> Result<TcResult> {
    let alpha = check_tc(t_c0, xi0, b)?;
    let (r, _) = solve_domain(d, alpha, policy, cfg)?;
    critical_temperature_from_lambda(t_c0, xi0, b, r.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injected_values() {
        let e = ehrling_from_lambda(0.25, -16.0, -2.0).unwrap();
        assert_eq!(e.c_eps, 4.0);
        assert_eq!(e.limit_ratio, 0.5);
        assert_eq!(ehrling_from_lambda(1.0, 0.0, -1.0).unwrap().c_eps, 0.0);
        assert!(ehrling_from_lambda(0.0, -1.0, -1.0).is_err());

        let t = critical_temperature_from_lambda(1.0, 10.0, -1.0, -200.0).unwrap();
        assert_eq!(t.t_c, 201.0);
        assert_eq!(t.alpha, 10.0);
        assert_eq!(critical_temperature_from_lambda(1.0, 1.0, -1.0, 0.0).unwrap().t_c, 1.0);
        assert!(critical_temperature_from_lambda(1.0, 1.0, 1.0, 0.0).is_err());
    }
}
