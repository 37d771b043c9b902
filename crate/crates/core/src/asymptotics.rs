//! Sweeps in α, remainder-rate fits and envelope checks.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::cone_energy::domain_energy;
use crate::error::{Error, Result};
use crate::fem::{FemSystem, SolverConfig, SpectralResult};
use crate::geometry::{DomainSpec, Point, Polygon};
use crate::mesher::{domain_mesh, refine_graded, refine_uniform, GradingPolicy, Mesh, DEFAULT_NODE_CAP};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ROBIN_CORNER_THREADS";

/// Worker count from `ROBIN_CORNER_THREADS`, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Per-α mesh construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshPolicy {
    pub c_bl: f64,
    pub layers: usize,
    pub ratio: f64,
    /// Element-size cap as a fraction of the domain diameter.
    pub max_size: f64,
    /// Uniform refinements after grading.
    pub levels: usize,
    pub node_cap: usize,
}

impl Default for MeshPolicy {
    fn default() -> Self {
        Self { c_bl: 0.5, layers: 3, ratio: 0.5, max_size: 0.18, levels: 0, node_cap: DEFAULT_NODE_CAP }
    }
}

impl MeshPolicy {
    pub fn grading(&self, d: &DomainSpec, alpha: f64) -> GradingPolicy {
        GradingPolicy {
            node_cap: self.node_cap,
            ..GradingPolicy::new(alpha, self.c_bl, self.layers, self.ratio).with_max_size(self.max_size * d.diameter())
        }
    }

    /// Short provenance string for table rows.
    pub fn mesh_id(&self, alpha: f64) -> String {
        format!("graded(alpha={alpha},c_bl={},layers={},ratio={},max={},levels={})", self.c_bl, self.layers, self.ratio, self.max_size, self.levels)
    }
}

/// Coarse mesh of `d`, graded for `alpha`.
pub fn graded_domain_mesh(d: &DomainSpec, alpha: f64, policy: &MeshPolicy) -> Result<Mesh> {
    let coarse = domain_mesh(d)?;
    let g = policy.grading(d, alpha);
    g.validate()?;
    let graded = refine_graded(&coarse, &g, &d.corners()?)?;
    refine_uniform(&graded, policy.levels)
}

/// Robin ground state of `d` at `alpha` on a mesh graded for that `alpha`.
pub fn solve_domain(d: &DomainSpec, alpha: f64, policy: &MeshPolicy, cfg: &SolverConfig) -> Result<(SpectralResult, Mesh)> {
    let mesh = graded_domain_mesh(d, alpha, policy)?;
    let sys = FemSystem::robin(&mesh)?;
    let e = domain_energy(d)?.energy.value();
    let r = sys.solve(alpha, &SolverConfig { energy_estimate: Some(e), ..cfg.clone() })?;
    Ok((r, mesh))
}

/// Nodal interpolant of the sector ground state `exp(−α (x − v)·b / sin(θ/2))` at the
/// convex corner `vertex` of a polygon (`b` the inner bisector), times a `cos²` cutoff
/// vanishing beyond `cutoff` from the corner.
pub fn corner_quasi_mode(mesh: &Mesh, polygon: &Polygon, vertex: usize, alpha: f64, cutoff: f64) -> Result<Vec<f64>> {
    let corner = polygon
        .corner_openings()?
        .into_iter()
        .find(|c| c.vertex_index == vertex)
        .ok_or_else(|| Error::Domain(format!("vertex {vertex} is not a corner")))?;
    if corner.opening >= PI {
        return Err(Error::Domain(format!("corner {vertex} is not convex")));
    }
    let n = polygon.len();
    let v = corner.position;
    let d = polygon.vertices[(vertex + 1) % n].sub(v);
    let phi = d.y.atan2(d.x) + 0.5 * corner.opening;
    let w = Point::new(phi.cos(), phi.sin()).scale(1.0 / (0.5 * corner.opening).sin());
    Ok(mesh
        .nodes
        .iter()
        .map(|&x| {
            let r = x.dist(v);
            let chi = if r >= cutoff { 0.0 } else { (0.5 * PI * r / cutoff).cos().powi(2) };
            chi * (-alpha * x.sub(v).dot(w)).exp()
        })
        .collect())
}

/// Remainder exponents `2 − 2/(2ν + 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RateModel {
    pub nu_bar: u32,
    pub nu_bar_plus: u32,
}

impl RateModel {
    /// Checks `0 ≤ ν̄ ≤ ν̄₊ ≤ n − 2`.
    pub fn new(nu_bar: u32, nu_bar_plus: u32, dim: u32) -> Result<Self> {
        if nu_bar > nu_bar_plus || dim < 2 || nu_bar_plus > dim - 2 {
            return Err(Error::Domain(format!("need 0 <= {nu_bar} <= {nu_bar_plus} <= {dim} - 2")));
        }
        Ok(Self { nu_bar, nu_bar_plus })
    }

    pub fn polygon() -> Self {
        Self { nu_bar: 0, nu_bar_plus: 0 }
    }

    pub fn upper_exponent(&self) -> f64 {
        2.0 - 2.0 / (2.0 * self.nu_bar as f64 + 3.0)
    }

    pub fn lower_exponent(&self) -> f64 {
        2.0 - 2.0 / (2.0 * self.nu_bar_plus as f64 + 3.0)
    }

    pub fn max_exponent(&self) -> f64 {
        self.upper_exponent().max(self.lower_exponent())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    /// NaN on failed rows.
    pub lambda: f64,
    pub residual: f64,
    pub mesh_id: String,
    pub nodes: usize,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub predicted_energy: f64,
    /// Relative discretization error at the largest α, from one uniform refinement.
    pub discretization_error: Option<f64>,
}

impl SweepTable {
    pub const CSV_HEADER: &'static str = "alpha,lambda,lambda_over_alpha2,remainder,residual,nodes";

    /// Table of prescribed values (residual zero), for post-processing.
    pub fn from_values(predicted_energy: f64, values: &[(f64, f64)]) -> Self {
        let rows = values
            .iter()
            .map(|&(alpha, lambda)| SweepRow { alpha, lambda, residual: 0.0, mesh_id: "given".into(), nodes: 0, error: None })
            .collect();
        Self { rows, predicted_energy, discretization_error: None }
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok()).count()
    }

    pub fn remainder(&self, row: &SweepRow) -> f64 {
        row.lambda - self.predicted_energy * row.alpha * row.alpha
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.alpha,
                r.lambda,
                r.lambda / (r.alpha * r.alpha),
                self.remainder(r),
                r.residual,
                r.nodes
            );
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub policy: MeshPolicy,
    pub solver: SolverConfig,
    /// Estimate the discretization error at the largest α.
    pub refine_check: bool,
    /// Worker threads; `None` reads `ROBIN_CORNER_THREADS`.
    pub threads: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { policy: MeshPolicy::default(), solver: SolverConfig::default(), refine_check: true, threads: None }
    }
}

fn sweep_row(d: &DomainSpec, alpha: f64, opts: &SweepOptions) -> SweepRow {
    let mesh_id = opts.policy.mesh_id(alpha);
    match solve_domain(d, alpha, &opts.policy, &opts.solver) {
        Ok((r, mesh)) => SweepRow { alpha, lambda: r.lambda, residual: r.residual, mesh_id, nodes: mesh.nodes.len(), error: None },
        Err(e) => SweepRow { alpha, lambda: f64::NAN, residual: f64::NAN, mesh_id, nodes: 0, error: Some(e.to_string()) },
    }
}

/// One graded solve per α, rows in input order. Failed rows are kept and marked.
pub fn sweep(d: &DomainSpec, alphas: &[f64], opts: &SweepOptions) -> Result<SweepTable> {
    d.validate()?;
    if alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::Domain("alphas must be positive".into()));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("alphas must be strictly increasing".into()));
    }
    let predicted_energy = domain_energy(d)?.energy.value();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or_else(thread_count))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let (rows, discretization_error) = pool.install(|| {
        let rows: Vec<SweepRow> = alphas.par_iter().map(|&a| sweep_row(d, a, opts)).collect();
        let last = rows.last().filter(|r| r.ok() && opts.refine_check);
        let delta = last.and_then(|r| {
            let fine = MeshPolicy { levels: opts.policy.levels + 1, ..opts.policy };
            let (f, _) = solve_domain(d, r.alpha, &fine, &opts.solver).ok()?;
            Some((4.0 / 3.0) * (r.lambda - f.lambda).abs() / r.lambda.abs())
        });
        (rows, delta)
    });
    Ok(SweepTable { rows, predicted_energy, discretization_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Fitted,
    RemainderBelowResolution,
}

impl std::fmt::Display for FitStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitStatus::Fitted => "fitted",
            FitStatus::RemainderBelowResolution => "remainder-below-resolution",
        })
    }
}

/// Log-log fit `|λ − ℰα²| ≈ C α^ρ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub status: FitStatus,
    /// NaN unless fitted.
    pub c: f64,
    pub rho: f64,
    pub r_squared: f64,
    /// Sign of the remainder on the fitted rows.
    pub remainder_sign: f64,
    /// Indices of the rows used in the fit.
    pub used: Vec<usize>,
    /// Indices of successful rows below the noise floor.
    pub excluded: Vec<usize>,
    /// Per-row noise floor (NaN on failed rows).
    pub noise_floor: Vec<f64>,
}

/// Noise floor: 10× the solver residual plus 10× the discretization error, both scaled
/// by `|λ|`.
pub fn noise_floor(t: &SweepTable, row: &SweepRow) -> f64 {
    let scale = row.lambda.abs().max(1.0);
    10.0 * row.residual * scale + 10.0 * t.discretization_error.unwrap_or(0.0) * row.lambda.abs()
}

pub fn rate_fit(t: &SweepTable) -> Result<RateFit> {
    if !t.predicted_energy.is_finite() {
        return Err(Error::Domain("predicted energy is not finite".into()));
    }
    let ok: Vec<usize> = (0..t.rows.len()).filter(|&i| t.rows[i].ok()).collect();
    if ok.len() < 3 {
        return Err(Error::Domain(format!("rate fit needs at least 3 successful rows, got {}", ok.len())));
    }
    let noise: Vec<f64> = t.rows.iter().map(|r| if r.ok() { noise_floor(t, r) } else { f64::NAN }).collect();
    let (used, excluded): (Vec<usize>, Vec<usize>) = ok.iter().partition(|&&i| t.remainder(&t.rows[i]).abs() > noise[i]);
    if used.len() < 2 {
        return Ok(RateFit {
            status: FitStatus::RemainderBelowResolution,
            c: f64::NAN,
            rho: f64::NAN,
            r_squared: f64::NAN,
            remainder_sign: f64::NAN,
            used,
            excluded,
            noise_floor: noise,
        });
    }
    let xs: Vec<f64> = used.iter().map(|&i| t.rows[i].alpha.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|&i| t.remainder(&t.rows[i]).abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let rho = sxy / sxx;
    let c = (my - rho * mx).exp();
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    let remainder_sign = t.remainder(&t.rows[used[0]]).signum();
    Ok(RateFit { status: FitStatus::Fitted, c, rho, r_squared, remainder_sign, used, excluded, noise_floor: noise })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub alpha: f64,
    pub remainder: f64,
    pub bound: f64,
    /// `bound / |remainder|`.
    pub margin: f64,
    pub resolved: bool,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub exponent: f64,
    pub constant: f64,
    pub slack: f64,
    pub rows: Vec<EnvelopeRow>,
    pub passes: bool,
}

pub const ENVELOPE_SLACK: f64 = 2.0;

/// Checks `|λ − ℰα²| ≤ slack · C · α^p` on every successful row, with `p` the larger
/// model exponent. `C` is the fitted prefactor, or, when the remainder is below
/// resolution, the largest `floor/α^p` over the rows; unresolved rows pass.
pub fn envelope_check(t: &SweepTable, model: &RateModel, fit: &RateFit) -> EnvelopeReport {
    let p = model.max_exponent();
    let constant = match fit.status {
        FitStatus::Fitted => fit.c,
        FitStatus::RemainderBelowResolution => t
            .rows
            .iter()
            .zip(&fit.noise_floor)
            .filter(|(r, _)| r.ok())
            .map(|(r, f)| f / r.alpha.powf(p))
            .fold(0.0, f64::max),
    };
    let rows: Vec<EnvelopeRow> = t
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.ok())
        .map(|(i, r)| {
            let remainder = t.remainder(r);
            let bound = ENVELOPE_SLACK * constant * r.alpha.powf(p);
            let resolved = fit.used.contains(&i) || fit.status == FitStatus::Fitted;
            let passes = !resolved && fit.status == FitStatus::RemainderBelowResolution || remainder.abs() <= bound;
            EnvelopeRow { alpha: r.alpha, remainder, bound, margin: bound / remainder.abs(), resolved, passes }
        })
        .collect();
    let passes = rows.iter().all(|r| r.passes);
    EnvelopeReport { exponent: p, constant, slack: ENVELOPE_SLACK, rows, passes }
}

/// Log-log plot of `|λ − ℰα²|` against α with the fitted line.
pub fn remainder_svg(t: &SweepTable, fit: Option<&RateFit>) -> String {
    let pts: Vec<(f64, f64)> = t
        .rows
        .iter()
        .filter(|r| r.ok())
        .map(|r| (r.alpha.log10(), t.remainder(r).abs().max(f64::MIN_POSITIVE).log10()))
        .collect();
    let (w, h, pad) = (640.0, 480.0, 60.0);
    let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n");
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let _ = writeln!(s, "<line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>", h - pad, w - pad, h - pad);
    let _ = writeln!(s, "<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>", h - pad);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log10 alpha</text>", w / 2.0, h - 15.0);
    let _ = writeln!(s, "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">log10 |remainder|</text>", h / 2.0, h / 2.0);
    for &(x, y) in &pts {
        let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"steelblue\"/>", px(x), py(y));
    }
    if let Some(f) = fit.filter(|f| f.status == FitStatus::Fitted) {
        let a = Point::new(x0, f.c.log10() + f.rho * x0);
        let b = Point::new(x1, f.c.log10() + f.rho * x1);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"firebrick\" stroke-dasharray=\"6 4\"/>",
            px(a.x),
            py(a.y),
            px(b.x),
            py(b.y)
        );
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">rho = {:.4}</text>", pad + 10.0, pad + 10.0, f.rho);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synthetic(f: impl Fn(f64) -> f64) -> SweepTable {
        let v: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0].iter().map(|&a| (a, -2.0 * a * a + f(a))).collect();
        SweepTable::from_values(-2.0, &v)
    }

    #[test]
    fn exponents() {
        let p = RateModel::polygon();
        assert_relative_eq!(p.upper_exponent(), 4.0 / 3.0, max_relative = 1e-15);
        assert_eq!(p.lower_exponent(), p.upper_exponent());
        let m = RateModel::new(0, 1, 3).unwrap();
        assert_relative_eq!(m.lower_exponent(), 1.6, max_relative = 1e-15);
        assert!(RateModel::new(1, 0, 3).is_err());
        assert!(RateModel::new(0, 1, 2).is_err());
    }

    #[test]
    fn fits_exact_power_laws() {
        let f = rate_fit(&synthetic(|a| a)).unwrap();
        assert_eq!(f.status, FitStatus::Fitted);
        assert_relative_eq!(f.rho, 1.0, max_relative = 1e-10);
        assert_relative_eq!(f.c, 1.0, max_relative = 1e-10);
        let f = rate_fit(&synthetic(|a| 3.0 * a.powf(4.0 / 3.0))).unwrap();
        assert_relative_eq!(f.rho, 4.0 / 3.0, max_relative = 1e-10);
        assert_relative_eq!(f.c, 3.0, max_relative = 1e-10);
        assert!(f.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn envelope_margins() {
        let t = synthetic(|a| 3.0 * a.powf(4.0 / 3.0));
        let f = rate_fit(&t).unwrap();
        let r = envelope_check(&t, &RateModel::polygon(), &f);
        assert!(r.passes);
        for row in &r.rows {
            assert_relative_eq!(row.margin, 2.0, max_relative = 1e-9);
        }
        let bad = synthetic(|a| if a == 16.0 { 30.0 * a.powf(4.0 / 3.0) } else { 3.0 * a.powf(4.0 / 3.0) });
        let f = rate_fit(&bad).unwrap();
        let r = envelope_check(&bad, &RateModel::polygon(), &f);
        assert!(!r.passes);
        assert!(!r.rows[3].passes);
    }

    #[test]
    fn below_resolution() {
        let mut t = synthetic(|a| 1e-6 * a);
        t.discretization_error = Some(1e-3);
        let f = rate_fit(&t).unwrap();
        assert_eq!(f.status, FitStatus::RemainderBelowResolution);
        assert_eq!(f.excluded.len(), 4);
        assert!(envelope_check(&t, &RateModel::polygon(), &f).passes);
        assert!(rate_fit(&SweepTable::from_values(-2.0, &[(1.0, -2.0), (2.0, -8.0)])).is_err());
    }

    #[test]
    fn empty_sweep() {
        let d = DomainSpec::Polygon(crate::geometry::Polygon::unit_square());
        let t = sweep(&d, &[], &SweepOptions::default()).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.to_csv().lines().count(), 1);
        assert!(sweep(&d, &[2.0, 1.0], &SweepOptions::default()).is_err());
    }

    #[test]
    fn svg_is_well_formed() {
        let t = synthetic(|a| a);
        let s = remainder_svg(&t, Some(&rate_fit(&t).unwrap()));
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<circle").count(), 4);
    }
}
