//! Command-line front end.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::applications::{critical_temperature, critical_temperature_from_lambda, ehrling_constant, ehrling_from_lambda};
use crate::asymptotics::{envelope_check, graded_domain_mesh, rate_fit, remainder_svg, solve_domain, sweep, RateModel, SweepOptions};
use crate::cone_energy::domain_energy;
use crate::cone_oracle::{delta_corner_energy_numeric, sector_run, OracleRun, TruncationSpec};
use crate::config::Config;
use crate::delta::{build_delta_mesh, solve_delta, DeltaMeshPolicy, DeltaProblem};
use crate::error::{Error, Result};
use crate::fem::FemSystem;
use crate::geometry::{DomainSpec, Point};
use crate::mesher::{domain_mesh, write_mesh, ArtificialBc, InterfaceShape};

#[derive(Parser, Debug)]
#[command(name = "robin-corner", version, about = "Robin and δ-interaction ground states on corner domains")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// `key = value` defaults file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    c_bl: Option<f64>,
    #[arg(long, global = true)]
    layers: Option<usize>,
    #[arg(long, global = true)]
    ratio: Option<f64>,
    /// Element-size cap as a fraction of the domain diameter.
    #[arg(long, global = true)]
    max_size: Option<f64>,
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[arg(long, global = true)]
    node_cap: Option<usize>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symbolic energy of a domain as JSON.
    Energy {
        #[arg(long)]
        domain: String,
    },
    /// Write the (graded) mesh of a domain.
    Mesh {
        #[arg(long)]
        domain: String,
        /// Grade for this α; coarse mesh when omitted.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robin ground state at one α.
    Solve {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        alpha: f64,
        /// Directory receiving coordinate dumps of K, B and M.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Sweep over α.
    Sweep {
        #[arg(long)]
        domain: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 8.0, 16.0, 32.0])]
        alphas: Vec<f64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Truncated-sector Robin energy at unit parameter.
    OracleSector {
        #[arg(long, value_parser = parse_angle)]
        theta: f64,
        #[arg(long = "R", default_value_t = 16.0)]
        radius: f64,
        #[arg(long, default_value = "dirichlet")]
        bc: ArtificialBc,
    },
    /// Broken-line δ energy at unit strength.
    OracleDeltaCorner {
        #[arg(long, value_parser = parse_angle)]
        theta: f64,
        #[arg(long = "R", default_value_t = 16.0)]
        radius: f64,
        #[arg(long, default_value = "neumann")]
        bc: ArtificialBc,
        /// Absolute separation below −1/4 required for `below-threshold`.
        #[arg(long, default_value_t = 0.0125)]
        margin: f64,
    },
    /// δ-interaction on a polygon (file or built-in name) or `circle[:r]`.
    DeltaSolve {
        #[arg(long)]
        interface: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        margin: f64,
    },
    /// Ehrling constant C(ε) = −ε λ(Ω, 1/ε).
    Ehrling {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        epsilon: f64,
        /// Use this λ instead of solving.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    /// Critical temperature T_c0 − T_c0 λ(Ω, ξ0/|b|).
    Tc {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        tc0: f64,
        #[arg(long)]
        xi0: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    /// Energy, sweep, rate fit and applications as one JSON document.
    Report {
        #[arg(long)]
        domain: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 8.0, 16.0, 32.0])]
        alphas: Vec<f64>,
        /// Directory receiving `report.json` and `sweep.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Angle in radians; accepts multiples of `pi` such as `pi/2`, `3pi/2`, `2*pi/3`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().replace('π', "pi").replace(' ', "");
    let bad = || format!("cannot parse angle `{s}`");
    let Some(pos) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let (num, rest) = (&t[..pos], &t[pos + 2..]);
    let num = num.trim_end_matches('*');
    let a: f64 = if num.is_empty() { 1.0 } else { num.parse().map_err(|_| bad())? };
    let b: f64 = match rest.strip_prefix('/') {
        Some(d) => d.parse().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(a * PI / b)
}

fn interface_shape(s: &str) -> Result<InterfaceShape> {
    if let Some(rest) = s.strip_prefix("circle") {
        let radius = match rest.strip_prefix(':') {
            Some(r) => r.parse().map_err(|_| Error::Config(format!("bad circle radius `{r}`")))?,
            None if rest.is_empty() => 1.0,
            None => return Err(Error::Config(format!("unknown interface `{s}`"))),
        };
        return Ok(InterfaceShape::Circle { center: Point::new(0.0, 0.0), radius });
    }
    match DomainSpec::from_name_or_path(s)? {
        DomainSpec::Polygon(p) => Ok(InterfaceShape::Polygon(p)),
        DomainSpec::Disk { radius } => Ok(InterfaceShape::Circle { center: Point::new(0.0, 0.0), radius }),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn oracle_csv(out: &mut dyn Write, run: &OracleRun) -> Result<()> {
    writeln!(out, "{}", OracleRun::CSV_HEADER)?;
    writeln!(out, "{}", run.csv_row())?;
    Ok(())
}

fn json_string(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Config(format!("json: {e}")))
}

/// `Ok(true)` when every requested computation converged.
fn execute(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    let g = &cli.opts;
    let file = match &g.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let flags = Config {
        tol: g.tol,
        c_bl: g.c_bl,
        layers: g.layers,
        ratio: g.ratio,
        max_size: g.max_size,
        levels: g.levels,
        node_cap: g.node_cap,
        threads: g.threads,
        ..Default::default()
    };
    let cfg = file.merged(&flags);
    let solver = cfg.solver();
    let policy = cfg.mesh_policy();
    let sweep_opts = SweepOptions { policy, solver: solver.clone(), refine_check: true, threads: cfg.threads };

    match cli.command {
        Command::Energy { domain } => {
            let d = DomainSpec::from_name_or_path(&domain)?;
            writeln!(out, "{}", json_string(&domain_energy(&d)?)?)?;
        }
        Command::Mesh { domain, alpha, out: path } => {
            let d = DomainSpec::from_name_or_path(&domain)?;
            let m = match alpha {
                Some(a) => graded_domain_mesh(&d, a, &policy)?,
                None => domain_mesh(&d)?,
            };
            let text = write_mesh(&m);
            match path {
                Some(p) => write_file(&p, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Solve { domain, alpha, dump } => {
            let d = DomainSpec::from_name_or_path(&domain)?;
            let (r, mesh) = solve_domain(&d, alpha, &policy, &solver)?;
            if let Some(dir) = dump {
                let [k, b, m] = FemSystem::robin(&mesh)?.dump();
                write_file(&dir.join("K.txt"), &k)?;
                write_file(&dir.join("B.txt"), &b)?;
                write_file(&dir.join("M.txt"), &m)?;
            }
            writeln!(out, "alpha,lambda,residual,nodes")?;
            writeln!(out, "{:.16e},{:.16e},{:.16e},{}", alpha, r.lambda, r.residual, mesh.nodes.len())?;
        }
        Command::Sweep { domain, alphas, svg } => {
            let d = DomainSpec::from_name_or_path(&domain)?;
            let t = sweep(&d, &alphas, &sweep_opts)?;
            out.write_all(t.to_csv().as_bytes())?;
            if let Some(p) = svg {
                let fit = rate_fit(&t).ok();
                write_file(&p, &remainder_svg(&t, fit.as_ref()))?;
            }
            for r in t.rows.iter().filter(|r| !r.ok()) {
                eprintln!("alpha {}: {}", r.alpha, r.error.as_deref().unwrap_or(""));
            }
            return Ok(t.failures() == 0);
        }
        Command::OracleSector { theta, radius, bc } => {
            let spec = TruncationSpec::new(radius, bc);
            oracle_csv(out, &sector_run(theta, &spec, &solver)?)?;
        }
        Command::OracleDeltaCorner { theta, radius, bc, margin } => {
            let spec = TruncationSpec::new(radius, bc);
            oracle_csv(out, &delta_corner_energy_numeric(theta, &spec, margin, &solver)?)?;
        }
        Command::DeltaSolve { interface, alpha, margin } => {
            let p = DeltaProblem::with_margin(interface_shape(&interface)?, margin, alpha);
            let mp = DeltaMeshPolicy {
                c_bl: cfg.c_bl.unwrap_or(DeltaMeshPolicy::default().c_bl),
                layers: policy.layers,
                ratio: policy.ratio,
                node_cap: policy.node_cap,
            };
            let mesh = build_delta_mesh(&p, &mp, policy.levels)?;
            let r = solve_delta(&p, &mesh, solver.tol)?;
            writeln!(out, "alpha,lambda,residual,margin")?;
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", alpha, r.lambda, r.residual, p.margin())?;
        }
        Command::Ehrling { domain, epsilon, lambda } => {
            let d = DomainSpec::from_name_or_path(&domain)?;
            let r = match lambda {
                Some(l) => ehrling_from_lambda(epsilon, l, domain_energy(&d)?.energy.value())?,
                None => ehrling_constant(&d, epsilon, &policy, &solver)?,
            };
            writeln!(out, "{}", json_string(&r)?)?;
        }
        Command::Tc { domain, tc0, xi0, b, lambda } => {
            let d = DomainSpec::from_name_or_path(&domain)?;
            let r = match lambda {
                Some(l) => critical_temperature_from_lambda(tc0, xi0, b, l)?,
                None => critical_temperature(&d, tc0, xi0, b, &policy, &solver)?,
            };
            writeln!(out, "{}", json_string(&r)?)?;
        }
        Command::Report { domain, alphas, out: dir } => {
            let d = DomainSpec::from_name_or_path(&domain)?;
            let energy = domain_energy(&d)?;
            let t = sweep(&d, &alphas, &sweep_opts)?;
            let fit = rate_fit(&t);
            let model = RateModel::polygon();
            let envelope = fit.as_ref().ok().map(|f| envelope_check(&t, &model, f));
            let last = t.rows.iter().rev().find(|r| r.ok());
            let applications = match last {
                Some(r) => json!({
                    "ehrling": ehrling_from_lambda(1.0 / r.alpha, r.lambda, energy.energy.value())?,
                    "critical_temperature": critical_temperature_from_lambda(1.0, 1.0, -1.0 / r.alpha, r.lambda)?,
                }),
                None => serde_json::Value::Null,
            };
            let report = json!({
                "domain": { "name": domain, "spec": d },
                "energy": energy,
                "sweep": t.rows,
                "rate_fit": match &fit {
                    Ok(f) => json!({ "fit": f, "envelope": envelope }),
                    Err(e) => json!({ "error": e.to_string() }),
                },
                "applications": applications,
            });
            let text = json_string(&report)?;
            if let Some(dir) = dir {
                write_file(&dir.join("report.json"), &text)?;
                write_file(&dir.join("sweep.csv"), &t.to_csv())?;
            }
            writeln!(out, "{text}")?;
            return Ok(t.failures() == 0 && !t.rows.is_empty());
        }
    }
    Ok(true)
}

/// Runs the command line `argv` (program name first). Returns 0 on success, 1 when a
/// computation failed and 2 on malformed arguments.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/2").unwrap(), 1.5 * PI);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("π").unwrap(), PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("pi/x").is_err());
        assert!(parse_angle("x").is_err());
    }

    #[test]
    fn interfaces() {
        assert!(matches!(interface_shape("circle").unwrap(), InterfaceShape::Circle { radius, .. } if radius == 1.0));
        assert!(matches!(interface_shape("circle:2.5").unwrap(), InterfaceShape::Circle { radius, .. } if radius == 2.5));
        assert!(matches!(interface_shape("square").unwrap(), InterfaceShape::Polygon(_)));
        assert!(interface_shape("circle-x").is_err());
    }
}
