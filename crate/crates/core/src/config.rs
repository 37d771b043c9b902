//! `key = value` defaults for the solver and mesh policies.

use std::path::Path;

use crate::asymptotics::MeshPolicy;
use crate::error::{Error, Result};
use crate::fem::SolverConfig;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub tol: Option<f64>,
    pub krylov_dim: Option<usize>,
    pub max_restarts: Option<usize>,
    pub c_bl: Option<f64>,
    pub layers: Option<usize>,
    pub ratio: Option<f64>,
    pub max_size: Option<f64>,
    pub levels: Option<usize>,
    pub node_cap: Option<usize>,
    pub threads: Option<usize>,
}

fn value<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, msg: format!("bad value `{v}` for `{key}`") })
}

impl Config {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            let (k, v) = s.split_once('=').ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{s}`") })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "tol" => c.tol = Some(value(line, k, v)?),
                "krylov_dim" => c.krylov_dim = Some(value(line, k, v)?),
                "max_restarts" => c.max_restarts = Some(value(line, k, v)?),
                "c_bl" => c.c_bl = Some(value(line, k, v)?),
                "layers" => c.layers = Some(value(line, k, v)?),
                "ratio" => c.ratio = Some(value(line, k, v)?),
                "max_size" => c.max_size = Some(value(line, k, v)?),
                "levels" => c.levels = Some(value(line, k, v)?),
                "node_cap" => c.node_cap = Some(value(line, k, v)?),
                "threads" => c.threads = Some(value(line, k, v)?),
                other => return Err(Error::Parse { line, msg: format!("unknown key `{other}`") }),
            }
        }
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Values of `over` take precedence.
    pub fn merged(&self, over: &Config) -> Config {
        Config {
            tol: over.tol.or(self.tol),
            krylov_dim: over.krylov_dim.or(self.krylov_dim),
            max_restarts: over.max_restarts.or(self.max_restarts),
            c_bl: over.c_bl.or(self.c_bl),
            layers: over.layers.or(self.layers),
            ratio: over.ratio.or(self.ratio),
            max_size: over.max_size.or(self.max_size),
            levels: over.levels.or(self.levels),
            node_cap: over.node_cap.or(self.node_cap),
            threads: over.threads.or(self.threads),
        }
    }

    pub fn solver(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            tol: self.tol.unwrap_or(d.tol),
            krylov_dim: self.krylov_dim.unwrap_or(d.krylov_dim),
            max_restarts: self.max_restarts.unwrap_or(d.max_restarts),
            energy_estimate: None,
        }
    }

    pub fn mesh_policy(&self) -> MeshPolicy {
        let d = MeshPolicy::default();
        MeshPolicy {
            c_bl: self.c_bl.unwrap_or(d.c_bl),
            layers: self.layers.unwrap_or(d.layers),
            ratio: self.ratio.unwrap_or(d.ratio),
            max_size: self.max_size.unwrap_or(d.max_size),
            levels: self.levels.unwrap_or(d.levels),
            node_cap: self.node_cap.unwrap_or(d.node_cap),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_merge() {
        let c = Config::parse("# defaults\ntol = 1e-9\nc_bl=0.25  # finer\n\nthreads = 2\n").unwrap();
        assert_eq!(c.tol, Some(1e-9));
        assert_eq!(c.c_bl, Some(0.25));
        assert_eq!(c.threads, Some(2));
        let m = c.merged(&Config { c_bl: Some(0.1), ..Default::default() });
        assert_eq!(m.mesh_policy().c_bl, 0.1);
        assert_eq!(m.solver().tol, 1e-9);
        assert_eq!(m.mesh_policy().layers, 3);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(Config::parse("tol 1e-9"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Config::parse("\nfoo = 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Config::parse("layers = x"), Err(Error::Parse { .. })));
    }
}
