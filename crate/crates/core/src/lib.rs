//! Corner-domain spectral toolkit for Robin Laplacians and δ-interactions.

pub mod applications;
pub mod asymptotics;
pub mod cli;
pub mod cone_energy;
pub mod cone_oracle;
pub mod config;
pub mod delta;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod mesher;
pub mod reference;

pub use error::{Error, Result, SolverError};
