//! L1 finite-difference reference solver for 1-D problems
//! D_t^α u = κ u_xx with Dirichlet data.
//!
//! This module deliberately uses nothing from the series, transform or
//! He-polynomial code; it only reads initial profiles through
//! [`SpatialExpr`] and Gamma values from `special_functions`.

mod grid;
mod l1;

pub use grid::{GridCsvError, OracleGrid};
pub use l1::{l1_solve, l1_weights, L1Config};

use thiserror::Error;

pub const MAX_NX: usize = 2048;
pub const MAX_NT: usize = 8192;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("alpha = {0} must lie strictly between 0 and 1 for the L1 scheme")]
    Alpha(f64),
    #[error(
        "grid needs 3 <= n_x <= {MAX_NX} and 1 <= n_t <= {MAX_NT}, got n_x = {n_x}, n_t = {n_t}"
    )]
    GridSize { n_x: usize, n_t: usize },
    #[error("final time must be positive and finite, got {0}")]
    FinalTime(f64),
    #[error("domain [{0}, {1}] is empty")]
    Domain(f64, f64),
    #[error("initial condition must depend on x only")]
    Dimension,
    #[error("tridiagonal system singular at time level {level}, row {row}")]
    SingularSystem { level: usize, row: usize },
}
