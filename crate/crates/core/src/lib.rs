//! Computer algebra for finite-dimensional noncommutative differential
//! geometry.
//!
//! The crate models star-algebras, bimodules, first- and second-order
//! differential calculi, connections, quantum metrics, Levi-Civita solvers,
//! cocycle twists, and finite spectral triples, over either exact Gaussian
//! rationals or tolerance-based complex floats.

// Matrix assembly is index arithmetic; explicit indices beat iterator chains.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod scalar;
pub mod linalg;
pub mod validate;
pub mod exec;
pub mod algebra;
pub mod bimodule;
pub mod calculus;
pub mod second_order;
pub mod connection;
pub mod metric;
pub mod instance;
pub mod lc;
pub mod spectral;
pub mod twist;

pub use error::{Error, Result};
pub use scalar::{Approx, Exact, Scalar};

/// Execution mode for the data-parallel entry points.
///
/// With the `parallel` feature (default) `Auto` uses rayon; `Sequential`
/// forces the single-threaded path, which is also the only path when the
/// feature is disabled.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ExecMode {
    #[default]
    Auto,
    Sequential,
}
