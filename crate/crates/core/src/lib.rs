//! Exact laws, cumulant combinatorics and quantitative limit theorems for
//! critical Curie-Weiss and one-dimensional Ising magnetizations, viewed
//! through mod-Gaussian convergence.

pub mod cumulant_engine;
pub mod error;
pub mod limits;
pub mod modgauss;
pub mod numerics;
pub mod spin_models;

pub use error::{Error, Result};
