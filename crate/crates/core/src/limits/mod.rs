//! Smoothing kernel, Kolmogorov distances, the rate certificate for the
//! critical Curie-Weiss magnetization and the local limit check.

mod kernel;
mod kolmogorov;
mod rate;

pub use kernel::*;
pub use kolmogorov::*;
pub use rate::*;
