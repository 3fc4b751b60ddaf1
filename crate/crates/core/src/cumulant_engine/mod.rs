//! Exact joint cumulants of zero-field Ising spins in the variable `x = tanh β`.

mod combinatorics;
mod cumulants;
mod poly;

pub use combinatorics::*;
pub use cumulants::*;
pub use poly::*;
