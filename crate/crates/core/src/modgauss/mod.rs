//! Mod-Gaussian descriptors, the exponential change of measure and the
//! diagnostics built on residues.

mod descriptor;
mod diagnostics;
mod tilt;

pub use descriptor::*;
pub use diagnostics::*;
pub use tilt::*;
