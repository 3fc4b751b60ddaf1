//! Exact finite-`n` laws of the magnetization for Curie-Weiss, nearest
//! neighbour Ising and mixed chains, plus simple random walks on `Z^d`.

mod io;
mod pmf;
mod sample;
mod transfer;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use io::{read_pmf_csv, write_pmf_csv, PmfHeader};
pub use pmf::{
    brute_force_pmf, cw_magnetization_pmf, ising_magnetization_pmf, magnetization_pmf, random_walk_pmf, LatticePmf,
    BRUTE_FORCE_CAP, ISING_DP_CAP,
};
pub use sample::{sample_configuration, SpinConfiguration};
pub use transfer::{
    ising_alpha0_mod_params, ising_laplace, ising_log_laplace, ising_mod_params, ln_partition_function,
    transfer_eigen, TransferData,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    CurieWeiss,
    Ising1d,
    MixedCwIsing,
    RandomWalk,
}

/// A finite model: magnetic field `alpha`, coupling `beta`, global
/// mean-field coupling `gamma` (mixed chains only), lattice dimension `dim`
/// (walks only) and size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dim: usize,
    pub n: u64,
}

impl ModelSpec {
    pub fn curie_weiss(n: u64, alpha: f64, beta: f64) -> Self {
        ModelSpec { variant: Variant::CurieWeiss, alpha, beta, gamma: 0.0, dim: 1, n }
    }

    pub fn ising(n: u64, alpha: f64, beta: f64) -> Self {
        ModelSpec { variant: Variant::Ising1d, alpha, beta, gamma: 0.0, dim: 1, n }
    }

    /// Weight `exp(α M + β Σ σ_i σ_{i+1} + γ M² / (2n))`.
    pub fn mixed(n: u64, alpha: f64, beta: f64, gamma: f64) -> Self {
        ModelSpec { variant: Variant::MixedCwIsing, alpha, beta, gamma, dim: 1, n }
    }

    pub fn random_walk(dim: usize, n: u64) -> Self {
        ModelSpec { variant: Variant::RandomWalk, alpha: 0.0, beta: 0.0, gamma: 0.0, dim, n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()) {
            return Err(invalid("parameters must be finite"));
        }
        if self.beta < 0.0 {
            return Err(invalid(format!("beta must be non-negative, got {}", self.beta)));
        }
        if self.variant == Variant::MixedCwIsing && !(0.0..1.0).contains(&self.gamma) {
            return Err(invalid(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if !(1..=3).contains(&self.dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        if self.variant != Variant::RandomWalk && self.dim != 1 {
            return Err(invalid("spin chains are one-dimensional"));
        }
        Ok(())
    }
}
