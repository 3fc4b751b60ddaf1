use crate::error::{invalid, Result};
use crate::numerics::log_sum_exp;
use crate::spin_models::{random_walk_pmf, LatticePmf};

/// Law reweighted by `e^{γ |x|² / 2 t_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedLaw {
    pub base: LatticePmf,
    pub t_n: f64,
    pub gamma: f64,
    pub tilted: LatticePmf,
    /// `ln E[e^{γ |X|² / 2 t_n}]` under the base law.
    pub log_normalizer: f64,
}

pub fn tilt(pmf: &LatticePmf, t_n: f64, gamma: f64) -> Result<TiltedLaw> {
    if gamma > 1.0 {
        return Err(invalid(format!("tilt strength {gamma} exceeds 1; the tilted law may not be normalizable")));
    }
    if !(gamma >= 0.0) {
        return Err(invalid(format!("tilt strength must be non-negative, got {gamma}")));
    }
    if !(t_n > 0.0 && t_n.is_finite()) {
        return Err(invalid(format!("t_n must be positive, got {t_n}")));
    }
    let weight = |x: &[f64]| gamma * x.iter().map(|v| v * v).sum::<f64>() / (2.0 * t_n);
    let shifted: Vec<f64> = (0..pmf.len())
        .map(|i| {
            let lp = pmf.log_probs[i];
            if lp == f64::NEG_INFINITY {
                lp
            } else {
                lp + weight(&pmf.point(i))
            }
        })
        .collect();
    let log_normalizer = log_sum_exp(&shifted)? - pmf.log_total();
    let tilted = LatticePmf::from_log_weights(pmf.offset, pmf.step, shifted, pmf.dim)?;
    Ok(TiltedLaw { base: pmf.clone(), t_n, gamma, tilted, log_normalizer })
}

/// Endpoint law of the walk reweighted by `exp(d |V_n|² / 2n)`, on the raw lattice.
pub fn walk_tilted_law(dim: usize, n: u64) -> Result<LatticePmf> {
    let base = random_walk_pmf(dim, n)?;
    let t = n as f64 / dim as f64;
    Ok(tilt(&base, t, 1.0)?.tilted)
}
