use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{cw_magnetization_pmf, ModelSpec, Variant};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinConfiguration(pub Vec<i8>);

impl SpinConfiguration {
    pub fn magnetization(&self) -> i64 {
        self.0.iter().map(|&s| s as i64).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Exact sample from the model; the same seed reproduces the same
/// configuration on every platform.
pub fn sample_configuration(spec: &ModelSpec, seed: u64) -> Result<SpinConfiguration> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n as usize;
    match spec.variant {
        Variant::Ising1d if spec.alpha == 0.0 => {
            let p_same = spec.beta.exp() / (2.0 * spec.beta.cosh());
            let mut spins = Vec::with_capacity(n);
            let mut s: i8 = if rng.gen::<bool>() { 1 } else { -1 };
            spins.push(s);
            for _ in 1..n {
                if !rng.gen_bool(p_same) {
                    s = -s;
                }
                spins.push(s);
            }
            Ok(SpinConfiguration(spins))
        }
        Variant::Ising1d => Ok(SpinConfiguration(sample_transfer(spec.alpha, spec.beta, n, &mut rng))),
        Variant::CurieWeiss => {
            let pmf = cw_magnetization_pmf(spec.n, spec.alpha, spec.beta)?;
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut ups = pmf.len() - 1;
            for (j, lp) in pmf.log_probs.iter().enumerate() {
                acc += lp.exp();
                if u < acc {
                    ups = j;
                    break;
                }
            }
            let mut spins = vec![-1i8; n];
            for i in index::sample(&mut rng, n, ups) {
                spins[i] = 1;
            }
            Ok(SpinConfiguration(spins))
        }
        Variant::RandomWalk if spec.dim == 1 => {
            Ok(SpinConfiguration((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()))
        }
        _ => Err(Error::Unsupported(format!("sampling for {:?} in dimension {}", spec.variant, spec.dim))),
    }
}

/// Sequential sampling from the transfer-matrix conditionals.
fn sample_transfer(alpha: f64, beta: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<i8> {
    let t = |s: f64, s2: f64| (beta * s * s2 + alpha * s2).exp();
    // back[m] ∝ T^m W, normalized to sum 1.
    let mut back = vec![[0.5, 0.5]; n];
    for m in 1..n {
        let [bp, bm] = back[m - 1];
        let up = t(1.0, 1.0) * bp + t(1.0, -1.0) * bm;
        let dn = t(-1.0, 1.0) * bp + t(-1.0, -1.0) * bm;
        back[m] = [up / (up + dn), dn / (up + dn)];
    }
    let mut spins = Vec::with_capacity(n);
    let [bp, bm] = back[n - 1];
    let wp = alpha.exp() * bp;
    let wm = (-alpha).exp() * bm;
    let mut s = if rng.gen::<f64>() * (wp + wm) < wp { 1.0 } else { -1.0 };
    spins.push(s as i8);
    for k in 1..n {
        let [bp, bm] = back[n - 1 - k];
        let wp = t(s, 1.0) * bp;
        let wm = t(s, -1.0) * bm;
        s = if rng.gen::<f64>() * (wp + wm) < wp { 1.0 } else { -1.0 };
        spins.push(s as i8);
    }
    spins
}
