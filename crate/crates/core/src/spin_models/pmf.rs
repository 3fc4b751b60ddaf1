use super::{ModelSpec, Variant};
use crate::error::{invalid, Error, Result};
use crate::numerics::{ln_binomial, log_sum_exp, KahanSum};

/// Law on the lattice `offset + step * Z` (per axis), stored as a dense box
/// of `side^dim` log-probabilities in row-major order. Unreachable points
/// carry `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePmf {
    pub offset: f64,
    pub step: f64,
    pub log_probs: Vec<f64>,
    pub dim: usize,
}

pub const ISING_DP_CAP: u64 = 20_000;
pub const BRUTE_FORCE_CAP: u64 = 20;
const WALK_CAPS: [u64; 3] = [20_000, 500, 80];

impl LatticePmf {
    /// Builds a law from unnormalized log-weights.
    pub fn from_log_weights(offset: f64, step: f64, mut log_weights: Vec<f64>, dim: usize) -> Result<Self> {
        if !(step > 0.0) {
            return Err(invalid("lattice step must be positive"));
        }
        integer_root(log_weights.len(), dim)
            .ok_or_else(|| invalid(format!("{} entries do not form a box in dimension {dim}", log_weights.len())))?;
        let z = log_sum_exp(&log_weights)?;
        if !z.is_finite() {
            return Err(invalid("weights have no finite mass"));
        }
        for w in &mut log_weights {
            *w -= z;
        }
        Ok(LatticePmf { offset, step, log_probs: log_weights, dim })
    }

    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    /// Number of lattice points along each axis.
    pub fn side(&self) -> usize {
        integer_root(self.log_probs.len(), self.dim).expect("box shape")
    }

    /// Support point of a one-dimensional law.
    pub fn value(&self, k: usize) -> f64 {
        self.offset + self.step * k as f64
    }

    /// Coordinates of the flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let side = self.side();
        let mut rem = idx;
        let mut out = vec![0.0; self.dim];
        for ax in (0..self.dim).rev() {
            out[ax] = self.value(rem % side);
            rem /= side;
        }
        out
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| l.exp()).collect()
    }

    /// `ln Σ p`, zero for a normalized law.
    pub fn log_total(&self) -> f64 {
        log_sum_exp(&self.log_probs).unwrap_or(f64::NEG_INFINITY)
    }

    /// Law of `c X` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0, "scale must be positive");
        LatticePmf { offset: self.offset * c, step: self.step * c, log_probs: self.log_probs.clone(), dim: self.dim }
    }

    /// `ln E[e^{⟨t, X⟩}]`.
    pub fn log_laplace(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.dim);
        let terms: Vec<f64> = if self.dim == 1 {
            self.log_probs.iter().enumerate().map(|(k, lp)| lp + t[0] * self.value(k)).collect()
        } else {
            (0..self.len())
                .map(|i| {
                    let x = self.point(i);
                    self.log_probs[i] + x.iter().zip(t).map(|(a, b)| a * b).sum::<f64>()
                })
                .collect()
        };
        log_sum_exp(&terms).expect("non-empty law")
    }

    /// `P[X ≥ x]` of a one-dimensional law.
    pub fn tail_ge(&self, x: f64) -> f64 {
        assert_eq!(self.dim, 1);
        let start = ((x - self.offset) / self.step).ceil().max(0.0) as usize;
        // Snap thresholds that fall on a support point up to rounding.
        let start = if start > 0 && (self.value(start - 1) - x).abs() <= 1e-12 * x.abs().max(1.0) {
            start - 1
        } else {
            start
        };
        if start >= self.len() {
            return 0.0;
        }
        log_sum_exp(&self.log_probs[start..]).map(f64::exp).unwrap_or(0.0)
    }

    /// `P[X ≤ x]` of a one-dimensional law.
    pub fn tail_le(&self, x: f64) -> f64 {
        assert_eq!(self.dim, 1);
        let end = ((x - self.offset) / self.step).floor();
        let end = if (self.value((end + 1.0).max(0.0) as usize) - x).abs() <= 1e-12 * x.abs().max(1.0) {
            end + 1.0
        } else {
            end
        };
        if end < 0.0 {
            return 0.0;
        }
        let end = (end as usize).min(self.len() - 1);
        log_sum_exp(&self.log_probs[..=end]).map(f64::exp).unwrap_or(0.0)
    }

    /// `P[a ≤ X ≤ b]` of a one-dimensional law; zero when `a > b`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        assert_eq!(self.dim, 1);
        if a > b || self.is_empty() {
            return 0.0;
        }
        let tol = |x: f64| 1e-12 * x.abs().max(1.0);
        let lo = ((a - self.offset - tol(a)) / self.step).ceil().max(0.0);
        let hi = ((b - self.offset + tol(b)) / self.step).floor();
        if hi < lo || hi < 0.0 {
            return 0.0;
        }
        let (lo, hi) = (lo as usize, (hi as usize).min(self.len() - 1));
        if lo > hi {
            return 0.0;
        }
        log_sum_exp(&self.log_probs[lo..=hi]).map(f64::exp).unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        assert_eq!(self.dim, 1);
        let s: KahanSum = self.log_probs.iter().enumerate().map(|(k, lp)| lp.exp() * self.value(k)).collect();
        s.value()
    }

    /// `E[(X − mean)^j]` for `j = 0..=order`, with compensated sums.
    pub fn central_moments(&self, order: usize) -> Vec<f64> {
        assert_eq!(self.dim, 1);
        let mean = self.mean();
        let mut acc = vec![KahanSum::default(); order + 1];
        for (k, lp) in self.log_probs.iter().enumerate() {
            let p = lp.exp();
            if p == 0.0 {
                continue;
            }
            let d = self.value(k) - mean;
            let mut term = p;
            for a in acc.iter_mut() {
                a.add(term);
                term *= d;
            }
        }
        acc.iter().map(KahanSum::value).collect()
    }

    /// `E[|X − mean|^j]`, used to bound cancellation in cumulants.
    pub fn absolute_central_moments(&self, order: usize) -> Vec<f64> {
        let mean = self.mean();
        let mut acc = vec![0.0; order + 1];
        for (k, lp) in self.log_probs.iter().enumerate() {
            let p = lp.exp();
            let d = (self.value(k) - mean).abs();
            let mut term = p;
            for a in acc.iter_mut() {
                *a += term;
                term *= d;
            }
        }
        acc
    }

    /// Reweights by `exp(f(x))` and renormalizes.
    pub fn reweighted<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<Self> {
        let w: Vec<f64> = (0..self.len())
            .map(|i| {
                let lp = self.log_probs[i];
                if lp == f64::NEG_INFINITY {
                    lp
                } else {
                    lp + f(&self.point(i))
                }
            })
            .collect();
        LatticePmf::from_log_weights(self.offset, self.step, w, self.dim)
    }
}

fn integer_root(len: usize, dim: usize) -> Option<usize> {
    if dim == 0 {
        return None;
    }
    let guess = (len as f64).powf(1.0 / dim as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|s| s.pow(dim as u32) == len && *s > 0)
}

/// Exact Curie-Weiss law of `M_n`, support `−n, −n+2, …, n`.
pub fn cw_magnetization_pmf(n: u64, alpha: f64, beta: f64) -> Result<LatticePmf> {
    ModelSpec::curie_weiss(n, alpha, beta).validate()?;
    let nf = n as f64;
    let w = (0..=n)
        .map(|j| {
            let m = 2.0 * j as f64 - nf;
            ln_binomial(n, j) + alpha * m + beta * m * m / (2.0 * nf)
        })
        .collect();
    LatticePmf::from_log_weights(-nf, 2.0, w, 1)
}

/// Exact Ising law of `M_n` by dynamic programming over (last spin,
/// number of up spins), rescaled at every step.
pub fn ising_magnetization_pmf(n: u64, alpha: f64, beta: f64) -> Result<LatticePmf> {
    ModelSpec::ising(n, alpha, beta).validate()?;
    if n > ISING_DP_CAP {
        return Err(Error::TooLarge { what: "ising dynamic program", size: n, cap: ISING_DP_CAP });
    }
    let len = n as usize + 1;
    let (same, flip) = (beta.exp(), (-beta).exp());
    let (up_f, down_f) = (alpha.exp(), (-alpha).exp());
    // up[j]: last spin +1 with j up spins so far; down[j]: last spin −1.
    let mut up = vec![0.0; len];
    let mut down = vec![0.0; len];
    up[1] = up_f;
    down[0] = down_f;
    let mut new_up = vec![0.0; len];
    let mut new_down = vec![0.0; len];
    for step in 1..n as usize {
        new_up[0] = 0.0;
        for j in 0..=step {
            let (u, d) = (up[j], down[j]);
            new_up[j + 1] = (u * same + d * flip) * up_f;
            new_down[j] = (u * flip + d * same) * down_f;
        }
        new_down[step + 1] = 0.0;
        std::mem::swap(&mut up, &mut new_up);
        std::mem::swap(&mut down, &mut new_down);
        let m = up[..=step + 1].iter().chain(&down[..=step + 1]).fold(0.0_f64, |a, &b| a.max(b));
        for v in up[..=step + 1].iter_mut().chain(down[..=step + 1].iter_mut()) {
            *v /= m;
        }
    }
    let w = (0..len).map(|j| (up[j] + down[j]).ln()).collect();
    LatticePmf::from_log_weights(-(n as f64), 2.0, w, 1)
}

/// Law of a simple random walk on `Z^d` after `n` steps, on the box
/// `[−n, n]^d`.
pub fn random_walk_pmf(dim: usize, n: u64) -> Result<LatticePmf> {
    if !(1..=3).contains(&dim) {
        return Err(invalid(format!("walk dimension must be 1, 2 or 3, got {dim}")));
    }
    let cap = WALK_CAPS[dim - 1];
    if n > cap {
        return Err(Error::TooLarge { what: "random walk box", size: n, cap });
    }
    let nf = n as f64;
    if dim == 1 {
        // Index i is position i − n; odd indices are unreachable.
        let w = (0..=2 * n)
            .map(|i| if i % 2 == 1 { f64::NEG_INFINITY } else { ln_binomial(n, i / 2) - nf * std::f64::consts::LN_2 })
            .collect();
        return LatticePmf::from_log_weights(-nf, 1.0, w, 1);
    }
    let side = 2 * n as usize + 1;
    let c = n as usize;
    let strides: Vec<usize> = (0..dim).map(|ax| side.pow((dim - 1 - ax) as u32)).collect();
    let len = side.pow(dim as u32);
    let mut cur = vec![0.0; len];
    let origin: usize = strides.iter().map(|s| s * c).sum();
    cur[origin] = 1.0;
    let mut next = vec![0.0; len];
    let inv = 1.0 / (2 * dim) as f64;
    for k in 1..=n as usize {
        // Only the box [−k, k]^d can be reached after k steps.
        let lo = c - k;
        let hi = c + k;
        let mut idx = vec![lo; dim];
        loop {
            let flat: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            let mut acc = 0.0;
            for ax in 0..dim {
                if idx[ax] > 0 {
                    acc += cur[flat - strides[ax]];
                }
                if idx[ax] + 1 < side {
                    acc += cur[flat + strides[ax]];
                }
            }
            next[flat] = acc * inv;
            // Advance the multi-index over the box.
            let mut ax = dim;
            loop {
                if ax == 0 {
                    break;
                }
                ax -= 1;
                if idx[ax] < hi {
                    idx[ax] += 1;
                    break;
                }
                idx[ax] = lo;
            }
            if idx.iter().all(|&i| i == lo) {
                break;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let w = cur.iter().map(|p| p.ln()).collect();
    LatticePmf::from_log_weights(-nf, 1.0, w, dim)
}

/// Exact law of `M_n` (or of `W_n` for walks) in the model's native units.
pub fn magnetization_pmf(spec: &ModelSpec) -> Result<LatticePmf> {
    spec.validate()?;
    match spec.variant {
        Variant::CurieWeiss => cw_magnetization_pmf(spec.n, spec.alpha, spec.beta),
        Variant::Ising1d => ising_magnetization_pmf(spec.n, spec.alpha, spec.beta),
        Variant::MixedCwIsing => {
            let base = ising_magnetization_pmf(spec.n, spec.alpha, spec.beta)?;
            let c = spec.gamma / (2.0 * spec.n as f64);
            base.reweighted(|x| c * x[0] * x[0])
        }
        Variant::RandomWalk => random_walk_pmf(spec.dim, spec.n),
    }
}

/// Law by enumerating every configuration; `n ≤ 20` for chains and
/// `(2d)^n ≤ 2^20` for walks.
pub fn brute_force_pmf(spec: &ModelSpec) -> Result<LatticePmf> {
    spec.validate()?;
    let n = spec.n;
    let nf = n as f64;
    if spec.variant == Variant::RandomWalk {
        let d = spec.dim as u64;
        let total = (2 * d).checked_pow(n as u32).filter(|t| *t <= 1 << 20).ok_or(Error::TooLarge {
            what: "brute-force walk enumeration",
            size: n,
            cap: BRUTE_FORCE_CAP,
        })?;
        let side = 2 * n as usize + 1;
        let mut counts = vec![0u64; side.pow(spec.dim as u32)];
        for code in 0..total {
            let mut pos = vec![n as i64; spec.dim];
            let mut c = code;
            for _ in 0..n {
                let mv = c % (2 * d);
                c /= 2 * d;
                let ax = (mv / 2) as usize;
                pos[ax] += if mv % 2 == 0 { 1 } else { -1 };
            }
            let flat = pos.iter().fold(0usize, |acc, &p| acc * side + p as usize);
            counts[flat] += 1;
        }
        let w = counts.iter().map(|&c| (c as f64).ln()).collect();
        return LatticePmf::from_log_weights(-nf, 1.0, w, spec.dim);
    }
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge { what: "brute-force enumeration", size: n, cap: BRUTE_FORCE_CAP });
    }
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); n as usize + 1];
    for code in 0u64..(1 << n) {
        let ups = code.count_ones() as usize;
        let m = 2.0 * ups as f64 - nf;
        let mut bonds = 0i64;
        for i in 0..n - 1 {
            let a = (code >> i) & 1;
            let b = (code >> (i + 1)) & 1;
            bonds += if a == b { 1 } else { -1 };
        }
        let lw = match spec.variant {
            Variant::CurieWeiss => spec.alpha * m + spec.beta * m * m / (2.0 * nf),
            Variant::Ising1d => spec.alpha * m + spec.beta * bonds as f64,
            Variant::MixedCwIsing => spec.alpha * m + spec.beta * bonds as f64 + spec.gamma * m * m / (2.0 * nf),
            Variant::RandomWalk => unreachable!(),
        };
        buckets[ups].push(lw);
    }
    let w = buckets.iter().map(|b| if b.is_empty() { f64::NEG_INFINITY } else { log_sum_exp(b).unwrap() }).collect();
    LatticePmf::from_log_weights(-nf, 2.0, w, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &LatticePmf, b: &LatticePmf) -> f64 {
        a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn chains_match_enumeration() {
        for (a, b) in [(0.0, 0.0), (0.3, 0.8), (-0.5, 0.2)] {
            let n = 11;
            let ising = ising_magnetization_pmf(n, a, b).unwrap();
            let brute = brute_force_pmf(&ModelSpec::ising(n, a, b)).unwrap();
            assert!(max_abs_diff(&ising, &brute) < 1e-14);
            let cw = cw_magnetization_pmf(n, a, b).unwrap();
            let brute = brute_force_pmf(&ModelSpec::curie_weiss(n, a, b)).unwrap();
            assert!(max_abs_diff(&cw, &brute) < 1e-14);
        }
    }

    #[test]
    fn mixed_matches_enumeration() {
        let spec = ModelSpec::mixed(12, 0.1, 0.4, 0.3);
        let exact = magnetization_pmf(&spec).unwrap();
        let brute = brute_force_pmf(&spec).unwrap();
        assert!(max_abs_diff(&exact, &brute) < 1e-14);
    }

    #[test]
    fn walks_match_enumeration() {
        for (d, n) in [(1, 12), (2, 7), (3, 5)] {
            let dp = random_walk_pmf(d, n).unwrap();
            let brute = brute_force_pmf(&ModelSpec::random_walk(d, n)).unwrap();
            assert!(max_abs_diff(&dp, &brute) < 1e-14, "d = {d}");
        }
    }

    #[test]
    fn planar_walk_factorizes_along_diagonals() {
        // (x + y, x − y) are independent one-dimensional simple walks.
        let n = 40u64;
        let pmf = random_walk_pmf(2, n).unwrap();
        let side = pmf.side();
        let ln_bin = |u: i64| -> f64 {
            if (u + n as i64) % 2 != 0 || u.unsigned_abs() > n {
                return f64::NEG_INFINITY;
            }
            ln_binomial(n, ((u + n as i64) / 2) as u64) - n as f64 * std::f64::consts::LN_2
        };
        let mut worst = 0.0_f64;
        for i in 0..side {
            for j in 0..side {
                let (x, y) = (i as i64 - n as i64, j as i64 - n as i64);
                let expected = (ln_bin(x + y) + ln_bin(x - y)).exp();
                worst = worst.max((pmf.log_probs[i * side + j].exp() - expected).abs());
            }
        }
        assert!(worst < 1e-15);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(ising_magnetization_pmf(ISING_DP_CAP + 1, 0.0, 0.1), Err(Error::TooLarge { .. })));
        assert!(matches!(random_walk_pmf(3, 81), Err(Error::TooLarge { .. })));
        assert!(matches!(brute_force_pmf(&ModelSpec::ising(21, 0.0, 0.1)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn tail_at_support_point() {
        let pmf = cw_magnetization_pmf(4, 0.0, 0.0).unwrap();
        assert!((pmf.tail_ge(2.0) - 5.0 / 16.0).abs() < 1e-15);
        assert!((pmf.tail_ge(1.5) - 5.0 / 16.0).abs() < 1e-15);
        assert_eq!(pmf.tail_ge(4.5), 0.0);
        assert!((pmf.tail_ge(-10.0) - 1.0).abs() < 1e-15);
        assert!((pmf.tail_le(-2.0) - 5.0 / 16.0).abs() < 1e-15);
        assert!((pmf.tail_le(-1.5) - 5.0 / 16.0).abs() < 1e-15);
        assert_eq!(pmf.tail_le(-4.5), 0.0);
        assert!((pmf.tail_le(10.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_interval_mass() {
        let pmf = cw_magnetization_pmf(4, 0.0, 0.0).unwrap();
        assert!((pmf.mass_between(-2.0, 2.0) - 14.0 / 16.0).abs() < 1e-15);
        assert!((pmf.mass_between(0.0, 0.0) - 6.0 / 16.0).abs() < 1e-15);
        assert!((pmf.mass_between(-1.0, 1.0) - 6.0 / 16.0).abs() < 1e-15);
        assert_eq!(pmf.mass_between(0.5, 1.5), 0.0);
        assert_eq!(pmf.mass_between(1.0, -1.0), 0.0);
        assert!((pmf.mass_between(-9.0, 9.0) - 1.0).abs() < 1e-15);
        assert_eq!(pmf.mass_between(5.0, 9.0), 0.0);
    }
}
