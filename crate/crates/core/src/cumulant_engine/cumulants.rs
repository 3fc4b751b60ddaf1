use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::combinatorics::{
    cut_to_pairing, enumerate_compositions, enumerate_dyck_capped, even_set_partitions, mobius, non_crossing_pairing,
    starred_dyck, starred_dyck_capped, Composition, DyckPath, PlanarTree,
};
use super::poly::{ExactPoly, ExactRat, FactoredRat};
use crate::error::{invalid, Error, Result};
use crate::numerics::double_factorial_odd;
use crate::spin_models::LatticePmf;

const JOINT_CAP: usize = 16;
const ORACLE_CAP: usize = 8;
const ESTIMATE_CAP: usize = 6;
const Q_CAP: usize = 10;
const PMF_CUMULANT_CAP: usize = 12;

fn check_indices(indices: &[u64], cap: usize) -> Result<()> {
    if indices.len() > cap {
        return Err(Error::TooLarge { what: "joint cumulant order", size: indices.len() as u64, cap: cap as u64 });
    }
    if indices.is_empty() {
        return Err(invalid("at least one index is needed"));
    }
    if indices.contains(&0) {
        return Err(invalid("indices must be positive"));
    }
    if indices.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("indices must be non-decreasing"));
    }
    Ok(())
}

/// Joint cumulant `κ(σ(i₁), …, σ(i_{2r}))` of zero-field Ising spins as a
/// polynomial in `x = tanh β`, summed over lifted Dyck paths.
pub fn joint_cumulant_spins(indices: &[u64]) -> Result<ExactPoly> {
    check_indices(indices, JOINT_CAP)?;
    if indices.len() % 2 == 1 {
        return Ok(ExactPoly::zero());
    }
    let r = indices.len() / 2;
    let mut out = ExactPoly::zero();
    for delta in starred_dyck(r)? {
        let nu = non_crossing_pairing(&delta);
        let e = nu.exponent(indices) as usize;
        let c = BigRational::from_integer(delta.interior_height_product());
        out = &out + &ExactPoly::monomial(c, e);
    }
    Ok(if r % 2 == 1 { out } else { -&out })
}

/// The same cumulant from the Möbius expansion over even set partitions,
/// with `E[σ(a₁)⋯σ(a_{2s})] = x^{(a₂−a₁)+(a₄−a₃)+⋯}`.
pub fn mobius_joint_cumulant(indices: &[u64]) -> Result<ExactPoly> {
    check_indices(indices, ORACLE_CAP)?;
    if indices.len() % 2 == 1 {
        return Ok(ExactPoly::zero());
    }
    let mut out = ExactPoly::zero();
    for blocks in even_set_partitions(indices.len()) {
        let e = cut_to_pairing(&blocks).exponent(indices) as usize;
        let mu = BigRational::from_integer(mobius(blocks.len()));
        out = &out + &ExactPoly::monomial(mu, e);
    }
    Ok(out)
}

/// `Π_{d∈D(c)} x^{δ(d)} / (1 − x^{δ(d)})`.
pub fn functional_b(c: &Composition, delta: &DyckPath) -> Result<FactoredRat> {
    let h = delta.heights();
    if c.size() as usize != delta.steps().len() {
        return Err(invalid("composition and path sizes differ"));
    }
    let mut out = FactoredRat::from_poly(ExactPoly::one());
    for d in c.descents() {
        let k = h[d as usize] as usize;
        if k == 0 {
            return Err(invalid("path touches zero at a descent; the geometric factor diverges"));
        }
        out = out.mul(&FactoredRat::geometric(k));
    }
    Ok(out)
}

/// Per-composition terms `A(c) C(δ) B(c, δ)` summed over lifted paths, in
/// composition order.
pub fn estimate_contributions(r: usize) -> Result<Vec<(Composition, FactoredRat)>> {
    if r < 1 {
        return Err(invalid("r must be at least 1"));
    }
    if r > ESTIMATE_CAP {
        return Err(Error::TooLarge { what: "cumulant estimate", size: r as u64, cap: ESTIMATE_CAP as u64 });
    }
    let paths = starred_dyck(r)?;
    let mut out = Vec::new();
    for c in enumerate_compositions(2 * r as u32) {
        let a = c.multinomial();
        // Group paths by the multiset of heights seen at the descents.
        let mut groups: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
        for delta in &paths {
            let h = delta.heights();
            let mut key: Vec<usize> = c.descents().iter().map(|&d| h[d as usize] as usize).collect();
            key.sort_unstable();
            *groups.entry(key).or_insert_with(BigInt::zero) += &a * delta.interior_height_product();
        }
        let terms: Vec<FactoredRat> = groups
            .into_iter()
            .map(|(key, coef)| {
                key.iter()
                    .fold(FactoredRat::from_poly(ExactPoly::one()), |acc, &k| acc.mul(&FactoredRat::geometric(k)))
                    .scale(&BigRational::from_integer(coef))
            })
            .collect();
        out.push((c, FactoredRat::sum(&terms)));
    }
    Ok(out)
}

/// `lim |κ^{(2r)}(M_n)| / n` as a rational function of `x = tanh β`.
pub fn magnetization_cumulant_estimate_factored(r: usize) -> Result<FactoredRat> {
    let parts = estimate_contributions(r)?;
    Ok(FactoredRat::sum(parts.iter().map(|(_, f)| f)))
}

pub fn magnetization_cumulant_estimate(r: usize) -> Result<ExactRat> {
    Ok(magnetization_cumulant_estimate_factored(r)?.normalize())
}

/// `P_r(x) = estimate · (1 − x)^{2r−1}`.
pub fn polynomial_p(r: usize) -> Result<ExactPoly> {
    let est = magnetization_cumulant_estimate(r)?;
    let scaled = est.mul_poly(&ExactPoly::one_minus_x_pow(1).pow(2 * r as u32 - 1));
    scaled.as_poly().cloned().ok_or_else(|| invalid(format!("estimate times (1 − x)^{} is not a polynomial", 2 * r - 1)))
}

/// `Q(r) = Σ_{δ} Π_{i=1}^{2r−1} δ(i)` over lifted paths.
pub fn q_value(r: usize) -> Result<BigInt> {
    if r > Q_CAP {
        return Err(Error::TooLarge { what: "Q(r)", size: r as u64, cap: Q_CAP as u64 });
    }
    Ok(starred_dyck_capped(r, Q_CAP - 1)?.iter().map(DyckPath::interior_height_product).sum())
}

/// `Σ_{T} Π_e h(e)(h(e)+1)` over planar trees with `r − 1` edges.
pub fn q_value_trees(r: usize) -> Result<BigInt> {
    if r < 1 {
        return Err(invalid("r must be at least 1"));
    }
    if r > Q_CAP {
        return Err(Error::TooLarge { what: "Q(r)", size: r as u64, cap: Q_CAP as u64 });
    }
    Ok(enumerate_dyck_capped(r - 1, Q_CAP - 1)?
        .iter()
        .map(|p| {
            PlanarTree::from_dyck(p).edge_heights().iter().map(|&h| BigInt::from(h) * BigInt::from(h + 1)).product::<BigInt>()
        })
        .sum())
}

/// `(2r−1)!! (2r−3)!! (e^{2β} + 1)^{2r−1}`, a bound on `|κ^{(2r)}(M_n)| / n`.
pub fn cumulant_bound(r: usize, beta: f64) -> f64 {
    assert!(r >= 1);
    let r = r as i64;
    double_factorial_odd(r) * double_factorial_odd(r - 1) * ((2.0 * beta).exp() + 1.0).powi(2 * r as i32 - 1)
}

/// Cumulants of a lattice law with a rounding-error estimate per order.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfCumulants {
    /// `κ^{(1)}, …, κ^{(r_max)}`.
    pub values: Vec<f64>,
    /// Estimated absolute error of each value.
    pub abs_error: Vec<f64>,
}

impl PmfCumulants {
    /// `κ^{(j)}`, one-based.
    pub fn get(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    /// True when cancellation may have destroyed more than 1e-4 of the value.
    pub fn flagged(&self, j: usize) -> bool {
        self.abs_error[j - 1] > 1e-4 * self.values[j - 1].abs()
    }
}

/// Moments about the mean, then the moment-to-cumulant recursion
/// `μ_m = Σ_{k=1}^{m} C(m−1, k−1) κ_k μ_{m−k}`.
pub fn pmf_cumulants(pmf: &LatticePmf, r_max: usize) -> Result<PmfCumulants> {
    if pmf.dim != 1 {
        return Err(invalid("cumulants of one-dimensional laws only"));
    }
    if r_max < 1 {
        return Err(invalid("r_max must be at least 1"));
    }
    if r_max > PMF_CUMULANT_CAP {
        return Err(Error::TooLarge { what: "pmf cumulant order", size: r_max as u64, cap: PMF_CUMULANT_CAP as u64 });
    }
    let mu = pmf.central_moments(r_max);
    let nu = pmf.absolute_central_moments(r_max);
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let mut kappa = vec![0.0; r_max + 1];
    let mut size = vec![0.0; r_max + 1];
    kappa[1] = 0.0;
    for m in 2..=r_max {
        let mut k = mu[m];
        let mut s = nu[m];
        for j in 2..m {
            let c = binom(m - 1, j - 1);
            k -= c * kappa[j] * mu[m - j];
            s += c * size[j] * nu[m - j];
        }
        kappa[m] = k;
        size[m] = s;
    }
    let eps = 64.0 * f64::EPSILON * (pmf.len() as f64).sqrt().max(1.0);
    let mean = pmf.mean();
    let mut values = vec![mean];
    let mut abs_error = vec![eps * (mean.abs() + nu[1])];
    for m in 2..=r_max {
        values.push(kappa[m]);
        abs_error.push(eps * size[m]);
    }
    Ok(PmfCumulants { values, abs_error })
}

/// Mixed moments are sums over index tuples; this rebuilds `κ^{(2r)}(M_n)`
/// from joint spin cumulants at a given `x`.
pub fn multilinear_magnetization_cumulant(n: u64, order: usize, x: &BigRational) -> Result<BigRational> {
    if order % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let mut total = BigRational::zero();
    // Only sorted tuples are evaluated; each carries its number of orderings.
    let mut idx = vec![1u64; order];
    let fact = |k: usize| -> BigInt { (1..=k as u64).map(BigInt::from).product() };
    loop {
        let mut mult = fact(order);
        let mut run = 1;
        for w in idx.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                mult /= fact(run);
                run = 1;
            }
        }
        mult /= fact(run);
        let value = joint_cumulant_spins(&idx)?.eval(x);
        total += value * BigRational::from_integer(mult);
        // Next non-decreasing tuple.
        let mut p = order;
        loop {
            if p == 0 {
                return Ok(total);
            }
            p -= 1;
            if idx[p] < n {
                let v = idx[p] + 1;
                for q in idx.iter_mut().skip(p) {
                    *q = v;
                }
                break;
            }
        }
    }
}
