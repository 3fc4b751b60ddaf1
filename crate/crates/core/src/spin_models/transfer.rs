use num_complex::Complex64;

use super::{ModelSpec, Variant};
use crate::error::{invalid, Error, Result};
use crate::numerics::log_sum_exp;

/// Spectral data of the 2x2 transfer matrix and the first three
/// derivatives of `ln λ₊` in the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferData {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub m_bar: f64,
    pub sigma2: f64,
    pub k3: f64,
}

pub fn transfer_eigen(alpha: f64, beta: f64) -> TransferData {
    let (sh, ch) = (alpha.sinh(), alpha.cosh());
    let (eb, emb) = (beta.exp(), (-beta).exp());
    let rad = eb * eb * sh * sh + emb * emb;
    let s = rad.sqrt();
    let lambda_plus = eb * ch + s;
    // λ₊ λ₋ = det T = 2 sinh 2β, which avoids cancellation in λ₋.
    let lambda_minus = 2.0 * (2.0 * beta).sinh() / lambda_plus;
    let q = eb * sh * sh + emb;
    let a_plus = ch + q / s;
    // a₋ = cosh α − q/s rewritten without cancellation.
    let a_minus = 4.0 * sh * sh * beta.sinh().powi(2) / (s * (ch * s + q));
    TransferData {
        lambda_plus,
        lambda_minus,
        a_plus,
        a_minus,
        m_bar: eb * sh / s,
        sigma2: emb * ch / (rad * s),
        k3: -(2.0 * eb * sh.powi(3) + (3.0 * eb - (-3.0 * beta).exp()) * sh) / (rad * rad * s),
    }
}

fn ising_ln_z(alpha: f64, beta: f64, n: u64) -> f64 {
    let td = transfer_eigen(alpha, beta);
    let k = (n - 1) as f64;
    let ratio = if n == 1 { 1.0 } else { (td.lambda_minus / td.lambda_plus).powf(k) };
    td.a_plus.ln() + k * td.lambda_plus.ln() + (td.a_minus / td.a_plus * ratio).ln_1p()
}

/// `ln Z_n` for the chosen model. Walk laws are already normalized.
pub fn ln_partition_function(spec: &ModelSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    match spec.variant {
        Variant::Ising1d => Ok(ising_ln_z(spec.alpha, spec.beta, n)),
        Variant::CurieWeiss => {
            let nf = n as f64;
            let terms: Vec<f64> = (0..=n)
                .map(|j| {
                    let m = 2.0 * j as f64 - nf;
                    crate::numerics::ln_binomial(n, j) + spec.alpha * m + spec.beta * m * m / (2.0 * nf)
                })
                .collect();
            log_sum_exp(&terms)
        }
        Variant::MixedCwIsing => {
            let base = super::ising_magnetization_pmf(n, spec.alpha, spec.beta)?;
            let nf = n as f64;
            let terms: Vec<f64> = base
                .log_probs
                .iter()
                .enumerate()
                .map(|(k, lp)| {
                    let m = base.value(k);
                    lp + spec.gamma * m * m / (2.0 * nf)
                })
                .collect();
            Ok(ising_ln_z(spec.alpha, spec.beta, n) + log_sum_exp(&terms)?)
        }
        Variant::RandomWalk => Ok(0.0),
    }
}

/// `ln E[e^{t M_n}]` for the Ising chain, real argument.
pub fn ising_log_laplace(alpha: f64, beta: f64, n: u64, t: f64) -> f64 {
    ising_ln_z(alpha + t, beta, n) - ising_ln_z(alpha, beta, n)
}

fn complex_ln_z(alpha: Complex64, beta: f64, n: u64) -> Result<Complex64> {
    let (sh, ch) = (alpha.sinh(), alpha.cosh());
    let (eb, emb) = (beta.exp(), (-beta).exp());
    let rad = sh * sh * (eb * eb) + emb * emb;
    if rad.re <= 0.0 {
        return Err(Error::BranchCut(rad.re));
    }
    let s = rad.sqrt();
    let lp = ch * eb + s;
    let lm = Complex64::new(2.0 * (2.0 * beta).sinh(), 0.0) / lp;
    let q = sh * sh * eb + emb;
    let ap = ch + q / s;
    let am = sh * sh * (4.0 * beta.sinh().powi(2)) / (s * (ch * s + q));
    let k = (n - 1) as f64;
    let ratio = if n == 1 { Complex64::new(1.0, 0.0) } else { (lm / lp).powf(k) };
    Ok(ap.ln() + lp.ln() * k + (am / ap * ratio + 1.0).ln())
}

/// `ln E[e^{z M_n}]` for complex `z`, on the principal branch.
pub fn ising_laplace(alpha: f64, beta: f64, n: u64, z: Complex64) -> Result<Complex64> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let base = Complex64::new(ising_ln_z(alpha, beta, n), 0.0);
    Ok(complex_ln_z(Complex64::new(alpha, 0.0) + z, beta, n)? - base)
}

/// Variance and third cumulant per site, `(σ², K₃)`, for a non-zero field.
pub fn ising_mod_params(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if alpha == 0.0 {
        return Err(invalid("zero field is the quartic regime; use ising_alpha0_mod_params"));
    }
    let td = transfer_eigen(alpha, beta);
    Ok((td.sigma2, td.k3))
}

/// Zero-field variance per site and the quartic coefficient of the residue.
pub fn ising_alpha0_mod_params(beta: f64) -> (f64, f64) {
    let e2 = (2.0 * beta).exp();
    (e2, (3.0 * (6.0 * beta).exp() - e2) / 24.0)
}
