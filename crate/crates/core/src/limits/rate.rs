use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use super::kernel::SmoothingKernel;
use super::kolmogorov::{kolmogorov_continuous, kolmogorov_lattice, quartic_limit_cdf, TabulatedCdf};
use crate::error::{invalid, Result};
use crate::modgauss::{l1_mod_distance, residue_integral, Horizon, ModGaussDescriptor, ResidueKind};
use crate::numerics::{fourier_transform, integrate_line, integrate_panels, quartic_mass, KahanSum, QuadratureConfig};
use crate::spin_models::{cw_magnetization_pmf, LatticePmf};

/// Default band half-width `b` in the Fourier decay estimate.
pub const DEFAULT_BAND: f64 = 0.77;
/// Default smoothing scale `D`, with `ε = 1/(D √n)`.
pub const DEFAULT_SCALE: f64 = 0.77;

/// Sup of the critical limit density, `1/I_∞ = 2/(12^{1/4} Γ(1/4))`.
pub fn quartic_density_bound() -> f64 {
    1.0 / quartic_mass()
}

/// Kolmogorov bound from a smoothed comparison: if test functions of width
/// `ε` separate the two laws by at most `Bε` and one law has density at most
/// `m`, the distance is at most `2(B + 10m)ε`.
pub fn smoothing_lemma_bound(b: f64, m: f64, epsilon: f64) -> f64 {
    2.0 * (b + 10.0 * m) * epsilon
}

/// `K(b) = 2 e^{13b⁴/12} (2√3 b + I_∞)`, the prefactor in
/// `|ψ̂_n(ξ)| ≲ K(b) e^{−b|ξ|}` for the critical Curie-Weiss residue.
pub fn fourier_decay_k(b: f64) -> f64 {
    2.0 * (13.0 * b.powi(4) / 12.0).exp() * (2.0 * 3f64.sqrt() * b + quartic_mass())
}

/// `ψ̂_n(ξ) = ∫ ψ_n(x) e^{iξx} dx` by quadrature.
pub fn psi_hat(desc: &ModGaussDescriptor, n: u64, xi: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if desc.dim != 1 {
        return Err(invalid("transforms are computed for one-dimensional residues"));
    }
    let r = desc.at(n)?;
    fourier_transform(|x| r.psi_n1(x), xi, cfg)
}

/// `max |ψ̂_n(ξ)| e^{b|ξ|} / K(b)` over `ξ = 0, step, …, xi_max` (both signs
/// for asymmetric residues).
pub fn fourier_decay_ratio(desc: &ModGaussDescriptor, n: u64, b: f64, xi_max: f64, step: f64) -> Result<f64> {
    let cfg = QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-13, ..Default::default() };
    let r = desc.at(n)?;
    let count = (xi_max / step).round() as i64;
    let lo = if desc.is_symmetric() { 0 } else { -count };
    let k = fourier_decay_k(b);
    let mut best = 0.0_f64;
    for j in lo..=count {
        let xi = j as f64 * step;
        let v = fourier_transform(|x| r.psi_n1(x), xi, &cfg)?.norm();
        best = best.max(v * (b * xi.abs()).exp() / k);
    }
    Ok(best)
}

/// Coefficient of `n^{−1/2}` in the smoothing part of the certificate,
/// `(2/I_∞)(K(b)/(π(b − D/2)) + 10/D)`.
pub fn smoothing_coefficient(b: f64, d: f64) -> Result<f64> {
    if !(d > 0.0 && d < 2.0 * b) {
        return Err(invalid(format!("need 0 < D < 2b, got b = {b}, D = {d}")));
    }
    Ok(2.0 / quartic_mass() * (fourier_decay_k(b) / (PI * (b - d / 2.0)) + 10.0 / d))
}

/// Kolmogorov rate bound for the critical Curie-Weiss magnetization, with
/// the distance it bounds measured on the exact law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCertificate {
    pub n: u64,
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub smoothing_term: f64,
    pub l1_term: f64,
    pub total_bound: f64,
    pub measured_dkol: f64,
}

impl RateCertificate {
    pub fn holds(&self) -> bool {
        self.measured_dkol <= self.total_bound
    }

    pub fn ratio(&self) -> f64 {
        self.measured_dkol / self.total_bound
    }
}

/// Law of `M_n / n^{3/4}` under the critical Curie-Weiss measure.
pub fn critical_cw_law(n: u64) -> Result<LatticePmf> {
    Ok(cw_magnetization_pmf(n, 0.0, 1.0)?.scaled((n as f64).powf(-0.75)))
}

pub fn rate_certificate(n: u64, b: f64, d: f64) -> Result<RateCertificate> {
    let coef = smoothing_coefficient(b, d)?;
    let cfg = QuadratureConfig::default();
    let desc = ModGaussDescriptor::new(ResidueKind::FairSpins);
    let smoothing_term = coef / (n as f64).sqrt();
    let l1_term = l1_mod_distance(&desc, n, &cfg)? / quartic_mass();
    let limit = quartic_limit_cdf()?;
    let measured_dkol = kolmogorov_lattice(&critical_cw_law(n)?, |x| limit.cdf(x));
    Ok(RateCertificate { n, b, d, smoothing_term, l1_term, total_bound: smoothing_term + l1_term, measured_dkol })
}

/// CSV ladder with columns `n, bound, measured, ratio`.
pub fn write_rate_ladder_csv<W: Write>(certs: &[RateCertificate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "bound", "measured", "ratio"])?;
    for c in certs {
        w.write_record([c.n.to_string(), c.total_bound.to_string(), c.measured_dkol.to_string(), c.ratio().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `(n^{1/2} P[n^{−1/4} M_n ∈ [a, b]], (b − a)/I_∞)` under the critical
/// Curie-Weiss measure; `(0, 0)` when `a > b`.
pub fn local_limit_check(n: u64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("interval must be bounded"));
    }
    if a > b {
        return Ok((0.0, 0.0));
    }
    let law = cw_magnetization_pmf(n, 0.0, 1.0)?.scaled((n as f64).powf(-0.25));
    Ok(((n as f64).sqrt() * law.mass_between(a, b), (b - a) / quartic_mass()))
}

/// Modulus of the characteristic function of a lattice law.
pub fn lattice_char_abs(law: &LatticePmf, xi: f64) -> f64 {
    let (mut re, mut im) = (KahanSum::default(), KahanSum::default());
    for (k, lp) in law.log_probs.iter().enumerate() {
        if *lp == f64::NEG_INFINITY {
            continue;
        }
        let (s, c) = (xi * law.value(k)).sin_cos();
        let p = lp.exp();
        re.add(p * c);
        im.add(p * s);
    }
    re.value().hypot(im.value())
}

/// `sup |E[e^{iξ M_n/n^{3/4}}]| e^{(k/2)|ξ|}` over `|ξ| ≤ min(30, k n^{1/2})`
/// on a grid of step `0.05`, under the critical Curie-Weiss measure.
pub fn h3_domination_check(n: u64, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(invalid(format!("k must be positive, got {k}")));
    }
    let law = critical_cw_law(n)?;
    let xi_max = (k * (n as f64).sqrt()).min(30.0);
    let count = (xi_max / 0.05).floor() as usize;
    let mut best = 0.0_f64;
    for j in 0..=count {
        let xi = j as f64 * 0.05;
        best = best.max(lattice_char_abs(&law, xi) * (0.5 * k * xi).exp());
    }
    Ok(best)
}

/// `(d_Kol(ψ_n/I_n, ψ/I_∞), ‖ψ − ψ_n‖₁ / I_∞)` for a one-dimensional
/// descriptor, both from quadrature of the two densities.
pub fn residue_kolmogorov_check(desc: &ModGaussDescriptor, n: u64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if desc.dim != 1 || !desc.limit_integrable() {
        return Err(invalid("needs a one-dimensional integrable residue"));
    }
    let r = desc.at(n)?;
    let i_n = integrate_line(|t| r.psi_n1(t), cfg)?;
    let i_inf = residue_integral(desc, Horizon::Infinite, cfg)?;
    let finite = TabulatedCdf::on_line(move |t| r.psi_n1(t) / i_n, cfg)?;
    let limit_desc = desc.clone();
    let limit = TabulatedCdf::on_line(move |t| limit_desc.psi(&[t]) / i_inf, cfg)?;
    let l = finite.hi().max(limit.hi());
    let dkol = kolmogorov_continuous(|x| finite.cdf(x), |x| limit.cdf(x), -l, l, 1e-2)?;
    Ok((dkol, l1_mod_distance(desc, n, cfg)? / i_inf))
}

/// `sup_a |E φ_ε(V − a) − E φ_ε(W − a)|` over a grid of `a` with step
/// `a_step`, for a lattice law `V` and a law `W` with tabulated cdf.
pub fn smoothed_gap(kernel: &SmoothingKernel, v: &LatticePmf, w: &TabulatedCdf, a_max: f64, a_step: f64) -> Result<f64> {
    let cfg = QuadratureConfig { abs_tol: 1e-12, rel_tol: 1e-10, ..Default::default() };
    let probs: Vec<(f64, f64)> =
        v.log_probs.iter().enumerate().filter(|(_, lp)| lp.is_finite()).map(|(k, lp)| (v.value(k), lp.exp())).collect();
    let breaks: Vec<f64> = (0..=64).map(|i| w.lo() + (w.hi() - w.lo()) * i as f64 / 64.0).collect();
    let count = (a_max / a_step).round() as i64;
    let mut best = 0.0_f64;
    for j in -count..=count {
        let a = j as f64 * a_step;
        let ev: KahanSum = probs.iter().map(|&(x, p)| p * kernel.phi(x - a)).collect();
        let ew = integrate_panels(|x| w.density(x) * kernel.phi(x - a), &breaks, &cfg)?;
        best = best.max((ev.value() - ew).abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::build_kernel;
    use crate::numerics::{gamma, quartic_l1_constant};

    #[test]
    fn smoothing_lemma_bound_is_linear() {
        assert_eq!(smoothing_lemma_bound(0.0, 0.0, 0.3), 0.0);
        let m = quartic_density_bound();
        assert!((m - 2.0 / (12f64.powf(0.25) * gamma(0.25))).abs() < 1e-15);
        let one = smoothing_lemma_bound(1.5, m, 0.01);
        assert!((smoothing_lemma_bound(1.5, m, 0.03) - 3.0 * one).abs() < 1e-15);
        assert!((one - 2.0 * (1.5 + 10.0 * m) * 0.01).abs() < 1e-16);
    }

    #[test]
    fn decay_prefactor() {
        assert!((fourier_decay_k(0.0) - 2.0 * quartic_mass()).abs() < 1e-14);
        assert!((fourier_decay_k(0.77) - 17.683).abs() < 1e-3);
    }

    #[test]
    fn transform_at_the_origin_is_the_mass() {
        let desc = ModGaussDescriptor::new(ResidueKind::FairSpins);
        let cfg = QuadratureConfig::default();
        let i_n = residue_integral(&desc, Horizon::Finite(1000), &cfg).unwrap();
        let v = psi_hat(&desc, 1000, 0.0, &cfg).unwrap();
        assert!((v.re - i_n).abs() < 1e-9 && v.im.abs() < 1e-12);
        // Modulus bound at b = 0.
        assert!(fourier_decay_ratio(&desc, 1000, 0.0, 10.0, 0.5).unwrap() <= i_n / fourier_decay_k(0.0) + 1e-9);
    }

    #[test]
    fn smoothing_coefficient_at_default_constants() {
        let c = smoothing_coefficient(DEFAULT_BAND, DEFAULT_SCALE).unwrap();
        assert!((c - 16.36).abs() < 0.01, "{c}");
        // 10.27 is what one gets by dividing by I_∞ once more inside the
        // bracket and using b in place of D.
        let k = fourier_decay_k(0.77);
        let i = quartic_mass();
        let other = 2.0 / i * (2.0 * k / (i * PI * 0.77) + 10.0 / 0.77);
        assert!((other - 10.2668).abs() < 1e-3);
        assert!(smoothing_coefficient(0.5, 1.0).is_err());
        assert!(smoothing_coefficient(0.5, 0.0).is_err());
    }

    #[test]
    fn certificate_fields_and_ladder() {
        let c = rate_certificate(400, DEFAULT_BAND, DEFAULT_SCALE).unwrap();
        assert!(c.holds());
        assert!((c.total_bound - c.smoothing_term - c.l1_term).abs() < 1e-15);
        assert!((c.l1_term * 20.0 / quartic_l1_constant() - 1.0).abs() < 0.05);
        assert!((c.measured_dkol * 20.0 - 0.0987).abs() < 5e-4, "{}", c.measured_dkol * 20.0);
        let json = serde_json::to_value(&c).unwrap();
        for key in ["n", "b", "D", "smoothing_term", "l1_term", "total_bound", "measured_dkol"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let mut buf = Vec::new();
        write_rate_ladder_csv(&[c.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,bound,measured,ratio\n400,"));
        assert!(rate_certificate(400, 0.3, 0.7).is_err());
    }

    #[test]
    fn local_limit_symmetry_and_empty() {
        assert_eq!(local_limit_check(1001, 1.0, 0.5).unwrap(), (0.0, 0.0));
        let (half, r1) = local_limit_check(1001, 0.0, 0.8).unwrap();
        let (full, r2) = local_limit_check(1001, -0.8, 0.8).unwrap();
        // Odd n puts no atom at 0, so the two halves are exact mirror images.
        assert!((full - 2.0 * half).abs() < 1e-13);
        assert!((r2 - 2.0 * r1).abs() < 1e-15);
    }

    #[test]
    fn h3_at_the_origin_and_stable() {
        let at_zero = critical_cw_law(50).map(|l| lattice_char_abs(&l, 0.0)).unwrap();
        assert!((at_zero - 1.0).abs() < 1e-15);
        let a = h3_domination_check(1000, 0.77).unwrap();
        let b = h3_domination_check(4000, 0.77).unwrap();
        assert!(a.is_finite() && a >= 1.0);
        assert!((a / b - 1.0).abs() < 0.1, "{a} {b}");
    }

    #[test]
    fn residue_distance_is_dominated() {
        let desc = ModGaussDescriptor::new(ResidueKind::FairSpins);
        let cfg = QuadratureConfig::default();
        for n in [100, 1000] {
            let (d, bound) = residue_kolmogorov_check(&desc, n, &cfg).unwrap();
            assert!(d > 0.0 && d <= (1.0 + 1e-6) * bound, "{n}: {d} {bound}");
        }
    }

    #[test]
    fn smoothing_lemma_on_exact_data() {
        // With B measured from the kernel, the lemma's bound dominates the
        // measured distance.
        let n = 100u64;
        let eps = 1.0 / (DEFAULT_SCALE * (n as f64).sqrt());
        let kernel = build_kernel(eps).unwrap();
        let law = critical_cw_law(n).unwrap();
        let limit = quartic_limit_cdf().unwrap();
        let gap = smoothed_gap(&kernel, &law, &limit, 4.0, 0.05).unwrap();
        let bound = smoothing_lemma_bound(gap / eps, quartic_density_bound(), eps);
        let d = kolmogorov_lattice(&law, |x| limit.cdf(x));
        assert!(d <= bound, "{d} {bound}");
    }
}
