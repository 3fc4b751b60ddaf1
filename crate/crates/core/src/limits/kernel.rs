use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numerics::{composite_rule, fourier_transform, integrate, integrate_panels, KahanSum, QuadratureConfig};

/// Half-width of the tabulated window of the unit kernel.
pub const KERNEL_WINDOW: f64 = 60.0;
/// Grid step of the tabulation.
pub const KERNEL_STEP: f64 = 1e-3;
/// Beyond this point the unit density is treated as zero (its mass there is
/// below `1e-15`).
const KERNEL_HORIZON: f64 = 1000.0;
const RULE_PANELS: usize = 128;
const OUTER_STEP: f64 = 1.0 / 64.0;
// Rotation recurrences along the grid are re-anchored this often.
const RESYNC: usize = 512;

/// The bump `e^{−1/(1−4ξ²)}` on `(−1/2, 1/2)`, zero outside.
pub fn upsilon(xi: f64) -> f64 {
    let u = 1.0 - 4.0 * xi * xi;
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Second derivative of [`upsilon`].
pub fn upsilon_second(xi: f64) -> f64 {
    let u = 1.0 - 4.0 * xi * xi;
    if u <= 0.0 {
        return 0.0;
    }
    let g = (-1.0 / u).exp();
    if g == 0.0 {
        return 0.0;
    }
    let d1 = -8.0 * xi / (u * u);
    let d2 = (-8.0 * u - 128.0 * xi * xi) / (u * u * u);
    g * (d1 * d1 + d2)
}

/// Hermite table of a density on `start + step·k`, with upper tail masses.
#[derive(Debug, Clone)]
struct HermiteTable {
    start: f64,
    step: f64,
    val: Vec<f64>,
    der: Vec<f64>,
    // ∫_{x_k}^∞ of the density.
    upper: Vec<f64>,
}

impl HermiteTable {
    /// Tabulates `(Σ w cos(xξ))² / norm` and its derivative by rotation
    /// recurrences; `beyond` is the mass to the right of the last node.
    fn build(rule: &[(f64, f64)], norm: f64, start: f64, step: f64, cells: usize, beyond: f64) -> Self {
        let mut sum = vec![0.0; cells + 1];
        let mut dsum = vec![0.0; cells + 1];
        for &(xi, w) in rule {
            let (sh, ch) = (step * xi).sin_cos();
            let (mut s, mut c) = (0.0, 1.0);
            for k in 0..=cells {
                if k % RESYNC == 0 {
                    (s, c) = ((start + k as f64 * step) * xi).sin_cos();
                }
                sum[k] += w * c;
                dsum[k] -= w * xi * s;
                (s, c) = (s * ch + c * sh, c * ch - s * sh);
            }
        }
        let val: Vec<f64> = sum.iter().map(|r| r * r / norm).collect();
        let der: Vec<f64> = sum.iter().zip(&dsum).map(|(r, d)| 2.0 * r * d / norm).collect();
        let mut upper = vec![0.0; cells + 1];
        let mut acc = KahanSum::default();
        acc.add(beyond);
        upper[cells] = beyond;
        for k in (0..cells).rev() {
            acc.add(step * (val[k] + val[k + 1]) / 2.0 + step * step * (der[k] - der[k + 1]) / 12.0);
            upper[k] = acc.value();
        }
        HermiteTable { start, step, val, der, upper }
    }

    fn end(&self) -> f64 {
        self.start + self.step * (self.val.len() - 1) as f64
    }

    fn cell(&self, x: f64) -> (usize, f64) {
        let pos = (x - self.start) / self.step;
        let k = (pos.floor().max(0.0) as usize).min(self.val.len() - 2);
        (k, pos - k as f64)
    }

    fn value(&self, x: f64) -> f64 {
        let (k, s) = self.cell(x);
        let h = self.step;
        let (f0, f1, d0, d1) = (self.val[k], self.val[k + 1], self.der[k], self.der[k + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * h * d1
    }

    fn upper_mass(&self, x: f64) -> f64 {
        let (k, s) = self.cell(x);
        let h = self.step;
        let (f0, f1, d0, d1) = (self.val[k], self.val[k + 1], self.der[k], self.der[k + 1]);
        // ∫_s^1 of the Hermite basis, in cell units.
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let a00 = 0.5 - (s4 / 2.0 - s3 + s);
        let a10 = 1.0 / 12.0 - (s4 / 4.0 - 2.0 * s3 / 3.0 + s2 / 2.0);
        let a01 = 0.5 - (-s4 / 2.0 + s3);
        let a11 = -1.0 / 12.0 - (s4 / 4.0 - s3 / 3.0);
        self.upper[k + 1] + h * (a00 * f0 + a10 * h * d0 + a01 * f1 + a11 * h * d1)
    }
}

/// Smoothing density `ρ_ε(x) = ρ(x/ε)/ε`, with `ρ = ρ*² / ∫ρ*²` and `ρ*` the
/// inverse Fourier transform of [`upsilon`], together with the decreasing
/// function `φ_ε(x) = ∫_x^∞ ρ_ε`.
///
/// The unit kernel is tabulated on `[0, 60]` with step `1e-3` (values and
/// derivatives, cubic Hermite interpolation). Beyond the window `ρ` comes
/// from the cosine sum and `φ` from a coarser table reaching 1000, past
/// which the kernel is treated as zero. `φ` is the exact integral of the
/// interpolant, so `phi(−∞) = rho_integral` is measured, not forced to one.
#[derive(Debug, Clone)]
pub struct SmoothingKernel {
    pub epsilon: f64,
    /// `∫ρ*²`, by Parseval from `υ`.
    pub rho_star_sq_integral: f64,
    /// `∫ρ` over the line, from the tabulated density.
    pub rho_integral: f64,
    // (ξ_j, w_j υ(ξ_j) / π) for the cosine sum on [0, 1/2].
    rule: Vec<(f64, f64)>,
    inner: HermiteTable,
    outer: HermiteTable,
}

/// Recomputed kernel constants, sampled on `K ∈ [1, 50]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConstants {
    pub rho_integral: f64,
    pub rho_star_sq_integral: f64,
    /// `(1/2π) ∫ |υ''|`, the constant in `|ρ*(K)| ≤ c/K²`.
    pub upsilon_second_l1: f64,
    pub sup_k2_rho_star: f64,
    pub sup_k4_rho: f64,
    pub sup_k3_phi: f64,
}

pub fn build_kernel(epsilon: f64) -> Result<SmoothingKernel> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("kernel width must be positive, got {epsilon}")));
    }
    let cfg = QuadratureConfig { abs_tol: 1e-15, rel_tol: 1e-14, ..Default::default() };
    let rho_star_sq_integral = integrate(|xi| upsilon(xi).powi(2), 0.0, 0.5, &cfg)? / PI;
    let rule: Vec<(f64, f64)> =
        composite_rule(0.0, 0.5, RULE_PANELS).into_iter().map(|(x, w)| (x, w * upsilon(x) / PI)).collect();
    let outer_cells = ((KERNEL_HORIZON - KERNEL_WINDOW) / OUTER_STEP).round() as usize;
    let outer = HermiteTable::build(&rule, rho_star_sq_integral, KERNEL_WINDOW, OUTER_STEP, outer_cells, 0.0);
    let cells = (KERNEL_WINDOW / KERNEL_STEP).round() as usize;
    let inner = HermiteTable::build(&rule, rho_star_sq_integral, 0.0, KERNEL_STEP, cells, outer.upper[0]);
    let rho_integral = 2.0 * inner.upper[0];
    Ok(SmoothingKernel { epsilon, rho_star_sq_integral, rho_integral, rule, inner, outer })
}

impl SmoothingKernel {
    /// `ρ*(x) = (1/2π) ∫ υ(ξ) e^{−ixξ} dξ`, from the cosine sum.
    pub fn rho_star(&self, x: f64) -> f64 {
        let s: KahanSum = self.rule.iter().map(|&(xi, w)| w * (x * xi).cos()).collect();
        s.value()
    }

    /// Unit-width density `ρ`.
    pub fn rho_unit(&self, x: f64) -> f64 {
        let x = x.abs();
        if x < self.inner.end() {
            self.inner.value(x)
        } else if x < KERNEL_HORIZON {
            let r = self.rho_star(x);
            r * r / self.rho_star_sq_integral
        } else {
            0.0
        }
    }

    /// Unit-width `φ(x) = ∫_x^∞ ρ`.
    pub fn phi_unit(&self, x: f64) -> f64 {
        if x < 0.0 {
            return self.rho_integral - self.upper_unit(-x);
        }
        self.upper_unit(x)
    }

    fn upper_unit(&self, x: f64) -> f64 {
        if x < self.inner.end() {
            self.inner.upper_mass(x)
        } else if x < KERNEL_HORIZON {
            self.outer.upper_mass(x)
        } else {
            0.0
        }
    }

    /// `ρ_ε(x)`.
    pub fn rho(&self, x: f64) -> f64 {
        self.rho_unit(x / self.epsilon) / self.epsilon
    }

    /// `φ_ε(x) = φ(x/ε)`.
    pub fn phi(&self, x: f64) -> f64 {
        self.phi_unit(x / self.epsilon)
    }

    /// Closed-form transform `ρ̂_ε(ξ) = (υ ∗ υ)(εξ) / (2π ∫ρ*²)`, supported in
    /// `[−1/ε, 1/ε]`.
    pub fn rho_hat(&self, xi: f64) -> f64 {
        let s = self.epsilon * xi;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let cfg = QuadratureConfig { abs_tol: 1e-15, rel_tol: 1e-12, ..Default::default() };
        let (lo, hi) = ((s - 0.5).max(-0.5), (s + 0.5).min(0.5));
        let conv = integrate(|eta| upsilon(eta) * upsilon(s - eta), lo, hi, &cfg).unwrap_or(f64::NAN);
        conv / (2.0 * PI * self.rho_star_sq_integral)
    }

    /// `ρ̂_ε(ξ)` by quadrature of the tabulated density.
    pub fn rho_hat_numeric(&self, xi: f64) -> Result<Complex64> {
        let cfg = QuadratureConfig { abs_tol: 1e-10, rel_tol: 1e-10, truncation_floor: 1e-13, ..Default::default() };
        fourier_transform(|x| self.rho(x), xi, &cfg)
    }

    /// `∫_{−K}^∞ φ(v) dv = ∫_0^∞ φ(u − K) du` for the unit kernel.
    pub fn phi_shift_integral(&self, k: f64) -> Result<f64> {
        let cfg = QuadratureConfig { abs_tol: 1e-12, rel_tol: 1e-12, ..Default::default() };
        let mut breaks = Vec::new();
        let mut x = -k;
        while x < KERNEL_WINDOW {
            breaks.push(x);
            x = (x.floor() + 1.0).min(KERNEL_WINDOW);
        }
        breaks.push(KERNEL_WINDOW);
        let inner = integrate_panels(|v| self.phi_unit(v), &breaks, &cfg)?;
        // ∫_W^∞ φ = ∫_W^∞ (v − W) ρ(v) dv.
        let far = integrate(|v| (v - KERNEL_WINDOW) * self.rho_unit(v), KERNEL_WINDOW, KERNEL_HORIZON, &cfg)?;
        Ok(inner + far)
    }

    /// Constants of the unit kernel: Parseval and tabulated masses, the `υ''`
    /// bound and the sampled suprema on `[1, 50]` with step `0.01`.
    pub fn constants(&self) -> Result<KernelConstants> {
        let cfg = QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-12, ..Default::default() };
        let upsilon_second_l1 =
            2.0 * integrate_panels(|x| upsilon_second(x).abs(), &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5], &cfg)? / (2.0 * PI);
        let (mut a, mut b, mut c) = (0.0_f64, 0.0_f64, 0.0_f64);
        for j in 0..=4900 {
            let k = 1.0 + 0.01 * j as f64;
            a = a.max(k * k * self.rho_star(k).abs());
            b = b.max(k.powi(4) * self.rho_unit(k));
            c = c.max(k.powi(3) * self.phi_unit(k));
        }
        Ok(KernelConstants {
            rho_integral: self.rho_integral,
            rho_star_sq_integral: self.rho_star_sq_integral,
            upsilon_second_l1,
            sup_k2_rho_star: a,
            sup_k4_rho: b,
            sup_k3_phi: c,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn unit() -> &'static SmoothingKernel {
        static K: OnceLock<SmoothingKernel> = OnceLock::new();
        K.get_or_init(|| build_kernel(1.0).unwrap())
    }

    #[test]
    fn masses_and_parseval() {
        let k = unit();
        assert!((k.rho_integral - 1.0).abs() < 1e-8, "{}", k.rho_integral);
        assert!((k.rho_star_sq_integral - 0.010_590_656_994_7).abs() < 1e-11);
        // Second route: ∫ρ*² over the line directly.
        let cfg = QuadratureConfig { abs_tol: 1e-15, rel_tol: 1e-12, ..Default::default() };
        let breaks: Vec<f64> = (0..=400).map(|j| j as f64).collect();
        let direct = 2.0 * integrate_panels(|x| k.rho_star(x).powi(2), &breaks, &cfg).unwrap();
        assert!((direct / k.rho_star_sq_integral - 1.0).abs() < 1e-9);
        assert!((k.phi_unit(0.0) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn interpolant_matches_direct_sum() {
        let k = unit();
        for x in [0.0, 0.0004, 1.2345, 7.77777, 33.3333, 59.9995] {
            let r = k.rho_star(x);
            let direct = r * r / k.rho_star_sq_integral;
            assert!((k.rho_unit(x) - direct).abs() < 1e-13, "{x}");
            assert_eq!(k.rho_unit(-x), k.rho_unit(x));
        }
    }

    #[test]
    fn phi_is_decreasing_with_the_right_limits() {
        let k = unit();
        let mut prev = k.phi_unit(-200.0);
        assert!((prev - 1.0).abs() < 1e-8);
        let mut x = -200.0;
        while x <= 200.0 {
            let v = k.phi_unit(x);
            assert!(v <= prev + 1e-15, "{x}");
            prev = v;
            x += 0.37;
        }
        assert!(k.phi_unit(200.0) < 1e-9);
        // Crossing the edge of the window is continuous.
        assert!((k.phi_unit(KERNEL_WINDOW - 1e-9) - k.phi_unit(KERNEL_WINDOW)).abs() < 1e-13);
    }

    #[test]
    fn phi_against_tail_quadrature() {
        let k = unit();
        let cfg = QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-12, ..Default::default() };
        for x in [0.3f64, 2.0, 11.5] {
            // Oracle: ∫_x^W of the cosine-sum density plus the far mass.
            let breaks: Vec<f64> = std::iter::once(x).chain((x.floor() as i64 + 1..=60).map(|j| j as f64)).collect();
            let body = integrate_panels(
                |t| {
                    let r = k.rho_star(t);
                    r * r / k.rho_star_sq_integral
                },
                &breaks,
                &cfg,
            )
            .unwrap();
            let oracle = body + k.outer.upper[0];
            assert!((k.phi_unit(x) - oracle).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn outer_tail_against_quadrature() {
        let k = unit();
        let cfg = QuadratureConfig { abs_tol: 1e-17, rel_tol: 1e-10, ..Default::default() };
        let breaks: Vec<f64> = (60..=1000).map(|j| j as f64).collect();
        let direct = integrate_panels(
            |t| {
                let r = k.rho_star(t);
                r * r / k.rho_star_sq_integral
            },
            &breaks,
            &cfg,
        )
        .unwrap();
        assert!((k.phi_unit(KERNEL_WINDOW) / direct - 1.0).abs() < 1e-8);
        assert!(direct > 1e-6 && direct < 1e-5);
        let at_100 = integrate_panels(|t| k.rho_unit(t), &breaks[40..], &cfg).unwrap();
        assert!((k.phi_unit(100.0) / at_100 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn constants_against_stated_bounds() {
        let c = unit().constants().unwrap();
        assert!((c.rho_star_sq_integral - 0.01059).abs() < 1e-4);
        assert!((c.upsilon_second_l1 - 1.016_592_333_885_6).abs() < 1e-9);
        assert!(c.sup_k2_rho_star <= 1.0166);
        assert!(c.sup_k4_rho <= 99.0);
        assert!(c.sup_k3_phi <= 33.0);
    }

    #[test]
    fn transform_is_band_limited() {
        let k = unit();
        assert!((k.rho_hat(0.0) - 1.0).abs() < 1e-10);
        assert_eq!(k.rho_hat(1.0), 0.0);
        for xi in [0.25, 0.8] {
            let num = k.rho_hat_numeric(xi).unwrap();
            assert!((num.re - k.rho_hat(xi)).abs() < 1e-8, "{xi}");
            assert!(num.im.abs() < 1e-8);
        }
        for xi in [1.1, 2.0, 3.5] {
            assert!(k.rho_hat_numeric(xi).unwrap().norm() <= 1e-6, "{xi}");
        }
    }

    #[test]
    fn width_scaling() {
        let unit = unit();
        let narrow = build_kernel(0.1).unwrap();
        for x in [-3.0, -0.5, 0.0, 0.7, 4.0] {
            assert_eq!(narrow.phi(0.1 * x), unit.phi_unit(x));
            assert!((narrow.rho(0.1 * x) - 10.0 * unit.rho_unit(x)).abs() < 1e-12);
        }
        assert!((narrow.rho_hat(5.0) - unit.rho_hat(0.5)).abs() < 1e-14);
        assert_eq!(narrow.rho_hat(10.5), 0.0);
        assert!(build_kernel(0.0).is_err());
    }

    #[test]
    fn shifted_phi_integral() {
        let k = unit();
        let kk = 132f64.powf(1.0 / 3.0);
        let v = k.phi_shift_integral(kk).unwrap();
        assert!(v <= kk + 4.82);
        // ∫_{−K}^∞ φ = K + ∫_0^∞ φ − ∫_0^K φ, and ∫_0^∞ φ = ∫_0^∞ v ρ(v) dv.
        let cfg = QuadratureConfig { abs_tol: 1e-12, rel_tol: 1e-12, ..Default::default() };
        let breaks: Vec<f64> = (0..=1000).map(|j| j as f64).collect();
        let first = integrate_panels(|x| x * k.rho_unit(x), &breaks, &cfg).unwrap();
        let head = integrate(|x| k.phi_unit(x), 0.0, kk, &cfg).unwrap();
        assert!((v - (kk + first - head)).abs() < 1e-8);
        assert!((first - 1.347_310_760_9).abs() < 1e-6);
    }
}
