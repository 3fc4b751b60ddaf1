use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances shared by every quadrature routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: u32,
    /// Below this magnitude an integrand is treated as having decayed.
    pub truncation_floor: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_depth: 40,
            truncation_floor: 1e-16,
        }
    }
}

impl QuadratureConfig {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Kronrod panel: (integral, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let err = ((kron - gauss) * h).abs();
    (kron * h, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

const MAX_PANELS: usize = 200_000;

/// Globally adaptive Gauss-Kronrod quadrature over a list of initial panels.
fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    // Panels that may not be split further are retired here.
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        total += v;
        total_err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, err: e, depth: 0 });
    }
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        let Some(p) = heap.pop() else {
            return Err(Error::NonConvergence { estimate: total, error_estimate: total_err });
        };
        if p.depth >= cfg.max_depth || heap.len() >= MAX_PANELS {
            frozen_value += p.value;
            frozen_err += p.err;
            if heap.is_empty() || heap.len() >= MAX_PANELS {
                let rest: f64 = heap.iter().map(|q| q.value).sum();
                let rest_err: f64 = heap.iter().map(|q| q.err).sum();
                return Err(Error::NonConvergence {
                    estimate: frozen_value + rest,
                    error_estimate: frozen_err + rest_err,
                });
            }
            continue;
        }
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, value: v1, err: e1, depth: p.depth + 1 });
        heap.push(Panel { a: m, b: p.b, value: v2, err: e2, depth: p.depth + 1 });
        if total_err < 0.0 {
            // Cancellation in the running sum; rebuild it exactly.
            total_err = heap.iter().map(|q| q.err).sum::<f64>() + frozen_err;
            total = heap.iter().map(|q| q.value).sum::<f64>() + frozen_value;
        }
    }
}

/// Single 15-point Kronrod panel over `[a, b]`: (integral, error estimate).
pub fn kronrod_panel<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> (f64, f64) {
    gk15(&mut f, a, b)
}

/// Nodes and weights of the 15-point Kronrod rule repeated on `panels`
/// equal pieces of `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(15 * panels);
    for p in 0..panels {
        let c = a + width * (p as f64 + 0.5);
        let h = 0.5 * width;
        for j in 0..7 {
            out.push((c - h * XGK[j], h * WGK[j]));
            out.push((c + h * XGK[j], h * WGK[j]));
        }
        out.push((c, h * WGK[7]));
    }
    out
}

/// Adaptive quadrature of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("bounds must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, cfg).map(|v| -v);
    }
    adaptive(&mut f, &[a, b], cfg)
}

/// Adaptive quadrature over a caller-supplied partition.
pub fn integrate_panels<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    if breaks.len() < 2 {
        return Err(Error::Empty);
    }
    adaptive(&mut f, breaks, cfg)
}

const MAX_EXTENT: f64 = 1e8;

/// Half-width beyond which `f` is negligible: doubles until both endpoints
/// fall under the truncation floor and the crude tail estimate (endpoint
/// value times last panel width times 10) is under `abs_tol`.
pub fn decay_extent<F: FnMut(f64) -> f64>(f: &mut F, cfg: &QuadratureConfig) -> Result<f64> {
    let mut l = 1.0;
    while l <= MAX_EXTENT {
        let edge = f(l).abs().max(f(-l).abs());
        let tail = edge * (0.5 * l) * 10.0;
        if edge < cfg.truncation_floor && tail < cfg.abs_tol {
            return Ok(l);
        }
        l *= 2.0;
    }
    Err(Error::NoDecay { reached: l / 2.0 })
}

/// Symmetric geometric breakpoints -l, -l/2, ..., -1, 0, 1, ..., l.
fn geometric_breaks(l: f64, max_width: f64) -> Vec<f64> {
    let mut pos = vec![0.0];
    let mut x = 1.0_f64.min(l);
    while x <= l {
        pos.push(x);
        if x == l {
            break;
        }
        x = (2.0 * x).min(l);
    }
    let mut fine = vec![0.0];
    for w in pos.windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            fine.push(w[0] + (w[1] - w[0]) * k as f64 / pieces as f64);
        }
    }
    let mut out: Vec<f64> = fine.iter().rev().map(|x| -x).collect();
    out.extend_from_slice(&fine[1..]);
    out
}

/// Integral of `f` over the whole real line, truncated where it has decayed.
pub fn integrate_line<F: FnMut(f64) -> f64>(mut f: F, cfg: &QuadratureConfig) -> Result<f64> {
    let l = decay_extent(&mut f, cfg)?;
    adaptive(&mut f, &geometric_breaks(l, f64::INFINITY), cfg)
}

/// `∫ f(x) e^{i ξ x} dx` over the real line.
pub fn fourier_transform<F: FnMut(f64) -> f64>(mut f: F, xi: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let l = decay_extent(&mut f, cfg)?;
    let width = if xi == 0.0 { f64::INFINITY } else { std::f64::consts::PI / xi.abs() };
    let breaks = geometric_breaks(l, width);
    let re = adaptive(&mut |x| f(x) * (xi * x).cos(), &breaks, cfg)?;
    let im = adaptive(&mut |x| f(x) * (xi * x).sin(), &breaks, cfg)?;
    Ok(Complex64::new(re, im))
}

/// Iterated whole-space integral in dimension 1, 2 or 3.
pub fn integrate_space<F: Fn(&[f64]) -> f64>(f: F, dim: usize, cfg: &QuadratureConfig) -> Result<f64> {
    fn rec<F: Fn(&[f64]) -> f64>(f: &F, point: &mut Vec<f64>, left: usize, cfg: &QuadratureConfig) -> Result<f64> {
        if left == 0 {
            return Ok(f(point));
        }
        let mut failure = None;
        let inner = cfg.with_abs_tol(cfg.abs_tol * 1e-2);
        let out = integrate_line(
            |x| {
                point.push(x);
                let v = rec(f, point, left - 1, &inner).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    0.0
                });
                point.pop();
                v
            },
            cfg,
        );
        match failure {
            Some(e) => Err(e),
            None => out,
        }
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension {dim} not in 1..=3")));
    }
    rec(&f, &mut Vec::with_capacity(dim), dim, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let cfg = QuadratureConfig::default();
        let a = integrate(f64::sin, 0.0, 1.0, &cfg).unwrap();
        let b = integrate(f64::sin, 1.0, 0.0, &cfg).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn gaussian_line() {
        let v = integrate_line(|x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt(), &QuadratureConfig::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn no_decay_is_reported() {
        let r = integrate_line(|x| 1.0 / (1.0 + x * x), &QuadratureConfig::default());
        assert!(matches!(r, Err(Error::NoDecay { .. })));
    }

    #[test]
    fn depth_exhaustion_reports_estimate() {
        let cfg = QuadratureConfig { max_depth: 2, abs_tol: 1e-14, ..Default::default() };
        match integrate(|x: f64| x.abs().sqrt().recip(), 1e-300, 1.0, &cfg) {
            Err(Error::NonConvergence { estimate, error_estimate }) => {
                assert!(estimate.is_finite() && error_estimate > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
