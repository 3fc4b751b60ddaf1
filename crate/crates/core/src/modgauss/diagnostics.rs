use serde::Serialize;

use super::descriptor::{monomial_mass, FiniteResidue, ModGaussDescriptor, ResidueKind};
use super::tilt::walk_tilted_law;
use crate::error::{invalid, Error, Result};
use crate::numerics::{gamma, integrate, integrate_line, integrate_space, normal_tail, KahanSum, QuadratureConfig};
use crate::spin_models::LatticePmf;

/// Finite `n` or the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Finite(u64),
    Infinite,
}

/// `∫ ψ` of the planar walk limit, reduced to an angular integral:
/// `(√π / 4) ∫₀^{2π} √(96 / (1 + sin² 2θ)) dθ`.
fn planar_walk_mass(cfg: &QuadratureConfig) -> Result<f64> {
    let ang = integrate(|th: f64| (96.0 / (1.0 + (2.0 * th).sin().powi(2))).sqrt(), 0.0, 2.0 * std::f64::consts::PI, cfg)?;
    Ok(std::f64::consts::PI.sqrt() / 4.0 * ang)
}

/// `∫ ψ` of the spatial walk limit, `24 √(3) π Γ(5/4) Γ(1/4) / Γ(3/4)`.
fn spatial_walk_mass() -> f64 {
    let pi = std::f64::consts::PI;
    let j = gamma(0.25) * pi.sqrt() / (2.0 * gamma(0.75));
    48.0 * (3.0 * pi).sqrt() * gamma(1.25) * j
}

/// `I_n = ∫ ψ_n`, or `I_∞ = ∫ ψ`.
pub fn residue_integral(desc: &ModGaussDescriptor, horizon: Horizon, cfg: &QuadratureConfig) -> Result<f64> {
    match horizon {
        Horizon::Infinite => limit_mass(desc, cfg),
        Horizon::Finite(n) => {
            let r = desc.at(n)?;
            finite_mass(&r, cfg)
        }
    }
}

fn limit_mass(desc: &ModGaussDescriptor, cfg: &QuadratureConfig) -> Result<f64> {
    if !desc.limit_integrable() {
        return Err(Error::Unsupported("the limiting function is not integrable".into()));
    }
    if let Some((c, m)) = desc.limit_monomial() {
        return Ok(monomial_mass(c, m));
    }
    let (dim, shrink) = match &desc.kind {
        ResidueKind::Walk { dim } => (*dim, 1.0),
        ResidueKind::Subcritical { base, gamma } => match **base {
            ResidueKind::Walk { dim } => (dim, 1.0 - gamma),
            _ => unreachable!(),
        },
        _ => unreachable!(),
    };
    let base = if dim == 2 { planar_walk_mass(cfg)? } else { spatial_walk_mass() };
    Ok(base * shrink.powi(dim as i32))
}

fn finite_mass(r: &FiniteResidue, cfg: &QuadratureConfig) -> Result<f64> {
    if r.descriptor().dim == 1 {
        integrate_line(|t| r.psi_n1(t), cfg)
    } else {
        integrate_space(|t| r.psi_n(t), r.descriptor().dim, cfg)
    }
}

/// The law with density `ψ_n / I_n` (or `ψ / I_∞`).
#[derive(Debug, Clone)]
pub struct EllisNewmanLaw {
    desc: ModGaussDescriptor,
    residue: Option<FiniteResidue>,
    pub norm: f64,
}

impl EllisNewmanLaw {
    pub fn new(desc: &ModGaussDescriptor, horizon: Horizon, cfg: &QuadratureConfig) -> Result<Self> {
        let residue = match horizon {
            Horizon::Finite(n) => Some(desc.at(n)?),
            Horizon::Infinite => None,
        };
        let norm = match &residue {
            Some(r) => finite_mass(r, cfg)?,
            None => limit_mass(desc, cfg)?,
        };
        Ok(EllisNewmanLaw { desc: desc.clone(), residue, norm })
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let v = match &self.residue {
            Some(r) => r.psi_n(x),
            None => self.desc.psi(x),
        };
        v / self.norm
    }

    pub fn density1(&self, x: f64) -> f64 {
        self.density(&[x])
    }
}

pub fn ellis_newman_density(desc: &ModGaussDescriptor, horizon: Horizon, x: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    Ok(EllisNewmanLaw::new(desc, horizon, cfg)?.density(x))
}

/// `‖ψ_n − ψ‖₁`.
pub fn l1_mod_distance(desc: &ModGaussDescriptor, n: u64, cfg: &QuadratureConfig) -> Result<f64> {
    if !desc.limit_integrable() {
        return Err(Error::Unsupported("the limiting function is not integrable".into()));
    }
    let r = desc.at(n)?;
    if desc.dim == 1 {
        integrate_line(|t| (r.psi_n1(t) - desc.psi(&[t])).abs(), cfg)
    } else {
        integrate_space(|t| (r.psi_n(t) - desc.psi(t)).abs(), desc.dim, cfg)
    }
}

/// `max_{t ∈ grid} |ψ_n(t) − ψ(t)|` on the symmetric grid of half-width `t_max`.
pub fn sup_residue_gap(desc: &ModGaussDescriptor, n: u64, t_max: f64, step: f64) -> Result<f64> {
    if desc.dim != 1 {
        return Err(invalid("grid sup is defined for one-dimensional residues"));
    }
    let r = desc.at(n)?;
    Ok(residue_grid(t_max, step).into_iter().map(|t| (r.psi_n1(t) - desc.psi(&[t])).abs()).fold(0.0, f64::max))
}

pub(crate) fn residue_grid(t_max: f64, step: f64) -> Vec<f64> {
    let k = (t_max / step).round() as i64;
    (-k..=k).map(|j| j as f64 * step).collect()
}

/// Exact `P[X ≥ x t_n]` for `x > 0` and `P[X ≤ x t_n]` for `x < 0`.
pub fn deviation_tail(law: &LatticePmf, t_n: f64, x: f64) -> f64 {
    if x >= 0.0 {
        law.tail_ge(x * t_n)
    } else {
        law.tail_le(x * t_n)
    }
}

/// Tail predicted from the residue, `e^{−t_n x²/2} ψ(x) / (√(2π t_n) |x|)`, and
/// the ratio of `exact_tail` to it.
pub fn precise_deviation(desc: &ModGaussDescriptor, n: u64, x: f64, exact_tail: f64) -> Result<(f64, f64)> {
    if desc.dim != 1 {
        return Err(invalid("deviation estimates are one-dimensional"));
    }
    if x == 0.0 || x.abs() >= desc.band_c {
        return Err(invalid(format!("x = {x} must be non-zero and inside the band")));
    }
    let t = desc.t_n(n);
    let log_pred = -0.5 * t * x * x - (2.0 * std::f64::consts::PI * t).sqrt().ln() - x.abs().ln() + desc.log_psi(&[x]);
    let pred = log_pred.exp();
    Ok((pred, exact_tail / pred))
}

/// `P[X / √t_n ≥ a]` from the exact law.
pub fn clt_tail(law: &LatticePmf, t_n: f64, a: f64) -> f64 {
    law.tail_ge(a * t_n.sqrt())
}

/// Ratio of an exact tail at level `a` to the standard Gaussian tail.
pub fn clt_check(a: f64, exact_tail: f64) -> f64 {
    exact_tail / normal_tail(a)
}

/// Density of `Y + G` where `Y` has the lattice law `law` and `G` is centred
/// Gaussian with variance `1 / t_n`, by exact summation over the lattice.
pub fn gaussian_smoothed_density(law: &LatticePmf, t_n: f64, x: f64) -> f64 {
    assert_eq!(law.dim, 1);
    let c = (t_n / (2.0 * std::f64::consts::PI)).sqrt();
    let s: KahanSum = law
        .log_probs
        .iter()
        .enumerate()
        .filter(|(_, lp)| lp.is_finite())
        .map(|(k, lp)| {
            let d = x - law.value(k);
            (lp - 0.5 * t_n * d * d).exp()
        })
        .collect();
    c * s.value()
}

/// Scale under which the tilted walk endpoint converges to `ψ / I_∞`:
/// `Y_n / t_n = d V_n / n^{3/4}`.
pub fn walk_limit_scale(dim: usize, n: u64) -> f64 {
    dim as f64 * (n as f64).powf(-0.75)
}

/// Cell-averaged total variation between the law of `scale · V_n` under the
/// tilt and the density `ψ / I_∞`. Only reachable points (one parity class)
/// carry cells, each of volume `2 h^d`.
pub fn walk_cell_tv(dim: usize, n: u64, scale: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let desc = ModGaussDescriptor::new(if dim == 1 { ResidueKind::FairSpins } else { ResidueKind::Walk { dim } });
    let law = walk_tilted_law(dim, n)?;
    let norm = limit_mass(&desc, cfg)?;
    let h = law.step * scale;
    let vol = 2.0 * h.powi(dim as i32);
    let mut diff = KahanSum::default();
    let mut model_mass = KahanSum::default();
    let side = law.side() as i64;
    for (i, lp) in law.log_probs.iter().enumerate() {
        // Parity of the lattice coordinates decides reachability.
        let mut rem = i as i64;
        let mut parity = 0;
        for _ in 0..dim {
            parity += rem % side;
            rem /= side;
        }
        if (parity + n as i64 * (dim as i64 + 1)) % 2 != 0 {
            continue;
        }
        let x: Vec<f64> = law.point(i).iter().map(|v| v * scale).collect();
        let f = desc.psi(&x) / norm * vol;
        let p = if lp.is_finite() { lp.exp() } else { 0.0 };
        diff.add((p - f).abs());
        model_mass.add(f);
    }
    Ok(0.5 * diff.value() + 0.5 * (1.0 - model_mass.value()).abs())
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ResidueRow {
    pub n: u64,
    pub t: f64,
    pub psi_n: f64,
    pub psi: f64,
    pub abs_diff: f64,
}

/// `(n, t, ψ_n, ψ, |ψ_n − ψ|)` on the symmetric grid.
pub fn residue_table(desc: &ModGaussDescriptor, n: u64, t_max: f64, step: f64) -> Result<Vec<ResidueRow>> {
    if desc.dim != 1 {
        return Err(invalid("residue tables are one-dimensional"));
    }
    let r = desc.at(n)?;
    Ok(residue_grid(t_max, step)
        .into_iter()
        .map(|t| {
            let (a, b) = (r.psi_n1(t), desc.psi(&[t]));
            ResidueRow { n, t, psi_n: a, psi: b, abs_diff: (a - b).abs() }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LadderRow {
    pub n: u64,
    pub i_n: f64,
    pub l1: f64,
    /// `n^{1/2} ‖ψ_n − ψ‖₁ / I_∞`.
    pub scaled_l1: f64,
    /// `n^{1/2} (I_n − I_∞)`.
    pub scaled_mass_gap: f64,
}

pub fn convergence_ladder(desc: &ModGaussDescriptor, ladder: &[u64], cfg: &QuadratureConfig) -> Result<Vec<LadderRow>> {
    let i_inf = residue_integral(desc, Horizon::Infinite, cfg)?;
    ladder
        .iter()
        .map(|&n| {
            let i_n = residue_integral(desc, Horizon::Finite(n), cfg)?;
            let l1 = l1_mod_distance(desc, n, cfg)?;
            let s = (n as f64).sqrt();
            Ok(LadderRow { n, i_n, l1, scaled_l1: s * l1 / i_inf, scaled_mass_gap: s * (i_n - i_inf) })
        })
        .collect()
}
