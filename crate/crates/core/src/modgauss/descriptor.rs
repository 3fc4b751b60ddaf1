use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::{cosh_excess, gamma, ln1p_excess, ln_cosh_excess};
use crate::spin_models::{
    cw_magnetization_pmf, ising_alpha0_mod_params, ising_log_laplace, ising_magnetization_pmf, ising_mod_params,
    random_walk_pmf, transfer_eigen, LatticePmf, ModelSpec, Variant,
};

use super::tilt::tilt;

/// Which sequence `X_n` a descriptor speaks about.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidueKind {
    /// Fair ±1 spins, `X_n = M_n / n^{1/4}`. Its critical tilt is the
    /// Curie-Weiss model at `β = 1`.
    FairSpins,
    /// Zero-field Ising chain, `X_n = M_n / n^{1/4}`.
    IsingZeroField { beta: f64 },
    /// Ising chain in a field, `X_n = (M_n − n m̄) / n^{1/3}`.
    IsingField { alpha: f64, beta: f64 },
    /// Independent spins in a field, `X_n = (M_n − n tanh α) / n^{1/3}`.
    IidField { alpha: f64 },
    /// Nearest-neighbour walk on `Z^d`, `X_n = V_n / n^{1/4}`, `d ∈ {2, 3}`.
    Walk { dim: usize },
    /// Sums of i.i.d. variables whose first `k` cumulants are Gaussian;
    /// only the limiting formulas are known.
    IidFormula { k: u32, top_cumulant: f64 },
    /// The `γ`-tilt of a symmetric quartic sequence.
    Subcritical { base: Box<ResidueKind>, gamma: f64 },
}

/// Mod-Gaussian data: parameters `t_n`, residues `ψ_n` and their limit `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModGaussDescriptor {
    pub kind: ResidueKind,
    /// Half-width of the strip on which convergence holds.
    pub band_c: f64,
    pub dim: usize,
}

/// Descriptor of the sequence behind `spec`. A Curie-Weiss spec maps to its
/// interaction-free base sequence; a mixed spec maps to the sub-critical
/// tilt of the zero-field chain with relative strength `γ e^{2β}`.
pub fn descriptor(spec: &ModelSpec) -> Result<ModGaussDescriptor> {
    if spec.variant == Variant::RandomWalk && spec.dim >= 4 {
        return Err(Error::Unsupported(format!(
            "walk in dimension {}: the limiting function is not integrable",
            spec.dim
        )));
    }
    spec.validate()?;
    let kind = match spec.variant {
        Variant::CurieWeiss if spec.alpha == 0.0 => ResidueKind::FairSpins,
        Variant::CurieWeiss => ResidueKind::IidField { alpha: spec.alpha },
        Variant::Ising1d if spec.alpha == 0.0 => ResidueKind::IsingZeroField { beta: spec.beta },
        Variant::Ising1d => ResidueKind::IsingField { alpha: spec.alpha, beta: spec.beta },
        Variant::MixedCwIsing => {
            if spec.alpha != 0.0 {
                return Err(Error::Unsupported("mixed model in a field".into()));
            }
            let relative = spec.gamma * (2.0 * spec.beta).exp();
            return subcritical_descriptor(&ModGaussDescriptor::new(ResidueKind::IsingZeroField { beta: spec.beta }), relative);
        }
        Variant::RandomWalk if spec.dim == 1 => ResidueKind::FairSpins,
        Variant::RandomWalk => ResidueKind::Walk { dim: spec.dim },
    };
    Ok(ModGaussDescriptor::new(kind))
}

/// Descriptor of the `γ`-tilted sequence, `0 ≤ γ < 1`: parameters
/// `t_n / (1 − γ)` and limit `ψ(t / (1 − γ))`.
pub fn subcritical_descriptor(desc: &ModGaussDescriptor, gamma: f64) -> Result<ModGaussDescriptor> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(invalid(format!("sub-critical tilt needs 0 ≤ γ < 1, got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(desc.clone());
    }
    match desc.kind {
        ResidueKind::FairSpins | ResidueKind::IsingZeroField { .. } | ResidueKind::Walk { .. } => {}
        _ => return Err(Error::Unsupported("sub-critical tilt of a non-quartic sequence".into())),
    }
    Ok(ModGaussDescriptor::new(ResidueKind::Subcritical { base: Box::new(desc.kind.clone()), gamma }))
}

/// Descriptor for i.i.d. sums from their cumulants `c₁, …, c_{k+1}`:
/// `t_n = n^{(k−1)/(k+1)}` and `ψ(t) = exp(c_{k+1} t^{k+1} / (k+1)!)`.
pub fn iid_residue(cumulants: &[f64], k: u32) -> Result<ModGaussDescriptor> {
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    if cumulants.len() != k as usize + 1 {
        return Err(invalid(format!("expected {} cumulants, got {}", k + 1, cumulants.len())));
    }
    for (j, &c) in cumulants[..k as usize].iter().enumerate() {
        let target = if j == 1 { 1.0 } else { 0.0 };
        if (c - target).abs() > 1e-12 {
            return Err(invalid(format!("cumulant {} is {c}, the Gaussian value is {target}", j + 1)));
        }
    }
    Ok(ModGaussDescriptor::new(ResidueKind::IidFormula { k, top_cumulant: cumulants[k as usize] }))
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

impl ResidueKind {
    fn dim(&self) -> usize {
        match self {
            ResidueKind::Walk { dim } => *dim,
            ResidueKind::Subcritical { base, .. } => base.dim(),
            _ => 1,
        }
    }

    fn t_n(&self, n: f64) -> f64 {
        match self {
            ResidueKind::FairSpins => n.sqrt(),
            ResidueKind::IsingZeroField { beta } => n.sqrt() * (2.0 * beta).exp(),
            ResidueKind::IsingField { alpha, beta } => n.cbrt() * transfer_eigen(*alpha, *beta).sigma2,
            ResidueKind::IidField { alpha } => n.cbrt() / alpha.cosh().powi(2),
            ResidueKind::Walk { dim } => n.sqrt() / *dim as f64,
            ResidueKind::IidFormula { k, .. } => n.powf((*k as f64 - 1.0) / (*k as f64 + 1.0)),
            ResidueKind::Subcritical { base, gamma } => base.t_n(n) / (1.0 - gamma),
        }
    }

    /// `(center, scale)` with `X_n = (S_n − center) · scale`.
    fn observable(&self, n: f64) -> (f64, f64) {
        match self {
            ResidueKind::FairSpins | ResidueKind::IsingZeroField { .. } | ResidueKind::Walk { .. } => {
                (0.0, n.powf(-0.25))
            }
            ResidueKind::IsingField { alpha, beta } => (n * transfer_eigen(*alpha, *beta).m_bar, n.powf(-1.0 / 3.0)),
            ResidueKind::IidField { alpha } => (n * alpha.tanh(), n.powf(-1.0 / 3.0)),
            ResidueKind::IidFormula { k, .. } => (0.0, n.powf(-1.0 / (*k as f64 + 1.0))),
            ResidueKind::Subcritical { base, .. } => base.observable(n),
        }
    }
}

impl ModGaussDescriptor {
    pub fn new(kind: ResidueKind) -> Self {
        let dim = kind.dim();
        ModGaussDescriptor { kind, band_c: f64::INFINITY, dim }
    }

    pub fn t_n(&self, n: u64) -> f64 {
        self.kind.t_n(n as f64)
    }

    /// `(center, scale)` with `X_n = (S_n − center) · scale`, `S_n` the raw sum.
    pub fn observable(&self, n: u64) -> (f64, f64) {
        self.kind.observable(n as f64)
    }

    /// Symmetric sequences have even residues.
    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            ResidueKind::FairSpins | ResidueKind::IsingZeroField { .. } | ResidueKind::Walk { .. } => true,
            ResidueKind::IsingField { .. } | ResidueKind::IidField { .. } => false,
            ResidueKind::IidFormula { k, .. } => k % 2 == 1,
            ResidueKind::Subcritical { .. } => true,
        }
    }

    /// A one-dimensional limit is `exp(coef · t^power)`; this returns `(coef, power)`.
    pub fn limit_monomial(&self) -> Option<(f64, u32)> {
        fn rec(kind: &ResidueKind) -> Option<(f64, u32)> {
            match kind {
                ResidueKind::FairSpins => Some((-1.0 / 12.0, 4)),
                ResidueKind::IsingZeroField { beta } => Some((-ising_alpha0_mod_params(*beta).1, 4)),
                ResidueKind::IsingField { alpha, beta } => {
                    Some((ising_mod_params(*alpha, *beta).expect("non-zero field").1 / 6.0, 3))
                }
                ResidueKind::IidField { alpha } => Some((-alpha.sinh() / (3.0 * alpha.cosh().powi(3)), 3)),
                ResidueKind::IidFormula { k, top_cumulant } => Some((top_cumulant / factorial(k + 1), k + 1)),
                ResidueKind::Walk { .. } => None,
                ResidueKind::Subcritical { base, gamma } => {
                    rec(base).map(|(c, p)| (c / (1.0 - gamma).powi(p as i32), p))
                }
            }
        }
        rec(&self.kind)
    }

    /// True when `ψ` has finite mass.
    pub fn limit_integrable(&self) -> bool {
        match self.limit_monomial() {
            Some((c, p)) => p % 2 == 0 && c < 0.0,
            None => true,
        }
    }

    /// `ln ψ(t)`.
    pub fn log_psi(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.dim, "argument dimension");
        if let Some((c, p)) = self.limit_monomial() {
            return c * t[0].powi(p as i32);
        }
        let (dim, shrink) = match &self.kind {
            ResidueKind::Walk { dim } => (*dim, 1.0),
            ResidueKind::Subcritical { base, gamma } => match **base {
                ResidueKind::Walk { dim } => (dim, 1.0 / (1.0 - gamma)),
                _ => unreachable!("monomial limits handled above"),
            },
            _ => unreachable!("monomial limits handled above"),
        };
        let s: Vec<f64> = t.iter().map(|x| x * shrink).collect();
        walk_log_limit(dim, &s)
    }

    pub fn psi(&self, t: &[f64]) -> f64 {
        self.log_psi(t).exp()
    }

    /// `θ(t) = ψ(i t)` for one-dimensional limits.
    pub fn theta(&self, t: f64) -> Result<Complex64> {
        let (c, p) = self.limit_monomial().ok_or_else(|| Error::Unsupported("θ of a vector-valued residue".into()))?;
        Ok((Complex64::new(0.0, t).powi(p as i32) * c).exp())
    }

    /// Residue evaluator at a fixed `n`.
    pub fn at(&self, n: u64) -> Result<FiniteResidue> {
        if n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        let pmf = match &self.kind {
            ResidueKind::IidFormula { .. } => {
                return Err(Error::Unsupported("only the limiting formulas are known for this sequence".into()))
            }
            ResidueKind::Subcritical { .. } => Some(self.exact_law(n)?),
            _ => None,
        };
        Ok(FiniteResidue { desc: self.clone(), n, t_n: self.t_n(n), pmf })
    }

    pub fn log_psi_n(&self, n: u64, t: &[f64]) -> Result<f64> {
        Ok(self.at(n)?.log_psi_n(t))
    }

    pub fn psi_n(&self, n: u64, t: &[f64]) -> Result<f64> {
        Ok(self.log_psi_n(n, t)?.exp())
    }

    /// Exact law of `X_n` from the spin or walk model.
    pub fn exact_law(&self, n: u64) -> Result<LatticePmf> {
        let (center, scale) = self.observable(n);
        let raw = match &self.kind {
            ResidueKind::FairSpins => cw_magnetization_pmf(n, 0.0, 0.0)?,
            ResidueKind::IsingZeroField { beta } => ising_magnetization_pmf(n, 0.0, *beta)?,
            ResidueKind::IsingField { alpha, beta } => ising_magnetization_pmf(n, *alpha, *beta)?,
            ResidueKind::IidField { alpha } => cw_magnetization_pmf(n, *alpha, 0.0)?,
            ResidueKind::Walk { dim } => random_walk_pmf(*dim, n)?,
            ResidueKind::IidFormula { .. } => {
                return Err(Error::Unsupported("no exact law for a formula-only sequence".into()))
            }
            ResidueKind::Subcritical { base, gamma } => {
                let base_desc = ModGaussDescriptor::new((**base).clone());
                let law = base_desc.exact_law(n)?;
                return Ok(tilt(&law, base_desc.t_n(n), *gamma)?.tilted);
            }
        };
        Ok(LatticePmf { offset: (raw.offset - center) * scale, step: raw.step * scale, log_probs: raw.log_probs, dim: raw.dim })
    }
}

/// `ln ψ` of the walk limits in dimensions 2 and 3.
fn walk_log_limit(dim: usize, t: &[f64]) -> f64 {
    match dim {
        2 => {
            let (a, b) = (t[0] * t[0], t[1] * t[1]);
            -(a * a + b * b + 6.0 * a * b) / 96.0
        }
        3 => {
            let (a, b, c) = (t[0] * t[0], t[1] * t[1], t[2] * t[2]);
            -(a * b + a * c + b * c) / 36.0
        }
        _ => unreachable!("walk limits exist in dimensions 2 and 3"),
    }
}

/// `ψ_n` at a fixed `n`. Sub-critical residues keep the tilted law.
#[derive(Debug, Clone)]
pub struct FiniteResidue {
    desc: ModGaussDescriptor,
    pub n: u64,
    pub t_n: f64,
    pmf: Option<LatticePmf>,
}

impl FiniteResidue {
    pub fn descriptor(&self) -> &ModGaussDescriptor {
        &self.desc
    }

    /// `ln E[e^{⟨t, X_n⟩}] − t_n |t|² / 2`.
    pub fn log_psi_n(&self, t: &[f64]) -> f64 {
        assert_eq!(t.len(), self.desc.dim, "argument dimension");
        let nf = self.n as f64;
        let (center, scale) = self.desc.observable(self.n);
        match &self.desc.kind {
            ResidueKind::FairSpins => nf * ln_cosh_excess(t[0] * scale),
            ResidueKind::IsingZeroField { .. } | ResidueKind::IsingField { .. } => {
                let (alpha, beta) = match self.desc.kind {
                    ResidueKind::IsingZeroField { beta } => (0.0, beta),
                    ResidueKind::IsingField { alpha, beta } => (alpha, beta),
                    _ => unreachable!(),
                };
                let s = t[0] * scale;
                ising_log_laplace(alpha, beta, self.n, s) - center * s - 0.5 * self.t_n * t[0] * t[0]
            }
            ResidueKind::IidField { alpha } => {
                let u = t[0] * scale;
                let th = alpha.tanh();
                // ln cosh(α + u) − ln cosh α = ln(1 + a), a = cosh u − 1 + tanh α sinh u
                let a = cosh_excess(u) + 0.5 * u * u + th * u.sinh();
                nf * (ln1p_excess(a) + cosh_excess(u) + 0.5 * th * th * u * u + th * (u.sinh() - u))
            }
            ResidueKind::Walk { dim } => {
                let d = *dim as f64;
                let mut a = 0.0;
                let mut excess = 0.0;
                for &x in t {
                    let u = x * scale;
                    excess += cosh_excess(u) / d;
                    a += (cosh_excess(u) + 0.5 * u * u) / d;
                }
                nf * (ln1p_excess(a) + excess)
            }
            ResidueKind::IidFormula { .. } => unreachable!("refused in at()"),
            ResidueKind::Subcritical { .. } => {
                let pmf = self.pmf.as_ref().expect("tilted law");
                let sq: f64 = t.iter().map(|x| x * x).sum();
                pmf.log_laplace(t) - 0.5 * self.t_n * sq
            }
        }
    }

    pub fn psi_n(&self, t: &[f64]) -> f64 {
        self.log_psi_n(t).exp()
    }

    pub fn psi_n1(&self, t: f64) -> f64 {
        self.psi_n(&[t])
    }
}

/// `∫ e^{c t^m} dt = 2 Γ(1 + 1/m) |c|^{−1/m}` for even `m` and `c < 0`.
pub(crate) fn monomial_mass(c: f64, m: u32) -> f64 {
    2.0 * gamma(1.0 + 1.0 / m as f64) * (-c).powf(-1.0 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_models::brute_force_pmf;

    fn all_kinds() -> Vec<ModGaussDescriptor> {
        [
            ResidueKind::FairSpins,
            ResidueKind::IsingZeroField { beta: 0.4 },
            ResidueKind::IsingField { alpha: 0.3, beta: 0.5 },
            ResidueKind::IidField { alpha: 0.4 },
            ResidueKind::Walk { dim: 2 },
            ResidueKind::Walk { dim: 3 },
            ResidueKind::Subcritical { base: Box::new(ResidueKind::FairSpins), gamma: 0.5 },
        ]
        .into_iter()
        .map(ModGaussDescriptor::new)
        .collect()
    }

    #[test]
    fn residues_are_one_at_the_origin() {
        for d in all_kinds() {
            let zero = vec![0.0; d.dim];
            for n in [1, 7, 40] {
                assert!(d.log_psi_n(n, &zero).unwrap().abs() < 1e-12, "{:?} n={n}", d.kind);
            }
            assert_eq!(d.psi(&zero), 1.0);
        }
    }

    #[test]
    fn closed_forms_match_exact_laws() {
        for d in all_kinds() {
            let n = if d.dim == 3 { 12 } else { 30 };
            let r = d.at(n).unwrap();
            let law = d.exact_law(n).unwrap();
            let t_n = d.t_n(n);
            for s in [-1.3, -0.4, 0.7, 2.1] {
                let t: Vec<f64> = (0..d.dim).map(|i| s * (1.0 + 0.3 * i as f64)).collect();
                let sq: f64 = t.iter().map(|x| x * x).sum();
                let from_law = law.log_laplace(&t) - 0.5 * t_n * sq;
                let closed = r.log_psi_n(&t);
                assert!((from_law - closed).abs() < 1e-9, "{:?}: {from_law} vs {closed}", d.kind);
            }
        }
    }

    #[test]
    fn infinite_temperature_chain_is_fair_spins() {
        let a = ModGaussDescriptor::new(ResidueKind::FairSpins);
        let b = descriptor(&ModelSpec::ising(10, 0.0, 0.0)).unwrap();
        assert_eq!(a.t_n(400), b.t_n(400));
        for t in [-2.0, 0.5, 3.0] {
            assert!((a.log_psi_n(400, &[t]).unwrap() - b.log_psi_n(400, &[t]).unwrap()).abs() < 1e-10);
            assert_eq!(a.psi(&[t]), b.psi(&[t]));
        }
    }

    #[test]
    fn limits_reached_at_large_n() {
        for d in all_kinds().into_iter().filter(|d| d.dim == 1) {
            let n = if matches!(d.kind, ResidueKind::Subcritical { .. }) { 20_000 } else { 100_000_000 };
            let t = 0.8;
            let gap = (d.psi_n(n, &[t]).unwrap() - d.psi(&[t])).abs();
            assert!(gap < 0.02, "{:?}: gap {gap}", d.kind);
        }
    }

    #[test]
    fn dimension_four_walk_rejected() {
        let err = descriptor(&ModelSpec::random_walk(4, 10)).unwrap_err();
        assert!(err.to_string().contains("not integrable"), "{err}");
    }

    #[test]
    fn formula_descriptors() {
        let bern = iid_residue(&[0.0, 1.0, 0.0, -2.0], 3).unwrap();
        assert_eq!(bern.limit_monomial(), Some((-1.0 / 12.0, 4)));
        assert_eq!(bern.t_n(10_000), 100.0);
        assert!(bern.at(10).is_err());
        let cubic = iid_residue(&[0.0, 1.0, 0.6], 2).unwrap();
        assert!((cubic.t_n(1000) - 10.0).abs() < 1e-12);
        assert!((cubic.log_psi(&[2.0]) - 0.6 * 8.0 / 6.0).abs() < 1e-15);
        // θ(t) = exp(c₃ (it)³ / 6) is unimodular.
        assert!((cubic.theta(1.5).unwrap().norm() - 1.0).abs() < 1e-15);
        let six = iid_residue(&[0.0, 1.0, 0.0, 0.0, 0.0, 3.0], 5).unwrap();
        // (−1)^s t^{2s} c_{2s}/(2s)! with s = 3.
        assert!((six.theta(1.2).unwrap().re - (-(1.2f64).powi(6) * 3.0 / 720.0).exp()).abs() < 1e-15);
        assert!(iid_residue(&[0.1, 1.0, 0.0, -2.0], 3).is_err());
    }

    #[test]
    fn sign_of_the_cubic_residue_breaks_symmetry() {
        // For a positive third cumulant the positive side is favoured.
        let d = ModGaussDescriptor::new(ResidueKind::IidField { alpha: -0.5 });
        assert!(d.psi(&[0.7]) > 1.0 && d.psi(&[-0.7]) < 1.0);
        assert!(!d.limit_integrable());
    }

    #[test]
    fn planar_limit_is_not_radial() {
        let d = ModGaussDescriptor::new(ResidueKind::Walk { dim: 2 });
        let a = 2.0;
        let r = a / 2f64.sqrt();
        assert!((d.psi(&[a, 0.0]) - d.psi(&[r, r])).abs() > 1e-2);
    }

    #[test]
    fn subcritical_identity_and_mixed_spec() {
        let base = ModGaussDescriptor::new(ResidueKind::FairSpins);
        assert_eq!(subcritical_descriptor(&base, 0.0).unwrap(), base);
        assert!(subcritical_descriptor(&base, 1.0).is_err());
        let mixed = descriptor(&ModelSpec::mixed(12, 0.0, 0.3, 0.25)).unwrap();
        let law = mixed.exact_law(12).unwrap();
        let brute = brute_force_pmf(&ModelSpec::mixed(12, 0.0, 0.3, 0.25)).unwrap();
        for (a, b) in law.log_probs.iter().zip(&brute.log_probs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
