use crate::error::{invalid, Result};
use crate::numerics::{decay_extent, kronrod_panel, quartic_mass, KahanSum, QuadratureConfig};
use crate::spin_models::LatticePmf;

const CELL_WIDTH: f64 = 1.0 / 64.0;

/// Cumulative distribution of a density, tabulated on cells of width `1/64`
/// and completed inside a cell by one Kronrod panel.
pub struct TabulatedCdf {
    lo: f64,
    width: f64,
    cum: Vec<f64>,
    density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for TabulatedCdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TabulatedCdf").field("lo", &self.lo).field("hi", &self.hi()).field("mass", &self.mass()).finish()
    }
}

impl TabulatedCdf {
    /// Tabulates on `[lo, hi]`; the density is taken to vanish outside.
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(density: F, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(invalid(format!("bad cdf window [{lo}, {hi}]")));
        }
        let cells = ((hi - lo) / CELL_WIDTH).ceil() as usize;
        let width = (hi - lo) / cells as f64;
        let mut cum = Vec::with_capacity(cells + 1);
        let mut acc = KahanSum::default();
        cum.push(0.0);
        for k in 0..cells {
            let a = lo + width * k as f64;
            acc.add(kronrod_panel(&density, a, a + width).0);
            cum.push(acc.value());
        }
        Ok(TabulatedCdf { lo, width, cum, density: Box::new(density) })
    }

    /// Window chosen where the density has decayed under the configured floor.
    pub fn on_line<F: Fn(f64) -> f64 + Send + Sync + 'static>(density: F, cfg: &QuadratureConfig) -> Result<Self> {
        let l = decay_extent(&mut |x| density(x), cfg)?;
        TabulatedCdf::new(density, -l, l)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.width * (self.cum.len() - 1) as f64
    }

    /// Total tabulated mass.
    pub fn mass(&self) -> f64 {
        *self.cum.last().expect("non-empty table")
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi() {
            return self.mass();
        }
        let k = (((x - self.lo) / self.width).floor() as usize).min(self.cum.len() - 2);
        let a = self.lo + self.width * k as f64;
        self.cum[k] + kronrod_panel(&self.density, a, x).0
    }
}

/// Law `ψ/I_∞` with `ψ(x) = e^{−x⁴/12}`, limit of the critical Curie-Weiss
/// magnetization under the scaling `n^{−3/4}`.
pub fn quartic_limit_cdf() -> Result<TabulatedCdf> {
    let norm = quartic_mass();
    TabulatedCdf::new(move |x| (-x.powi(4) / 12.0).exp() / norm, -8.0, 8.0)
}

/// `sup_x |F_A(x) − F_B(x)|` for a lattice law `A` and a continuous cdf `B`,
/// taken over the jump points of `A` from both sides.
pub fn kolmogorov_lattice<F: FnMut(f64) -> f64>(pmf: &LatticePmf, mut cdf: F) -> f64 {
    assert_eq!(pmf.dim, 1);
    let mut below = KahanSum::default();
    let mut best = 0.0_f64;
    for (k, lp) in pmf.log_probs.iter().enumerate() {
        if *lp == f64::NEG_INFINITY {
            continue;
        }
        let fb = cdf(pmf.value(k));
        let left = below.value();
        below.add(lp.exp());
        best = best.max((left - fb).abs()).max((below.value() - fb).abs());
    }
    best
}

/// `sup_x |F_A(x) − F_B(x)|` for two continuous cdfs: a scan of
/// `[lo, hi]` with spacing `step`, refined by golden-section search around
/// the best grid point.
pub fn kolmogorov_continuous<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(a: F, b: G, lo: f64, hi: f64, step: f64) -> Result<f64> {
    if !(lo < hi && step > 0.0) {
        return Err(invalid("empty scan window"));
    }
    let gap = |x: f64| (a(x) - b(x)).abs();
    let count = ((hi - lo) / step).ceil() as usize;
    let (mut arg, mut best) = (lo, gap(lo));
    for k in 1..=count {
        let x = (lo + step * k as f64).min(hi);
        let g = gap(x);
        if g > best {
            (arg, best) = (x, g);
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut l, mut r) = ((arg - step).max(lo), (arg + step).min(hi));
    for _ in 0..60 {
        let m1 = r - inv_phi * (r - l);
        let m2 = l + inv_phi * (r - l);
        if gap(m1) > gap(m2) {
            r = m2;
        } else {
            l = m1;
        }
    }
    Ok(best.max(gap(0.5 * (l + r))))
}
