//! Quadrature, special functions and the closed-form constants of the
//! quartic limit law.

mod quadrature;
mod special;

pub use quadrature::{
    composite_rule, decay_extent, fourier_transform, integrate, integrate_line, integrate_panels, integrate_space, kronrod_panel, QuadratureConfig,
};
pub use special::{
    cosh_excess, double_factorial_odd, gamma, ln1p_excess, ln_binomial, ln_cosh, ln_cosh_excess, ln_gamma, log_sum_exp, normal_tail, quartic_l1_constant,
    quartic_mass, quartic_mass_correction,
};

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
