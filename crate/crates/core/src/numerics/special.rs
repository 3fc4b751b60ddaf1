use std::f64::consts::PI;

use crate::error::{Error, Result};

// B_{2k} / (2k (2k - 1)) for k = 1..=9.
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
];

const SHIFT: f64 = 16.0;

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// `ln Γ(x)` for `x > 0`: Stirling series after shifting the argument past 16.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument, got {x}");
    if x >= SHIFT {
        return stirling_ln_gamma(x);
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < SHIFT {
        prod *= y;
        y += 1.0;
    }
    stirling_ln_gamma(y) - prod.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    assert!(x > 0.0, "gamma needs a positive argument, got {x}");
    if x >= SHIFT {
        return stirling_ln_gamma(x).exp();
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < SHIFT {
        prod *= y;
        y += 1.0;
    }
    stirling_ln_gamma(y).exp() / prod
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    // Evaluated in a fixed order so that C(n, k) and C(n, n − k) agree bitwise.
    let (lo, hi) = (k.min(n - k), k.max(n - k));
    ln_gamma(n as f64 + 1.0) - ln_gamma(hi as f64 + 1.0) - ln_gamma(lo as f64 + 1.0)
}

/// Numerically stable `ln Σ exp(v)`.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return Ok(m);
    }
    let s: f64 = values.iter().map(|v| (v - m).exp()).sum();
    Ok(m + s.ln())
}

/// `ln cosh(u)` without overflow.
pub fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln cosh(u) − u²/2`, with a series near zero where the two terms cancel.
pub fn ln_cosh_excess(u: f64) -> f64 {
    const C: [f64; 7] = [
        -1.0 / 12.0,
        1.0 / 45.0,
        -17.0 / 2520.0,
        31.0 / 14175.0,
        -691.0 / 935550.0,
        10922.0 / 42567525.0,
        -929569.0 / 10216206000.0,
    ];
    if u.abs() < 0.1 {
        let u2 = u * u;
        let s = C.iter().rev().fold(0.0, |acc, c| acc * u2 + c);
        s * u2 * u2
    } else if u.abs() < 1.0 {
        let c = cosh_excess(u) + 0.5 * u * u;
        ln1p_excess(c) + cosh_excess(u)
    } else {
        ln_cosh(u) - 0.5 * u * u
    }
}

/// `cosh(u) − 1 − u²/2`.
pub fn cosh_excess(u: f64) -> f64 {
    if u.abs() < 1.0 {
        let u2 = u * u;
        // Σ_{k≥2} u^{2k}/(2k)!
        let mut term = u2 * u2 / 24.0;
        let mut s = 0.0f64;
        let mut k = 2.0;
        while term.abs() > 1e-18 * s.abs().max(f64::MIN_POSITIVE) {
            s += term;
            term *= u2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            k += 1.0;
        }
        s
    } else {
        u.cosh() - 1.0 - 0.5 * u * u
    }
}

/// `ln(1 + a) − a`.
pub fn ln1p_excess(a: f64) -> f64 {
    if a.abs() < 1e-2 {
        let mut s = 0.0;
        let mut p = a * a;
        for k in 2..14 {
            let term = p / k as f64;
            s += if k % 2 == 0 { -term } else { term };
            p *= a;
        }
        s
    } else {
        a.ln_1p() - a
    }
}

/// Upper tail of the standard normal law.
pub fn normal_tail(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// `∫ e^{-x^4/12} dx` over the line, `12^{1/4} Γ(1/4) / 2`.
pub fn quartic_mass() -> f64 {
    12f64.powf(0.25) * gamma(0.25) / 2.0
}

/// Coefficient of `n^{-1/2}` in the expansion of the finite-`n` quartic
/// residue mass, `12^{3/4} Γ(3/4) / 10`.
pub fn quartic_mass_correction() -> f64 {
    12f64.powf(0.75) * gamma(0.75) / 10.0
}

/// Limit of `n^{1/2} ‖ψ − ψ_n‖₁ / I_∞` at the critical point, `√12 Γ(3/4) / (5 Γ(1/4))`.
pub fn quartic_l1_constant() -> f64 {
    12f64.sqrt() * gamma(0.75) / (5.0 * gamma(0.25))
}

/// `(2k - 1)!!` with `(-1)!! = 1`.
pub fn double_factorial_odd(k: i64) -> f64 {
    let mut p = 1.0;
    let mut j = 2 * k - 1;
    while j > 1 {
        p *= j as f64;
        j -= 2;
    }
    p
}
