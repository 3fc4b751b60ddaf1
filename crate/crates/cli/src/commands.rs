use critspin::cumulant_engine::{
    cumulant_bound, joint_cumulant_spins, magnetization_cumulant_estimate, multilinear_magnetization_cumulant,
    pmf_cumulants, polynomial_p, q_value, q_value_trees, ExactPoly,
};
use critspin::limits::{kolmogorov_lattice, local_limit_check, rate_certificate, TabulatedCdf};
use critspin::modgauss::{
    deviation_tail, descriptor, precise_deviation, residue_integral, residue_table, sup_residue_gap, tilt,
    walk_cell_tv, walk_limit_scale, Horizon, ModGaussDescriptor, ResidueKind,
};
use critspin::numerics::QuadratureConfig;
use critspin::spin_models::{ising_magnetization_pmf, sample_configuration, ModelSpec};
use critspin::Error;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{Format, Table};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or parameters outside a model's domain.
    Usage(String),
    /// The computation itself failed.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::TooLarge { .. } | Error::Unsupported(_) | Error::Parse(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A finished table and whether every check in it held.
pub struct Report {
    pub table: Table,
    pub passed: bool,
}

fn report(table: Table) -> Report {
    Report { table, passed: true }
}

type Outcome = Result<Report, CliError>;

/// Maps `f` over the ladder on one thread per entry, keeping ladder order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items.iter().map(|x| s.spawn(move || f(x))).collect();
        handles.into_iter().map(|h| h.join().expect("ladder worker panicked")).collect()
    })
}

fn check_ladder(ladder: &[u64]) -> Result<(), CliError> {
    if ladder.is_empty() {
        return Err(usage("the ladder is empty"));
    }
    if ladder[0] == 0 {
        return Err(usage("ladder sizes must be positive"));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("the ladder must be strictly increasing"));
    }
    Ok(())
}

fn fractions_of(n: u64, divisors: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = divisors.iter().map(|d| n / d).filter(|&m| m > 0).collect();
    v.dedup();
    v
}

fn poly_rows(p: &ExactPoly) -> Table {
    let mut t = Table::new(&["exponent", "coefficient"]);
    for (e, c) in p.terms() {
        t.push(vec![json!(e), json!(c.to_string())]);
    }
    t.footer("polynomial", json!(p.to_string()));
    t
}

pub fn cumulants(a: &CumulantsArgs) -> Outcome {
    let m = &a.mode;
    if let Some(r) = m.r {
        if r < 1 {
            return Err(usage("r must be at least 1"));
        }
        let p = polynomial_p(r)?;
        let est = magnetization_cumulant_estimate(r)?;
        let mut t = match &a.ladder {
            None => poly_rows(&p),
            Some(ladder) => {
                check_ladder(ladder)?;
                let x = a.beta.tanh();
                let rows = par_map(ladder, |&n| -> Result<Vec<Value>, CliError> {
                    let c = pmf_cumulants(&ising_magnetization_pmf(n, 0.0, a.beta)?, 2 * r)?;
                    let scaled = c.get(2 * r).abs() / n as f64;
                    Ok(vec![json!(n), json!(scaled), json!(est.eval_f64(x)), json!(cumulant_bound(r, a.beta))])
                });
                let mut t = Table::new(&["n", "abs_cumulant_over_n", "estimate", "bound"]);
                for row in rows {
                    t.push(row?);
                }
                t.footer("polynomial", json!(p.to_string()));
                t
            }
        };
        t.footer("estimate", json!(est.to_string()));
        return Ok(report(t));
    }
    if let Some(q) = m.q {
        if q < 1 {
            return Err(usage("q must be at least 1"));
        }
        let mut t = Table::new(&["r", "q", "q_trees"]);
        let mut agree = true;
        for r in 1..=q {
            let (a, b) = (q_value(r)?, q_value_trees(r)?);
            agree &= a == b;
            t.push(vec![json!(r), json!(a.to_string()), json!(b.to_string())]);
        }
        return Ok(Report { table: t, passed: agree });
    }
    if let Some(idx) = &m.indices {
        return Ok(report(poly_rows(&joint_cumulant_spins(idx)?)));
    }
    verify_cumulants(a)
}

/// Expansion over joint spin cumulants at `x = tanh β`, against the cumulants
/// of the exact transfer-matrix law.
fn verify_cumulants(a: &CumulantsArgs) -> Outcome {
    if a.n > 24 {
        return Err(usage("--verify enumerates index tuples; n is capped at 24"));
    }
    if a.max_order < 2 || a.max_order > 12 {
        return Err(usage("--max-order must lie in 2..=12"));
    }
    let x = BigRational::from_float(a.beta.tanh()).ok_or_else(|| usage("beta must be finite"))?;
    let exact = pmf_cumulants(&ising_magnetization_pmf(a.n, 0.0, a.beta)?, a.max_order)?;
    let mut t = Table::new(&["order", "combinatorial", "exact_law", "abs_diff", "tolerance"]);
    let mut passed = true;
    for order in (2..=a.max_order).step_by(2) {
        let comb = multilinear_magnetization_cumulant(a.n, order, &x)?.to_f64().unwrap_or(f64::NAN);
        let value = exact.get(order);
        let tol = 1e-9 * comb.abs().max(1.0) + exact.abs_error[order - 1];
        let diff = (comb - value).abs();
        passed &= diff <= tol;
        t.push(vec![json!(order), json!(comb), json!(value), json!(diff), json!(tol)]);
    }
    Ok(Report { table: t, passed })
}

/// Kolmogorov distance between the fully tilted law of `X_n / t_n` and
/// `ψ / I_∞`.
fn critical_ladder(base: ModGaussDescriptor, ladder: &[u64]) -> Outcome {
    let cfg = QuadratureConfig::default();
    let i_inf = residue_integral(&base, Horizon::Infinite, &cfg)?;
    let psi = base.clone();
    let limit = TabulatedCdf::on_line(move |x| psi.psi(&[x]) / i_inf, &cfg)?;
    let rows = par_map(ladder, |&n| -> Result<Vec<Value>, CliError> {
        let t_n = base.t_n(n);
        let law = tilt(&base.exact_law(n)?, t_n, 1.0)?.tilted.scaled(1.0 / t_n);
        let d = kolmogorov_lattice(&law, |x| limit.cdf(x));
        Ok(vec![json!(n), json!(d), json!(d * (n as f64).sqrt())])
    });
    let mut t = Table::new(&["n", "d_kol", "sqrt_n_d_kol"]);
    for row in rows {
        t.push(row?);
    }
    Ok(report(t))
}

pub fn limit_law(a: &LimitLawArgs) -> Outcome {
    let ladder = match (&a.ladder, a.n) {
        (Some(l), _) => l.clone(),
        (None, Some(n)) => fractions_of(n, &[4, 2, 1]),
        (None, None) => match a.model {
            Model::Walk if a.dim == 3 => vec![20, 40, 80],
            Model::Walk => vec![100, 200, 400],
            _ => vec![100, 1_000, 10_000],
        },
    };
    check_ladder(&ladder)?;
    match a.model {
        Model::Cw => critical_ladder(ModGaussDescriptor::new(ResidueKind::FairSpins), &ladder),
        Model::Mixed => {
            let gamma = a.gamma.unwrap_or((-2.0 * a.beta).exp());
            let relative = gamma * (2.0 * a.beta).exp();
            let mut rep = if (relative - 1.0).abs() < 1e-12 {
                critical_ladder(ModGaussDescriptor::new(ResidueKind::IsingZeroField { beta: a.beta }), &ladder)?
            } else if relative < 1.0 {
                let desc = descriptor(&ModelSpec::mixed(ladder[0], 0.0, a.beta, gamma))?;
                let rows = par_map(&ladder, |&n| sup_residue_gap(&desc, n, 2.0, 0.01));
                let mut t = Table::new(&["n", "sup_residue_gap"]);
                for (n, row) in ladder.iter().zip(rows) {
                    t.push(vec![json!(n), json!(row?)]);
                }
                report(t)
            } else {
                return Err(usage(format!("γ e^(2β) = {relative} exceeds 1; no limit law at this scale")));
            };
            rep.table.footer("gamma", json!(gamma));
            Ok(rep)
        }
        Model::Walk => {
            if a.dim < 2 {
                return Err(usage("walks need --dim 2 or 3"));
            }
            // Rejects dimensions without an integrable limit.
            descriptor(&ModelSpec::random_walk(a.dim, ladder[0]))?;
            let cfg = QuadratureConfig::default();
            let rows = par_map(&ladder, |&n| walk_cell_tv(a.dim, n, walk_limit_scale(a.dim, n), &cfg));
            let mut t = Table::new(&["n", "cell_tv"]);
            for (n, row) in ladder.iter().zip(rows) {
                t.push(vec![json!(n), json!(row?)]);
            }
            Ok(report(t))
        }
        Model::Ising | Model::Iid => Err(usage("limit-law supports --model cw, mixed or walk")),
    }
}

pub fn rate(a: &RateArgs, format: Format) -> Outcome {
    check_ladder(&a.ladder)?;
    let certs = par_map(&a.ladder, |&n| rate_certificate(n, a.b, a.d));
    let columns: &[&str] = match format {
        Format::Csv => &["n", "bound", "measured", "ratio"],
        Format::Json => &["n", "b", "D", "smoothing_term", "l1_term", "bound", "measured", "ratio"],
    };
    let mut t = Table::new(columns);
    let mut passed = true;
    for c in certs {
        let c = c?;
        passed &= c.holds();
        t.push(match format {
            Format::Csv => vec![json!(c.n), json!(c.total_bound), json!(c.measured_dkol), json!(c.ratio())],
            Format::Json => vec![
                json!(c.n),
                json!(c.b),
                json!(c.d),
                json!(c.smoothing_term),
                json!(c.l1_term),
                json!(c.total_bound),
                json!(c.measured_dkol),
                json!(c.ratio()),
            ],
        });
    }
    Ok(Report { table: t, passed })
}

pub fn local_limit(a: &LocalLimitArgs) -> Outcome {
    let [lo, hi] = a.interval[..] else {
        return Err(usage("--interval takes two numbers `a,b`"));
    };
    let ladder = a.ladder.clone().unwrap_or_else(|| fractions_of(a.n, &[100, 10, 1]));
    check_ladder(&ladder)?;
    let rows = par_map(&ladder, |&n| local_limit_check(n, lo, hi));
    let mut t = Table::new(&["n", "lhs", "rhs", "ratio"]);
    for (n, row) in ladder.iter().zip(rows) {
        let (l, r) = row?;
        let ratio = if r > 0.0 { json!(l / r) } else { Value::Null };
        t.push(vec![json!(n), json!(l), json!(r), ratio]);
    }
    Ok(report(t))
}

pub fn deviations(a: &DeviationsArgs) -> Outcome {
    check_ladder(&a.ladder)?;
    let spec = match a.model {
        Model::Iid => ModelSpec::curie_weiss(a.ladder[0], a.alpha, 0.0),
        Model::Ising => ModelSpec::ising(a.ladder[0], a.alpha, a.beta),
        _ => return Err(usage("deviations supports --model iid or ising")),
    };
    let desc = descriptor(&spec)?;
    let rows = par_map(&a.ladder, |&n| -> Result<Vec<Value>, CliError> {
        let law = desc.exact_law(n)?;
        let exact = deviation_tail(&law, desc.t_n(n), a.x);
        let (pred, ratio) = precise_deviation(&desc, n, a.x, exact)?;
        Ok(vec![json!(n), json!(exact), json!(pred), json!(ratio)])
    });
    let mut t = Table::new(&["n", "exact_tail", "predicted", "ratio"]);
    for row in rows {
        t.push(row?);
    }
    t.footer("psi_at_x", json!(desc.psi(&[a.x])));
    Ok(report(t))
}

pub fn residue(a: &ResidueArgs) -> Outcome {
    let spec = match a.model {
        Model::Cw | Model::Iid => ModelSpec::curie_weiss(a.n, a.alpha, 0.0),
        Model::Ising => ModelSpec::ising(a.n, a.alpha, a.beta),
        Model::Mixed => ModelSpec::mixed(a.n, a.alpha, a.beta, a.gamma.unwrap_or(0.5 * (-2.0 * a.beta).exp())),
        Model::Walk => return Err(usage("residue grids are one-dimensional")),
    };
    if !(a.step > 0.0 && a.t_max >= 0.0) {
        return Err(usage("the grid needs --step > 0 and --t-max >= 0"));
    }
    let rows = residue_table(&descriptor(&spec)?, a.n, a.t_max, a.step)?;
    let mut t = Table::new(&["n", "t", "psi_n", "psi", "abs_diff"]);
    let mut worst = 0.0_f64;
    for r in rows {
        worst = worst.max(r.abs_diff);
        t.push(vec![json!(r.n), json!(r.t), json!(r.psi_n), json!(r.psi), json!(r.abs_diff)]);
    }
    t.footer("max_abs_diff", json!(worst));
    Ok(report(t))
}

pub fn sample(a: &SampleArgs, seed: u64) -> Outcome {
    let spec = match a.model {
        Model::Ising => ModelSpec::ising(a.n, a.alpha, a.beta),
        Model::Cw => ModelSpec::curie_weiss(a.n, a.alpha, a.beta),
        Model::Iid => ModelSpec::curie_weiss(a.n, a.alpha, 0.0),
        Model::Mixed | Model::Walk => return Err(usage("sample supports --model ising, cw or iid")),
    };
    let config = sample_configuration(&spec, seed)?;
    let names: Vec<String> = (1..=config.len()).map(|i| format!("s_{i}")).collect();
    let mut t = Table::new(&names.iter().map(String::as_str).collect::<Vec<_>>());
    t.push(config.0.iter().map(|&s| json!(s)).collect());
    t.footer("magnetization", json!(config.magnetization()));
    Ok(report(t))
}
