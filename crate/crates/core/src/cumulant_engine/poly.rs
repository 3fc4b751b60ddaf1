use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Polynomial in `x` with big-rational coefficients, dense by exponent and
/// trimmed so that equal polynomials compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactPoly {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ExactPoly {
    pub fn zero() -> Self {
        ExactPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: BigRational, exponent: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); exponent + 1];
        coeffs[exponent] = c;
        ExactPoly { coeffs }
    }

    pub fn x_pow(exponent: usize) -> Self {
        Self::monomial(BigRational::one(), exponent)
    }

    /// `1 − x^k`.
    pub fn one_minus_x_pow(k: usize) -> Self {
        &Self::one() - &Self::x_pow(k)
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = ExactPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, exponent: usize) -> BigRational {
        self.coeffs.get(exponent).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Non-zero terms in increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn lowest_exponent(&self) -> Option<usize> {
        self.terms().next().map(|(e, _)| e)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Euclidean division.
    pub fn div_rem(&self, d: &ExactPoly) -> (ExactPoly, ExactPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = &c * dc;
                    rem[top - dd + j] -= t;
                }
                quot[top - dd] = c;
            }
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (ExactPoly::from_coeffs(quot), ExactPoly::from_coeffs(rem))
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn div_exact(&self, d: &ExactPoly) -> Option<ExactPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
        let (mut a, mut b) = (a.monic(), b.monic());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// True when every coefficient is a non-negative integer.
    pub fn has_nonnegative_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.is_negative())
    }
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        if self.is_zero() || rhs.is_zero() {
            return ExactPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.terms() {
            for (j, b) in rhs.terms() {
                out[i + j] += a * b;
            }
        }
        ExactPoly::from_coeffs(out)
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ExactPoly {
            type Output = ExactPoly;
            fn $m(self, rhs: ExactPoly) -> ExactPoly { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let body = if e == 0 { c.abs().to_string() } else { format!("{}*x^{e}", c.abs()) };
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad coefficient `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl FromStr for ExactPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        // Split on binary + and − separators surrounded by spaces.
        let mut pieces: Vec<(bool, &str)> = Vec::new();
        let mut rest = s;
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        loop {
            let plus = rest.find(" + ");
            let minus = rest.find(" - ");
            let next = match (plus, minus) {
                (Some(p), Some(m)) => Some(p.min(m)),
                (p, m) => p.or(m),
            };
            match next {
                Some(i) => {
                    pieces.push((negative, &rest[..i]));
                    negative = &rest[i..i + 3] == " - ";
                    rest = &rest[i + 3..];
                }
                None => {
                    pieces.push((negative, rest));
                    break;
                }
            }
        }
        let mut out = ExactPoly::zero();
        for (neg, term) in pieces {
            let (c, e) = match term.split_once("*x^") {
                Some((c, e)) => (parse_rational(c)?, e.trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
                None => (parse_rational(term)?, 0),
            };
            let c = if neg { -c } else { c };
            out = &out + &ExactPoly::monomial(c, e);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponent: usize,
    numerator: String,
    denominator: String,
}

impl Serialize for ExactPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let recs: Vec<TermRecord> = self
            .terms()
            .map(|(e, c)| TermRecord { exponent: e, numerator: c.numer().to_string(), denominator: c.denom().to_string() })
            .collect();
        recs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let recs = Vec::<TermRecord>::deserialize(d)?;
        let mut out = ExactPoly::zero();
        for r in recs {
            let n: BigInt = r.numerator.parse().map_err(D::Error::custom)?;
            let den: BigInt = r.denominator.parse().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            out = &out + &ExactPoly::monomial(BigRational::new(n, den), r.exponent);
        }
        Ok(out)
    }
}

/// Reduced rational function, scaled so that the lowest non-zero
/// coefficient of the denominator is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRat {
    num: ExactPoly,
    den: ExactPoly,
}

impl ExactRat {
    pub fn new(num: ExactPoly, den: ExactPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(invalid("zero denominator"));
        }
        let g = ExactPoly::gcd(&num, &den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        } else {
            (num, den)
        };
        let low = den.terms().next().map(|(_, c)| c.clone()).unwrap();
        let inv = low.recip();
        Ok(ExactRat { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn from_poly(p: ExactPoly) -> Self {
        ExactRat { num: p, den: ExactPoly::one() }
    }

    pub fn numerator(&self) -> &ExactPoly {
        &self.num
    }

    pub fn denominator(&self) -> &ExactPoly {
        &self.den
    }

    pub fn as_poly(&self) -> Option<&ExactPoly> {
        (self.den == ExactPoly::one()).then_some(&self.num)
    }

    pub fn add(&self, o: &ExactRat) -> ExactRat {
        ExactRat::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).expect("non-zero")
    }

    pub fn mul(&self, o: &ExactRat) -> ExactRat {
        ExactRat::new(&self.num * &o.num, &self.den * &o.den).expect("non-zero")
    }

    pub fn mul_poly(&self, p: &ExactPoly) -> ExactRat {
        ExactRat::new(&self.num * p, self.den.clone()).expect("non-zero")
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }
}

impl fmt::Display for ExactRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == ExactPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl FromStr for ExactRat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once(") / (") {
            Some((n, d)) => {
                let n = n.strip_prefix('(').ok_or_else(|| Error::Parse("missing `(`".into()))?;
                let d = d.strip_suffix(')').ok_or_else(|| Error::Parse("missing `)`".into()))?;
                ExactRat::new(n.parse()?, d.parse()?)
            }
            None => Ok(ExactRat::from_poly(s.parse()?)),
        }
    }
}

/// `num / Π (1 − x^k)^{m_k}` with the factor structure kept explicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredRat {
    pub num: ExactPoly,
    /// `k ↦ m_k`.
    pub factors: BTreeMap<usize, u32>,
}

impl FactoredRat {
    pub fn from_poly(num: ExactPoly) -> Self {
        FactoredRat { num, factors: BTreeMap::new() }
    }

    /// `x^k / (1 − x^k)`.
    pub fn geometric(k: usize) -> Self {
        FactoredRat { num: ExactPoly::x_pow(k), factors: BTreeMap::from([(k, 1)]) }
    }

    pub fn mul(&self, o: &FactoredRat) -> FactoredRat {
        let mut factors = self.factors.clone();
        for (&k, &m) in &o.factors {
            *factors.entry(k).or_insert(0) += m;
        }
        FactoredRat { num: &self.num * &o.num, factors }
    }

    pub fn scale(&self, c: &BigRational) -> FactoredRat {
        FactoredRat { num: self.num.scale(c), factors: self.factors.clone() }
    }

    fn lifted_to(&self, target: &BTreeMap<usize, u32>) -> ExactPoly {
        let mut num = self.num.clone();
        for (&k, &m) in target {
            let have = self.factors.get(&k).copied().unwrap_or(0);
            num = &num * &ExactPoly::one_minus_x_pow(k).pow(m - have);
        }
        num
    }

    /// Sum over a common denominator with the larger multiplicities.
    pub fn sum<'a, I: IntoIterator<Item = &'a FactoredRat>>(items: I) -> FactoredRat {
        let items: Vec<&FactoredRat> = items.into_iter().collect();
        let mut target = BTreeMap::new();
        for it in &items {
            for (&k, &m) in &it.factors {
                let e = target.entry(k).or_insert(0);
                *e = (*e).max(m);
            }
        }
        let mut num = ExactPoly::zero();
        for it in &items {
            num = &num + &it.lifted_to(&target);
        }
        FactoredRat { num, factors: target }
    }

    pub fn denominator_poly(&self) -> ExactPoly {
        self.factors.iter().fold(ExactPoly::one(), |acc, (&k, &m)| &acc * &ExactPoly::one_minus_x_pow(k).pow(m))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.factors.iter().map(|(&k, &m)| (1.0 - x.powi(k as i32)).powi(m as i32)).product::<f64>()
    }

    /// Cancels cyclotomic factors of the denominator against the numerator
    /// and returns the reduced rational function.
    pub fn normalize(&self) -> ExactRat {
        let mut exps: BTreeMap<usize, u32> = BTreeMap::new();
        let mut sign_flips = 0u32;
        for (&k, &m) in &self.factors {
            sign_flips += m;
            for d in (1..=k).filter(|d| k % d == 0) {
                *exps.entry(d).or_insert(0) += m;
            }
        }
        let mut num = self.num.clone();
        let mut den = ExactPoly::one();
        for (&d, &e) in &exps {
            let phi = cyclotomic(d);
            let mut left = e;
            while left > 0 {
                match num.div_exact(&phi) {
                    Some(q) if !num.is_zero() => {
                        num = q;
                        left -= 1;
                    }
                    _ => break,
                }
            }
            den = &den * &phi.pow(left);
        }
        if sign_flips % 2 == 1 {
            den = -&den;
        }
        ExactRat::new(num, den).expect("non-zero denominator")
    }
}

impl fmt::Display for FactoredRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .factors
            .iter()
            .map(|(&k, &m)| if m == 1 { format!("(1 - x^{k})") } else { format!("(1 - x^{k})^{m}") })
            .collect();
        write!(f, "({}) / ({})", self.num, den.join(" * "))
    }
}

/// The `d`-th cyclotomic polynomial.
pub fn cyclotomic(d: usize) -> ExactPoly {
    let mut p = &ExactPoly::x_pow(d) - &ExactPoly::one();
    for e in (1..d).filter(|e| d % e == 0) {
        p = p.div_exact(&cyclotomic(e)).expect("cyclotomic factor");
    }
    p
}
