//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] knows its coefficients for every exponent below `prec`;
//! anything at or above `prec` is unknown. Every operation derives the
//! precision of its result from the precision of its inputs, so truncation
//! is contagious and no coefficient is ever fabricated.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision beyond the pole order when a caller does not ask for one.
pub const DEFAULT_TERMS: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: BTreeMap<i64, Rational>,
    prec: i64,
}

impl QSeries {
    pub fn zero(prec: i64) -> Self {
        QSeries { coeffs: BTreeMap::new(), prec }
    }

    pub fn one(prec: i64) -> Self {
        Self::monomial(0, Rational::from(1), prec)
    }

    pub fn constant(c: impl Into<Rational>, prec: i64) -> Self {
        Self::monomial(0, c.into(), prec)
    }

    /// `c * q^e`, known up to `prec`.
    pub fn monomial(e: i64, c: impl Into<Rational>, prec: i64) -> Self {
        Self::from_coeffs([(e, c.into())], prec)
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Zero coefficients
    /// and exponents at or beyond `prec` are dropped; repeated exponents add.
    pub fn from_coeffs<I, C>(coeffs: I, prec: i64) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<Rational>,
    {
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (e, c) in coeffs {
            if e >= prec {
                continue;
            }
            *map.entry(e).or_default() += c.into();
        }
        map.retain(|_, c| *c != 0);
        QSeries { coeffs: map, prec }
    }

    pub fn from_integers<I>(coeffs: I, prec: i64) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        Self::from_coeffs(coeffs.into_iter().map(|(e, c)| (e, Rational::from(c))), prec)
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Lowest exponent with a nonzero coefficient, or `prec` for the zero series.
    pub fn lead(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.prec)
    }

    pub fn lead_coeff(&self) -> Option<&Rational> {
        self.coeffs.values().next()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^e`.
    ///
    /// Panics if `e >= prec`: that coefficient is unknown.
    pub fn coeff(&self, e: i64) -> Rational {
        self.try_coeff(e)
            .unwrap_or_else(|| panic!("coefficient of q^{e} requested beyond precision {}", self.prec))
    }

    pub fn try_coeff(&self, e: i64) -> Option<Rational> {
        if e >= self.prec {
            None
        } else {
            Some(self.coeffs.get(&e).cloned().unwrap_or_default())
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        QSeries { coeffs: self.coeffs.range(..prec).map(|(&e, c)| (e, c.clone())).collect(), prec }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| *c.denom() == 1)
    }

    /// The coefficients as integers, or `None` if some coefficient has a denominator.
    pub fn to_integers(&self) -> Option<BTreeMap<i64, Integer>> {
        self.coeffs
            .iter()
            .map(|(&e, c)| (*c.denom() == 1).then(|| (e, c.numer().clone())))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if *c == 0 {
            return QSeries::zero(self.prec);
        }
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, x)| (e, Rational::from(x * c))).collect(),
            prec: self.prec,
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
            prec: self.prec.saturating_add(k),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let Some((&lead, c0)) = self.coeffs.iter().next() else {
            return Err(Error::ZeroSeries { prec: self.prec });
        };
        let n = self.prec - lead;
        let c0_inv = Rational::from(c0.recip_ref());
        let unit = c0_inv == 1 || c0_inv == -1;
        // a = q^lead (c0 + a_1 q + ...), a * b = 1 with b = q^-lead (b_0 + b_1 q + ...)
        let tail: Vec<(usize, &Rational)> =
            self.coeffs.iter().skip(1).map(|(&e, c)| ((e - lead) as usize, c)).collect();
        let out: Vec<Rational> = if unit && self.is_integral() {
            let tail: Vec<(usize, &Integer)> = tail.iter().map(|&(i, c)| (i, c.numer())).collect();
            let sign = c0_inv.numer().clone();
            let mut b: Vec<Integer> = Vec::with_capacity(n as usize);
            b.push(sign.clone());
            for m in 1..n as usize {
                let mut acc = Integer::new();
                for &(i, a) in &tail {
                    if i > m {
                        break;
                    }
                    acc += a * &b[m - i];
                }
                acc *= &sign;
                b.push(-acc);
            }
            b.into_iter().map(Rational::from).collect()
        } else {
            let mut b: Vec<Rational> = Vec::with_capacity(n as usize);
            b.push(c0_inv.clone());
            for m in 1..n as usize {
                let mut acc = Rational::new();
                for &(i, a) in &tail {
                    if i > m {
                        break;
                    }
                    acc += Rational::from(a * &b[m - i]);
                }
                acc *= &c0_inv;
                b.push(-acc);
            }
            b
        };
        Ok(QSeries::from_coeffs(
            out.into_iter().enumerate().map(|(i, c)| (i as i64 - lead, c)),
            n - lead,
        ))
    }

    pub fn pow_int(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow_int(-n);
        }
        // a^0 = 1 carries the precision a unit series would have
        let mut result = QSeries::one(self.prec - self.lead());
        let mut base = self.clone();
        let mut e = n;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { &result * &base };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Formal exponential. Requires every known coefficient to sit at an exponent >= 1.
    pub fn exp_series(&self) -> Result<Self> {
        if self.lead() < 1 {
            return Err(Error::Domain(format!(
                "exp needs a series without constant or polar part (lead exponent {})",
                self.lead()
            )));
        }
        // E' = A'E  =>  n e_n = sum_{k=1}^n k a_k e_{n-k}
        let n = self.prec.max(1) as usize;
        let terms: Vec<(usize, Rational)> =
            self.coeffs.iter().map(|(&k, a)| (k as usize, Rational::from(a * k))).collect();
        let mut e: Vec<Rational> = Vec::with_capacity(n);
        e.push(Rational::from(1));
        for m in 1..n {
            let mut acc = Rational::new();
            for (k, ka) in &terms {
                if *k > m {
                    break;
                }
                acc += Rational::from(ka * &e[m - k]);
            }
            acc /= m as u64;
            e.push(acc);
        }
        Ok(QSeries::from_coeffs(e.into_iter().enumerate().map(|(i, c)| (i as i64, c)), self.prec))
    }

    /// Formal logarithm of a series `1 + O(q)`, through `(log V)' = V'/V`.
    pub fn log_series(&self) -> Result<Self> {
        if self.prec <= 0 || self.lead() < 0 || self.coeff(0) != 1 {
            return Err(Error::Domain(
                "log needs constant term 1 and no polar part".to_string(),
            ));
        }
        let quotient = &self.derivative() * &self.inv()?;
        let coeffs = quotient
            .iter()
            .filter(|(e, _)| *e != 0)
            .map(|(e, c)| (e, Rational::from(c / e)))
            .collect::<Vec<_>>();
        Ok(QSeries::from_coeffs(coeffs, self.prec))
    }

    /// Substitutes `q -> q^m`, i.e. `tau -> m tau`.
    pub fn scale_exponents(&self, m: i64) -> Self {
        assert!(m >= 1, "exponent scale must be positive");
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e * m, c.clone())).collect(),
            prec: self.prec.saturating_mul(m),
        }
    }

    /// `sum c_n q^n -> sum c_{mn} q^n`.
    pub fn u_operator(&self, m: i64) -> Self {
        assert!(m >= 1, "U_m needs m >= 1");
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&e, _)| e.rem_euclid(m) == 0)
                .map(|(&e, c)| (e / m, c.clone()))
                .collect(),
            prec: div_ceil(self.prec, m),
        }
    }

    /// `q d/dq`.
    pub fn derivative(&self) -> Self {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&e, _)| e != 0)
                .map(|(&e, c)| (e, Rational::from(c * e)))
                .collect(),
            prec: self.prec,
        }
    }

    /// Evaluates `sum_k poly[k] * self^k` by Horner's rule.
    pub fn eval_poly(&self, poly: &[Rational]) -> QSeries {
        let mut acc: Option<QSeries> = None;
        for c in poly.iter().rev() {
            acc = Some(match acc {
                None => QSeries::constant(c.clone(), i64::MAX),
                Some(s) => &(&s * self) + &QSeries::constant(c.clone(), i64::MAX),
            });
        }
        acc.unwrap_or_else(|| QSeries::zero(i64::MAX))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(QSeriesJson::from(self)).expect("series JSON is always representable")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&QSeriesJson::from(self)).expect("series JSON is always representable")
    }

    /// Decodes the JSON wire form. Only canonical input is accepted:
    /// ascending exponents inside `[lead, prec)`, nonzero coefficients in
    /// lowest terms and `lead` matching the first stored exponent.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: QSeriesJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("series JSON: {e}")))?;
        raw.try_into()
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let raw: QSeriesJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("series JSON: {e}")))?;
        raw.try_into()
    }
}

pub(crate) fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

fn add_impl(a: &QSeries, b: &QSeries, negate_b: bool) -> QSeries {
    let prec = a.prec.min(b.prec);
    let mut coeffs: BTreeMap<i64, Rational> = a.coeffs.range(..prec).map(|(&e, c)| (e, c.clone())).collect();
    for (&e, c) in b.coeffs.range(..prec) {
        let slot = coeffs.entry(e).or_default();
        if negate_b {
            *slot -= c;
        } else {
            *slot += c;
        }
    }
    coeffs.retain(|_, c| *c != 0);
    QSeries { coeffs, prec }
}

fn mul_impl(a: &QSeries, b: &QSeries) -> QSeries {
    let (la, lb) = (a.lead(), b.lead());
    let prec = a.prec.saturating_add(lb).min(b.prec.saturating_add(la));
    if a.is_zero() || b.is_zero() {
        return QSeries::zero(prec);
    }
    let lo = la + lb;
    if prec <= lo {
        return QSeries::zero(prec);
    }
    let len = (prec - lo) as usize;
    // iterate the sparser factor in the outer loop
    let (outer, inner) = if a.coeffs.len() <= b.coeffs.len() { (a, b) } else { (b, a) };
    let inner_terms: Vec<(i64, &Rational)> = inner.iter().collect();
    if a.is_integral() && b.is_integral() {
        let inner_terms: Vec<(i64, &Integer)> = inner_terms.iter().map(|&(e, c)| (e, c.numer())).collect();
        let mut acc: Vec<Integer> = vec![Integer::new(); len];
        for (eo, co) in outer.iter() {
            let co = co.numer();
            for &(ei, ci) in &inner_terms {
                let e = eo + ei;
                if e >= prec {
                    break;
                }
                acc[(e - lo) as usize] += co * ci;
            }
        }
        return QSeries::from_coeffs(
            acc.into_iter().enumerate().map(|(i, c)| (lo + i as i64, Rational::from(c))),
            prec,
        );
    }
    let mut acc: Vec<Rational> = vec![Rational::new(); len];
    for (eo, co) in outer.iter() {
        for &(ei, ci) in &inner_terms {
            let e = eo + ei;
            if e >= prec {
                break;
            }
            acc[(e - lo) as usize] += Rational::from(co * ci);
        }
    }
    QSeries::from_coeffs(acc.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c)), prec)
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        add_impl(self, rhs, false)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        add_impl(self, rhs, true)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        mul_impl(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|(&e, c)| (e, Rational::from(-c))).collect(), prec: self.prec }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for QSeries {
    /// One `exponent: coefficient` row per stored term, right-aligned.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .coeffs
            .keys()
            .map(|e| e.to_string().len())
            .max()
            .unwrap_or(1);
        for (e, c) in &self.coeffs {
            writeln!(f, "{e:>width$}: {}", format_rational(c))?;
        }
        write!(f, "{:>width$}  (known below q^{})", "", self.prec)
    }
}

/// `num/den` with the sign on the numerator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `n` or `n/d` (decimal digits, optional leading minus on the numerator).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let num = parse_integer(num)?;
    let den = match den {
        None => Integer::from(1),
        Some(d) => {
            if d.starts_with('-') {
                return Err(Error::Parse(format!("negative denominator in {text:?}")));
            }
            let d = parse_integer(d)?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            d
        }
    };
    Ok(Rational::from((num, den)))
}

pub fn parse_integer(text: &str) -> Result<Integer> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an integer: {text:?}")));
    }
    Integer::parse(text)
        .map(Integer::from)
        .map_err(|e| Error::Parse(format!("not an integer: {text:?} ({e})")))
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesJson::from(self).serialize(s)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QSeriesJson {
    lead: i64,
    prec: i64,
    coeffs: Vec<(i64, String)>,
}

impl From<&QSeries> for QSeriesJson {
    fn from(s: &QSeries) -> Self {
        QSeriesJson {
            lead: s.lead(),
            prec: s.prec,
            coeffs: s.coeffs.iter().map(|(&e, c)| (e, format_rational(c))).collect(),
        }
    }
}

impl TryFrom<QSeriesJson> for QSeries {
    type Error = Error;

    fn try_from(raw: QSeriesJson) -> Result<QSeries> {
        let bad = |msg: String| Error::Parse(format!("series JSON: {msg}"));
        let mut coeffs = BTreeMap::new();
        let mut last: Option<i64> = None;
        for (e, text) in &raw.coeffs {
            if last.is_some_and(|l| *e <= l) {
                return Err(bad(format!("exponent {e} is not ascending")));
            }
            if *e >= raw.prec {
                return Err(bad(format!("exponent {e} is not below prec {}", raw.prec)));
            }
            let c = parse_rational(text)?;
            if c == 0 {
                return Err(bad(format!("zero coefficient stored at exponent {e}")));
            }
            if format_rational(&c) != *text && c.to_string() != *text {
                return Err(bad(format!("coefficient {text:?} is not in lowest terms")));
            }
            coeffs.insert(*e, c);
            last = Some(*e);
        }
        let series = QSeries { coeffs, prec: raw.prec };
        if series.lead() != raw.lead {
            return Err(bad(format!("lead {} does not match first exponent {}", raw.lead, series.lead())));
        }
        Ok(series)
    }
}
