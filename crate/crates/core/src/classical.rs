//! Level-one generators and eta/theta building blocks.

use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::series::QSeries;

static BERNOULLI: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();

/// The Bernoulli number `B_k` (with `B_1 = -1/2`), cached per process.
pub fn bernoulli(k: usize) -> Rational {
    let cache = BERNOULLI.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut table = cache.lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= k {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let m = table.len();
        let mut acc = Rational::new();
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from(b * Integer::from(Integer::binomial_u(m as u32 + 1, j as u32)));
        }
        table.push(-acc / Integer::from(m + 1));
    }
    table[k].clone()
}

/// `sigma_k(n)` for every `n < len`.
pub fn divisor_sums(k: u32, len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for d in 1..len {
        let dk = Integer::from(d).pow(k);
        for n in (d..len).step_by(d) {
            out[n] += &dk;
        }
    }
    out
}

/// Normalized Eisenstein series `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`.
pub fn eisenstein(k: i64, prec: i64) -> Result<QSeries> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::UnsupportedWeight(k));
    }
    let factor = Rational::from(-2 * k) / bernoulli(k as usize);
    let len = prec.max(0) as usize;
    let sums = divisor_sums(k as u32 - 1, len);
    let coeffs = sums
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(n, s)| (n as i64, Rational::from(&factor * s)));
    Ok(&QSeries::from_coeffs(coeffs, prec) + &QSeries::one(prec))
}

/// `prod_{n >= 1} (1 - q^{mn})` known below `q^prec`, by the pentagonal number theorem.
pub fn euler_product(m: i64, prec: i64) -> QSeries {
    assert!(m >= 1, "euler_product needs m >= 1");
    let mut terms = vec![(0i64, 1i64)];
    for k in 1i64.. {
        let g1 = m * k * (3 * k - 1) / 2;
        if g1 >= prec {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        terms.push((g1, sign));
        let g2 = m * k * (3 * k + 1) / 2;
        if g2 < prec {
            terms.push((g2, sign));
        }
    }
    QSeries::from_integers(terms, prec)
}

/// `Delta = q prod (1 - q^n)^24`.
pub fn delta(prec: i64) -> QSeries {
    let body = euler_product(1, (prec - 1).max(0)).pow_int(24).expect("non-negative power");
    body.shift(1).truncate(prec)
}

/// `j = E_4^3 / Delta`.
pub fn j_function(prec: i64) -> QSeries {
    let e4 = eisenstein(4, prec + 1).expect("weight 4 is supported");
    let delta_inv = delta(prec + 2).inv().expect("Delta is nonzero");
    (&e4.pow_int(3).expect("non-negative power") * &delta_inv).truncate(prec)
}

/// `1 + 2 sum_{n >= 1} q^{n^2}`.
pub fn theta(prec: i64) -> QSeries {
    let mut terms = vec![(0i64, 1i64)];
    let mut n = 1i64;
    while n * n < prec {
        terms.push((n * n, 2));
        n += 1;
    }
    QSeries::from_integers(terms, prec)
}

/// A formal product `prod eta(m_i tau)^{e_i}` plus an additive constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotientSpec {
    factors: Vec<(i64, i64)>,
    additive_constant: Rational,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(i64, i64)>, additive_constant: Rational) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain("eta quotient needs at least one factor".into()));
        }
        if factors.iter().any(|&(m, _)| m < 1) {
            return Err(Error::Domain("eta multipliers must be positive".into()));
        }
        let mut ms: Vec<i64> = factors.iter().map(|f| f.0).collect();
        ms.sort_unstable();
        ms.dedup();
        if ms.len() != factors.len() {
            return Err(Error::Domain("eta multipliers must be distinct".into()));
        }
        Ok(EtaQuotientSpec { factors, additive_constant })
    }

    pub fn factors(&self) -> &[(i64, i64)] {
        &self.factors
    }

    pub fn additive_constant(&self) -> &Rational {
        &self.additive_constant
    }

    /// The exponent `sum m e / 24` of the leading `q`-power.
    pub fn leading_exponent(&self) -> Result<i64> {
        let numerator: i64 = self.factors.iter().map(|(m, e)| m * e).sum();
        if numerator % 24 != 0 {
            return Err(Error::FractionalExponent { numerator });
        }
        Ok(numerator / 24)
    }

    /// Concatenates the factor lists (adding exponents of shared multipliers)
    /// and adds the constants.
    pub fn concat(&self, other: &EtaQuotientSpec) -> EtaQuotientSpec {
        let mut factors = self.factors.clone();
        for &(m, e) in &other.factors {
            match factors.iter_mut().find(|f| f.0 == m) {
                Some(f) => f.1 += e,
                None => factors.push((m, e)),
            }
        }
        EtaQuotientSpec {
            factors,
            additive_constant: Rational::from(&self.additive_constant + &other.additive_constant),
        }
    }
}

pub fn eta_quotient(spec: &EtaQuotientSpec, prec: i64) -> Result<QSeries> {
    let lead = spec.leading_exponent()?;
    let rel = (prec - lead).max(0);
    let mut acc = QSeries::one(rel);
    for &(m, e) in &spec.factors {
        if e == 0 {
            continue;
        }
        let factor = euler_product(m, rel).pow_int(e)?;
        acc = &acc * &factor;
    }
    let shifted = acc.shift(lead).truncate(prec);
    Ok(&shifted + &QSeries::constant(spec.additive_constant.clone(), prec))
}
