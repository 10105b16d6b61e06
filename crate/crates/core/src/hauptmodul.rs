//! Hauptmoduls of the Fricke groups `Gamma0(N)*`, their replicates, Faber
//! polynomials and the generalized Hecke operators `T(m)`.
//!
//! Every Hauptmodul here is written as `lambda + c_0 + sum_k c_k lambda^{-k}`
//! for an eta quotient `lambda = q^{-1} + O(1)`:
//!
//! | N | lambda                              | t                                   |
//! |---|-------------------------------------|-------------------------------------|
//! | 1 | (eta(t)/eta(2t))^24                 | (lambda + 256)^3 / lambda^2 - 744   |
//! | 2 | (eta(t)/eta(2t))^24                 | lambda + 24 + 4096 / lambda         |
//! | 3 | (eta(t)/eta(3t))^12                 | lambda + 12 + 729 / lambda          |
//! | 5 | (eta(t)/eta(5t))^6                  | lambda + 6 + 125 / lambda           |
//! | 6 | (eta(t)eta(3t)/(eta(2t)eta(6t)))^6  | lambda + 6 + 64 / lambda            |
//!
//! The exact expansion for `N = 1` is taken from `j - 744` directly; the
//! descriptor above is the one used for numerical evaluation.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};

use crate::classical::{eta_quotient, j_function, EtaQuotientSpec};
use crate::error::{Error, Result};
use crate::series::{div_ceil, QSeries};

/// A supported level `N` in `{1, 2, 3, 5, 6}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(u32);

impl Level {
    pub const ALL: [Level; 5] = [Level(1), Level(2), Level(3), Level(5), Level(6)];

    pub fn new(n: u32) -> Result<Level> {
        match n {
            1 | 2 | 3 | 5 | 6 => Ok(Level(n)),
            _ => Err(Error::UnsupportedLevel(n)),
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn primes(self) -> Vec<u32> {
        prime_factors(self.0 as u64).into_iter().map(|p| p as u32).collect()
    }
}

impl TryFrom<u32> for Level {
    type Error = Error;
    fn try_from(n: u32) -> Result<Level> {
        Level::new(n)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Level of the `m`-th replicate: apply `N -> N/(p, N)` for each prime `p | m`.
pub fn replicate(level: Level, m: u64) -> Level {
    assert!(m >= 1, "replicate index must be positive");
    let mut n = level.0 as u64;
    for p in prime_factors(m) {
        n /= gcd(p, n);
    }
    Level(n as u32)
}

/// `t = lambda + sum_k laurent[k] lambda^{-k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HauptmodulSpec {
    pub level: Level,
    pub lambda: EtaQuotientSpec,
    /// `(k, c)` pairs meaning `c * lambda^{-k}`; `k = 0` is the constant.
    pub laurent: Vec<(i64, Integer)>,
}

impl HauptmodulSpec {
    pub fn for_level(level: Level) -> HauptmodulSpec {
        let zero = Rational::new();
        let (factors, laurent): (Vec<(i64, i64)>, Vec<(i64, i64)>) = match level.0 {
            1 => (vec![(1, 24), (2, -24)], vec![(0, 24), (1, 196608), (2, 16777216)]),
            2 => (vec![(1, 24), (2, -24)], vec![(0, 24), (1, 4096)]),
            3 => (vec![(1, 12), (3, -12)], vec![(0, 12), (1, 729)]),
            5 => (vec![(1, 6), (5, -6)], vec![(0, 6), (1, 125)]),
            6 => (vec![(1, 6), (3, 6), (2, -6), (6, -6)], vec![(0, 6), (1, 64)]),
            _ => unreachable!("Level only holds supported values"),
        };
        HauptmodulSpec {
            level,
            lambda: EtaQuotientSpec::new(factors, zero).expect("static spec is valid"),
            laurent: laurent.into_iter().map(|(k, c)| (k, Integer::from(c))).collect(),
        }
    }

    /// Replicate levels `p -> N/(p, N)` for the primes dividing `N`.
    pub fn replicate_levels(&self) -> Vec<(u32, Level)> {
        self.level.primes().into_iter().map(|p| (p, replicate(self.level, p as u64))).collect()
    }

    /// Expands the descriptor as a `q`-series known below `q^prec`.
    pub fn expand(&self, prec: i64) -> QSeries {
        let max_k = self.laurent.iter().map(|(k, _)| *k).max().unwrap_or(0);
        // lambda^{-k} has lead k, so lambda needs prec + 2k terms of relative precision
        let lambda = eta_quotient(&self.lambda, prec + 2 * max_k.max(1)).expect("integral lead exponent");
        let inv = lambda.inv().expect("lambda is nonzero");
        let mut t = lambda.truncate(prec);
        let mut power = QSeries::one(i64::MAX);
        for k in 0..=max_k {
            if k > 0 {
                power = &power * &inv;
            }
            if let Some((_, c)) = self.laurent.iter().find(|(kk, _)| *kk == k) {
                let term = if k == 0 {
                    QSeries::constant(Rational::from(c), prec)
                } else {
                    power.scale(&Rational::from(c))
                };
                t = &t + &term;
            }
        }
        t.truncate(prec)
    }
}

static EXPANSIONS: OnceLock<Mutex<HashMap<Level, QSeries>>> = OnceLock::new();

/// The normalized Hauptmodul `q^{-1} + sum_{k >= 1} H_k q^k`, known below `q^prec`.
pub fn hauptmodul_expand(level: Level, prec: i64) -> QSeries {
    let memo = EXPANSIONS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = memo.lock().unwrap_or_else(|e| e.into_inner()).get(&level) {
        if s.prec() >= prec {
            return s.truncate(prec);
        }
    }
    let series = if level.0 == 1 {
        &j_function(prec) - &QSeries::constant(744, prec)
    } else {
        HauptmodulSpec::for_level(level).expand(prec)
    };
    let mut table = memo.lock().unwrap_or_else(|e| e.into_inner());
    let slot = table.entry(level).or_insert_with(|| series.clone());
    if slot.prec() < series.prec() {
        *slot = series.clone();
    }
    series
}

/// `t_n = P_n(t)` with `t_n = q^{-n} + O(q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaberPoly {
    pub level: Level,
    pub n: u32,
    /// `coeffs[k]` multiplies `t^k`.
    pub coeffs: Vec<Integer>,
}

impl FaberPoly {
    pub fn evaluate(&self, t: &QSeries) -> QSeries {
        let poly: Vec<Rational> = self.coeffs.iter().map(Rational::from).collect();
        t.eval_poly(&poly)
    }
}

impl fmt::Display for FaberPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let abs = Integer::from(c.abs_ref());
            let mono = match (k, abs == 1) {
                (0, _) => abs.to_string(),
                (1, true) => "t".to_string(),
                (1, false) => format!("{abs}*t"),
                (_, true) => format!("t^{k}"),
                (_, false) => format!("{abs}*t^{k}"),
            };
            if first {
                write!(f, "{sign}{mono}")?;
            } else {
                write!(f, " {sign} {mono}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Faber polynomial and its expansion known below `q^prec`.
pub fn faber_with_series(level: Level, n: u32, prec: i64) -> (FaberPoly, QSeries) {
    assert!(n >= 1, "Faber index must be positive");
    let n_i = n as i64;
    // t^k loses k - 1 terms of precision
    let t = hauptmodul_expand(level, prec + n_i);
    let mut powers = vec![QSeries::one(i64::MAX), t.clone()];
    for k in 2..=n as usize {
        let next = &powers[k - 1] * &t;
        powers.push(next);
    }
    let mut coeffs = vec![Rational::new(); n as usize + 1];
    coeffs[n as usize] = Rational::from(1);
    let mut s = powers[n as usize].clone();
    for e in (-n_i + 1)..=0 {
        let c = s.coeff(e);
        if c == 0 {
            continue;
        }
        let k = (-e) as usize;
        s = &s - &powers[k].scale(&c);
        coeffs[k] -= &c;
    }
    let s = s.truncate(prec);
    let coeffs = coeffs
        .into_iter()
        .map(|c| {
            assert!(*c.denom() == 1, "Faber coefficient {c} is not integral");
            c.into_numer_denom().0
        })
        .collect();
    (FaberPoly { level, n, coeffs }, s)
}

pub fn faber(level: Level, n: u32, prec: i64) -> FaberPoly {
    faber_with_series(level, n, prec).0
}

/// `t_n` of `level`, with the convention `t_0 = 0` used by the index arithmetic.
pub fn faber_series(level: Level, n: u32, prec: i64) -> QSeries {
    if n == 0 {
        return QSeries::zero(prec);
    }
    faber_with_series(level, n, prec).1
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// `t_n | T(m) = sum_{ad = m} d * U_d(t_n^{(a)})(q^a)`.
pub fn hecke_t(level: Level, n: u32, m: u64, prec: i64) -> QSeries {
    assert!(m >= 1, "Hecke index must be positive");
    let mut acc: Option<QSeries> = None;
    for a in divisors(m) {
        let d = m / a;
        let (a_i, d_i) = (a as i64, d as i64);
        let inner = faber_series(replicate(level, a), n, d_i * div_ceil(prec, a_i));
        let term = inner.u_operator(d_i).scale_exponents(a_i).scale(&Rational::from(d)).truncate(prec);
        acc = Some(match acc {
            None => term,
            Some(s) => &s + &term,
        });
    }
    acc.expect("m has at least one divisor")
}

/// `t_x` where a non-integral or non-positive index gives `0`.
fn t_index(level: Level, num: u64, den: u64, prec: i64) -> QSeries {
    if num == 0 || !num.is_multiple_of(den) {
        QSeries::zero(prec)
    } else {
        faber_series(level, (num / den) as u32, prec)
    }
}

/// `t_{l p^{k+1}} = t_{l p^k} | T(p) - p t^{(p)}_{l p^{k-1}}`, coefficientwise below `q^prec`.
pub fn check_composition(level: Level, p: u32, l: u32, k: u32, prec: i64) -> bool {
    let p64 = p as u64;
    let lpk = l as u64 * p64.pow(k);
    let lhs = faber_series(level, (lpk * p64) as u32, prec);
    let hecke = hecke_t(level, lpk as u32, p64, prec);
    let correction = t_index(replicate(level, p64), lpk, p64, prec).scale(&Rational::from(p));
    lhs == (&hecke - &correction)
}

/// `p U_p(t_{l p^k}) + t_{l p^k} = t^{(p)}_{l p^k} + p t^{(p)}_{l p^{k-1}}`, below `q^prec`.
pub fn check_compression(level: Level, p: u32, l: u32, k: u32, prec: i64) -> bool {
    let p64 = p as u64;
    let lpk = l as u64 * p64.pow(k);
    let rep = replicate(level, p64);
    let t = faber_series(level, lpk as u32, prec * p as i64);
    let lhs = &t.u_operator(p as i64).scale(&Rational::from(p)) + &t.truncate(prec);
    let rhs = &faber_series(rep, lpk as u32, prec)
        + &t_index(rep, lpk, p64, prec).scale(&Rational::from(p));
    lhs == rhs
}
