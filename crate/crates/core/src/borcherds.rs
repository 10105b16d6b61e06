//! The product `q^{-H(d)} prod_u (1 - q^u)^{A*(u^2, d)}` for the Hauptmodul of
//! level `N`, its trace form `q^{-H(d)} exp(-sum_m J_m(d) q^m / m)`, and the
//! recursions between `A*(m^2, d)` and the coefficients `c(m)`.
//!
//! All public series are `delta`-th powers, `delta` the denominator of `H(d)`,
//! so every exponent is an integer.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::cm;
use crate::error::{Error, Result};
use crate::hauptmodul::{gcd, prime_factors, Level};
use crate::plus_space::{fd_family, valid_fd_index};
use crate::quad_forms::{class_number_h, level_nonempty};
use crate::series::{format_rational, QSeries};

/// Number of distinct primes dividing `gcd(u, N)`.
pub fn s_count(u: u64, level: Level) -> u32 {
    prime_factors(gcd(u, level.get() as u64)).len() as u32
}

fn check_pair(level: Level, d: i64) -> Result<()> {
    class_number_h(d)?;
    if !level_nonempty(d, level.get()) || !valid_fd_index(level, d) {
        return Err(Error::NoSuchIndex { level: level.get(), index: d });
    }
    Ok(())
}

/// `delta`, the denominator of `H(d)`, and `delta * H(d)`.
pub fn delta_and_pole(d: i64) -> Result<(Integer, Integer)> {
    let h = class_number_h(d)?;
    let (num, den) = h.into_numer_denom();
    Ok((den, num))
}

/// `A*(u^2, d)` for `u = 1..=terms` (index 0 unused).
pub fn a_star_table(level: Level, d: i64, terms: u64) -> Result<Vec<Integer>> {
    check_pair(level, d)?;
    let top = (terms * terms) as i64;
    let fam = fd_family(level, d, top + 1)?;
    let f = &fam[&d];
    let mut out = vec![Integer::new()];
    for u in 1..=terms {
        let a = f.coeff((u * u) as i64);
        if *a.denom() != 1 {
            return Err(Error::LinearAlgebraFailure(format!("A({}, {d}) = {a} is not an integer", u * u)));
        }
        out.push(a.into_numer_denom().0 << s_count(u, level));
    }
    Ok(out)
}

/// `A*(u^2, d) = 2^{s(u, N)} A(u^2, d)`.
pub fn a_star(level: Level, u: u64, d: i64) -> Result<Integer> {
    assert!(u >= 1, "u must be positive");
    Ok(a_star_table(level, d, u)?.swap_remove(u as usize))
}

fn divisor_weighted(a_star: &[Integer], m: usize) -> Integer {
    (1..=m).filter(|u| m.is_multiple_of(*u)).map(|u| Integer::from(&a_star[u] * u as u64)).sum()
}

/// `J_m(d) = sum_{u | m} u A*(u^2, d)`.
pub fn trace_j(level: Level, m: u64, d: i64) -> Result<Integer> {
    let table = a_star_table(level, d, m)?;
    Ok(divisor_weighted(&table, m as usize))
}

/// `(1 - q^u)^e` known below `q^prec`.
fn binomial_factor(u: i64, e: &Integer, prec: i64) -> QSeries {
    let mut terms = vec![(0i64, Rational::from(1))];
    let mut c = Integer::from(1);
    let mut k = 1i64;
    while u * k < prec {
        // c_k = c_{k-1} * (k - 1 - e) / k
        c *= Integer::from(k - 1) - e;
        c.div_exact_mut(&Integer::from(k));
        if c == 0 {
            break;
        }
        terms.push((u * k, Rational::from(&c)));
        k += 1;
    }
    QSeries::from_coeffs(terms, prec)
}

/// `q^{-delta H(d)} prod_{u=1}^{terms} (1 - q^u)^{delta A*(u^2, d)}`, with
/// `c(0..=terms)` known.
pub fn product_side(level: Level, d: i64, terms: u64) -> Result<QSeries> {
    let (delta, pole) = delta_and_pole(d)?;
    let table = a_star_table(level, d, terms)?;
    Ok(product_from_table(&delta, &pole, &table, terms))
}

fn product_from_table(delta: &Integer, pole: &Integer, table: &[Integer], terms: u64) -> QSeries {
    let prec = terms as i64 + 1;
    let mut acc = QSeries::one(prec);
    for u in 1..=terms as usize {
        let e = Integer::from(delta * &table[u]);
        if e != 0 {
            acc = &acc * &binomial_factor(u as i64, &e, prec);
        }
    }
    acc.shift(-pole.to_i64().expect("small pole order"))
}

/// `q^{-delta H(d)} exp(-delta sum_{m=1}^{terms} J_m(d) q^m / m)`.
pub fn trace_side(level: Level, d: i64, terms: u64) -> Result<QSeries> {
    let (delta, pole) = delta_and_pole(d)?;
    let table = a_star_table(level, d, terms)?;
    let prec = terms as i64 + 1;
    let log = QSeries::from_coeffs(
        (1..=terms as usize).map(|m| {
            let j = divisor_weighted(&table, m);
            (m as i64, -Rational::from((Integer::from(&delta * &j), Integer::from(m))))
        }),
        prec,
    );
    Ok(log.exp_series()?.shift(-pole.to_i64().expect("small pole order")))
}

/// `A*(m^2, d)` for `m = 1..=c.len()` from `c(1), c(2), ...`, through
/// `A*(m^2) = -c(m)/delta - (1/m) [sum_{u | m, u < m} u A*(u^2) + sum_{k < m} c(m - k) sum_{u | k} u A*(u^2)]`.
pub fn recursion_a_from_c(delta: &Integer, c: &[Integer]) -> Result<Vec<Integer>> {
    let mut a = vec![Integer::new()];
    let cc = |i: usize| -> &Integer { &c[i - 1] };
    for m in 1..=c.len() {
        let mut bracket = Integer::new();
        for u in (1..m).filter(|u| m % u == 0) {
            bracket += Integer::from(&a[u] * u as u64);
        }
        for k in 1..m {
            bracket += Integer::from(cc(m - k) * &divisor_weighted(&a, k));
        }
        let value = -Rational::from((cc(m).clone(), delta.clone())) - Rational::from((bracket, Integer::from(m)));
        if *value.denom() != 1 {
            return Err(Error::NonIntegralResult { m });
        }
        a.push(value.into_numer_denom().0);
    }
    a.remove(0);
    Ok(a)
}

/// Inverse of [`recursion_a_from_c`]:
/// `-m c(m) = delta sum_{u | m} u A*(u^2) + sum_{k < m} c(m - k) delta sum_{u | k} u A*(u^2)`.
pub fn c_from_a_star(delta: &Integer, a_star: &[Integer]) -> Vec<Integer> {
    let mut a = vec![Integer::new()];
    a.extend(a_star.iter().cloned());
    let mut c: Vec<Integer> = vec![Integer::from(1)];
    for m in 1..=a_star.len() {
        let mut acc = Integer::from(delta * &divisor_weighted(&a, m));
        for k in 1..m {
            acc += Integer::from(&c[m - k] * &Integer::from(delta * &divisor_weighted(&a, k)));
        }
        let (q, r) = acc.div_rem(Integer::from(m));
        assert!(r == 0, "c({m}) is not integral");
        c.push(-q);
    }
    c.remove(0);
    c
}

/// `c(1..=m)` computed from the `A*` values of the `f` family.
pub fn recursion_c_from_a(level: Level, d: i64, m: u64) -> Result<Vec<Integer>> {
    let (delta, _) = delta_and_pole(d)?;
    let table = a_star_table(level, d, m)?;
    Ok(c_from_a_star(&delta, &table[1..]))
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchStatus {
    pub matched: bool,
    /// The lowest exponent at which two sides differ.
    pub first_mismatch: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductCertificate {
    pub level: u32,
    pub d: i64,
    pub delta: String,
    pub class_number: String,
    pub terms: u64,
    pub product_side: QSeries,
    pub trace_side: QSeries,
    pub cm_side: Option<QSeries>,
    pub cm_residual: Option<f64>,
    pub cm_bits: Option<u32>,
    /// `(u, A*(u^2, d))`.
    pub a_star: Vec<(u64, String)>,
    pub status: MatchStatus,
}

fn first_difference(a: &QSeries, b: &QSeries) -> Option<i64> {
    let prec = a.prec().min(b.prec());
    let lo = a.lead().min(b.lead());
    (lo..prec).find(|&e| a.coeff(e) != b.coeff(e)).or_else(|| (a.prec() != b.prec()).then_some(prec))
}

/// Builds both exact sides (and the numerical CM side when asked) and compares them.
pub fn verify_theorem(level: Level, d: i64, terms: u64, with_cm: bool) -> Result<ProductCertificate> {
    let (delta, _) = delta_and_pole(d)?;
    let product = product_side(level, d, terms)?;
    let trace = trace_side(level, d, terms)?;
    let table = a_star_table(level, d, terms)?;
    let cm_result = if with_cm {
        Some(cm::cm_product_side_adaptive(level, d, terms, cm::default_bits())?)
    } else {
        None
    };
    let mut mismatch = first_difference(&product, &trace);
    if let Some(cmp) = &cm_result {
        let m2 = first_difference(&product, &cmp.series);
        mismatch = match (mismatch, m2) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
    }
    Ok(ProductCertificate {
        level: level.get(),
        d,
        delta: delta.to_string(),
        class_number: format_rational(&class_number_h(d)?),
        terms,
        product_side: product,
        trace_side: trace,
        cm_residual: cm_result.as_ref().map(|c| c.residual),
        cm_bits: cm_result.as_ref().map(|c| c.bits),
        cm_side: cm_result.map(|c| c.series),
        a_star: table.iter().enumerate().skip(1).map(|(u, a)| (u as u64, a.to_string())).collect(),
        status: MatchStatus { matched: mismatch.is_none(), first_mismatch: mismatch },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(n: u32) -> Level {
        Level::new(n).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn a_star_worked_values() {
        assert_eq!(a_star(lv(2), 1, 4).unwrap(), -52);
        assert_eq!(a_star(lv(2), 2, 4).unwrap(), 544);
        assert_eq!(a_star(lv(2), 3, 4).unwrap(), -8244);
        assert_eq!(a_star(lv(2), 1, 3), Err(Error::NoSuchIndex { level: 2, index: 3 }));
    }

    #[test]
    fn trace_value_level_two() {
        assert_eq!(trace_j(lv(2), 1, 4).unwrap(), -52);
    }

    #[test]
    fn worked_product_series() {
        let p = product_side(lv(2), 4, 3).unwrap();
        assert_eq!(p, QSeries::from_integers([(-1, 1), (0, 104), (1, 4372), (2, 96256)], 3));
    }

    #[test]
    fn recursion_worked_example() {
        let a = recursion_a_from_c(&Integer::from(2), &ints(&[104, 4372, 96256])).unwrap();
        assert_eq!(a, ints(&[-52, 544, -8244]));
        assert_eq!(recursion_c_from_a(lv(2), 4, 3).unwrap(), ints(&[104, 4372, 96256]));
        assert_eq!(
            recursion_a_from_c(&Integer::from(2), &ints(&[105])),
            Err(Error::NonIntegralResult { m: 1 })
        );
    }

    #[test]
    fn exp_matches_binomial_product() {
        // exp(-sum_m (sum_{u|m} u B_u) q^m / m) = prod (1 - q^u)^{B_u}
        let b = ints(&[0, 3, -2, 5, 0, -1, 7]);
        let terms = 6;
        let prod = product_from_table(&Integer::from(1), &Integer::new(), &b, terms);
        let log = QSeries::from_coeffs(
            (1..=terms as usize).map(|m| (m as i64, -Rational::from((divisor_weighted(&b, m), Integer::from(m))))),
            terms as i64 + 1,
        );
        assert_eq!(log.exp_series().unwrap(), prod);
    }

    #[test]
    fn small_theorem_instances() {
        for (n, d) in [(2, 4), (3, 3), (1, 3)] {
            let cert = verify_theorem(lv(n), d, 12, false).unwrap();
            assert!(cert.status.matched, "N={n} d={d}");
        }
        let cert = verify_theorem(lv(3), 3, 5, false).unwrap();
        assert_eq!(cert.product_side.lead(), -1);
    }
}
