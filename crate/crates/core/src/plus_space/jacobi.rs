//! Weight-3/2 plus-space forms read off from weak Jacobi forms of index `N`.
//!
//! A form `sum c(n, r) q^n zeta^r` of weight 2 and index `N` is built as
//! `sum_i F_i a^i b^{N-i}` with `a = phi_{-2,1}`, `b = phi_{0,1}` and
//! `F_i` weakly holomorphic of weight `2 + 2i`. Its coefficients `c(n, r)`
//! are indexed by `(4Nn - r^2, r)` with `0 <= r <= N`.

use std::collections::BTreeMap;

use rug::Rational;

use crate::classical::{delta, eisenstein};
use crate::error::{Error, Result};
use crate::hauptmodul::Level;
use crate::series::QSeries;

#[derive(Clone, Debug)]
struct JSeries {
    rows: BTreeMap<i64, BTreeMap<i64, Rational>>,
    prec: i64,
}

impl JSeries {
    fn one(prec: i64) -> JSeries {
        JSeries::from_terms([(0, 0, Rational::from(1))], prec)
    }

    fn from_terms<I: IntoIterator<Item = (i64, i64, Rational)>>(terms: I, prec: i64) -> JSeries {
        let mut rows: BTreeMap<i64, BTreeMap<i64, Rational>> = BTreeMap::new();
        for (n, r, c) in terms {
            if n < prec {
                *rows.entry(n).or_default().entry(r).or_default() += c;
            }
        }
        let mut s = JSeries { rows, prec };
        s.prune();
        s
    }

    fn from_q(s: &QSeries) -> JSeries {
        JSeries::from_terms(s.iter().map(|(e, c)| (e, 0, c.clone())), s.prec())
    }

    fn prune(&mut self) {
        for row in self.rows.values_mut() {
            row.retain(|_, c| *c != 0);
        }
        self.rows.retain(|_, row| !row.is_empty());
    }

    fn lead(&self) -> i64 {
        self.rows.keys().next().copied().unwrap_or(self.prec)
    }

    fn add(&self, other: &JSeries) -> JSeries {
        let prec = self.prec.min(other.prec);
        let terms = [self, other].into_iter().flat_map(|s| {
            s.rows.iter().flat_map(|(&n, row)| row.iter().map(move |(&r, c)| (n, r, c.clone())))
        });
        JSeries::from_terms(terms, prec)
    }

    fn scale(&self, k: &Rational) -> JSeries {
        let terms = self
            .rows
            .iter()
            .flat_map(|(&n, row)| row.iter().map(move |(&r, c)| (n, r, Rational::from(c * k))));
        JSeries::from_terms(terms, self.prec)
    }

    fn mul(&self, other: &JSeries) -> JSeries {
        let prec = (self.prec + other.lead()).min(other.prec + self.lead());
        let mut out: BTreeMap<i64, BTreeMap<i64, Rational>> = BTreeMap::new();
        for (&n1, row1) in &self.rows {
            for (&n2, row2) in &other.rows {
                if n1 + n2 >= prec {
                    break;
                }
                let target = out.entry(n1 + n2).or_default();
                for (&r1, c1) in row1 {
                    for (&r2, c2) in row2 {
                        *target.entry(r1 + r2).or_default() += Rational::from(c1 * c2);
                    }
                }
            }
        }
        let mut s = JSeries { rows: out, prec };
        s.prune();
        s
    }
}

/// `(a, b) = (phi_{-2,1}, phi_{0,1})` known for `n < prec`.
fn generators(prec: i64) -> (JSeries, JSeries) {
    let mut x = JSeries::one(prec);
    for n in 1..prec {
        let plus = JSeries::from_terms([(0, 0, Rational::from(1)), (n, 1, Rational::from(-1))], prec);
        let minus = JSeries::from_terms([(0, 0, Rational::from(1)), (n, -1, Rational::from(-1))], prec);
        let geometric = JSeries::from_terms(
            (0..).map(|k| k * n).take_while(|&e| e < prec).map(|e| (e, 0, Rational::from(1))),
            prec,
        );
        let g2 = geometric.mul(&geometric);
        x = x.mul(&plus).mul(&plus).mul(&minus).mul(&minus).mul(&g2).mul(&g2);
    }
    let bracket = JSeries::from_terms(
        [(0, 1, Rational::from(1)), (0, 0, Rational::from(-2)), (0, -1, Rational::from(1))],
        prec,
    );
    let a = bracket.mul(&x);
    // 1 + 12 sum_n sum_{d | n} d (zeta^d - 2 + zeta^{-d}) q^n
    let mut p_terms = vec![(0, 0, Rational::from(1))];
    for n in 1..prec {
        for d in (1..=n).filter(|d| n % d == 0) {
            p_terms.push((n, d, Rational::from(12 * d)));
            p_terms.push((n, -d, Rational::from(12 * d)));
            p_terms.push((n, 0, Rational::from(-24 * d)));
        }
    }
    let b = a.mul(&JSeries::from_terms(p_terms, prec)).add(&x.scale(&Rational::from(12)));
    (a, b)
}

type Coord = (i64, i64);
type Vector = BTreeMap<Coord, Rational>;

/// Reduced echelon basis of the index-`N` space on the polar coordinates.
#[derive(Debug)]
pub(crate) struct GBasis {
    level: Level,
    dmax: i64,
    pivots: BTreeMap<Coord, Vector>,
}

pub(crate) fn g_basis(level: Level, max_pole: i64, dmax: i64) -> Result<GBasis> {
    let n = level.get() as i64;
    let m4 = 4 * n;
    let max_m = (max_pole + n * n) / m4 + 1;
    let q_needed = (dmax + n * n) / m4 + 2;
    let work = q_needed + max_m + 2;
    let (a, b) = generators(work);
    let e4 = eisenstein(4, work).expect("weight 4");
    let e6 = eisenstein(6, work).expect("weight 6");
    let delta_inv = delta(work + 2).inv().expect("Delta is nonzero");

    let mut rows: Vec<Vector> = Vec::new();
    for i in 0..=n {
        let mut ab = JSeries::one(work);
        for _ in 0..i {
            ab = ab.mul(&a);
        }
        for _ in 0..(n - i) {
            ab = ab.mul(&b);
        }
        let k = 2 + 2 * i;
        for mm in 0..=max_m {
            let w = k + 12 * mm;
            for alpha in 0..=w / 4 {
                let rest = w - 4 * alpha;
                if rest % 6 != 0 {
                    continue;
                }
                let beta = rest / 6;
                let s = &(&e4.pow_int(alpha)? * &e6.pow_int(beta)?) * &delta_inv.pow_int(mm)?;
                let phi = JSeries::from_q(&s).mul(&ab);
                if phi.prec < q_needed {
                    return Err(Error::LinearAlgebraFailure(format!(
                        "Jacobi row known only below q^{} (need {q_needed})",
                        phi.prec
                    )));
                }
                rows.push(coordinates(&phi, n, q_needed));
            }
        }
    }
    let mut pivots: BTreeMap<Coord, Vector> = BTreeMap::new();
    for mut v in rows {
        for (key, basis_row) in &pivots {
            if let Some(c) = v.get(key).cloned() {
                axpy(&mut v, &-c, basis_row);
            }
        }
        let Some(piv) = v.iter().find(|(k, c)| k.0 < 0 && **c != 0).map(|(k, _)| *k) else {
            continue;
        };
        let inv = Rational::from(v[&piv].recip_ref());
        for c in v.values_mut() {
            *c *= &inv;
        }
        for basis_row in pivots.values_mut() {
            if let Some(c) = basis_row.get(&piv).cloned() {
                axpy(basis_row, &-c, &v);
            }
        }
        pivots.insert(piv, v);
    }
    Ok(GBasis { level, dmax, pivots })
}

fn coordinates(phi: &JSeries, n: i64, q_needed: i64) -> Vector {
    let mut v = Vector::new();
    for (&qn, row) in phi.rows.range(..q_needed) {
        for (&r, c) in row.range(0..=n) {
            v.insert((4 * n * qn - r * r, r), c.clone());
        }
    }
    v
}

fn axpy(target: &mut Vector, k: &Rational, x: &Vector) {
    for (key, c) in x {
        let slot = target.entry(*key).or_default();
        *slot += Rational::from(k * c);
    }
    target.retain(|_, c| *c != 0);
}

/// The coefficients `B(D, d)` for `-D <= d <= dmax`, keyed by `d`.
pub(crate) fn g_coefficients(basis: &GBasis, big_d: i64) -> Result<BTreeMap<i64, Rational>> {
    let n = basis.level.get() as i64;
    let m4 = 4 * n;
    let targets: Vec<Coord> =
        (0..=n).filter(|r| (r * r - big_d).rem_euclid(m4) == 0).map(|r| (-big_d, r)).collect();
    // Targets that are not pivot columns are tied to pivot ones by an obstruction
    // (e.g. r = 1 and r = 5 at index 6); the principal-part check below confirms them.
    let mut v = Vector::new();
    for row in targets.iter().filter_map(|t| basis.pivots.get(t)) {
        axpy(&mut v, &Rational::from(1), row);
    }
    for (key, c) in v.range(..(0, i64::MIN)) {
        let expected = if targets.contains(key) { 1 } else { 0 };
        if *c != expected {
            return Err(Error::LinearAlgebraFailure(format!(
                "no form with principal part q^-{big_d}: coefficient {c} at {key:?}"
            )));
        }
    }
    let mut out = BTreeMap::new();
    for d in -big_d..=basis.dmax {
        let mut value: Option<Rational> = None;
        for r in (0..=n).filter(|r| (r * r + d).rem_euclid(m4) == 0) {
            let c = v.get(&(d, r)).cloned().unwrap_or_default();
            match &value {
                None => value = Some(c),
                Some(prev) if *prev != c => {
                    return Err(Error::LinearAlgebraFailure(format!(
                        "coefficients at discriminant {d} depend on r ({prev} vs {c})"
                    )));
                }
                _ => {}
            }
        }
        if let Some(c) = value {
            if c != 0 {
                out.insert(d, c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(s: &JSeries, n: i64) -> Vec<(i64, i64)> {
        s.rows
            .get(&n)
            .map(|r| r.iter().map(|(&k, c)| (k, c.to_f64() as i64)).collect())
            .unwrap_or_default()
    }

    #[test]
    fn generator_expansions() {
        let (a, b) = generators(3);
        assert_eq!(row(&a, 0), vec![(-1, 1), (0, -2), (1, 1)]);
        assert_eq!(row(&a, 1), vec![(-2, -2), (-1, 8), (0, -12), (1, 8), (2, -2)]);
        assert_eq!(row(&b, 0), vec![(-1, 1), (0, 10), (1, 1)]);
        assert_eq!(row(&b, 1), vec![(-2, 10), (-1, -64), (0, 108), (1, -64), (2, 10)]);
    }
}
