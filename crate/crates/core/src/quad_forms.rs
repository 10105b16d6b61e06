//! Positive-definite binary quadratic forms, level-`N` class representatives
//! and Hurwitz class numbers.

use std::collections::BTreeSet;
use std::fmt;

use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hauptmodul::gcd;

/// The form `a X^2 + b XY + c Y^2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryQF {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQF {
    pub fn new(a: i64, b: i64, c: i64) -> Result<BinaryQF> {
        let q = BinaryQF { a, b, c };
        if a <= 0 || q.disc() >= 0 {
            return Err(Error::Domain(format!("{q} is not positive definite")));
        }
        Ok(q)
    }

    /// `b^2 - 4ac`.
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Substitution `(X, Y) -> (pX + qY, rX + sY)`.
    pub fn transform(&self, p: i64, q: i64, r: i64, s: i64) -> BinaryQF {
        let (a, b, c) = (self.a, self.b, self.c);
        BinaryQF {
            a: a * p * p + b * p * r + c * r * r,
            b: 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            c: a * q * q + b * q * s + c * s * s,
        }
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The root `alpha = (-b + i sqrt(d)) / (2a)` in the upper half plane.
    pub fn cm_point(&self) -> CmPointData {
        CmPointData { a: self.a, b: self.b, d: -self.disc() }
    }

    /// `1/|Gamma_Q|` of the reduced Gamma-class of this form.
    pub fn gamma_weight(&self) -> Rational {
        let r = reduce_gamma(self);
        if r.a == r.b && r.b == r.c {
            Rational::from((1, 3))
        } else if r.b == 0 && r.a == r.c {
            Rational::from((1, 2))
        } else {
            Rational::from(1)
        }
    }
}

impl fmt::Display for BinaryQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// Exact data `(a, b, d)` of the CM point `(-b + i sqrt(d)) / (2a)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CmPointData {
    pub a: i64,
    pub b: i64,
    pub d: i64,
}

/// The reduced representative of the `SL2(Z)`-class of `q`.
pub fn reduce_gamma(q: &BinaryQF) -> BinaryQF {
    let d = -q.disc();
    let (mut a, mut b, mut c) = (q.a, q.b, q.c);
    loop {
        // b into (-a, a]
        let two_a = 2 * a;
        let mut nb = b.rem_euclid(two_a);
        if nb > a {
            nb -= two_a;
        }
        if nb != b {
            b = nb;
            c = (b * b + d) / (4 * a);
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return BinaryQF { a, b, c };
    }
}

fn check_disc(d: i64) -> Result<()> {
    if d <= 0 || !(d % 4 == 0 || d % 4 == 3) {
        return Err(Error::BadDiscriminant(d));
    }
    Ok(())
}

/// All reduced forms of discriminant `-d`, including imprimitive ones.
pub fn reduced_forms(d: i64) -> Result<Vec<BinaryQF>> {
    check_disc(d)?;
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= d {
        for b in (-a + 1)..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let q = BinaryQF { a, b, c };
            if c >= a && q.is_reduced() {
                out.push(q);
            }
        }
        a += 1;
    }
    Ok(out)
}

/// Hurwitz class number `H(d)`.
pub fn class_number_h(d: i64) -> Result<Rational> {
    Ok(reduced_forms(d)?.iter().map(|q| q.gamma_weight()).sum())
}

/// `-d` is a square modulo `4N`.
pub fn level_nonempty(d: i64, level: u32) -> bool {
    minimal_root(d, level).is_some()
}

/// Least `beta >= 0` with `beta^2 = -d mod 4N`.
fn minimal_root(d: i64, level: u32) -> Option<i64> {
    let m = 4 * level as i64;
    (0..m).find(|x| (x * x + d).rem_euclid(m) == 0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormClass {
    pub form: BinaryQF,
    /// `1/w_Q`.
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::series::format_rational(r))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassList {
    pub d: i64,
    pub level: u32,
    pub classes: Vec<FormClass>,
}

impl ClassList {
    pub fn total_weight(&self) -> Rational {
        self.classes.iter().map(|c| c.weight.clone()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// One representative `[a, b, c]` with `N | a` for each `Gamma0(N)*`-class of
/// discriminant `-d`, weighted through the bijection with `SL2(Z)`-classes.
///
/// The middle coefficient is pinned to a fixed residue `beta mod 2N`; the
/// representatives are the first forms met (in increasing `a`) lying in each
/// distinct `SL2(Z)`-class.
pub fn classes_level(d: i64, level: u32) -> Result<ClassList> {
    check_disc(d)?;
    if level == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    let Some(beta) = minimal_root(d, level) else {
        return Ok(ClassList { d, level, classes: Vec::new() });
    };
    let targets: BTreeSet<BinaryQF> = reduced_forms(d)?.into_iter().collect();
    let n = level as i64;
    let mut seen = BTreeSet::new();
    let mut classes = Vec::new();
    let cap = 4 * (d + 4) * n;
    let mut a = n;
    while seen.len() < targets.len() {
        if a > cap {
            return Err(Error::Domain(format!(
                "found only {} of {} classes of discriminant -{d} at level {level}",
                seen.len(),
                targets.len()
            )));
        }
        // b in (-a, a] with b = beta mod 2N
        let two_n = 2 * n;
        let mut b = -a + 1 + (beta - (-a + 1)).rem_euclid(two_n);
        while b <= a {
            let num = b * b + d;
            if num % (4 * a) == 0 {
                let q = BinaryQF { a, b, c: num / (4 * a) };
                let r = reduce_gamma(&q);
                if seen.insert(r) {
                    classes.push(FormClass { form: q, weight: q.gamma_weight() });
                }
            }
            b += two_n;
        }
        a += n;
    }
    Ok(ClassList { d, level, classes })
}

/// `-d` is a square mod `4N` and every `f` with `f^2 | d` is coprime to `N`.
pub fn is_heegner(d: i64, level: u32) -> bool {
    if !level_nonempty(d, level) {
        return false;
    }
    let mut f = 2;
    while f * f <= d {
        if d % (f * f) == 0 && gcd(f as u64, level as u64) != 1 {
            return false;
        }
        f += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(d: i64) -> Rational {
        class_number_h(d).unwrap()
    }

    #[test]
    fn hurwitz_small_values() {
        assert_eq!(h(3), Rational::from((1, 3)));
        assert_eq!(h(4), Rational::from((1, 2)));
        assert_eq!(h(7), 1);
        assert_eq!(h(8), 1);
        assert_eq!(h(11), 1);
        assert_eq!(h(12), Rational::from((4, 3)));
        assert_eq!(h(15), 2);
        assert_eq!(h(16), Rational::from((3, 2)));
        assert_eq!(class_number_h(5), Err(Error::BadDiscriminant(5)));
        assert_eq!(class_number_h(0), Err(Error::BadDiscriminant(0)));
    }

    #[test]
    fn reduction_examples() {
        let f = BinaryQF::new(2, 2, 3).unwrap();
        assert_eq!(reduce_gamma(&f), f);
        let g = BinaryQF::new(1, 1, 1).unwrap();
        assert_eq!(reduce_gamma(&g), g);
        // [6,-1,1] lies in the class of [1,1,6]
        assert_eq!(reduce_gamma(&BinaryQF { a: 6, b: -1, c: 1 }), BinaryQF { a: 1, b: 1, c: 6 });
        assert_eq!(reduce_gamma(&BinaryQF { a: 1, b: -1, c: 1 }), g);
    }

    #[test]
    fn level_classes_examples() {
        let l = classes_level(4, 2).unwrap();
        assert_eq!(l.classes.len(), 1);
        assert_eq!(l.classes[0].form, BinaryQF { a: 2, b: 2, c: 1 });
        assert_eq!(l.classes[0].weight, Rational::from((1, 2)));
        assert_eq!(l.classes[0].form.cm_point(), CmPointData { a: 2, b: 2, d: 4 });
        let l = classes_level(3, 1).unwrap();
        assert_eq!(l.classes.len(), 1);
        assert_eq!(l.classes[0].form, BinaryQF { a: 1, b: 1, c: 1 });
        assert_eq!(l.classes[0].weight, Rational::from((1, 3)));
        assert_eq!(classes_level(8, 3).unwrap().total_weight(), 1);
        assert!(classes_level(3, 2).unwrap().is_empty());
    }

    #[test]
    fn every_class_has_level_divisibility() {
        for level in [1u32, 2, 3, 5, 6] {
            for d in (3..=120).filter(|d| d % 4 == 0 || d % 4 == 3) {
                let l = classes_level(d, level).unwrap();
                for c in &l.classes {
                    assert_eq!(c.form.a % level as i64, 0);
                    assert_eq!(c.form.disc(), -d);
                }
                if !l.is_empty() {
                    assert_eq!(l.total_weight(), h(d), "d={d} N={level}");
                }
            }
        }
    }

    #[test]
    fn heegner_predicate() {
        assert!(!is_heegner(4, 2));
        assert!(is_heegner(7, 2));
        assert!(is_heegner(15, 6));
        assert!(!is_heegner(3, 2));
    }
}
