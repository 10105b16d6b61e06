//! Weakly holomorphic forms in the Kohnen plus space of level `4N`:
//! the weight-1/2 family `f_d = q^{-d} + sum_D A(D, d) q^D` and the
//! weight-3/2 family `g_D = q^{-D} + sum_d B(D, d) q^d`.
//!
//! `f_d` is built from Cohen brackets of `theta` with `E_k(4N tau)` divided by
//! `Delta(4N tau)`, then multiplication by `j(4N tau)`. `g_D` is read off from
//! weak Jacobi forms of index `N`, which shares nothing with the `f` side, so
//! the duality `A(D, d) = -B(D, d)` is a genuine cross-check.

mod jacobi;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Rational;
use serde::Serialize;

use crate::classical::{delta, eisenstein, j_function, theta};
use crate::error::{Error, Result};
use crate::hauptmodul::Level;
use crate::series::{div_ceil, QSeries};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Weight {
    /// Weight 1/2.
    Half,
    /// Weight 3/2.
    ThreeHalves,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlusForm {
    pub level: Level,
    pub weight: Weight,
    /// The pole order.
    pub index: i64,
    pub series: QSeries,
}

impl PlusForm {
    pub fn coeff(&self, n: i64) -> Rational {
        self.series.coeff(n)
    }

    /// Every nonzero coefficient sits at an exponent allowed by the plus condition.
    pub fn satisfies_plus_support(&self) -> bool {
        self.series.iter().all(|(n, _)| in_plus_support(self.weight, self.level, n))
    }
}

pub fn is_square_mod(n: i64, m: i64) -> bool {
    (0..m).any(|x| (x * x - n).rem_euclid(m) == 0)
}

/// `(-1)^{k-1} n` is a square mod `4N`.
pub fn in_plus_support(weight: Weight, level: Level, n: i64) -> bool {
    let m = 4 * level.get() as i64;
    match weight {
        Weight::Half => is_square_mod(n, m),
        Weight::ThreeHalves => is_square_mod(-n, m),
    }
}

/// Indices `d >= 0` for which `f_d` exists.
pub fn valid_fd_index(level: Level, d: i64) -> bool {
    d >= 0 && in_plus_support(Weight::ThreeHalves, level, d)
}

/// Indices `D >= 1` for which `g_D` exists.
pub fn valid_gd_index(level: Level, big_d: i64) -> bool {
    big_d >= 1 && in_plus_support(Weight::Half, level, big_d)
}

/// `x (x - 1) ... (x - j + 1) / j!`.
fn binom(x: &Rational, j: u32) -> Rational {
    let mut r = Rational::from(1);
    for i in 0..j {
        r *= Rational::from(x - i);
        r /= i + 1;
    }
    r
}

/// `[f, g]_n = sum_{r+s=n} (-1)^r C(n+k1-1, s) C(n+k2-1, r) f^{(r)} g^{(s)}`, with `' = q d/dq`.
pub fn cohen_bracket(f: &QSeries, k1: &Rational, g: &QSeries, k2: &Rational, n: u32) -> QSeries {
    let mut df = vec![f.clone()];
    let mut dg = vec![g.clone()];
    for i in 0..n as usize {
        df.push(df[i].derivative());
        dg.push(dg[i].derivative());
    }
    let a = Rational::from(k1 + n) - 1u32;
    let b = Rational::from(k2 + n) - 1u32;
    let mut acc: Option<QSeries> = None;
    for r in 0..=n {
        let s = n - r;
        let mut c = binom(&a, s) * binom(&b, r);
        if r % 2 == 1 {
            c = -c;
        }
        let term = (&df[r as usize] * &dg[s as usize]).scale(&c);
        acc = Some(match acc {
            None => term,
            Some(t) => &t + &term,
        });
    }
    acc.expect("at least one term")
}

const MAX_ROUNDS: i64 = 2;

/// Reduced echelon form with pivots on exponents `<= 0`, lowest exponent first.
fn echelonize(rows: Vec<QSeries>) -> BTreeMap<i64, QSeries> {
    let mut basis: BTreeMap<i64, QSeries> = BTreeMap::new();
    for mut r in rows {
        for (&e, b) in &basis {
            if e < r.prec() {
                let c = r.coeff(e);
                if c != 0 {
                    r = &r - &b.scale(&c);
                }
            }
        }
        let piv = r.lead();
        if piv > 0 || r.is_zero() {
            continue;
        }
        let inv = Rational::from(r.coeff(piv).recip_ref());
        let r = r.scale(&inv);
        for b in basis.values_mut() {
            if piv < b.prec() {
                let c = b.coeff(piv);
                if c != 0 {
                    *b = &*b - &r.scale(&c);
                }
            }
        }
        basis.insert(piv, r);
    }
    basis
}

/// Ingredients at `4N tau`, all known below `q^prec` after division by `Delta(4N tau)`.
struct Lifted {
    half: Rational,
    eis: Vec<(i64, QSeries)>,
    delta_inv: QSeries,
    j: QSeries,
}

impl Lifted {
    fn new(level: Level, prec: i64) -> Lifted {
        let m = 4 * level.get() as i64;
        let top = div_ceil(prec, m) + 4;
        let eis = (1..=4)
            .map(|n| {
                let k = 12 - 2 * n;
                (k, eisenstein(k, top).expect("supported weight").scale_exponents(m))
            })
            .collect();
        Lifted {
            half: Rational::from((1, 2)),
            eis,
            delta_inv: delta(top + 2).inv().expect("Delta is nonzero").scale_exponents(m),
            j: j_function(top).scale_exponents(m),
        }
    }

    /// `[f, E_{12-2n}(4N tau)]_n / Delta(4N tau)` for `n = 1..4`.
    fn brackets(&self, f: &QSeries) -> Vec<QSeries> {
        self.eis
            .iter()
            .zip(1u32..)
            .map(|((k, e), n)| &cohen_bracket(f, &self.half, e, &Rational::from(*k), n) * &self.delta_inv)
            .collect()
    }
}

/// `f_d` for every valid `d < 4N`, known below `q^prec`.
fn base_family(level: Level, prec: i64) -> Result<BTreeMap<i64, QSeries>> {
    let m = 4 * level.get() as i64;
    let seed_prec = prec + m * (MAX_ROUNDS + 2);
    let lifted = Lifted::new(level, seed_prec + 2 * m);
    let th = theta(seed_prec);
    let mut rows = vec![th.clone()];
    rows.extend(lifted.brackets(&th));
    let mut basis = echelonize(rows);
    let wanted: Vec<i64> = (0..m).filter(|&d| valid_fd_index(level, d)).collect();
    let mut round = 0;
    while wanted.iter().any(|d| !basis.contains_key(&-d)) {
        if round == MAX_ROUNDS {
            let missing: Vec<i64> = wanted.iter().copied().filter(|d| !basis.contains_key(&-d)).collect();
            return Err(Error::LinearAlgebraFailure(format!(
                "spanning set at level {level} misses pole orders {missing:?}"
            )));
        }
        round += 1;
        let mut rows: Vec<QSeries> = basis.values().cloned().collect();
        for f in basis.values() {
            rows.extend(lifted.brackets(f));
            rows.push(f * &lifted.j);
        }
        basis = echelonize(rows);
    }
    wanted
        .into_iter()
        .map(|d| {
            let f = &basis[&-d];
            if f.prec() < prec {
                return Err(Error::LinearAlgebraFailure(format!(
                    "f_{d} known only below q^{} (need {prec})",
                    f.prec()
                )));
            }
            Ok((d, f.truncate(prec)))
        })
        .collect()
}

type Family = Arc<BTreeMap<i64, QSeries>>;

static FD_CACHE: OnceLock<Mutex<Vec<(Level, i64, i64, Family)>>> = OnceLock::new();

/// Every `f_d` with valid `d <= dmax`, known below `q^prec`.
pub fn fd_family(level: Level, dmax: i64, prec: i64) -> Result<Family> {
    let cache = FD_CACHE.get_or_init(|| Mutex::new(Vec::new()));
    if let Some((_, _, _, fam)) = cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .iter()
        .find(|(l, dm, p, _)| *l == level && *dm >= dmax && *p >= prec)
    {
        return Ok(fam.clone());
    }
    let fam = Arc::new(build_family(level, dmax, prec)?);
    cache.lock().unwrap_or_else(|e| e.into_inner()).push((level, dmax, prec, fam.clone()));
    Ok(fam)
}

fn build_family(level: Level, dmax: i64, prec: i64) -> Result<BTreeMap<i64, QSeries>> {
    let m = 4 * level.get() as i64;
    let steps = dmax.max(0) / m;
    let work = prec + m * steps;
    let mut fam = base_family(level, work)?;
    let j = j_function(div_ceil(work, m) + 3).scale_exponents(m);
    for d in m..=dmax {
        if !valid_fd_index(level, d) {
            continue;
        }
        let mut f = &j * &fam[&(d - m)];
        for e in (-d + 1)..=0 {
            let c = f.coeff(e);
            if c == 0 {
                continue;
            }
            let lower = fam.get(&-e).ok_or_else(|| {
                Error::LinearAlgebraFailure(format!("polar term q^{e} outside the plus space"))
            })?;
            f = &f - &lower.scale(&c);
        }
        fam.insert(d, f);
    }
    fam.into_iter()
        .filter(|(d, _)| *d <= dmax)
        .map(|(d, f)| {
            if f.prec() < prec {
                return Err(Error::LinearAlgebraFailure(format!(
                    "f_{d} known only below q^{} (need {prec})",
                    f.prec()
                )));
            }
            if !f.is_integral() {
                return Err(Error::LinearAlgebraFailure(format!("f_{d} has non-integral coefficients")));
            }
            Ok((d, f.truncate(prec)))
        })
        .collect()
}

/// `f_{d,N} = q^{-d} + O(q)`, known below `q^prec`.
pub fn build_fd(level: Level, d: i64, prec: i64) -> Result<PlusForm> {
    if !valid_fd_index(level, d) {
        return Err(Error::NoSuchIndex { level: level.get(), index: d });
    }
    let fam = fd_family(level, d, prec)?;
    Ok(PlusForm { level, weight: Weight::Half, index: d, series: fam[&d].truncate(prec) })
}

/// `A(D, d)`: the coefficient of `q^D` in `f_d`.
pub fn coefficient_a(level: Level, big_d: i64, d: i64) -> Result<Rational> {
    if !valid_fd_index(level, d) {
        return Err(Error::NoSuchIndex { level: level.get(), index: d });
    }
    Ok(fd_family(level, d, big_d + 1)?[&d].coeff(big_d))
}

type GCacheEntry = (Level, i64, i64, Arc<jacobi::GBasis>);
static GD_CACHE: OnceLock<Mutex<Vec<GCacheEntry>>> = OnceLock::new();

fn g_basis_cached(level: Level, max_pole: i64, dmax: i64) -> Result<Arc<jacobi::GBasis>> {
    let cache = GD_CACHE.get_or_init(|| Mutex::new(Vec::new()));
    if let Some((_, _, _, b)) = cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .iter()
        .find(|(l, p, d, _)| *l == level && *p >= max_pole && *d >= dmax)
    {
        return Ok(b.clone());
    }
    let b = Arc::new(jacobi::g_basis(level, max_pole, dmax)?);
    cache.lock().unwrap_or_else(|e| e.into_inner()).push((level, max_pole, dmax, b.clone()));
    Ok(b)
}

/// `g_{D,N} = q^{-D} + sum_{d >= 0} B(D, d) q^d`, known below `q^prec`.
pub fn build_gd(level: Level, big_d: i64, prec: i64) -> Result<PlusForm> {
    if !valid_gd_index(level, big_d) {
        return Err(Error::NoSuchIndex { level: level.get(), index: big_d });
    }
    let basis = g_basis_cached(level, big_d, prec - 1)?;
    let coeffs = jacobi::g_coefficients(&basis, big_d)?;
    let series = QSeries::from_coeffs(coeffs, prec);
    if !series.is_integral() {
        return Err(Error::LinearAlgebraFailure(format!("g_{big_d} has non-integral coefficients")));
    }
    Ok(PlusForm { level, weight: Weight::ThreeHalves, index: big_d, series })
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityViolation {
    pub big_d: i64,
    pub d: i64,
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub level: u32,
    pub max_big_d: i64,
    pub max_d: i64,
    pub pairs_checked: usize,
    pub violations: Vec<DualityViolation>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares `A(D, d)` from the `f` family with `-B(D, d)` from the `g` family
/// for every valid `1 <= D <= max_big_d`, `0 <= d <= max_d`.
pub fn duality_check(level: Level, max_big_d: i64, max_d: i64) -> Result<DualityReport> {
    let fam = fd_family(level, max_d, max_big_d + 1)?;
    let mut report = DualityReport {
        level: level.get(),
        max_big_d,
        max_d,
        pairs_checked: 0,
        violations: Vec::new(),
    };
    for big_d in (1..=max_big_d).filter(|&x| valid_gd_index(level, x)) {
        let g = build_gd(level, big_d, max_d + 1)?;
        for (&d, f) in fam.range(..=max_d) {
            let a = f.coeff(big_d);
            let b = g.coeff(d);
            report.pairs_checked += 1;
            if a != -b.clone() {
                report.violations.push(DualityViolation { big_d, d, a: a.to_string(), b: b.to_string() });
            }
        }
    }
    Ok(report)
}

/// Kronecker symbol `(a / n)` for `n >= 1`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let mut n = n;
    let mut result = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    // Jacobi symbol for odd n
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The series with `q^d` coefficient `B(dp^2) + (-d/p) B(d) + p B(d/p^2)`.
pub fn hecke_half_integral(g: &PlusForm, p: u32) -> QSeries {
    let p = p as i64;
    let p2 = p * p;
    let s = &g.series;
    let prec = div_ceil(s.prec(), p2);
    let lo = s.lead() * p2;
    let coeffs = (lo..prec).map(|d| {
        let mut c = s.coeff(d * p2);
        if d >= s.lead() {
            c += s.coeff(d) * kronecker(-d, p as u64);
        }
        if d % p2 == 0 {
            c += s.coeff(d / p2) * p;
        }
        (d, c)
    });
    QSeries::from_coeffs(coeffs.collect::<Vec<_>>(), prec)
}
