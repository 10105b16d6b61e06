//! Numerical evaluation of eta quotients and Hauptmoduls at CM points.
//!
//! `eta(tau)` is computed by moving `tau` into the standard fundamental domain
//! with `tau -> tau + 1` and `tau -> -1/tau`, then summing the pentagonal
//! series. Each factor `eta(m tau)` of a quotient is reduced on its own.

use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hauptmodul::{faber, hauptmodul_expand, HauptmodulSpec, Level};
use crate::quad_forms::{classes_level, BinaryQF};
use crate::series::QSeries;
use crate::tolerances::{CM_DEFAULT_BITS, CM_MAX_BITS, CM_ROUNDING_ACCEPT, CM_MIN_BITS};

/// Environment variable overriding the default working precision in bits.
pub const BITS_ENV: &str = "BORCHERDS_CM_BITS";

/// The working precision used when a caller does not pass one explicitly.
pub fn default_bits() -> u32 {
    std::env::var(BITS_ENV)
        .ok()
        .and_then(|v| v.parse::<u32>().ok())
        .map(|b| b.clamp(CM_MIN_BITS, CM_MAX_BITS))
        .unwrap_or(CM_DEFAULT_BITS)
}

/// The CM point `(-b + i sqrt(d)) / (2a)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CMPoint {
    pub a: i64,
    pub b: i64,
    pub d: i64,
}

impl CMPoint {
    pub fn new(a: i64, b: i64, d: i64) -> Result<CMPoint> {
        if a <= 0 || d <= 0 {
            return Err(Error::LowerHalfPlane);
        }
        Ok(CMPoint { a, b, d })
    }

    pub fn from_form(q: &BinaryQF) -> CMPoint {
        CMPoint { a: q.a, b: q.b, d: -q.disc() }
    }

    pub fn tau(&self, bits: u32) -> Complex {
        let two_a = Float::with_val(bits, 2 * self.a);
        let re = Float::with_val(bits, -self.b) / &two_a;
        let im = Float::with_val(bits, self.d).sqrt() / &two_a;
        Complex::with_val(bits, (re, im))
    }
}

impl fmt::Display for CMPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(-({}) + i sqrt({})) / {}", self.b, self.d, 2 * self.a)
    }
}

fn guard(bits: u32) -> u32 {
    bits.max(CM_MIN_BITS) + 32
}

/// `exp(2 pi i z)`.
fn e2pi(z: &Complex, prec: u32) -> Complex {
    let two_pi_i = Complex::with_val(prec, (0, Float::with_val(prec, Constant::Pi) * 2u32));
    Complex::with_val(prec, z * &two_pi_i).exp()
}

/// Dedekind eta at `tau` with about `bits` bits of relative accuracy.
pub fn eta_eval(tau: &Complex, bits: u32) -> Result<Complex> {
    let prec = guard(bits);
    if !tau.imag().is_sign_positive() || tau.imag().is_zero() {
        return Err(Error::LowerHalfPlane);
    }
    let mut z = Complex::with_val(prec, tau);
    let mut factor = Complex::with_val(prec, 1);
    for _ in 0..10_000 {
        // tau -> tau - k picks up exp(pi i k / 12)
        let k = Float::with_val(prec, z.real()).round();
        if !k.is_zero() {
            let twelfths = Complex::with_val(prec, (Float::with_val(prec, &k / 24u32), 0));
            factor *= e2pi(&twelfths, prec);
            z -= &k;
        }
        let norm = Float::with_val(prec, z.norm_ref());
        if norm >= 1 {
            break;
        }
        // eta(z) = eta(-1/z) / sqrt(-i z)
        let minus_i_z = Complex::with_val(prec, &z * Complex::with_val(prec, (0, -1)));
        factor /= minus_i_z.sqrt();
        z = -Complex::with_val(prec, z.recip_ref());
    }
    Ok(factor * eta_series(&z, prec))
}

/// `q^{1/24} sum_n (-1)^n q^{n(3n-1)/2}` for `tau` with `Im tau >= sqrt(3)/2`.
fn eta_series(tau: &Complex, prec: u32) -> Complex {
    let q = e2pi(tau, prec);
    let abs_q = Complex::with_val(prec, q.abs_ref()).into_real_imag().0;
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 8));
    let mut sum = Complex::with_val(prec, 1);
    let mut n: u32 = 1;
    loop {
        let e1 = n * (3 * n - 1) / 2;
        let bound = Float::with_val(prec, abs_q.clone().pow(e1));
        if bound < eps {
            break;
        }
        let e2 = n * (3 * n + 1) / 2;
        let term = Complex::with_val(prec, q.clone().pow(e1)) + Complex::with_val(prec, q.clone().pow(e2));
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
    let frac = Complex::with_val(prec, tau / 24u32);
    e2pi(&frac, prec) * sum
}

/// Evaluates `t = lambda + sum_k c_k lambda^{-k}` at `tau`.
pub fn hauptmodul_eval(level: Level, tau: &Complex, bits: u32) -> Result<Complex> {
    let prec = guard(bits);
    let spec = HauptmodulSpec::for_level(level);
    let mut lambda = Complex::with_val(prec, 1);
    for &(m, e) in spec.lambda.factors() {
        let mt = Complex::with_val(prec, tau * m);
        let eta = eta_eval(&mt, prec)?;
        lambda *= eta.pow(e as i32);
    }
    let inv = Complex::with_val(prec, lambda.recip_ref());
    let mut t = lambda;
    for (k, c) in &spec.laurent {
        let term = Complex::with_val(prec, inv.clone().pow(*k as i32)) * Float::with_val(prec, c);
        t += term;
    }
    Ok(t)
}

/// `t_n(tau)` through the Faber polynomial.
pub fn faber_eval(level: Level, n: u32, tau: &Complex, bits: u32) -> Result<Complex> {
    let prec = guard(bits);
    let t = hauptmodul_eval(level, tau, bits)?;
    let poly = faber(level, n, n as i64 + 2);
    let mut acc = Complex::with_val(prec, 0);
    for c in poly.coeffs.iter().rev() {
        acc *= &t;
        acc += Float::with_val(prec, c);
    }
    Ok(acc)
}

/// A CM value `t(alpha_Q)` with its weight `1/w_Q`.
#[derive(Clone, Debug)]
pub struct CmValue {
    pub form: BinaryQF,
    pub weight: Rational,
    pub value: Complex,
}

/// `t(alpha_Q)` for every class of discriminant `-d` at level `N`.
pub fn cm_values(level: Level, d: i64, bits: u32) -> Result<Vec<CmValue>> {
    let classes = classes_level(d, level.get())?;
    if classes.is_empty() {
        return Err(Error::NoSuchIndex { level: level.get(), index: d });
    }
    classes
        .classes
        .into_iter()
        .map(|c| {
            let tau = CMPoint::from_form(&c.form).tau(guard(bits));
            Ok(CmValue { form: c.form, weight: c.weight, value: hauptmodul_eval(level, &tau, bits)? })
        })
        .collect()
}

/// `sum_Q (1/w_Q) t_m(alpha_Q)`.
pub fn numeric_trace(level: Level, m: u32, d: i64, bits: u32) -> Result<Complex> {
    let prec = guard(bits);
    let classes = classes_level(d, level.get())?;
    let mut acc = Complex::with_val(prec, 0);
    for c in classes.classes {
        let tau = CMPoint::from_form(&c.form).tau(prec);
        let v = faber_eval(level, m, &tau, bits)?;
        let w = Float::with_val(prec, c.weight.numer()) / Float::with_val(prec, c.weight.denom());
        acc += v * w;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct CmProduct {
    pub series: QSeries,
    /// Largest distance from a coefficient to its rounded integer.
    pub residual: f64,
    pub bits: u32,
    pub values: Vec<CmValue>,
}

/// `prod_Q (t - t(alpha_Q))^{delta / w_Q}` expanded in `q` and rounded, with
/// `c(0..=terms)` known. Fails with `RoundingTooLarge` above the acceptance tolerance.
pub fn cm_product_side(level: Level, d: i64, terms: u64, bits: u32) -> Result<CmProduct> {
    let prec = guard(bits);
    let values = cm_values(level, d, bits)?;
    let (delta, pole) = crate::borcherds::delta_and_pole(d)?;
    let pole = pole.to_i64().expect("small pole order");
    // complex coefficients of prod (X - v)^e, lowest degree first
    let mut poly = vec![Complex::with_val(prec, 1)];
    for v in &values {
        let e = Rational::from(&v.weight * &delta);
        assert!(*e.denom() == 1, "delta / w_Q is integral");
        for _ in 0..e.numer().to_u32().expect("small exponent") {
            let mut next = vec![Complex::with_val(prec, 0); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= Complex::with_val(prec, c * &v.value);
            }
            poly = next;
        }
    }
    let out_prec = terms as i64 + 1 - pole;
    let t = hauptmodul_expand(level, out_prec + pole + 1);
    let mut coeffs: Vec<Complex> = vec![Complex::with_val(prec, 0); (out_prec + pole) as usize];
    let mut power = QSeries::one(i64::MAX);
    for c in &poly {
        for (e, x) in power.iter() {
            if e < out_prec {
                let x = Float::with_val(prec, x.numer()) / Float::with_val(prec, x.denom());
                coeffs[(e + pole) as usize] += Complex::with_val(prec, c * x);
            }
        }
        power = &power * &t;
    }
    let mut residual = Float::with_val(prec, 0);
    let mut rounded = Vec::with_capacity(coeffs.len());
    for (i, c) in coeffs.iter().enumerate() {
        let (re, im) = c.clone().into_real_imag();
        let nearest = re.clone().round();
        let dist = Float::with_val(prec, &re - &nearest).abs().max(&im.abs());
        if dist > residual {
            residual = dist;
        }
        let n = nearest.to_integer().expect("finite coefficient");
        rounded.push((i as i64 - pole, Rational::from(n)));
    }
    let residual = residual.to_f64_round(Round::Up);
    if residual > CM_ROUNDING_ACCEPT || residual.is_nan() {
        return Err(Error::RoundingTooLarge { residual, tolerance: CM_ROUNDING_ACCEPT });
    }
    Ok(CmProduct { series: QSeries::from_coeffs(rounded, out_prec), residual, bits, values })
}

/// Retries [`cm_product_side`] with doubled precision on `RoundingTooLarge`.
pub fn cm_product_side_adaptive(level: Level, d: i64, terms: u64, start_bits: u32) -> Result<CmProduct> {
    let mut bits = start_bits.max(CM_MIN_BITS);
    loop {
        match cm_product_side(level, d, terms, bits) {
            Err(Error::RoundingTooLarge { .. }) if bits < CM_MAX_BITS => bits = (bits * 2).min(CM_MAX_BITS),
            other => return other,
        }
    }
}

/// Nearest integer to the real part, as an exact integer.
pub fn round_real(z: &Complex) -> Integer {
    Float::with_val(z.prec().0, z.real()).round().to_integer().expect("finite value")
}
