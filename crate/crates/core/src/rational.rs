//! Exact rational arithmetic.
//!
//! Probabilities in the verifier are [`Rational`]s (arbitrary precision,
//! always in lowest terms). On the wire they are strings: `"5/8"`, or just
//! `"3"` when the denominator is one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn format(r: &Rational) -> String {
    // BigRational's Display already omits a unit denominator.
    r.to_string()
}

pub fn parse(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale down huge numerators and denominators by bit length.
    let shift = |x: &BigInt| x.bits().saturating_sub(1000);
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (shift(n), shift(d));
    let nf = (n >> sn).to_f64().unwrap_or(f64::NAN);
    let df = (d >> sd).to_f64().unwrap_or(f64::NAN);
    nf / df * 2f64.powi(sn as i32 - sd as i32)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact `sum_{k in range} 1/k`, by binary splitting so that the only
/// gcd is taken once at the end.
pub fn harmonic_range(lo: u64, hi_inclusive: u64) -> Rational {
    fn split(lo: u64, hi: u64) -> (BigInt, BigInt) {
        if hi - lo == 1 {
            return (BigInt::one(), BigInt::from(lo));
        }
        let mid = lo + (hi - lo) / 2;
        let (pa, qa) = split(lo, mid);
        let (pb, qb) = split(mid, hi);
        (pa * &qb + pb * &qa, qa * qb)
    }
    if lo > hi_inclusive {
        return Rational::zero();
    }
    assert!(lo >= 1, "harmonic_range starts at 1");
    let (p, q) = split(lo, hi_inclusive + 1);
    let g = p.gcd(&q);
    Rational::new_raw(p / &g, q / g)
}

/// Serde adapter for a single rational as a `"num/den"` string.
pub mod serde_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}
