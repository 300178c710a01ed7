//! Exact rational arithmetic helpers and the `"num/den"` wire format.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational {input:?}: expected \"num/den\" or an integer")]
pub struct ParseRationalError {
    pub input: String,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^{-k}`.
pub fn dyadic(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// `2^{k}` for signed `k`.
pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << (k as usize))
    } else {
        dyadic((-k) as usize)
    }
}

/// If `r = 2^k` exactly, returns `k`.
pub fn exact_log2(r: &Rational) -> Option<i64> {
    if !r.is_positive() {
        return None;
    }
    let is_pow2 = |n: &BigInt| n.is_positive() && (n & (n - BigInt::one())).is_zero();
    let (n, d) = (r.numer(), r.denom());
    if n.is_one() && is_pow2(d) {
        Some(-(d.bits() as i64 - 1))
    } else if d.is_one() && is_pow2(n) {
        Some(n.bits() as i64 - 1)
    } else {
        None
    }
}

/// Largest integer `k` with `2^k <= r`, for `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "floor_log2 of a non-positive value");
    let mut k = r.numer().bits() as i64 - r.denom().bits() as i64;
    while pow2(k) > *r {
        k -= 1;
    }
    while pow2(k + 1) <= *r {
        k += 1;
    }
    k
}

/// Canonical `"num/den"` rendering (always with a denominator).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Compact rendering for tables meant to be read: integers without `/1`.
pub fn display(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format(r)
    }
}

pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err()),
    }
}

/// Lossy conversion for Monte Carlo summaries and human-readable output.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for f64: scale down first
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

/// Draws `true` with probability exactly `p` (clamped to `[0,1]`), by
/// comparing a lazily generated uniform binary expansion with that of `p`.
pub fn sample_bernoulli<R: rand::Rng + ?Sized>(rng: &mut R, p: &Rational) -> bool {
    if !p.is_positive() {
        return false;
    }
    let one = Rational::one();
    if *p >= one {
        return true;
    }
    let mut rest = p.clone();
    loop {
        rest = &rest + &rest;
        let p_bit = rest >= one;
        if p_bit {
            rest -= &one;
        }
        let u_bit: bool = rng.gen();
        if u_bit != p_bit {
            return p_bit;
        }
        if rest.is_zero() {
            // p's expansion ended and u matched it so far: u >= p
            return false;
        }
    }
}

/// Serde adapter: `#[serde(with = "crate::rational::serde_str")]`.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_opt_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?.map(|s| parse(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

pub mod serde_vec_str {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect()
    }
}
