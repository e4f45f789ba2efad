//! Exact p-adic valuations and absolute values on rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `p^e` for any integer `e`.
pub fn p_pow(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p);
    let mag = num_traits::pow(base, e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// Formats as `"num/den"`, omitting the denominator when it is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, PadicError> {
    let t = s.trim();
    let err = || PadicError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(t)
            .map(Rational::from_integer)
            .map_err(|_| err()),
    }
}

/// Serde adapter: rationals travel as strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Deterministic primality test. Trial division is plenty for the primes this
/// crate works with, and is exact for every `u64`.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) || p.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) || p.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

pub fn check_prime(p: u64) -> Result<(), PadicError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(PadicError::NonPrime(p))
    }
}

/// A p-adic valuation: either a finite rational value or `+∞` (the valuation
/// of zero). Newton-polygon slopes reuse this type, which is why finite values
/// are rationals rather than integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PValuation {
    Finite(Rational),
    Infinity,
}

impl PValuation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, PValuation::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            PValuation::Finite(v) => Some(v),
            PValuation::Infinity => None,
        }
    }

    /// Integer value for valuations of rationals. `None` for `+∞` or fractional values.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            PValuation::Finite(v) if v.is_integer() => v.to_integer().to_i64(),
            _ => None,
        }
    }
}

impl Ord for PValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PValuation::Infinity, PValuation::Infinity) => Ordering::Equal,
            (PValuation::Infinity, _) => Ordering::Greater,
            (_, PValuation::Infinity) => Ordering::Less,
            (PValuation::Finite(a), PValuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for PValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for PValuation {
    type Output = PValuation;
    fn add(self, rhs: PValuation) -> PValuation {
        match (self, rhs) {
            (PValuation::Finite(a), PValuation::Finite(b)) => PValuation::Finite(a + b),
            _ => PValuation::Infinity,
        }
    }
}

impl fmt::Display for PValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValuation::Finite(v) => write!(f, "{}", format_rational(v)),
            PValuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Multiplicity of `p` in a nonzero integer.
pub(crate) fn vp_bigint(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Integer valuation of a nonzero rational. Callers guarantee primality.
pub(crate) fn vp_int(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(vp_bigint(x.numer(), p) - vp_bigint(x.denom(), p))
    }
}

pub fn vp(x: &Rational, p: u64) -> Result<PValuation, PadicError> {
    check_prime(p)?;
    Ok(match vp_int(x, p) {
        Some(v) => PValuation::Finite(int(v)),
        None => PValuation::Infinity,
    })
}

/// `|x|_p = p^{-vp(x)}`, with `|0|_p = 0`.
pub fn abs_p(x: &Rational, p: u64) -> Result<Rational, PadicError> {
    check_prime(p)?;
    Ok(match vp_int(x, p) {
        Some(v) => p_pow(p, -v),
        None => Rational::zero(),
    })
}

/// Splits a nonzero rational as `p^v * u` with `u` a p-adic unit.
pub(crate) fn split_unit(x: &Rational, p: u64) -> (i64, Rational) {
    let v = vp_int(x, p).expect("nonzero");
    (v, x * p_pow(p, -v))
}

/// Canonical representative of `x` modulo `p^e Z_(p)`: the unique element of
/// `Z[1/p] ∩ [0, p^e)` congruent to `x`.
pub(crate) fn reduce_mod_p_power(x: &Rational, p: u64, e: i64) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let v = vp_int(x, p).unwrap();
    if v >= e {
        return Rational::zero();
    }
    let shift = (-v).max(0);
    // y = x * p^shift lies in Z_(p); reduce modulo p^(e + shift).
    let y = x * p_pow(p, shift);
    let modulus = num_traits::pow(BigInt::from(p), (e + shift) as usize);
    let den_inv = mod_inverse(&y.denom().mod_floor(&modulus), &modulus);
    let r = (y.numer() * den_inv).mod_floor(&modulus);
    Rational::new(r, num_traits::pow(BigInt::from(p), shift as usize))
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// Whether `x` lies in the local ring `Z_(p)`.
pub(crate) fn is_p_integral(x: &Rational, p: u64) -> bool {
    x.is_zero() || vp_bigint(x.denom(), p) == 0
}
