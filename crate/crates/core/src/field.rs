//! Exact coefficient arithmetic: prime fields with a compile-time modulus and
//! arbitrary-precision rationals behind one trait.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// Runtime descriptor of a coefficient field, used in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
}

impl Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
            FieldSpec::Rationals => write!(f, "q"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q" | "Q" | "rationals" => Ok(FieldSpec::Rationals),
            _ => {
                let rest = s
                    .strip_prefix("fp:")
                    .or_else(|| s.strip_prefix("fp"))
                    .ok_or_else(|| AlgebraError::BadScalar(s.to_string()))?;
                rest.parse::<u64>()
                    .map(FieldSpec::Prime)
                    .map_err(|_| AlgebraError::BadScalar(s.to_string()))
            }
        }
    }
}

/// Minimal commutative-ring surface, enough for determinant and Pfaffian
/// expansion over polynomial entries. No nullary constructors so that types
/// with runtime shape (polynomials) can implement it.
pub trait Ring: Clone + PartialEq + Eq + Debug + Send + Sync + 'static {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

/// An exact field. `sample` draws from a finite pool suitable for genericity
/// arguments; `enumerate` yields every element for finite fields.
pub trait Field: Ring + Hash + Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_i64(v: i64) -> Self;
    fn spec() -> FieldSpec;
    fn parse(s: &str) -> Result<Self, AlgebraError>;
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|i| self.mul(&i))
    }

    fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let x = Self::sample(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// Number of elements for finite fields, `None` for infinite ones.
    fn element_count() -> Option<u64> {
        None
    }

    /// The `idx`-th element under some fixed enumeration of a finite field.
    fn element(idx: u64) -> Self {
        let _ = idx;
        unreachable!("element() is only defined for finite fields")
    }
}

/// Prime field with compile-time modulus. Elements stored reduced in `0..P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp<const P: u64>(u64);

pub type F32003 = Fp<32003>;
pub type F3 = Fp<3>;

impl<const P: u64> Fp<P> {
    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::<P>(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = Fp((acc.0 * base.0) % P);
            }
            base = Fp((base.0 * base.0) % P);
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Ring for Fp<P> {
    fn add(&self, rhs: &Self) -> Self {
        Fp((self.0 + rhs.0) % P)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Fp((self.0 + P - rhs.0) % P)
    }
    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Fp((self.0 * rhs.0) % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }
    fn from_i64(v: i64) -> Self {
        let m = v.rem_euclid(P as i64) as u64;
        Fp(m)
    }
    fn spec() -> FieldSpec {
        FieldSpec::Prime(P)
    }
    fn parse(s: &str) -> Result<Self, AlgebraError> {
        if let Some((a, b)) = s.split_once('/') {
            let num = Self::parse(a)?;
            let den = Self::parse(b)?;
            return num
                .div(&den)
                .ok_or_else(|| AlgebraError::BadScalar(s.to_string()));
        }
        s.parse::<i64>()
            .map(Self::from_i64)
            .map_err(|_| AlgebraError::BadScalar(s.to_string()))
    }
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fp(rng.gen_range(0..P))
    }
    fn element_count() -> Option<u64> {
        Some(P)
    }
    fn element(idx: u64) -> Self {
        Fp(idx % P)
    }
}

/// Exact rationals (arbitrary precision).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn from_pair(num: i64, den: i64) -> Self {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

impl Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Ring for Rat {
    fn add(&self, rhs: &Self) -> Self {
        Rat(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rat(&self.0 - &rhs.0)
    }
    fn neg(&self) -> Self {
        Rat(-self.0.clone())
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rat(&self.0 * &rhs.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Field for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn one() -> Self {
        Rat(BigRational::one())
    }
    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }
    fn from_i64(v: i64) -> Self {
        Rat(BigRational::from(BigInt::from(v)))
    }
    fn spec() -> FieldSpec {
        FieldSpec::Rationals
    }
    fn parse(s: &str) -> Result<Self, AlgebraError> {
        let parse_int = |t: &str| {
            t.parse::<BigInt>()
                .map_err(|_| AlgebraError::BadScalar(s.to_string()))
        };
        if let Some((a, b)) = s.split_once('/') {
            let num = parse_int(a)?;
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(AlgebraError::BadScalar(s.to_string()));
            }
            Ok(Rat(BigRational::new(num, den)))
        } else {
            Ok(Rat(BigRational::from(parse_int(s)?)))
        }
    }
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        // small integers keep Gröbner coefficient growth in check
        Self::from_i64(rng.gen_range(-20..=20))
    }
}

/// abs of a rational, used by a few verdict helpers
pub fn rat_is_negative(r: &Rat) -> bool {
    r.0.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_arithmetic_roundtrip() {
        type F = F32003;
        let a = F::from_i64(-5);
        assert_eq!(a.value(), 32003 - 5);
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), F::one());
        assert!(F::zero().inv().is_none());
    }

    #[test]
    fn rat_parse_display() {
        let r = Rat::parse("-3/6").unwrap();
        assert_eq!(r.to_string(), "-1/2");
        let s = Rat::parse("7").unwrap();
        assert_eq!(s.to_string(), "7");
    }

    #[test]
    fn fieldspec_parse() {
        assert_eq!(
            "fp:32003".parse::<FieldSpec>().unwrap(),
            FieldSpec::Prime(32003)
        );
        assert_eq!("q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
    }
}
