//! Numerical divisor classes on the blow-up of P^n along Y, and the bound
//! calculus built on them.

use std::fmt;

use num::rational::Ratio;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::BoundError;

pub type Q = Ratio<i64>;

/// A numerical class `aH + bE` on the blow-up, with exact rational
/// coefficients (`H` hyperplane, `E` exceptional).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    pub h: Q,
    pub e: Q,
}

impl Serialize for DivisorClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl DivisorClass {
    pub fn new(h: Q, e: Q) -> Self {
        DivisorClass { h, e }
    }

    pub fn from_integers(h: i64, e: i64) -> Self {
        DivisorClass {
            h: Q::from_integer(h),
            e: Q::from_integer(e),
        }
    }

    pub fn scale(&self, c: Q) -> Self {
        DivisorClass {
            h: self.h * c,
            e: self.e * c,
        }
    }

    pub fn add(&self, other: &DivisorClass) -> Self {
        DivisorClass {
            h: self.h + other.h,
            e: self.e + other.e,
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn q(x: Q) -> String {
            if x.denom().is_one() {
                x.numer().to_string()
            } else {
                format!("{}/{}", x.numer(), x.denom())
            }
        }
        if self.e.is_zero() {
            write!(f, "{}H", q(self.h))
        } else if self.e < Q::zero() {
            write!(f, "{}H-{}E", q(self.h), q(-self.e))
        } else {
            write!(f, "{}H+{}E", q(self.h), q(self.e))
        }
    }
}

/// Singularity class of a pair, strongest applicable label.
/// `Klt ⊂ Plt ⊂ Lc`; `NotLc` fails all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityClass {
    NotLc,
    Lc,
    Plt,
    Klt,
}

impl SingularityClass {
    pub fn is_lc(&self) -> bool {
        *self >= SingularityClass::Lc
    }
    pub fn is_plt(&self) -> bool {
        *self >= SingularityClass::Plt
    }
    pub fn is_klt(&self) -> bool {
        *self == SingularityClass::Klt
    }
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SingularityClass::NotLc => "not-lc",
            SingularityClass::Lc => "lc",
            SingularityClass::Plt => "plt",
            SingularityClass::Klt => "klt",
        };
        write!(f, "{s}")
    }
}

/// Canonical class of the blow-up of P^n along a smooth codimension-`r`
/// center: `-(n+1)H + (r-1)E`.
pub fn canonical_class(n: usize, r: usize) -> Result<DivisorClass, BoundError> {
    if n < 1 || r < 1 || r > n {
        return Err(BoundError::OutOfRange(format!(
            "canonical class needs 1 <= r <= n, got n = {n}, r = {r}"
        )));
    }
    Ok(DivisorClass::from_integers(-(n as i64 + 1), r as i64 - 1))
}

/// The degree-sum bound: with defining degrees `d_1 >= ... >= d_m`,
/// the vanishing threshold is at most `d_1 + ... + d_r - n`.
pub fn degree_sum_bound(degrees: &[i64], n: usize, r: usize) -> Result<i64, BoundError> {
    if r < 1 || degrees.len() < r {
        return Err(BoundError::TooFewDegrees {
            r,
            got: degrees.len(),
        });
    }
    if degrees.windows(2).any(|w| w[0] < w[1]) {
        return Err(BoundError::OutOfRange(
            "degrees must be sorted descending".into(),
        ));
    }
    Ok(degrees[..r].iter().sum::<i64>() - n as i64)
}

/// Bound composition: an effective class `F = (e+n)H - rE` that is log
/// canonical near the exceptional divisor certifies the threshold `e`.
pub fn bound_from_lc_divisor(
    f: &DivisorClass,
    n: usize,
    r: usize,
    verdict: SingularityClass,
) -> Result<Q, BoundError> {
    let expected_e = -Q::from_integer(r as i64);
    if f.e != expected_e {
        return Err(BoundError::ClassMismatch {
            expected: format!("{expected_e}"),
            got: format!("{}", f.e),
        });
    }
    if !verdict.is_lc() {
        return Err(BoundError::NotLogCanonical);
    }
    Ok(f.h - Q::from_integer(n as i64))
}

/// Multiplicity test along nested smooth centers: lc when every multiplicity
/// is at most the codimension, plt when all are strictly smaller. A pair
/// with components is never klt; the empty divisor is.
pub fn multiplicity_lc_check(
    mults: &[i64],
    codims: &[i64],
) -> Result<SingularityClass, BoundError> {
    if mults.len() != codims.len() {
        return Err(BoundError::LengthMismatch(mults.len(), codims.len()));
    }
    if mults.is_empty() {
        return Ok(SingularityClass::Klt);
    }
    if mults.iter().zip(codims).any(|(m, c)| m > c) {
        return Ok(SingularityClass::NotLc);
    }
    if mults.iter().zip(codims).all(|(m, c)| m < c) {
        return Ok(SingularityClass::Plt);
    }
    Ok(SingularityClass::Lc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_class_values() {
        assert_eq!(
            canonical_class(3, 1).unwrap(),
            DivisorClass::from_integers(-4, 0)
        );
        assert_eq!(
            canonical_class(5, 3).unwrap(),
            DivisorClass::from_integers(-6, 2)
        );
        assert_eq!(
            canonical_class(1, 1).unwrap(),
            DivisorClass::from_integers(-2, 0)
        );
        assert!(canonical_class(3, 4).is_err());
    }

    #[test]
    fn degree_sum_bound_values() {
        assert_eq!(degree_sum_bound(&[2], 3, 1).unwrap(), -1);
        assert_eq!(degree_sum_bound(&[2, 2], 3, 2).unwrap(), 1);
        assert_eq!(degree_sum_bound(&[2, 2, 2], 5, 2).unwrap(), -1);
        assert!(degree_sum_bound(&[2], 3, 2).is_err());
        assert!(degree_sum_bound(&[1, 2], 3, 2).is_err());
    }

    #[test]
    fn compose_bound_examples() {
        let f = DivisorClass::from_integers(10, -6);
        assert_eq!(
            bound_from_lc_divisor(&f, 11, 6, SingularityClass::Lc).unwrap(),
            Q::from_integer(-1)
        );
        let f2 = DivisorClass::from_integers(11, -6);
        assert_eq!(
            bound_from_lc_divisor(&f2, 14, 6, SingularityClass::Lc).unwrap(),
            Q::from_integer(-3)
        );
        assert!(bound_from_lc_divisor(&f, 11, 5, SingularityClass::Lc).is_err());
        assert!(bound_from_lc_divisor(&f, 11, 6, SingularityClass::NotLc).is_err());
    }

    #[test]
    fn multiplicity_criterion_boundaries() {
        assert_eq!(
            multiplicity_lc_check(&[2], &[2]).unwrap(),
            SingularityClass::Lc
        );
        assert_eq!(
            multiplicity_lc_check(&[1], &[3]).unwrap(),
            SingularityClass::Plt
        );
        assert_eq!(
            multiplicity_lc_check(&[4], &[3]).unwrap(),
            SingularityClass::NotLc
        );
        assert_eq!(
            multiplicity_lc_check(&[], &[]).unwrap(),
            SingularityClass::Klt
        );
        assert!(multiplicity_lc_check(&[1], &[]).is_err());
    }
}
