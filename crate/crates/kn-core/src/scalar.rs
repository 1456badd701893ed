//! Exact coefficient arithmetic.
//!
//! Everything downstream is parametrised over a [`Field`] so the same
//! machinery runs over plain rationals and over ℚ(t) (one symbolic point
//! position, used for collision diagnostics). The workhorse instance is
//! [`Rat`], an arbitrary-precision rational.

use alloc::string::String;
use alloc::string::ToString;
use core::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// A commutative ring with decidable equality and partial inversion.
///
/// `inv` returns `None` exactly when the element is not a unit. For a
/// [`Field`] this means `inv` fails only on zero.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv().expect("division by a non-unit"))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Marker for rings in which every nonzero element is a unit.
pub trait Field: Ring {}

/// Arbitrary-precision rational number.
///
/// Kept reduced with positive denominator by `BigRational`; the canonical
/// string form is `p/q` with `q > 0` and `gcd(p, q) = 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Rat(r)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Canonical `p/q` form, denominator always written out.
    pub fn canonical_string(&self) -> String {
        let mut s = self.0.numer().to_string();
        s.push('/');
        s.push_str(&self.0.denom().to_string());
        s
    }

    /// Parses `p`, `p/q` or `-p/q`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let numer: BigInt = n.parse().ok()?;
        let denom: BigInt = d.parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        Some(Rat(BigRational::new(numer, denom)))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ring for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }

    fn one() -> Self {
        Rat(BigRational::one())
    }

    fn from_i64(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        Rat(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Rat(&self.0 - &rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Rat(&self.0 * &rhs.0)
    }

    fn neg(&self) -> Self {
        Rat(-self.0.clone())
    }

    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }
}

impl Field for Rat {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let r = Rat::new(4, -6);
        assert_eq!(r.canonical_string(), "-2/3");
        assert_eq!(Rat::parse("-2/3"), Some(r));
        assert_eq!(Rat::parse("7"), Some(Rat::from_i64(7)));
        assert_eq!(Rat::parse("1/0"), None);
    }

    #[test]
    fn field_ops() {
        let a = Rat::new(1, 2);
        let b = Rat::new(1, 3);
        assert_eq!(a.add(&b), Rat::new(5, 6));
        assert_eq!(a.mul(&b), Rat::new(1, 6));
        assert_eq!(a.sub(&a), Rat::zero());
        assert_eq!(a.inv().unwrap(), Rat::from_i64(2));
        assert!(Rat::zero().inv().is_none());
    }
}
