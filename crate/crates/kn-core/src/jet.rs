//! Scalars extended by two nilpotent directions.
//!
//! A [`Jet`] is `v + d1·ε₁ + d2·ε₂ + d12·ε₁ε₂` with `ε₁² = ε₂² = 0`.
//! Attaching `ε₁` (resp. `ε₂`) to a marked-point position turns every
//! downstream coefficient into the exact first-order Taylor expansion in
//! that position; `d12` carries the mixed second derivative.

use core::fmt;

use crate::scalar::{Field, Rat, Ring};

#[derive(Clone, PartialEq)]
pub struct Jet<F: Field> {
    pub v: F,
    pub d1: F,
    pub d2: F,
    pub d12: F,
}

/// Names of the four jet components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetPart {
    Value,
    D1,
    D2,
    D12,
}

/// Jets over plain rationals, the default scalar of the whole library.
pub type QJet = Jet<Rat>;

impl<F: Field> Jet<F> {
    pub fn from_value(v: F) -> Self {
        Jet {
            v,
            d1: F::zero(),
            d2: F::zero(),
            d12: F::zero(),
        }
    }

    pub fn new(v: F, d1: F, d2: F, d12: F) -> Self {
        Jet { v, d1, d2, d12 }
    }

    pub fn from_i64(n: i64) -> Self {
        Jet::from_value(F::from_i64(n))
    }

    /// `v + ε_k` for direction `k ∈ {1, 2}`: the seed attached to a moving
    /// point position.
    pub fn seed(v: F, direction: u8) -> Self {
        let mut jet = Jet::from_value(v);
        match direction {
            1 => jet.d1 = F::one(),
            2 => jet.d2 = F::one(),
            _ => panic!("jet direction must be 1 or 2"),
        }
        jet
    }

    pub fn is_value(&self) -> bool {
        self.d1.is_zero() && self.d2.is_zero() && self.d12.is_zero()
    }

    /// The purely nilpotent part `self - v`.
    pub fn nil_part(&self) -> Self {
        Jet {
            v: F::zero(),
            d1: self.d1.clone(),
            d2: self.d2.clone(),
            d12: self.d12.clone(),
        }
    }

    pub fn value_jet(&self) -> Self {
        Jet::from_value(self.v.clone())
    }

    pub fn scale(&self, c: &F) -> Self {
        Jet {
            v: self.v.mul(c),
            d1: self.d1.mul(c),
            d2: self.d2.mul(c),
            d12: self.d12.mul(c),
        }
    }

    pub fn part(&self, which: JetPart) -> &F {
        match which {
            JetPart::Value => &self.v,
            JetPart::D1 => &self.d1,
            JetPart::D2 => &self.d2,
            JetPart::D12 => &self.d12,
        }
    }

    /// The chosen component, re-embedded as a pure value.
    pub fn extract(&self, which: JetPart) -> Self {
        Jet::from_value(self.part(which).clone())
    }

    /// Partial derivative along one ε direction, as a derivation of the
    /// jet ring: `∂₁(v + aε₁ + bε₂ + cε₁ε₂) = a + cε₂` and symmetrically
    /// for `∂₂`. This keeps the cross dependence on the other direction.
    /// The `dir` component of the result (a second derivative in the same
    /// direction) is not representable at first order and reads as zero.
    pub fn dpart(&self, direction: u8) -> Self {
        match direction {
            1 => Jet::new(self.d1.clone(), F::zero(), self.d12.clone(), F::zero()),
            2 => Jet::new(self.d2.clone(), self.d12.clone(), F::zero(), F::zero()),
            _ => panic!("jet direction must be 1 or 2"),
        }
    }

    /// Zeroes the components that would carry second derivatives in the
    /// given direction (`d_dir` and `d12`), keeping the honest value and
    /// cross-direction parts. Used when comparing identities that involve
    /// one explicit ∂ in that direction.
    pub fn truncate_dir(&self, direction: u8) -> Self {
        match direction {
            1 => Jet::new(self.v.clone(), F::zero(), self.d2.clone(), F::zero()),
            2 => Jet::new(self.v.clone(), self.d1.clone(), F::zero(), F::zero()),
            _ => panic!("jet direction must be 1 or 2"),
        }
    }
}

impl<F: Field> Ring for Jet<F> {
    fn zero() -> Self {
        Jet::from_value(F::zero())
    }

    fn one() -> Self {
        Jet::from_value(F::one())
    }

    fn from_i64(n: i64) -> Self {
        Jet::from_value(F::from_i64(n))
    }

    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.is_value()
    }

    fn add(&self, rhs: &Self) -> Self {
        Jet {
            v: self.v.add(&rhs.v),
            d1: self.d1.add(&rhs.d1),
            d2: self.d2.add(&rhs.d2),
            d12: self.d12.add(&rhs.d12),
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Jet {
            v: self.v.sub(&rhs.v),
            d1: self.d1.sub(&rhs.d1),
            d2: self.d2.sub(&rhs.d2),
            d12: self.d12.sub(&rhs.d12),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        Jet {
            v: self.v.mul(&rhs.v),
            d1: self.v.mul(&rhs.d1).add(&self.d1.mul(&rhs.v)),
            d2: self.v.mul(&rhs.d2).add(&self.d2.mul(&rhs.v)),
            d12: self
                .v
                .mul(&rhs.d12)
                .add(&self.d12.mul(&rhs.v))
                .add(&self.d1.mul(&rhs.d2))
                .add(&self.d2.mul(&rhs.d1)),
        }
    }

    fn neg(&self) -> Self {
        Jet {
            v: self.v.neg(),
            d1: self.d1.neg(),
            d2: self.d2.neg(),
            d12: self.d12.neg(),
        }
    }

    /// Inverse exists iff the value part is nonzero:
    /// `(v + δ)⁻¹ = v⁻¹ - v⁻²δ + v⁻³δ²` with `δ² = 2·d1·d2·ε₁ε₂`.
    fn inv(&self) -> Option<Self> {
        let w = self.v.inv()?;
        let w2 = w.mul(&w);
        let w3 = w2.mul(&w);
        let two = F::from_i64(2);
        Some(Jet {
            v: w,
            d1: self.d1.mul(&w2).neg(),
            d2: self.d2.mul(&w2).neg(),
            d12: self
                .d12
                .mul(&w2)
                .neg()
                .add(&two.mul(&self.d1).mul(&self.d2).mul(&w3)),
        })
    }
}

impl<F: Field> fmt::Display for Jet<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)?;
        if !self.d1.is_zero() {
            write!(f, " + ({})e1", self.d1)?;
        }
        if !self.d2.is_zero() {
            write!(f, " + ({})e2", self.d2)?;
        }
        if !self.d12.is_zero() {
            write!(f, " + ({})e1e2", self.d12)?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Jet<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(v: i64, d1: i64, d2: i64, d12: i64) -> QJet {
        Jet::new(
            Rat::from_i64(v),
            Rat::from_i64(d1),
            Rat::from_i64(d2),
            Rat::from_i64(d12),
        )
    }

    #[test]
    fn nilpotency() {
        let e1 = j(0, 1, 0, 0);
        let e2 = j(0, 0, 1, 0);
        assert!(e1.mul(&e1).is_zero());
        assert!(e2.mul(&e2).is_zero());
        assert_eq!(e1.mul(&e2), j(0, 0, 0, 1));
        assert!(e1.mul(&e2).mul(&e1).is_zero());
    }

    #[test]
    fn inverse() {
        let a = j(2, 3, -1, 5);
        let prod = a.mul(&a.inv().unwrap());
        assert_eq!(prod, QJet::one());
        assert!(j(0, 1, 1, 0).inv().is_none());
    }

    #[test]
    fn value_embedding_is_ring_hom() {
        // A jet with vanishing nilpotent part behaves as its value.
        let a = QJet::from_i64(7);
        let b = QJet::from_i64(-3);
        assert_eq!(a.mul(&b), QJet::from_i64(-21));
        assert_eq!(a.add(&b), QJet::from_i64(4));
        assert_eq!(a.inv().unwrap(), Jet::from_value(Rat::new(1, 7)));
    }
}
