//! Dense univariate polynomials over a [`Ring`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scalar::{Field, Ring};

/// Dense polynomial; `coeffs[i]` is the coefficient of `z^i`, with no
/// trailing zeros. The zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq)]
pub struct Poly<R: Ring> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(R::one())
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c * z^k`.
    pub fn monomial(c: R, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![R::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// `z - c`.
    pub fn linear_root(c: &R) -> Self {
        Poly::new(vec![c.neg(), R::one()])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn trailing_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&rhs.coeff(i)));
        }
        Poly::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).sub(&rhs.coeff(i)));
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c.mul(&R::from_i64(i as i64)));
        }
        Poly::new(out)
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Taylor shift: returns `p(z + c)`, via repeated synthetic division.
    pub fn shift(&self, c: &R) -> Self {
        if self.is_zero() || c.is_zero() {
            return self.clone();
        }
        let mut work = self.coeffs.clone();
        let n = work.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            // One synthetic-division pass by (z - (-c)) leaves the value
            // p(-(-c)) ... we divide by (z + 0) shifted: fold with +c.
            for i in (k..n - 1).rev() {
                let t = work[i + 1].mul(c);
                work[i] = work[i].add(&t);
            }
            out.push(work[k].clone());
        }
        Poly::new(out)
    }

    /// Reversed coefficients: `z^deg * p(1/z)`.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly::new(coeffs)
    }

    /// Quotient and remainder; requires a unit leading coefficient in `d`.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dl = d
            .leading()
            .unwrap()
            .inv()
            .expect("divisor leading coefficient must be a unit");
        let dd = d.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![R::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = rem[i].mul(&dl);
            quot[i - dd] = q.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] = rem[i - dd + j].sub(&q.mul(dc));
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<K: Field> Poly<K> {
    /// Monic multiple of the gcd of `a` and `b` (Euclid, monic-normalised).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let m = b.make_monic();
            let (_, r) = a.divrem(&m);
            a = m;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.make_monic()
        }
    }

    pub fn make_monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.inv().unwrap()),
        }
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<R: Ring> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "z^{i}")?;
            } else {
                write!(f, "({c})*z^{i}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn p(cs: &[i64]) -> Poly<Rat> {
        Poly::new(cs.iter().map(|&c| Rat::from_i64(c)).collect())
    }

    #[test]
    fn mul_and_divrem() {
        let a = p(&[-1, 0, 1]); // z^2 - 1
        let b = p(&[1, 1]); // z + 1
        assert_eq!(a.exact_div(&b), p(&[-1, 1]));
        let (q, r) = p(&[1, 0, 0, 1]).divrem(&p(&[1, 1]));
        assert_eq!(q, p(&[1, -1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn taylor_shift() {
        // (z+1)^2 = z^2 + 2z + 1
        let a = p(&[0, 0, 1]).shift(&Rat::from_i64(1));
        assert_eq!(a, p(&[1, 2, 1]));
        let b = p(&[3, -2, 5, 1]);
        let c = Rat::new(-7, 3);
        assert_eq!(b.shift(&c).eval(&Rat::zero()), b.eval(&c));
    }

    #[test]
    fn gcd_monic() {
        let a = p(&[-2, 0, 2]); // 2z^2 - 2
        let b = p(&[-2, 2]); // 2z - 2
        assert_eq!(Poly::gcd(&a, &b), p(&[-1, 1]));
        assert_eq!(Poly::gcd(&p(&[]), &b), p(&[-1, 1]));
    }
}
