//! Fraction field of a polynomial ring, used as the scalar field ℚ(t)
//! when one marked point is kept symbolic.

use core::fmt;

use crate::poly::Poly;
use crate::scalar::{Field, Rat, Ring};

/// Reduced fraction `num/den` of polynomials over `K`, with monic
/// denominator and `gcd(num, den) = 1`.
#[derive(Clone, PartialEq)]
pub struct Frac<K: Field> {
    num: Poly<K>,
    den: Poly<K>,
}

/// Rational functions of one symbolic parameter `t` over ℚ.
pub type Qt = Frac<Rat>;

impl<K: Field> Frac<K> {
    pub fn new(num: Poly<K>, den: Poly<K>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = Frac { num, den };
        f.reduce();
        f
    }

    pub fn from_poly(p: Poly<K>) -> Self {
        Frac {
            num: p,
            den: Poly::one(),
        }
    }

    /// The generator `t` itself.
    pub fn variable() -> Self {
        Frac::from_poly(Poly::monomial(K::one(), 1))
    }

    pub fn num(&self) -> &Poly<K> {
        &self.num
    }

    pub fn den(&self) -> &Poly<K> {
        &self.den
    }

    /// Evaluates at `t = x`; `None` if the denominator vanishes there.
    pub fn eval(&self, x: &K) -> Option<K> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x).div(&d))
    }

    /// Order of vanishing at `t = x` (negative for a pole).
    pub fn order_at(&self, x: &K) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        let root = Poly::linear_root(x);
        let mult = |mut p: Poly<K>| {
            let mut m = 0i64;
            loop {
                let (q, r) = p.divrem(&root);
                if r.is_zero() {
                    m += 1;
                    p = q;
                } else {
                    return m;
                }
            }
        };
        Some(mult(self.num.clone()) - mult(self.den.clone()))
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        let g = Poly::gcd(&self.num, &self.den);
        if g.degree() != Some(0) {
            self.num = self.num.exact_div(&g);
            self.den = self.den.exact_div(&g);
        }
        let lead = self.den.leading().unwrap().inv().unwrap();
        self.den = self.den.scale(&lead);
        self.num = self.num.scale(&lead);
    }
}

impl<K: Field> fmt::Display for Frac<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<K: Field> fmt::Debug for Frac<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<K: Field> Ring for Frac<K> {
    fn zero() -> Self {
        Frac::from_poly(Poly::zero())
    }

    fn one() -> Self {
        Frac::from_poly(Poly::one())
    }

    fn from_i64(n: i64) -> Self {
        Frac::from_poly(Poly::constant(K::from_i64(n)))
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        Frac::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    fn sub(&self, rhs: &Self) -> Self {
        Frac::new(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    fn mul(&self, rhs: &Self) -> Self {
        Frac::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    fn neg(&self) -> Self {
        Frac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Frac::new(self.den.clone(), self.num.clone()))
        }
    }
}

impl<K: Field> Field for Frac<K> {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_ops() {
        let t = Qt::variable();
        let one = Qt::one();
        // (t^2 - 1)/(t - 1) = t + 1
        let f = Frac::new(
            t.num().mul(t.num()).sub(&Poly::one()),
            t.num().sub(&Poly::one()),
        );
        assert_eq!(f, t.add(&one));
        let g = one.div(&t);
        assert_eq!(g.mul(&t), one);
        assert_eq!(f.order_at(&Rat::from_i64(-1)), Some(1));
        assert_eq!(g.order_at(&Rat::zero()), Some(-1));
    }
}
