//! Rational functions over the jet ring, Laurent expansion, orders and
//! residues.
//!
//! The denominator of a canonical form is jet-free and monic; jets coming
//! from moving marked points are pushed into the numerator using the
//! nilpotency of the ε directions. Poles therefore sit at value positions
//! and the expansion machinery below stays exact in the presence of jets.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{KnError, Result};
use crate::jet::Jet;
use crate::poly::Poly;
use crate::scalar::{Field, Ring};

/// Expansion center: a finite (possibly jet-valued) point, or the
/// out-point at infinity where the local coordinate is `w = 1/z`.
#[derive(Clone, Debug, PartialEq)]
pub enum Center<F: Field> {
    Finite(Jet<F>),
    Infinity,
}

#[derive(Clone, PartialEq)]
pub struct RationalFunction<F: Field> {
    num: Poly<Jet<F>>,
    den: Poly<Jet<F>>,
}

/// Finite stretch of a Laurent expansion: coefficients of
/// `u^leading, …, u^(leading+coeffs.len()-1)` in the local coordinate `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentExpansion<F: Field> {
    pub center: Center<F>,
    pub leading: i64,
    pub coeffs: Vec<Jet<F>>,
}

fn components<F: Field>(p: &Poly<Jet<F>>) -> [Poly<F>; 4] {
    [
        p.map(|c| c.v.clone()),
        p.map(|c| c.d1.clone()),
        p.map(|c| c.d2.clone()),
        p.map(|c| c.d12.clone()),
    ]
}

fn lift<F: Field>(p: &Poly<F>) -> Poly<Jet<F>> {
    p.map(|c| Jet::from_value(c.clone()))
}

impl<F: Field> RationalFunction<F> {
    /// Builds `num/den` in canonical form.
    ///
    /// Fails with `ZeroDenominator` when the value part of `den` is the
    /// zero polynomial (such a fraction has no jet-family meaning).
    pub fn new(num: Poly<Jet<F>>, den: Poly<Jet<F>>) -> Result<Self> {
        let mut f = RationalFunction { num, den };
        f.normalize()?;
        Ok(f)
    }

    pub fn from_poly(p: Poly<Jet<F>>) -> Self {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: Jet<F>) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The coordinate function `z`.
    pub fn variable() -> Self {
        Self::from_poly(Poly::monomial(Jet::one(), 1))
    }

    pub fn numerator(&self) -> &Poly<Jet<F>> {
        &self.num
    }

    pub fn denominator(&self) -> &Poly<Jet<F>> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Canonical form: jet-free monic denominator of minimal degree, no
    /// factor cancellable against all numerator components.
    fn normalize(&mut self) -> Result<()> {
        let [dv, dd1, dd2, dd12] = components(&self.den);
        if dv.is_zero() {
            return Err(KnError::ZeroDenominator);
        }
        if !(dd1.is_zero() && dd2.is_zero() && dd12.is_zero()) {
            // Multiply through by d0^2 - d0*de + de^2; since de^3 = 0 this
            // turns the denominator into the jet-free d0^3.
            let d0 = lift(&dv);
            let de = self.den.sub(&d0);
            let conj = d0.mul(&d0).sub(&d0.mul(&de)).add(&de.mul(&de));
            self.num = self.num.mul(&conj);
            self.den = d0.pow(3);
        }
        if self.num.is_zero() {
            self.den = Poly::one();
            return Ok(());
        }
        let mut den_f = components(&self.den)[0].clone();
        let [nv, n1, n2, n12] = components(&self.num);
        let mut g = Poly::gcd(&Poly::gcd(&nv, &n1), &Poly::gcd(&n2, &n12));
        g = Poly::gcd(&g, &den_f);
        if g.degree() != Some(0) {
            self.num = self.num.exact_div(&lift(&g));
            den_f = den_f.exact_div(&g);
        }
        let lead = den_f.leading().unwrap().inv().unwrap();
        den_f = den_f.scale(&lead);
        self.num = self.num.map(|c| c.scale(&lead));
        self.den = lift(&den_f);
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RationalFunction::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
        .expect("denominators stay nonzero under addition")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        RationalFunction::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
            .expect("denominators stay nonzero under multiplication")
    }

    pub fn scale(&self, c: &Jet<F>) -> Self {
        RationalFunction::new(self.num.scale(c), self.den.clone())
            .expect("scaling keeps the denominator")
    }

    /// Division; fails with `ZeroDenominator` when `rhs` has zero value part.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        RationalFunction::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            RationalFunction::new(self.num.pow(e as u32), self.den.pow(e as u32))
        } else {
            RationalFunction::new(self.den.pow((-e) as u32), self.num.pow((-e) as u32))
        }
    }

    /// d/dz via the quotient rule.
    pub fn derivative(&self) -> Self {
        RationalFunction::new(
            self.num
                .derivative()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
        .expect("derivative keeps the denominator")
    }

    /// Evaluation at a jet point; `None` when the denominator value
    /// vanishes there.
    pub fn eval(&self, x: &Jet<F>) -> Option<Jet<F>> {
        let d = self.den.eval(x);
        let n = self.num.eval(x);
        d.inv().map(|di| n.mul(&di))
    }

    /// One ε-component as a value-level rational function. Exact because
    /// the canonical denominator is jet-free: `∂(n/d) = (∂n)/d`.
    pub fn jet_component(&self, which: crate::jet::JetPart) -> Self {
        RationalFunction::new(self.num.map(|c| c.extract(which)), self.den.clone())
            .expect("component extraction keeps the denominator")
    }

    /// Partial derivative along one ε direction (a derivation of the jet
    /// ring, keeping the cross dependence on the other direction).
    pub fn dpart(&self, direction: u8) -> Self {
        RationalFunction::new(self.num.map(|c| c.dpart(direction)), self.den.clone())
            .expect("derivation keeps the denominator")
    }

    /// Drops the components carrying second derivatives in `direction`.
    pub fn truncate_dir(&self, direction: u8) -> Self {
        RationalFunction::new(self.num.map(|c| c.truncate_dir(direction)), self.den.clone())
            .expect("truncation keeps the denominator")
    }

    /// All series coefficients of `self` in the local coordinate at
    /// `center`, exact on orders `[lo, hi]`, as `(lo, coeffs)`.
    fn series_window(&self, center: &Center<F>, hi: i64) -> (i64, Vec<Jet<F>>) {
        let (num, den, extra) = match center {
            Center::Finite(c) => (self.num.shift(c), self.den.shift(c), 0i64),
            Center::Infinity => {
                // z = 1/w: f(1/w) = rev(num)(w)/rev(den)(w) * w^(deg den - deg num)
                let dn = self.num.degree().unwrap_or(0) as i64;
                let dd = self.den.degree().unwrap_or(0) as i64;
                (self.num.reversed(), self.den.reversed(), dd - dn)
            }
        };
        let (lo, c) = series_quotient(&num, &den, hi - extra);
        (lo + extra, c)
    }

    /// Laurent expansion with exactly `depth` coefficients starting at the
    /// leading order. The zero function expands to an empty coefficient
    /// list.
    pub fn laurent_expand(&self, center: &Center<F>, depth: usize) -> LaurentExpansion<F> {
        assert!(depth >= 1, "depth must be at least 1");
        if self.is_zero() {
            return LaurentExpansion {
                center: center.clone(),
                leading: 0,
                coeffs: Vec::new(),
            };
        }
        let mut hi_guess = self.num.degree().unwrap_or(0) as i64 + depth as i64 + 2;
        loop {
            let (lo, coeffs) = self.series_window(center, hi_guess);
            if let Some(first) = coeffs.iter().position(|c| !c.is_zero()) {
                let leading = lo + first as i64;
                let need_hi = leading + depth as i64 - 1;
                if need_hi > hi_guess {
                    hi_guess = need_hi;
                    continue;
                }
                let mut out = Vec::with_capacity(depth);
                for k in 0..depth {
                    let idx = first + k;
                    out.push(coeffs.get(idx).cloned().unwrap_or_else(Jet::zero));
                }
                return LaurentExpansion {
                    center: center.clone(),
                    leading,
                    coeffs: out,
                };
            }
            // A nonzero function has a finite order; widen and retry.
            hi_guess += 16;
            assert!(
                hi_guess < self.num.degree().unwrap_or(0) as i64 + 4096,
                "runaway expansion of a nonzero function"
            );
        }
    }

    /// Leading order at `center` (function convention at finite points and
    /// in `w = 1/z` at infinity). Jet parts count: the order is that of the
    /// first coefficient with any nonzero component.
    pub fn order_at(&self, center: &Center<F>) -> Result<i64> {
        if self.is_zero() {
            return Err(KnError::UndefinedOrder);
        }
        Ok(self.laurent_expand(center, 1).leading)
    }

    /// Coefficient of `(z - center)^(-1)`; zero for the zero function.
    pub fn residue_at(&self, center: &Jet<F>) -> Jet<F> {
        if self.is_zero() {
            return Jet::zero();
        }
        let (lo, coeffs) = self.series_window(&Center::Finite(center.clone()), -1);
        if lo > -1 {
            return Jet::zero();
        }
        coeffs
            .get((-1 - lo) as usize)
            .cloned()
            .unwrap_or_else(Jet::zero)
    }

    /// Residue at infinity of `self · dz`, i.e. the `w`-residue of
    /// `-f(1/w)/w²`.
    pub fn residue_at_infinity(&self) -> Jet<F> {
        if self.is_zero() {
            return Jet::zero();
        }
        // res_w=0( -f(1/w) w^-2 dw ) = -(coefficient of w^1 of f(1/w))
        let (lo, coeffs) = self.series_window(&Center::Infinity, 1);
        if lo > 1 {
            return Jet::zero();
        }
        coeffs
            .get((1 - lo) as usize)
            .cloned()
            .unwrap_or_else(Jet::zero)
            .neg()
    }
}

/// Truncated Laurent series with explicit exactness bookkeeping:
/// `c[i]` is the coefficient of `u^(base+i)`, exact on `[base, hi]`, and
/// there are no nonzero coefficients below `base`.
struct Ser<F: Field> {
    base: i64,
    hi: i64,
    c: Vec<Jet<F>>,
}

/// Exact-everywhere ceiling used for polynomial leaves.
const SER_EXACT: i64 = i64::MAX / 4;

impl<F: Field> Ser<F> {
    fn from_poly(p: &Poly<Jet<F>>, drop: i64) -> Self {
        // Polynomial divided by u^drop; exact at all orders. The base is
        // the true trailing order so that product exactness bounds stay
        // tight.
        let t = p.trailing_order().unwrap_or(0);
        Ser {
            base: t as i64 - drop,
            hi: SER_EXACT,
            c: p.coeffs().iter().skip(t).cloned().collect(),
        }
    }

    fn get(&self, order: i64) -> Jet<F> {
        let idx = order - self.base;
        if idx < 0 || idx as usize >= self.c.len() {
            Jet::zero()
        } else {
            self.c[idx as usize].clone()
        }
    }

    fn shift(mut self, by: i64) -> Self {
        self.base += by;
        if self.hi < SER_EXACT {
            self.hi += by;
        }
        self
    }

    fn mul(&self, rhs: &Self) -> Self {
        let base = self.base + rhs.base;
        let hi = if self.hi >= SER_EXACT && rhs.hi >= SER_EXACT {
            SER_EXACT
        } else {
            (self.hi.saturating_add(rhs.base)).min(rhs.hi.saturating_add(self.base))
        };
        let la = self.c.len();
        let lb = rhs.c.len();
        let full = if la == 0 || lb == 0 { 0 } else { la + lb - 1 };
        let keep = if hi >= SER_EXACT {
            full
        } else {
            full.min(((hi - base + 1).max(0)) as usize)
        };
        let mut out = vec![Jet::zero(); keep];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() || i >= keep {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate().take(keep - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ser { base, hi, c: out }
    }

    fn add(&self, rhs: &Self) -> Self {
        let base = self.base.min(rhs.base);
        let hi = self.hi.min(rhs.hi);
        let top = if hi >= SER_EXACT {
            (self.base + self.c.len() as i64).max(rhs.base + rhs.c.len() as i64)
        } else {
            hi + 1
        };
        let len = (top - base).max(0) as usize;
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let o = base + k as i64;
            out.push(self.get(o).add(&rhs.get(o)));
        }
        Ser { base, hi, c: out }
    }
}

/// Exact series coefficients of `num/den` on orders `[lo, hi]` where
/// `lo = ord(num) - 3·ord(den value part)`, returned as `(lo, coeffs)`.
///
/// The denominator may carry nilpotent parts (this happens after shifting
/// to a jet-valued center); they are unwound with the geometric series,
/// which terminates because ε-parts cube to zero.
fn series_quotient<F: Field>(
    num: &Poly<Jet<F>>,
    den: &Poly<Jet<F>>,
    hi: i64,
) -> (i64, Vec<Jet<F>>) {
    let d0: Poly<Jet<F>> = den.map(|c| c.value_jet());
    let de = den.sub(&d0).neg();
    let k0 = d0
        .trailing_order()
        .expect("denominator value part must be nonzero") as i64;
    let n_lo = num.trailing_order().unwrap_or(0) as i64;
    let lo = n_lo - 3 * k0;
    if hi < lo {
        return (lo, Vec::new());
    }

    // Series length so that three levels of truncated products still cover
    // [lo, hi] exactly.
    let head = (hi - lo + 1) + 6 * k0 + 4;
    // Unit part q of d0 = u^k0 * q, with q(0) invertible.
    let q_coeffs: Vec<Jet<F>> = (0..head as usize)
        .map(|i| d0.coeff(k0 as usize + i))
        .collect();
    let qinv = Ser {
        base: 0,
        hi: head - 1,
        c: series_invert(&q_coeffs, head as usize),
    };

    // 1/den = u^(-k0) qinv (1 + t + t^2) with t = -de * u^(-k0) * qinv.
    let uq = qinv.shift(-k0);
    let t = Ser::from_poly(&de, 0).mul(&uq);
    let one = Ser {
        base: 0,
        hi: SER_EXACT,
        c: vec![Jet::one()],
    };
    let inv_den = uq.mul(&one.add(&t).add(&t.mul(&t)));
    let res = Ser::from_poly(num, 0).mul(&inv_den);
    assert!(res.hi >= hi, "series headroom exhausted");

    let len = (hi - lo + 1) as usize;
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        out.push(res.get(lo + k as i64));
    }
    (lo, out)
}

/// Series inverse of a unit power series (constant term invertible).
fn series_invert<F: Field>(a: &[Jet<F>], len: usize) -> Vec<Jet<F>> {
    let a0 = a[0].inv().expect("series constant term must be a unit");
    let mut out = vec![Jet::zero(); len];
    out[0] = a0.clone();
    for n in 1..len {
        let mut acc = Jet::zero();
        for k in 1..=n.min(a.len() - 1) {
            if a[k].is_zero() || out[n - k].is_zero() {
                continue;
            }
            acc = acc.add(&a[k].mul(&out[n - k]));
        }
        out[n] = acc.mul(&a0).neg();
    }
    out
}

impl<F: Field> fmt::Display for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<F: Field> fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    type RF = RationalFunction<Rat>;
    type J = Jet<Rat>;

    fn jp(cs: &[i64]) -> Poly<J> {
        Poly::new(cs.iter().map(|&c| J::from_i64(c)).collect())
    }

    fn at(v: i64) -> Center<Rat> {
        Center::Finite(J::from_i64(v))
    }

    #[test]
    fn normalization_cancels_common_factors() {
        // (2z^2 - 2)/(2z - 2) -> z + 1
        let f = RF::new(jp(&[-2, 0, 2]), jp(&[-2, 2])).unwrap();
        assert_eq!(f, RF::from_poly(jp(&[1, 1])));
        // z/1 stays put
        let g = RF::new(jp(&[0, 1]), jp(&[1])).unwrap();
        assert_eq!(g, RF::variable());
        // ((z-2)(z-5))/(z-2) -> z - 5
        let h = RF::new(jp(&[10, -7, 1]), jp(&[-2, 1])).unwrap();
        assert_eq!(h, RF::from_poly(jp(&[-5, 1])));
        assert!(RF::new(jp(&[1]), jp(&[])).is_err());
    }

    #[test]
    fn laurent_simple_poles() {
        // 1/z at 0, depth 2: leading -1, coeffs [1, 0]
        let f = RF::new(jp(&[1]), jp(&[0, 1])).unwrap();
        let e = f.laurent_expand(&at(0), 2);
        assert_eq!(e.leading, -1);
        assert_eq!(e.coeffs, vec![J::from_i64(1), J::from_i64(0)]);

        // 1/(z-1) at 0, depth 3: geometric series -1 - z - z^2
        let g = RF::new(jp(&[1]), jp(&[-1, 1])).unwrap();
        let e = g.laurent_expand(&at(0), 3);
        assert_eq!(e.leading, 0);
        assert_eq!(
            e.coeffs,
            vec![J::from_i64(-1), J::from_i64(-1), J::from_i64(-1)]
        );

        // z at infinity: leading order -1 in w
        let z = RF::variable();
        let e = z.laurent_expand(&Center::Infinity, 1);
        assert_eq!(e.leading, -1);
        assert_eq!(e.coeffs, vec![J::from_i64(1)]);
    }

    #[test]
    fn orders() {
        // (z-1)^2/z
        let f = RF::new(jp(&[1, -2, 1]), jp(&[0, 1])).unwrap();
        assert_eq!(f.order_at(&at(1)).unwrap(), 2);
        assert_eq!(f.order_at(&at(0)).unwrap(), -1);
        let z3 = RF::from_poly(jp(&[0, 0, 0, 1]));
        assert_eq!(z3.order_at(&Center::Infinity).unwrap(), -3);
        assert!(RF::zero().order_at(&at(0)).is_err());
    }

    #[test]
    fn residues() {
        let one_over_z = RF::new(jp(&[1]), jp(&[0, 1])).unwrap();
        assert_eq!(one_over_z.residue_at(&J::from_i64(0)), J::from_i64(1));
        let one_over_z2 = RF::new(jp(&[1]), jp(&[0, 0, 1])).unwrap();
        assert_eq!(one_over_z2.residue_at(&J::from_i64(0)), J::from_i64(0));
        // 1/(z(z-1)) at 0 -> -1 (partial fractions)
        let f = RF::new(jp(&[1]), jp(&[0, -1, 1])).unwrap();
        assert_eq!(f.residue_at(&J::from_i64(0)), J::from_i64(-1));
        // residue theorem: sum over finite poles + infinity = 0
        let s = f
            .residue_at(&J::from_i64(0))
            .add(&f.residue_at(&J::from_i64(1)))
            .add(&f.residue_at_infinity());
        assert!(s.is_zero());
    }

    #[test]
    fn jet_centers_and_jet_denominators() {
        // f = 1/(z - q) with q = 2 + ε1: residue at q is exactly 1, and
        // evaluation carries the first-order dependence on q.
        let q = J::seed(Rat::from_i64(2), 1);
        let den = Poly::new(vec![q.neg(), J::one()]);
        let f = RF::new(jp(&[1]), den).unwrap();
        assert_eq!(f.residue_at(&q), J::one());
        // f(5) = 1/(5 - 2 - ε1) = 1/3 + ε1/9
        let v = f.eval(&J::from_i64(5)).unwrap();
        assert_eq!(v.v, Rat::new(1, 3));
        assert_eq!(v.d1, Rat::new(1, 9));
        // order at the jet point is still -1
        assert_eq!(f.order_at(&Center::Finite(q)).unwrap(), -1);
    }

    #[test]
    fn derivative_has_no_residues() {
        // d/dz of 1/(z(z-1)): residues vanish at every pole.
        let f = RF::new(jp(&[1]), jp(&[0, -1, 1])).unwrap().derivative();
        assert!(f.residue_at(&J::from_i64(0)).is_zero());
        assert!(f.residue_at(&J::from_i64(1)).is_zero());
    }
}
