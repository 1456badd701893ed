//! Sugawara operators for gl(n) = s(n) ⊕ sl(n) on the fermion spaces.
//!
//! Coefficients `l^{(n,p)(m,s)}_{(k,r)} = Σ_I res(ω^{n,p} ω^{m,s} e_{k,r})`
//! vanish unless `k ≤ n+m ≤ k + C(0,N)`; the rescaled modes are
//!
//! `L*_{k,r} = -1/(2(c+κ)) Σ :u_a(n,p) u^a(m,s): l^{(n,p)(m,s)}_{(k,r)}`
//!
//! summed over the summands of the reductive split, with the standard
//! normal ordering (swap when the left KN degree exceeds the right one).
//! Per input vector the double sum has finitely many active terms:
//! high-degree right factors annihilate by admissibility.

use alloc::vec::Vec;

use crate::algebras::{CurrentElement, GlMat};
use crate::cocycles::{cocycle_function, BilinearFormGL};
use crate::error::{KnError, Result};
use crate::fermion::{FermionOperator, FermionSpace, Truncation, WedgeMonomial, WedgeVector};
use crate::forms::{KnContext, KnForm, KnIndex};
use crate::jet::Jet;
use crate::linalg;
use crate::scalar::{Field, Ring};

/// One summand of the reductive split with dual bases for its invariant
/// form, the Casimir datum `κ`, and the detected level `c`.
#[derive(Clone, Debug)]
pub struct Summand<F: Field> {
    pub name: &'static str,
    pub basis: Vec<GlMat<F>>,
    pub dual: Vec<GlMat<F>>,
    pub alpha: BilinearFormGL<F>,
    pub kappa: Jet<F>,
    pub level: Jet<F>,
}

impl<F: Field> Summand<F> {
    /// `-1/(2(c+κ))`; `CriticalLevel` when `c+κ = 0`.
    pub fn rescale(&self) -> Result<Jet<F>> {
        let ck = self.level.add(&self.kappa);
        let inv = ck.inv().ok_or(KnError::CriticalLevel)?;
        Ok(inv.mul(&Jet::from_i64(-2).inv().unwrap()))
    }
}

#[derive(Clone, Debug)]
pub struct ReductiveSplit<F: Field> {
    pub rank: usize,
    pub summands: Vec<Summand<F>>,
}

/// Dual basis with respect to an invariant form, by exact Gram inversion.
fn dual_basis<F: Field>(basis: &[GlMat<F>], alpha: &BilinearFormGL<F>) -> Vec<GlMat<F>> {
    let d = basis.len();
    let mut gram: linalg::Mat<F> = Vec::with_capacity(d);
    for a in basis {
        let mut row = Vec::with_capacity(d);
        for b in basis {
            row.push(alpha.eval(a, b));
        }
        gram.push(row);
    }
    // Solve G X = I column by column.
    let mut duals = Vec::with_capacity(d);
    for j in 0..d {
        let mut rhs = alloc::vec![Jet::zero(); d];
        rhs[j] = Jet::one();
        let x = linalg::solve(&gram, &rhs).expect("invariant form must be non-degenerate");
        let mut m = GlMat::zero(basis[0].rank_gl());
        for (c, b) in x.iter().zip(basis) {
            m = m.add(&b.scale(c));
        }
        duals.push(m);
    }
    duals
}

/// Half the Casimir eigenvalue in the adjoint representation, computed
/// exactly (and checked to be scalar on the summand).
fn casimir_kappa<F: Field>(basis: &[GlMat<F>], dual: &[GlMat<F>]) -> Jet<F> {
    let mut kappa2: Option<Jet<F>> = None;
    for y in basis {
        let mut omega_y = GlMat::zero(y.rank_gl());
        for (u, ud) in basis.iter().zip(dual) {
            omega_y = omega_y.add(&u.bracket(&ud.bracket(y)));
        }
        // omega_y must be a scalar multiple of y; extract it via the first
        // nonzero entry of y.
        let n = y.rank_gl();
        let mut ratio = None;
        'outer: for i in 0..n {
            for j in 0..n {
                if !y.at(i, j).is_zero() {
                    ratio = Some(omega_y.at(i, j).mul(&y.at(i, j).inv().unwrap()));
                    break 'outer;
                }
            }
        }
        let r = ratio.expect("basis elements are nonzero");
        assert!(
            omega_y == y.scale(&r),
            "Casimir is not scalar on the summand"
        );
        match &kappa2 {
            None => kappa2 = Some(r),
            Some(k) => assert!(*k == r, "Casimir eigenvalue differs across the summand"),
        }
    }
    kappa2
        .expect("summand has a basis")
        .mul(&Jet::from_i64(2).inv().unwrap())
}

/// Trace-free and scalar bases of gl(n).
fn gl_bases<F: Field>(rank: usize) -> (Vec<GlMat<F>>, Vec<GlMat<F>>) {
    let scalar = alloc::vec![GlMat::identity(rank)];
    let mut sl = Vec::new();
    for i in 0..rank {
        for j in 0..rank {
            if i != j {
                sl.push(GlMat::unit(rank, i, j));
            }
        }
    }
    for i in 0..rank - 1 {
        sl.push(GlMat::unit(rank, i, i).sub(&GlMat::unit(rank, i + 1, i + 1)));
    }
    (scalar, sl)
}

/// Builds the reductive split for gl(n): `α = tr(xy)` on sl(n), with `κ`
/// computed from the Casimir; `α(x,y) = tr(x)tr(y)/n` on s(n) with
/// `κ = 0`. Levels are detected from projective defects, never assumed.
pub fn build_split<F: Field>(
    space: &FermionSpace<'_, F>,
    charge: i64,
    trunc: Truncation,
) -> Result<ReductiveSplit<F>> {
    let rank = space.indexer.gl_rank;
    let (scalar_basis, sl_basis) = gl_bases::<F>(rank);
    let basis_window = space.window_basis(charge, trunc.d_min);
    let mut summands = Vec::new();

    let alpha_s = BilinearFormGL {
        r1: Jet::zero(),
        r2: Jet::from_i64(rank as i64).inv().unwrap(),
    };
    let dual_s = dual_basis(&scalar_basis, &alpha_s);
    let level_s = detect_level(space, &scalar_basis, &alpha_s, &basis_window)?;
    summands.push(Summand {
        name: "s(n)",
        basis: scalar_basis,
        dual: dual_s,
        alpha: alpha_s,
        kappa: Jet::zero(),
        level: level_s,
    });

    if rank > 1 {
        let alpha_sl = BilinearFormGL::alpha1();
        let dual_sl = dual_basis(&sl_basis, &alpha_sl);
        let kappa = casimir_kappa(&sl_basis, &dual_sl);
        let level_sl = detect_level(space, &sl_basis, &alpha_sl, &basis_window)?;
        summands.push(Summand {
            name: "sl(n)",
            basis: sl_basis,
            dual: dual_sl,
            alpha: alpha_sl,
            kappa,
            level: level_sl,
        });
    }
    Ok(ReductiveSplit { rank, summands })
}

/// Detects the level of the fermion module on a summand: solves
/// `defect(x⊗A, y⊗B) = c·α(x,y)·γ_S(A,B)` on probe pairs and verifies
/// consistency on ten further probes.
pub fn detect_level<F: Field>(
    space: &FermionSpace<'_, F>,
    basis: &[GlMat<F>],
    alpha: &BilinearFormGL<F>,
    window: &[WedgeMonomial],
) -> Result<Jet<F>> {
    let ctx = space.ctx;
    let mut level: Option<Jet<F>> = None;
    let mut verified = 0usize;
    'probe: for n in 1..=2i64 {
        for p in 1..=ctx.n_points() {
            for r in 1..=ctx.n_points() {
                for x in basis {
                    for y in basis {
                        let a = ctx.fn_basis(KnIndex::new(n, p));
                        let b = ctx.fn_basis(KnIndex::new(-n, r));
                        let predicted = alpha
                            .eval(x, y)
                            .mul(&cocycle_function(ctx, &a, &b));
                        if predicted.is_zero() {
                            continue;
                        }
                        let op_x = FermionOperator::Current(CurrentElement::from_basis(
                            x.clone(),
                            KnIndex::new(n, p),
                        ));
                        let op_y = FermionOperator::Current(CurrentElement::from_basis(
                            y.clone(),
                            KnIndex::new(-n, r),
                        ));
                        let defect = space.projective_defect(&op_x, &op_y, window)?;
                        let c = defect.mul(&predicted.inv().unwrap());
                        match &level {
                            None => level = Some(c),
                            Some(l) => {
                                if *l != c {
                                    return Err(KnError::Inconsistent);
                                }
                                verified += 1;
                                if verified >= 10 {
                                    break 'probe;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    level.ok_or(KnError::Inconsistent)
}

/// `l^{(n,p)(m,s)}_{(k,r)} = Σ_I res(ω^{n,p}·ω^{m,s}·e_{k,r})`.
pub fn sugawara_coeff<F: Field>(
    ctx: &KnContext<F>,
    k: KnIndex,
    n: KnIndex,
    m: KnIndex,
) -> Jet<F> {
    let h = ctx
        .omega_basis(n)
        .tensor(&ctx.omega_basis(m))
        .tensor(&ctx.vf_basis(k));
    let mut acc = Jet::zero();
    for pt in ctx.config().points() {
        acc = acc.add(&h.coeff.residue_at(pt));
    }
    acc
}

/// Largest `n+m-k` with a nonzero coefficient found in a scan window; the
/// realized `C(0,N)` of the window bound.
pub fn realized_window_constant<F: Field>(ctx: &KnContext<F>, scan: i64) -> i64 {
    let mut c = 0i64;
    for k in -scan..=scan {
        for r in 1..=ctx.n_points() {
            for n in -scan..=scan {
                for m in -scan..=scan {
                    for p in 1..=ctx.n_points() {
                        for s in 1..=ctx.n_points() {
                            let v = sugawara_coeff(
                                ctx,
                                KnIndex::new(k, r),
                                KnIndex::new(n, p),
                                KnIndex::new(m, s),
                            );
                            if !v.is_zero() {
                                c = c.max(n + m - k);
                                debug_assert!(n + m >= k, "window lower bound violated");
                            }
                        }
                    }
                }
            }
        }
    }
    c
}

/// Safe upper spread of the coefficient window at genus 0: residue-order
/// counting gives `n+m ≤ k + 2 - ceil(2/N) ≤ k + 2`.
fn window_spread(n_points: usize) -> i64 {
    if n_points == 1 {
        0
    } else {
        1
    }
}

/// Sugawara representation bound to a fermion space and a split.
pub struct Sugawara<'s, 'c, F: Field> {
    pub space: &'s FermionSpace<'c, F>,
    pub split: ReductiveSplit<F>,
    coeff_cache: core::cell::RefCell<alloc::collections::BTreeMap<(KnIndex, KnIndex, KnIndex), Jet<F>>>,
}

impl<'s, 'c, F: Field> Sugawara<'s, 'c, F> {
    pub fn new(space: &'s FermionSpace<'c, F>, split: ReductiveSplit<F>) -> Self {
        Sugawara {
            space,
            split,
            coeff_cache: core::cell::RefCell::new(alloc::collections::BTreeMap::new()),
        }
    }

    fn coeff(&self, k: KnIndex, n: KnIndex, m: KnIndex) -> Jet<F> {
        let key = (k, n, m);
        if let Some(v) = self.coeff_cache.borrow().get(&key) {
            return v.clone();
        }
        let v = sugawara_coeff(self.space.ctx, k, n, m);
        self.coeff_cache.borrow_mut().insert(key, v.clone());
        v
    }

    /// Largest KN degree of a current acting nontrivially on any monomial
    /// in the support of `v` (moves or diagonal counter terms).
    fn action_degree_bound(&self, v: &WedgeVector<F>) -> i64 {
        let idx = &self.space.indexer;
        let b = idx.block();
        let mut hi = 0i64; // degrees in [-S, 0] may act via the diagonal
        for (mono, _) in v.iter() {
            let max_unocc = mono.max_unoccupied(idx);
            let min_occ = if mono.particles().is_empty() {
                // smallest occupied index ≥ floor
                let mut m = mono.charge() * b;
                while mono.holes().binary_search(&m).is_ok() {
                    m += 1;
                }
                m
            } else {
                mono.particles()[0]
            };
            // A move of a degree-d current needs d·B - (B-1) ≤ max_unocc - min_occ.
            let bound = (max_unocc - min_occ + (b - 1)).div_euclid(b);
            hi = hi.max(bound);
        }
        hi
    }

    /// Applies the rescaled mode `L*_{k,r}` to a vector, exactly.
    pub fn apply_mode(&self, k: KnIndex, v: &WedgeVector<F>) -> Result<WedgeVector<F>> {
        let ctx = self.space.ctx;
        let n_pts = ctx.n_points();
        let spread = window_spread(n_pts);
        let mut out = WedgeVector::zero();
        if v.is_zero() {
            return Ok(out);
        }
        let m_hi = self.action_degree_bound(v);
        for summand in &self.split.summands {
            let rescale = summand.rescale()?;
            let mut acc = WedgeVector::zero();
            for c_sum in k.n..=k.n + spread {
                // n ≤ m branch: rightmost factor has degree m ≤ m_hi.
                for m in ((c_sum + 1).div_euclid(2)..=m_hi).rev() {
                    let n = c_sum - m;
                    if n > m {
                        continue;
                    }
                    acc = acc.add(&self.ordered_pair_term(summand, k, n, m, false, v)?);
                }
                // n > m branch: rightmost factor has degree n ≤ m_hi.
                for n in (c_sum - c_sum.div_euclid(2))..=m_hi {
                    let m = c_sum - n;
                    if n <= m {
                        continue;
                    }
                    acc = acc.add(&self.ordered_pair_term(summand, k, n, m, true, v)?);
                }
            }
            out = out.add(&acc.scale(&rescale));
        }
        Ok(out)
    }

    /// One `(n, m)` block of the normal-ordered double sum:
    /// `Σ_{p,s,a} :u_a(n,p) u^a(m,s): l^{(n,p)(m,s)}_{(k,r)}` applied to
    /// `v`. When `swapped`, the written order is `u^a(m,s) u_a(n,p)`.
    fn ordered_pair_term(
        &self,
        summand: &Summand<F>,
        k: KnIndex,
        n: i64,
        m: i64,
        swapped: bool,
        v: &WedgeVector<F>,
    ) -> Result<WedgeVector<F>> {
        let ctx = self.space.ctx;
        let mut out = WedgeVector::zero();
        for p in 1..=ctx.n_points() {
            for s in 1..=ctx.n_points() {
                let l = self.coeff(k, KnIndex::new(n, p), KnIndex::new(m, s));
                if l.is_zero() {
                    continue;
                }
                for (u, ud) in summand.basis.iter().zip(&summand.dual) {
                    let (first, second) = if swapped {
                        // u^a(m,s) then u_a(n,p) applied right-to-left:
                        // rightmost is u_a(n,p).
                        (
                            CurrentElement::from_basis(u.clone(), KnIndex::new(n, p)),
                            CurrentElement::from_basis(ud.clone(), KnIndex::new(m, s)),
                        )
                    } else {
                        (
                            CurrentElement::from_basis(ud.clone(), KnIndex::new(m, s)),
                            CurrentElement::from_basis(u.clone(), KnIndex::new(n, p)),
                        )
                    };
                    let inner = self.space.apply(&FermionOperator::Current(first), v);
                    if inner.is_zero() {
                        continue;
                    }
                    let full = self.space.apply(&FermionOperator::Current(second), &inner);
                    out = out.add(&full.scale(&l));
                }
            }
        }
        Ok(out)
    }

    /// `T[e] = Σ a_{k,r} L*_{k,r}` for `e = Σ a_{k,r} e_{k,r}`.
    pub fn apply_field(&self, e: &KnForm<F>, v: &WedgeVector<F>) -> Result<WedgeVector<F>> {
        if e.weight != -1 {
            return Err(KnError::WeightMismatch {
                expected: -1,
                got: e.weight,
            });
        }
        let mut out = WedgeVector::zero();
        if e.is_zero() || v.is_zero() {
            return Ok(out);
        }
        for (k, a) in self.space.ctx.expand(e)? {
            out = out.add(&self.apply_mode(k, v)?.scale(&a));
        }
        Ok(out)
    }

    /// Defect of the fundamental relation `[T[e], x(A)] - x(e.A)` on one
    /// basis monomial; zero everywhere by Lemma-level exactness.
    pub fn fundamental_defect(
        &self,
        e: &KnForm<F>,
        x: &GlMat<F>,
        a: &KnForm<F>,
        mono: &WedgeMonomial,
    ) -> Result<WedgeVector<F>> {
        let ctx = self.space.ctx;
        let v = WedgeVector::monomial(mono.clone());
        let xa = FermionOperator::Current(CurrentElement::from_form(ctx, x, a)?);
        let tx = self.apply_field(e, &self.space.apply(&xa, &v))?;
        let xt = self.space.apply(&xa, &self.apply_field(e, &v)?);
        let ea = crate::forms::lie_derivative(e, a)?;
        let xea = self
            .space
            .apply(&FermionOperator::Current(CurrentElement::from_form(ctx, x, &ea)?), &v);
        Ok(tx.sub(&xt).sub(&xea))
    }

    /// `[T[e], T[f]] - T([e,f])` on one basis monomial; must be a scalar
    /// multiple of the monomial (collected by the caller across a window).
    pub fn vector_defect(
        &self,
        e: &KnForm<F>,
        f: &KnForm<F>,
        mono: &WedgeMonomial,
    ) -> Result<WedgeVector<F>> {
        let v = WedgeVector::monomial(mono.clone());
        let tf = self.apply_field(f, &v)?;
        let te = self.apply_field(e, &v)?;
        let comm = self
            .apply_field(e, &tf)?
            .sub(&self.apply_field(f, &te)?);
        let ef = crate::forms::bracket_vector_fields(e, f)?;
        Ok(comm.sub(&self.apply_field(&ef, &v)?))
    }

    /// Scalar of `[T[e],T[f]] - T([e,f])` across a window; `NotScalar`
    /// when any column deviates from a common multiple of the identity.
    pub fn vector_cocycle_value(
        &self,
        e: &KnForm<F>,
        f: &KnForm<F>,
        basis: &[WedgeMonomial],
    ) -> Result<Jet<F>> {
        let mut lambda: Option<Jet<F>> = None;
        for mono in basis {
            let d = self.vector_defect(e, f, mono)?;
            let lam = d.coeff(mono);
            let rest = d.sub(&WedgeVector::monomial(mono.clone()).scale(&lam));
            if !rest.is_zero() {
                return Err(KnError::NotScalar);
            }
            match &lambda {
                None => lambda = Some(lam),
                Some(l) if *l != lam => return Err(KnError::NotScalar),
                _ => {}
            }
        }
        Ok(lambda.unwrap_or_else(Jet::zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::MarkedConfig;
    use crate::scalar::Rat;

    type Ctx = KnContext<Rat>;
    type J = Jet<Rat>;

    fn ctx(points: &[i64]) -> Ctx {
        KnContext::new(MarkedConfig::from_values(points).unwrap())
    }

    #[test]
    fn classical_coefficients_are_deltas() {
        let c = ctx(&[0]);
        for k in -2..=2 {
            for n in -2..=2 {
                for m in -2..=2 {
                    let l = sugawara_coeff(
                        &c,
                        KnIndex::new(k, 1),
                        KnIndex::new(n, 1),
                        KnIndex::new(m, 1),
                    );
                    let expect = if n + m == k { J::one() } else { J::zero() };
                    assert_eq!(l, expect, "k={k} n={n} m={m}");
                    // symmetry in (n,m)
                    let l2 = sugawara_coeff(
                        &c,
                        KnIndex::new(k, 1),
                        KnIndex::new(m, 1),
                        KnIndex::new(n, 1),
                    );
                    assert_eq!(l, l2);
                }
            }
        }
        assert_eq!(realized_window_constant(&c, 2), 0);
    }

    #[test]
    fn window_constant_two_points() {
        let c = ctx(&[0, 1]);
        let r = realized_window_constant(&c, 2);
        assert!(r <= window_spread(2), "realized {r} exceeds analytic bound");
    }

    #[test]
    fn split_and_levels_gl1() {
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-4)).unwrap();
        assert_eq!(split.summands.len(), 1);
        let s = &split.summands[0];
        assert!(s.kappa.is_zero());
        assert_eq!(s.level, J::one());
    }

    #[test]
    fn split_and_levels_gl2() {
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 2);
        let split = build_split(&space, 0, Truncation::new(-3)).unwrap();
        assert_eq!(split.summands.len(), 2);
        assert_eq!(split.summands[0].level, J::one(), "scalar summand level");
        // κ for sl(2) with α = tr: dual Coxeter number 2.
        assert_eq!(split.summands[1].kappa, J::from_i64(2));
        assert_eq!(split.summands[1].level, J::one(), "sl level");
    }

    #[test]
    fn mode_zero_on_vacuum_is_scalar() {
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-4)).unwrap();
        let sug = Sugawara::new(&space, split);
        let vac = WedgeVector::monomial(WedgeMonomial::vacuum(0));
        let out = sug.apply_mode(KnIndex::new(0, 1), &vac).unwrap();
        let lam = out.coeff(&WedgeMonomial::vacuum(0));
        assert_eq!(out, vac.scale(&lam));
    }

    #[test]
    fn fundamental_relation_classical() {
        // [T[e_k], a_m] = m a_{k+m} on windows (gl(1), N=1).
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-4)).unwrap();
        let sug = Sugawara::new(&space, split);
        let basis = space.window_basis(0, -3);
        for k in -1..=1i64 {
            for m in -2..=2i64 {
                let e = c.vf_basis(KnIndex::new(k, 1));
                let x = GlMat::identity(1);
                let a = c.fn_basis(KnIndex::new(m, 1));
                for mono in &basis {
                    let d = sug.fundamental_defect(&e, &x, &a, mono).unwrap();
                    assert!(d.is_zero(), "k={k} m={m} mono={mono:?}");
                }
            }
        }
    }

    #[test]
    fn virasoro_commutator_is_scalar_defect() {
        // [T[e_k], T[e_-k]] - T([e_k, e_-k]) is scalar on the window.
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-4)).unwrap();
        let sug = Sugawara::new(&space, split);
        let basis = space.window_basis(0, -3);
        let e = c.vf_basis(KnIndex::new(2, 1));
        let f = c.vf_basis(KnIndex::new(-2, 1));
        let lam = sug.vector_cocycle_value(&e, &f, &basis).unwrap();
        // Central charge 1 Heisenberg Sugawara: cocycle value for the
        // induced representation at degree sum 0 must be nonzero.
        assert!(!lam.is_zero());
    }
}
