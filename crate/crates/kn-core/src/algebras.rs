//! The associative algebra 𝒜 of functions, the vector field algebra ℒ,
//! the current algebra ḡ = gl(n)⊗𝒜 and the differential operator algebra
//! 𝒟¹_g, together with almost-grading scans, triangular decompositions and
//! regular subalgebras.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{KnError, Result};
use crate::forms::{bracket_vector_fields, lie_derivative, KnContext, KnForm, KnIndex, Place};
use crate::jet::Jet;
use crate::linalg;
use crate::ratfun::Center;
use crate::scalar::{Field, Ring};

/// Dense square matrix over jets; element of gl(n).
#[derive(Clone, PartialEq, Debug)]
pub struct GlMat<F: Field> {
    n: usize,
    entries: Vec<Jet<F>>,
}

impl<F: Field> GlMat<F> {
    pub fn zero(n: usize) -> Self {
        GlMat {
            n,
            entries: alloc::vec![Jet::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = GlMat::zero(n);
        for i in 0..n {
            *m.at_mut(i, i) = Jet::one();
        }
        m
    }

    /// Elementary matrix `E_{ij}` (0-based), acting `v_j → v_i`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = GlMat::zero(n);
        *m.at_mut(i, j) = Jet::one();
        m
    }

    pub fn rank_gl(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &Jet<F> {
        &self.entries[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Jet<F> {
        &mut self.entries[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        GlMat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        GlMat {
            n: self.n,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Jet<F>) -> Self {
        GlMat {
            n: self.n,
            entries: self.entries.iter().map(|e| e.mul(c)).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let mut out = GlMat::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.n {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    *out.at_mut(i, j) = out.at(i, j).add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn bracket(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn trace(&self) -> Jet<F> {
        let mut t = Jet::zero();
        for i in 0..self.n {
            t = t.add(self.at(i, i));
        }
        t
    }

    /// `tr(self · rhs)`.
    pub fn trace_product(&self, rhs: &Self) -> Jet<F> {
        assert_eq!(self.n, rhs.n);
        let mut t = Jet::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                t = t.add(&self.at(i, j).mul(rhs.at(j, i)));
            }
        }
        t
    }
}

/// Element of the current algebra ḡ = gl(n)⊗𝒜, kept canonical over the
/// function basis: each `A_{n,p}` appears at most once, with one matrix
/// coefficient.
#[derive(Clone, PartialEq, Debug)]
pub struct CurrentElement<F: Field> {
    rank: usize,
    terms: BTreeMap<KnIndex, GlMat<F>>,
}

impl<F: Field> CurrentElement<F> {
    pub fn zero(rank: usize) -> Self {
        CurrentElement {
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// `x ⊗ A_{idx}`.
    pub fn from_basis(x: GlMat<F>, idx: KnIndex) -> Self {
        let rank = x.rank_gl();
        let mut c = CurrentElement::zero(rank);
        c.accumulate(idx, x);
        c
    }

    /// `x ⊗ A` for an arbitrary weight-0 form, expanded over the basis.
    pub fn from_form(ctx: &KnContext<F>, x: &GlMat<F>, a: &KnForm<F>) -> Result<Self> {
        if a.weight != 0 {
            return Err(KnError::WeightMismatch {
                expected: 0,
                got: a.weight,
            });
        }
        let mut c = CurrentElement::zero(x.rank_gl());
        for (idx, coeff) in ctx.expand(a)? {
            c.accumulate(idx, x.scale(&coeff));
        }
        Ok(c)
    }

    fn accumulate(&mut self, idx: KnIndex, m: GlMat<F>) {
        if m.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(old) => {
                let s = old.add(&m);
                if s.is_zero() {
                    self.terms.remove(&idx);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(idx, m);
            }
        }
    }

    pub fn rank_gl(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&KnIndex, &GlMat<F>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rank != rhs.rank {
            return Err(KnError::DimensionMismatch);
        }
        let mut out = self.clone();
        for (idx, m) in &rhs.terms {
            out.accumulate(*idx, m.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        CurrentElement {
            rank: self.rank,
            terms: self.terms.iter().map(|(i, m)| (*i, m.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Jet<F>) -> Self {
        let mut out = CurrentElement::zero(self.rank);
        for (idx, m) in &self.terms {
            out.accumulate(*idx, m.scale(c));
        }
        out
    }

    /// KN degrees carrying nonzero terms.
    pub fn degree_support(&self) -> Option<(i64, i64)> {
        let min = self.terms.keys().map(|i| i.n).min()?;
        let max = self.terms.keys().map(|i| i.n).max()?;
        Some((min, max))
    }
}

/// `[x⊗A, y⊗B] = [x,y]⊗AB`, extended bilinearly over canonical terms.
pub fn bracket_currents<F: Field>(
    ctx: &KnContext<F>,
    x: &CurrentElement<F>,
    y: &CurrentElement<F>,
) -> Result<CurrentElement<F>> {
    if x.rank != y.rank {
        return Err(KnError::DimensionMismatch);
    }
    let mut out = CurrentElement::zero(x.rank);
    for (ia, ma) in &x.terms {
        for (ib, mb) in &y.terms {
            let br = ma.bracket(mb);
            if br.is_zero() {
                continue;
            }
            for (idx, c) in ctx.product_expansion(*ia, *ib) {
                out.accumulate(idx, br.scale(&c));
            }
        }
    }
    Ok(out)
}

/// `x ⊗ (e.A)` summed over the terms of a current element.
pub fn lie_on_current<F: Field>(
    ctx: &KnContext<F>,
    e: &KnForm<F>,
    x: &CurrentElement<F>,
) -> Result<CurrentElement<F>> {
    let mut out = CurrentElement::zero(x.rank);
    for (idx, m) in &x.terms {
        let da = lie_derivative(e, &ctx.fn_basis(*idx))?;
        for (jdx, c) in ctx.expand(&da)? {
            out.accumulate(jdx, m.scale(&c));
        }
    }
    Ok(out)
}

/// First-order differential operator `x⊗A ⊕ e` in 𝒟¹_g.
#[derive(Clone, Debug)]
pub struct DiffOp<F: Field> {
    pub current: CurrentElement<F>,
    pub vector: KnForm<F>,
}

impl<F: Field> DiffOp<F> {
    pub fn new(current: CurrentElement<F>, vector: KnForm<F>) -> Self {
        assert_eq!(vector.weight, -1, "vector part must have weight -1");
        DiffOp { current, vector }
    }
}

/// Bracket in 𝒟¹_g: currents, vector fields and the cross term
/// `[e, x⊗A] = x⊗(e.A)`.
pub fn bracket_diffop<F: Field>(
    ctx: &KnContext<F>,
    a: &DiffOp<F>,
    b: &DiffOp<F>,
) -> Result<DiffOp<F>> {
    let current = bracket_currents(ctx, &a.current, &b.current)?
        .add(&lie_on_current(ctx, &a.vector, &b.current)?)?
        .add(&lie_on_current(ctx, &b.vector, &a.current)?.neg())?;
    let vector = bracket_vector_fields(&a.vector, &b.vector)?;
    Ok(DiffOp { current, vector })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    Function,
    Vector,
    /// For the current algebra the KN-side constants coincide with the
    /// function-algebra table; the finite factor contributes `[x,y]`.
    Current,
}

/// Structure-constant table over the KN basis inside a window, with the
/// realized almost-grading bounds `R`, `S`.
#[derive(Clone, Debug)]
pub struct StructureTable<F: Field> {
    pub kind: AlgebraKind,
    pub entries: Vec<(KnIndex, KnIndex, KnIndex, Jet<F>)>,
    pub realized_r: i64,
    pub realized_s: i64,
}

/// Exact structure constants by expansion-via-duality: every product or
/// bracket of window basis elements is expanded and the residual checked
/// to vanish (the expansion window auto-grows from the order bounds).
pub fn structure_constants<F: Field>(
    ctx: &KnContext<F>,
    kind: AlgebraKind,
    window: (i64, i64),
) -> StructureTable<F> {
    let mut entries = Vec::new();
    let mut realized_r = 0i64;
    let mut realized_s = 0i64;
    for n in window.0..=window.1 {
        for p in 1..=ctx.n_points() {
            for m in window.0..=window.1 {
                for r in 1..=ctx.n_points() {
                    let left = KnIndex::new(n, p);
                    let right = KnIndex::new(m, r);
                    let exp: Vec<(KnIndex, Jet<F>)> = match kind {
                        AlgebraKind::Function | AlgebraKind::Current => {
                            ctx.product_expansion(left, right)
                        }
                        AlgebraKind::Vector => {
                            let b =
                                bracket_vector_fields(&ctx.vf_basis(left), &ctx.vf_basis(right))
                                    .unwrap();
                            ctx.expand(&b).expect("bracket expansion closes")
                        }
                    };
                    for (out, c) in exp {
                        realized_r = realized_r.max(n + m - out.n);
                        realized_s = realized_s.max(out.n - (n + m));
                        entries.push((left, right, out, c));
                    }
                }
            }
        }
    }
    StructureTable {
        kind,
        entries,
        realized_r,
        realized_s,
    }
}

/// Critical-strip constants discovered per configuration: `K` for the
/// function algebra and `L` for the vector field algebra, the smallest
/// values making the `minus` parts subalgebras given the realized upper
/// spreads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripConstants {
    pub k_fn: i64,
    pub l_vf: i64,
}

pub fn strip_constants<F: Field>(ctx: &KnContext<F>, probe: i64) -> StripConstants {
    let w = (-probe, probe);
    let s_fn = structure_constants(ctx, AlgebraKind::Function, w).realized_s;
    let s_vf = structure_constants(ctx, AlgebraKind::Vector, w).realized_s;
    StripConstants {
        k_fn: (s_fn - 1).max(0),
        l_vf: (s_vf - 1).max(0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubalgebraTag {
    Plus,
    PlusStar,
    ZeroStrip,
    Minus,
    MinusStar,
    /// `𝒜^(p)_-` resp. `ℒ^(p)_-`: vanishing at `∞` of order `≥ p`
    /// (functions) resp. `≥ p+1` (vector fields). `Regular(1)` for
    /// functions and `Regular(0)` for vector fields are the regular
    /// subalgebras 𝒜^r and ℒ^r.
    Regular(i64),
}

/// Membership for a weight-0 or weight-(-1) element. Strip tags decide by
/// expansion degrees; star and regular tags decide by orders.
pub fn subalgebra_member<F: Field>(
    ctx: &KnContext<F>,
    f: &KnForm<F>,
    tag: SubalgebraTag,
    strip: &StripConstants,
) -> Result<bool> {
    if f.weight != 0 && f.weight != -1 {
        return Err(KnError::WeightMismatch {
            expected: 0,
            got: f.weight,
        });
    }
    if f.is_zero() {
        return Ok(true);
    }
    let k = if f.weight == 0 {
        strip.k_fn
    } else {
        strip.l_vf
    };
    match tag {
        SubalgebraTag::Plus | SubalgebraTag::ZeroStrip | SubalgebraTag::Minus => {
            let degs: Vec<i64> = ctx.expand(f)?.iter().map(|(i, _)| i.n).collect();
            Ok(match tag {
                SubalgebraTag::Plus => degs.iter().all(|&n| n >= 1),
                SubalgebraTag::ZeroStrip => degs.iter().all(|&n| (-k..=0).contains(&n)),
                _ => degs.iter().all(|&n| n <= -k - 1),
            })
        }
        SubalgebraTag::PlusStar => {
            for p in 1..=ctx.n_points() {
                let pt = ctx.config().point(p).clone();
                if f.coeff.order_at(&Center::Finite(pt))? < 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        SubalgebraTag::MinusStar => Ok(ctx.order_at(f, Place::Infinity)? >= 0),
        SubalgebraTag::Regular(p) => {
            let need = if f.weight == 0 { p } else { p + 1 };
            Ok(ctx.order_at(f, Place::Infinity)? >= need)
        }
    }
}

/// Membership in the regular subalgebras 𝒜^r (functions vanishing at ∞)
/// and ℒ^r (vector fields vanishing at ∞ as sections, i.e. of
/// weight-corrected order ≥ 1).
pub fn is_regular<F: Field>(ctx: &KnContext<F>, f: &KnForm<F>) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    Ok(ctx.order_at(f, Place::Infinity)? >= 1)
}

/// A regular function together with its exact expansion over the basis.
#[derive(Clone, Debug)]
pub struct RegularFunction<F: Field> {
    pub form: KnForm<F>,
    pub expansion: Vec<(KnIndex, Jet<F>)>,
}

/// Basis of `{f ∈ span{f^λ_{n,p} : n ∈ [lo, hi]} : wc-ord_∞(f) ≥ 1}` by
/// exact kernel computation on the expansion coefficients at ∞. Mixed
/// combinations across degrees can vanish at ∞ even when no individual
/// basis element does. `λ = 0` gives the 𝒜^r window basis, `λ = -1` the
/// ℒ^r one.
pub fn regular_window_basis<F: Field>(
    ctx: &KnContext<F>,
    lambda: i64,
    degrees: (i64, i64),
) -> Vec<RegularFunction<F>> {
    let (lo, hi) = degrees;
    if lo > hi {
        return Vec::new();
    }
    let n_pts = ctx.n_points();
    let cols: Vec<KnIndex> = (lo..=hi)
        .flat_map(|n| (1..=n_pts).map(move |p| KnIndex::new(n, p)))
        .collect();
    // Regularity wc-ord ≥ 1 means fn-convention order ≥ 1 + 2λ at ∞; the
    // constraints kill all fn-orders in [min_ord, 2λ].
    let min_ord = cols
        .iter()
        .map(|idx| -(n_pts as i64) * (idx.n + 1 - lambda) - (2 * lambda - 1) + 2 * lambda)
        .min()
        .unwrap();
    let top = 2 * lambda;
    let n_rows = (top - min_ord + 1).max(0) as usize;
    let mut rows: linalg::Mat<F> = alloc::vec![Vec::new(); n_rows];
    for idx in &cols {
        let a = ctx.basis(lambda, *idx);
        let exp = a
            .coeff
            .laurent_expand(&Center::Infinity, (top - min_ord + 1).max(1) as usize);
        for (r, row) in rows.iter_mut().enumerate() {
            let order = min_ord + r as i64;
            let k = order - exp.leading;
            let c = if k < 0 || k as usize >= exp.coeffs.len() {
                Jet::zero()
            } else {
                exp.coeffs[k as usize].clone()
            };
            row.push(c);
        }
    }
    let kernel = if n_rows == 0 {
        // No constraints: every column is already regular.
        (0..cols.len())
            .map(|j| {
                let mut v = alloc::vec![Jet::zero(); cols.len()];
                v[j] = Jet::one();
                v
            })
            .collect()
    } else {
        linalg::kernel_basis(&rows)
    };
    kernel
        .into_iter()
        .map(|v| {
            let mut form = KnForm::zero(lambda);
            let mut expansion = Vec::new();
            for (idx, c) in cols.iter().zip(v) {
                if !c.is_zero() {
                    form = form.add(&ctx.basis(lambda, *idx).scale(&c)).unwrap();
                    expansion.push((*idx, c));
                }
            }
            debug_assert!(is_regular(ctx, &form).unwrap());
            RegularFunction { form, expansion }
        })
        .collect()
}

/// Basis of `𝒜^r ∩ span{A_{n,p} : n ∈ [lo, hi]}`.
pub fn regular_function_window_basis<F: Field>(
    ctx: &KnContext<F>,
    degrees: (i64, i64),
) -> Vec<RegularFunction<F>> {
    regular_window_basis(ctx, 0, degrees)
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
    fn witt_table_for_one_point() {
        let c = ctx(&[0]);
        let t = structure_constants(&c, AlgebraKind::Vector, (-2, 2));
        assert_eq!(t.realized_r, 0);
        assert_eq!(t.realized_s, 0);
        for (l, r, o, coeff) in &t.entries {
            assert_eq!(o.n, l.n + r.n);
            assert_eq!(*coeff, J::from_i64(r.n - l.n));
        }
    }

    #[test]
    fn function_algebra_spread_two_points() {
        let c = ctx(&[0, 1]);
        let t = structure_constants(&c, AlgebraKind::Function, (-2, 2));
        assert_eq!(t.realized_r, 0);
        assert!(t.realized_s <= 1);
        // Antisymmetry check of the vector table.
        let tv = structure_constants(&c, AlgebraKind::Vector, (-1, 1));
        for (l, r, o, coeff) in &tv.entries {
            let flipped = tv
                .entries
                .iter()
                .find(|(l2, r2, o2, _)| l2 == r && r2 == l && o2 == o)
                .map(|(_, _, _, c2)| c2.clone())
                .unwrap_or_else(J::zero);
            assert_eq!(coeff.neg(), flipped);
        }
    }

    #[test]
    fn gl2_current_bracket() {
        // [E12 ⊗ z^n, E21 ⊗ z^m] = (E11 - E22) ⊗ z^(n+m)
        let c = ctx(&[0]);
        let e12 = GlMat::unit(2, 0, 1);
        let e21 = GlMat::unit(2, 1, 0);
        let x = CurrentElement::from_basis(e12, KnIndex::new(2, 1));
        let y = CurrentElement::from_basis(e21, KnIndex::new(-1, 1));
        let b = bracket_currents(&c, &x, &y).unwrap();
        let h = GlMat::unit(2, 0, 0).sub(&GlMat::unit(2, 1, 1));
        let expect = CurrentElement::from_basis(h, KnIndex::new(1, 1));
        assert_eq!(b, expect);
        // [x⊗A, x⊗A] = 0
        let x2 = CurrentElement::from_basis(GlMat::unit(2, 0, 1), KnIndex::new(2, 1));
        assert!(bracket_currents(&c, &x2, &x2).unwrap().is_zero());
    }

    #[test]
    fn diffop_cross_term() {
        // N=1, gl(1): [e_n, 1⊗z^m] = m (1⊗z^(n+m))
        let c = ctx(&[0]);
        let one = GlMat::identity(1);
        for n in -1..=1 {
            for m in -2..=2 {
                let d1 = DiffOp::new(CurrentElement::zero(1), c.vf_basis(KnIndex::new(n, 1)));
                let d2 = DiffOp::new(
                    CurrentElement::from_basis(one.clone(), KnIndex::new(m, 1)),
                    KnForm::zero(-1),
                );
                let b = bracket_diffop(&c, &d1, &d2).unwrap();
                assert!(b.vector.is_zero());
                let expect =
                    CurrentElement::from_basis(one.scale(&J::from_i64(m)), KnIndex::new(n + m, 1));
                assert_eq!(b.current, expect);
            }
        }
        // [e, x⊗1] = 0 for the constant function
        let e = DiffOp::new(CurrentElement::zero(1), c.vf_basis(KnIndex::new(1, 1)));
        let x1 = DiffOp::new(
            CurrentElement::from_form(&c, &one, &KnForm::one()).unwrap(),
            KnForm::zero(-1),
        );
        assert!(bracket_diffop(&c, &e, &x1).unwrap().current.is_zero());
    }

    #[test]
    fn jacobi_identity_diffop() {
        let c = ctx(&[0, 1]);
        let mk = |n: i64, p: usize, i: usize, j: usize, vn: i64| {
            DiffOp::new(
                CurrentElement::from_basis(GlMat::unit(2, i, j), KnIndex::new(n, p)),
                c.vf_basis(KnIndex::new(vn, p)),
            )
        };
        let a = mk(1, 1, 0, 1, 0);
        let b = mk(-1, 2, 1, 0, 1);
        let d = mk(0, 1, 0, 0, -1);
        let ab = bracket_diffop(&c, &a, &b).unwrap();
        let bd = bracket_diffop(&c, &b, &d).unwrap();
        let da = bracket_diffop(&c, &d, &a).unwrap();
        let j1 = bracket_diffop(&c, &ab, &d).unwrap();
        let j2 = bracket_diffop(&c, &bd, &a).unwrap();
        let j3 = bracket_diffop(&c, &da, &b).unwrap();
        let total = j1
            .current
            .add(&j2.current)
            .unwrap()
            .add(&j3.current)
            .unwrap();
        assert!(total.is_zero());
        let tv = j1.vector.add(&j2.vector).unwrap().add(&j3.vector).unwrap();
        assert!(tv.is_zero());
    }

    #[test]
    fn subalgebra_membership() {
        let c = ctx(&[0, 1]);
        let strip = strip_constants(&c, 2);
        // A_{n,p} with n <= -1 lies in 𝒜_- (K = 0 for these configs).
        let a = c.fn_basis(KnIndex::new(-1, 1));
        assert!(subalgebra_member(&c, &a, SubalgebraTag::Minus, &strip).unwrap());
        assert!(subalgebra_member(&c, &a, SubalgebraTag::Regular(1), &strip).unwrap());
        // e_{1,p} ∈ ℒ_+.
        let e = c.vf_basis(KnIndex::new(1, 2));
        assert!(subalgebra_member(&c, &e, SubalgebraTag::Plus, &strip).unwrap());
        // The constant 1 is not regular.
        assert!(!subalgebra_member(&c, &KnForm::one(), SubalgebraTag::Regular(1), &strip).unwrap());
        assert!(subalgebra_member(&c, &KnForm::one(), SubalgebraTag::MinusStar, &strip).unwrap());
    }

    #[test]
    fn regular_window_basis_is_regular_and_closed() {
        let c = ctx(&[0, 1]);
        let basis = regular_function_window_basis(&c, (-3, 1));
        assert!(!basis.is_empty());
        for f in &basis {
            assert!(is_regular(&c, &f.form).unwrap());
        }
        // Closure under multiplication within the regular subalgebra.
        for a in basis.iter().take(3) {
            for b in basis.iter().take(3) {
                let prod = a.form.tensor(&b.form);
                assert!(is_regular(&c, &prod).unwrap());
            }
        }
    }
}
