//! Conformal blocks as coinvariants `V / ḡ^r V`, the connection
//! `∇_X = ∂_X + T(e_X)` on them, its flatness defect, and the emitted
//! first-order KZ system.
//!
//! Moduli derivatives are realized by nilpotent jets attached to the
//! marked-point positions: at genus 0 all moduli motion is point motion,
//! and the tangent direction `∂/∂z_p` pulls back to the translation
//! generator `e_{-1,p}` (leading behavior `(1+O(z_p)) d/dz_p`), fixed up
//! to regular corrections.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::algebras::{regular_window_basis, CurrentElement, GlMat, RegularFunction};
use crate::error::{KnError, Result};
use crate::fermion::{FermionOperator, FermionSpace, Truncation, WedgeMonomial, WedgeVector};
use crate::forms::{bracket_vector_fields, lie_derivative, KnContext, KnForm, KnIndex};
use crate::jet::{Jet, JetPart};
use crate::linalg::{self, Echelon, Mat};
use crate::scalar::{Field, Ring};
use crate::sugawara::Sugawara;

/// Tangent direction `∂/∂z_p` of the moduli of point configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuliDirection(pub usize);

/// Default pull-back of `∂/∂z_p`: the translation generator `e_{-1,p}`.
/// Any element of ℒ^r may be added; the block operators do not change.
pub fn pullback<F: Field>(ctx: &KnContext<F>, dir: ModuliDirection) -> KnForm<F> {
    ctx.vf_basis(KnIndex::new(-1, dir.0))
}

/// Finite model of the coinvariant space `V/ḡ^r V` on a degree window:
/// the span of `u(A)v` over a window basis of 𝒜^r is reduced to echelon
/// form; block coordinates live on the complement (non-pivot) monomials.
///
/// Pivoting is greedy over monomials ordered by degree descending, ties by
/// the canonical monomial order; operators on blocks depend on this choice
/// only by conjugation.
pub struct CoinvariantSpace<F: Field> {
    pub charge: i64,
    pub d_min: i64,
    pub window: Vec<WedgeMonomial>,
    index: BTreeMap<WedgeMonomial, usize>,
    echelon: Echelon<F>,
    pub block_basis: Vec<WedgeMonomial>,
    pub dimension: usize,
    pub stabilized: bool,
    /// Window basis of 𝒜^r whose span was quotiented out.
    pub ar_basis: Vec<RegularFunction<F>>,
    pub ar_degrees: (i64, i64),
}

impl<F: Field> CoinvariantSpace<F> {
    /// Block coordinates of a vector: project to the window, reduce modulo
    /// the regular span, read the complement coordinates.
    pub fn project(&self, v: &WedgeVector<F>) -> Vec<Jet<F>> {
        let mut coords = alloc::vec![Jet::zero(); self.window.len()];
        for (m, c) in v.iter() {
            if let Some(&i) = self.index.get(m) {
                coords[i] = c.clone();
            }
        }
        self.echelon.reduce(&mut coords);
        self.block_basis
            .iter()
            .map(|m| coords[self.index[m]].clone())
            .collect()
    }

    /// The chosen section of the quotient: unit monomials on the
    /// complement.
    pub fn embed(&self, coords: &[Jet<F>]) -> WedgeVector<F> {
        let mut v = WedgeVector::zero();
        for (m, c) in self.block_basis.iter().zip(coords) {
            v.accumulate(m.clone(), c.clone());
        }
        v
    }

    /// Whether a vector lies in the regular span modulo everything below
    /// the window.
    pub fn in_span(&self, v: &WedgeVector<F>) -> bool {
        self.project(v).iter().all(|c| c.is_zero())
    }
}

/// Degree window of 𝒜^r generators adapted to a fermion window at
/// `d_min`: wide enough that any current moving something into the window
/// is representable.
pub fn ar_degree_window(space: &FermionSpace<'_, impl Field>, d_min: i64) -> (i64, i64) {
    let b = space.indexer.block();
    let lo = (d_min - (b - 1)).div_euclid(b) - 2;
    let hi = (-d_min + (b - 1)).div_euclid(b) + 1;
    (lo, hi)
}

/// Largest possible index raise of `u(A)` on the mode lattice, from the
/// expansion support of `A` (products expand at most one degree up at
/// genus 0, plus the in-block offset).
fn raise_bound<F: Field>(a: &RegularFunction<F>, block: i64, spread: i64) -> i64 {
    a.expansion
        .iter()
        .map(|(idx, _)| (idx.n + spread) * block + (block - 1))
        .max()
        .unwrap_or(i64::MIN / 2)
}

/// Spanning vectors of `ḡ^r V` with a window component: `u(A)v` for `A`
/// in the 𝒜^r window basis, `u` in the gl basis, and `v` deep enough that
/// `u(A)v` can reach degrees ≥ `d_min`.
pub fn regular_span<F: Field>(
    space: &FermionSpace<'_, F>,
    ar_basis: &[RegularFunction<F>],
    charge: i64,
    d_min: i64,
) -> Vec<WedgeVector<F>> {
    let b = space.indexer.block();
    let spread = if space.ctx.n_points() == 1 { 0 } else { 1 };
    let rank = space.indexer.gl_rank;
    let gl_basis: Vec<GlMat<F>> = {
        let mut v = Vec::new();
        for i in 0..rank {
            for j in 0..rank {
                v.push(GlMat::unit(rank, i, j));
            }
        }
        v
    };
    let max_raise = ar_basis
        .iter()
        .map(|a| raise_bound(a, b, spread))
        .max()
        .unwrap_or(0)
        .max(0);
    let deep = space.window_basis(charge, d_min - max_raise);
    let mut out = Vec::new();
    for a in ar_basis {
        let hi = raise_bound(a, b, spread);
        for v in &deep {
            // u(A)v cannot reach the window from below d_min - raise(A).
            if v.degree(&space.indexer) + hi < d_min {
                continue;
            }
            let base = WedgeVector::monomial(v.clone());
            for u in &gl_basis {
                let mut cur = CurrentElement::zero(rank);
                for (idx, c) in &a.expansion {
                    cur = cur
                        .add(&CurrentElement::from_basis(u.scale(c), *idx))
                        .unwrap();
                }
                let w = space.apply(&FermionOperator::Current(cur), &base);
                if !w.is_zero() {
                    out.push(w);
                }
            }
        }
    }
    out
}

fn blocks_at<F: Field>(
    space: &FermionSpace<'_, F>,
    ar_basis: &[RegularFunction<F>],
    charge: i64,
    d_min: i64,
) -> (Vec<WedgeMonomial>, Echelon<F>, Vec<WedgeMonomial>) {
    let window = space.window_basis(charge, d_min);
    let index: BTreeMap<WedgeMonomial, usize> = window
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let mut echelon = Echelon::new(window.len());
    for v in regular_span(space, ar_basis, charge, d_min) {
        let mut coords = alloc::vec![Jet::zero(); window.len()];
        let mut any = false;
        for (m, c) in v.iter() {
            if let Some(&i) = index.get(m) {
                coords[i] = c.clone();
                any = true;
            }
        }
        if any {
            echelon.insert(coords);
        }
    }
    let block_basis: Vec<WedgeMonomial> = window
        .iter()
        .enumerate()
        .filter(|(i, _)| !echelon.is_pivot(*i))
        .map(|(_, m)| m.clone())
        .collect();
    (window, echelon, block_basis)
}

/// Conformal blocks at the given truncation, with the stabilization
/// status checked across two deepenings of the degree floor.
pub fn conformal_blocks<F: Field>(
    space: &FermionSpace<'_, F>,
    charge: i64,
    trunc: Truncation,
) -> Result<CoinvariantSpace<F>> {
    let ar_degrees = ar_degree_window(space, trunc.d_min);
    let ar_basis = regular_window_basis(space.ctx, 0, ar_degrees);
    let (window, echelon, block_basis) = blocks_at(space, &ar_basis, charge, trunc.d_min);
    let dim = block_basis.len();
    let mut stabilized = true;
    for deepen in 1..=2 {
        let d = trunc.d_min - deepen;
        let ar_d = ar_degree_window(space, d);
        let ar_b = regular_window_basis(space.ctx, 0, ar_d);
        let (_, _, bb) = blocks_at(space, &ar_b, charge, d);
        if bb.len() != dim || bb != block_basis {
            stabilized = false;
        }
    }
    let index = window
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    Ok(CoinvariantSpace {
        charge,
        d_min: trunc.d_min,
        window,
        index,
        echelon,
        block_basis,
        dimension: dim,
        stabilized,
        ar_basis,
        ar_degrees,
    })
}

/// Covariant derivative on wedge vectors with constant coordinates:
/// `∇_X v = ∂_X v + T(e_X) v`, where `∂_X = dpart + D̂_X` accounts for the
/// moduli variation of the mode functions (the monomial trivialization
/// freezes the formal modes; the paper's derivative follows the moving
/// mode frame, and the two differ exactly by the one-body operator `D̂`).
pub fn covariant_apply<F: Field>(
    sug: &Sugawara<'_, '_, F>,
    e_x: &KnForm<F>,
    dir: u8,
    v: &WedgeVector<F>,
) -> Result<WedgeVector<F>> {
    let space = sug.space;
    let dv = space.apply(&FermionOperator::ModeVariation(dir), v);
    let tv = sug.apply_field(e_x, v)?;
    Ok(dv.add(&tv))
}

/// Matrix of `∇_X` on block coordinates: `M_X = P ∘ (D̂_X + T(e_X)) ∘ ι`
/// with jet-valued entries. The embedding by constant complement
/// monomials contributes no further ∂-part; the horizontal-section system
/// is `∂_p Ψ = -M_p Ψ`.
pub fn nabla<F: Field>(
    sug: &Sugawara<'_, '_, F>,
    blocks: &CoinvariantSpace<F>,
    e_x: &KnForm<F>,
    dir: u8,
) -> Result<Mat<F>> {
    let dim = blocks.dimension;
    let mut cols = Vec::with_capacity(dim);
    for m in &blocks.block_basis {
        let v = WedgeVector::monomial(m.clone());
        cols.push(blocks.project(&covariant_apply(sug, e_x, dir, &v)?));
    }
    let mut rows = alloc::vec![alloc::vec![Jet::zero(); dim]; dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, c) in col.iter().enumerate() {
            rows[i][j] = c.clone();
        }
    }
    Ok(rows)
}

fn mat_part<F: Field>(m: &Mat<F>, which: JetPart) -> Mat<F> {
    m.iter()
        .map(|row| row.iter().map(|e| e.extract(which)).collect())
        .collect()
}

fn mat_mul<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    let n = a.len();
    let mut out = alloc::vec![alloc::vec![Jet::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                let t = a[i][k].mul(&b[k][j]);
                out[i][j] = out[i][j].add(&t);
            }
        }
    }
    out
}

fn mat_sub<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

/// Central scalar `λ(X,Y)` of the flatness defect
/// `[∇_X, ∇_Y] = ∂_X M_Y - ∂_Y M_X + [M_X, M_Y]` for commuting coordinate
/// directions, with `∂_X` read from the ε₁ parts and `∂_Y` from the ε₂
/// parts of the jet-valued connection matrices.
pub fn connection_curvature<F: Field>(m_x: &Mat<F>, m_y: &Mat<F>) -> Result<Jet<F>> {
    let d_x_my = mat_part(m_y, JetPart::D1);
    let d_y_mx = mat_part(m_x, JetPart::D2);
    let vx = mat_part(m_x, JetPart::Value);
    let vy = mat_part(m_y, JetPart::Value);
    let comm = mat_sub(&mat_mul(&vx, &vy), &mat_mul(&vy, &vx));
    let curv = {
        let t = mat_sub(&d_x_my, &d_y_mx);
        t.iter()
            .zip(&comm)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(a, b)| a.add(b))
                    .collect::<Vec<_>>()
            })
            .collect::<Mat<F>>()
    };
    linalg::as_scalar(&curv).ok_or(KnError::NotScalar)
}

/// `A^X = ∂_X A + e_X.A`, truncated to the components representable at
/// first order in `dir`. Regular for regular `A`.
pub fn a_x_form<F: Field>(e_x: &KnForm<F>, a: &KnForm<F>, dir: u8) -> Result<KnForm<F>> {
    Ok(a.dpart(dir).add(&lie_derivative(e_x, a)?)?.truncate_dir(dir))
}

/// `e^X = ∂_X e + [e_X, e]`, truncated as in [`a_x_form`]. Regular for
/// regular `e`.
pub fn e_x_form<F: Field>(e_x: &KnForm<F>, e: &KnForm<F>, dir: u8) -> Result<KnForm<F>> {
    Ok(e.dpart(dir).add(&bracket_vector_fields(e_x, e)?)?.truncate_dir(dir))
}

/// `[e_X, e_Y] + ∂_X e_Y - ∂_Y e_X`: a pull-back of `[X,Y] = 0`, hence an
/// element of ℒ^r (vanishing at ∞). Direction X reads ε₁, Y reads ε₂;
/// both second derivatives are dropped, keeping the exact value part.
pub fn ue_combination<F: Field>(e_x: &KnForm<F>, e_y: &KnForm<F>) -> Result<KnForm<F>> {
    Ok(bracket_vector_fields(e_x, e_y)?
        .add(&e_y.dpart(1))?
        .sub(&e_x.dpart(2))?
        .truncate_dir(1)
        .truncate_dir(2))
}

/// `∂_X` applied to the operator `u(A)` on one monomial: entrywise jet
/// derivative plus the mode-variation commutator, i.e.
/// `(∂_X u(A))Φ = dpart(u(A)Φ) + D̂(u(A)Φ) - u(A)(D̂Φ)`.
fn d_operator_on<F: Field>(
    space: &FermionSpace<'_, F>,
    op: &FermionOperator<F>,
    dir: u8,
    v: &WedgeVector<F>,
) -> WedgeVector<F> {
    let dv = FermionOperator::ModeVariation(dir);
    let entry = space.apply(op, v).dpart(dir);
    let comm = space
        .apply(&dv, &space.apply(op, v))
        .sub(&space.apply(op, &space.apply(&dv, v)));
    entry.add(&comm)
}

/// Defect of Lemma-level commutation `∂_X u(A) = u(∂_X A)` on one
/// monomial: the regularized counter terms commute with the exact moduli
/// derivative.
pub fn normal_lemma_defect<F: Field>(
    space: &FermionSpace<'_, F>,
    x: &GlMat<F>,
    a: &KnForm<F>,
    mono: &WedgeMonomial,
    dir: u8,
) -> Result<WedgeVector<F>> {
    let ctx = space.ctx;
    let v = WedgeVector::monomial(mono.clone());
    let ua = FermionOperator::Current(CurrentElement::from_form(ctx, x, a)?);
    let lhs = d_operator_on(space, &ua, dir, &v);
    let da = a.dpart(dir);
    let uda = FermionOperator::Current(CurrentElement::from_form(ctx, x, &da)?);
    let rhs = space.apply(&uda, &v);
    // Components with a second derivative in `dir` are not representable
    // at first order; the identity is exact on the remaining components.
    Ok(lhs.sub(&rhs).truncate_dir(dir))
}

/// Defect of `[∇_X, u(A)] = u(A^X)` on one monomial:
/// `∂_X(u(A))Φ + [T(e_X), u(A)]Φ - u(A^X)Φ`.
pub fn corr_defect<F: Field>(
    sug: &Sugawara<'_, '_, F>,
    e_x: &KnForm<F>,
    x: &GlMat<F>,
    a: &KnForm<F>,
    mono: &WedgeMonomial,
    dir: u8,
) -> Result<WedgeVector<F>> {
    let space = sug.space;
    let ctx = space.ctx;
    let v = WedgeVector::monomial(mono.clone());
    let ua = FermionOperator::Current(CurrentElement::from_form(ctx, x, a)?);
    let d_ua = d_operator_on(space, &ua, dir, &v);
    let t_u = sug.apply_field(e_x, &space.apply(&ua, &v))?;
    let u_t = space.apply(&ua, &sug.apply_field(e_x, &v)?);
    let ax = a_x_form(e_x, a, dir)?;
    let uax = FermionOperator::Current(CurrentElement::from_form(ctx, x, &ax)?);
    let rhs = space.apply(&uax, &v);
    Ok(d_ua.add(&t_u.sub(&u_t)).sub(&rhs).truncate_dir(dir))
}

/// Scalar defect of `∂_X T(e) = T(∂_X e) + λ·id` across a window.
pub fn norm1_scalar<F: Field>(
    sug: &Sugawara<'_, '_, F>,
    e: &KnForm<F>,
    basis: &[WedgeMonomial],
    dir: u8,
) -> Result<Jet<F>> {
    let space = sug.space;
    let de = e.dpart(dir);
    let dv = FermionOperator::ModeVariation(dir);
    let mut lambda: Option<Jet<F>> = None;
    for mono in basis {
        let v = WedgeVector::monomial(mono.clone());
        let te = sug.apply_field(e, &v)?;
        let lhs = te
            .dpart(dir)
            .add(&space.apply(&dv, &te))
            .sub(&sug.apply_field(e, &space.apply(&dv, &v))?);
        let rhs = sug.apply_field(&de, &v)?;
        let defect = lhs.sub(&rhs).truncate_dir(dir);
        let lam = defect.coeff(mono);
        let rest = defect.sub(&WedgeVector::monomial(mono.clone()).scale(&lam));
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

/// The emitted generalized KZ system `∂_p Ψ = -M_p Ψ` on block
/// coordinates: one exact matrix per direction.
pub struct KzSystem<F: Field> {
    pub dimension: usize,
    pub matrices: Vec<(usize, Mat<F>)>,
}

/// Builds the full system; directions without a seeded ε still get their
/// exact value-level matrix (the ∂-parts are only needed for curvature).
pub fn kz_emit<F: Field>(
    sug: &Sugawara<'_, '_, F>,
    blocks: &CoinvariantSpace<F>,
    dir_of: impl Fn(usize) -> u8,
) -> Result<KzSystem<F>> {
    let ctx = sug.space.ctx;
    let mut matrices = Vec::new();
    for p in 1..=ctx.n_points() {
        let e_x = pullback(ctx, ModuliDirection(p));
        let m = nabla(sug, blocks, &e_x, dir_of(p))?;
        matrices.push((p, mat_part(&m, JetPart::Value)));
    }
    Ok(KzSystem {
        dimension: blocks.dimension,
        matrices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::MarkedConfig;
    use crate::scalar::Rat;
    use crate::sugawara::build_split;

    type Ctx = KnContext<Rat>;

    fn ctx(points: &[i64]) -> Ctx {
        KnContext::new(MarkedConfig::from_values(points).unwrap())
    }

    #[test]
    fn heisenberg_blocks_are_one_dimensional() {
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let blocks = conformal_blocks(&space, 0, Truncation::new(-5)).unwrap();
        assert_eq!(blocks.dimension, 1);
        assert!(blocks.stabilized);
        assert!(blocks.block_basis[0].is_vacuum());
        // Projection of a span vector is zero.
        let ar = &blocks.ar_basis[0];
        let mut cur = CurrentElement::zero(1);
        for (idx, co) in &ar.expansion {
            cur = cur
                .add(&CurrentElement::from_basis(GlMat::identity(1).scale(co), *idx))
                .unwrap();
        }
        let v = space.apply(
            &FermionOperator::Current(cur),
            &WedgeVector::monomial(WedgeMonomial::vacuum(0)),
        );
        assert!(blocks.in_span(&v));
    }

    #[test]
    fn blocks_two_points_gl1() {
        let c = ctx(&[0, 1]);
        let space = FermionSpace::new(&c, 1);
        let blocks = conformal_blocks(&space, 0, Truncation::new(-4)).unwrap();
        assert!(blocks.stabilized, "dimension did not stabilize");
        assert_eq!(blocks.dimension, 1);
    }

    #[test]
    fn nabla_and_pullback_independence_gl1_n2() {
        let cfg = MarkedConfig::seeded(
            alloc::vec![Rat::from_i64(0), Rat::from_i64(1)],
            Some(1),
            Some(2),
        )
        .unwrap();
        let c = KnContext::new(cfg);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-3)).unwrap();
        let sug = Sugawara::new(&space, split);
        let blocks = conformal_blocks(&space, 0, Truncation::new(-4)).unwrap();
        assert!(blocks.stabilized);
        let e1 = pullback(&c, ModuliDirection(1));
        let m1 = nabla(&sug, &blocks, &e1, 1).unwrap();
        // Correct the pull-back by a regular field; the block operator
        // must not move.
        let reg = regular_window_basis(&c, -1, (-3, 0));
        assert!(!reg.is_empty());
        let e1c = e1.add(&reg[0].form).unwrap();
        let m1c = nabla(&sug, &blocks, &e1c, 1).unwrap();
        assert_eq!(m1, m1c, "block operator depends on the pull-back");
    }

    #[test]
    fn flatness_scalar_gl1_n2() {
        let cfg = MarkedConfig::seeded(
            alloc::vec![Rat::from_i64(0), Rat::from_i64(1)],
            Some(1),
            Some(2),
        )
        .unwrap();
        let c = KnContext::new(cfg);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-3)).unwrap();
        let sug = Sugawara::new(&space, split);
        let blocks = conformal_blocks(&space, 0, Truncation::new(-4)).unwrap();
        let m1 = nabla(&sug, &blocks, &pullback(&c, ModuliDirection(1)), 1).unwrap();
        let m2 = nabla(&sug, &blocks, &pullback(&c, ModuliDirection(2)), 2).unwrap();
        let lam12 = connection_curvature(&m1, &m2).unwrap();
        // Antisymmetry: λ(Y,X) = -λ(X,Y). Swapping the roles of the
        // directions means reading the ε parts the other way round.
        let swap = |m: &Mat<Rat>| -> Mat<Rat> {
            m.iter()
                .map(|row| {
                    row.iter()
                        .map(|e| Jet::new(e.v.clone(), e.d2.clone(), e.d1.clone(), e.d12.clone()))
                        .collect()
                })
                .collect()
        };
        let lam21 = connection_curvature(&swap(&m2), &swap(&m1)).unwrap();
        assert_eq!(lam12.v, lam21.v.neg());
    }

    #[test]
    fn derivative_identities_small() {
        // N=2, jets on z_1 (ε₁) and z_2 (ε₂).
        let cfg = MarkedConfig::seeded(
            alloc::vec![Rat::from_i64(0), Rat::from_i64(1)],
            Some(1),
            Some(2),
        )
        .unwrap();
        let c = KnContext::new(cfg);
        let e_x = pullback(&c, ModuliDirection(1));
        let e_y = pullback(&c, ModuliDirection(2));
        // A regular ⇒ A^X regular.
        for a in regular_window_basis(&c, 0, (-3, 1)) {
            let ax = a_x_form(&e_x, &a.form, 1).unwrap();
            assert!(
                crate::algebras::is_regular(&c, &ax).unwrap(),
                "A^X not regular"
            );
        }
        // Constant A = 1: A^X = 0.
        let one = KnForm::one();
        assert!(a_x_form(&e_x, &one, 1).unwrap().is_zero());
        // e regular ⇒ e^X regular.
        for e in regular_window_basis(&c, -1, (-3, 0)) {
            let ex = e_x_form(&e_x, &e.form, 1).unwrap();
            assert!(
                crate::algebras::is_regular(&c, &ex).unwrap(),
                "e^X not regular"
            );
        }
        // Lemma (ue): the combination vanishes at ∞.
        let comb = ue_combination(&e_x, &e_y).unwrap();
        assert!(crate::algebras::is_regular(&c, &comb).unwrap());
    }

    #[test]
    fn normal_lemma_under_jets() {
        let cfg = MarkedConfig::seeded(
            alloc::vec![Rat::from_i64(0), Rat::from_i64(2)],
            Some(1),
            None,
        )
        .unwrap();
        let c = KnContext::new(cfg);
        let space = FermionSpace::new(&c, 1);
        let x = GlMat::identity(1);
        let basis = space.window_basis(0, -3);
        for n in -2..=1 {
            for p in 1..=2 {
                let a = c.fn_basis(KnIndex::new(n, p));
                for mono in &basis {
                    let d = normal_lemma_defect(&space, &x, &a, mono, 1).unwrap();
                    assert!(d.is_zero(), "n={n} p={p} mono={mono:?}");
                }
            }
        }
    }

    #[test]
    fn corr_identity_on_regular_functions() {
        let cfg = MarkedConfig::seeded(
            alloc::vec![Rat::from_i64(0), Rat::from_i64(1)],
            Some(1),
            Some(2),
        )
        .unwrap();
        let c = KnContext::new(cfg);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-3)).unwrap();
        let sug = Sugawara::new(&space, split);
        let e_x = pullback(&c, ModuliDirection(1));
        let x = GlMat::identity(1);
        let basis = space.window_basis(0, -3);
        for a in regular_window_basis(&c, 0, (-2, 1)) {
            for mono in basis.iter().take(4) {
                let d = corr_defect(&sug, &e_x, &x, &a.form, mono, 1).unwrap();
                assert!(d.is_zero(), "corr defect nonzero");
            }
        }
    }

    #[test]
    fn kz_emission_shape() {
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let split = build_split(&space, 0, Truncation::new(-3)).unwrap();
        let sug = Sugawara::new(&space, split);
        let blocks = conformal_blocks(&space, 0, Truncation::new(-4)).unwrap();
        let kz = kz_emit(&sug, &blocks, |_| 1).unwrap();
        assert_eq!(kz.dimension, 1);
        assert_eq!(kz.matrices.len(), 1);
    }
}
