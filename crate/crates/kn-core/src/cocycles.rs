//! Geometric 2-cocycles integrated over a separating cycle, realized as
//! sums of residues over the in-points, and the resulting central
//! extensions.
//!
//! Orientation convention: every cycle integral is `Σ_{P∈I} res_P`; the
//! opposite orientation flips the sign of all central terms globally.

use alloc::vec::Vec;

use crate::algebras::{bracket_currents, CurrentElement, DiffOp, GlMat};
use crate::error::{KnError, Result};
use crate::forms::{bracket_vector_fields, lie_derivative, KnContext, KnForm, KnIndex};
use crate::jet::Jet;
use crate::linalg;
use crate::ratfun::RationalFunction;
use crate::scalar::{Field, Ring};

/// Projective connection `R`; at genus 0 the zero function is a valid
/// global holomorphic choice in the z-chart.
#[derive(Clone, Debug)]
pub struct ProjectiveConnection<F: Field> {
    pub r: RationalFunction<F>,
}

impl<F: Field> Default for ProjectiveConnection<F> {
    fn default() -> Self {
        ProjectiveConnection {
            r: RationalFunction::zero(),
        }
    }
}

/// Affine connection `T`; `T ≡ 0` in the z-chart induces a first-order
/// pole at `∞` in the w-chart, within the allowed pole order one there.
#[derive(Clone, Debug)]
pub struct AffineConnectionT<F: Field> {
    pub t: RationalFunction<F>,
}

impl<F: Field> Default for AffineConnectionT<F> {
    fn default() -> Self {
        AffineConnectionT {
            t: RationalFunction::zero(),
        }
    }
}

/// Symmetric invariant bilinear form `α(x,y) = r1·tr(xy) + r2·tr(x)tr(y)`
/// on gl(n).
#[derive(Clone, Debug)]
pub struct BilinearFormGL<F: Field> {
    pub r1: Jet<F>,
    pub r2: Jet<F>,
}

impl<F: Field> BilinearFormGL<F> {
    /// `α₁(x,y) = tr(xy)`.
    pub fn alpha1() -> Self {
        BilinearFormGL {
            r1: Jet::one(),
            r2: Jet::zero(),
        }
    }

    /// `α₂(x,y) = tr(x)tr(y)`.
    pub fn alpha2() -> Self {
        BilinearFormGL {
            r1: Jet::zero(),
            r2: Jet::one(),
        }
    }

    pub fn eval(&self, x: &GlMat<F>, y: &GlMat<F>) -> Jet<F> {
        self.r1
            .mul(&x.trace_product(y))
            .add(&self.r2.mul(&x.trace()).mul(&y.trace()))
    }
}

fn residue_sum<F: Field>(ctx: &KnContext<F>, h: &RationalFunction<F>) -> Jet<F> {
    let mut acc = Jet::zero();
    for pt in ctx.config().points() {
        acc = acc.add(&h.residue_at(pt));
    }
    acc
}

/// Function cocycle `γ(A,B) = Σ_I res(A·B' dz)`.
pub fn cocycle_function<F: Field>(ctx: &KnContext<F>, a: &KnForm<F>, b: &KnForm<F>) -> Jet<F> {
    debug_assert!(a.weight == 0 && b.weight == 0);
    residue_sum(ctx, &a.coeff.mul(&b.coeff.derivative()))
}

/// Virasoro-Gelfand-Fuks cocycle
/// `γ(e,f) = (1/24πi)∮ (½(ẽ‴f̃ - ẽf̃‴) - R(ẽ'f̃ - ẽf̃')) dz`.
pub fn cocycle_vector<F: Field>(
    ctx: &KnContext<F>,
    e: &KnForm<F>,
    f: &KnForm<F>,
    conn: &ProjectiveConnection<F>,
) -> Jet<F> {
    debug_assert!(e.weight == -1 && f.weight == -1);
    let et = &e.coeff;
    let ft = &f.coeff;
    let half = Jet::from_i64(2).inv().unwrap();
    let main = et
        .derivative()
        .derivative()
        .derivative()
        .mul(ft)
        .sub(&et.mul(&ft.derivative().derivative().derivative()))
        .scale(&half);
    let corr = conn
        .r
        .mul(&et.derivative().mul(ft).sub(&et.mul(&ft.derivative())));
    let integrand = main.sub(&corr);
    residue_sum(ctx, &integrand).mul(&Jet::from_i64(12).inv().unwrap())
}

/// Mixing cocycle `γ(e,A) = Σ_I res((ẽA'' + TẽA') dz)`, antisymmetric by
/// definition between the function and vector slots.
pub fn cocycle_mixing<F: Field>(
    ctx: &KnContext<F>,
    e: &KnForm<F>,
    a: &KnForm<F>,
    conn: &AffineConnectionT<F>,
) -> Jet<F> {
    debug_assert!(e.weight == -1 && a.weight == 0);
    let integrand = e
        .coeff
        .mul(&a.coeff.derivative().derivative())
        .add(&conn.t.mul(&e.coeff).mul(&a.coeff.derivative()));
    residue_sum(ctx, &integrand)
}

/// Current cocycle `γ(x⊗A, y⊗B) = α(x,y)·γ^(f)(A,B)`, bilinear over
/// canonical terms.
pub fn cocycle_current<F: Field>(
    ctx: &KnContext<F>,
    x: &CurrentElement<F>,
    y: &CurrentElement<F>,
    alpha: &BilinearFormGL<F>,
) -> Result<Jet<F>> {
    if x.rank_gl() != y.rank_gl() {
        return Err(KnError::DimensionMismatch);
    }
    let mut acc = Jet::zero();
    for (ia, ma) in x.terms() {
        for (ib, mb) in y.terms() {
            let av = alpha.eval(ma, mb);
            if av.is_zero() {
                continue;
            }
            let g = cocycle_function(ctx, &ctx.fn_basis(*ia), &ctx.fn_basis(*ib));
            acc = acc.add(&av.mul(&g));
        }
    }
    Ok(acc)
}

/// Full local cocycle of 𝒟¹_g with weights on the four basic classes:
/// `r1·γ₁ + r2·γ₂ + r3·γ_mix + r4·γ_vec` (mixing form `φ = tr`).
#[allow(clippy::too_many_arguments)]
pub fn cocycle_diffop<F: Field>(
    ctx: &KnContext<F>,
    d1: &DiffOp<F>,
    d2: &DiffOp<F>,
    weights: (&Jet<F>, &Jet<F>, &Jet<F>, &Jet<F>),
    rconn: &ProjectiveConnection<F>,
    tconn: &AffineConnectionT<F>,
) -> Result<Jet<F>> {
    let (r1, r2, r3, r4) = weights;
    let mut acc = Jet::zero();
    if !r1.is_zero() || !r2.is_zero() {
        let alpha = BilinearFormGL {
            r1: r1.clone(),
            r2: r2.clone(),
        };
        acc = acc.add(&cocycle_current(ctx, &d1.current, &d2.current, &alpha)?);
    }
    if !r3.is_zero() {
        let mut mix = Jet::zero();
        for (idx, m) in d2.current.terms() {
            let t = m.trace();
            if t.is_zero() {
                continue;
            }
            mix = mix.add(&t.mul(&cocycle_mixing(ctx, &d1.vector, &ctx.fn_basis(*idx), tconn)));
        }
        for (idx, m) in d1.current.terms() {
            let t = m.trace();
            if t.is_zero() {
                continue;
            }
            mix = mix.sub(&t.mul(&cocycle_mixing(ctx, &d2.vector, &ctx.fn_basis(*idx), tconn)));
        }
        acc = acc.add(&r3.mul(&mix));
    }
    if !r4.is_zero() && !d1.vector.is_zero() && !d2.vector.is_zero() {
        acc = acc.add(&r4.mul(&cocycle_vector(ctx, &d1.vector, &d2.vector, rconn)));
    }
    Ok(acc)
}

/// Element of the affine algebra ĝ: a current plus a central coefficient.
#[derive(Clone, PartialEq, Debug)]
pub struct AffineElement<F: Field> {
    pub current: CurrentElement<F>,
    pub central: Jet<F>,
}

impl<F: Field> AffineElement<F> {
    pub fn from_current(current: CurrentElement<F>) -> Self {
        AffineElement {
            current,
            central: Jet::zero(),
        }
    }

    pub fn central(rank: usize, c: Jet<F>) -> Self {
        AffineElement {
            current: CurrentElement::zero(rank),
            central: c,
        }
    }
}

/// `[x̂, ŷ] = widehat([x,y]⊗AB) + α(x,y)·γ_S(A,B)·t`; `t` is central, so
/// the central coefficients of the inputs do not contribute.
pub fn affine_bracket<F: Field>(
    ctx: &KnContext<F>,
    x: &AffineElement<F>,
    y: &AffineElement<F>,
    alpha: &BilinearFormGL<F>,
) -> Result<AffineElement<F>> {
    Ok(AffineElement {
        current: bracket_currents(ctx, &x.current, &y.current)?,
        central: cocycle_current(ctx, &x.current, &y.current, alpha)?,
    })
}

/// Locality scan report over homogeneous pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalityReport {
    /// max of n+m over nonzero values, if any
    pub upper: Option<i64>,
    /// min of n+m over nonzero values, if any
    pub lower: Option<i64>,
    pub is_local: bool,
}

/// Scans all homogeneous index pairs in `window²` and reports the extreme
/// degree sums with nonzero cocycle value. The zero cocycle is local with
/// empty bounds.
pub fn check_local<F: Field>(
    n_points: usize,
    window: (i64, i64),
    mut eval: impl FnMut(KnIndex, KnIndex) -> Jet<F>,
) -> LocalityReport {
    let mut upper = None;
    let mut lower = None;
    for n in window.0..=window.1 {
        for p in 1..=n_points {
            for m in window.0..=window.1 {
                for r in 1..=n_points {
                    let v = eval(KnIndex::new(n, p), KnIndex::new(m, r));
                    if !v.is_zero() {
                        let s = n + m;
                        upper = Some(upper.map_or(s, |u: i64| u.max(s)));
                        lower = Some(lower.map_or(s, |l: i64| l.min(s)));
                    }
                }
            }
        }
    }
    LocalityReport {
        upper,
        lower,
        is_local: true,
    }
}

/// L-invariance defect of the function cocycle:
/// `γ(e.g, h) - γ(e.h, g)`, identically zero.
pub fn linv_defect<F: Field>(
    ctx: &KnContext<F>,
    e: &KnForm<F>,
    g: &KnForm<F>,
    h: &KnForm<F>,
) -> Result<Jet<F>> {
    let eg = lie_derivative(e, g)?;
    let eh = lie_derivative(e, h)?;
    Ok(cocycle_function(ctx, &eg, h).sub(&cocycle_function(ctx, &eh, g)))
}

/// L-invariance defect for current cocycles:
/// `γ(x(e.g), y(h)) + γ(x(g), y(e.h))`, identically zero.
pub fn glinv_defect<F: Field>(
    ctx: &KnContext<F>,
    x: &GlMat<F>,
    y: &GlMat<F>,
    e: &KnForm<F>,
    g: &KnForm<F>,
    h: &KnForm<F>,
    alpha: &BilinearFormGL<F>,
) -> Result<Jet<F>> {
    let eg = lie_derivative(e, g)?;
    let eh = lie_derivative(e, h)?;
    let x_eg = CurrentElement::from_form(ctx, x, &eg)?;
    let y_h = CurrentElement::from_form(ctx, y, h)?;
    let x_g = CurrentElement::from_form(ctx, x, g)?;
    let y_eh = CurrentElement::from_form(ctx, y, &eh)?;
    Ok(cocycle_current(ctx, &x_eg, &y_h, alpha)?.add(&cocycle_current(ctx, &x_g, &y_eh, alpha)?))
}

/// Witness that two vector-field cocycles (for different projective
/// connections) differ by a coboundary: a linear form `φ` on the basis
/// with `γ₁ - γ₂ = φ∘bracket` on all window pairs. `None` carries no
/// witness, i.e. the exact solve found an obstruction.
pub fn vector_coboundary_witness<F: Field>(
    ctx: &KnContext<F>,
    c1: &ProjectiveConnection<F>,
    c2: &ProjectiveConnection<F>,
    window: (i64, i64),
) -> Option<Vec<(KnIndex, Jet<F>)>> {
    // Unknowns: φ on basis indices the brackets can reach.
    let margin = 4;
    let unknowns: Vec<KnIndex> = (2 * window.0 - margin..=2 * window.1 + margin)
        .flat_map(|n| (1..=ctx.n_points()).map(move |p| KnIndex::new(n, p)))
        .collect();
    let col_of = |idx: &KnIndex| unknowns.iter().position(|u| u == idx).unwrap();
    let mut rows: linalg::Mat<F> = Vec::new();
    let mut rhs: Vec<Jet<F>> = Vec::new();
    for n in window.0..=window.1 {
        for p in 1..=ctx.n_points() {
            for m in window.0..=window.1 {
                for r in 1..=ctx.n_points() {
                    let e = ctx.vf_basis(KnIndex::new(n, p));
                    let f = ctx.vf_basis(KnIndex::new(m, r));
                    let delta = cocycle_vector(ctx, &e, &f, c1)
                        .sub(&cocycle_vector(ctx, &e, &f, c2));
                    let br = bracket_vector_fields(&e, &f).unwrap();
                    let mut row = alloc::vec![Jet::zero(); unknowns.len()];
                    for (idx, c) in ctx.expand(&br).ok()? {
                        row[col_of(&idx)] = c;
                    }
                    rows.push(row);
                    rhs.push(delta);
                }
            }
        }
    }
    let phi = linalg::solve(&rows, &rhs)?;
    Some(
        unknowns
            .into_iter()
            .zip(phi)
            .filter(|(_, c)| !c.is_zero())
            .collect(),
    )
}

/// Same exhibit for the mixing cocycle under a change of the affine
/// connection; here `φ` lives on the function basis and
/// `φ([e, A]) = φ(e.A)`.
pub fn mixing_coboundary_witness<F: Field>(
    ctx: &KnContext<F>,
    c1: &AffineConnectionT<F>,
    c2: &AffineConnectionT<F>,
    window: (i64, i64),
) -> Option<Vec<(KnIndex, Jet<F>)>> {
    let margin = 4;
    let unknowns: Vec<KnIndex> = (2 * window.0 - margin..=2 * window.1 + margin)
        .flat_map(|n| (1..=ctx.n_points()).map(move |p| KnIndex::new(n, p)))
        .collect();
    let col_of = |idx: &KnIndex| unknowns.iter().position(|u| u == idx).unwrap();
    let mut rows: linalg::Mat<F> = Vec::new();
    let mut rhs: Vec<Jet<F>> = Vec::new();
    for n in window.0..=window.1 {
        for p in 1..=ctx.n_points() {
            for m in window.0..=window.1 {
                for r in 1..=ctx.n_points() {
                    let e = ctx.vf_basis(KnIndex::new(n, p));
                    let a = ctx.fn_basis(KnIndex::new(m, r));
                    let delta =
                        cocycle_mixing(ctx, &e, &a, c1).sub(&cocycle_mixing(ctx, &e, &a, c2));
                    let mut row = alloc::vec![Jet::zero(); unknowns.len()];
                    for (idx, c) in ctx.lie_expansion(KnIndex::new(n, p), KnIndex::new(m, r)) {
                        row[col_of(&idx)] = c;
                    }
                    rows.push(row);
                    rhs.push(delta);
                }
            }
        }
    }
    let phi = linalg::solve(&rows, &rhs)?;
    Some(
        unknowns
            .into_iter()
            .zip(phi)
            .filter(|(_, c)| !c.is_zero())
            .collect(),
    )
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

    fn rat(n: i64, d: i64) -> J {
        Jet::from_value(Rat::new(n, d))
    }

    #[test]
    fn classical_function_cocycle() {
        let c = ctx(&[0]);
        for n in -4..=4 {
            for m in -4..=4 {
                let v = cocycle_function(
                    &c,
                    &c.fn_basis(KnIndex::new(n, 1)),
                    &c.fn_basis(KnIndex::new(m, 1)),
                );
                let expect = if n + m == 0 { J::from_i64(m) } else { J::zero() };
                assert_eq!(v, expect);
            }
        }
        // γ(A, A) = 0 and γ(1, B) = 0
        let a = c.fn_basis(KnIndex::new(3, 1));
        assert!(cocycle_function(&c, &a, &a).is_zero());
        assert!(cocycle_function(&c, &KnForm::one(), &a).is_zero());
    }

    #[test]
    fn classical_virasoro_cocycle() {
        let c = ctx(&[0]);
        let r = ProjectiveConnection::default();
        for n in -4..=4i64 {
            for m in -4..=4i64 {
                let v = cocycle_vector(
                    &c,
                    &c.vf_basis(KnIndex::new(n, 1)),
                    &c.vf_basis(KnIndex::new(m, 1)),
                    &r,
                );
                let expect = if n + m == 0 {
                    rat(n * n * n - n, 12)
                } else {
                    J::zero()
                };
                assert_eq!(v, expect, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn classical_mixing_cocycle() {
        let c = ctx(&[0]);
        let t = AffineConnectionT::default();
        for n in -4..=4i64 {
            for m in -4..=4i64 {
                let v = cocycle_mixing(
                    &c,
                    &c.vf_basis(KnIndex::new(n, 1)),
                    &c.fn_basis(KnIndex::new(m, 1)),
                    &t,
                );
                let expect = if n + m == 0 {
                    J::from_i64(m * (m - 1))
                } else {
                    J::zero()
                };
                assert_eq!(v, expect, "n={n} m={m}");
            }
        }
        // γ(e, 1) = 0
        let e = c.vf_basis(KnIndex::new(2, 1));
        assert!(cocycle_mixing(&c, &e, &KnForm::one(), &t).is_zero());
    }

    #[test]
    fn heisenberg_current_cocycle() {
        let c = ctx(&[0]);
        let alpha = BilinearFormGL::alpha1();
        let one = GlMat::identity(1);
        for n in -3..=3i64 {
            for m in -3..=3i64 {
                let x = CurrentElement::from_basis(one.clone(), KnIndex::new(n, 1));
                let y = CurrentElement::from_basis(one.clone(), KnIndex::new(m, 1));
                let v = cocycle_current(&c, &x, &y, &alpha).unwrap();
                let expect = if n + m == 0 { J::from_i64(m) } else { J::zero() };
                assert_eq!(v, expect);
            }
        }
        // tr(E12 E12) = 0 kills the cocycle
        let e12 = GlMat::unit(2, 0, 1);
        let x = CurrentElement::from_basis(e12.clone(), KnIndex::new(1, 1));
        let y = CurrentElement::from_basis(e12, KnIndex::new(-1, 1));
        assert!(cocycle_current(&c, &x, &y, &alpha).unwrap().is_zero());
    }

    #[test]
    fn locality_upper_bound_zero() {
        for pts in [&[0i64][..], &[0, 1][..]] {
            let c = ctx(pts);
            let rep = check_local(c.n_points(), (-3, 3), |a, b| {
                cocycle_function(&c, &c.fn_basis(a), &c.fn_basis(b))
            });
            assert_eq!(rep.upper, Some(0), "function cocycle N={}", pts.len());
            let r = ProjectiveConnection::default();
            let rep = check_local(c.n_points(), (-3, 3), |a, b| {
                cocycle_vector(&c, &c.vf_basis(a), &c.vf_basis(b), &r)
            });
            assert_eq!(rep.upper, Some(0), "vector cocycle N={}", pts.len());
        }
        // The zero cocycle: local with empty bounds.
        let c = ctx(&[0]);
        let rep = check_local(c.n_points(), (-2, 2), |_, _| J::zero());
        assert_eq!(rep.upper, None);
        assert!(rep.is_local);
        let _ = c;
    }

    #[test]
    fn l_invariance_samples() {
        let c = ctx(&[0, 2]);
        for (en, gp, hn) in [(1i64, 1usize, -1i64), (-2, 2, 0), (0, 1, 2)] {
            let e = c.vf_basis(KnIndex::new(en, 1));
            let g = c.fn_basis(KnIndex::new(0, gp));
            let h = c.fn_basis(KnIndex::new(hn, 2));
            assert!(linv_defect(&c, &e, &g, &h).unwrap().is_zero());
            let x = GlMat::unit(2, 0, 1);
            let y = GlMat::unit(2, 1, 0);
            let alpha = BilinearFormGL::alpha1();
            assert!(glinv_defect(&c, &x, &y, &e, &g, &h, &alpha)
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn cocycle_identity_diffop() {
        // Cocycle identity for the combined 𝒟¹_g cocycle on a few triples.
        let c = ctx(&[0, 1]);
        let r = ProjectiveConnection::default();
        let t = AffineConnectionT::default();
        let w1 = J::one();
        let weights = (&w1, &w1, &w1, &w1);
        let mk = |n: i64, p: usize, i: usize, j: usize, vn: i64, vp: usize| DiffOp::new(
            CurrentElement::from_basis(GlMat::unit(2, i, j), KnIndex::new(n, p)),
            c.vf_basis(KnIndex::new(vn, vp)),
        );
        let f = mk(1, 1, 0, 0, 0, 2);
        let g = mk(-1, 2, 0, 1, 1, 1);
        let h = mk(0, 1, 1, 0, -1, 2);
        let term = |a: &DiffOp<Rat>, b: &DiffOp<Rat>, cc: &DiffOp<Rat>| {
            let ab = crate::algebras::bracket_diffop(&c, a, b).unwrap();
            cocycle_diffop(&c, &ab, cc, weights, &r, &t).unwrap()
        };
        let total = term(&f, &g, &h)
            .add(&term(&g, &h, &f))
            .add(&term(&h, &f, &g));
        assert!(total.is_zero());
    }

    #[test]
    fn affine_bracket_and_centrality() {
        let c = ctx(&[0]);
        let alpha = BilinearFormGL::alpha1();
        let one = GlMat::identity(1);
        // gl(1): [1⊗z, 1⊗z^-1] = 0 + γ(z, z^-1)·t = -t
        let x = AffineElement::from_current(CurrentElement::from_basis(
            one.clone(),
            KnIndex::new(1, 1),
        ));
        let y = AffineElement::from_current(CurrentElement::from_basis(
            one.clone(),
            KnIndex::new(-1, 1),
        ));
        let b = affine_bracket(&c, &x, &y, &alpha).unwrap();
        assert!(b.current.is_zero());
        assert_eq!(b.central, J::from_i64(-1));
        // [t, X] = 0
        let t = AffineElement::central(1, J::one());
        let bt = affine_bracket(&c, &t, &x, &alpha).unwrap();
        assert!(bt.current.is_zero() && bt.central.is_zero());
    }

    #[test]
    fn changing_r_is_a_coboundary() {
        // R -> R + Ω for a quadratic differential Ω changes the vector
        // cocycle by a coboundary; exhibit φ exactly.
        let c = ctx(&[0, 1]);
        let r0 = ProjectiveConnection::default();
        let r1 = ProjectiveConnection {
            r: c.basis(2, KnIndex::new(0, 1)).coeff,
        };
        let phi = vector_coboundary_witness(&c, &r1, &r0, (-2, 2));
        assert!(phi.is_some(), "no coboundary witness found");
        // And for T -> T + ω with a one-form ω.
        let t0 = AffineConnectionT::default();
        let t1 = AffineConnectionT {
            t: c.basis(1, KnIndex::new(0, 2)).coeff,
        };
        let phi = mixing_coboundary_witness(&c, &t1, &t0, (-2, 2));
        assert!(phi.is_some(), "no mixing coboundary witness found");
    }
}
