//! Semi-infinite wedge (fermion) representation for the rank-1 trivial
//! bundle and the defining representation of gl(n).
//!
//! Modes `ψ_M = ψ^i_{n,p} = A_{n,p}⊗v_i` are linearly ordered by
//! `M(n,p,i) = n·N·n_gl + (p-1)·n_gl + (i-1)`. The charge-m vacuum
//! occupies `{M ≥ m·N·n_gl}`; a monomial deviates from it by finitely
//! many holes (in the vacuum region) and particles (below it).
//!
//! Operators act by the Leibniz rule with reordering signs; the divergent
//! diagonal part is replaced by the counter term
//! `λ₁ = Σ_{occupied M < 0} a_MM - Σ_{unoccupied M ≥ 0} a_MM`,
//! a finite sum by the semi-infinite structure. The split at `M = 0` is a
//! block boundary of the mode lattice; with this choice the projective
//! defect of two currents is exactly `α(x,y)·γ_S(f,g)` times the level,
//! with no residual coboundary. Applications to vectors of finite support
//! are exact: no truncation error occurs, windows only select which
//! matrix columns are materialized.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::algebras::CurrentElement;
use crate::error::{KnError, Result};
use crate::forms::{KnContext, KnForm, KnIndex};
use crate::jet::Jet;
use crate::scalar::{Field, Ring};

/// Bijection between mode triples `(n, p, i)` and linear indices `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WedgeIndexer {
    pub n_points: usize,
    pub gl_rank: usize,
}

impl WedgeIndexer {
    pub fn new(n_points: usize, gl_rank: usize) -> Self {
        assert!(n_points >= 1 && gl_rank >= 1);
        WedgeIndexer { n_points, gl_rank }
    }

    /// Modes per KN degree.
    pub fn block(&self) -> i64 {
        (self.n_points * self.gl_rank) as i64
    }

    /// `M(n, p, i)` with `p ∈ 1..N`, `i ∈ 1..n_gl`.
    pub fn index(&self, n: i64, p: usize, i: usize) -> i64 {
        debug_assert!(p >= 1 && p <= self.n_points && i >= 1 && i <= self.gl_rank);
        n * self.block() + ((p - 1) * self.gl_rank + (i - 1)) as i64
    }

    pub fn unindex(&self, m: i64) -> (i64, usize, usize) {
        let b = self.block();
        let n = m.div_euclid(b);
        let rem = m.rem_euclid(b) as usize;
        (n, rem / self.gl_rank + 1, rem % self.gl_rank + 1)
    }
}

/// Truncation control: monomials of degree `≥ d_min` are materialized.
/// Operator applications to explicit vectors are exact, so the whole
/// window is guaranteed-exact; `exact_margin` widens enumeration where a
/// caller wants headroom below `d_min`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub d_min: i64,
    pub exact_margin: i64,
}

impl Truncation {
    pub fn new(d_min: i64) -> Self {
        assert!(d_min <= 0, "degree floor must be ≤ 0");
        Truncation {
            d_min,
            exact_margin: 0,
        }
    }

    pub fn with_margin(d_min: i64, exact_margin: i64) -> Self {
        assert!(d_min <= 0 && exact_margin >= 0);
        Truncation {
            d_min,
            exact_margin,
        }
    }
}

/// Semi-infinite monomial of fixed charge: occupied set
/// `({M ≥ floor} ∖ holes) ∪ particles` with `floor = charge·N·n_gl`,
/// `|holes| = |particles|`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WedgeMonomial {
    charge: i64,
    /// Unoccupied indices `≥ floor`, strictly increasing.
    holes: Vec<i64>,
    /// Occupied indices `< floor`, strictly increasing.
    particles: Vec<i64>,
}

impl WedgeMonomial {
    pub fn vacuum(charge: i64) -> Self {
        WedgeMonomial {
            charge,
            holes: Vec::new(),
            particles: Vec::new(),
        }
    }

    pub fn new(charge: i64, mut holes: Vec<i64>, mut particles: Vec<i64>, idx: &WedgeIndexer) -> Self {
        holes.sort_unstable();
        particles.sort_unstable();
        let floor = charge * idx.block();
        assert!(holes.windows(2).all(|w| w[0] < w[1]), "duplicate holes");
        assert!(
            particles.windows(2).all(|w| w[0] < w[1]),
            "duplicate particles"
        );
        assert!(holes.iter().all(|&h| h >= floor), "hole below the vacuum floor");
        assert!(
            particles.iter().all(|&q| q < floor),
            "particle above the vacuum floor"
        );
        assert_eq!(holes.len(), particles.len(), "charge-inconsistent deviation");
        WedgeMonomial {
            charge,
            holes,
            particles,
        }
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn holes(&self) -> &[i64] {
        &self.holes
    }

    pub fn particles(&self) -> &[i64] {
        &self.particles
    }

    pub fn is_vacuum(&self) -> bool {
        self.holes.is_empty()
    }

    fn floor(&self, idx: &WedgeIndexer) -> i64 {
        self.charge * idx.block()
    }

    /// Degree per the stabilized displacement sum
    /// `Σ_k (N_k - k - floor)`; always ≤ 0.
    pub fn degree(&self, idx: &WedgeIndexer) -> i64 {
        let floor = self.floor(idx);
        let from_particles: i64 = self.particles.iter().map(|q| q - floor).sum();
        let from_holes: i64 = self.holes.iter().map(|h| h - floor).sum();
        from_particles - from_holes
    }

    pub fn is_occupied(&self, m: i64, idx: &WedgeIndexer) -> bool {
        if m < self.floor(idx) {
            self.particles.binary_search(&m).is_ok()
        } else {
            self.holes.binary_search(&m).is_err()
        }
    }

    /// Largest unoccupied index.
    pub fn max_unoccupied(&self, idx: &WedgeIndexer) -> i64 {
        if let Some(&h) = self.holes.last() {
            return h;
        }
        let mut m = self.floor(idx) - 1;
        while self.particles.binary_search(&m).is_ok() {
            m -= 1;
        }
        m
    }

    /// Occupied indices `≤ hi`, ascending.
    pub fn occupied_up_to(&self, hi: i64, idx: &WedgeIndexer) -> Vec<i64> {
        let floor = self.floor(idx);
        let mut out: Vec<i64> = self.particles.iter().copied().filter(|&q| q <= hi).collect();
        let mut m = floor;
        while m <= hi {
            if self.holes.binary_search(&m).is_err() {
                out.push(m);
            }
            m += 1;
        }
        out
    }

    /// Number of occupied indices in the open interval `(a, b)`.
    fn occupied_in_open(&self, a: i64, b: i64, idx: &WedgeIndexer) -> i64 {
        if b - a <= 1 {
            return 0;
        }
        let floor = self.floor(idx);
        let lo = a + 1;
        let hi = b - 1;
        let particles = self
            .particles
            .iter()
            .filter(|&&q| q >= lo && q <= hi)
            .count() as i64;
        let vac_lo = lo.max(floor);
        let vacuum = if hi >= vac_lo { hi - vac_lo + 1 } else { 0 };
        let holes = self
            .holes
            .iter()
            .filter(|&&h| h >= vac_lo && h <= hi)
            .count() as i64;
        particles + vacuum - holes
    }

    /// Moves the factor at `src` to the unoccupied slot `tgt`; returns the
    /// reordered monomial with the fermionic sign.
    pub fn move_particle(&self, src: i64, tgt: i64, idx: &WedgeIndexer) -> (WedgeMonomial, i64) {
        debug_assert!(self.is_occupied(src, idx));
        debug_assert!(!self.is_occupied(tgt, idx) && src != tgt);
        let floor = self.floor(idx);
        let crossings = self.occupied_in_open(src.min(tgt), src.max(tgt), idx);
        let sign = if crossings % 2 == 0 { 1 } else { -1 };
        let mut holes = self.holes.clone();
        let mut particles = self.particles.clone();
        if src >= floor {
            let pos = holes.binary_search(&src).unwrap_err();
            holes.insert(pos, src);
        } else {
            let pos = particles.binary_search(&src).unwrap();
            particles.remove(pos);
        }
        if tgt >= floor {
            let pos = holes.binary_search(&tgt).unwrap();
            holes.remove(pos);
        } else {
            let pos = particles.binary_search(&tgt).unwrap_err();
            particles.insert(pos, tgt);
        }
        (
            WedgeMonomial {
                charge: self.charge,
                holes,
                particles,
            },
            sign,
        )
    }
}

/// Sparse vector in the charge sectors of the wedge space.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgeVector<F: Field> {
    terms: BTreeMap<WedgeMonomial, Jet<F>>,
}

impl<F: Field> Default for WedgeVector<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> WedgeVector<F> {
    pub fn zero() -> Self {
        WedgeVector {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(m: WedgeMonomial) -> Self {
        let mut v = WedgeVector::zero();
        v.accumulate(m, Jet::one());
        v
    }

    pub fn accumulate(&mut self, m: WedgeMonomial, c: Jet<F>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&Jet::from_i64(-1)))
    }

    pub fn scale(&self, c: &Jet<F>) -> Self {
        if c.is_zero() {
            return WedgeVector::zero();
        }
        let mut out = WedgeVector::zero();
        for (m, a) in &self.terms {
            out.accumulate(m.clone(), a.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &WedgeMonomial) -> Jet<F> {
        self.terms.get(m).cloned().unwrap_or_else(Jet::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WedgeMonomial, &Jet<F>)> {
        self.terms.iter()
    }

    /// One ε-component of every coefficient.
    pub fn jet_component(&self, which: crate::jet::JetPart) -> Self {
        let mut out = WedgeVector::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.clone(), c.extract(which));
        }
        out
    }

    /// Coefficientwise ε-derivative (derivation of the jet ring).
    pub fn dpart(&self, direction: u8) -> Self {
        let mut out = WedgeVector::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.clone(), c.dpart(direction));
        }
        out
    }

    /// Drops the components carrying second derivatives in `direction`.
    pub fn truncate_dir(&self, direction: u8) -> Self {
        let mut out = WedgeVector::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.clone(), c.truncate_dir(direction));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// One-body operator columns materialized for the sources touched by an
/// application: off-diagonal targets and the diagonal entry per source.
struct OneBodyColumns<F: Field> {
    cols: BTreeMap<i64, Vec<(i64, Jet<F>)>>,
    diag: BTreeMap<i64, Jet<F>>,
}

impl<F: Field> OneBodyColumns<F> {
    fn new() -> Self {
        OneBodyColumns {
            cols: BTreeMap::new(),
            diag: BTreeMap::new(),
        }
    }
}

/// The fermion space over a context: applies currents and vector fields
/// to wedge vectors exactly.
pub struct FermionSpace<'c, F: Field> {
    pub ctx: &'c KnContext<F>,
    pub indexer: WedgeIndexer,
}

/// A current or a vector field, as it acts on the wedge space; the third
/// variant is the one-body mode-variation operator
/// `ψ^i_{n,p} ↦ (∂_dir A_{n,p})-expansion ⊗ v_i`, the gauge by which the
/// moduli-frozen monomial trivialization differs from the paper's
/// moving-frame one.
#[derive(Clone, Debug)]
pub enum FermionOperator<F: Field> {
    Current(CurrentElement<F>),
    /// Expansion of a weight-(-1) field over the `e_{k,r}` basis.
    VectorField(Vec<(KnIndex, Jet<F>)>),
    /// `D̂` for an ε direction (1 or 2).
    ModeVariation(u8),
}

impl<'c, F: Field> FermionSpace<'c, F> {
    pub fn new(ctx: &'c KnContext<F>, gl_rank: usize) -> Self {
        FermionSpace {
            ctx,
            indexer: WedgeIndexer::new(ctx.n_points(), gl_rank),
        }
    }

    pub fn operator_from_vector_field(&self, e: &KnForm<F>) -> Result<FermionOperator<F>> {
        if e.weight != -1 {
            return Err(KnError::WeightMismatch {
                expected: -1,
                got: e.weight,
            });
        }
        Ok(FermionOperator::VectorField(self.ctx.expand(e)?))
    }

    /// Mode action of a single current `x⊗A_{k,q}` on a single mode
    /// `ψ^i_{n,p}`: the expansion of the image over modes, as
    /// `(M, coefficient)` pairs.
    pub fn gamma_action(
        &self,
        x: &crate::algebras::GlMat<F>,
        form: KnIndex,
        mode: i64,
    ) -> Vec<(i64, Jet<F>)> {
        let (n, p, i) = self.indexer.unindex(mode);
        let mut out = Vec::new();
        for (jdx, c) in self.ctx.product_expansion(form, KnIndex::new(n, p)) {
            for j in 1..=self.indexer.gl_rank {
                let entry = x.at(j - 1, i - 1);
                if entry.is_zero() {
                    continue;
                }
                out.push((self.indexer.index(jdx.n, jdx.p, j), c.mul(entry)));
            }
        }
        out
    }

    /// Lowest possible relative KN-degree shift of an operator (for the
    /// source enumeration bound): products and Lie derivatives never
    /// expand below the degree sum, and a mode variation lowers the mode
    /// degree by at most one.
    fn min_kn_degree(&self, op: &FermionOperator<F>) -> Option<i64> {
        match op {
            FermionOperator::Current(x) => x.degree_support().map(|(lo, _)| lo),
            FermionOperator::VectorField(e) => e.iter().map(|(i, _)| i.n).min(),
            FermionOperator::ModeVariation(_) => Some(-1),
        }
    }

    fn columns_for_source(&self, op: &FermionOperator<F>, src: i64) -> (Vec<(i64, Jet<F>)>, Jet<F>) {
        let (n, p, i) = self.indexer.unindex(src);
        let mut col = Vec::new();
        let mut diag = Jet::zero();
        match op {
            FermionOperator::Current(x) => {
                for (form, mat) in x.terms() {
                    for (jdx, c) in self.ctx.product_expansion(*form, KnIndex::new(n, p)) {
                        for j in 1..=self.indexer.gl_rank {
                            let entry = mat.at(j - 1, i - 1);
                            if entry.is_zero() {
                                continue;
                            }
                            let tgt = self.indexer.index(jdx.n, jdx.p, j);
                            let v = c.mul(entry);
                            if tgt == src {
                                diag = diag.add(&v);
                            } else {
                                col.push((tgt, v));
                            }
                        }
                    }
                }
            }
            FermionOperator::VectorField(e) => {
                for (k, ce) in e {
                    for (jdx, c) in self.ctx.lie_expansion(*k, KnIndex::new(n, p)) {
                        let tgt = self.indexer.index(jdx.n, jdx.p, i);
                        let v = c.mul(ce);
                        if tgt == src {
                            diag = diag.add(&v);
                        } else {
                            col.push((tgt, v));
                        }
                    }
                }
            }
            FermionOperator::ModeVariation(dir) => {
                for (jdx, c) in self.ctx.mode_variation_expansion(*dir, KnIndex::new(n, p)) {
                    let tgt = self.indexer.index(jdx.n, jdx.p, i);
                    if tgt == src {
                        diag = diag.add(&c);
                    } else {
                        col.push((tgt, c));
                    }
                }
            }
        }
        (col, diag)
    }

    /// Applies an operator to a wedge vector. Exact: the result carries
    /// every output monomial with its full coefficient.
    pub fn apply(&self, op: &FermionOperator<F>, v: &WedgeVector<F>) -> WedgeVector<F> {
        let mut out = WedgeVector::zero();
        let Some(min_k) = self.min_kn_degree(op) else {
            return out;
        };
        let b = self.indexer.block();
        // Targets satisfy tgt ≥ src + min_k·B - (B-1): products and Lie
        // derivatives never expand below the degree sum.
        let min_shift = min_k * b - (b - 1);
        let mut cache = OneBodyColumns::new();
        for (mono, amp) in v.iter() {
            let src_hi = mono.max_unoccupied(&self.indexer) - min_shift;
            for src in mono.occupied_up_to(src_hi, &self.indexer) {
                let (col, _) = self.column(&mut cache, op, src);
                for (tgt, c) in col {
                    if mono.is_occupied(tgt, &self.indexer) {
                        continue;
                    }
                    let (m2, sign) = mono.move_particle(src, tgt, &self.indexer);
                    let val = amp.mul(&c).mul(&Jet::from_i64(sign));
                    out.accumulate(m2, val);
                }
            }
            // Regularized diagonal: λ₁ = Σ_{occ M≤0} a_MM - Σ_{unocc M>0} a_MM.
            let lambda1 = self.regularized_diagonal(&mut cache, op, mono);
            out.accumulate(mono.clone(), amp.mul(&lambda1));
        }
        out
    }

    fn column(
        &self,
        cache: &mut OneBodyColumns<F>,
        op: &FermionOperator<F>,
        src: i64,
    ) -> (Vec<(i64, Jet<F>)>, Jet<F>) {
        if let (Some(c), Some(d)) = (cache.cols.get(&src), cache.diag.get(&src)) {
            return (c.clone(), d.clone());
        }
        let (col, diag) = self.columns_for_source(op, src);
        cache.cols.insert(src, col.clone());
        cache.diag.insert(src, diag.clone());
        (col, diag)
    }

    fn regularized_diagonal(
        &self,
        cache: &mut OneBodyColumns<F>,
        op: &FermionOperator<F>,
        mono: &WedgeMonomial,
    ) -> Jet<F> {
        let idx = &self.indexer;
        let floor = mono.charge() * idx.block();
        let mut lambda = Jet::zero();
        // The split sits at the charge-0 vacuum boundary M = 0, which is a
        // block boundary of the mode lattice for every N and n_gl; this is
        // what makes the defect cocycle exactly the geometric one.
        // Occupied positions with M < 0.
        for &q in mono.particles() {
            if q < 0 {
                let (_, d) = self.column(cache, op, q);
                lambda = lambda.add(&d);
            }
        }
        let mut m = floor;
        while m < 0 {
            if mono.holes().binary_search(&m).is_err() {
                let (_, d) = self.column(cache, op, m);
                lambda = lambda.add(&d);
            }
            m += 1;
        }
        // Unoccupied positions with M ≥ 0.
        for &h in mono.holes() {
            if h >= 0 {
                let (_, d) = self.column(cache, op, h);
                lambda = lambda.sub(&d);
            }
        }
        let mut m = 0;
        while m < floor {
            if mono.particles().binary_search(&m).is_err() {
                let (_, d) = self.column(cache, op, m);
                lambda = lambda.sub(&d);
            }
            m += 1;
        }
        lambda
    }

    /// All monomials of the given charge with degree ≥ `d_min`, ordered by
    /// degree descending, then by the canonical monomial order.
    pub fn window_basis(&self, charge: i64, d_min: i64) -> Vec<WedgeMonomial> {
        assert!(d_min <= 0);
        let floor = charge * self.indexer.block();
        let budget = -d_min;

        // k strictly increasing values ≥ min_val with sum ≤ left.
        fn gen_sets(k: usize, min_val: i64, left: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if k == 0 {
                out.push(acc.clone());
                return;
            }
            let ki = k as i64;
            let mut v = min_val;
            while ki * v + ki * (ki - 1) / 2 <= left {
                acc.push(v);
                gen_sets(k - 1, v + 1, left - v, acc, out);
                acc.pop();
                v += 1;
            }
        }

        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let ki = k as i64;
            // k particle depths cost at least 1+2+…+k.
            if ki * (ki + 1) / 2 > budget {
                break;
            }
            let mut hole_sets = Vec::new();
            let mut acc = Vec::new();
            gen_sets(k, 0, budget - ki * (ki + 1) / 2, &mut acc, &mut hole_sets);
            for holes in hole_sets {
                let used: i64 = holes.iter().sum();
                let mut particle_sets = Vec::new();
                let mut acc = Vec::new();
                gen_sets(k, 1, budget - used, &mut acc, &mut particle_sets);
                for depths in particle_sets {
                    let h: Vec<i64> = holes.iter().map(|o| floor + o).collect();
                    let p: Vec<i64> = depths.iter().map(|d| floor - d).collect();
                    out.push(WedgeMonomial::new(charge, h, p, &self.indexer));
                }
            }
            k += 1;
        }
        out.sort_by(|a, b| {
            b.degree(&self.indexer)
                .cmp(&a.degree(&self.indexer))
                .then_with(|| a.cmp(b))
        });
        out
    }

    /// `π([X,Y]) - [π(X),π(Y)]` on every basis monomial; returns the
    /// scalar if the defect is a multiple of the identity, else
    /// `NotScalar`.
    pub fn projective_defect(
        &self,
        x: &FermionOperator<F>,
        y: &FermionOperator<F>,
        basis: &[WedgeMonomial],
    ) -> Result<Jet<F>> {
        let bracket = self.operator_bracket(x, y)?;
        let mut lambda: Option<Jet<F>> = None;
        for mono in basis {
            let v = WedgeVector::monomial(mono.clone());
            let lhs = self.apply_diffop(&bracket, &v);
            let xy = self.apply(x, &self.apply(y, &v));
            let yx = self.apply(y, &self.apply(x, &v));
            let defect = lhs.sub(&xy.sub(&yx));
            // defect must equal λ·mono exactly.
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

    /// Bracket of two operators inside 𝒟¹_g, as a pair
    /// (current part, vector part).
    pub fn operator_bracket(
        &self,
        x: &FermionOperator<F>,
        y: &FermionOperator<F>,
    ) -> Result<(CurrentElement<F>, Vec<(KnIndex, Jet<F>)>)> {
        let to_diffop = |op: &FermionOperator<F>| -> Result<crate::algebras::DiffOp<F>> {
            Ok(match op {
                FermionOperator::Current(c) => {
                    crate::algebras::DiffOp::new(c.clone(), KnForm::zero(-1))
                }
                FermionOperator::VectorField(e) => {
                    let mut form = KnForm::zero(-1);
                    for (k, c) in e {
                        form = form.add(&self.ctx.vf_basis(*k).scale(c))?;
                    }
                    crate::algebras::DiffOp::new(
                        CurrentElement::zero(self.indexer.gl_rank),
                        form,
                    )
                }
                FermionOperator::ModeVariation(_) => {
                    // Not an element of the algebra; no bracket defined.
                    return Err(KnError::Inconsistent);
                }
            })
        };
        let dx = to_diffop(x)?;
        let dy = to_diffop(y)?;
        let b = crate::algebras::bracket_diffop(self.ctx, &dx, &dy)?;
        let vexp = if b.vector.is_zero() {
            Vec::new()
        } else {
            self.ctx.expand(&b.vector)?
        };
        Ok((b.current, vexp))
    }

    /// Applies a mixed current-plus-vector-field operator.
    pub fn apply_diffop(
        &self,
        op: &(CurrentElement<F>, Vec<(KnIndex, Jet<F>)>),
        v: &WedgeVector<F>,
    ) -> WedgeVector<F> {
        let mut out = WedgeVector::zero();
        if !op.0.is_zero() {
            out = out.add(&self.apply(&FermionOperator::Current(op.0.clone()), v));
        }
        if !op.1.is_empty() {
            out = out.add(&self.apply(&FermionOperator::VectorField(op.1.clone()), v));
        }
        out
    }
}

/// Exact matrix of an operator on a window of monomials: column `j` is the
/// full image of basis monomial `j` (entries may lie outside the window's
/// degree range; they are kept, so compositions of columns remain exact).
pub struct OperatorWindow<F: Field> {
    pub basis: Vec<WedgeMonomial>,
    pub columns: Vec<WedgeVector<F>>,
}

impl<F: Field> OperatorWindow<F> {
    pub fn build(
        space: &FermionSpace<'_, F>,
        op: &FermionOperator<F>,
        charge: i64,
        trunc: Truncation,
    ) -> Self {
        let basis = space.window_basis(charge, trunc.d_min - trunc.exact_margin);
        let columns = basis
            .iter()
            .map(|m| space.apply(op, &WedgeVector::monomial(m.clone())))
            .collect();
        OperatorWindow { basis, columns }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::GlMat;
    use crate::forms::MarkedConfig;
    use crate::scalar::Rat;

    type Ctx = KnContext<Rat>;
    type J = Jet<Rat>;

    fn ctx(points: &[i64]) -> Ctx {
        KnContext::new(MarkedConfig::from_values(points).unwrap())
    }

    fn current(space: &FermionSpace<'_, Rat>, n: i64) -> FermionOperator<Rat> {
        let one = GlMat::identity(space.indexer.gl_rank);
        FermionOperator::Current(CurrentElement::from_basis(one, KnIndex::new(n, 1)))
    }

    #[test]
    fn degree_formula_matches_direct_sum() {
        let idx = WedgeIndexer::new(1, 1);
        // occupied {-1, 1, 2, ...}: N_0 = -1 then N_k = k from 1 up.
        let m = WedgeMonomial::new(0, alloc::vec![0], alloc::vec![-1], &idx);
        assert_eq!(m.degree(&idx), -1);
        let m2 = WedgeMonomial::new(0, alloc::vec![2], alloc::vec![-1], &idx);
        assert_eq!(m2.degree(&idx), -3);
    }

    #[test]
    fn window_basis_counts_partitions() {
        // gl(1), N=1: dim of degree slice -d is the partition number p(d).
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let basis = space.window_basis(0, -8);
        let p = [1i64, 1, 2, 3, 5, 7, 11, 15, 22];
        for d in 0..=8i64 {
            let count = basis
                .iter()
                .filter(|m| m.degree(&space.indexer) == -d)
                .count() as i64;
            assert_eq!(count, p[d as usize], "slice {d}");
        }
        // Every monomial has degree ≤ 0.
        for m in &basis {
            assert!(m.degree(&space.indexer) <= 0);
        }
    }

    #[test]
    fn window_basis_counts_independent_of_block() {
        // The slice dimensions are the same for any N·n_gl (single
        // ℤ-indexed fermion species).
        let c = ctx(&[0, 1]);
        let space = FermionSpace::new(&c, 2);
        let basis = space.window_basis(1, -5);
        let p = [1i64, 1, 2, 3, 5, 7];
        for d in 0..=5i64 {
            let count = basis
                .iter()
                .filter(|m| m.degree(&space.indexer) == -d)
                .count() as i64;
            assert_eq!(count, p[d as usize]);
        }
    }

    #[test]
    fn classical_shift_action() {
        // gl(1), N=1: (1⊗z^k)ψ_n = ψ_{n+k}; on the vacuum z^1 annihilates,
        // z^-1 creates the first excited monomial.
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let vac = WedgeVector::monomial(WedgeMonomial::vacuum(0));
        assert!(space.apply(&current(&space, 1), &vac).is_zero());
        let ex = space.apply(&current(&space, -1), &vac);
        let expect = WedgeMonomial::new(0, alloc::vec![0], alloc::vec![-1], &space.indexer);
        assert_eq!(ex, WedgeVector::monomial(expect));
    }

    #[test]
    fn identity_acts_by_charge_counter() {
        // (1⊗1)Φ = λ₁Φ with λ₁ = #occupied(M < 0) - #unoccupied(M ≥ 0);
        // the charge operator vanishes on the charge-0 vacuum and counts
        // vacuum shifts otherwise.
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let vac = WedgeVector::monomial(WedgeMonomial::vacuum(0));
        let out = space.apply(&current(&space, 0), &vac);
        assert!(out.is_zero());
        // For charge 1 the vacuum occupies {M ≥ 1}: λ₁ = 0 - 1 = -1.
        let vac1 = WedgeVector::monomial(WedgeMonomial::vacuum(1));
        let out1 = space.apply(&current(&space, 0), &vac1);
        assert_eq!(out1, vac1.scale(&J::from_i64(-1)));
        // For charge -1 the vacuum occupies {M ≥ -1}: λ₁ = 1.
        let vacm = WedgeVector::monomial(WedgeMonomial::vacuum(-1));
        let outm = space.apply(&current(&space, 0), &vacm);
        assert_eq!(outm, vacm.scale(&J::from_i64(1)));
    }

    #[test]
    fn charge_preserved_and_degrees_bounded() {
        let c = ctx(&[0, 1]);
        let space = FermionSpace::new(&c, 2);
        let x = FermionOperator::Current(CurrentElement::from_basis(
            GlMat::unit(2, 0, 1),
            KnIndex::new(-1, 2),
        ));
        let basis = space.window_basis(0, -3);
        for mono in &basis {
            let out = space.apply(&x, &WedgeVector::monomial(mono.clone()));
            for (m, _) in out.iter() {
                assert_eq!(m.charge(), 0);
                assert!(m.degree(&space.indexer) <= 0);
            }
        }
    }

    #[test]
    fn heisenberg_defect_detects_level() {
        // gl(1), N=1: π([z, z^-1]) - [π(z), π(z^-1)] = -1 on the window,
        // i.e. defect = c·α(1,1)·γ(z, z^-1) with level c = 1.
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let basis = space.window_basis(0, -4);
        let d = space
            .projective_defect(&current(&space, 1), &current(&space, -1), &basis)
            .unwrap();
        assert_eq!(d, J::from_i64(-1));
        // defect(X, X) = 0
        let d0 = space
            .projective_defect(&current(&space, 2), &current(&space, 2), &basis)
            .unwrap();
        assert!(d0.is_zero());
    }

    #[test]
    fn vector_field_action_weight_operator() {
        // N=1 classical: e_0 = z d/dz acts on ψ_n (weight 0 modes) by n.
        // On the charge-0 vacuum: via regularization the eigenvalue is
        // Σ_{occ ≤ 0} n - Σ_{unocc > 0} n = 0.
        let c = ctx(&[0]);
        let space = FermionSpace::new(&c, 1);
        let e0 = space
            .operator_from_vector_field(&c.vf_basis(KnIndex::new(0, 1)))
            .unwrap();
        let vac = WedgeVector::monomial(WedgeMonomial::vacuum(0));
        assert!(space.apply(&e0, &vac).is_zero());
        // On the monomial with particle at -2 and hole at 1:
        // eigenvalue -2 - 1 = -3 (e_0 is diagonal classically).
        let m = WedgeMonomial::new(0, alloc::vec![1], alloc::vec![-2], &space.indexer);
        let v = WedgeVector::monomial(m.clone());
        let out = space.apply(&e0, &v);
        assert_eq!(out, v.scale(&J::from_i64(-3)));
    }

    #[test]
    fn high_degree_operators_annihilate_vacuum() {
        let c = ctx(&[0, 1]);
        let space = FermionSpace::new(&c, 2);
        let vac = WedgeVector::monomial(WedgeMonomial::vacuum(0));
        for n in 1..=3 {
            for p in 1..=2 {
                let x = FermionOperator::Current(CurrentElement::from_basis(
                    GlMat::identity(2),
                    KnIndex::new(n, p),
                ));
                assert!(space.apply(&x, &vac).is_zero(), "n={n} p={p}");
                let e = space
                    .operator_from_vector_field(&c.vf_basis(KnIndex::new(n, p)))
                    .unwrap();
                assert!(space.apply(&e, &vac).is_zero(), "vf n={n} p={p}");
            }
        }
    }
}
