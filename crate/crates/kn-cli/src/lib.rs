//! Library side of the `kncli` front end: configuration, runners for the
//! subcommands, deterministic JSON emission and the verification suite.

pub mod json;
pub mod verify;

use kn_core::algebras::{structure_constants, AlgebraKind, CurrentElement, GlMat};
use kn_core::blocks::{
    conformal_blocks, connection_curvature, nabla, pullback, CoinvariantSpace, ModuliDirection,
};
use kn_core::cocycles::{
    check_local, cocycle_current, cocycle_function, cocycle_mixing, cocycle_vector,
    AffineConnectionT, BilinearFormGL, ProjectiveConnection,
};
use kn_core::fermion::{FermionOperator, FermionSpace, OperatorWindow, Truncation, WedgeVector};

use kn_core::forms::{KnContext, KnIndex, MarkedConfig};
use kn_core::frac::{Frac, Qt};
use kn_core::jet::JetPart;
use kn_core::sugawara::{build_split, Sugawara};
use kn_core::{KnError, Poly, QJet, Rat, Ring};
use serde::Deserialize;
use serde_json::{json, Value};

/// Errors split by exit code: usage errors exit 1, failed property checks
/// exit 2 (with a machine-readable report on stdout).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Check(Value),
}

impl From<KnError> for CliError {
    fn from(e: KnError) -> Self {
        match e {
            KnError::NotScalar | KnError::Inconsistent | KnError::NotStabilized => {
                CliError::Check(json!({"error": e.to_string()}))
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult = Result<Value, CliError>;

/// Run configuration shared by all subcommands; accepted as flags or as a
/// single JSON file (flags override file values).
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub points: Vec<String>,
    pub gl_rank: usize,
    pub charge: i64,
    pub depth: i64,
    pub orientation: i8,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            points: vec!["0".into()],
            gl_rank: 1,
            charge: 0,
            depth: -6,
            orientation: 1,
            seed: 1,
            jobs: 1,
        }
    }
}

impl RunConfig {
    pub fn parsed_points(&self) -> Result<Vec<Rat>, CliError> {
        let pts: Option<Vec<Rat>> = self.points.iter().map(|s| Rat::parse(s)).collect();
        let pts = pts.ok_or_else(|| CliError::Usage("points must be rationals p/q".into()))?;
        if pts.is_empty() {
            return Err(CliError::Usage("at least one marked point required".into()));
        }
        Ok(pts)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.depth > 0 {
            return Err(CliError::Usage("depth must be ≤ 0".into()));
        }
        if self.gl_rank < 1 {
            return Err(CliError::Usage("gl-rank must be ≥ 1".into()));
        }
        if self.orientation != 1 && self.orientation != -1 {
            return Err(CliError::Usage("orientation must be 1 or -1".into()));
        }
        let pts = self.parsed_points()?;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if pts[i] == pts[j] {
                    return Err(CliError::Usage("marked points must be distinct".into()));
                }
            }
        }
        Ok(())
    }

    pub fn context(&self) -> Result<KnContext<Rat>, CliError> {
        let cfg = MarkedConfig::seeded(self.parsed_points()?, None, None)
            .map_err(|_| CliError::Usage("invalid marked configuration".into()))?;
        Ok(KnContext::new(cfg))
    }

    pub fn seeded_context(
        &self,
        dir1: Option<usize>,
        dir2: Option<usize>,
    ) -> Result<KnContext<Rat>, CliError> {
        let cfg = MarkedConfig::seeded(self.parsed_points()?, dir1, dir2)
            .map_err(|_| CliError::Usage("invalid marked configuration".into()))?;
        Ok(KnContext::new(cfg))
    }

    fn orient(&self, v: &QJet) -> QJet {
        if self.orientation == 1 {
            v.clone()
        } else {
            v.neg()
        }
    }
}

fn parse_index(s: &str) -> Result<(i64, usize), CliError> {
    let (n, p) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("index must be n,p: {s}")))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad degree: {n}")))?;
    let p = p
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad point number: {p}")))?;
    Ok((n, p))
}

fn check_point_index(cfg: &RunConfig, p: usize) -> Result<(), CliError> {
    let n = cfg.points.len();
    if p < 1 || p > n {
        return Err(CliError::Usage(format!("point index {p} out of 1..{n}")));
    }
    Ok(())
}

/// `basis`: emits the canonical rational coefficient of `f^λ_{n,p}`.
pub fn run_basis(cfg: &RunConfig, lambda: i64, n: i64, p: usize) -> CliResult {
    check_point_index(cfg, p)?;
    let ctx = cfg.context()?;
    let f = ctx.basis(lambda, KnIndex::new(n, p));
    let mut out = json!({
        "lambda": lambda,
        "n": n,
        "p": p,
    });
    let o = out.as_object_mut().unwrap();
    o.insert(
        "numerator".into(),
        json::poly_coeffs(f.coeff.numerator()),
    );
    o.insert(
        "denominator".into(),
        json::poly_coeffs(f.coeff.denominator()),
    );
    Ok(out)
}

/// `pairing`: the KN pairing of `f^λ_{n,p}` with `f^{1-λ}_{m,r}`.
pub fn run_pairing(
    cfg: &RunConfig,
    lambda: i64,
    n: i64,
    p: usize,
    m: i64,
    r: usize,
) -> CliResult {
    check_point_index(cfg, p)?;
    check_point_index(cfg, r)?;
    let ctx = cfg.context()?;
    let f = ctx.basis(lambda, KnIndex::new(n, p));
    let g = ctx.basis(1 - lambda, KnIndex::new(m, r));
    let v = ctx.kn_pairing(&f, &g)?;
    Ok(json!({
        "lambda": lambda,
        "left": [n, p],
        "right": [m, r],
        "value": json::jet(&cfg.orient(&v)),
    }))
}

/// `structure`: structure-constant table over a degree window.
pub fn run_structure(cfg: &RunConfig, algebra: &str, from: i64, to: i64) -> CliResult {
    let kind = match algebra {
        "function" => AlgebraKind::Function,
        "vector" => AlgebraKind::Vector,
        "current" => AlgebraKind::Current,
        other => return Err(CliError::Usage(format!("unknown algebra: {other}"))),
    };
    if from > to {
        return Err(CliError::Usage("empty degree window".into()));
    }
    let ctx = cfg.context()?;
    let table = structure_constants(&ctx, kind, (from, to));
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|(l, r, o, c)| {
            json!({
                "left": [l.n, l.p],
                "right": [r.n, r.p],
                "out": [o.n, o.p],
                "coeff": json::jet(c),
            })
        })
        .collect();
    Ok(json!({
        "algebra": algebra,
        "window": [from, to],
        "realized_r": table.realized_r,
        "realized_s": table.realized_s,
        "entries": entries,
    }))
}

fn unit_matrix(cfg: &RunConfig, spec: Option<&str>) -> Result<GlMat<Rat>, CliError> {
    match spec {
        None => Ok(GlMat::identity(cfg.gl_rank)),
        Some(s) => {
            let (i, j) = s
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("matrix must be i,j: {s}")))?;
            let i: usize = i
                .trim()
                .parse()
                .map_err(|_| CliError::Usage("bad row".into()))?;
            let j: usize = j
                .trim()
                .parse()
                .map_err(|_| CliError::Usage("bad column".into()))?;
            if i < 1 || i > cfg.gl_rank || j < 1 || j > cfg.gl_rank {
                return Err(CliError::Usage("matrix unit out of range".into()));
            }
            Ok(GlMat::unit(cfg.gl_rank, i - 1, j - 1))
        }
    }
}

/// `cocycle`: evaluates one of the four geometric cocycles on basis
/// elements.
pub fn run_cocycle(
    cfg: &RunConfig,
    kind: &str,
    left: &str,
    right: &str,
    x: Option<&str>,
    y: Option<&str>,
) -> CliResult {
    let (ln, lp) = parse_index(left)?;
    let (rn, rp) = parse_index(right)?;
    check_point_index(cfg, lp)?;
    check_point_index(cfg, rp)?;
    let ctx = cfg.context()?;
    let value = match kind {
        "function" => cocycle_function(
            &ctx,
            &ctx.fn_basis(KnIndex::new(ln, lp)),
            &ctx.fn_basis(KnIndex::new(rn, rp)),
        ),
        "vector" => cocycle_vector(
            &ctx,
            &ctx.vf_basis(KnIndex::new(ln, lp)),
            &ctx.vf_basis(KnIndex::new(rn, rp)),
            &ProjectiveConnection::default(),
        ),
        "mixing" => cocycle_mixing(
            &ctx,
            &ctx.vf_basis(KnIndex::new(ln, lp)),
            &ctx.fn_basis(KnIndex::new(rn, rp)),
            &AffineConnectionT::default(),
        ),
        "current" => {
            let xm = unit_matrix(cfg, x)?;
            let ym = unit_matrix(cfg, y)?;
            cocycle_current(
                &ctx,
                &CurrentElement::from_basis(xm, KnIndex::new(ln, lp)),
                &CurrentElement::from_basis(ym, KnIndex::new(rn, rp)),
                &BilinearFormGL::alpha1(),
            )?
        }
        other => return Err(CliError::Usage(format!("unknown cocycle type: {other}"))),
    };
    Ok(json!({
        "type": kind,
        "left": [ln, lp],
        "right": [rn, rp],
        "value": json::jet(&cfg.orient(&value)),
    }))
}

/// `check-local`: locality scan of a cocycle over a degree window.
pub fn run_check_local(cfg: &RunConfig, kind: &str, from: i64, to: i64) -> CliResult {
    let ctx = cfg.context()?;
    let n_pts = ctx.n_points();
    let window = (from, to);
    let report = match kind {
        "function" => check_local(n_pts, window, |a, b| {
            cocycle_function(&ctx, &ctx.fn_basis(a), &ctx.fn_basis(b))
        }),
        "vector" => {
            let r = ProjectiveConnection::default();
            check_local(n_pts, window, |a, b| {
                cocycle_vector(&ctx, &ctx.vf_basis(a), &ctx.vf_basis(b), &r)
            })
        }
        "mixing" => {
            let t = AffineConnectionT::default();
            check_local(n_pts, window, |a, b| {
                cocycle_mixing(&ctx, &ctx.vf_basis(a), &ctx.fn_basis(b), &t)
            })
        }
        "current" => {
            let alpha = BilinearFormGL::alpha1();
            let x = GlMat::identity(cfg.gl_rank);
            check_local(n_pts, window, |a, b| {
                cocycle_current(
                    &ctx,
                    &CurrentElement::from_basis(x.clone(), a),
                    &CurrentElement::from_basis(x.clone(), b),
                    &alpha,
                )
                .unwrap()
            })
        }
        other => return Err(CliError::Usage(format!("unknown cocycle type: {other}"))),
    };
    Ok(json!({
        "type": kind,
        "window": [from, to],
        "upper": report.upper,
        "lower": report.lower,
        "is_local": report.is_local,
    }))
}

/// `wedge`: exact matrix of a current or vector-field operator on the
/// degree window.
pub fn run_wedge(
    cfg: &RunConfig,
    op_kind: &str,
    n: i64,
    p: usize,
    x: Option<&str>,
) -> CliResult {
    check_point_index(cfg, p)?;
    let ctx = cfg.context()?;
    let space = FermionSpace::new(&ctx, cfg.gl_rank);
    let op = match op_kind {
        "current" => FermionOperator::Current(CurrentElement::from_basis(
            unit_matrix(cfg, x)?,
            KnIndex::new(n, p),
        )),
        "vector" => space.operator_from_vector_field(&ctx.vf_basis(KnIndex::new(n, p)))?,
        other => return Err(CliError::Usage(format!("unknown operator kind: {other}"))),
    };
    let window = OperatorWindow::build(&space, &op, cfg.charge, Truncation::new(cfg.depth));
    let rows: Vec<Value> = window.basis.iter().map(json::monomial).collect();
    let mut entries = Vec::new();
    for (j, col) in window.columns.iter().enumerate() {
        for (m, c) in col.iter() {
            if let Some(i) = window.basis.iter().position(|b| b == m) {
                entries.push(json!([i, j, json::jet(c)]));
            }
        }
    }
    Ok(json!({
        "op": op_kind,
        "n": n,
        "p": p,
        "rows": rows,
        "cols": rows.len(),
        "entries": entries,
    }))
}

fn build_blocks_stack<'s, 'c>(
    space: &'s FermionSpace<'c, Rat>,
    cfg: &RunConfig,
) -> Result<(Sugawara<'s, 'c, Rat>, CoinvariantSpace<Rat>), CliError> {
    let split_trunc = Truncation::new(cfg.depth.max(-4));
    let split = build_split(space, cfg.charge, split_trunc)?;
    let sug = Sugawara::new(space, split);
    let blocks = conformal_blocks(space, cfg.charge, Truncation::new(cfg.depth))?;
    Ok((sug, blocks))
}

/// `sugawara`: one rescaled mode matrix plus the detected (c, κ) pairs.
pub fn run_sugawara(cfg: &RunConfig, k: i64, r: usize) -> CliResult {
    check_point_index(cfg, r)?;
    let ctx = cfg.context()?;
    let space = FermionSpace::new(&ctx, cfg.gl_rank);
    let split = build_split(&space, cfg.charge, Truncation::new(cfg.depth.max(-4)))?;
    let sug = Sugawara::new(&space, split);
    let basis = space.window_basis(cfg.charge, cfg.depth);
    let rows: Vec<Value> = basis.iter().map(json::monomial).collect();
    let mut entries = Vec::new();
    for (j, mono) in basis.iter().enumerate() {
        let out = sug.apply_mode(KnIndex::new(k, r), &WedgeVector::monomial(mono.clone()))?;
        for (m, c) in out.iter() {
            if let Some(i) = basis.iter().position(|b| b == m) {
                entries.push(json!([i, j, json::jet(c)]));
            }
        }
    }
    let summands: Vec<Value> = sug
        .split
        .summands
        .iter()
        .map(|s| {
            json!({
                "name": s.name,
                "level": json::jet(&s.level),
                "kappa": json::jet(&s.kappa),
            })
        })
        .collect();
    Ok(json!({
        "k": k,
        "r": r,
        "rows": rows,
        "entries": entries,
        "summands": summands,
    }))
}

/// `check-fundamental`: `[T[e], x(A)] = x(e.A)` on all basis triples up to
/// a degree bound; reports the first counterexample, if any.
pub fn run_check_fundamental(cfg: &RunConfig, max_degree: i64) -> CliResult {
    let ctx = cfg.context()?;
    let space = FermionSpace::new(&ctx, cfg.gl_rank);
    let split = build_split(&space, cfg.charge, Truncation::new(cfg.depth.max(-4)))?;
    let sug = Sugawara::new(&space, split);
    let basis = space.window_basis(cfg.charge, cfg.depth);
    let gl_basis = gl_full_basis(cfg.gl_rank);
    let mut checked = 0usize;
    for k in -max_degree..=max_degree {
        for r in 1..=ctx.n_points() {
            let e = ctx.vf_basis(KnIndex::new(k, r));
            for x in &gl_basis {
                for n in -max_degree..=max_degree {
                    for p in 1..=ctx.n_points() {
                        let a = ctx.fn_basis(KnIndex::new(n, p));
                        for mono in &basis {
                            let d = sug.fundamental_defect(&e, x, &a, mono)?;
                            checked += 1;
                            if !d.is_zero() {
                                return Err(CliError::Check(json!({
                                    "pass": false,
                                    "counterexample": {
                                        "e": [k, r],
                                        "a": [n, p],
                                        "monomial": json::monomial(mono),
                                    },
                                })));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(json!({"pass": true, "checked": checked}))
}

pub fn gl_full_basis(rank: usize) -> Vec<GlMat<Rat>> {
    let mut v = Vec::new();
    for i in 0..rank {
        for j in 0..rank {
            v.push(GlMat::unit(rank, i, j));
        }
    }
    v
}

/// `blocks`: coinvariant dimension, stabilization flag and block basis.
pub fn run_blocks(cfg: &RunConfig) -> CliResult {
    let ctx = cfg.context()?;
    let space = FermionSpace::new(&ctx, cfg.gl_rank);
    let blocks = conformal_blocks(&space, cfg.charge, Truncation::new(cfg.depth))?;
    Ok(json!({
        "dimension": blocks.dimension,
        "stabilized": blocks.stabilized,
        "basis": blocks.block_basis.iter().map(json::monomial).collect::<Vec<_>>(),
        "ar_window": [blocks.ar_degrees.0, blocks.ar_degrees.1],
    }))
}

/// `kz`: the first-order system `∂_p Ψ = -M_p Ψ` with exact matrices; with
/// `poles`, additionally the residue decomposition of each `M_p` at the
/// collisions `z_p = z_r`, computed symbolically over ℚ(t).
pub fn run_kz(cfg: &RunConfig, poles: bool) -> CliResult {
    let pts = cfg.parsed_points()?;
    let n_pts = pts.len();
    let mut directions = Vec::new();
    for p in 1..=n_pts {
        let ctx = cfg.seeded_context(Some(p), None)?;
        let space = FermionSpace::new(&ctx, cfg.gl_rank);
        let (sug, blocks) = build_blocks_stack(&space, cfg)?;
        let e_x = pullback(&ctx, ModuliDirection(p));
        let m = nabla(&sug, &blocks, &e_x, 1)?;
        let m_val: Vec<Vec<QJet>> = m
            .iter()
            .map(|row| row.iter().map(|e| e.extract(JetPart::Value)).collect())
            .collect();
        let mut dir = json!({
            "direction": p,
            "matrix": json::matrix(&m_val),
        });
        if poles && n_pts > 1 {
            let pole_data = kz_poles_symbolic(cfg, p, &pts)?;
            dir.as_object_mut().unwrap().insert("poles".into(), pole_data);
        }
        directions.push(dir);
    }
    let ctx = cfg.context()?;
    let space = FermionSpace::new(&ctx, cfg.gl_rank);
    let blocks = conformal_blocks(&space, cfg.charge, Truncation::new(cfg.depth))?;
    Ok(json!({
        "dimension": blocks.dimension,
        "stabilized": blocks.stabilized,
        "directions": directions,
    }))
}

/// One direction of the KZ system with `z_p` symbolic: exact simple-pole
/// divisibility test and residue matrices at each collision.
fn kz_poles_symbolic(cfg: &RunConfig, p: usize, pts: &[Rat]) -> CliResult {
    // Points over ℚ(t) with z_p = t.
    let sym_pts: Vec<Qt> = pts
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i + 1 == p {
                Frac::variable()
            } else {
                Frac::from_poly(Poly::constant(v.clone()))
            }
        })
        .collect();
    let mcfg = MarkedConfig::seeded(sym_pts, Some(p), None)
        .map_err(|_| CliError::Usage("degenerate symbolic configuration".into()))?;
    let ctx: KnContext<Qt> = KnContext::new(mcfg);
    let space = FermionSpace::new(&ctx, cfg.gl_rank);
    let split = build_split(&space, cfg.charge, Truncation::new(cfg.depth.max(-4)))?;
    let sug = Sugawara::new(&space, split);
    let blocks = conformal_blocks(&space, cfg.charge, Truncation::new(cfg.depth))?;
    let e_x = pullback(&ctx, ModuliDirection(p));
    let m = nabla(&sug, &blocks, &e_x, 1)?;
    let mut poles = Vec::new();
    for (r, zr) in pts.iter().enumerate() {
        if r + 1 == p {
            continue;
        }
        let mut residue: Vec<Vec<Value>> = Vec::new();
        let mut max_pole = 0i64;
        for row in &m {
            let mut rrow = Vec::new();
            for e in row {
                let entry: &Qt = &e.v;
                if !entry.is_zero() {
                    if let Some(ord) = entry.order_at(zr) {
                        max_pole = max_pole.max(-ord);
                        if ord < -1 {
                            return Err(CliError::Check(json!({
                                "error": "higher-order pole at collision",
                                "pair": [p, r + 1],
                                "order": ord,
                            })));
                        }
                    }
                }
                // residue = ((t - z_r)·entry)(z_r)
                let lin = Frac::from_poly(Poly::linear_root(zr));
                let res = lin
                    .mul(entry)
                    .eval(zr)
                    .expect("simple pole after multiplication");
                rrow.push(json::rat(&res));
            }
            residue.push(rrow);
        }
        poles.push(json!({
            "pair": [p, r + 1],
            "max_pole_order": max_pole,
            "residue_matrix": residue,
        }));
    }
    Ok(Value::Array(poles))
}

/// `curvature`: the central scalars λ(p,q) of `[∇_p, ∇_q]` on blocks.
pub fn run_curvature(cfg: &RunConfig) -> CliResult {
    let pts = cfg.parsed_points()?;
    let n_pts = pts.len();
    if n_pts < 2 {
        return Err(CliError::Usage(
            "curvature needs at least two marked points".into(),
        ));
    }
    let mut pairs = Vec::new();
    for p in 1..=n_pts {
        for q in (p + 1)..=n_pts {
            let ctx = cfg.seeded_context(Some(p), Some(q))?;
            let space = FermionSpace::new(&ctx, cfg.gl_rank);
            let (sug, blocks) = build_blocks_stack(&space, cfg)?;
            let mp = nabla(&sug, &blocks, &pullback(&ctx, ModuliDirection(p)), 1)?;
            let mq = nabla(&sug, &blocks, &pullback(&ctx, ModuliDirection(q)), 2)?;
            let lam = connection_curvature(&mp, &mq)?;
            pairs.push(json!({
                "p": p,
                "q": q,
                "lambda": json::rat(&lam.v),
            }));
        }
    }
    Ok(json!({"pairs": pairs}))
}

/// `verify-all`: runs the acceptance suite; the report carries one entry
/// per criterion.
pub fn run_verify_all(cfg: &RunConfig, quick: bool) -> CliResult {
    let results = verify::run_all(cfg.seed, quick, cfg.jobs);
    let pass = results.iter().all(|c| c.pass);
    let list: Vec<Value> = results
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "name": c.name,
                "pass": c.pass,
                "detail": c.detail,
                "millis": c.millis,
            })
        })
        .collect();
    let report = json!({"pass": pass, "criteria": list});
    if pass {
        Ok(report)
    } else {
        Err(CliError::Check(report))
    }
}
