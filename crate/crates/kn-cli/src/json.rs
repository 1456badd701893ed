//! Deterministic JSON encoding of exact values.
//!
//! Rationals serialize as `"p/q"` with `q > 0` and `gcd(p,q) = 1`; jets as
//! objects `{"v": "p/q", "d1": …, "d2": …, "d12": …}` omitting zero
//! fields. `serde_json`'s default map keeps keys sorted, so output is
//! byte-deterministic.

use kn_core::algebras::GlMat;
use kn_core::fermion::WedgeMonomial;
use kn_core::linalg::Mat;
use kn_core::{QJet, Rat, RationalFunction, Ring};
use serde_json::{json, Map, Value};

pub fn rat(r: &Rat) -> Value {
    Value::String(r.canonical_string())
}

pub fn jet(j: &QJet) -> Value {
    if j.is_value() {
        return rat(&j.v);
    }
    let mut m = Map::new();
    if !j.v.is_zero() {
        m.insert("v".into(), rat(&j.v));
    }
    if !j.d1.is_zero() {
        m.insert("d1".into(), rat(&j.d1));
    }
    if !j.d2.is_zero() {
        m.insert("d2".into(), rat(&j.d2));
    }
    if !j.d12.is_zero() {
        m.insert("d12".into(), rat(&j.d12));
    }
    Value::Object(m)
}

pub fn poly_coeffs(p: &kn_core::Poly<QJet>) -> Value {
    Value::Array(p.coeffs().iter().map(jet).collect())
}

pub fn rational_function(f: &RationalFunction<Rat>) -> Value {
    json!({
        "numerator": poly_coeffs(f.numerator()),
        "denominator": poly_coeffs(f.denominator()),
    })
}

pub fn matrix(m: &Mat<Rat>) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(jet).collect()))
            .collect(),
    )
}

pub fn gl_matrix(m: &GlMat<Rat>) -> Value {
    let n = m.rank_gl();
    Value::Array(
        (0..n)
            .map(|i| Value::Array((0..n).map(|j| jet(m.at(i, j))).collect()))
            .collect(),
    )
}

pub fn monomial(m: &WedgeMonomial) -> Value {
    json!({
        "charge": m.charge(),
        "holes": m.holes(),
        "particles": m.particles(),
    })
}
