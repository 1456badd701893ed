//! Exact linear algebra over the jet ring.
//!
//! The jet ring is local: an entry is invertible iff its value part is
//! nonzero. All elimination pivots on invertible entries, so every result
//! is an exact jet family (value plus first-order moduli dependence). A
//! nonzero residual without any invertible entry would mean the underlying
//! family of spaces is not flat at the base point; for everything computed
//! here that would be a bug, so it panics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::jet::Jet;
use crate::scalar::{Field, Ring};

pub type Mat<F> = Vec<Vec<Jet<F>>>;

/// Reduced row echelon form in place; returns the pivot column of each
/// surviving row, in order.
pub fn row_reduce<F: Field>(rows: &mut Mat<F>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][col].v.is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = rows[rank][col].inv().unwrap();
        for c in col..ncols {
            rows[rank][c] = rows[rank][c].mul(&inv);
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..ncols {
                    let t = f.mul(&rows[rank][c]);
                    rows[r][c] = rows[r][c].sub(&t);
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    for r in (rank..rows.len()).rev() {
        assert!(
            rows[r].iter().all(|e| e.is_zero()),
            "non-flat family: residual row without invertible entry"
        );
        rows.pop();
    }
    pivots
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn kernel_basis<F: Field>(matrix: &Mat<F>) -> Vec<Vec<Jet<F>>> {
    let ncols = matrix.first().map_or(0, |r| r.len());
    let mut m = matrix.clone();
    let pivots = row_reduce(&mut m);
    let pivot_set: BTreeMap<usize, usize> =
        pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains_key(&free) {
            continue;
        }
        let mut v = vec![Jet::zero(); ncols];
        v[free] = Jet::one();
        for (&pc, &pr) in &pivot_set {
            v[pc] = m[pr][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// One solution of `M x = b`, or `None` if inconsistent.
pub fn solve<F: Field>(matrix: &Mat<F>, rhs: &[Jet<F>]) -> Option<Vec<Jet<F>>> {
    let ncols = matrix.first().map_or(0, |r| r.len());
    let mut m: Mat<F> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut m);
    let mut x = vec![Jet::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        if c == ncols {
            return None; // pivot in the augmented column
        }
        x[c] = m[r][ncols].clone();
    }
    Some(x)
}

/// Incremental row echelon accumulator for span and quotient computations.
///
/// Coordinates are indexed 0.. in a caller-chosen pivot order; rows are kept
/// normalized with pivot entry 1 and fully back-substituted.
pub struct Echelon<F: Field> {
    rows: BTreeMap<usize, Vec<Jet<F>>>,
    ncols: usize,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            rows: BTreeMap::new(),
            ncols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Eliminates all pivot coordinates from `v`.
    ///
    /// Rows are mutually back-substituted (zero at every other pivot), but
    /// may carry nonzero entries at non-pivot columns before their own
    /// pivot, so the whole row participates.
    pub fn reduce(&self, v: &mut [Jet<F>]) {
        for (&p, row) in &self.rows {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (c, rc) in row.iter().enumerate() {
                    if !rc.is_zero() {
                        let t = f.mul(rc);
                        v[c] = v[c].sub(&t);
                    }
                }
            }
        }
    }

    /// Inserts a vector; returns `true` if it increased the rank.
    pub fn insert(&mut self, mut v: Vec<Jet<F>>) -> bool {
        assert_eq!(v.len(), self.ncols);
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        assert!(
            !v[p].v.is_zero(),
            "non-flat family: leading residual entry is nilpotent"
        );
        let inv = v[p].inv().unwrap();
        for c in p..self.ncols {
            v[c] = v[c].mul(&inv);
        }
        // Back-substitute into existing rows so reduce() is one pass.
        for row in self.rows.values_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for c in p..self.ncols {
                    if !v[c].is_zero() {
                        let t = f.mul(&v[c]);
                        row[c] = row[c].sub(&t);
                    }
                }
            }
        }
        self.rows.insert(p, v);
        true
    }
}

/// If `m` is a scalar multiple of the identity, returns the scalar.
pub fn as_scalar<F: Field>(m: &Mat<F>) -> Option<Jet<F>> {
    let n = m.len();
    if n == 0 {
        return Some(Jet::zero());
    }
    let lambda = m[0][0].clone();
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row.len(), n, "as_scalar expects a square matrix");
        for (j, e) in row.iter().enumerate() {
            if i == j {
                if *e != lambda {
                    return None;
                }
            } else if !e.is_zero() {
                return None;
            }
        }
    }
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::QJet;
    use crate::scalar::Rat;

    fn m(rows: &[&[i64]]) -> Mat<Rat> {
        rows.iter()
            .map(|r| r.iter().map(|&x| QJet::from_i64(x)).collect())
            .collect()
    }

    #[test]
    fn kernel_of_rank_one() {
        // x + 2y + 3z = 0
        let k = kernel_basis(&m(&[&[1, 2, 3]]));
        assert_eq!(k.len(), 2);
        for v in &k {
            let s = v[0]
                .add(&v[1].mul(&QJet::from_i64(2)))
                .add(&v[2].mul(&QJet::from_i64(3)));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[QJet::from_i64(3), QJet::from_i64(1)]).unwrap();
        assert_eq!(x[0], QJet::from_i64(2));
        assert_eq!(x[1], QJet::from_i64(1));
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[QJet::from_i64(0), QJet::from_i64(1)]).is_none());
    }

    #[test]
    fn echelon_rank_and_reduction() {
        let mut e = Echelon::new(3);
        assert!(e.insert(vec![
            QJet::from_i64(0),
            QJet::from_i64(2),
            QJet::from_i64(4)
        ]));
        assert!(e.insert(vec![
            QJet::from_i64(1),
            QJet::from_i64(1),
            QJet::from_i64(1)
        ]));
        assert!(!e.insert(vec![
            QJet::from_i64(1),
            QJet::from_i64(3),
            QJet::from_i64(5)
        ]));
        assert_eq!(e.rank(), 2);
        let mut v = vec![QJet::from_i64(2), QJet::from_i64(4), QJet::from_i64(7)];
        e.reduce(&mut v);
        assert!(v[0].is_zero() && v[1].is_zero());
        assert_eq!(v[2], QJet::from_i64(1));
    }
}
