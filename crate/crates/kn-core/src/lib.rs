//! Exact construction of multi-point Krichever-Novikov algebras at genus
//! zero, their central extensions, fermionic representations, Sugawara
//! operators, conformal blocks and the generalized Knizhnik-Zamolodchikov
//! connection.
//!
//! All arithmetic is exact over ℚ (optionally over ℚ(t) with one symbolic
//! point position); identities are verified to literal equality on finite
//! truncations, never numerically.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebras;
pub mod blocks;
pub mod cocycles;
pub mod fermion;
pub mod sugawara;


pub mod error;

pub mod forms;
pub mod frac;
pub mod jet;
pub mod linalg;
pub mod poly;
pub mod ratfun;
pub mod scalar;


pub use error::{KnError, Result};
pub use frac::Qt;
pub use jet::{Jet, QJet};
pub use poly::Poly;
pub use ratfun::{Center, LaurentExpansion, RationalFunction};
pub use scalar::{Field, Rat, Ring};
