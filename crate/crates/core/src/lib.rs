//! Exact computational homological algebra.
//!
//! Everything is computed over exact rationals (optionally reduced modulo a
//! prime) on finite truncations: Koszul complexes and local cohomology,
//! lattices in Tate vector spaces, Chevalley–Eilenberg complexes of dg-Lie
//! algebras, and coordinate models of formal loop and bubble spaces.

// Index loops read closer to the formulas in the linear algebra code.
#![allow(clippy::needless_range_loop)]

pub mod complex;
pub mod dglie;
pub mod diagram;
pub mod error;
pub mod koszul;
pub mod linalg;
pub mod loopspace;
pub mod scalar;
pub mod tate;

pub use complex::{cohomology, cohomology_dims, ChainComplex, ChainMap, Degree, DimTable, GradedVectorSpace};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::{Exact, FieldKind, Rational};
