//! Sparse direct linear algebra toolkit: storage schemes, fill-reducing
//! orderings, LU/Cholesky/QR factorizations, floating-point scaling,
//! stability diagnostics and basis-update algorithms.
//!
//! Core types are generic over the scalar (`Scalar`/`Real` traits, via
//! num-traits); `f64` aliases live at the crate root. Indices are 1-based
//! at every API boundary.

pub mod blockform;
pub mod blockpar;
pub mod dense;
pub mod error;
pub mod fillasym;
pub mod fpscale;
pub mod graphs;
pub mod lufact;
pub mod matching;
pub mod mm;
pub mod orthosym;
pub mod pattern;
pub mod perm;
pub mod scalar;
pub mod sparse;
pub mod stability;
pub mod update;
pub mod symelim;
pub mod testmat;

pub use dense::DenseMat;
pub use error::{Error, Result};
pub use pattern::BoolPattern;
pub use perm::{Permutation, Side};
pub use scalar::{Real, Scalar};
pub use sparse::{ReprKind, SparseMat};

/// Concrete working-precision aliases.
pub type Mat = DenseMat<f64>;
pub type SpMat = SparseMat<f64>;
