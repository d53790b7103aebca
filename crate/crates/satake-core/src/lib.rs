//! Combinatorics and desk-scale Lie theory of generalized Satake diagrams
//! for symmetrizable Kac-Moody algebras: compatible decorations, restricted
//! root systems and Weyl groups, and a height-truncated exact realization of
//! the derived algebra with its pseudo-involutions.
//!
//! All arithmetic is exact (integers, rationals, Gaussian rationals).

pub mod cartan;
pub mod catalogue;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod decoration;
pub mod diagram_text;
pub mod report;
pub mod restricted;
pub mod typea_table;
pub mod weyl;
pub mod scalar;

pub use cartan::{CartanMatrix, LieTypeLabel, SimpleTypeName, TypeKind};
pub use error::{Error, Result};
pub use scalar::{Gaussian, Rat};
