//! A height-truncated exact realization of the derived Kac-Moody algebra:
//! graded bases from the contravariant-form quotient of the free Lie
//! algebra, brackets, pseudo-involutions via triple exponentials, and the
//! structural checks built on them.

pub mod algebra;
pub mod checks;
pub mod theta;
pub mod words;

pub use algebra::{Elem, TruncatedAlgebra};
