//! Finite-dimensional C*-categories realized concretely as categories of
//! matrices: orthogonal sums and completions, the matrix-algebra functor,
//! crossed products by finite groups, K0 via Wedderburn decomposition,
//! Morita equivalence checks, and orbit-category values.

pub mod afunctor;
pub mod category;
pub mod crossed;
pub mod error;
pub mod group;
pub mod intmat;
pub mod ktheory;
pub mod linalg;
pub mod morita;
pub mod orbit;
pub mod report;
pub mod samples;
pub mod sums;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, MatrixSubspace, Tolerances, C64};
