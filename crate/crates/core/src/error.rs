use thiserror::Error;

/// Errors raised by the constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("closure dimension {dim} exceeds cap {cap}")]
    DimensionBlowup { dim: usize, cap: usize },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("endpoint mismatch: cannot compose {0}")]
    EndpointMismatch(String),
    #[error("invalid category: {0}")]
    InvalidCategory(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("summand families differ")]
    FamilyMismatch,
    #[error("family members do not share a common domain")]
    DomainMismatch,
    #[error("family adjoints are not mutually orthogonal (residual {0:.3e})")]
    NotMutuallyOrthogonal(f64),
    #[error("not a projection (residual {0:.3e})")]
    NotAProjection(f64),
    #[error("matrix does not lie in the algebra (residual {0:.3e})")]
    NotInAlgebra(f64),
    #[error("functor is not injective on objects")]
    NotInjectiveOnObjects,
    #[error("group of order {order} exceeds cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("central decomposition not generic after {0} attempts")]
    NonGeneric(usize),
    #[error("algebra has no unit")]
    NotUnital,
    #[error("K0 rounding failed: value {value} off by {residual:.3e}")]
    RoundingFailure { value: f64, residual: f64 },
    #[error("map is not a *-homomorphism (residual {0:.3e})")]
    NotAHomomorphism(f64),
    #[error("square is not exact: {0}")]
    NotAnExactSquare(String),
    #[error("map of G-sets is not equivariant")]
    NotEquivariant,
}

pub type Result<T> = std::result::Result<T, Error>;
