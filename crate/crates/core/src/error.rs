use thiserror::Error;

/// Errors raised by the algebraic and numerical layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: measured asymmetry {asymmetry:.3e} exceeds tolerance")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} below -tol")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("operands live over different structures: {0}")]
    Mismatch(String),

    #[error("generators do not generate the module: block {block} is deficient (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotGenerating { block: usize, min_eigenvalue: f64 },

    #[error("index {index} out of range 1..={len}")]
    OutOfRange { index: usize, len: usize },

    #[error("left action is not a *-homomorphism: {identity} fails for units {left:?}, {right:?} (residual {residual:.3e})")]
    NotHomomorphism {
        identity: &'static str,
        left: (usize, usize, usize),
        right: (usize, usize, usize),
        residual: f64,
    },

    #[error("matrix is not an isometry: ‖W*W - I‖ = {residual:.3e}")]
    NotIsometry { residual: f64 },

    #[error("graph has infinite multiplicities; truncate first")]
    InfiniteMultiplicity,

    #[error("projection P does not commute with the representation of A (residual {residual:.3e})")]
    NonCommutingProjection { residual: f64 },

    #[error("dilated maps disagree on the operator system generators (deviation {deviation:.3e})")]
    AgreementFailure { deviation: f64 },

    #[error("corner hypothesis violated: measured ‖φ(AA*) - φ(A)φ(A)*‖ = {corner:.3e} exceeds eps = {eps:.3e}")]
    CornerHypothesis { corner: f64, eps: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
