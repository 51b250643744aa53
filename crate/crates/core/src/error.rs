//! Crate-wide error type.

/// Errors raised by geometry, oracle, solver, and certification routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Coordinate data has the wrong shape for the manifold at hand.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// A point failed the manifold membership test.
    #[error("point is not on the manifold: {detail}")]
    PointOffManifold { detail: String },

    /// A would-be tangent vector violates the tangent-space constraint.
    #[error("invalid tangent vector: {detail}")]
    InvalidTangent { detail: String },

    /// A tangent vector is anchored at a different base point than required.
    #[error("tangent base point does not match the point the operation acts at")]
    BaseMismatch,

    /// A matrix that must be symmetric is not, beyond the working tolerance.
    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    /// An eigenvalue sits below the positive-definite floor where a matrix
    /// logarithm or square root is required.
    #[error("eigenvalue {eigenvalue:.6e} lies below the positive-definite floor {floor:.1e}")]
    EigenvalueBelowFloor { eigenvalue: f64, floor: f64 },

    /// The sphere logarithm is undefined at (and numerically unstable near)
    /// the antipode of the base point.
    #[error("sphere log map undefined near the antipode (inner product {inner:.6e})")]
    NearAntipode { inner: f64 },

    /// An inverse-hyperbolic-cosine argument fell below 1 by more than the
    /// round-off allowance.
    #[error("arccosh argument {argument:.17e} lies below 1 beyond round-off")]
    ArccoshDomain { argument: f64 },

    /// A curvature-dependent formula needs a strictly negative lower bound.
    #[error("strictly negative curvature lower bound required, got kappa = {kappa}")]
    FlatCurvature { kappa: f64 },

    /// A scalar argument fell outside its documented range.
    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A step-size rule was constructed or applied with inconsistent data.
    #[error("step-size rule rejected: {message}")]
    InvalidStepRule { message: String },

    /// The normalized subgradient step is undefined for a zero subgradient.
    #[error("subgradient step requires a nonzero subgradient")]
    ZeroSubgradient,

    /// A trace lacks a column that the requested certification needs.
    #[error("trace is missing data required by {theorem}: {column}")]
    MissingTraceColumn {
        theorem: &'static str,
        column: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
