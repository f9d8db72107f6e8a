use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("degree overflow: {left} + {right} exceeds ambient dimension {n}")]
    DegreeOverflow { left: usize, right: usize, n: usize },

    #[error("invalid multi-index {indices:?} for n = {n}")]
    InvalidMultiIndex { indices: Vec<usize>, n: usize },

    #[error("orientation must be an n-vector with coefficient +1 or -1")]
    InvalidOrientation,

    #[error("frame is not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("k-vector is not of unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("k-vector is not simple (residual {residual:e})")]
    NotSimple { residual: f64 },

    #[error("polytope has dimension {dim} but ambient dimension is {n}")]
    NotFullDimensional { dim: usize, n: usize },

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("face is not a face of this polytope")]
    FaceNotOfPolytope,

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ray function is not even in the ray direction (deviation {deviation:e})")]
    OddRayFunction { deviation: f64 },

    #[error("underdetermined fit: need at least {needed} samples, got {got}")]
    Underdetermined { needed: usize, got: usize },

    #[error("extrapolation unstable: successive estimates differ by {spread:e}")]
    UnstableExtrapolation { spread: f64 },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("value expected to be real has imaginary part {imag:e}")]
    NonReal { imag: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
