//! Angular valuations on convex polytopes: exterior algebra, face lattices and
//! external angles, Klain functions, and the extendability tests for them.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! and `*32` aliases fix the scalar.

pub mod error;
pub mod exterior;
pub mod extendability;
pub mod klain;
pub mod linalg;
pub mod numerics;
pub mod polytope;
pub mod random;
pub mod scalar;
pub mod simplex_lab;
pub mod valuation;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type KVector64 = exterior::KVector<f64>;
pub type KVector32 = exterior::KVector<f32>;
pub type Frame64 = exterior::Frame<f64>;
pub type Frame32 = exterior::Frame<f32>;
pub type Polytope64 = polytope::Polytope<f64>;
pub type Polytope32 = polytope::Polytope<f32>;
pub type QuadraticForm64 = klain::QuadraticForm<f64>;
pub type QuadraticForm32 = klain::QuadraticForm<f32>;
pub type DynKlain64 = klain::DynKlain<f64>;
pub type DynKlain32 = klain::DynKlain<f32>;
pub type Evaluation64 = valuation::Evaluation<f64>;
