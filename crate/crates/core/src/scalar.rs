//! Scalar abstraction shared by every module.
//!
//! All geometry is written against [`Real`], which is implemented for `f32`
//! and `f64`. Values produced by the library are complex (`Complex<T>`)
//! because Klain functions are complex valued in general.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar used throughout the crate.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn count(x: usize) -> Self {
        Self::from_usize(x).expect("count representable in scalar type")
    }

    /// Lossy conversion used for diagnostics and reports.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for "unit length" checks: `1e-9`, loosened to a few hundred
    /// ulps for single precision.
    #[inline]
    fn unit_tol() -> Self {
        Self::lit(1e-9).max(Self::default_epsilon() * Self::lit(256.0))
    }

    /// Incidence tolerance for geometry: `1e-9`, or `1024 ε` if that is larger.
    #[inline]
    fn geom_tol() -> Self {
        Self::lit(1e-9).max(Self::default_epsilon() * Self::lit(1024.0))
    }

    /// Orthogonality/rank tolerance: `1e-12`, or `64 ε` if that is larger.
    #[inline]
    fn tight_tol() -> Self {
        Self::lit(1e-12).max(Self::default_epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn cabs<T: Real>(z: Cx<T>) -> T {
    z.norm_sqr().sqrt()
}

/// `n!` as a scalar.
pub fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::count(i))
}
