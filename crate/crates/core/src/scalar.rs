//! Floating point scalar used for probability masses, distances and grades.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::model::Rational;

/// Real scalar type for masses and distances: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self;

    fn of_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable as float")
    }

    fn of_rational(r: Rational) -> Self {
        Self::of(*r.numer() as f64) / Self::of(*r.denom() as f64)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn of(x: f64) -> Self {
        x
    }

    fn of_rational(r: Rational) -> Self {
        *r.numer() as f64 / *r.denom() as f64
    }
}
