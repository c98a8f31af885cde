//! Scalar abstraction for the numeric kernels.
//!
//! Everything numeric in this crate (predictors, learners, metrics) is
//! generic over [`Real`], a float-like scalar. `f32` and `f64` implement it;
//! the crate root exports `f64` aliases for the common entry points.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + for<'a> Sum<&'a Self>
    + Default
    + Display
    + Debug
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from a count.
    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("count representable as scalar")
    }

    /// Conversion from `f64`, used for constants and RNG draws.
    fn of_f64(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 representable as scalar")
    }

    /// Conversion to `f64` for reporting and statistics.
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("scalar representable as f64")
    }
}

impl<T> Real for T where
    T: Float
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum<T>
        + for<'a> Sum<&'a T>
        + Default
        + Display
        + Debug
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}

/// Mean of a slice; zero on empty input.
pub fn mean<F: Real>(values: &[F]) -> F {
    if values.is_empty() {
        return F::zero();
    }
    values.iter().copied().sum::<F>() / F::of_usize(values.len())
}

/// Population variance of a slice; zero on empty input.
pub fn population_variance<F: Real>(values: &[F]) -> F {
    if values.is_empty() {
        return F::zero();
    }
    let m = mean(values);
    values
        .iter()
        .map(|&v| (v - m) * (v - m))
        .sum::<F>()
        / F::of_usize(values.len())
}

/// Unbiased (n-1) sample variance; zero when fewer than two values.
pub fn sample_variance<F: Real>(values: &[F]) -> F {
    if values.len() < 2 {
        return F::zero();
    }
    let m = mean(values);
    values
        .iter()
        .map(|&v| (v - m) * (v - m))
        .sum::<F>()
        / F::of_usize(values.len() - 1)
}
