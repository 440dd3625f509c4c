//! Scalar abstraction for the numeric pipeline.
//!
//! Everything numeric in this crate is generic over [`Float`], which is
//! `f32` or `f64` in practice. The trait bundles the `num-traits` float
//! operations with the conversion, threading and serialization bounds the
//! pipeline needs, plus two explicit conversions (`cast` / `as_f64`) so
//! literals and I/O stay readable at call sites.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar used throughout the crate.
pub trait Float:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Convert an `f64` constant into this scalar type.
    fn cast(v: f64) -> Self;

    /// Widen to `f64` (exact for `f32` and `f64`).
    fn as_f64(self) -> f64;

    /// Convert a count into this scalar type.
    fn from_count(n: usize) -> Self {
        Self::cast(n as f64)
    }
}

impl Float for f32 {
    fn cast(v: f64) -> Self {
        v as f32
    }

    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Float for f64 {
    fn cast(v: f64) -> Self {
        v
    }

    fn as_f64(self) -> f64 {
        self
    }
}

/// Arithmetic mean of a slice. Returns zero for an empty slice.
pub fn mean<F: Float>(values: &[F]) -> F {
    if values.is_empty() {
        return F::zero();
    }
    values.iter().copied().sum::<F>() / F::from_count(values.len())
}

/// Population variance (divisor `n`) of a slice. Returns zero for an empty slice.
pub fn population_variance<F: Float>(values: &[F]) -> F {
    if values.is_empty() {
        return F::zero();
    }
    let m = mean(values);
    values
        .iter()
        .map(|&v| {
            let d = v - m;
            d * d
        })
        .sum::<F>()
        / F::from_count(values.len())
}

/// Population standard deviation (divisor `n`) of a slice.
pub fn population_std<F: Float>(values: &[F]) -> F {
    population_variance(values).sqrt()
}

/// Empirical quantile with linear interpolation between order statistics
/// (the "type 7" rule: index `h = (n - 1) * p`, interpolating between
/// `floor(h)` and `ceil(h)`).
///
/// `sorted` must be in ascending order and non-empty; `p` must lie in `[0, 1]`.
pub fn quantile_type7<F: Float>(sorted: &[F], p: f64) -> F {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&p), "quantile probability outside [0, 1]");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let frac = F::cast(h - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Median of a slice (not required to be sorted).
pub fn median<F: Float>(values: &[F]) -> F {
    assert!(!values.is_empty(), "median of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in median"));
    quantile_type7(&sorted, 0.5)
}
