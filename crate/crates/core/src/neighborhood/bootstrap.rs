//! Series bootstrap: Box-Cox transform, classical additive decomposition,
//! moving-block resampling of the remainder, and recomposition.
//!
//! A replicate keeps the parent's trend and weekly seasonal shape but
//! carries resampled noise, giving the rule miner a denser neighborhood
//! around each real series.

use rand::Rng;

use crate::data::DailySeries;
use crate::error::{Error, Result};
use crate::num::{mean, population_variance, Float};
use crate::rng::{mix_seed, rng_from_seed};

/// Weekly seasonal period used throughout (daily data).
pub const SEASONAL_PERIOD: usize = 7;

/// Moving-block length: two seasonal periods.
pub const BLOCK_LEN: usize = 14;

/// Lower clamp keeping recomposed values strictly positive.
const POSITIVE_FLOOR: f64 = 1e-9;

/// Additive decomposition of a series into trend + seasonal + remainder.
///
/// The identity `trend[i] + seasonal[i] + remainder[i] == values[i]` holds
/// exactly at every index because the remainder is defined as the residual.
#[derive(Debug, Clone)]
pub struct Decomposition<F> {
    pub trend: Vec<F>,
    pub seasonal: Vec<F>,
    pub remainder: Vec<F>,
}

/// Classical additive decomposition with an odd period:
/// trend = centered moving average of width `period`; the first and last
/// `period/2` trend values copy the nearest defined trend value; seasonal =
/// per-position means of the detrended series, re-centered to sum to zero
/// over one period; remainder = exact residual.
pub fn decompose_additive<F: Float>(values: &[F], period: usize) -> Result<Decomposition<F>> {
    assert!(period % 2 == 1, "decomposition requires an odd period");
    let n = values.len();
    if n < 2 * period {
        return Err(Error::TooShortToDecompose { len: n, period });
    }
    let half = period / 2;
    let width = F::from_count(period);

    // Centered moving average via a running window sum.
    let mut trend = vec![F::zero(); n];
    let mut window_sum: F = values[..period].iter().copied().sum();
    trend[half] = window_sum / width;
    for center in (half + 1)..(n - half) {
        window_sum = window_sum + values[center + half] - values[center - half - 1];
        trend[center] = window_sum / width;
    }
    for i in 0..half {
        trend[i] = trend[half];
        trend[n - 1 - i] = trend[n - 1 - half];
    }

    // Per-position means of the detrended series.
    let mut pos_sum = vec![F::zero(); period];
    let mut pos_count = vec![0usize; period];
    for i in 0..n {
        pos_sum[i % period] = pos_sum[i % period] + (values[i] - trend[i]);
        pos_count[i % period] += 1;
    }
    let mut pos_mean: Vec<F> = pos_sum
        .iter()
        .zip(&pos_count)
        .map(|(&s, &c)| s / F::from_count(c))
        .collect();
    // Re-center so the seasonal component sums to zero over one period.
    let seasonal_mean = mean(&pos_mean);
    for s in &mut pos_mean {
        *s = *s - seasonal_mean;
    }

    let seasonal: Vec<F> = (0..n).map(|i| pos_mean[i % period]).collect();
    let remainder: Vec<F> = (0..n)
        .map(|i| values[i] - trend[i] - seasonal[i])
        .collect();
    Ok(Decomposition {
        trend,
        seasonal,
        remainder,
    })
}

/// Box-Cox transform; `lambda == 0` means the log transform.
/// All inputs must be strictly positive.
pub fn boxcox<F: Float>(values: &[F], lambda: F) -> Vec<F> {
    if lambda == F::zero() {
        values.iter().map(|v| v.ln()).collect()
    } else {
        values
            .iter()
            .map(|&v| (v.powf(lambda) - F::one()) / lambda)
            .collect()
    }
}

/// Inverse Box-Cox. Values that would leave the transform's domain (possible
/// for extreme resampled remainders) are clamped just above zero.
pub fn inv_boxcox<F: Float>(values: &[F], lambda: F) -> Vec<F> {
    let floor = F::cast(POSITIVE_FLOOR);
    if lambda == F::zero() {
        values.iter().map(|v| v.exp().max(floor)).collect()
    } else {
        values
            .iter()
            .map(|&v| {
                let base = (lambda * v + F::one()).max(floor);
                base.powf(F::one() / lambda).max(floor)
            })
            .collect()
    }
}

/// Pick λ from the grid {0, 0.1, …, 1.0} by maximizing the profile
/// log-likelihood −n/2·ln σ²(λ) + (λ−1)·Σ ln x. Inputs must be positive.
/// Ties (and degenerate constant series) resolve to the smallest λ.
pub fn select_boxcox_lambda<F: Float>(values: &[F]) -> F {
    let n = F::from_count(values.len());
    let log_sum: F = values.iter().map(|v| v.ln()).sum();
    let mut best_lambda = F::zero();
    let mut best_ll = F::neg_infinity();
    for step in 0..=10 {
        let lambda = F::cast(step as f64 / 10.0);
        let transformed = boxcox(values, lambda);
        let var = population_variance(&transformed);
        if !var.is_finite() {
            continue;
        }
        if var <= F::zero() {
            // Constant under this transform: perfect fit; smallest such λ wins.
            return lambda;
        }
        let ll = -(n / F::cast(2.0)) * var.ln() + (lambda - F::one()) * log_sum;
        if ll > best_ll {
            best_ll = ll;
            best_lambda = lambda;
        }
    }
    best_lambda
}

/// Moving-block bootstrap: concatenate uniformly chosen contiguous blocks of
/// length `block_len` until the output reaches `n`, then truncate.
fn moving_block_resample<F: Float>(
    remainder: &[F],
    block_len: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<F> {
    let n = remainder.len();
    let b = block_len.min(n);
    let n_starts = n - b + 1;
    let mut out = Vec::with_capacity(n + b);
    while out.len() < n {
        let s = rng.random_range(0..n_starts);
        out.extend_from_slice(&remainder[s..s + b]);
    }
    out.truncate(n);
    out
}

/// Generate `n_synthetic` bootstrap replicates of `parent`.
///
/// Procedure per replicate: shift to strict positivity if needed, Box-Cox
/// with grid-selected λ, decompose (period 7), moving-block resample the
/// remainder (block 14), recompose, invert the transform, undo the shift.
/// Replicates of a normalized parent are re-scaled to mean 1 with the kWh
/// conversion folded into their `scale`, so every replicate satisfies the
/// same invariants as its parent. Deterministic given `seed`; replicate `r`
/// draws from an RNG seeded by `mix_seed(seed, r)`, so it is stable no
/// matter how many replicates are requested.
pub fn bootstrap_series<F: Float>(
    parent: &DailySeries<F>,
    n_synthetic: usize,
    seed: u64,
) -> Result<Vec<DailySeries<F>>> {
    if parent.len() < 2 * SEASONAL_PERIOD {
        return Err(Error::TooShortToDecompose {
            len: parent.len(),
            period: SEASONAL_PERIOD,
        });
    }
    let min = parent
        .values
        .iter()
        .copied()
        .fold(F::infinity(), |a, b| a.min(b));
    let shift = if min <= F::zero() {
        F::one() - min
    } else {
        F::zero()
    };
    let shifted: Vec<F> = parent.values.iter().map(|&v| v + shift).collect();
    let lambda = select_boxcox_lambda(&shifted);
    let transformed = boxcox(&shifted, lambda);
    let decomp = decompose_additive(&transformed, SEASONAL_PERIOD)?;

    let mut out = Vec::with_capacity(n_synthetic);
    for r in 0..n_synthetic {
        let mut rng = rng_from_seed(mix_seed(seed, r as u64));
        let resampled = moving_block_resample(&decomp.remainder, BLOCK_LEN, &mut rng);
        let recomposed: Vec<F> = (0..parent.len())
            .map(|i| decomp.trend[i] + decomp.seasonal[i] + resampled[i])
            .collect();
        let floor = F::cast(POSITIVE_FLOOR);
        let values: Vec<F> = inv_boxcox(&recomposed, lambda)
            .into_iter()
            .map(|v| (v - shift).max(floor))
            .collect();

        let series = if parent.normalized {
            // Restore the mean-1 invariant, preserving kWh via the scale.
            let m = mean(&values);
            let rescaled: Vec<F> = values.iter().map(|&v| v / m).collect();
            DailySeries::new(
                parent.meter_id.clone(),
                parent.start_date,
                rescaled,
                parent.scale * m,
                true,
            )?
        } else {
            DailySeries::new(
                parent.meter_id.clone(),
                parent.start_date,
                values,
                parent.scale,
                false,
            )?
        };
        out.push(series);
    }
    Ok(out)
}
