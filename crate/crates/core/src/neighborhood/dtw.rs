//! Dynamic time warping distance with squared pointwise cost and unit
//! steps (diagonal/up/left all cost one local term).
//!
//! The production kernel keeps two DP rows; the full-matrix dynamic program
//! lives in test code as the independent oracle. Both apply the identical
//! sequence of float operations, so they agree exactly, not just within
//! tolerance.

use crate::data::DailySeries;
use crate::error::{Error, Result};
use crate::num::{mean, Float};

/// Distance configuration.
#[derive(Debug, Clone)]
pub struct DtwConfig {
    /// Optional Sakoe-Chiba band: cells with |i - j| > radius are excluded.
    /// Must be at least the length difference of the two series, or no
    /// warping path exists.
    pub band_radius: Option<usize>,
    /// Divide each series by its own mean before comparing (the default;
    /// makes the distance measure shape, not level).
    pub normalize_before: bool,
}

impl Default for DtwConfig {
    fn default() -> Self {
        DtwConfig {
            band_radius: None,
            normalize_before: true,
        }
    }
}

/// DTW distance over raw value slices. `band_radius`, if set, must be ≥ 1
/// and ≥ |len(a) - len(b)|.
pub fn dtw_on_values<F: Float>(a: &[F], b: &[F], band_radius: Option<usize>) -> Result<F> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("dtw: empty series"));
    }
    let (n, m) = (a.len(), b.len());
    if let Some(r) = band_radius {
        if r == 0 {
            return Err(Error::invalid("dtw: band radius must be at least 1"));
        }
        if r < n.abs_diff(m) {
            return Err(Error::invalid(format!(
                "dtw: band radius {r} is narrower than the length difference {}",
                n.abs_diff(m)
            )));
        }
    }

    let inf = F::infinity();
    // prev[j] = D(i-1, j), curr[j] = D(i, j); index 0 is the virtual border.
    let mut prev = vec![inf; m + 1];
    let mut curr = vec![inf; m + 1];
    prev[0] = F::zero();
    for i in 1..=n {
        curr.fill(inf);
        let (lo, hi) = match band_radius {
            Some(r) => (i.saturating_sub(r).max(1), (i + r).min(m)),
            None => (1, m),
        };
        for j in lo..=hi {
            let d = a[i - 1] - b[j - 1];
            let cost = d * d;
            let best = prev[j].min(curr[j - 1]).min(prev[j - 1]);
            curr[j] = cost + best;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m])
}

/// DTW distance between two daily series, mean-normalizing each first when
/// configured (the panel's series are already mean 1, so normalization is a
/// no-op there but makes the function safe on raw inputs).
pub fn dtw_distance<F: Float>(
    a: &DailySeries<F>,
    b: &DailySeries<F>,
    cfg: &DtwConfig,
) -> Result<F> {
    if cfg.normalize_before {
        let prep = |s: &DailySeries<F>| -> Result<Vec<F>> {
            let m = mean(&s.values);
            if !(m > F::zero()) {
                return Err(Error::NonPositiveMean {
                    meter_id: s.meter_id.clone(),
                    mean: m.as_f64(),
                });
            }
            Ok(s.values.iter().map(|&v| v / m).collect())
        };
        dtw_on_values(&prep(a)?, &prep(b)?, cfg.band_radius)
    } else {
        dtw_on_values(&a.values, &b.values, cfg.band_radius)
    }
}
