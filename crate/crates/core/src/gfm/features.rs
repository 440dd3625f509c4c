//! Feature layout shared by training and forecasting.
//!
//! One instance per (meter, day t) with t past the lag window:
//! `[lag_1 … lag_W, mean_temp, dow_mon … dow_sun, intercept]`, where lag_k
//! is the value k days before t and the target is the (normalized) value at
//! t. Training and the recursive forecaster both fill rows through
//! [`fill_instance`], so the layout cannot drift between them.

use crate::data::{weekday_index, SeriesPanel};
use crate::error::Result;
use crate::gfm::{tau_group, GfmConfig, TauGroup};
use crate::linalg::DesignMatrix;
use crate::num::Float;

const DOW_NAMES: [&str; 7] = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"];

/// Ordered feature names for a given lag window.
pub fn feature_names(window: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=window).map(|l| format!("lag_{l}")).collect();
    names.push("mean_temp".to_string());
    names.extend(DOW_NAMES.iter().map(|d| format!("dow_{d}")));
    names.push("intercept".to_string());
    names
}

/// Features per instance for a given lag window.
pub fn feature_count(window: usize) -> usize {
    window + 1 + 7 + 1
}

/// Fill one row. `recent` holds the last `window` values in chronological
/// order (oldest first), so lag_1 is its final element.
pub fn fill_instance<F: Float>(out: &mut [F], recent: &[F], temp: F, weekday: usize) {
    let window = recent.len();
    debug_assert_eq!(out.len(), feature_count(window));
    debug_assert!(weekday < 7);
    for lag in 1..=window {
        out[lag - 1] = recent[window - lag];
    }
    out[window] = temp;
    for d in 0..7 {
        out[window + 1 + d] = if d == weekday { F::one() } else { F::zero() };
    }
    out[window + 8] = F::one();
}

/// Pooled training instances for one tau group.
#[derive(Debug)]
pub struct TrainingSet<F> {
    pub design: DesignMatrix<F>,
    pub targets: Vec<F>,
    /// Meters skipped because their series does not exceed the lag window.
    pub skipped: Vec<String>,
}

/// Assemble the pooled design matrix over every panel series in `group`.
/// Series no longer than the window are skipped (logged and listed), not
/// fatal.
pub fn build_training_matrix<F: Float>(
    panel: &SeriesPanel<F>,
    cfg: &GfmConfig<F>,
    group: TauGroup,
) -> Result<TrainingSet<F>> {
    let cols = feature_count(cfg.window);
    let mut data: Vec<F> = Vec::new();
    let mut targets: Vec<F> = Vec::new();
    let mut skipped = Vec::new();
    for (id, entry) in panel.iter() {
        let series = &entry.consumption;
        if tau_group(series.len(), cfg) != group {
            continue;
        }
        if series.len() <= cfg.window {
            log::warn!(
                "meter {id}: series length {} does not exceed window {}; skipped from training",
                series.len(),
                cfg.window
            );
            skipped.push(id.to_string());
            continue;
        }
        let mut row = vec![F::zero(); cols];
        for t in cfg.window..series.len() {
            fill_instance(
                &mut row,
                &series.values[t - cfg.window..t],
                entry.temperature.mean_temp[t],
                weekday_index(series.date_at(t)),
            );
            data.extend_from_slice(&row);
            targets.push(series.values[t]);
        }
    }
    let rows = targets.len();
    Ok(TrainingSet {
        design: DesignMatrix::new(data, rows, cols),
        targets,
        skipped,
    })
}
