//! The global forecasting model: a pooled expectile (asymmetric least
//! squares) linear autoregression over lagged consumption, temperature, and
//! day-of-week indicators, forecast recursively and aggregated to months.

pub mod expectile;
pub mod features;
pub mod forecast;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::data::{DailySeries, SeriesPanel};
use crate::error::{Error, Result};
use crate::num::Float;

pub use expectile::fit_expectile;
pub use features::{build_training_matrix, TrainingSet};
pub use forecast::{forecast_recursive, ForecastResult};

/// Model hyperparameters.
#[derive(Debug, Clone)]
pub struct GfmConfig<F> {
    /// Number of autoregressive lags.
    pub window: usize,
    /// Expectile level for long series.
    pub tau_long: F,
    /// Expectile level for short series.
    pub tau_short: F,
    /// Series at or above this many days count as long.
    pub long_series_threshold: usize,
    /// Ridge stabilizer on the squared-coefficient norm.
    pub ridge_penalty: F,
}

impl<F: Float> Default for GfmConfig<F> {
    fn default() -> Self {
        GfmConfig {
            window: 20,
            tau_long: F::cast(0.57),
            tau_short: F::cast(0.39),
            long_series_threshold: 180,
            ridge_penalty: F::cast(1e-6),
        }
    }
}

impl<F: Float> GfmConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::invalid("window must be at least 1"));
        }
        for tau in [self.tau_long, self.tau_short] {
            if !(tau > F::zero() && tau < F::one()) {
                return Err(Error::invalid(format!("tau {tau} outside (0, 1)")));
            }
        }
        if self.ridge_penalty < F::zero() {
            return Err(Error::invalid("ridge penalty must be non-negative"));
        }
        Ok(())
    }
}

/// Which expectile level a series trains under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauGroup {
    Long,
    Short,
}

/// Long/short split by series length; the boundary length counts as long.
pub fn tau_group<F: Float>(series_len: usize, cfg: &GfmConfig<F>) -> TauGroup {
    if series_len >= cfg.long_series_threshold {
        TauGroup::Long
    } else {
        TauGroup::Short
    }
}

/// The expectile level a given series is forecast with.
pub fn select_tau<F: Float>(series: &DailySeries<F>, cfg: &GfmConfig<F>) -> F {
    match tau_group(series.len(), cfg) {
        TauGroup::Long => cfg.tau_long,
        TauGroup::Short => cfg.tau_short,
    }
}

/// Fitted model: one coefficient per feature in the fixed layout
/// (lags, mean temperature, day-of-week one-hot, intercept).
#[derive(Debug, Clone)]
pub struct GfmModel<F> {
    pub coefficients: Vec<F>,
    pub feature_names: Vec<String>,
    pub window: usize,
    pub tau: F,
}

impl<F: Float> GfmModel<F> {
    pub fn new(coefficients: Vec<F>, window: usize, tau: F) -> Result<Self> {
        let feature_names = features::feature_names(window);
        if coefficients.len() != feature_names.len() {
            return Err(Error::invalid(format!(
                "model has {} coefficients but the layout needs {}",
                coefficients.len(),
                feature_names.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite model coefficient"));
        }
        Ok(GfmModel {
            coefficients,
            feature_names,
            window,
            tau,
        })
    }
}

/// The pair of models covering the two tau groups. A group with no series is
/// `None`; forecasting falls back to whichever model exists.
#[derive(Debug, Clone)]
pub struct GfmModels<F> {
    pub long: Option<GfmModel<F>>,
    pub short: Option<GfmModel<F>>,
}

impl<F> Default for GfmModels<F> {
    fn default() -> Self {
        GfmModels {
            long: None,
            short: None,
        }
    }
}

impl<F: Float> GfmModels<F> {
    /// Model for a series of the given length, falling back to the other
    /// group's model when the matching one was not trained.
    pub fn model_for(&self, series_len: usize, cfg: &GfmConfig<F>) -> Result<&GfmModel<F>> {
        let (first, second) = match tau_group(series_len, cfg) {
            TauGroup::Long => (&self.long, &self.short),
            TauGroup::Short => (&self.short, &self.long),
        };
        first
            .as_ref()
            .or(second.as_ref())
            .ok_or_else(|| Error::invalid("no trained model available; run train first"))
    }
}

/// Per-group summary produced by training.
#[derive(Debug, Clone, Default)]
pub struct TrainStats {
    pub long_instances: usize,
    pub short_instances: usize,
    pub skipped: Vec<String>,
}

/// Train one model per tau group over the panel. Groups without instances
/// are skipped; at least one group must be trainable.
pub fn train_models<F: Float>(
    panel: &SeriesPanel<F>,
    cfg: &GfmConfig<F>,
) -> Result<(GfmModels<F>, TrainStats)> {
    cfg.validate()?;
    let mut models = GfmModels::default();
    let mut stats = TrainStats::default();
    for (group, tau) in [
        (TauGroup::Long, cfg.tau_long),
        (TauGroup::Short, cfg.tau_short),
    ] {
        let set = build_training_matrix(panel, cfg, group)?;
        stats.skipped.extend(set.skipped.iter().cloned());
        if set.design.rows == 0 {
            continue;
        }
        let beta = fit_expectile(&set.design, &set.targets, tau, cfg.ridge_penalty)?;
        let model = GfmModel::new(beta, cfg.window, tau)?;
        match group {
            TauGroup::Long => {
                stats.long_instances = set.design.rows;
                models.long = Some(model);
            }
            TauGroup::Short => {
                stats.short_instances = set.design.rows;
                models.short = Some(model);
            }
        }
    }
    if models.long.is_none() && models.short.is_none() {
        return Err(Error::invalid(
            "no series long enough to train on (every series must exceed the lag window)",
        ));
    }
    Ok((models, stats))
}

/// Persist a model as a header line (`tau=…<TAB>window=…`) followed by one
/// `feature_name<TAB>coefficient` line per feature, full precision.
pub fn save_model<F: Float>(path: &Path, model: &GfmModel<F>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "tau={}\twindow={}", model.tau, model.window)?;
    for (name, coef) in model.feature_names.iter().zip(&model.coefficients) {
        writeln!(w, "{name}\t{coef}")?;
    }
    w.flush()?;
    Ok(())
}

/// Load a model persisted by [`save_model`], validating the feature layout.
pub fn load_model<F: Float>(path: &Path) -> Result<GfmModel<F>> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::invalid(format!("{}: empty model file", path.display())))?;
    let mut tau = None;
    let mut window = None;
    for part in header.split('\t') {
        match part.split_once('=') {
            Some(("tau", v)) => tau = v.parse::<f64>().ok(),
            Some(("window", v)) => window = v.parse::<usize>().ok(),
            _ => {}
        }
    }
    let (Some(tau), Some(window)) = (tau, window) else {
        return Err(Error::invalid(format!(
            "{}: malformed model header {header:?}",
            path.display()
        )));
    };
    let expected = features::feature_names(window);
    let mut coefficients = Vec::with_capacity(expected.len());
    for (i, line) in lines.enumerate() {
        let line = line?;
        let Some((name, value)) = line.split_once('\t') else {
            return Err(Error::invalid(format!(
                "{}: malformed coefficient line {line:?}",
                path.display()
            )));
        };
        if i >= expected.len() || name != expected[i] {
            return Err(Error::invalid(format!(
                "{}: unexpected feature {name:?} at line {}",
                path.display(),
                i + 2
            )));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| Error::invalid(format!("{}: bad coefficient {value:?}", path.display())))?;
        coefficients.push(F::cast(value));
    }
    GfmModel::new(coefficients, window, F::cast(tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn series(len: usize) -> DailySeries<f64> {
        DailySeries::raw(
            "m",
            NaiveDate::from_ymd_opt(2017, 1, 1).unwrap(),
            vec![1.0; len],
        )
    }

    #[test]
    fn tau_selection_matches_length_split() {
        let cfg = GfmConfig::<f64>::default();
        assert_eq!(select_tau(&series(365), &cfg), 0.57);
        assert_eq!(select_tau(&series(30), &cfg), 0.39);
        // Boundary length counts as long.
        assert_eq!(select_tau(&series(180), &cfg), 0.57);
        assert_eq!(select_tau(&series(179), &cfg), 0.39);
    }

    #[test]
    fn model_round_trips_through_persistence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.tsv");
        let n = features::feature_names(20).len();
        let coefficients: Vec<f64> = (0..n).map(|i| (i as f64) * 0.125 - 1.0).collect();
        let model = GfmModel::new(coefficients.clone(), 20, 0.57).unwrap();
        save_model(&path, &model).unwrap();
        let back: GfmModel<f64> = load_model(&path).unwrap();
        assert_eq!(back.coefficients, coefficients);
        assert_eq!(back.window, 20);
        assert_eq!(back.tau, 0.57);
        assert_eq!(back.feature_names, model.feature_names);
    }

    #[test]
    fn load_rejects_wrong_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.tsv");
        std::fs::write(&path, "tau=0.5\twindow=2\nlag_1\t1.0\nwrong_name\t2.0\n").unwrap();
        assert!(load_model::<f64>(&path).is_err());
    }

    #[test]
    fn model_rejects_wrong_coefficient_count() {
        assert!(GfmModel::new(vec![1.0f64; 5], 20, 0.5).is_err());
    }
}
