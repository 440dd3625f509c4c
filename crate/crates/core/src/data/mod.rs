//! Core series types: raw half-hourly readings, daily consumption series,
//! daily temperature series, and the panel that pairs them per meter.

pub mod ingest;
pub mod preprocess;

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::num::Float;

/// Day-of-week index with Monday = 0 … Sunday = 6.
pub fn weekday_index(date: NaiveDate) -> usize {
    date.weekday().num_days_from_monday() as usize
}

/// Raw half-hourly meter readings, possibly with gaps.
#[derive(Debug, Clone)]
pub struct RawReadings<F> {
    pub meter_id: String,
    timestamps: Vec<NaiveDateTime>,
    values: Vec<Option<F>>,
}

impl<F: Float> RawReadings<F> {
    /// Validates that timestamps are strictly increasing and values are
    /// non-negative and finite where present.
    pub fn new(
        meter_id: impl Into<String>,
        timestamps: Vec<NaiveDateTime>,
        values: Vec<Option<F>>,
    ) -> Result<Self> {
        let meter_id = meter_id.into();
        if timestamps.len() != values.len() {
            return Err(Error::invalid(format!(
                "meter {meter_id}: {} timestamps but {} values",
                timestamps.len(),
                values.len()
            )));
        }
        for pair in timestamps.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid(format!(
                    "meter {meter_id}: timestamps not strictly increasing at {}",
                    pair[1]
                )));
            }
        }
        for (ts, v) in timestamps.iter().zip(&values) {
            if let Some(v) = *v {
                if !v.is_finite() || v < F::zero() {
                    return Err(Error::invalid(format!(
                        "meter {meter_id}: invalid reading {v} at {ts}"
                    )));
                }
            }
        }
        Ok(RawReadings {
            meter_id,
            timestamps,
            values,
        })
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn values(&self) -> &[Option<F>] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

/// Daily consumption after aggregation but before imputation: days with no
/// observed slots are `None`, days with some missing slots are flagged partial.
#[derive(Debug, Clone)]
pub struct DailyAggregate<F> {
    pub meter_id: String,
    pub start_date: NaiveDate,
    pub values: Vec<Option<F>>,
    pub partial: Vec<bool>,
}

impl<F: Float> DailyAggregate<F> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + chrono::Days::new(index as u64)
    }
}

/// A fully observed daily consumption series, optionally mean-normalized.
///
/// When `normalized` is true, `values` have mean 1 and `scale` holds the
/// original mean, so `values[i] * scale` recovers kWh.
#[derive(Debug, Clone)]
pub struct DailySeries<F> {
    pub meter_id: String,
    pub start_date: NaiveDate,
    pub values: Vec<F>,
    pub scale: F,
    pub normalized: bool,
}

impl<F: Float> DailySeries<F> {
    /// Validates: non-empty, finite values, positive scale, and (when
    /// normalized) mean ≈ 1.
    pub fn new(
        meter_id: impl Into<String>,
        start_date: NaiveDate,
        values: Vec<F>,
        scale: F,
        normalized: bool,
    ) -> Result<Self> {
        let meter_id = meter_id.into();
        if values.is_empty() {
            return Err(Error::EmptySeries { meter_id });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "meter {meter_id}: non-finite daily value"
            )));
        }
        if !(scale > F::zero()) || !scale.is_finite() {
            return Err(Error::invalid(format!(
                "meter {meter_id}: scale must be positive and finite"
            )));
        }
        if normalized {
            let m = crate::num::mean(&values);
            if (m - F::one()).abs() > F::cast(1e-9) {
                return Err(Error::invalid(format!(
                    "meter {meter_id}: normalized series has mean {m}, expected 1"
                )));
            }
        }
        Ok(DailySeries {
            meter_id,
            start_date,
            values,
            scale,
            normalized,
        })
    }

    /// Unvalidated raw (kWh, non-normalized) series; panics on empty input.
    pub fn raw(meter_id: impl Into<String>, start_date: NaiveDate, values: Vec<F>) -> Self {
        Self::new(meter_id, start_date, values, F::one(), false)
            .expect("invalid raw series")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + chrono::Days::new(index as u64)
    }

    pub fn end_date(&self) -> NaiveDate {
        self.date_at(self.len() - 1)
    }

    /// Values in kWh regardless of normalization state.
    pub fn denormalized(&self) -> Vec<F> {
        if self.normalized {
            self.values.iter().map(|&v| v * self.scale).collect()
        } else {
            self.values.clone()
        }
    }
}

/// Daily temperature record (mean/min/max °C) for one meter's location.
#[derive(Debug, Clone)]
pub struct TemperatureSeries<F> {
    pub meter_id: String,
    pub start_date: NaiveDate,
    pub mean_temp: Vec<F>,
    pub min_temp: Vec<F>,
    pub max_temp: Vec<F>,
}

impl<F: Float> TemperatureSeries<F> {
    /// Validates equal lengths, non-empty, finite values, and
    /// min ≤ mean ≤ max on every day.
    pub fn new(
        meter_id: impl Into<String>,
        start_date: NaiveDate,
        mean_temp: Vec<F>,
        min_temp: Vec<F>,
        max_temp: Vec<F>,
    ) -> Result<Self> {
        let meter_id = meter_id.into();
        if mean_temp.is_empty() {
            return Err(Error::EmptySeries { meter_id });
        }
        if mean_temp.len() != min_temp.len() || mean_temp.len() != max_temp.len() {
            return Err(Error::invalid(format!(
                "meter {meter_id}: temperature columns have unequal lengths"
            )));
        }
        for i in 0..mean_temp.len() {
            let (lo, mid, hi) = (min_temp[i], mean_temp[i], max_temp[i]);
            if !lo.is_finite() || !mid.is_finite() || !hi.is_finite() {
                return Err(Error::invalid(format!(
                    "meter {meter_id}: non-finite temperature on day {i}"
                )));
            }
            if lo > mid || mid > hi {
                return Err(Error::invalid(format!(
                    "meter {meter_id}: temperature ordering violated on day {i}: \
                     min {lo}, mean {mid}, max {hi}"
                )));
            }
        }
        Ok(TemperatureSeries {
            meter_id,
            start_date,
            mean_temp,
            min_temp,
            max_temp,
        })
    }

    pub fn len(&self) -> usize {
        self.mean_temp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_temp.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + chrono::Days::new(index as u64)
    }

    pub fn end_date(&self) -> NaiveDate {
        self.date_at(self.len() - 1)
    }

    /// The sub-series covering `[start, start + len)`, or an error if the
    /// record does not span that window.
    pub fn window(&self, start: NaiveDate, len: usize) -> Result<TemperatureSeries<F>> {
        let offset = (start - self.start_date).num_days();
        if offset < 0 || (offset as usize) + len > self.len() {
            return Err(Error::invalid(format!(
                "meter {}: temperature record does not cover {} + {} days",
                self.meter_id, start, len
            )));
        }
        let a = offset as usize;
        let b = a + len;
        TemperatureSeries::new(
            self.meter_id.clone(),
            start,
            self.mean_temp[a..b].to_vec(),
            self.min_temp[a..b].to_vec(),
            self.max_temp[a..b].to_vec(),
        )
    }
}

/// One meter's paired consumption and temperature series.
#[derive(Debug, Clone)]
pub struct PanelEntry<F> {
    pub consumption: DailySeries<F>,
    pub temperature: TemperatureSeries<F>,
}

/// A meter that could not be included in the panel, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub meter_id: String,
    pub reason: String,
}

/// Render rejections as the tab-separated log format (`meter_id<TAB>reason`).
pub fn rejection_log(rejections: &[Rejection]) -> String {
    let mut out = String::new();
    for r in rejections {
        out.push_str(&r.meter_id);
        out.push('\t');
        out.push_str(&r.reason);
        out.push('\n');
    }
    out
}

/// The immutable collection of per-meter series the whole pipeline reads.
///
/// Keyed by meter id in a sorted map so iteration order is deterministic.
#[derive(Debug, Clone, Default)]
pub struct SeriesPanel<F> {
    entries: BTreeMap<String, PanelEntry<F>>,
}

impl<F: Float> SeriesPanel<F> {
    pub fn new() -> Self {
        SeriesPanel {
            entries: BTreeMap::new(),
        }
    }

    /// Insert a meter, validating id agreement and calendar alignment
    /// between the consumption and temperature series.
    pub fn insert(&mut self, entry: PanelEntry<F>) -> Result<()> {
        let id = entry.consumption.meter_id.clone();
        if entry.temperature.meter_id != id {
            return Err(Error::invalid(format!(
                "panel entry pairs consumption {id} with temperature {}",
                entry.temperature.meter_id
            )));
        }
        if entry.temperature.start_date != entry.consumption.start_date
            || entry.temperature.len() != entry.consumption.len()
        {
            return Err(Error::invalid(format!(
                "meter {id}: temperature span does not match consumption span"
            )));
        }
        if self.entries.contains_key(&id) {
            return Err(Error::invalid(format!("duplicate meter id {id}")));
        }
        self.entries.insert(id, entry);
        Ok(())
    }

    pub fn get(&self, meter_id: &str) -> Option<&PanelEntry<F>> {
        self.entries.get(meter_id)
    }

    /// Like `get`, but reports an unknown id as a typed error.
    pub fn require(&self, meter_id: &str) -> Result<&PanelEntry<F>> {
        self.get(meter_id).ok_or_else(|| Error::UnknownMeter {
            meter_id: meter_id.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn meter_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PanelEntry<F>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}
