//! Synthetic consumption/temperature panel generator with a known
//! generative structure, so tests can plant recoverable effects.
//!
//! Daily consumption of meter i in cluster c (c = i mod cluster_count):
//!
//!   value(d) = base_c · weekly(d) · (1 + γ·(T̄ − temp(d))⁺ / T̄) · exp(σ·z)
//!
//! where weekly(d) = 1 + amplitude·shape[weekday], temp(d) follows a
//! sinusoidal annual cycle around T̄ = 15 °C with small Gaussian jitter,
//! γ is the heating sensitivity, and σ the log-normal noise level.
//! Daily values are emitted as 48 equal half-hourly readings.

use chrono::{Days, NaiveDate};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{weekday_index, RawReadings, TemperatureSeries};
use crate::error::{Error, Result};
use crate::num::Float;
use crate::rng::{mix_seed, rng_from_seed};

/// Monday..Sunday deviations scaled by `weekly_amplitude`.
pub const WEEKLY_SHAPE: [f64; 7] = [-0.15, -0.10, -0.05, 0.0, 0.05, 0.10, 0.15];
/// Annual mean temperature T̄, also the heating reference, °C.
pub const BASE_TEMP: f64 = 15.0;
/// Amplitude of the annual temperature cycle, °C.
const TEMP_SWING: f64 = 10.0;
/// Standard deviation of the per-day temperature jitter, °C.
const TEMP_JITTER_STD: f64 = 0.5;
/// Offset between the daily mean and the min/max temperatures, °C.
const TEMP_MARGIN: f64 = 3.0;
/// Half-hour slots per day.
const SLOTS: usize = 48;

fn default_cluster_count() -> usize {
    2
}
fn default_weekly_amplitude() -> f64 {
    1.0
}
fn default_temp_sensitivity() -> f64 {
    0.5
}
fn default_noise_level() -> f64 {
    0.1
}
fn default_seed() -> u64 {
    42
}
fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2017, 1, 1).unwrap()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_meters: usize,
    pub days: usize,
    /// Meters cycle through this many consumption archetypes.
    #[serde(default = "default_cluster_count")]
    pub cluster_count: usize,
    /// Base consumption per cluster, kWh/day. Defaults to an even spread
    /// from 10 to 30.
    #[serde(default)]
    pub cluster_bases: Option<Vec<f64>>,
    #[serde(default = "default_weekly_amplitude")]
    pub weekly_amplitude: f64,
    /// γ: heating response per degree below T̄, relative to T̄.
    #[serde(default = "default_temp_sensitivity")]
    pub temp_sensitivity: f64,
    /// σ of the multiplicative log-normal noise; 0 disables noise.
    #[serde(default = "default_noise_level")]
    pub noise_level: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_start_date")]
    pub start_date: NaiveDate,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_meters == 0 {
            return Err(Error::invalid("n_meters must be at least 1"));
        }
        if self.days == 0 {
            return Err(Error::invalid("days must be at least 1"));
        }
        if self.cluster_count == 0 {
            return Err(Error::invalid("cluster_count must be at least 1"));
        }
        if let Some(bases) = &self.cluster_bases {
            if bases.len() != self.cluster_count {
                return Err(Error::invalid(format!(
                    "cluster_bases has {} entries for {} clusters",
                    bases.len(),
                    self.cluster_count
                )));
            }
            if bases.iter().any(|b| !(*b > 0.0)) {
                return Err(Error::invalid("cluster bases must be positive"));
            }
        }
        if !(0.0..=6.0).contains(&self.weekly_amplitude) {
            return Err(Error::invalid("weekly_amplitude must lie in [0, 6]"));
        }
        if self.temp_sensitivity < 0.0 {
            return Err(Error::invalid("temp_sensitivity must be non-negative"));
        }
        if self.noise_level < 0.0 {
            return Err(Error::invalid("noise_level must be non-negative"));
        }
        Ok(())
    }

    /// The per-cluster base consumptions, kWh/day.
    pub fn resolved_bases(&self) -> Vec<f64> {
        if let Some(bases) = &self.cluster_bases {
            return bases.clone();
        }
        if self.cluster_count == 1 {
            return vec![10.0];
        }
        (0..self.cluster_count)
            .map(|c| 10.0 + 20.0 * c as f64 / (self.cluster_count - 1) as f64)
            .collect()
    }

    pub fn meter_id(index: usize) -> String {
        format!("m{index:04}")
    }

    pub fn cluster_of(&self, index: usize) -> usize {
        index % self.cluster_count
    }
}

/// The heating multiplier for one temperature.
pub fn heating_factor(temp_sensitivity: f64, temp: f64) -> f64 {
    1.0 + temp_sensitivity * (BASE_TEMP - temp).max(0.0) / BASE_TEMP
}

/// The weekly multiplier for one date.
pub fn weekly_factor(weekly_amplitude: f64, date: NaiveDate) -> f64 {
    1.0 + weekly_amplitude * WEEKLY_SHAPE[weekday_index(date)]
}

/// Generate the panel. Each meter's stream is seeded independently from
/// (seed, meter index), so the output is deterministic and unaffected by
/// n_meters changes upstream of the meter.
pub fn generate_panel<F: Float>(
    spec: &SyntheticSpec,
) -> Result<(Vec<RawReadings<F>>, Vec<TemperatureSeries<F>>)> {
    spec.validate()?;
    let bases = spec.resolved_bases();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut readings = Vec::with_capacity(spec.n_meters);
    let mut temperatures = Vec::with_capacity(spec.n_meters);
    for i in 0..spec.n_meters {
        let meter_id = SyntheticSpec::meter_id(i);
        let base = bases[spec.cluster_of(i)];
        let mut rng = rng_from_seed(mix_seed(spec.seed, i as u64));
        let mut timestamps = Vec::with_capacity(spec.days * SLOTS);
        let mut values = Vec::with_capacity(spec.days * SLOTS);
        let mut mean_t = Vec::with_capacity(spec.days);
        let mut min_t = Vec::with_capacity(spec.days);
        let mut max_t = Vec::with_capacity(spec.days);
        for d in 0..spec.days {
            let date = spec.start_date + Days::new(d as u64);
            let cycle = 2.0 * std::f64::consts::PI * (d % 365) as f64 / 365.0;
            let temp = BASE_TEMP - TEMP_SWING * cycle.cos()
                + TEMP_JITTER_STD * normal.sample(&mut rng);
            let noise_z: f64 = normal.sample(&mut rng);
            let value = base
                * weekly_factor(spec.weekly_amplitude, date)
                * heating_factor(spec.temp_sensitivity, temp)
                * (spec.noise_level * noise_z).exp();
            let midnight = date.and_hms_opt(0, 0, 0).unwrap();
            for slot in 0..SLOTS {
                timestamps.push(midnight + chrono::Duration::minutes(30 * slot as i64));
                values.push(Some(F::cast(value / SLOTS as f64)));
            }
            mean_t.push(F::cast(temp));
            min_t.push(F::cast(temp - TEMP_MARGIN));
            max_t.push(F::cast(temp + TEMP_MARGIN));
        }
        readings.push(RawReadings::new(meter_id.clone(), timestamps, values)?);
        temperatures.push(TemperatureSeries::new(
            meter_id,
            spec.start_date,
            mean_t,
            min_t,
            max_t,
        )?);
    }
    Ok((readings, temperatures))
}

/// Generate and write the panel as the two input CSV files.
pub fn write_synthetic_panel(
    spec: &SyntheticSpec,
    consumption_path: &std::path::Path,
    temperature_path: &std::path::Path,
) -> Result<()> {
    let (readings, temps) = generate_panel::<f64>(spec)?;
    crate::data::ingest::write_consumption_csv(consumption_path, &readings)?;
    crate::data::ingest::write_temperature_csv(temperature_path, &temps)?;
    Ok(())
}
