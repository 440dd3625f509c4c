//! Recursive daily forecasting: each step feeds the previous predictions
//! back in as lags, then daily forecasts are denormalized and aggregated
//! into calendar-month and yearly totals.

use chrono::{Datelike, NaiveDate};

use crate::data::{weekday_index, DailySeries, TemperatureSeries};
use crate::error::{Error, Result};
use crate::gfm::features::{feature_count, fill_instance};
use crate::gfm::GfmModel;
use crate::num::Float;

/// A year-ahead forecast for one series.
#[derive(Debug, Clone)]
pub struct ForecastResult<F> {
    pub meter_id: String,
    /// First forecast day (the day after the series ends).
    pub start_date: NaiveDate,
    /// Daily forecasts in the model's (normalized) space.
    pub daily: Vec<F>,
    /// Daily forecasts in kWh.
    pub daily_kwh: Vec<F>,
    /// kWh totals bucketed by calendar month of the forecast day.
    pub monthly_kwh: [F; 12],
    pub yearly_kwh: F,
}

impl<F: Float> ForecastResult<F> {
    /// kWh forecast for a calendar month (1-12).
    pub fn month_total(&self, month: u32) -> Result<F> {
        if !(1..=12).contains(&month) {
            return Err(Error::invalid(format!("month {month} outside 1-12")));
        }
        Ok(self.monthly_kwh[(month - 1) as usize])
    }
}

/// Forecast `horizon` days past the end of `series`, using `extended`
/// temperatures that must start the day after the series ends and cover the
/// whole horizon.
pub fn forecast_recursive<F: Float>(
    model: &GfmModel<F>,
    series: &DailySeries<F>,
    extended: &TemperatureSeries<F>,
    horizon: usize,
) -> Result<ForecastResult<F>> {
    if horizon == 0 {
        return Err(Error::invalid("forecast horizon must be at least 1"));
    }
    if series.len() < model.window {
        return Err(Error::SeriesTooShort {
            context: format!("meter {}: forecasting needs the full lag window", series.meter_id),
            needed: model.window,
            got: series.len(),
        });
    }
    let origin = series.end_date() + chrono::Days::new(1);
    if extended.start_date != origin {
        return Err(Error::invalid(format!(
            "meter {}: extended temperatures start {} but the forecast starts {origin}",
            series.meter_id, extended.start_date
        )));
    }
    if extended.len() < horizon {
        return Err(Error::MissingTemperature {
            date: extended.start_date + chrono::Days::new(extended.len() as u64),
        });
    }

    // Rolling buffer of the most recent `window` values, chronological order.
    let mut recent: Vec<F> = series.values[series.len() - model.window..].to_vec();
    let mut row = vec![F::zero(); feature_count(model.window)];
    let mut daily = Vec::with_capacity(horizon);
    for h in 0..horizon {
        let date = origin + chrono::Days::new(h as u64);
        fill_instance(
            &mut row,
            &recent,
            extended.mean_temp[h],
            weekday_index(date),
        );
        let pred: F = row
            .iter()
            .zip(&model.coefficients)
            .map(|(&x, &c)| x * c)
            .sum();
        daily.push(pred);
        recent.rotate_left(1);
        *recent.last_mut().expect("window >= 1") = pred;
    }

    let factor = if series.normalized {
        series.scale
    } else {
        F::one()
    };
    let daily_kwh: Vec<F> = daily.iter().map(|&v| v * factor).collect();
    let mut monthly_kwh = [F::zero(); 12];
    for (h, &v) in daily_kwh.iter().enumerate() {
        let date = origin + chrono::Days::new(h as u64);
        monthly_kwh[(date.month() - 1) as usize] = monthly_kwh[(date.month() - 1) as usize] + v;
    }
    let yearly_kwh = monthly_kwh.iter().copied().sum();
    Ok(ForecastResult {
        meter_id: series.meter_id.clone(),
        start_date: origin,
        daily,
        daily_kwh,
        monthly_kwh,
        yearly_kwh,
    })
}
