//! Surrogate dataset: a small interpretable feature table describing each
//! neighborhood member next to the model's monthly forecast for it.
//!
//! One row per (member, forecast month): recent-consumption summary features
//! and the month's expected temperature on the left, the member's forecast
//! consumption for that month (kWh) as the target.

use chrono::Datelike;
use log::warn;

use crate::data::TemperatureSeries;
use crate::data::DailySeries;
use crate::error::{Error, Result};
use crate::gfm::ForecastResult;
use crate::miner::{CellValue, ColumnCuts, ColumnData, CutPoints, RuleTable};
use crate::neighborhood::Provenance;
use crate::num::{quantile_type7, Float};

/// Mining-table columns, in order. The four numeric features are followed
/// by the categorical month.
pub const FEATURE_NAMES: [&str; 5] = ["mean_cons", "max_cons", "min_cons", "temp", "month"];

/// One surrogate row: features plus the forecast target for one month.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateInstance<F> {
    /// Mean consumption over the recent window, kWh/day.
    pub mean_cons: F,
    /// Maximum daily consumption over the recent window, kWh.
    pub max_cons: F,
    /// Minimum daily consumption over the recent window, kWh.
    pub min_cons: F,
    /// Mean forecast-period temperature of the target month, °C.
    pub temp: F,
    /// Target month, 1–12.
    pub month: u32,
    /// Forecast consumption for the target month, kWh.
    pub target: F,
}

impl<F: Float> SurrogateInstance<F> {
    /// Feature cells in mining-table column order (target excluded).
    pub fn cells(&self) -> Vec<CellValue<F>> {
        vec![
            CellValue::Num(self.mean_cons),
            CellValue::Num(self.max_cons),
            CellValue::Num(self.min_cons),
            CellValue::Num(self.temp),
            CellValue::Cat(self.month),
        ]
    }
}

/// Featurize one series against its forecast: one instance per calendar
/// month that appears in the forecast horizon, months ascending.
///
/// `extended` must start on the forecast start date and cover its horizon.
/// Consumption summaries are taken over the last `window` days of the
/// series in original units.
pub fn featurize_months<F: Float>(
    series: &DailySeries<F>,
    extended: &TemperatureSeries<F>,
    forecast: &ForecastResult<F>,
    window: usize,
) -> Result<Vec<SurrogateInstance<F>>> {
    if window == 0 {
        return Err(Error::invalid("surrogate window must be at least 1"));
    }
    if series.len() < window {
        return Err(Error::SeriesTooShort {
            context: "surrogate features".into(),
            needed: window,
            got: series.len(),
        });
    }
    if extended.start_date != forecast.start_date {
        return Err(Error::invalid(format!(
            "temperature span starts {} but the forecast starts {}",
            extended.start_date, forecast.start_date
        )));
    }
    let horizon = forecast.daily_kwh.len();
    if extended.len() < horizon {
        return Err(Error::MissingTemperature {
            date: forecast.start_date + chrono::Days::new(extended.len() as u64),
        });
    }

    let denorm = series.denormalized();
    let recent = &denorm[series.len() - window..];
    let mean_cons = crate::num::mean(recent);
    let mut max_cons = recent[0];
    let mut min_cons = recent[0];
    for &v in &recent[1..] {
        max_cons = max_cons.max(v);
        min_cons = min_cons.min(v);
    }

    let mut instances = Vec::with_capacity(12);
    for month in 1u32..=12 {
        let mut sum = F::zero();
        let mut count = 0usize;
        for d in 0..horizon {
            let date = forecast.start_date + chrono::Days::new(d as u64);
            if date.month() == month {
                sum = sum + extended.mean_temp[d];
                count += 1;
            }
        }
        if count == 0 {
            continue;
        }
        instances.push(SurrogateInstance {
            mean_cons,
            max_cons,
            min_cons,
            temp: sum / F::from_count(count),
            month,
            target: forecast.month_total(month)?,
        });
    }
    Ok(instances)
}

/// The assembled surrogate dataset, each row tagged with where it came from.
#[derive(Debug, Clone, Default)]
pub struct SurrogateTable<F> {
    pub rows: Vec<(Provenance, SurrogateInstance<F>)>,
}

impl<F: Float> SurrogateTable<F> {
    pub fn new() -> Self {
        SurrogateTable { rows: Vec::new() }
    }

    pub fn push_member(&mut self, provenance: Provenance, instances: Vec<SurrogateInstance<F>>) {
        for inst in instances {
            self.rows.push((provenance.clone(), inst));
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Debug dump of the mining table, one row per instance:
    /// `provenance,mean_cons,max_cons,min_cons,temp,month,target`.
    pub fn to_debug_csv(&self) -> String {
        let mut out = String::from("provenance,mean_cons,max_cons,min_cons,temp,month,target\n");
        for (provenance, inst) in &self.rows {
            let label = match provenance {
                Provenance::Original => "original".to_string(),
                Provenance::Bootstrap { parent, replicate } => {
                    format!("bootstrap:{parent}:{replicate}")
                }
            };
            out.push_str(&format!(
                "{label},{},{},{},{},{},{}\n",
                inst.mean_cons.as_f64(),
                inst.max_cons.as_f64(),
                inst.min_cons.as_f64(),
                inst.temp.as_f64(),
                inst.month,
                inst.target.as_f64()
            ));
        }
        out
    }

    /// Column-major mining table over the rows, columns per `FEATURE_NAMES`.
    pub fn to_rule_table(&self) -> Result<RuleTable<F>> {
        let n = self.rows.len();
        let mut mean_cons = Vec::with_capacity(n);
        let mut max_cons = Vec::with_capacity(n);
        let mut min_cons = Vec::with_capacity(n);
        let mut temp = Vec::with_capacity(n);
        let mut month = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);
        for (_, inst) in &self.rows {
            mean_cons.push(inst.mean_cons);
            max_cons.push(inst.max_cons);
            min_cons.push(inst.min_cons);
            temp.push(inst.temp);
            month.push(inst.month);
            targets.push(inst.target);
        }
        RuleTable::new(
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            vec![
                ColumnData::Numeric(mean_cons),
                ColumnData::Numeric(max_cons),
                ColumnData::Numeric(min_cons),
                ColumnData::Numeric(temp),
                ColumnData::Categorical(month),
            ],
            targets,
        )
    }
}

/// Equal-frequency discretization: for each numeric column, `bins - 1`
/// interior quantile boundaries (linear-interpolation quantiles at
/// k/bins, k = 1..bins); duplicates collapse, and a column whose
/// boundaries all coincide is dropped from condition generation.
/// Categorical columns keep their distinct values; single-valued ones are
/// dropped as tautological.
pub fn derive_cutpoints<F: Float>(table: &RuleTable<F>, bins: usize) -> CutPoints<F> {
    assert!(bins >= 2, "bins must be at least 2");
    let mut columns = Vec::with_capacity(table.n_columns());
    for (name, col) in table.column_names.iter().zip(&table.columns) {
        match col {
            ColumnData::Numeric(values) => {
                let mut sorted = values.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut cuts: Vec<F> = Vec::with_capacity(bins - 1);
                for k in 1..bins {
                    let q = quantile_type7(&sorted, k as f64 / bins as f64);
                    if cuts.last() != Some(&q) {
                        cuts.push(q);
                    }
                }
                if cuts.len() == 1 && sorted[0] == sorted[sorted.len() - 1] {
                    cuts.clear();
                }
                if cuts.is_empty() {
                    warn!("column {name} is constant; no conditions generated for it");
                }
                columns.push(ColumnCuts::Numeric(cuts));
            }
            ColumnData::Categorical(values) => {
                let mut distinct = values.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 2 {
                    warn!("column {name} has a single category; no conditions generated for it");
                    distinct.clear();
                }
                columns.push(ColumnCuts::Categorical(distinct));
            }
        }
    }
    CutPoints { columns }
}
