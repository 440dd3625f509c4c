//! CSV ingest and panel assembly.
//!
//! Consumption files carry half-hourly readings (`meter_id,timestamp,kwh`,
//! empty kwh = missing); temperature files carry daily records
//! (`meter_id,date,mean_temp,min_temp,max_temp`). Meters failing any
//! preparation step are dropped from the panel with a logged reason rather
//! than failing the run.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime};
use serde::Deserialize;

use crate::data::preprocess::{aggregate_to_daily, prepare_entry};
use crate::data::{RawReadings, Rejection, SeriesPanel, TemperatureSeries};
use crate::error::{Error, Result};
use crate::num::Float;

#[derive(Debug, Deserialize)]
struct ConsumptionRow {
    meter_id: String,
    timestamp: String,
    kwh: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct TemperatureRow {
    meter_id: String,
    date: NaiveDate,
    mean_temp: f64,
    min_temp: f64,
    max_temp: f64,
}

fn parse_timestamp(s: &str) -> Result<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
        .map_err(|_| Error::invalid(format!("unparseable timestamp {s:?}")))
}

/// Read half-hourly consumption rows grouped into per-meter series.
/// Rows may appear in any order; they are sorted per meter by timestamp.
pub fn read_consumption<F: Float, R: Read>(reader: R) -> Result<Vec<RawReadings<F>>> {
    let mut csv = csv::Reader::from_reader(reader);
    let mut by_meter: BTreeMap<String, Vec<(NaiveDateTime, Option<F>)>> = BTreeMap::new();
    for row in csv.deserialize() {
        let row: ConsumptionRow = row?;
        let ts = parse_timestamp(&row.timestamp)?;
        by_meter
            .entry(row.meter_id)
            .or_default()
            .push((ts, row.kwh.map(F::cast)));
    }
    let mut out = Vec::with_capacity(by_meter.len());
    for (meter_id, mut rows) in by_meter {
        rows.sort_by_key(|(ts, _)| *ts);
        let (timestamps, values) = rows.into_iter().unzip();
        out.push(RawReadings::new(meter_id, timestamps, values)?);
    }
    Ok(out)
}

pub fn read_consumption_csv<F: Float>(path: &Path) -> Result<Vec<RawReadings<F>>> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    read_consumption(BufReader::new(file))
}

/// Read daily temperature rows grouped into per-meter series. Each meter's
/// dates must form a contiguous daily run after sorting.
pub fn read_temperature<F: Float, R: Read>(reader: R) -> Result<Vec<TemperatureSeries<F>>> {
    let mut csv = csv::Reader::from_reader(reader);
    let mut by_meter: BTreeMap<String, Vec<(NaiveDate, F, F, F)>> = BTreeMap::new();
    for row in csv.deserialize() {
        let row: TemperatureRow = row?;
        by_meter.entry(row.meter_id).or_default().push((
            row.date,
            F::cast(row.mean_temp),
            F::cast(row.min_temp),
            F::cast(row.max_temp),
        ));
    }
    let mut out = Vec::with_capacity(by_meter.len());
    for (meter_id, mut rows) in by_meter {
        rows.sort_by_key(|(d, ..)| *d);
        for pair in rows.windows(2) {
            let gap = (pair[1].0 - pair[0].0).num_days();
            if gap != 1 {
                return Err(Error::invalid(format!(
                    "meter {meter_id}: temperature dates not contiguous at {} -> {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        let start = rows[0].0;
        let mean = rows.iter().map(|r| r.1).collect();
        let min = rows.iter().map(|r| r.2).collect();
        let max = rows.iter().map(|r| r.3).collect();
        out.push(TemperatureSeries::new(meter_id, start, mean, min, max)?);
    }
    Ok(out)
}

pub fn read_temperature_csv<F: Float>(path: &Path) -> Result<Vec<TemperatureSeries<F>>> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    read_temperature(BufReader::new(file))
}

/// Assemble a panel from raw readings and temperature records: aggregate to
/// daily, impute, mean-scale, align temperature spans. Meters that cannot be
/// prepared are returned as rejections, not errors.
pub fn build_panel<F: Float>(
    readings: Vec<RawReadings<F>>,
    temps: Vec<TemperatureSeries<F>>,
) -> (SeriesPanel<F>, Vec<Rejection>) {
    let mut temp_by_meter: BTreeMap<String, TemperatureSeries<F>> = temps
        .into_iter()
        .map(|t| (t.meter_id.clone(), t))
        .collect();
    let mut panel = SeriesPanel::new();
    let mut rejections = Vec::new();
    let reject = |meter_id: &str, reason: String, rejections: &mut Vec<Rejection>| {
        log::warn!("excluding meter {meter_id}: {reason}");
        rejections.push(Rejection {
            meter_id: meter_id.to_string(),
            reason,
        });
    };

    for raw in readings {
        let meter_id = raw.meter_id.clone();
        let Some(temp) = temp_by_meter.remove(&meter_id) else {
            reject(&meter_id, "no temperature series".into(), &mut rejections);
            continue;
        };
        let prepared = aggregate_to_daily(&raw).and_then(|agg| prepare_entry(&agg, &temp));
        match prepared {
            Ok(entry) => {
                if let Err(e) = panel.insert(entry) {
                    reject(&meter_id, e.to_string(), &mut rejections);
                }
            }
            Err(e) => reject(&meter_id, e.to_string(), &mut rejections),
        }
    }
    // Temperature records with no matching consumption meter.
    for meter_id in temp_by_meter.into_keys() {
        reject(&meter_id, "no consumption series".into(), &mut rejections);
    }
    (panel, rejections)
}

/// Read both input files and build the panel.
pub fn load_panel<F: Float>(
    consumption_path: &Path,
    temperature_path: &Path,
) -> Result<(SeriesPanel<F>, Vec<Rejection>)> {
    let readings = read_consumption_csv(consumption_path)?;
    let temps = read_temperature_csv(temperature_path)?;
    Ok(build_panel(readings, temps))
}

/// Write half-hourly consumption rows (used by the synthetic generator and
/// tests). Values use shortest round-trip formatting so reads are lossless.
pub fn write_consumption_csv<F: Float>(path: &Path, readings: &[RawReadings<F>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "meter_id,timestamp,kwh")?;
    for r in readings {
        for (ts, v) in r.timestamps().iter().zip(r.values()) {
            match v {
                Some(v) => writeln!(
                    w,
                    "{},{},{}",
                    r.meter_id,
                    ts.format("%Y-%m-%dT%H:%M:%S"),
                    v
                )?,
                None => writeln!(w, "{},{},", r.meter_id, ts.format("%Y-%m-%dT%H:%M:%S"))?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Write daily temperature rows in the ingest schema.
pub fn write_temperature_csv<F: Float>(path: &Path, temps: &[TemperatureSeries<F>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "meter_id,date,mean_temp,min_temp,max_temp")?;
    for t in temps {
        for i in 0..t.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                t.meter_id,
                t.date_at(i),
                t.mean_temp[i],
                t.min_temp[i],
                t.max_temp[i]
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consumption_rows_parse_group_and_sort() {
        let csv = "meter_id,timestamp,kwh\n\
                   b,2017-01-01T00:30:00,0.5\n\
                   a,2017-01-01T00:00:00,1.0\n\
                   b,2017-01-01T00:00:00,\n\
                   a,2017-01-01T00:30:00,2.0\n";
        let readings: Vec<RawReadings<f64>> = read_consumption(csv.as_bytes()).unwrap();
        assert_eq!(readings.len(), 2);
        assert_eq!(readings[0].meter_id, "a");
        assert_eq!(readings[0].values(), &[Some(1.0), Some(2.0)]);
        assert_eq!(readings[1].meter_id, "b");
        assert_eq!(readings[1].values(), &[None, Some(0.5)]);
    }

    #[test]
    fn temperature_rows_require_contiguous_dates() {
        let good = "meter_id,date,mean_temp,min_temp,max_temp\n\
                    a,2017-01-02,5,4,6\n\
                    a,2017-01-01,5,4,6\n";
        let t: Vec<TemperatureSeries<f64>> = read_temperature(good.as_bytes()).unwrap();
        assert_eq!(t[0].len(), 2);
        assert_eq!(t[0].start_date, NaiveDate::from_ymd_opt(2017, 1, 1).unwrap());

        let gap = "meter_id,date,mean_temp,min_temp,max_temp\n\
                   a,2017-01-01,5,4,6\n\
                   a,2017-01-03,5,4,6\n";
        assert!(read_temperature::<f64, _>(gap.as_bytes()).is_err());
    }

    #[test]
    fn bad_timestamp_is_a_validation_error() {
        let csv = "meter_id,timestamp,kwh\na,yesterday,1.0\n";
        let err = read_consumption::<f64, _>(csv.as_bytes()).unwrap_err();
        assert_eq!(err.category(), crate::error::ErrorCategory::Validation);
    }

    #[test]
    fn panel_build_rejects_unpaired_and_degenerate_meters() {
        let date = NaiveDate::from_ymd_opt(2017, 1, 1).unwrap();
        let ts: Vec<_> = (0..4)
            .map(|i| date.and_hms_opt(i, 0, 0).unwrap())
            .collect();
        let good = RawReadings::new("good", ts.clone(), vec![Some(1.0f64); 4]).unwrap();
        let zero = RawReadings::new("zero", ts.clone(), vec![Some(0.0f64); 4]).unwrap();
        let orphan = RawReadings::new("orphan", ts, vec![Some(1.0f64); 4]).unwrap();
        let mk_temp = |id: &str| {
            TemperatureSeries::new(id, date, vec![5.0f64], vec![4.0], vec![6.0]).unwrap()
        };
        let (panel, rejections) = build_panel(
            vec![good, zero, orphan],
            vec![mk_temp("good"), mk_temp("zero"), mk_temp("stray")],
        );
        assert_eq!(panel.len(), 1);
        assert!(panel.get("good").is_some());
        let reasons: std::collections::BTreeMap<_, _> = rejections
            .iter()
            .map(|r| (r.meter_id.as_str(), r.reason.as_str()))
            .collect();
        assert!(reasons["zero"].contains("not positive"));
        assert_eq!(reasons["orphan"], "no temperature series");
        assert_eq!(reasons["stray"], "no consumption series");
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let date = NaiveDate::from_ymd_opt(2017, 6, 1).unwrap();
        let ts: Vec<_> = (0..3)
            .map(|i| date.and_hms_opt(0, 0, 0).unwrap() + chrono::Duration::minutes(30 * i))
            .collect();
        let vals = vec![Some(0.123456789012345f64), None, Some(7.25)];
        let readings = vec![RawReadings::new("m1", ts, vals.clone()).unwrap()];
        let cons_path = dir.path().join("c.csv");
        write_consumption_csv(&cons_path, &readings).unwrap();
        let back: Vec<RawReadings<f64>> = read_consumption_csv(&cons_path).unwrap();
        assert_eq!(back[0].values(), vals.as_slice());

        let temps = vec![TemperatureSeries::new(
            "m1",
            date,
            vec![5.123456789f64],
            vec![1.0],
            vec![9.0],
        )
        .unwrap()];
        let temp_path = dir.path().join("t.csv");
        write_temperature_csv(&temp_path, &temps).unwrap();
        let back: Vec<TemperatureSeries<f64>> = read_temperature_csv(&temp_path).unwrap();
        assert_eq!(back[0].mean_temp, temps[0].mean_temp);
    }
}
