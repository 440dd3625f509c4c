//! Preprocessing steps: daily aggregation, weekday-median imputation,
//! mean scaling, and temperature extension into the forecast horizon.

use crate::data::{weekday_index, DailyAggregate, DailySeries, RawReadings, TemperatureSeries};
use crate::error::{Error, Result};
use crate::num::{median, Float};

/// Sum half-hourly readings into daily totals.
///
/// The output spans every calendar day from the first to the last timestamp.
/// A day with no observed slots is `None`; a day observed on only some slots
/// is summed over the present slots and flagged partial (48 slots = complete).
pub fn aggregate_to_daily<F: Float>(raw: &RawReadings<F>) -> Result<DailyAggregate<F>> {
    if raw.is_empty() || raw.values().iter().all(Option::is_none) {
        return Err(Error::EmptySeries {
            meter_id: raw.meter_id.clone(),
        });
    }
    let timestamps = raw.timestamps();
    let start_date = timestamps[0].date();
    let end_date = timestamps[timestamps.len() - 1].date();
    let n_days = (end_date - start_date).num_days() as usize + 1;

    let mut sums = vec![F::zero(); n_days];
    let mut observed = vec![0usize; n_days];
    for (ts, v) in timestamps.iter().zip(raw.values()) {
        if let Some(v) = *v {
            let day = (ts.date() - start_date).num_days() as usize;
            sums[day] = sums[day] + v;
            observed[day] += 1;
        }
    }

    const SLOTS_PER_DAY: usize = 48;
    let values: Vec<Option<F>> = sums
        .iter()
        .zip(&observed)
        .map(|(&s, &n)| if n == 0 { None } else { Some(s) })
        .collect();
    let partial = observed
        .iter()
        .map(|&n| n > 0 && n < SLOTS_PER_DAY)
        .collect();

    Ok(DailyAggregate {
        meter_id: raw.meter_id.clone(),
        start_date,
        values,
        partial,
    })
}

/// Fill missing days with the median of observed values sharing the same
/// day-of-week; weekdays with no observations fall back to the median of
/// all observed values.
pub fn impute_seasonal<F: Float>(agg: &DailyAggregate<F>) -> Result<DailySeries<F>> {
    let mut by_weekday: [Vec<F>; 7] = Default::default();
    let mut all_observed = Vec::new();
    for (i, v) in agg.values.iter().enumerate() {
        if let Some(v) = *v {
            by_weekday[weekday_index(agg.date_at(i))].push(v);
            all_observed.push(v);
        }
    }
    if all_observed.is_empty() {
        return Err(Error::NoObservedValues {
            meter_id: agg.meter_id.clone(),
        });
    }
    let overall = median(&all_observed);
    let weekday_median: Vec<F> = by_weekday
        .iter()
        .map(|vals| if vals.is_empty() { overall } else { median(vals) })
        .collect();

    let values = agg
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v.unwrap_or_else(|| weekday_median[weekday_index(agg.date_at(i))]))
        .collect();
    DailySeries::new(agg.meter_id.clone(), agg.start_date, values, F::one(), false)
}

/// Divide the series by its mean, recording the divisor in `scale`.
pub fn mean_scale<F: Float>(series: &DailySeries<F>) -> Result<DailySeries<F>> {
    let m = crate::num::mean(&series.values);
    if !(m > F::zero()) {
        return Err(Error::NonPositiveMean {
            meter_id: series.meter_id.clone(),
            mean: m.as_f64(),
        });
    }
    let values: Vec<F> = series.values.iter().map(|&v| v / m).collect();
    DailySeries::new(
        series.meter_id.clone(),
        series.start_date,
        values,
        m * series.scale,
        true,
    )
}

/// Extend a temperature record `horizon_days` past its end by cyclically
/// repeating its most recent full year (or the whole record when shorter
/// than a year). Returns only the extension, starting the day after the
/// record ends.
pub fn extend_temperature<F: Float>(
    temps: &TemperatureSeries<F>,
    horizon_days: usize,
) -> Result<TemperatureSeries<F>> {
    let len = temps.len();
    if horizon_days > len {
        return Err(Error::HorizonExceedsHistory {
            horizon: horizon_days,
            len,
        });
    }
    let block = len.min(365);
    let block_start = len - block;
    let pick = |src: &[F]| -> Vec<F> {
        (0..horizon_days)
            .map(|d| src[block_start + d % block])
            .collect()
    };
    TemperatureSeries::new(
        temps.meter_id.clone(),
        temps.end_date() + chrono::Days::new(1),
        pick(&temps.mean_temp),
        pick(&temps.min_temp),
        pick(&temps.max_temp),
    )
}

/// Full single-meter preparation: impute gaps, then mean-scale, then trim the
/// temperature record to the consumption span. This is the path every meter
/// takes on its way into a panel.
pub fn prepare_entry<F: Float>(
    agg: &DailyAggregate<F>,
    temps: &TemperatureSeries<F>,
) -> Result<crate::data::PanelEntry<F>> {
    let imputed = impute_seasonal(agg)?;
    let scaled = mean_scale(&imputed)?;
    let temperature = temps.window(scaled.start_date, scaled.len())?;
    Ok(crate::data::PanelEntry {
        consumption: scaled,
        temperature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{NaiveDate, NaiveDateTime};

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn slot(date: NaiveDate, i: u32) -> NaiveDateTime {
        date.and_hms_opt(i / 2, (i % 2) * 30, 0).unwrap()
    }

    #[test]
    fn full_day_of_constant_slots_sums_to_total() {
        let date = d(2017, 3, 1);
        let ts: Vec<_> = (0..48).map(|i| slot(date, i)).collect();
        let vals = vec![Some(0.5f64); 48];
        let raw = RawReadings::new("m", ts, vals).unwrap();
        let agg = aggregate_to_daily(&raw).unwrap();
        assert_eq!(agg.len(), 1);
        assert_eq!(agg.values[0], Some(24.0));
        assert!(!agg.partial[0]);
    }

    #[test]
    fn day_with_no_observations_is_missing() {
        // Day 1 observed, day 2 all-missing slots, day 3 observed.
        let mut ts = Vec::new();
        let mut vals = Vec::new();
        for day in 0..3u64 {
            let date = d(2017, 3, 1) + chrono::Days::new(day);
            for i in 0..4 {
                ts.push(slot(date, i));
                vals.push(if day == 1 { None } else { Some(1.0f64) });
            }
        }
        let raw = RawReadings::new("m", ts, vals).unwrap();
        let agg = aggregate_to_daily(&raw).unwrap();
        assert_eq!(agg.values[0], Some(4.0));
        assert_eq!(agg.values[1], None);
        assert_eq!(agg.values[2], Some(4.0));
        assert!(agg.partial[0], "4 of 48 slots is a partial day");
    }

    #[test]
    fn aggregation_matches_per_day_oracle_under_random_missingness() {
        // 3 days of slots with deterministic pseudo-random values and ~20% gaps.
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        let mut ts = Vec::new();
        let mut vals: Vec<Option<f64>> = Vec::new();
        for day in 0..3u64 {
            let date = d(2017, 3, 1) + chrono::Days::new(day);
            for i in 0..48 {
                ts.push(slot(date, i));
                let u = next();
                vals.push(if u < 0.2 { None } else { Some(u) });
            }
        }
        // Independent oracle: fold per chunk of 48.
        let oracle: Vec<Option<f64>> = vals
            .chunks(48)
            .map(|day| {
                let present: Vec<f64> = day.iter().flatten().copied().collect();
                if present.is_empty() {
                    None
                } else {
                    Some(present.iter().sum())
                }
            })
            .collect();
        let raw = RawReadings::new("m", ts, vals).unwrap();
        let agg = aggregate_to_daily(&raw).unwrap();
        for (got, want) in agg.values.iter().zip(&oracle) {
            match (got, want) {
                (Some(g), Some(w)) => assert!((g - w).abs() < 1e-12),
                (None, None) => {}
                _ => panic!("presence mismatch"),
            }
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        let raw = RawReadings::<f64>::new("m", vec![], vec![]).unwrap();
        assert!(matches!(
            aggregate_to_daily(&raw),
            Err(Error::EmptySeries { .. })
        ));
    }

    #[test]
    fn imputation_uses_weekday_median() {
        // 2017-01-02 is a Monday. Four Mondays: observed {2, 4, 6}, one missing.
        let start = d(2017, 1, 2);
        let mut values: Vec<Option<f64>> = vec![Some(1.0); 28];
        values[0] = Some(2.0);
        values[7] = Some(4.0);
        values[14] = Some(6.0);
        values[21] = None; // the missing Monday
        let agg = DailyAggregate {
            meter_id: "m".into(),
            start_date: start,
            values,
            partial: vec![false; 28],
        };
        let filled = impute_seasonal(&agg).unwrap();
        assert_eq!(filled.values[21], 4.0);
    }

    #[test]
    fn imputation_falls_back_to_overall_median() {
        // One week; the single Saturday is missing, so no Saturday observations
        // exist and the overall median fills it.
        let start = d(2017, 1, 2); // Monday
        let values: Vec<Option<f64>> = vec![
            Some(1.0),
            Some(2.0),
            Some(3.0),
            Some(4.0),
            Some(5.0),
            None, // Saturday
            Some(6.0),
        ];
        let agg = DailyAggregate {
            meter_id: "m".into(),
            start_date: start,
            values,
            partial: vec![false; 7],
        };
        let filled = impute_seasonal(&agg).unwrap();
        assert_eq!(filled.values[5], 3.5);
    }

    #[test]
    fn imputation_matches_weekday_grouping_oracle() {
        // 30 days with 5 gaps; oracle groups observations by weekday by hand.
        let start = d(2017, 5, 1);
        let mut state = 999u64;
        let mut next = move || {
            state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            ((state >> 33) % 1000) as f64 / 100.0
        };
        let mut values: Vec<Option<f64>> = (0..30).map(|_| Some(next())).collect();
        for gap in [3usize, 9, 16, 22, 28] {
            values[gap] = None;
        }
        let agg = DailyAggregate {
            meter_id: "m".into(),
            start_date: start,
            values: values.clone(),
            partial: vec![false; 30],
        };
        let filled = impute_seasonal(&agg).unwrap();

        // Oracle: group observed values by weekday, take medians.
        let mut groups: [Vec<f64>; 7] = Default::default();
        for (i, v) in values.iter().enumerate() {
            if let Some(v) = v {
                groups[weekday_index(start + chrono::Days::new(i as u64))].push(*v);
            }
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_none() {
                let wd = weekday_index(start + chrono::Days::new(i as u64));
                let mut g = groups[wd].clone();
                g.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let want = if g.len() % 2 == 1 {
                    g[g.len() / 2]
                } else {
                    (g[g.len() / 2 - 1] + g[g.len() / 2]) / 2.0
                };
                assert!((filled.values[i] - want).abs() < 1e-12, "day {i}");
            }
        }
    }

    #[test]
    fn imputation_is_idempotent_on_complete_series() {
        let start = d(2017, 1, 2);
        let values: Vec<Option<f64>> = (0..14).map(|i| Some(i as f64 + 1.0)).collect();
        let agg = DailyAggregate {
            meter_id: "m".into(),
            start_date: start,
            values,
            partial: vec![false; 14],
        };
        let filled = impute_seasonal(&agg).unwrap();
        assert_eq!(filled.values, (0..14).map(|i| i as f64 + 1.0).collect::<Vec<_>>());
    }

    #[test]
    fn mean_scale_example_and_round_trip() {
        let s = DailySeries::raw("m", d(2017, 1, 1), vec![2.0f64, 4.0, 6.0]);
        let n = mean_scale(&s).unwrap();
        assert_eq!(n.values, vec![0.5, 1.0, 1.5]);
        assert_eq!(n.scale, 4.0);
        assert!(n.normalized);
        for (orig, back) in s.values.iter().zip(n.denormalized()) {
            assert!(((orig - back) / orig).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_scale_rejects_zero_series() {
        let s = DailySeries::raw("m", d(2017, 1, 1), vec![0.0f64, 0.0]);
        assert!(matches!(
            mean_scale(&s),
            Err(Error::NonPositiveMean { .. })
        ));
    }

    #[test]
    fn constant_series_normalizes_to_ones() {
        let s = DailySeries::raw("m", d(2017, 1, 1), vec![3.3f64; 9]);
        let n = mean_scale(&s).unwrap();
        assert!(n.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    fn temps_1_to(n: usize) -> TemperatureSeries<f64> {
        let mean: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let min: Vec<f64> = mean.iter().map(|v| v - 1.0).collect();
        let max: Vec<f64> = mean.iter().map(|v| v + 1.0).collect();
        TemperatureSeries::new("m", d(2017, 1, 1), mean, min, max).unwrap()
    }

    #[test]
    fn extend_full_year_repeats_history_verbatim() {
        let t = temps_1_to(365);
        let ext = extend_temperature(&t, 365).unwrap();
        assert_eq!(ext.mean_temp, t.mean_temp);
        assert_eq!(ext.start_date, d(2018, 1, 1));
    }

    #[test]
    fn extend_one_day_takes_first_day_of_cycle() {
        let t = temps_1_to(365);
        let ext = extend_temperature(&t, 1).unwrap();
        assert_eq!(ext.mean_temp, vec![1.0]);
    }

    #[test]
    fn extend_uses_most_recent_year_of_longer_history() {
        let t = temps_1_to(400);
        let ext = extend_temperature(&t, 365).unwrap();
        // Index oracle: output day d = history day (len - 365 + d).
        for day in 0..365 {
            assert_eq!(ext.mean_temp[day], t.mean_temp[400 - 365 + day], "day {day}");
        }
    }

    #[test]
    fn extend_rejects_horizon_beyond_history() {
        let t = temps_1_to(100);
        assert!(matches!(
            extend_temperature(&t, 101),
            Err(Error::HorizonExceedsHistory { .. })
        ));
    }
}
