//! End-to-end orchestration: train the forecasting model, explain single
//! meter-months or the whole panel, and evaluate explainer fidelity and
//! accuracy against a held-out horizon.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::Datelike;
use log::{info, warn};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::data::{ingest, preprocess, DailySeries, PanelEntry, Rejection, SeriesPanel, TemperatureSeries};
use crate::error::{Error, Result};
use crate::eval::{
    average_importances, fit_linear_explainer, fit_tree_explainer, metrics, numeric_features,
    rule_set_predict, rule_usage_frequency, AveragedImportance, EvalRecord, Mode, TaskImportance,
};
use crate::gfm::{self, forecast_recursive, ForecastResult, GfmModels, TrainStats};
use crate::guidance::{classify_all, select_guidance, GuidanceReport};
use crate::miner::{mine_k_optimal, CellValue, ImpactRule, MinedRules, RuleTable};
use crate::neighborhood::{build_neighborhood, DtwConfig, Provenance};
use crate::report::{self, ResultRow};
use crate::surrogate::{
    derive_cutpoints, featurize_months, SurrogateInstance, SurrogateTable, FEATURE_NAMES,
};

/// Decision-tree explainer size knobs (fixed; not worth configuration).
const DT_MAX_DEPTH: usize = 4;
const DT_MIN_LEAF: usize = 20;

fn dtw_config(cfg: &RunConfig) -> DtwConfig {
    DtwConfig {
        band_radius: cfg.dtw_band,
        ..DtwConfig::default()
    }
}

fn log_rejections(rejections: &[Rejection]) {
    for r in rejections {
        warn!("meter {} excluded from panel: {}", r.meter_id, r.reason);
    }
}

fn long_model_path(out_dir: &Path) -> PathBuf {
    out_dir.join("model_long.tsv")
}

fn short_model_path(out_dir: &Path) -> PathBuf {
    out_dir.join("model_short.tsv")
}

/// What `run_train` did: panel size, per-group instance counts, and where the
/// model files went.
#[derive(Debug)]
pub struct TrainSummary {
    pub n_meters: usize,
    pub rejections: Vec<Rejection>,
    pub stats: TrainStats,
    pub model_files: Vec<PathBuf>,
}

/// Load the panel, fit one model per series-length group, and persist the
/// fitted models under the output directory.
pub fn run_train(cfg: &RunConfig) -> Result<TrainSummary> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    let started = Instant::now();
    let (panel, rejections) = ingest::load_panel::<f64>(&cfg.consumption, &cfg.temperature)?;
    log_rejections(&rejections);
    if panel.len() == 0 {
        return Err(Error::invalid("no usable meters in the input files"));
    }
    let (models, stats) = gfm::train_models(&panel, &cfg.gfm)?;
    let mut model_files = Vec::new();
    if let Some(model) = &models.long {
        let path = long_model_path(&cfg.out_dir);
        gfm::save_model(&path, model)?;
        model_files.push(path);
    }
    if let Some(model) = &models.short {
        let path = short_model_path(&cfg.out_dir);
        gfm::save_model(&path, model)?;
        model_files.push(path);
    }
    info!(
        "trained on {} meters ({} long / {} short instances) in {:.2?}",
        panel.len(),
        stats.long_instances,
        stats.short_instances,
        started.elapsed()
    );
    Ok(TrainSummary {
        n_meters: panel.len(),
        rejections,
        stats,
        model_files,
    })
}

/// Load whichever persisted models exist under `out_dir`.
pub fn load_models(out_dir: &Path) -> Result<GfmModels<f64>> {
    let mut models = GfmModels::default();
    let long = long_model_path(out_dir);
    if long.exists() {
        models.long = Some(gfm::load_model(&long)?);
    }
    let short = short_model_path(out_dir);
    if short.exists() {
        models.short = Some(gfm::load_model(&short)?);
    }
    if models.long.is_none() && models.short.is_none() {
        return Err(Error::invalid(format!(
            "no model files under {}; run train first",
            out_dir.display()
        )));
    }
    Ok(models)
}

/// Everything mined for one meter: the neighborhood feature table, the
/// k-optimal rules over it, and the meter's own forecast and features.
#[derive(Debug)]
pub struct MeterExplanation {
    pub meter_id: String,
    /// Mining table over the neighborhood (one row per member-month).
    pub table: RuleTable<f64>,
    pub rules: MinedRules<f64>,
    /// The explained meter's own feature rows, one per forecast month.
    pub origin_instances: Vec<SurrogateInstance<f64>>,
    pub origin_forecast: ForecastResult<f64>,
    /// (neighborhood CSV, feature-table CSV) when debug dumps are on.
    pub debug: Option<(String, String)>,
}

/// Build the neighborhood of a meter, forecast every member, assemble the
/// feature table, and mine its k-optimal impact rules.
pub fn explain_meter(
    panel: &SeriesPanel<f64>,
    models: &GfmModels<f64>,
    cfg: &RunConfig,
    meter_id: &str,
) -> Result<MeterExplanation> {
    let origin = panel.require(meter_id)?;
    let nb = build_neighborhood(
        panel,
        meter_id,
        cfg.n_filt,
        cfg.n_synthetic,
        cfg.seed,
        &dtw_config(cfg),
    )?;

    // Each parent's temperature extension is shared by all its replicates
    // (same span, same dates).
    let mut extensions: BTreeMap<String, TemperatureSeries<f64>> = BTreeMap::new();
    for member in &nb.members {
        let parent = member.provenance.parent_id(&member.series.meter_id);
        if !extensions.contains_key(parent) {
            let temps = &panel.require(parent)?.temperature;
            extensions.insert(
                parent.to_string(),
                preprocess::extend_temperature(temps, cfg.horizon)?,
            );
        }
    }

    let mut surrogate = SurrogateTable::new();
    for member in &nb.members {
        let parent = member.provenance.parent_id(&member.series.meter_id);
        let extended = &extensions[parent];
        let model = models.model_for(member.series.len(), &cfg.gfm)?;
        let forecast = forecast_recursive(model, &member.series, extended, cfg.horizon)?;
        let instances = featurize_months(&member.series, extended, &forecast, cfg.gfm.window)?;
        surrogate.push_member(member.provenance.clone(), instances);
    }

    let table = surrogate.to_rule_table()?;
    let cuts = derive_cutpoints(&table, cfg.bins);
    let rules = mine_k_optimal(&table, &cuts, &cfg.miner)?;

    let origin_ext = preprocess::extend_temperature(&origin.temperature, cfg.horizon)?;
    let origin_model = models.model_for(origin.consumption.len(), &cfg.gfm)?;
    let origin_forecast =
        forecast_recursive(origin_model, &origin.consumption, &origin_ext, cfg.horizon)?;
    let origin_instances =
        featurize_months(&origin.consumption, &origin_ext, &origin_forecast, cfg.gfm.window)?;

    let debug = cfg
        .debug_dumps
        .then(|| (nb.to_debug_csv(), surrogate.to_debug_csv()));
    Ok(MeterExplanation {
        meter_id: meter_id.to_string(),
        table,
        rules,
        origin_instances,
        origin_forecast,
        debug,
    })
}

/// Classify the mined rules against the meter's own features for one month
/// and pick the best rule per guidance type.
pub fn guidance_for_month(
    expl: &MeterExplanation,
    month: u32,
) -> Result<GuidanceReport<f64>> {
    let p = expl.origin_forecast.month_total(month)?;
    let inst = expl
        .origin_instances
        .iter()
        .find(|i| i.month == month)
        .ok_or_else(|| {
            let available: Vec<String> = expl
                .origin_instances
                .iter()
                .map(|i| i.month.to_string())
                .collect();
            Error::invalid(format!(
                "meter {}: no forecast days fall in month {month} (months with forecasts: {})",
                expl.meter_id,
                available.join(", ")
            ))
        })?;
    let cells = inst.cells();
    let classified = classify_all(expl.rules.iter_all(), &cells, &expl.table, p);
    Ok(select_guidance(expl.meter_id.clone(), month, p, classified))
}

fn require_meter(panel: &SeriesPanel<f64>, meter_id: &str) -> Result<()> {
    if panel.get(meter_id).is_some() {
        return Ok(());
    }
    let ids: Vec<&str> = panel.meter_ids().collect();
    Err(Error::invalid(format!(
        "unknown meter {meter_id}; valid ids: {}",
        ids.join(", ")
    )))
}

fn write_debug_dumps(cfg: &RunConfig, meter_id: &str, debug: &Option<(String, String)>) -> Result<()> {
    if let Some((neighborhood_csv, features_csv)) = debug {
        let dir = cfg.out_dir.join("debug");
        fs::create_dir_all(&dir)?;
        fs::write(dir.join(format!("{meter_id}_neighborhood.csv")), neighborhood_csv)?;
        fs::write(dir.join(format!("{meter_id}_features.csv")), features_csv)?;
    }
    Ok(())
}

#[derive(Debug)]
pub struct ExplainOutput {
    pub json_path: PathBuf,
    pub text_path: PathBuf,
}

/// Explain one meter-month: writes `guidance/{meter}_{month}.json` and the
/// matching `.txt` under the output directory.
pub fn run_explain(cfg: &RunConfig, meter_id: &str, month: u32) -> Result<ExplainOutput> {
    cfg.validate()?;
    if !(1..=12).contains(&month) {
        return Err(Error::invalid(format!("month {month} outside 1-12")));
    }
    let (panel, rejections) = ingest::load_panel::<f64>(&cfg.consumption, &cfg.temperature)?;
    log_rejections(&rejections);
    require_meter(&panel, meter_id)?;
    let models = load_models(&cfg.out_dir)?;

    let started = Instant::now();
    let expl = explain_meter(&panel, &models, cfg, meter_id)?;
    info!(
        "meter {meter_id}: neighborhood + mining took {:.2?} ({} rules)",
        started.elapsed(),
        expl.rules.positive.len() + expl.rules.negative.len()
    );
    let report_data = guidance_for_month(&expl, month)?;

    let dir = cfg.out_dir.join("guidance");
    fs::create_dir_all(&dir)?;
    let json_path = dir.join(format!("{meter_id}_{month:02}.json"));
    fs::write(
        &json_path,
        report::guidance_json_string(&report_data, &expl.table.column_names),
    )?;
    let text_path = dir.join(format!("{meter_id}_{month:02}.txt"));
    fs::write(
        &text_path,
        report::guidance_text_block(&report_data, &expl.table.column_names),
    )?;
    write_debug_dumps(cfg, meter_id, &expl.debug)?;
    Ok(ExplainOutput {
        json_path,
        text_path,
    })
}

#[derive(Debug)]
pub struct ExplainAllOutput {
    pub json_paths: Vec<PathBuf>,
    /// Combined plain-text report, one block per meter-month.
    pub text_path: PathBuf,
}

/// Explain every meter for every month its forecast covers. Meters run in
/// parallel; outputs are assembled in meter order so the result does not
/// depend on the worker count.
pub fn run_explain_all(cfg: &RunConfig) -> Result<ExplainAllOutput> {
    cfg.validate()?;
    let (panel, rejections) = ingest::load_panel::<f64>(&cfg.consumption, &cfg.temperature)?;
    log_rejections(&rejections);
    let models = load_models(&cfg.out_dir)?;
    let ids: Vec<String> = panel.meter_ids().map(String::from).collect();

    let started = Instant::now();
    struct MeterOutput {
        meter_id: String,
        /// (month, guidance JSON, text block) in month order.
        months: Vec<(u32, String, String)>,
        debug: Option<(String, String)>,
    }
    let per_meter: Vec<MeterOutput> = ids
        .par_iter()
        .map(|id| -> Result<MeterOutput> {
            let expl = explain_meter(&panel, &models, cfg, id)?;
            let mut months = Vec::new();
            for inst in &expl.origin_instances {
                let report_data = guidance_for_month(&expl, inst.month)?;
                months.push((
                    inst.month,
                    report::guidance_json_string(&report_data, &expl.table.column_names),
                    report::guidance_text_block(&report_data, &expl.table.column_names),
                ));
            }
            Ok(MeterOutput {
                meter_id: id.clone(),
                months,
                debug: expl.debug,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    info!(
        "explained {} meters in {:.2?}",
        per_meter.len(),
        started.elapsed()
    );

    let dir = cfg.out_dir.join("guidance");
    fs::create_dir_all(&dir)?;
    let mut json_paths = Vec::new();
    let mut combined = String::new();
    for meter in &per_meter {
        for (month, json, block) in &meter.months {
            let path = dir.join(format!("{}_{month:02}.json", meter.meter_id));
            fs::write(&path, json)?;
            json_paths.push(path);
            combined.push_str(block);
            combined.push('\n');
        }
        write_debug_dumps(cfg, &meter.meter_id, &meter.debug)?;
    }
    let text_path = cfg.out_dir.join("guidance.txt");
    fs::write(&text_path, combined)?;
    Ok(ExplainAllOutput {
        json_paths,
        text_path,
    })
}

/// Rebuild a panel entry from its first `keep` days (re-imputing nothing:
/// the entry is already gap-free, so only the scale is recomputed).
fn truncate_entry(entry: &PanelEntry<f64>, keep: usize) -> Result<PanelEntry<f64>> {
    let denorm = entry.consumption.denormalized();
    let consumption = preprocess::mean_scale(&DailySeries::raw(
        entry.consumption.meter_id.clone(),
        entry.consumption.start_date,
        denorm[..keep].to_vec(),
    ))?;
    let temperature = TemperatureSeries::new(
        entry.temperature.meter_id.clone(),
        entry.temperature.start_date,
        entry.temperature.mean_temp[..keep].to_vec(),
        entry.temperature.min_temp[..keep].to_vec(),
        entry.temperature.max_temp[..keep].to_vec(),
    )?;
    Ok(PanelEntry {
        consumption,
        temperature,
    })
}

/// Per-meter local-evaluation results: the meter's forecast-month instances,
/// the held-out actuals, and each explainer's predictions, row-aligned.
struct LocalMeterEval {
    instances: Vec<SurrogateInstance<f64>>,
    actuals: Vec<f64>,
    lr_preds: Vec<f64>,
    dt_preds: Vec<f64>,
    rule_preds: Vec<f64>,
    tasks: Vec<TaskImportance<f64>>,
}

/// Numeric view of the mining table (categorical codes as numbers), aligned
/// with [`numeric_features`].
fn table_numeric_rows(table: &RuleTable<f64>) -> Vec<Vec<f64>> {
    (0..table.n_rows())
        .map(|r| {
            table
                .row_cells(r)
                .iter()
                .map(|cell| match cell {
                    CellValue::Num(v) => *v,
                    CellValue::Cat(v) => f64::from(*v),
                })
                .collect()
        })
        .collect()
}

fn eval_meter_local(
    truncated: &SeriesPanel<f64>,
    full: &SeriesPanel<f64>,
    models: &GfmModels<f64>,
    cfg: &RunConfig,
    meter_id: &str,
) -> Result<LocalMeterEval> {
    let expl = explain_meter(truncated, models, cfg, meter_id)?;

    // Held-out actual kWh per calendar month.
    let full_entry = full.require(meter_id)?;
    let keep = truncated.require(meter_id)?.consumption.len();
    let denorm = full_entry.consumption.denormalized();
    let mut actual_by_month = [0.0f64; 12];
    for (i, v) in denorm[keep..].iter().enumerate() {
        let date = full_entry.consumption.start_date + chrono::Days::new((keep + i) as u64);
        actual_by_month[date.month0() as usize] += v;
    }

    // Local surrogates are fitted on the neighborhood table the rules were
    // mined from, so all three explainers see the same data.
    let rows = table_numeric_rows(&expl.table);
    let lr = fit_linear_explainer(&rows, &expl.table.targets)?;
    let dt = fit_tree_explainer(&rows, &expl.table.targets, DT_MAX_DEPTH, DT_MIN_LEAF)?;
    let rule_refs: Vec<&ImpactRule<f64>> = expl.rules.iter_all().collect();
    let fallback = expl.table.dataset_mean();

    let mut out = LocalMeterEval {
        instances: Vec::new(),
        actuals: Vec::new(),
        lr_preds: Vec::new(),
        dt_preds: Vec::new(),
        rule_preds: Vec::new(),
        tasks: Vec::new(),
    };
    for inst in &expl.origin_instances {
        let features = numeric_features(inst);
        let cells = inst.cells();
        out.lr_preds.push(lr.predict(&features));
        out.dt_preds.push(dt.predict(&features));
        out.rule_preds.push(rule_set_predict(&rule_refs, &cells, fallback));
        out.actuals.push(actual_by_month[(inst.month - 1) as usize]);
        let classified = classify_all(expl.rules.iter_all(), &cells, &expl.table, inst.target);
        out.tasks.push(TaskImportance {
            lr: lr.importance(),
            dt: dt.importance(),
            rules: rule_usage_frequency(&classified, FEATURE_NAMES.len()),
        });
        out.instances.push(*inst);
    }
    Ok(out)
}

#[derive(Debug)]
pub struct EvalOutput {
    pub results_path: PathBuf,
    pub importance_path: PathBuf,
    pub rows: Vec<ResultRow<f64>>,
    pub importance: AveragedImportance<f64>,
    /// Meter-month explanation tasks that fed the local averages.
    pub n_local_tasks: usize,
}

/// Hold out the last `horizon` days of every series, retrain the forecaster
/// on the rest, and score each explainer twice per scope: against the
/// forecaster it mimics (fidelity) and against the held-out observations
/// (accuracy).
pub fn run_eval(cfg: &RunConfig) -> Result<EvalOutput> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    let (full, rejections) = ingest::load_panel::<f64>(&cfg.consumption, &cfg.temperature)?;
    log_rejections(&rejections);

    // Truncate every series that can spare the holdout.
    let min_keep = cfg.gfm.window + 1;
    let mut truncated = SeriesPanel::new();
    for (id, entry) in full.iter() {
        let len = entry.consumption.len();
        if len < cfg.horizon + min_keep {
            warn!(
                "meter {id}: {len} days cannot cover a {}-day holdout plus the lag window; skipped",
                cfg.horizon
            );
            continue;
        }
        truncated.insert(truncate_entry(entry, len - cfg.horizon)?)?;
    }
    if truncated.len() <= cfg.n_filt {
        return Err(Error::invalid(format!(
            "only {} meters have enough history for evaluation; n_filt {} needs more",
            truncated.len(),
            cfg.n_filt
        )));
    }

    let started = Instant::now();
    let (models, stats) = gfm::train_models(&truncated, &cfg.gfm)?;
    info!(
        "eval forecaster trained in {:.2?} ({} long / {} short instances)",
        started.elapsed(),
        stats.long_instances,
        stats.short_instances
    );

    // Local scope: one neighborhood, one rule set, one LR and one DT per meter.
    let started = Instant::now();
    let ids: Vec<String> = truncated.meter_ids().map(String::from).collect();
    let locals: Vec<LocalMeterEval> = ids
        .par_iter()
        .map(|id| eval_meter_local(&truncated, &full, &models, cfg, id))
        .collect::<Result<Vec<_>>>()?;
    info!("local explainers evaluated in {:.2?}", started.elapsed());

    let mut lr_rec = Vec::new();
    let mut dt_rec = Vec::new();
    let mut rule_rec = Vec::new();
    let mut tasks = Vec::new();
    let mut global_pairs: Vec<(SurrogateInstance<f64>, f64)> = Vec::new();
    for local in locals {
        for i in 0..local.instances.len() {
            let gfm_forecast = local.instances[i].target;
            let actual = local.actuals[i];
            lr_rec.push(EvalRecord {
                explainer_prediction: local.lr_preds[i],
                gfm_forecast,
                actual,
            });
            dt_rec.push(EvalRecord {
                explainer_prediction: local.dt_preds[i],
                gfm_forecast,
                actual,
            });
            rule_rec.push(EvalRecord {
                explainer_prediction: local.rule_preds[i],
                gfm_forecast,
                actual,
            });
            global_pairs.push((local.instances[i], actual));
        }
        tasks.extend(local.tasks);
    }

    // Global scope: one surrogate of each kind over every meter's instances.
    let started = Instant::now();
    let global_rows: Vec<Vec<f64>> = global_pairs
        .iter()
        .map(|(inst, _)| numeric_features(inst).to_vec())
        .collect();
    let global_targets: Vec<f64> = global_pairs.iter().map(|(inst, _)| inst.target).collect();
    let global_lr = fit_linear_explainer(&global_rows, &global_targets)?;
    let global_dt = fit_tree_explainer(&global_rows, &global_targets, DT_MAX_DEPTH, DT_MIN_LEAF)?;
    let mut global_surrogate = SurrogateTable::new();
    global_surrogate.push_member(
        Provenance::Original,
        global_pairs.iter().map(|(inst, _)| *inst).collect(),
    );
    let global_table = global_surrogate.to_rule_table()?;
    let global_cuts = derive_cutpoints(&global_table, cfg.bins);
    let global_rules = mine_k_optimal(&global_table, &global_cuts, &cfg.miner)?;
    let global_rule_refs: Vec<&ImpactRule<f64>> = global_rules.iter_all().collect();
    let global_fallback = global_table.dataset_mean();

    let mut global_lr_rec = Vec::new();
    let mut global_dt_rec = Vec::new();
    let mut global_rule_rec = Vec::new();
    for (i, (inst, actual)) in global_pairs.iter().enumerate() {
        let gfm_forecast = inst.target;
        global_lr_rec.push(EvalRecord {
            explainer_prediction: global_lr.predict(&global_rows[i]),
            gfm_forecast,
            actual: *actual,
        });
        global_dt_rec.push(EvalRecord {
            explainer_prediction: global_dt.predict(&global_rows[i]),
            gfm_forecast,
            actual: *actual,
        });
        global_rule_rec.push(EvalRecord {
            explainer_prediction: rule_set_predict(&global_rule_refs, &inst.cells(), global_fallback),
            gfm_forecast,
            actual: *actual,
        });
    }
    info!("global explainers evaluated in {:.2?}", started.elapsed());

    let pools: [(&str, &str, &[EvalRecord<f64>]); 6] = [
        ("lr", "local", &lr_rec),
        ("dt", "local", &dt_rec),
        ("rules", "local", &rule_rec),
        ("lr", "global", &global_lr_rec),
        ("dt", "global", &global_dt_rec),
        ("rules", "global", &global_rule_rec),
    ];
    let mut rows = Vec::new();
    for (explainer, scope, records) in pools {
        for mode in [Mode::Fidelity, Mode::Accuracy] {
            rows.push(ResultRow {
                explainer: explainer.to_string(),
                scope: scope.to_string(),
                metric_mode: mode.as_str().to_string(),
                metrics: metrics(records, mode)?,
            });
        }
    }
    let importance = average_importances(&tasks, FEATURE_NAMES.len());

    let results_path = cfg.out_dir.join("results.csv");
    fs::write(&results_path, report::results_csv(&rows))?;
    let importance_path = cfg.out_dir.join("importance.csv");
    fs::write(&importance_path, report::importance_csv(&importance, &FEATURE_NAMES))?;
    Ok(EvalOutput {
        results_path,
        importance_path,
        rows,
        importance,
        n_local_tasks: tasks.len(),
    })
}
