//! Output serialization: JSON views of rules and guidance reports, the
//! evaluation results CSV, the feature-importance CSV, and the plain-text
//! guidance block.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eval::{AveragedImportance, Metrics, RULE_TYPE_LABELS};
use crate::guidance::{render, GuidanceReport};
use crate::miner::{CondForm, Condition, ImpactRule};
use crate::num::Float;

/// One rule condition. Numeric intervals read `low < x <= high`, with the
/// absent side open: `le` sets only `high`, `gt` only `low`, `range` both.
/// `eq` (categorical) stores the category in both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub feature: String,
    pub form: String,
    pub low: Option<f64>,
    pub high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleJson {
    pub lhs: Vec<ConditionJson>,
    pub coverage: f64,
    pub absolute_coverage: usize,
    pub mean: f64,
    pub sum: f64,
    pub impact: f64,
}

pub fn condition_to_json<F: Float>(cond: &Condition<F>, column_names: &[String]) -> ConditionJson {
    let (form, low, high) = match cond.form {
        CondForm::LessEq(c) => ("le", None, Some(c.as_f64())),
        CondForm::Range(lo, hi) => ("range", Some(lo.as_f64()), Some(hi.as_f64())),
        CondForm::Greater(c) => ("gt", Some(c.as_f64()), None),
        CondForm::Equals(v) => ("eq", Some(f64::from(v)), Some(f64::from(v))),
    };
    ConditionJson {
        feature: column_names[cond.column].clone(),
        form: form.to_string(),
        low,
        high,
    }
}

pub fn rule_to_json<F: Float>(rule: &ImpactRule<F>, column_names: &[String]) -> RuleJson {
    RuleJson {
        lhs: rule
            .lhs
            .iter()
            .map(|c| condition_to_json(c, column_names))
            .collect(),
        coverage: rule.coverage.as_f64(),
        absolute_coverage: rule.absolute_coverage,
        mean: rule.mean.as_f64(),
        sum: rule.sum.as_f64(),
        impact: rule.impact.as_f64(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidanceEntryJson {
    pub rule: RuleJson,
    /// Mean forecast of the covered neighbors, kWh.
    pub x_tilde: f64,
    /// Population standard deviation of those forecasts.
    pub delta: f64,
    pub text: String,
}

/// JSON view of one meter-month report. `guidance` always carries all six
/// keys G1..G6; an unfilled guidance type maps to null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidanceJson {
    pub meter_id: String,
    pub month: u32,
    pub p_kwh: f64,
    pub guidance: BTreeMap<String, Option<GuidanceEntryJson>>,
}

pub fn guidance_to_json<F: Float>(
    report: &GuidanceReport<F>,
    column_names: &[String],
) -> GuidanceJson {
    let sentences = render(report, column_names);
    let mut guidance = BTreeMap::new();
    for slot in 0..6 {
        let entry = report.entries[slot].as_ref().map(|c| GuidanceEntryJson {
            rule: rule_to_json(&c.rule, column_names),
            x_tilde: c.x_tilde.as_f64(),
            delta: c.delta.as_f64(),
            text: sentences[slot].clone(),
        });
        guidance.insert(format!("G{}", slot + 1), entry);
    }
    GuidanceJson {
        meter_id: report.meter_id.clone(),
        month: report.target_month,
        p_kwh: report.p.as_f64(),
        guidance,
    }
}

pub fn guidance_json_string<F: Float>(
    report: &GuidanceReport<F>,
    column_names: &[String],
) -> String {
    let mut text = serde_json::to_string_pretty(&guidance_to_json(report, column_names))
        .expect("guidance JSON serialization cannot fail");
    text.push('\n');
    text
}

/// Human-readable block for one meter-month: a header line followed by the
/// six guidance sentences (or the no-rule marker) in slot order.
pub fn guidance_text_block<F: Float>(
    report: &GuidanceReport<F>,
    column_names: &[String],
) -> String {
    let sentences = render(report, column_names);
    let mut out = format!(
        "meter {} month {}: predicted {:.2} kWh\n",
        report.meter_id,
        report.target_month,
        report.p.as_f64()
    );
    for (slot, sentence) in sentences.iter().enumerate() {
        out.push_str(&format!("  G{}: {sentence}\n", slot + 1));
    }
    out
}

/// One row of the evaluation results table.
#[derive(Debug, Clone)]
pub struct ResultRow<F> {
    pub explainer: String,
    pub scope: String,
    pub metric_mode: String,
    pub metrics: Metrics<F>,
}

pub fn results_csv<F: Float>(rows: &[ResultRow<F>]) -> String {
    let mut out = String::from("explainer,scope,metric_mode,rae,rmse,mae\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6}\n",
            row.explainer,
            row.scope,
            row.metric_mode,
            row.metrics.rae.as_f64(),
            row.metrics.rmse.as_f64(),
            row.metrics.mae.as_f64()
        ));
    }
    out
}

pub fn importance_csv<F: Float>(avg: &AveragedImportance<F>, feature_names: &[&str]) -> String {
    fn emit<F: Float>(out: &mut String, label: &str, names: &[&str], scores: &[F]) {
        debug_assert_eq!(names.len(), scores.len());
        for (name, score) in names.iter().zip(scores) {
            out.push_str(&format!("{label},{name},{:.6}\n", score.as_f64()));
        }
    }
    let mut out = String::from("explainer_or_ruletype,feature,score\n");
    emit(&mut out, "lr", feature_names, &avg.lr);
    emit(&mut out, "dt", feature_names, &avg.dt);
    for (ty, label) in RULE_TYPE_LABELS.iter().enumerate() {
        emit(&mut out, label, feature_names, &avg.rules[ty]);
    }
    out
}
