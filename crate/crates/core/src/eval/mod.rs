//! Fidelity/accuracy evaluation of the explainers, plus the two baseline
//! explainers (penalized linear regression and a regression tree) they are
//! compared against.
//!
//! Fidelity measures how closely an explainer reproduces the forecasting
//! model's own predictions; accuracy measures both against the actually
//! observed consumption.

pub mod importance;
pub mod linear;
pub mod tree;

pub use importance::{average_importances, rule_usage_frequency, AveragedImportance, TaskImportance, RULE_TYPE_LABELS};
pub use linear::{fit_linear_explainer, fit_ridge_fixed, LinearExplainer};
pub use tree::{fit_tree_explainer, TreeExplainer};

use crate::error::{Error, Result};
use crate::miner::{lhs_holds_on_cells, CellValue, ImpactRule};
use crate::num::{mean, Float};
use crate::surrogate::SurrogateInstance;

/// One evaluation point: an explainer's prediction next to the forecasting
/// model's output and the observed value, all kWh for one (meter, month).
#[derive(Debug, Clone, Copy)]
pub struct EvalRecord<F> {
    pub explainer_prediction: F,
    pub gfm_forecast: F,
    pub actual: F,
}

/// What the predictions are judged against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Reference = the forecasting model's prediction.
    Fidelity,
    /// Reference = the observed value.
    Accuracy,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fidelity => "fidelity",
            Mode::Accuracy => "accuracy",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Metrics<F> {
    pub rae: F,
    pub rmse: F,
    pub mae: F,
}

/// Error metrics of the explainer predictions against the mode's reference.
/// RAE normalizes total absolute error by the total absolute deviation of
/// the reference from its own mean, so the mean-predictor scores exactly 1.
pub fn metrics<F: Float>(records: &[EvalRecord<F>], mode: Mode) -> Result<Metrics<F>> {
    if records.len() < 2 {
        return Err(Error::invalid("metrics need at least 2 records"));
    }
    let reference: Vec<F> = records
        .iter()
        .map(|r| match mode {
            Mode::Fidelity => r.gfm_forecast,
            Mode::Accuracy => r.actual,
        })
        .collect();
    let errors: Vec<F> = records
        .iter()
        .zip(&reference)
        .map(|(r, &y)| r.explainer_prediction - y)
        .collect();
    let n = F::from_count(records.len());
    let abs_sum: F = errors.iter().map(|e| e.abs()).sum();
    let sq_sum: F = errors.iter().map(|e| *e * *e).sum();
    let ref_mean = mean(&reference);
    let denom: F = reference.iter().map(|y| (*y - ref_mean).abs()).sum();
    if denom == F::zero() {
        return Err(Error::UndefinedRae);
    }
    Ok(Metrics {
        rae: abs_sum / denom,
        rmse: (sq_sum / n).sqrt(),
        mae: abs_sum / n,
    })
}

/// Point prediction of a rule set for one instance: the covered-target
/// mean of the highest-|impact| rule whose conditions hold on the
/// instance; when no rule applies, the fallback (table-wide target mean).
pub fn rule_set_predict<F: Float>(
    rules: &[&ImpactRule<F>],
    cells: &[CellValue<F>],
    fallback: F,
) -> F {
    let mut best: Option<&ImpactRule<F>> = None;
    for rule in rules {
        if !lhs_holds_on_cells(&rule.lhs, cells) {
            continue;
        }
        match best {
            Some(b) if rule.impact.abs() <= b.impact.abs() => {}
            _ => best = Some(rule),
        }
    }
    best.map_or(fallback, |r| r.mean)
}

/// Numeric feature row for the LR/DT baselines: the four numeric surrogate
/// features plus the month index treated as a number.
pub fn numeric_features<F: Float>(inst: &SurrogateInstance<F>) -> [F; 5] {
    [
        inst.mean_cons,
        inst.max_cons,
        inst.min_cons,
        inst.temp,
        F::cast(f64::from(inst.month)),
    ]
}
