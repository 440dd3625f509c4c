//! Feature-importance views of the three explainers, and their averaging
//! across explanation tasks for panel-level tables.
//!
//! LR importance is |standardized coefficient|; DT importance is total
//! squared-error reduction per feature; the rule-set importance is, per
//! rule type, the fraction of that type's rules whose conditions mention
//! the feature.

use crate::guidance::{Quadrant, RuleClassification};
use crate::num::Float;

/// CSV labels of the four rule types (the two contradicting directions
/// share a type, as do their hypothetical counterparts).
pub const RULE_TYPE_LABELS: [&str; 4] = [
    "rules_current_supporting",
    "rules_current_contradicting",
    "rules_hypothetical_supporting",
    "rules_hypothetical_contradicting",
];

/// Map a quadrant to its rule type (index into `RULE_TYPE_LABELS`).
pub fn rule_type_index(quadrant: Quadrant) -> usize {
    match quadrant {
        Quadrant::CurrentSupporting => 0,
        Quadrant::CurrentContradicting1 | Quadrant::CurrentContradicting2 => 1,
        Quadrant::HypotheticallySupporting => 2,
        Quadrant::HypotheticallyContradicting1 | Quadrant::HypotheticallyContradicting2 => 3,
    }
}

/// Per rule type, the fraction of rules mentioning each feature; `None`
/// rows mark types with no rules at all (so averaging can skip them).
pub fn rule_usage_frequency<F: Float>(
    classified: &[RuleClassification<F>],
    n_features: usize,
) -> [Vec<Option<F>>; 4] {
    let mut counts: [Vec<usize>; 4] = std::array::from_fn(|_| vec![0usize; n_features]);
    let mut totals = [0usize; 4];
    for c in classified {
        let ty = rule_type_index(c.quadrant);
        totals[ty] += 1;
        for cond in &c.rule.lhs {
            counts[ty][cond.column] += 1;
        }
    }
    std::array::from_fn(|ty| {
        if totals[ty] == 0 {
            return vec![None; n_features];
        }
        let total = F::from_count(totals[ty]);
        counts[ty]
            .iter()
            .map(|&c| Some(F::from_count(c) / total))
            .collect()
    })
}

/// Importances produced by one explanation task.
#[derive(Debug, Clone)]
pub struct TaskImportance<F> {
    pub lr: Vec<F>,
    pub dt: Vec<F>,
    pub rules: [Vec<Option<F>>; 4],
}

/// Task importances averaged for the panel-level table.
#[derive(Debug, Clone)]
pub struct AveragedImportance<F> {
    pub lr: Vec<F>,
    pub dt: Vec<F>,
    pub rules: [Vec<F>; 4],
}

/// Element-wise averages. LR/DT average over all tasks; rule frequencies
/// average over the tasks where the rule type actually occurred, and a
/// type that never occurred scores 0.
pub fn average_importances<F: Float>(
    tasks: &[TaskImportance<F>],
    n_features: usize,
) -> AveragedImportance<F> {
    let mut lr = vec![F::zero(); n_features];
    let mut dt = vec![F::zero(); n_features];
    let mut rules: [Vec<F>; 4] = std::array::from_fn(|_| vec![F::zero(); n_features]);
    let mut rule_counts = [0usize; 4];
    for task in tasks {
        for j in 0..n_features {
            lr[j] = lr[j] + task.lr[j];
            dt[j] = dt[j] + task.dt[j];
        }
        for ty in 0..4 {
            if task.rules[ty][0].is_some() {
                rule_counts[ty] += 1;
                for j in 0..n_features {
                    rules[ty][j] = rules[ty][j] + task.rules[ty][j].unwrap();
                }
            }
        }
    }
    if !tasks.is_empty() {
        let n = F::from_count(tasks.len());
        for j in 0..n_features {
            lr[j] = lr[j] / n;
            dt[j] = dt[j] / n;
        }
    }
    for ty in 0..4 {
        if rule_counts[ty] > 0 {
            let n = F::from_count(rule_counts[ty]);
            for j in 0..n_features {
                rules[ty][j] = rules[ty][j] / n;
            }
        }
    }
    AveragedImportance { lr, dt, rules }
}
