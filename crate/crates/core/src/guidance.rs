//! Classify mined rules against one series' forecast and render guidance.
//!
//! For a rule with covered-target mean x̃ and covered-target population
//! standard deviation δ, and the series' monthly forecast p:
//!   * the LHS is "true" when every condition holds on the series' own
//!     feature values (current conditions) and "false" otherwise
//!     (hypothetical conditions);
//!   * the RHS is "true" when p − δ ≤ x̃ ≤ p + δ (closed band).
//! The six resulting cases map to guidance types G1–G6; per type the rule
//! with the largest |impact| is reported.

use log::debug;

use crate::error::{Error, Result};
use crate::miner::{covered_rows, lhs_holds_on_cells, CellValue, CondForm, Condition, ImpactRule, RuleTable};
use crate::num::{mean, population_std, Float};

/// Three-letter month names for rendering categorical month conditions.
pub const MONTH_ABBR: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

/// The six guidance cases: Current vs Hypothetical (LHS truth) crossed
/// with supporting / above-band / below-band (RHS relation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    CurrentSupporting,
    CurrentContradicting1,
    CurrentContradicting2,
    HypotheticallySupporting,
    HypotheticallyContradicting1,
    HypotheticallyContradicting2,
}

impl Quadrant {
    /// Index of the guidance slot (0 → G1 … 5 → G6).
    pub fn slot(self) -> usize {
        match self {
            Quadrant::CurrentSupporting => 0,
            Quadrant::CurrentContradicting1 => 1,
            Quadrant::CurrentContradicting2 => 2,
            Quadrant::HypotheticallySupporting => 3,
            Quadrant::HypotheticallyContradicting1 => 4,
            Quadrant::HypotheticallyContradicting2 => 5,
        }
    }

    pub fn label(self) -> &'static str {
        ["G1", "G2", "G3", "G4", "G5", "G6"][self.slot()]
    }
}

/// Map (LHS truth, x̃ vs the band [p−δ, p+δ]) to the quadrant. The band is
/// closed, so x̃ = p ± δ counts as supporting; with δ ≥ 0 exactly one case
/// applies.
pub fn quadrant_of<F: Float>(lhs_true: bool, x_tilde: F, p: F, delta: F) -> Quadrant {
    debug_assert!(delta >= F::zero());
    let above = x_tilde > p + delta;
    let below = x_tilde < p - delta;
    match (lhs_true, above, below) {
        (true, false, false) => Quadrant::CurrentSupporting,
        (true, true, _) => Quadrant::CurrentContradicting1,
        (true, _, true) => Quadrant::CurrentContradicting2,
        (false, false, false) => Quadrant::HypotheticallySupporting,
        (false, true, _) => Quadrant::HypotheticallyContradicting1,
        (false, _, true) => Quadrant::HypotheticallyContradicting2,
    }
}

/// A rule judged against one series' forecast.
#[derive(Debug, Clone)]
pub struct RuleClassification<F> {
    pub rule: ImpactRule<F>,
    pub lhs_true: bool,
    /// Mean forecast of the covered neighbors, kWh.
    pub x_tilde: F,
    /// Population standard deviation of the covered neighbors' forecasts.
    pub delta: F,
    pub rhs_true: bool,
    pub quadrant: Quadrant,
}

/// Classify one rule: recompute x̃ and δ from the covered rows of `table`,
/// test the LHS on the series' own feature cells, and place the rule.
/// Rules covering fewer than two rows have no defined spread and are
/// rejected.
pub fn classify_rule<F: Float>(
    rule: &ImpactRule<F>,
    origin_cells: &[CellValue<F>],
    table: &RuleTable<F>,
    p: F,
) -> Result<RuleClassification<F>> {
    let rows = covered_rows(&rule.lhs, table);
    if rows.len() < 2 {
        return Err(Error::InsufficientCoverage {
            needed: 2,
            got: rows.len(),
        });
    }
    let covered: Vec<F> = rows.iter().map(|&r| table.targets[r as usize]).collect();
    let x_tilde = mean(&covered);
    let delta = population_std(&covered);
    let lhs_true = lhs_holds_on_cells(&rule.lhs, origin_cells);
    let rhs_true = x_tilde >= p - delta && x_tilde <= p + delta;
    Ok(RuleClassification {
        rule: rule.clone(),
        lhs_true,
        x_tilde,
        delta,
        rhs_true,
        quadrant: quadrant_of(lhs_true, x_tilde, p, delta),
    })
}

/// Classify every rule, dropping those with insufficient coverage.
pub fn classify_all<'a, F: Float>(
    rules: impl IntoIterator<Item = &'a ImpactRule<F>>,
    origin_cells: &[CellValue<F>],
    table: &RuleTable<F>,
    p: F,
) -> Vec<RuleClassification<F>> {
    let mut out = Vec::new();
    for rule in rules {
        match classify_rule(rule, origin_cells, table, p) {
            Ok(c) => out.push(c),
            Err(e) => debug!("rule dropped from guidance: {e}"),
        }
    }
    out
}

/// The guidance for one series and month: per type, the best rule if any.
#[derive(Debug, Clone)]
pub struct GuidanceReport<F> {
    pub meter_id: String,
    pub target_month: u32,
    /// Monthly forecast being explained, kWh.
    pub p: F,
    /// Slot g holds the selected rule for guidance type G(g+1).
    pub entries: [Option<RuleClassification<F>>; 6],
}

/// Whether `a` is preferred over `b` within a guidance slot:
/// larger |impact|, then higher coverage, then fewer conditions.
fn preferred<F: Float>(a: &RuleClassification<F>, b: &RuleClassification<F>) -> bool {
    let (ia, ib) = (a.rule.impact.abs(), b.rule.impact.abs());
    if ia != ib {
        return ia > ib;
    }
    if a.rule.absolute_coverage != b.rule.absolute_coverage {
        return a.rule.absolute_coverage > b.rule.absolute_coverage;
    }
    a.rule.lhs.len() < b.rule.lhs.len()
}

/// Pick the best rule per quadrant. First-seen wins any remaining tie.
pub fn select_guidance<F: Float>(
    meter_id: String,
    target_month: u32,
    p: F,
    classified: Vec<RuleClassification<F>>,
) -> GuidanceReport<F> {
    let mut entries: [Option<RuleClassification<F>>; 6] = std::array::from_fn(|_| None);
    for c in classified {
        let slot = &mut entries[c.quadrant.slot()];
        match slot {
            Some(best) if !preferred(&c, best) => {}
            _ => *slot = Some(c),
        }
    }
    GuidanceReport {
        meter_id,
        target_month,
        p,
        entries,
    }
}

/// Human-readable feature name for the built-in surrogate columns.
pub fn display_feature(name: &str) -> &str {
    match name {
        "mean_cons" => "mean consumption",
        "max_cons" => "max consumption",
        "min_cons" => "min consumption",
        "temp" => "average temperature",
        other => other,
    }
}

fn feature_unit(name: &str) -> &'static str {
    match name {
        "mean_cons" | "max_cons" | "min_cons" => "kWh",
        "temp" => "°C",
        _ => "",
    }
}

/// Render one condition, e.g. `mean consumption > 14.74kWh`,
/// `5.95 < average temperature ≤ 6.01`, `month = Feb`.
pub fn render_condition<F: Float>(cond: &Condition<F>, column_names: &[String]) -> String {
    let raw = column_names[cond.column].as_str();
    let name = display_feature(raw);
    let unit = feature_unit(raw);
    match cond.form {
        CondForm::LessEq(c) => format!("{name} \u{2264} {:.2}{unit}", c.as_f64()),
        CondForm::Greater(c) => format!("{name} > {:.2}{unit}", c.as_f64()),
        CondForm::Range(a, b) => {
            format!("{:.2} < {name} \u{2264} {:.2}", a.as_f64(), b.as_f64())
        }
        CondForm::Equals(v) => {
            if raw == "month" && (1..=12).contains(&v) {
                format!("{name} = {}", MONTH_ABBR[(v - 1) as usize])
            } else {
                format!("{name} = {v}")
            }
        }
    }
}

/// Render a conjunction, conditions joined with ` & `.
pub fn render_lhs<F: Float>(lhs: &[Condition<F>], column_names: &[String]) -> String {
    lhs.iter()
        .map(|c| render_condition(c, column_names))
        .collect::<Vec<_>>()
        .join(" & ")
}

/// The marker used for a guidance slot with no qualifying rule.
pub const NO_RULE: &str = "no rule found";

/// Render the six guidance sentences; empty slots yield the marker.
pub fn render<F: Float>(report: &GuidanceReport<F>, column_names: &[String]) -> [String; 6] {
    std::array::from_fn(|slot| {
        let Some(entry) = &report.entries[slot] else {
            return NO_RULE.to_string();
        };
        let conds = render_lhs(&entry.rule.lhs, column_names);
        let p = report.p.as_f64();
        let magnitude = (entry.x_tilde - report.p).abs().as_f64();
        match slot {
            0 => format!(
                "Your predicted consumption is {p:.2}kWh. Because you have {conds}."
            ),
            1 => format!(
                "The conditions that currently exist that indicate an opportunity of \
                 an increased consumption by {magnitude:.2}kWh for the particular month \
                 are {conds}."
            ),
            2 => format!(
                "The conditions that currently exist that indicate an opportunity of \
                 a decreased consumption by {magnitude:.2}kWh for the particular month \
                 are {conds}."
            ),
            3 => format!(
                "The conditions that need to be satisfied to maintain the monthly \
                 predicted consumption would be {conds}."
            ),
            4 => format!(
                "If you have {conds} it will increase your consumption by {magnitude:.2}kWh."
            ),
            5 => format!(
                "To reduce your consumption by {magnitude:.2}kWh the conditions would \
                 be {conds}."
            ),
            _ => unreachable!(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::ColumnData;
    use proptest::prelude::*;

    fn surrogate_names() -> Vec<String> {
        ["mean_cons", "max_cons", "min_cons", "temp", "month"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn rule_with(lhs: Vec<Condition<f64>>, impact: f64, absolute_coverage: usize) -> ImpactRule<f64> {
        ImpactRule {
            lhs,
            coverage: absolute_coverage as f64 / 100.0,
            absolute_coverage,
            mean: 0.0,
            sum: 0.0,
            impact,
            dataset_mean: 0.0,
        }
    }

    fn classification(
        quadrant: Quadrant,
        rule: ImpactRule<f64>,
        x_tilde: f64,
        delta: f64,
    ) -> RuleClassification<f64> {
        RuleClassification {
            lhs_true: matches!(
                quadrant,
                Quadrant::CurrentSupporting
                    | Quadrant::CurrentContradicting1
                    | Quadrant::CurrentContradicting2
            ),
            rhs_true: matches!(
                quadrant,
                Quadrant::CurrentSupporting | Quadrant::HypotheticallySupporting
            ),
            quadrant,
            rule,
            x_tilde,
            delta,
        }
    }

    #[test]
    fn quadrants_cover_the_contingency_table() {
        use Quadrant::*;
        assert_eq!(quadrant_of(true, 10.0, 10.0, 1.0), CurrentSupporting);
        assert_eq!(quadrant_of(true, 12.0, 10.0, 1.0), CurrentContradicting1);
        assert_eq!(quadrant_of(true, 8.0, 10.0, 1.0), CurrentContradicting2);
        assert_eq!(quadrant_of(false, 10.0, 10.0, 1.0), HypotheticallySupporting);
        assert_eq!(quadrant_of(false, 12.0, 10.0, 1.0), HypotheticallyContradicting1);
        assert_eq!(quadrant_of(false, 8.0, 10.0, 1.0), HypotheticallyContradicting2);
        // Closed band: the exact edges support.
        assert_eq!(quadrant_of(true, 11.0, 10.0, 1.0), CurrentSupporting);
        assert_eq!(quadrant_of(true, 9.0, 10.0, 1.0), CurrentSupporting);
        // δ = 0 admits only x̃ = p.
        assert_eq!(quadrant_of(false, 10.0, 10.0, 0.0), HypotheticallySupporting);
        assert_eq!(
            quadrant_of(false, 10.0 + 1e-12, 10.0, 0.0),
            HypotheticallyContradicting1
        );
    }

    #[test]
    fn classify_recomputes_band_from_covered_targets() {
        // Covered targets {35, 45, 35, 45}: x̃ = 40, population σ = 5.
        // p = 50 → x̃ < p − δ → below-band branch.
        let table = RuleTable::new(
            vec!["x".into()],
            vec![ColumnData::Numeric(vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0])],
            vec![35.0, 45.0, 35.0, 45.0, 100.0, 100.0],
        )
        .unwrap();
        let lhs = vec![Condition {
            column: 0,
            form: CondForm::LessEq(0.5),
        }];
        let rule = crate::miner::evaluate_rule(&lhs, &table);
        // Origin satisfies the lhs → Current column.
        let c = classify_rule(&rule, &[CellValue::Num(0.0)], &table, 50.0).unwrap();
        assert_eq!(c.x_tilde, 40.0);
        assert_eq!(c.delta, 5.0);
        assert!(!c.rhs_true);
        assert_eq!(c.quadrant, Quadrant::CurrentContradicting2);
        // Origin violating the lhs lands in the Hypothetical column with
        // the same rhs branch.
        let h = classify_rule(&rule, &[CellValue::Num(2.0)], &table, 50.0).unwrap();
        assert_eq!(h.rhs_true, c.rhs_true);
        assert_eq!(h.quadrant, Quadrant::HypotheticallyContradicting2);
    }

    #[test]
    fn single_row_rules_are_rejected() {
        let table = RuleTable::new(
            vec!["x".into()],
            vec![ColumnData::Numeric(vec![0.0, 1.0, 1.0])],
            vec![1.0, 2.0, 3.0],
        )
        .unwrap();
        let lhs = vec![Condition {
            column: 0,
            form: CondForm::LessEq(0.5),
        }];
        let rule = crate::miner::evaluate_rule(&lhs, &table);
        let err = classify_rule(&rule, &[CellValue::Num(0.0)], &table, 1.0).unwrap_err();
        assert!(matches!(err, Error::InsufficientCoverage { needed: 2, got: 1 }));
        // classify_all silently drops it.
        let kept = classify_all([&rule], &[CellValue::Num(0.0)], &table, 1.0);
        assert!(kept.is_empty());
    }

    #[test]
    fn selection_prefers_impact_then_coverage_then_brevity() {
        let cond = |c: f64| Condition {
            column: 0,
            form: CondForm::Greater(c),
        };
        let cands = vec![
            classification(Quadrant::CurrentSupporting, rule_with(vec![cond(1.0)], 5.0, 10), 10.0, 1.0),
            classification(Quadrant::CurrentSupporting, rule_with(vec![cond(2.0)], 9.0, 10), 10.0, 1.0),
            // Same |impact| as the 9.0 rule but higher coverage → wins.
            classification(Quadrant::CurrentSupporting, rule_with(vec![cond(3.0)], -9.0, 20), 10.0, 1.0),
            // Same |impact| and coverage, longer lhs → loses.
            classification(
                Quadrant::CurrentSupporting,
                rule_with(vec![cond(4.0), Condition { column: 1, form: CondForm::Greater(0.0) }], 9.0, 20),
                10.0,
                1.0,
            ),
        ];
        let report = select_guidance("m".into(), 2, 10.0, cands);
        let best = report.entries[0].as_ref().unwrap();
        assert_eq!(best.rule.lhs[0].form, CondForm::Greater(3.0));
        for slot in 1..6 {
            assert!(report.entries[slot].is_none());
        }
    }

    #[test]
    fn selection_matches_linear_scan_oracle() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(0xABCD);
        let quadrants = [
            Quadrant::CurrentSupporting,
            Quadrant::CurrentContradicting1,
            Quadrant::CurrentContradicting2,
            Quadrant::HypotheticallySupporting,
            Quadrant::HypotheticallyContradicting1,
            Quadrant::HypotheticallyContradicting2,
        ];
        for _ in 0..50 {
            let cands: Vec<RuleClassification<f64>> = (0..rng.random_range(0..40))
                .map(|i| {
                    let q = quadrants[rng.random_range(0..6)];
                    let impact = (rng.random_range(-5..=5) as f64) * 2.5;
                    let cov = rng.random_range(2..30);
                    classification(
                        q,
                        rule_with(
                            vec![Condition { column: 0, form: CondForm::Greater(i as f64) }],
                            impact,
                            cov,
                        ),
                        10.0,
                        1.0,
                    )
                })
                .collect();
            let report = select_guidance("m".into(), 1, 10.0, cands.clone());
            for (slot, q) in quadrants.iter().enumerate() {
                // Oracle: linear scan keeping the first maximal element.
                let mut best: Option<&RuleClassification<f64>> = None;
                for c in cands.iter().filter(|c| c.quadrant == *q) {
                    if best.map_or(true, |b| preferred(c, b)) {
                        best = Some(c);
                    }
                }
                match (best, &report.entries[slot]) {
                    (None, None) => {}
                    (Some(w), Some(g)) => {
                        assert_eq!(w.rule.lhs, g.rule.lhs, "slot {slot}");
                    }
                    (w, g) => panic!("slot {slot}: oracle {w:?} vs selected {g:?}"),
                }
            }
        }
    }

    #[test]
    fn rendered_sentences_follow_the_templates() {
        let names = surrogate_names();
        let mk_report = |slot: usize, c: RuleClassification<f64>, p: f64| {
            let mut entries: [Option<RuleClassification<f64>>; 6] = std::array::from_fn(|_| None);
            entries[slot] = Some(c);
            GuidanceReport {
                meter_id: "m".into(),
                target_month: 2,
                p,
                entries,
            }
        };

        // Current supporting: the predicted level plus its stated cause.
        let g1 = classification(
            Quadrant::CurrentSupporting,
            rule_with(vec![Condition { column: 0, form: CondForm::Greater(14.74) }], 3.0, 5),
            568.93,
            20.0,
        );
        let lines = render(&mk_report(0, g1, 568.93), &names);
        assert_eq!(
            lines[0],
            "Your predicted consumption is 568.93kWh. Because you have mean consumption > 14.74kWh."
        );

        // Current contradicting, decrease: magnitude |x̃ − p| with a range condition.
        let g3 = classification(
            Quadrant::CurrentContradicting2,
            rule_with(vec![Condition { column: 3, form: CondForm::Range(5.95, 6.01) }], -8.0, 5),
            568.94 - 170.45,
            1.0,
        );
        let lines = render(&mk_report(2, g3, 568.94), &names);
        assert_eq!(
            lines[2],
            "The conditions that currently exist that indicate an opportunity of a decreased \
             consumption by 170.45kWh for the particular month are 5.95 < average temperature \u{2264} 6.01."
        );

        // Hypothetically supporting: conditions to maintain.
        let g4 = classification(
            Quadrant::HypotheticallySupporting,
            rule_with(
                vec![
                    Condition { column: 0, form: CondForm::Greater(14.74) },
                    Condition { column: 2, form: CondForm::Greater(2.88) },
                ],
                2.0,
                5,
            ),
            568.93,
            20.0,
        );
        let lines = render(&mk_report(3, g4, 568.93), &names);
        assert_eq!(
            lines[3],
            "The conditions that need to be satisfied to maintain the monthly predicted \
             consumption would be mean consumption > 14.74kWh & min consumption > 2.88kWh."
        );

        // Hypothetically contradicting, increase.
        let g5 = classification(
            Quadrant::HypotheticallyContradicting1,
            rule_with(
                vec![
                    Condition { column: 3, form: CondForm::Range(6.01, 6.31) },
                    Condition { column: 0, form: CondForm::Greater(14.74) },
                ],
                12.0,
                5,
            ),
            500.0 + 110.64,
            1.0,
        );
        let lines = render(&mk_report(4, g5, 500.0), &names);
        assert_eq!(
            lines[4],
            "If you have 6.01 < average temperature \u{2264} 6.31 & mean consumption > 14.74kWh \
             it will increase your consumption by 110.64kWh."
        );

        // Hypothetically contradicting, decrease.
        let g6 = classification(
            Quadrant::HypotheticallyContradicting2,
            rule_with(vec![Condition { column: 4, form: CondForm::Equals(2) }], -9.0, 5),
            500.0 - 216.6,
            1.0,
        );
        let lines = render(&mk_report(5, g6, 500.0), &names);
        assert_eq!(
            lines[5],
            "To reduce your consumption by 216.60kWh the conditions would be month = Feb."
        );
    }

    #[test]
    fn empty_report_renders_six_markers() {
        let report: GuidanceReport<f64> = GuidanceReport {
            meter_id: "m".into(),
            target_month: 1,
            p: 1.0,
            entries: std::array::from_fn(|_| None),
        };
        let lines = render(&report, &surrogate_names());
        assert!(lines.iter().all(|l| l == NO_RULE));
    }

    proptest! {
        /// Exactly one of the six quadrant predicates holds for any
        /// (lhs_true, x̃, p, δ ≥ 0), and it is the one quadrant_of picks.
        #[test]
        fn quadrant_predicates_partition(
            lhs_true in proptest::bool::ANY,
            x_tilde in -1e3f64..1e3,
            p in -1e3f64..1e3,
            delta in 0.0f64..100.0,
        ) {
            let in_band = p - delta <= x_tilde && x_tilde <= p + delta;
            let above = x_tilde > p + delta;
            let below = x_tilde < p - delta;
            let predicates = [
                lhs_true && in_band,
                lhs_true && above,
                lhs_true && below,
                !lhs_true && in_band,
                !lhs_true && above,
                !lhs_true && below,
            ];
            prop_assert_eq!(predicates.iter().filter(|&&b| b).count(), 1);
            let chosen = quadrant_of(lhs_true, x_tilde, p, delta).slot();
            prop_assert!(predicates[chosen]);
        }

        /// Flipping lhs_true moves between the Current and Hypothetical
        /// column without changing the band branch.
        #[test]
        fn lhs_flip_preserves_rhs_branch(
            x_tilde in -1e3f64..1e3,
            p in -1e3f64..1e3,
            delta in 0.0f64..100.0,
        ) {
            let current = quadrant_of(true, x_tilde, p, delta).slot();
            let hypothetical = quadrant_of(false, x_tilde, p, delta).slot();
            prop_assert_eq!(current + 3, hypothetical);
        }
    }
}
