//! Impact rules over a tabular view of the neighborhood.
//!
//! A rule is a conjunction of per-feature conditions (at most one per
//! feature). Its statistics over a table with targets t_i and table-wide
//! target mean μ are:
//!   coverage          fraction of rows satisfying the conjunction
//!   absolute_coverage count of those rows
//!   sum / mean        target total / average over covered rows
//!   impact            sum − μ·absolute_coverage
//! Impact measures how much the covered targets deviate from what an
//! equally-sized random subset would contribute — a rule covering
//! everything, or covering a μ-average subset, has impact 0.

pub mod search;

use crate::error::{Error, Result};
use crate::num::Float;

pub use search::{mine_k_optimal, MinedRules};

/// One column of the mining table.
#[derive(Debug, Clone)]
pub enum ColumnData<F> {
    Numeric(Vec<F>),
    Categorical(Vec<u32>),
}

impl<F> ColumnData<F> {
    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }
}

/// A single cell, numeric or categorical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellValue<F> {
    Num(F),
    Cat(u32),
}

/// Column-major table the miner and the baseline explainers read.
#[derive(Debug, Clone)]
pub struct RuleTable<F> {
    pub column_names: Vec<String>,
    pub columns: Vec<ColumnData<F>>,
    pub targets: Vec<F>,
}

impl<F: Float> RuleTable<F> {
    pub fn new(
        column_names: Vec<String>,
        columns: Vec<ColumnData<F>>,
        targets: Vec<F>,
    ) -> Result<Self> {
        if column_names.len() != columns.len() {
            return Err(Error::invalid("column name/data count mismatch"));
        }
        if targets.is_empty() {
            return Err(Error::invalid("mining table has no rows"));
        }
        for (name, col) in column_names.iter().zip(&columns) {
            if col.len() != targets.len() {
                return Err(Error::invalid(format!(
                    "column {name} has {} rows but the table has {}",
                    col.len(),
                    targets.len()
                )));
            }
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("non-finite target in mining table"));
        }
        Ok(RuleTable {
            column_names,
            columns,
            targets,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    /// Table-wide target mean μ.
    pub fn dataset_mean(&self) -> F {
        crate::num::mean(&self.targets)
    }

    pub fn cell(&self, row: usize, column: usize) -> CellValue<F> {
        match &self.columns[column] {
            ColumnData::Numeric(v) => CellValue::Num(v[row]),
            ColumnData::Categorical(v) => CellValue::Cat(v[row]),
        }
    }

    /// All cells of one row, in column order.
    pub fn row_cells(&self, row: usize) -> Vec<CellValue<F>> {
        (0..self.n_columns()).map(|c| self.cell(row, c)).collect()
    }
}

/// The form of a single condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CondForm<F> {
    /// x ≤ c
    LessEq(F),
    /// c1 < x ≤ c2
    Range(F, F),
    /// x > c
    Greater(F),
    /// categorical equality
    Equals(u32),
}

/// A condition on one table column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition<F> {
    pub column: usize,
    pub form: CondForm<F>,
}

impl<F: Float> Condition<F> {
    /// Whether the condition holds on a cell of its column.
    pub fn holds(&self, cell: &CellValue<F>) -> bool {
        match (&self.form, cell) {
            (CondForm::LessEq(c), CellValue::Num(x)) => *x <= *c,
            (CondForm::Range(c1, c2), CellValue::Num(x)) => *x > *c1 && *x <= *c2,
            (CondForm::Greater(c), CellValue::Num(x)) => *x > *c,
            (CondForm::Equals(m), CellValue::Cat(x)) => *x == *m,
            _ => {
                debug_assert!(false, "condition form does not match cell kind");
                false
            }
        }
    }
}

/// Whether every condition of a conjunction holds on a row of cells
/// (cells in table column order).
pub fn lhs_holds_on_cells<F: Float>(lhs: &[Condition<F>], cells: &[CellValue<F>]) -> bool {
    lhs.iter().all(|c| c.holds(&cells[c.column]))
}

/// Rows (ascending) on which the whole conjunction holds.
pub fn covered_rows<F: Float>(lhs: &[Condition<F>], table: &RuleTable<F>) -> Vec<u32> {
    (0..table.n_rows() as u32)
        .filter(|&r| {
            lhs.iter()
                .all(|c| c.holds(&table.cell(r as usize, c.column)))
        })
        .collect()
}

/// Search budget for the miner.
#[derive(Debug, Clone)]
pub struct MinerConfig<F> {
    /// Rules kept per sign.
    pub k: usize,
    /// Maximum conditions per rule.
    pub max_len: usize,
    /// Minimum coverage fraction a rule must reach.
    pub min_coverage: F,
}

impl<F: Float> Default for MinerConfig<F> {
    fn default() -> Self {
        MinerConfig {
            k: 5,
            max_len: 3,
            min_coverage: F::cast(0.05),
        }
    }
}

impl<F: Float> MinerConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.max_len == 0 {
            return Err(Error::invalid("max_len must be at least 1"));
        }
        if !(self.min_coverage > F::zero() && self.min_coverage <= F::one()) {
            return Err(Error::invalid("min_coverage must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// A mined rule with its statistics.
#[derive(Debug, Clone)]
pub struct ImpactRule<F> {
    pub lhs: Vec<Condition<F>>,
    pub coverage: F,
    pub absolute_coverage: usize,
    pub mean: F,
    pub sum: F,
    pub impact: F,
    /// μ: the table-wide target mean the impact was computed against.
    pub dataset_mean: F,
}

/// Evaluate a conjunction's statistics over the table. A zero-coverage rule
/// gets mean 0 and impact 0 (never emitted by the search, but well-defined).
pub fn evaluate_rule<F: Float>(lhs: &[Condition<F>], table: &RuleTable<F>) -> ImpactRule<F> {
    let mu = table.dataset_mean();
    let rows = covered_rows(lhs, table);
    rule_from_rows(lhs.to_vec(), &rows, table, mu)
}

/// Build the statistics for a known covered-row set (ascending order; the
/// float fold order is part of the determinism contract).
pub(crate) fn rule_from_rows<F: Float>(
    lhs: Vec<Condition<F>>,
    rows: &[u32],
    table: &RuleTable<F>,
    mu: F,
) -> ImpactRule<F> {
    let abs = rows.len();
    let sum: F = rows.iter().map(|&r| table.targets[r as usize]).sum();
    let mean = if abs == 0 {
        F::zero()
    } else {
        sum / F::from_count(abs)
    };
    let impact = sum - mu * F::from_count(abs);
    ImpactRule {
        lhs,
        coverage: F::from_count(abs) / F::from_count(table.n_rows()),
        absolute_coverage: abs,
        mean,
        sum,
        impact,
        dataset_mean: mu,
    }
}

/// Search direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

/// Admissible optimistic bound for refinements of a partial rule: the best
/// impact any refinement (which can only shrink the covered set) could
/// reach. For the positive search that is Σ max(0, t_i − μ) over covered
/// rows — keep exactly the above-mean rows; symmetric for negative.
pub fn optimistic_bound<F: Float>(lhs: &[Condition<F>], table: &RuleTable<F>, sign: Sign) -> F {
    let mu = table.dataset_mean();
    let rows = covered_rows(lhs, table);
    bound_from_rows(&rows, table, mu, sign)
}

pub(crate) fn bound_from_rows<F: Float>(rows: &[u32], table: &RuleTable<F>, mu: F, sign: Sign) -> F {
    let zero = F::zero();
    rows.iter()
        .map(|&r| {
            let dev = table.targets[r as usize] - mu;
            match sign {
                Sign::Positive => dev.max(zero),
                Sign::Negative => dev.min(zero),
            }
        })
        .sum()
}

/// Per-column condition boundaries derived from the data. An empty list
/// means the column was dropped from condition generation.
#[derive(Debug, Clone)]
pub enum ColumnCuts<F> {
    /// Strictly increasing numeric bin boundaries.
    Numeric(Vec<F>),
    /// Distinct categorical values, ascending.
    Categorical(Vec<u32>),
}

/// Discretization of a whole table, one entry per column.
#[derive(Debug, Clone)]
pub struct CutPoints<F> {
    pub columns: Vec<ColumnCuts<F>>,
}

/// The ordered universe of candidate conditions: columns in table order;
/// within a numeric column `x ≤ b_1`, the in-between ranges, then `x > b_B`;
/// within a categorical column one equality per value. This ordering defines
/// the lexicographic tie-break of the search.
pub fn condition_universe<F: Float>(
    table: &RuleTable<F>,
    cuts: &CutPoints<F>,
) -> Vec<Condition<F>> {
    assert_eq!(
        cuts.columns.len(),
        table.n_columns(),
        "cut points must describe every table column"
    );
    let mut universe = Vec::new();
    for (column, cut) in cuts.columns.iter().enumerate() {
        match cut {
            ColumnCuts::Numeric(bounds) => {
                if bounds.is_empty() {
                    continue;
                }
                universe.push(Condition {
                    column,
                    form: CondForm::LessEq(bounds[0]),
                });
                for pair in bounds.windows(2) {
                    universe.push(Condition {
                        column,
                        form: CondForm::Range(pair[0], pair[1]),
                    });
                }
                universe.push(Condition {
                    column,
                    form: CondForm::Greater(bounds[bounds.len() - 1]),
                });
            }
            ColumnCuts::Categorical(values) => {
                for &v in values {
                    universe.push(Condition {
                        column,
                        form: CondForm::Equals(v),
                    });
                }
            }
        }
    }
    universe
}
