//! Branch-and-bound search for the k best positive and negative rules.
//!
//! A single depth-first enumeration over the ordered condition universe
//! feeds two k-best lists at once (one per sign), which is equivalent to
//! running the search twice: every node that could improve either list is
//! visited, and each list only accepts what its own ordering prefers.
//!
//! Guarantees, relied on by the exhaustive-enumeration equivalence tests:
//! * conditions within a rule appear in universe order, at most one per
//!   column;
//! * a subtree is pruned only when its coverage has fallen below the
//!   minimum (coverage is anti-monotone under refinement) or when the
//!   optimistic bound is strictly worse than the current k-th impact for
//!   both signs;
//! * ties are broken by fewer conditions, then lexicographically by the
//!   universe indices of the conditions, so the result is a total order
//!   and the returned sets are unique;
//! * covered rows are folded in ascending row order, making the float
//!   arithmetic identical to a brute-force filter over the same table.

use crate::error::Result;
use crate::num::Float;

use super::{
    bound_from_rows, condition_universe, rule_from_rows, Condition, CutPoints, ImpactRule,
    MinerConfig, RuleTable, Sign,
};

/// The two k-best lists produced by one search, each ordered best-first.
#[derive(Debug, Clone)]
pub struct MinedRules<F> {
    pub positive: Vec<ImpactRule<F>>,
    pub negative: Vec<ImpactRule<F>>,
}

impl<F> MinedRules<F> {
    /// Positive rules followed by negative rules.
    pub fn iter_all(&self) -> impl Iterator<Item = &ImpactRule<F>> {
        self.positive.iter().chain(self.negative.iter())
    }
}

/// `true` if candidate (impact, ids) precedes incumbent (impact, ids) in
/// the sign's preference order.
fn precedes<F: Float>(sign: Sign, a_impact: F, a_ids: &[u32], b_impact: F, b_ids: &[u32]) -> bool {
    if a_impact != b_impact {
        return match sign {
            Sign::Positive => a_impact > b_impact,
            Sign::Negative => a_impact < b_impact,
        };
    }
    if a_ids.len() != b_ids.len() {
        return a_ids.len() < b_ids.len();
    }
    a_ids < b_ids
}

struct KBest<F> {
    k: usize,
    sign: Sign,
    /// Best-first; ids are universe indices, kept for tie-breaking.
    entries: Vec<(Vec<u32>, ImpactRule<F>)>,
}

impl<F: Float> KBest<F> {
    fn new(k: usize, sign: Sign) -> Self {
        KBest {
            k,
            sign,
            entries: Vec::with_capacity(k + 1),
        }
    }

    fn full(&self) -> bool {
        self.entries.len() == self.k
    }

    /// Impact of the current k-th entry; only meaningful when full.
    fn threshold(&self) -> F {
        self.entries[self.entries.len() - 1].1.impact
    }

    fn offer(&mut self, ids: &[u32], rule: &ImpactRule<F>) {
        if self.full() {
            let last = &self.entries[self.entries.len() - 1];
            if !precedes(self.sign, rule.impact, ids, last.1.impact, &last.0) {
                return;
            }
        }
        let pos = self
            .entries
            .iter()
            .position(|(eids, er)| precedes(self.sign, rule.impact, ids, er.impact, eids))
            .unwrap_or(self.entries.len());
        self.entries.insert(pos, (ids.to_vec(), rule.clone()));
        self.entries.truncate(self.k);
    }

    fn into_rules(self) -> Vec<ImpactRule<F>> {
        self.entries.into_iter().map(|(_, r)| r).collect()
    }
}

struct SearchState<'a, F> {
    table: &'a RuleTable<F>,
    universe: &'a [Condition<F>],
    cfg: &'a MinerConfig<F>,
    mu: F,
    n_rows: F,
    positive: KBest<F>,
    negative: KBest<F>,
}

impl<F: Float> SearchState<'_, F> {
    fn descend(&mut self, start: usize, ids: &mut Vec<u32>, lhs: &mut Vec<Condition<F>>, rows: &[u32]) {
        for idx in start..self.universe.len() {
            let cond = self.universe[idx];
            // Universe indices ascend by column, so only the most recent
            // condition can share the candidate's column.
            if let Some(&last) = ids.last() {
                if self.universe[last as usize].column == cond.column {
                    continue;
                }
            }
            let new_rows: Vec<u32> = rows
                .iter()
                .copied()
                .filter(|&r| cond.holds(&self.table.cell(r as usize, cond.column)))
                .collect();
            let coverage = F::from_count(new_rows.len()) / self.n_rows;
            if coverage < self.cfg.min_coverage {
                // Refinements only shrink coverage; the whole subtree is out.
                continue;
            }
            ids.push(idx as u32);
            lhs.push(cond);
            let rule = rule_from_rows(lhs.clone(), &new_rows, self.table, self.mu);
            self.positive.offer(ids, &rule);
            self.negative.offer(ids, &rule);
            if lhs.len() < self.cfg.max_len {
                let pos_bound = bound_from_rows(&new_rows, self.table, self.mu, Sign::Positive);
                let neg_bound = bound_from_rows(&new_rows, self.table, self.mu, Sign::Negative);
                // Prune a side only when it can no longer even tie: on a
                // tie a refinement could still win by the length or
                // lexicographic criterion.
                let explore_pos = !self.positive.full() || pos_bound >= self.positive.threshold();
                let explore_neg = !self.negative.full() || neg_bound <= self.negative.threshold();
                if explore_pos || explore_neg {
                    self.descend(idx + 1, ids, lhs, &new_rows);
                }
            }
            lhs.pop();
            ids.pop();
        }
    }
}

/// Mine the k highest-impact positive rules and the k lowest-impact
/// negative rules of up to `max_len` conditions meeting the coverage floor.
pub fn mine_k_optimal<F: Float>(
    table: &RuleTable<F>,
    cuts: &CutPoints<F>,
    cfg: &MinerConfig<F>,
) -> Result<MinedRules<F>> {
    cfg.validate()?;
    let universe = condition_universe(table, cuts);
    let mut state = SearchState {
        table,
        universe: &universe,
        cfg,
        mu: table.dataset_mean(),
        n_rows: F::from_count(table.n_rows()),
        positive: KBest::new(cfg.k, Sign::Positive),
        negative: KBest::new(cfg.k, Sign::Negative),
    };
    let all_rows: Vec<u32> = (0..table.n_rows() as u32).collect();
    state.descend(0, &mut Vec::new(), &mut Vec::new(), &all_rows);
    Ok(MinedRules {
        positive: state.positive.into_rules(),
        negative: state.negative.into_rules(),
    })
}
