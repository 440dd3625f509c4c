//! Acceptance gate: one test per release criterion, each checking the
//! implementation against an oracle written from scratch in this file
//! (exhaustive enumeration, full-matrix dynamic programs, closed-form
//! estimators, finite differences, grid searches) or against pinned
//! behavioral guarantees (determinism, runtime budget). On success every
//! test prints a single `ACCEPTANCE <n> PASS` line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use std::cmp::Ordering;
use std::fs;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand::Rng;

use fex_core::data::{ingest, DailySeries};
use fex_core::eval::{metrics, EvalRecord, Mode};
use fex_core::gfm::expectile::{expectile_loss, expectile_loss_gradient, fit_expectile};
use fex_core::gfm::train_models;
use fex_core::guidance::{quadrant_of, Quadrant};
use fex_core::linalg::DesignMatrix;
use fex_core::miner::{
    condition_universe, evaluate_rule, mine_k_optimal, ColumnCuts, ColumnData, CondForm,
    Condition, CutPoints, ImpactRule, MinerConfig, RuleTable,
};
use fex_core::neighborhood::bootstrap_series;
use fex_core::neighborhood::dtw::dtw_on_values;
use fex_core::pipeline;
use fex_core::rng::{mix_seed, rng_from_seed};
use fex_core::synth::{self, SyntheticSpec};
use fex_core::RunConfig;

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn single_thread_pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .unwrap()
}

// ---------------------------------------------------------------------------
// Criterion 1: the branch-and-bound rule search returns exactly the same
// k-best positive and negative rule lists as exhaustive enumeration.
// ---------------------------------------------------------------------------

/// Type-7 quantile of an ascending slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
}

/// A random mixed numeric/categorical table plus cut points for it. Values
/// are drawn on a 0.1 grid so exact impact ties occur and exercise the
/// tie-breaking order.
fn random_table(rng: &mut impl Rng) -> (RuleTable<f64>, CutPoints<f64>) {
    let n_rows = rng.random_range(20..=200);
    let n_cols = rng.random_range(1..=5);
    let mut names = Vec::new();
    let mut columns = Vec::new();
    let mut cuts = Vec::new();
    for c in 0..n_cols {
        names.push(format!("f{c}"));
        if rng.random_range(0..4) == 0 {
            let levels: u32 = rng.random_range(2..=4);
            let vals: Vec<u32> = (0..n_rows).map(|_| rng.random_range(0..levels)).collect();
            let mut distinct = vals.clone();
            distinct.sort_unstable();
            distinct.dedup();
            cuts.push(ColumnCuts::Categorical(distinct));
            columns.push(ColumnData::Categorical(vals));
        } else {
            let vals: Vec<f64> = (0..n_rows)
                .map(|_| rng.random_range(0..=100) as f64 / 10.0)
                .collect();
            let mut sorted = vals.clone();
            sorted.sort_by(f64::total_cmp);
            let mut bounds = vec![
                quantile_sorted(&sorted, 1.0 / 3.0),
                quantile_sorted(&sorted, 2.0 / 3.0),
            ];
            bounds.dedup();
            cuts.push(ColumnCuts::Numeric(bounds));
            columns.push(ColumnData::Numeric(vals));
        }
    }
    let targets: Vec<f64> = (0..n_rows)
        .map(|_| rng.random_range(-100..=100) as f64 / 10.0)
        .collect();
    let table = RuleTable::new(names, columns, targets).unwrap();
    (table, CutPoints { columns: cuts })
}

/// Every conjunction over the universe (ascending indices, at most one
/// condition per column, at most `max_len` long) meeting the coverage
/// floor. No pruning of any kind.
fn enumerate_all(
    table: &RuleTable<f64>,
    universe: &[Condition<f64>],
    cfg: &MinerConfig<f64>,
) -> Vec<(Vec<usize>, ImpactRule<f64>)> {
    fn recurse(
        start: usize,
        stack: &mut Vec<usize>,
        table: &RuleTable<f64>,
        universe: &[Condition<f64>],
        cfg: &MinerConfig<f64>,
        out: &mut Vec<(Vec<usize>, ImpactRule<f64>)>,
    ) {
        for id in start..universe.len() {
            let col = universe[id].column;
            if stack.iter().any(|&s| universe[s].column == col) {
                continue;
            }
            stack.push(id);
            let lhs: Vec<Condition<f64>> = stack.iter().map(|&s| universe[s]).collect();
            let rule = evaluate_rule(&lhs, table);
            if rule.coverage >= cfg.min_coverage {
                out.push((stack.clone(), rule));
            }
            if stack.len() < cfg.max_len {
                recurse(id + 1, stack, table, universe, cfg, out);
            }
            stack.pop();
        }
    }
    let mut out = Vec::new();
    recurse(0, &mut Vec::new(), table, universe, cfg, &mut out);
    out
}

/// Preference order within one sign: impact (descending for the positive
/// list, ascending for the negative), then fewer conditions, then
/// lexicographically smaller universe-index sequence.
fn rank(
    a: &(Vec<usize>, ImpactRule<f64>),
    b: &(Vec<usize>, ImpactRule<f64>),
    positive: bool,
) -> Ordering {
    let by_impact = if positive {
        b.1.impact.partial_cmp(&a.1.impact).unwrap()
    } else {
        a.1.impact.partial_cmp(&b.1.impact).unwrap()
    };
    by_impact
        .then(a.0.len().cmp(&b.0.len()))
        .then(a.0.cmp(&b.0))
}

fn assert_rules_match(got: &[ImpactRule<f64>], want: &[(Vec<usize>, ImpactRule<f64>)], tag: &str) {
    assert_eq!(got.len(), want.len(), "{tag}: list length");
    for (i, (g, (_, w))) in got.iter().zip(want).enumerate() {
        assert_eq!(g.lhs, w.lhs, "{tag}[{i}]: condition sequence");
        assert_eq!(
            g.impact.to_bits(),
            w.impact.to_bits(),
            "{tag}[{i}]: impact bits ({} vs {})",
            g.impact,
            w.impact
        );
        assert_eq!(
            g.absolute_coverage, w.absolute_coverage,
            "{tag}[{i}]: absolute coverage"
        );
    }
}

#[test]
fn acceptance_01_search_matches_exhaustive_enumeration() {
    let cfg = MinerConfig {
        k: 5,
        max_len: 3,
        min_coverage: 0.05,
    };
    let start = Instant::now();
    for t in 0..120u64 {
        let mut rng = rng_from_seed(mix_seed(9001, t));
        let (table, cuts) = random_table(&mut rng);
        let universe = condition_universe(&table, &cuts);
        let mined = mine_k_optimal(&table, &cuts, &cfg).unwrap();

        let mut all = enumerate_all(&table, &universe, &cfg);
        all.sort_by(|a, b| rank(a, b, true));
        let want_pos: Vec<_> = all.iter().take(cfg.k).cloned().collect();
        all.sort_by(|a, b| rank(a, b, false));
        let want_neg: Vec<_> = all.iter().take(cfg.k).cloned().collect();

        assert_rules_match(&mined.positive, &want_pos, &format!("table {t} positive"));
        assert_rules_match(&mined.negative, &want_neg, &format!("table {t} negative"));
    }
    assert!(start.elapsed() < Duration::from_secs(60), "search oracle too slow");
    println!(
        "ACCEPTANCE 1 PASS: k-best search identical to exhaustive enumeration on 120 random tables ({:?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: every emitted rule satisfies the impact identity
// impact = sum − μ·|covered|, and the trivial all-rows rule has impact 0.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_impact_identity_holds_on_every_rule() {
    let cfg = MinerConfig::default();
    let mut checked = 0usize;
    for t in 0..25u64 {
        let mut rng = rng_from_seed(mix_seed(417, t));
        let (table, cuts) = random_table(&mut rng);
        let mu = table.dataset_mean();
        let mined = mine_k_optimal(&table, &cuts, &cfg).unwrap();
        for rule in mined.iter_all() {
            let identity = rule.sum - mu * rule.absolute_coverage as f64;
            assert!(
                (rule.impact - identity).abs() < 1e-9,
                "impact {} vs sum - mu*cov {}",
                rule.impact,
                identity
            );
            let n = table.n_rows() as f64;
            assert_eq!(rule.coverage, rule.absolute_coverage as f64 / n);
            checked += 1;
        }
        // The unconditional rule covers everything: its covered mean is the
        // dataset mean, so its impact must vanish.
        let trivial = evaluate_rule(&[], &table);
        assert_eq!(trivial.coverage, 1.0);
        assert!(trivial.impact.abs() < 1e-9, "trivial impact {}", trivial.impact);
    }
    assert!(checked >= 100, "too few rules exercised ({checked})");
    println!("ACCEPTANCE 2 PASS: impact identity within 1e-9 on {checked} mined rules");
}

// ---------------------------------------------------------------------------
// Criterion 3: the rolling two-row warping distance equals a full-matrix
// dynamic program exactly, is symmetric, and is zero on identical inputs.
// ---------------------------------------------------------------------------

fn dtw_full_matrix(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut dp = vec![vec![f64::INFINITY; m + 1]; n + 1];
    dp[0][0] = 0.0;
    for i in 1..=n {
        for j in 1..=m {
            let d = a[i - 1] - b[j - 1];
            let prev = dp[i - 1][j].min(dp[i][j - 1]).min(dp[i - 1][j - 1]);
            dp[i][j] = d * d + prev;
        }
    }
    dp[n][m]
}

#[test]
fn acceptance_03_warping_distance_matches_full_matrix_oracle() {
    let mut rng = rng_from_seed(mix_seed(33, 0));
    for round in 0..1000 {
        let n = rng.random_range(5..=50);
        let m = rng.random_range(5..=50);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();

        let got = dtw_on_values(&a, &b, None).unwrap();
        let want = dtw_full_matrix(&a, &b);
        assert_eq!(got, want, "round {round}: unconstrained distance");
        assert_eq!(
            dtw_on_values(&b, &a, None).unwrap(),
            got,
            "round {round}: symmetry"
        );
        assert_eq!(
            dtw_on_values(&a, &a, None).unwrap(),
            0.0,
            "round {round}: self distance"
        );

        // A band wide enough to cover the whole matrix changes nothing; a
        // narrow band restricts the admissible paths so it can only raise
        // the distance.
        let full_band = dtw_on_values(&a, &b, Some(n.max(m))).unwrap();
        assert_eq!(full_band, want, "round {round}: all-covering band");
        let narrow = dtw_on_values(&a, &b, Some(n.abs_diff(m).max(3))).unwrap();
        assert!(narrow >= want, "round {round}: narrow band below optimum");
    }
    println!("ACCEPTANCE 3 PASS: warping distance exact vs full-matrix DP on 1000 random pairs");
}

// ---------------------------------------------------------------------------
// Criterion 4: the asymmetric least-squares fit agrees with ordinary least
// squares at tau = 0.5, its analytic gradient matches finite differences,
// and an intercept-only fit at asymmetric tau matches a grid search.
// ---------------------------------------------------------------------------

/// Solve A x = b by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-12, "singular oracle system");
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Ordinary least squares through the normal equations.
fn ols(design: &DesignMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let p = design.cols;
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for i in 0..design.rows {
        let row = design.row(i);
        for j in 0..p {
            xty[j] += row[j] * y[i];
            for l in 0..p {
                xtx[j][l] += row[j] * row[l];
            }
        }
    }
    solve_dense(xtx, xty)
}

fn random_regression(rng: &mut impl Rng, rows: usize, cols: usize) -> (DesignMatrix<f64>, Vec<f64>) {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        data.push(1.0);
        for _ in 1..cols {
            data.push(rng.random_range(-3.0..3.0));
        }
    }
    let design = DesignMatrix::new(data, rows, cols);
    let beta: Vec<f64> = (0..cols).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y: Vec<f64> = (0..rows)
        .map(|i| {
            let row = design.row(i);
            let fit: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
            fit + rng.random_range(-0.5..0.5)
        })
        .collect();
    (design, y)
}

#[test]
fn acceptance_04_expectile_fit_against_closed_form_oracles() {
    // At tau = 0.5 both residual signs carry the same weight, so the
    // minimizer is the ordinary least-squares solution.
    for t in 0..5u64 {
        let mut rng = rng_from_seed(mix_seed(5100, t));
        let (design, y) = random_regression(&mut rng, 60, 4);
        let got = fit_expectile(&design, &y, 0.5, 0.0).unwrap();
        let want = ols(&design, &y);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-6, "tau=0.5 fit {g} vs ols {w}");
        }
    }

    // The analytic gradient must match central finite differences of the
    // loss, including a non-zero ridge term.
    let mut rng = rng_from_seed(mix_seed(5200, 0));
    let (design, y) = random_regression(&mut rng, 30, 3);
    let (tau, ridge) = (0.57, 0.3);
    for _ in 0..20 {
        let beta: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let grad = expectile_loss_gradient(&design, &y, &beta, tau, ridge);
        for j in 0..beta.len() {
            let h = 1e-6 * (1.0 + beta[j].abs());
            let mut up = beta.clone();
            let mut down = beta.clone();
            up[j] += h;
            down[j] -= h;
            let fd = (expectile_loss(&design, &y, &up, tau, ridge)
                - expectile_loss(&design, &y, &down, tau, ridge))
                / (2.0 * h);
            let rel = (grad[j] - fd).abs() / grad[j].abs().max(fd.abs()).max(1.0);
            assert!(rel < 1e-5, "gradient[{j}] {} vs fd {fd}", grad[j]);
        }
    }

    // Intercept-only asymmetric fit vs a progressively refined grid search
    // over the loss computed from its definition.
    let als_loss = |y: &[f64], c: f64, tau: f64| -> f64 {
        y.iter()
            .map(|&v| {
                let r = v - c;
                let w = if r >= 0.0 { tau } else { 1.0 - tau };
                w * r * r
            })
            .sum()
    };
    let y: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..10.0)).collect();
    let ones = DesignMatrix::new(vec![1.0; y.len()], y.len(), 1);
    let fitted = fit_expectile(&ones, &y, 0.57, 0.0).unwrap()[0];
    let (mut lo, mut hi) = (-1.0, 11.0);
    let mut best = (f64::INFINITY, 0.0);
    for _ in 0..3 {
        let step = (hi - lo) / 4000.0;
        for s in 0..=4000 {
            let c = lo + step * s as f64;
            let l = als_loss(&y, c, 0.57);
            if l < best.0 {
                best = (l, c);
            }
        }
        lo = best.1 - 2.0 * step;
        hi = best.1 + 2.0 * step;
    }
    assert!(
        (fitted - best.1).abs() < 1e-4,
        "intercept fit {fitted} vs grid {}",
        best.1
    );
    println!("ACCEPTANCE 4 PASS: expectile fit matches OLS / finite differences / grid search");
}

// ---------------------------------------------------------------------------
// Criterion 5: a strictly weekday-periodic series decomposes with zero
// remainder, so every bootstrap replicate reproduces it; equal seeds give
// identical replicates.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_05_periodic_series_is_a_bootstrap_fixed_point() {
    let weekly = [4.0, 6.0, 5.0, 7.0, 4.0, 8.0, 3.0];
    let values: Vec<f64> = (0..35).map(|d| weekly[d % 7]).collect();
    let parent = DailySeries::raw("parent", date(2019, 3, 4), values.clone());

    let reps = bootstrap_series(&parent, 10, 123).unwrap();
    assert_eq!(reps.len(), 10);
    for (r, rep) in reps.iter().enumerate() {
        assert_eq!(rep.len(), parent.len(), "replicate {r} length");
        for (i, (got, want)) in rep.values.iter().zip(&values).enumerate() {
            assert!(
                (got - want).abs() < 1e-9,
                "replicate {r} day {i}: {got} vs {want}"
            );
        }
    }

    let again = bootstrap_series(&parent, 10, 123).unwrap();
    for (a, b) in reps.iter().zip(&again) {
        assert_eq!(a.values, b.values, "same seed must reproduce bitwise");
        assert_eq!(a.scale, b.scale);
    }
    println!("ACCEPTANCE 5 PASS: periodic parent reproduced by all 10 replicates within 1e-9");
}

// ---------------------------------------------------------------------------
// Criterion 6: the six guidance cases partition every (lhs truth, forecast,
// band) configuration — exactly one case applies, with a closed band.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_guidance_cases_partition_all_configurations() {
    let mut rng = rng_from_seed(mix_seed(66, 0));
    for round in 0..2000 {
        let lhs_true = rng.random_bool(0.5);
        let p: f64 = rng.random_range(-50.0..50.0);
        let delta: f64 = rng.random_range(0.0..10.0);
        let x = match round % 10 {
            // Band edges must count as supporting: the band is closed.
            0 => p + delta,
            1 => p - delta,
            _ => rng.random_range(-70.0..70.0),
        };

        let in_band = x >= p - delta && x <= p + delta;
        let above = x > p + delta;
        let below = x < p - delta;
        assert_eq!(
            in_band as u8 + above as u8 + below as u8,
            1,
            "round {round}: cases must be mutually exclusive and exhaustive"
        );
        let want = match (lhs_true, above, below) {
            (true, false, false) => Quadrant::CurrentSupporting,
            (true, true, false) => Quadrant::CurrentContradicting1,
            (true, false, true) => Quadrant::CurrentContradicting2,
            (false, false, false) => Quadrant::HypotheticallySupporting,
            (false, true, false) => Quadrant::HypotheticallyContradicting1,
            (false, false, true) => Quadrant::HypotheticallyContradicting2,
            _ => unreachable!(),
        };
        assert_eq!(
            quadrant_of(lhs_true, x, p, delta),
            want,
            "round {round}: lhs={lhs_true} x={x} p={p} delta={delta}"
        );
    }
    println!("ACCEPTANCE 6 PASS: exactly one guidance case applies in 2000 random configurations");
}

// ---------------------------------------------------------------------------
// Criterion 7: on a panel with two planted consumption clusters, explaining
// a high-cluster meter recovers a supporting high-consumption rule and at
// least one contradicting counterfactual, within the runtime budget.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_07_planted_cluster_rule_is_recovered() {
    let spec = SyntheticSpec {
        n_meters: 12,
        days: 400,
        cluster_count: 2,
        cluster_bases: Some(vec![10.0, 30.0]),
        weekly_amplitude: 1.0,
        temp_sensitivity: 0.4,
        noise_level: 0.03,
        seed: 4242,
        start_date: date(2017, 1, 1),
    };
    let (readings, temps) = synth::generate_panel::<f64>(&spec).unwrap();
    let (panel, rejections) = ingest::build_panel(readings, temps);
    assert!(rejections.is_empty(), "synthetic meters rejected: {rejections:?}");

    let cfg = RunConfig {
        n_filt: 10,
        n_synthetic: 20,
        bins: 2,
        horizon: 60,
        seed: 7,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let (models, _) = train_models(&panel, &cfg.gfm).unwrap();
    // Meter index 1 belongs to the 30 kWh/day cluster.
    let expl = pipeline::explain_meter(&panel, &models, &cfg, "m0001").unwrap();
    let report = pipeline::guidance_for_month(&expl, 3).unwrap();
    let elapsed = start.elapsed();

    assert!(report.p > 0.0, "monthly forecast must be positive");
    let g1 = report.entries[0]
        .as_ref()
        .expect("a supporting rule must exist for a cluster member");
    assert_eq!(g1.quadrant, Quadrant::CurrentSupporting);
    assert!(g1.lhs_true && g1.rhs_true);
    assert!(
        g1.rule.lhs.iter().any(|c| {
            c.column < 3 && matches!(c.form, CondForm::Greater(_))
        }),
        "supporting rule must bound a consumption feature from below: {:?}",
        g1.rule.lhs
    );
    assert!(g1.rule.impact > 0.0, "supporting rule impact {}", g1.rule.impact);

    assert!(
        report.entries[4].is_some() || report.entries[5].is_some(),
        "a contradicting counterfactual must exist against the other cluster"
    );
    assert!(
        elapsed < Duration::from_secs(60),
        "explanation took {elapsed:?}, budget is 60s"
    );
    println!(
        "ACCEPTANCE 7 PASS: planted high-consumption rule recovered as G1, counterfactual present ({elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: metric anchors — the mean predictor scores RAE exactly 1,
// and RMSE/MAE/RAE match hand-computed values on a fixed example.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_metric_anchor_values() {
    let mut rng = rng_from_seed(mix_seed(88, 0));
    for _ in 0..50 {
        let n = rng.random_range(3..40);
        let refs: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..500.0)).collect();
        let mean = refs.iter().sum::<f64>() / n as f64;
        let records: Vec<EvalRecord<f64>> = refs
            .iter()
            .map(|&r| EvalRecord {
                explainer_prediction: mean,
                gfm_forecast: r,
                actual: -99.0,
            })
            .collect();
        let m = metrics(&records, Mode::Fidelity).unwrap();
        assert!(
            (m.rae - 1.0).abs() < 1e-12,
            "mean predictor must score RAE 1, got {}",
            m.rae
        );
    }

    // Predictions [3, 1] against references [2, 4]: absolute errors 1 and
    // 3, so MAE = 2, RMSE = sqrt(5); the reference deviates from its own
    // mean by 1 twice, so RAE = 4/2 = 2.
    for mode in [Mode::Fidelity, Mode::Accuracy] {
        let records: [EvalRecord<f64>; 2] = [(3.0, 2.0), (1.0, 4.0)].map(|(pred, reference)| EvalRecord {
            explainer_prediction: pred,
            gfm_forecast: if mode == Mode::Fidelity { reference } else { 0.0 },
            actual: if mode == Mode::Accuracy { reference } else { 0.0 },
        });
        let m = metrics(&records, mode).unwrap();
        assert!((m.mae - 2.0).abs() < 1e-12, "{mode:?} mae {}", m.mae);
        assert!((m.rmse - 5.0f64.sqrt()).abs() < 1e-12, "{mode:?} rmse {}", m.rmse);
        assert!((m.rae - 2.0).abs() < 1e-12, "{mode:?} rae {}", m.rae);
    }
    println!("ACCEPTANCE 8 PASS: mean predictor RAE = 1 and hand-computed RMSE/MAE/RAE anchors hold");
}

// ---------------------------------------------------------------------------
// Criterion 9: the full evaluation harness on a 30-meter, 2-year panel
// finishes single-threaded within 300 s and the rule explainer beats the
// mean predictor on local fidelity (RAE < 1).
// ---------------------------------------------------------------------------

#[test]
fn acceptance_09_evaluation_harness_budget_and_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let consumption = dir.path().join("consumption.csv");
    let temperature = dir.path().join("temperature.csv");
    let spec = SyntheticSpec {
        n_meters: 30,
        days: 730,
        cluster_count: 3,
        cluster_bases: None,
        weekly_amplitude: 1.0,
        temp_sensitivity: 0.4,
        noise_level: 0.1,
        seed: 11,
        start_date: date(2017, 1, 1),
    };
    synth::write_synthetic_panel(&spec, &consumption, &temperature).unwrap();

    let cfg = RunConfig {
        consumption,
        temperature,
        out_dir: dir.path().join("out"),
        n_filt: 10,
        n_synthetic: 20,
        horizon: 365,
        seed: 11,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let out = single_thread_pool(1).install(|| pipeline::run_eval(&cfg)).unwrap();
    let elapsed = start.elapsed();

    assert!(
        elapsed < Duration::from_secs(300),
        "evaluation took {elapsed:?}, budget is 300s single-threaded"
    );
    assert_eq!(out.rows.len(), 12, "3 explainers x 2 scopes x 2 modes");
    for row in &out.rows {
        assert!(
            row.metrics.rae.is_finite()
                && row.metrics.rmse.is_finite()
                && row.metrics.mae.is_finite(),
            "non-finite metrics in {} {} {}",
            row.explainer,
            row.scope,
            row.metric_mode
        );
    }
    let rules_local = out
        .rows
        .iter()
        .find(|r| r.explainer == "rules" && r.scope == "local" && r.metric_mode == "fidelity")
        .unwrap();
    assert!(
        rules_local.metrics.rae < 1.0,
        "rule explainer local fidelity RAE {} must beat the mean predictor",
        rules_local.metrics.rae
    );
    assert!(out.results_path.is_file() && out.importance_path.is_file());
    println!(
        "ACCEPTANCE 9 PASS: eval harness single-threaded in {elapsed:?}, rules local fidelity RAE {:.3} < 1",
        rules_local.metrics.rae
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: explaining all meters produces byte-identical outputs
// regardless of the worker count.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_10_outputs_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let consumption = dir.path().join("consumption.csv");
    let temperature = dir.path().join("temperature.csv");
    let spec = SyntheticSpec {
        n_meters: 10,
        days: 430,
        cluster_count: 2,
        cluster_bases: None,
        weekly_amplitude: 1.0,
        temp_sensitivity: 0.4,
        noise_level: 0.1,
        seed: 23,
        start_date: date(2017, 1, 1),
    };
    synth::write_synthetic_panel(&spec, &consumption, &temperature).unwrap();

    let cfg = RunConfig {
        consumption,
        temperature,
        out_dir: dir.path().join("out"),
        n_filt: 6,
        n_synthetic: 10,
        horizon: 60,
        seed: 23,
        ..RunConfig::default()
    };
    pipeline::run_train(&cfg).unwrap();

    let serial = single_thread_pool(1)
        .install(|| pipeline::run_explain_all(&cfg))
        .unwrap();
    let text_serial = fs::read(&serial.text_path).unwrap();
    let json_serial: Vec<Vec<u8>> = serial
        .json_paths
        .iter()
        .map(|p| fs::read(p).unwrap())
        .collect();
    assert!(!serial.json_paths.is_empty());

    let parallel = single_thread_pool(4)
        .install(|| pipeline::run_explain_all(&cfg))
        .unwrap();
    assert_eq!(serial.json_paths, parallel.json_paths, "output file sets differ");
    assert_eq!(
        text_serial,
        fs::read(&parallel.text_path).unwrap(),
        "combined text report differs between 1 and 4 workers"
    );
    for (path, want) in parallel.json_paths.iter().zip(&json_serial) {
        assert_eq!(
            &fs::read(path).unwrap(),
            want,
            "{} differs between 1 and 4 workers",
            path.display()
        );
    }
    println!(
        "ACCEPTANCE 10 PASS: {} guidance files byte-identical with 1 and 4 workers",
        serial.json_paths.len() + 1
    );
}
