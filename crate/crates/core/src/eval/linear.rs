//! Ridge-penalized linear explainer.
//!
//! Features are standardized to zero mean and unit population variance,
//! the target is centered, and the slope vector solves
//! (XᵀX + λI) β = Xᵀy on that scale with an unpenalized intercept. The
//! penalty is picked from a fixed 10-point logarithmic grid by 5-fold
//! cross-validation on contiguous folds (rows arrive in deterministic
//! order, so the folds are reproducible).

use crate::error::{Error, Result};
use crate::linalg::solve_linear_system;
use crate::num::{mean, population_std, Float};

/// Number of cross-validation folds.
const CV_FOLDS: usize = 5;

/// λ grid: 10 points from 1e-4 to 1e2, logarithmically spaced.
pub fn penalty_grid<F: Float>() -> Vec<F> {
    (0..10)
        .map(|i| F::cast(10f64.powf(-4.0 + 6.0 * i as f64 / 9.0)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct LinearExplainer<F> {
    /// Intercept on the original feature scale.
    pub intercept: F,
    /// Slopes on the original feature scale.
    pub coefficients: Vec<F>,
    /// Slopes on the standardized scale; their magnitudes serve as
    /// feature importances.
    pub std_coefficients: Vec<F>,
    /// The penalty the model was fitted with.
    pub penalty: F,
}

impl<F: Float> LinearExplainer<F> {
    pub fn predict(&self, features: &[F]) -> F {
        debug_assert_eq!(features.len(), self.coefficients.len());
        let mut y = self.intercept;
        for (c, x) in self.coefficients.iter().zip(features) {
            y = y + *c * *x;
        }
        y
    }

    /// |standardized coefficient| per feature.
    pub fn importance(&self) -> Vec<F> {
        self.std_coefficients.iter().map(|c| c.abs()).collect()
    }
}

fn validate_rows<F: Float>(rows: &[Vec<F>], targets: &[F]) -> Result<usize> {
    if rows.len() != targets.len() {
        return Err(Error::invalid("row/target count mismatch"));
    }
    if rows.is_empty() {
        return Err(Error::invalid("linear explainer needs at least one row"));
    }
    let d = rows[0].len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("inconsistent feature row width"));
    }
    Ok(d)
}

/// Fit at a fixed penalty. Standardization uses population moments; a
/// zero-variance feature standardizes to an all-zero column and therefore
/// gets a zero slope.
pub fn fit_ridge_fixed<F: Float>(
    rows: &[Vec<F>],
    targets: &[F],
    penalty: F,
) -> Result<LinearExplainer<F>> {
    let d = validate_rows(rows, targets)?;
    if !(penalty > F::zero()) {
        return Err(Error::invalid("ridge penalty must be positive"));
    }

    let mut means = vec![F::zero(); d];
    let mut stds = vec![F::zero(); d];
    for j in 0..d {
        let col: Vec<F> = rows.iter().map(|r| r[j]).collect();
        means[j] = mean(&col);
        let s = population_std(&col);
        stds[j] = if s > F::zero() { s } else { F::one() };
    }
    let y_mean = mean(targets);

    // A = XᵀX + λI and b = Xᵀ(y − ȳ) over standardized features.
    let mut a = vec![F::zero(); d * d];
    let mut b = vec![F::zero(); d];
    let mut z = vec![F::zero(); d];
    for (row, &y) in rows.iter().zip(targets) {
        for j in 0..d {
            z[j] = (row[j] - means[j]) / stds[j];
        }
        let yc = y - y_mean;
        for j in 0..d {
            for k in 0..d {
                a[j * d + k] = a[j * d + k] + z[j] * z[k];
            }
            b[j] = b[j] + z[j] * yc;
        }
    }
    for j in 0..d {
        a[j * d + j] = a[j * d + j] + penalty;
    }

    let std_coefficients = solve_linear_system(a, b, d)?;
    let coefficients: Vec<F> = std_coefficients
        .iter()
        .zip(&stds)
        .map(|(c, s)| *c / *s)
        .collect();
    let mut intercept = y_mean;
    for j in 0..d {
        intercept = intercept - coefficients[j] * means[j];
    }
    Ok(LinearExplainer {
        intercept,
        coefficients,
        std_coefficients,
        penalty,
    })
}

/// Fit with the penalty chosen by 5-fold cross-validated squared error
/// over the logarithmic grid; ties keep the smaller penalty. A constant
/// target short-circuits to an intercept-only model.
pub fn fit_linear_explainer<F: Float>(rows: &[Vec<F>], targets: &[F]) -> Result<LinearExplainer<F>> {
    let d = validate_rows(rows, targets)?;
    let n = rows.len();
    if n < 2 * d {
        return Err(Error::invalid(format!(
            "linear explainer needs at least {} rows for {d} features, got {n}",
            2 * d
        )));
    }
    if targets.iter().all(|t| *t == targets[0]) {
        return Ok(LinearExplainer {
            intercept: targets[0],
            coefficients: vec![F::zero(); d],
            std_coefficients: vec![F::zero(); d],
            penalty: F::zero(),
        });
    }

    let bounds: Vec<usize> = (0..=CV_FOLDS).map(|f| f * n / CV_FOLDS).collect();
    let mut best: Option<(F, F)> = None; // (penalty, cv sse)
    for &penalty in &penalty_grid::<F>() {
        let mut sse = F::zero();
        for f in 0..CV_FOLDS {
            let (lo, hi) = (bounds[f], bounds[f + 1]);
            if lo == hi {
                continue;
            }
            let mut train_rows: Vec<Vec<F>> = Vec::with_capacity(n - (hi - lo));
            let mut train_targets: Vec<F> = Vec::with_capacity(n - (hi - lo));
            for i in (0..lo).chain(hi..n) {
                train_rows.push(rows[i].clone());
                train_targets.push(targets[i]);
            }
            let model = fit_ridge_fixed(&train_rows, &train_targets, penalty)?;
            for i in lo..hi {
                let e = model.predict(&rows[i]) - targets[i];
                sse = sse + e * e;
            }
        }
        if best.map_or(true, |(_, s)| sse < s) {
            best = Some((penalty, sse));
        }
    }
    let (penalty, _) = best.expect("non-empty penalty grid");
    fit_ridge_fixed(rows, targets, penalty)
}
