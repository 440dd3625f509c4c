//! Expectile regression (asymmetric least squares) fitted by iteratively
//! reweighted least squares.
//!
//! The loss is Σ w_i(β)·(y_i − x_iᵀβ)² + ridge·‖β‖², with w_i = τ for
//! non-negative residuals and 1−τ otherwise. Each IRLS step solves the
//! weighted ridge normal equations exactly; iteration stops when the
//! max-abs coefficient change falls below 1e-8 (or after 100 rounds).

use crate::error::{Error, Result};
use crate::linalg::{solve_linear_system, DesignMatrix};
use crate::num::Float;

const MAX_ITERS: usize = 100;
const CONVERGENCE_TOL: f64 = 1e-8;

fn weight<F: Float>(residual: F, tau: F) -> F {
    if residual >= F::zero() {
        tau
    } else {
        F::one() - tau
    }
}

/// The asymmetric squared loss at `beta`.
pub fn expectile_loss<F: Float>(
    design: &DesignMatrix<F>,
    targets: &[F],
    beta: &[F],
    tau: F,
    ridge: F,
) -> F {
    let mut loss = F::zero();
    for i in 0..design.rows {
        let row = design.row(i);
        let fitted = dot(row, beta);
        let r = targets[i] - fitted;
        loss = loss + weight(r, tau) * r * r;
    }
    let penalty: F = beta.iter().map(|&b| b * b).sum();
    loss + ridge * penalty
}

/// Analytic gradient of [`expectile_loss`]:
/// ∂L/∂β_j = −2·Σ w_i·r_i·x_ij + 2·ridge·β_j.
pub fn expectile_loss_gradient<F: Float>(
    design: &DesignMatrix<F>,
    targets: &[F],
    beta: &[F],
    tau: F,
    ridge: F,
) -> Vec<F> {
    let two = F::cast(2.0);
    let mut grad = vec![F::zero(); design.cols];
    for i in 0..design.rows {
        let row = design.row(i);
        let r = targets[i] - dot(row, beta);
        let w = weight(r, tau);
        for (g, &x) in grad.iter_mut().zip(row) {
            *g = *g - two * w * r * x;
        }
    }
    for (g, &b) in grad.iter_mut().zip(beta) {
        *g = *g + two * ridge * b;
    }
    grad
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Solve the weighted ridge normal equations (XᵀWX + ridge·I)β = XᵀWy.
fn weighted_solve<F: Float>(
    design: &DesignMatrix<F>,
    targets: &[F],
    weights: &[F],
    ridge: F,
) -> Result<Vec<F>> {
    let p = design.cols;
    let mut ata = vec![F::zero(); p * p];
    let mut atb = vec![F::zero(); p];
    for i in 0..design.rows {
        let row = design.row(i);
        let w = weights[i];
        let wy = w * targets[i];
        for a in 0..p {
            let wa = w * row[a];
            // Symmetric accumulation: upper triangle only.
            for b in a..p {
                ata[a * p + b] = ata[a * p + b] + wa * row[b];
            }
            atb[a] = atb[a] + row[a] * wy;
        }
    }
    for a in 0..p {
        ata[a * p + a] = ata[a * p + a] + ridge;
        for b in (a + 1)..p {
            ata[b * p + a] = ata[a * p + b];
        }
    }
    solve_linear_system(ata, atb, p).map_err(|_| Error::RankDeficient)
}

/// Fit expectile-regression coefficients.
pub fn fit_expectile<F: Float>(
    design: &DesignMatrix<F>,
    targets: &[F],
    tau: F,
    ridge: F,
) -> Result<Vec<F>> {
    if !(tau > F::zero() && tau < F::one()) {
        return Err(Error::invalid(format!("tau {tau} outside (0, 1)")));
    }
    if ridge < F::zero() {
        return Err(Error::invalid("ridge penalty must be non-negative"));
    }
    if design.rows != targets.len() {
        return Err(Error::invalid("design/target row mismatch"));
    }
    if design.rows < design.cols {
        return Err(Error::invalid(format!(
            "{} instances cannot identify {} features",
            design.rows, design.cols
        )));
    }

    // Start from the symmetric (unweighted) ridge solution.
    let uniform = vec![F::one(); design.rows];
    let mut beta = weighted_solve(design, targets, &uniform, ridge)?;
    let tol = F::cast(CONVERGENCE_TOL);
    let mut weights = vec![F::zero(); design.rows];
    for _ in 0..MAX_ITERS {
        for i in 0..design.rows {
            let r = targets[i] - dot(design.row(i), &beta);
            weights[i] = weight(r, tau);
        }
        let next = weighted_solve(design, targets, &weights, ridge)?;
        let delta = beta
            .iter()
            .zip(&next)
            .map(|(&a, &b)| (a - b).abs())
            .fold(F::zero(), |acc, d| acc.max(d));
        beta = next;
        if delta < tol {
            break;
        }
    }
    Ok(beta)
}
