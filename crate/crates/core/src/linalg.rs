//! Minimal dense linear algebra: just enough to solve the small
//! symmetric-positive-definite and general square systems produced by the
//! regression fits (tens of unknowns at most).

use crate::error::{Error, Result};
use crate::num::Float;

/// Row-major dense matrix with externally tracked shape.
#[derive(Debug, Clone)]
pub struct DesignMatrix<F> {
    pub data: Vec<F>,
    pub rows: usize,
    pub cols: usize,
}

impl<F: Float> DesignMatrix<F> {
    pub fn new(data: Vec<F>, rows: usize, cols: usize) -> Self {
        assert_eq!(data.len(), rows * cols, "design shape mismatch");
        DesignMatrix { data, rows, cols }
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Solve `A x = b` for square `A` (row-major, `n x n`) by Gaussian
/// elimination with partial pivoting. `A` and `b` are consumed as scratch.
///
/// Returns [`Error::RankDeficient`] when no pivot above a scale-relative
/// threshold can be found.
pub fn solve_linear_system<F: Float>(mut a: Vec<F>, mut b: Vec<F>, n: usize) -> Result<Vec<F>> {
    assert_eq!(a.len(), n * n, "matrix shape mismatch");
    assert_eq!(b.len(), n, "rhs length mismatch");
    if n == 0 {
        return Ok(Vec::new());
    }

    // Scale-relative singularity threshold.
    let max_abs = a
        .iter()
        .fold(F::zero(), |acc, &v| if v.abs() > acc { v.abs() } else { acc });
    let tiny = if max_abs > F::zero() {
        max_abs * F::cast(1e-13)
    } else {
        F::cast(1e-300)
    };

    for col in 0..n {
        // Partial pivot: largest magnitude in this column at or below the diagonal.
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for r in (col + 1)..n {
            let v = a[r * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= tiny || !pivot_val.is_finite() {
            return Err(Error::RankDeficient);
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
            }
            b.swap(col, pivot_row);
        }

        let pivot = a[col * n + col];
        for r in (col + 1)..n {
            let factor = a[r * n + col] / pivot;
            if factor == F::zero() {
                continue;
            }
            a[r * n + col] = F::zero();
            for c in (col + 1)..n {
                let upd = a[col * n + c] * factor;
                a[r * n + c] = a[r * n + c] - upd;
            }
            b[r] = b[r] - b[col] * factor;
        }
    }

    // Back substitution.
    let mut x = vec![F::zero(); n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for c in (col + 1)..n {
            acc = acc - a[col * n + c] * x[c];
        }
        x[col] = acc / a[col * n + col];
    }
    Ok(x)
}
