//! Dense Phase-I simplex for tiny equality-form feasibility systems.
//!
//! Decides whether `A x = b, x >= 0` has a solution. Instances here are a
//! handful of rows and columns, so a dense tableau with Bland's rule is both
//! sufficient and deterministic. On infeasibility the Farkas certificate
//! `y` (with `yᵀA <= 0`, `yᵀb > 0`) is extracted from the final reduced
//! costs of the artificial columns.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("simplex pivot limit exceeded ({0} iterations)")]
    PivotLimit(usize),
}

/// Outcome of a Phase-I feasibility run.
#[derive(Debug, Clone)]
pub enum Feasibility {
    /// A solution `x >= 0` of `A x = b`.
    Feasible(DVector<f64>),
    /// Farkas certificate: `yᵀA <= 0` componentwise and `yᵀb > 0`.
    Infeasible(DVector<f64>),
}

const PIVOT_LIMIT: usize = 20_000;

/// Phase-I feasibility of `A x = b, x >= 0`.
pub fn solve_eq_feasibility(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Feasibility, SimplexError> {
    let m = a.nrows();
    let k = a.ncols();
    debug_assert_eq!(b.len(), m);

    // Flip rows so the right-hand side is nonnegative; remember the signs to
    // unflip the Farkas certificate.
    let mut signs = vec![1.0f64; m];
    // Tableau layout: [A | I | rhs], one objective row at the end.
    let cols = k + m + 1;
    let mut t = DMatrix::<f64>::zeros(m + 1, cols);
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        signs[i] = s;
        for j in 0..k {
            t[(i, j)] = s * a[(i, j)];
        }
        t[(i, k + i)] = 1.0;
        t[(i, cols - 1)] = s * b[i];
    }
    // Phase-I objective: minimise the sum of artificials. With the artificial
    // basis, the reduced-cost row is the negated column sums of A and the
    // objective value is -sum(rhs).
    for j in 0..k {
        let mut s = 0.0;
        for i in 0..m {
            s += t[(i, j)];
        }
        t[(m, j)] = -s;
    }
    let mut rhs_sum = 0.0;
    for i in 0..m {
        rhs_sum += t[(i, cols - 1)];
    }
    t[(m, cols - 1)] = -rhs_sum;

    let scale = 1.0 + a.amax().max(b.amax());
    let eps = 1e-11 * scale;

    let mut basis: Vec<usize> = (k..k + m).collect();
    let mut pivots = 0usize;
    loop {
        // Bland's rule: entering column is the smallest index with a
        // negative reduced cost.
        let mut entering = None;
        for j in 0..k + m {
            if t[(m, j)] < -eps {
                entering = Some(j);
                break;
            }
        }
        let Some(enter) = entering else { break };

        // Ratio test, ties broken by the smallest basic variable index.
        let mut leave_row: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let aij = t[(i, enter)];
            if aij > eps {
                let ratio = t[(i, cols - 1)] / aij;
                let better = ratio < best_ratio - eps
                    || (ratio < best_ratio + eps
                        && leave_row.map_or(true, |r| basis[i] < basis[r]));
                if better {
                    best_ratio = ratio;
                    leave_row = Some(i);
                }
            }
        }
        // Phase-I objective is bounded below by zero, so a missing leaving
        // row cannot happen with consistent data; guard anyway.
        let Some(lr) = leave_row else { break };

        // Pivot.
        let piv = t[(lr, enter)];
        for j in 0..cols {
            t[(lr, j)] /= piv;
        }
        for i in 0..m + 1 {
            if i != lr {
                let f = t[(i, enter)];
                if f != 0.0 {
                    for j in 0..cols {
                        t[(i, j)] -= f * t[(lr, j)];
                    }
                }
            }
        }
        basis[lr] = enter;

        pivots += 1;
        if pivots > PIVOT_LIMIT {
            return Err(SimplexError::PivotLimit(pivots));
        }
    }

    let objective = -t[(m, cols - 1)];
    let feas_tol = 1e-9 * (1.0 + b.amax());
    if objective.abs() <= feas_tol {
        let mut x = DVector::zeros(k);
        for i in 0..m {
            if basis[i] < k {
                x[basis[i]] = t[(i, cols - 1)].max(0.0);
            }
        }
        Ok(Feasibility::Feasible(x))
    } else {
        // Reduced cost of artificial i is 1 - y_i, so y_i = 1 - r_i; flip
        // back to the original row orientation.
        let mut y = DVector::zeros(m);
        for i in 0..m {
            y[i] = signs[i] * (1.0 - t[(m, k + i)]);
        }
        Ok(Feasibility::Infeasible(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn feasible_balanced_pair() {
        // x1*1 + x2*(-1) = 0 has x = (0,0).
        let a = mat(1, 2, &[1.0, -1.0]);
        let b = DVector::from_vec(vec![0.0]);
        match solve_eq_feasibility(&a, &b).unwrap() {
            Feasibility::Feasible(x) => {
                assert!((a * x - b).amax() < 1e-9);
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn infeasible_gives_farkas_certificate() {
        // rows: x1 - x2 = 0 ; x3 = -1  -> infeasible for x >= 0.
        let a = mat(2, 3, &[1.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![0.0, -1.0]);
        match solve_eq_feasibility(&a, &b).unwrap() {
            Feasibility::Infeasible(y) => {
                let yta = a.transpose() * &y;
                assert!(yta.iter().all(|&v| v <= 1e-9), "yta = {yta}");
                assert!(y.dot(&b) > 1e-9);
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn feasible_with_positive_rhs() {
        // x1 + x2 = 2, x1 - x2 = 0 -> x = (1,1).
        let a = mat(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let b = DVector::from_vec(vec![2.0, 0.0]);
        match solve_eq_feasibility(&a, &b).unwrap() {
            Feasibility::Feasible(x) => {
                assert!((a * x - b).amax() < 1e-9);
            }
            _ => panic!("expected feasible"),
        }
    }
}
