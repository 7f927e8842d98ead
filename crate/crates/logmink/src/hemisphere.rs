//! Closed-hemisphere concentration test for a finite set of unit vectors.
//!
//! A set `U ⊂ S^{n-1}` is *not* concentrated on a closed hemisphere exactly
//! when `0 = Σ λ_k u_k` is solvable with all `λ_k >= 1` and the vectors span
//! R^n. The λ-system is decided by the Phase-I simplex; when it is
//! infeasible the Farkas certificate is a witness direction `v` with
//! `v·u_k <= 0` for every `k`.

use nalgebra::DVector;

use crate::linalg;
use crate::simplex::{solve_eq_feasibility, Feasibility};

/// Outcome of the hemisphere test.
#[derive(Debug, Clone)]
pub enum HemisphereStatus {
    /// The vectors surround the origin: no closed hemisphere contains them.
    NotConcentrated,
    /// All vectors satisfy `witness · u_k <= 0`.
    Concentrated { witness: DVector<f64> },
}

impl HemisphereStatus {
    pub fn is_concentrated(&self) -> bool {
        matches!(self, HemisphereStatus::Concentrated { .. })
    }
}

/// Decide whether `normals` are concentrated on a closed hemisphere of
/// S^{n-1}. Empty input counts as concentrated (any direction witnesses).
pub fn hemisphere_status(normals: &[DVector<f64>]) -> HemisphereStatus {
    if normals.is_empty() {
        return HemisphereStatus::Concentrated {
            witness: DVector::zeros(0),
        };
    }
    let n = normals[0].len();

    // Vectors that do not span R^n are concentrated on the hemisphere of any
    // direction orthogonal to their span.
    let basis = linalg::span_basis(normals, linalg::RANK_REL_TOL);
    if basis.ncols() < n {
        let comp = linalg::orthonormal_complement(&basis, n);
        let witness = comp.column(0).clone_owned();
        return HemisphereStatus::Concentrated { witness };
    }

    // Spanning case: feasibility of sum(lambda_k u_k) = 0, lambda >= 1.
    // Substituting x = lambda - 1 >= 0 gives U x = -U 1.
    let u = linalg::columns(normals);
    let ones = DVector::from_element(normals.len(), 1.0);
    let b = -(&u * ones);
    match solve_eq_feasibility(&u, &b) {
        Ok(Feasibility::Feasible(_)) => HemisphereStatus::NotConcentrated,
        Ok(Feasibility::Infeasible(y)) => {
            let norm = y.norm();
            let witness = if norm > 0.0 { y / norm } else { y };
            HemisphereStatus::Concentrated { witness }
        }
        // The pivot limit is unreachable for the tiny systems built here;
        // treat it as concentration with no usable witness.
        Err(_) => HemisphereStatus::Concentrated {
            witness: DVector::zeros(n),
        },
    }
}

/// Convenience wrapper returning only the boolean.
pub fn is_concentrated(normals: &[DVector<f64>]) -> bool {
    hemisphere_status(normals).is_concentrated()
}

/// Scaling coefficients `lambda_k >= 1` with `Σ lambda_k u_k = 0`, when the
/// vectors are not concentrated on a closed hemisphere.
pub fn surrounding_combination(normals: &[DVector<f64>]) -> Option<DVector<f64>> {
    if normals.is_empty() {
        return None;
    }
    let n = normals[0].len();
    let basis = linalg::span_basis(normals, linalg::RANK_REL_TOL);
    if basis.ncols() < n {
        return None;
    }
    let u = linalg::columns(normals);
    let ones = DVector::from_element(normals.len(), 1.0);
    let b = -(&u * &ones);
    match solve_eq_feasibility(&u, &b) {
        Ok(Feasibility::Feasible(x)) => Some(x + ones),
        _ => None,
    }
}
