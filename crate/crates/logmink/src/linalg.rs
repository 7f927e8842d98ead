//! Small dense linear-algebra helpers shared by the measure and geometry
//! modules: spans, ranks, orthonormal bases and complements, subspace
//! projectors. Everything is deterministic for a given input.
//!
//! Rank and span decisions use column-pivoted modified Gram–Schmidt with
//! re-orthogonalization rather than the SVD: the inputs here are tiny but
//! frequently *exactly* degenerate (antipodal normals, coplanar dual
//! points), a regime where iterative SVDs are not dependable.

use nalgebra::{DMatrix, DVector};

/// Relative residual threshold used for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Stack column vectors into a matrix. Panics on empty input.
pub fn columns(vectors: &[DVector<f64>]) -> DMatrix<f64> {
    let n = vectors[0].len();
    DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i])
}

/// Orthonormal basis of the span of `vectors` by column-pivoted modified
/// Gram–Schmidt: at every step the vector with the largest residual enters
/// the basis; vectors whose residual drops below `rel_tol` times the
/// largest input norm are dependent. Each basis column's sign is fixed so
/// its largest-magnitude entry is positive.
pub fn span_basis(vectors: &[DVector<f64>], rel_tol: f64) -> DMatrix<f64> {
    let n = vectors[0].len();
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    if scale <= 0.0 {
        return DMatrix::zeros(n, 0);
    }
    let mut residuals: Vec<DVector<f64>> = vectors.to_vec();
    let mut alive: Vec<bool> = vec![true; vectors.len()];
    while basis.len() < n {
        // Pick the largest residual.
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in residuals.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let norm = r.norm();
            if best.map_or(true, |(_, bn)| norm > bn) {
                best = Some((i, norm));
            }
        }
        let Some((idx, norm)) = best else { break };
        if norm <= rel_tol * scale {
            break;
        }
        // Re-orthogonalize the winner once more for stability.
        let mut v = residuals[idx].clone();
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let vnorm = v.norm();
        if vnorm <= rel_tol * scale {
            alive[idx] = false;
            continue;
        }
        let mut b = v / vnorm;
        canonical_sign(&mut b);
        // Deflate all residuals.
        for (i, r) in residuals.iter_mut().enumerate() {
            if alive[i] {
                let c = b.dot(r);
                *r -= &b * c;
            }
        }
        alive[idx] = false;
        basis.push(b);
    }
    if basis.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    columns(&basis)
}

/// Numerical rank: dimension of the span at relative threshold `rel_tol`.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let cols: Vec<DVector<f64>> = (0..m.ncols()).map(|j| m.column(j).clone_owned()).collect();
    span_basis(&cols, rel_tol).ncols()
}

fn canonical_sign(v: &mut DVector<f64>) {
    let mut lead = 0usize;
    for i in 0..v.len() {
        if v[i].abs() > v[lead].abs() {
            lead = i;
        }
    }
    if v[lead] < 0.0 {
        *v *= -1.0;
    }
}

/// Orthogonal projector B Bᵀ onto the span of an orthonormal basis. The
/// projector is basis-independent, which makes it the right key for
/// comparing subspaces.
pub fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis * basis.transpose()
}

/// Max-norm distance between two projector matrices.
pub fn projector_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// Distance from a vector to the subspace spanned by an orthonormal basis.
pub fn distance_to_span(basis: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    if basis.ncols() == 0 {
        return v.norm();
    }
    let proj = basis * (basis.transpose() * v);
    (v - proj).norm()
}

/// Orthonormal basis of the orthogonal complement of `basis` in R^n:
/// standard basis vectors orthogonalized against the span, largest
/// residual first.
pub fn orthonormal_complement(basis: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let d = basis.ncols();
    if d >= n {
        return DMatrix::zeros(n, 0);
    }
    let mut held: Vec<DVector<f64>> = (0..d).map(|j| basis.column(j).clone_owned()).collect();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(n - d);
    while out.len() < n - d {
        let mut best: Option<(DVector<f64>, f64)> = None;
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            for b in &held {
                let c = b.dot(&e);
                e -= b * c;
            }
            let norm = e.norm();
            if best.as_ref().map_or(true, |(_, bn)| norm > *bn) {
                best = Some((e, norm));
            }
        }
        let (mut v, norm) = best.expect("n > 0");
        debug_assert!(norm > 1e-8, "complement construction lost rank");
        // Re-orthogonalize for stability.
        for b in &held {
            let c = b.dot(&v);
            v -= b * c;
        }
        let mut b = v.normalize();
        canonical_sign(&mut b);
        held.push(b.clone());
        out.push(b);
    }
    columns(&out)
}

/// True when the columns of `basis` are orthonormal within `tol`.
pub fn is_orthonormal(basis: &DMatrix<f64>, tol: f64) -> bool {
    let gram = basis.transpose() * basis;
    let d = basis.ncols();
    (gram - DMatrix::identity(d, d)).amax() <= tol
}

/// Unit normal of the hyperplane spanned by the columns of an n×(n−1)
/// direction matrix. Returns `None` when the directions are rank-deficient
/// (no unique normal).
pub fn hyperplane_normal(directions: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = directions.nrows();
    debug_assert_eq!(directions.ncols(), n - 1);
    let cols: Vec<DVector<f64>> = (0..n - 1)
        .map(|j| directions.column(j).clone_owned())
        .collect();
    let basis = span_basis(&cols, RANK_REL_TOL);
    if basis.ncols() < n - 1 {
        return None;
    }
    let comp = orthonormal_complement(&basis, n);
    if comp.ncols() != 1 {
        return None;
    }
    Some(comp.column(0).clone_owned())
}
