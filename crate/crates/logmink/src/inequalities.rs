//! Cone-volume inequalities for opposite facet directions, their equality
//! cases, and the truncated-pyramid family showing that cone-volume
//! measures of general convex bodies can violate the subspace concentration
//! bound on essential subspaces.
//!
//! For a body with interior origin and `u ∈ S^{n-1}` (masses
//! `α = V_K({u})`, `β = V_K({-u})`):
//!
//! * n ≥ 3:  `α + β + 2(n-1)√(αβ) <= V(K)`, equality iff `K` is a prism
//!   over translates of its two `u`-facets with equal support on both sides;
//! * n = 2:  `√α + √β <= √V(K)`, equality iff `K` is a trapezoid with two
//!   sides parallel to `u^⊥` whose diagonals cross on `u^⊥`;
//! * any n:  `α·β <= V(K)²/(4n²)` (arithmetic–geometric mean chaining).

use nalgebra::DVector;

use crate::geometry::{GeometryError, Polytope};
use crate::linalg;

/// Result of the opposite-facet inequality check in direction `u`.
#[derive(Debug, Clone, Copy)]
pub struct OppositeFacetCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative up to 1e-9 for every valid body.
    pub slack: f64,
    /// `|slack| <= 1e-9 · rhs`.
    pub tight: bool,
}

/// Cone mass of `p` in direction `u`, matching facet normals within 1e-9;
/// non-facet directions carry mass zero.
pub fn mass_in_direction(p: &Polytope, u: &DVector<f64>) -> f64 {
    p.halfspaces()
        .iter()
        .enumerate()
        .find(|(_, hs)| (&hs.normal - u).norm() <= 1e-9)
        .map(|(k, _)| p.cone_mass(k))
        .unwrap_or(0.0)
}

/// Evaluate the opposite-facet inequality for `±u`.
pub fn check_opposite_facets(
    p: &Polytope,
    u: &DVector<f64>,
) -> Result<OppositeFacetCheck, GeometryError> {
    let n = p.dim();
    if n < 2 {
        return Err(GeometryError::DimensionMismatch);
    }
    if p.halfspaces().iter().any(|hs| hs.support <= 0.0) {
        return Err(GeometryError::OriginNotInterior);
    }
    let u = u.normalize();
    let alpha = mass_in_direction(p, &u);
    let beta = mass_in_direction(p, &(-&u));
    let (lhs, rhs) = if n == 2 {
        (alpha.sqrt() + beta.sqrt(), p.volume().sqrt())
    } else {
        (
            alpha + beta + 2.0 * (n as f64 - 1.0) * (alpha * beta).sqrt(),
            p.volume(),
        )
    };
    let slack = rhs - lhs;
    Ok(OppositeFacetCheck {
        lhs,
        rhs,
        slack,
        tight: slack.abs() <= 1e-9 * rhs,
    })
}

/// Product bound `V_K({u}) · V_K({-u}) <= V(K)² / (4n²)`.
/// Returns `(product, bound)`.
pub fn check_product_bound(p: &Polytope, u: &DVector<f64>) -> Result<(f64, f64), GeometryError> {
    let n = p.dim();
    if n < 2 {
        return Err(GeometryError::DimensionMismatch);
    }
    if p.halfspaces().iter().any(|hs| hs.support <= 0.0) {
        return Err(GeometryError::OriginNotInterior);
    }
    let u = u.normalize();
    let product = mass_in_direction(p, &u) * mass_in_direction(p, &(-&u));
    let bound = p.volume().powi(2) / (4.0 * (n * n) as f64);
    debug_assert!(product <= bound + 1e-9);
    Ok((product, bound))
}

/// Equality case of the opposite-facet inequality: the prism
/// `conv(F + a·u, F − a·u)` over an (n−1)-polytope `F` embedded in `u^⊥`.
/// `F` must contain the origin of `u^⊥` in its relative interior.
pub fn make_equality_prism(
    f: &Polytope,
    a: f64,
    u: &DVector<f64>,
) -> Result<Polytope, GeometryError> {
    let n = u.len();
    if f.dim() != n - 1 {
        return Err(GeometryError::DimensionMismatch);
    }
    if !(a > 0.0) {
        return Err(GeometryError::NonPositiveSupport(a));
    }
    let u = u.normalize();
    let axis = linalg::span_basis(&[u.clone()], linalg::RANK_REL_TOL);
    let chart = linalg::orthonormal_complement(&axis, n);
    let mut normals: Vec<DVector<f64>> = Vec::new();
    let mut supports: Vec<f64> = Vec::new();
    for hs in f.halfspaces() {
        normals.push(&chart * &hs.normal);
        supports.push(hs.support);
    }
    normals.push(u.clone());
    supports.push(a);
    normals.push(-u);
    supports.push(a);
    Polytope::from_support(&normals, &supports)
}

/// Equality case in the plane: trapezoid with horizontal sides of lengths
/// `s1` (top, height `a`, outer normal e2) and `s2` (bottom, depth
/// `b = a·s2/s1` so that the diagonals cross on `e2^⊥`), both centered.
pub fn make_equality_trapezoid(s1: f64, s2: f64, a: f64) -> Result<Polytope, GeometryError> {
    if !(s1 > 0.0 && s2 > 0.0 && a > 0.0) {
        return Err(GeometryError::Degenerate(
            "trapezoid parameters must be positive".into(),
        ));
    }
    let b = a * s2 / s1;
    // Vertices: (±s1/2, a) on top, (±s2/2, -b) on the bottom.
    let top_r = DVector::from_vec(vec![s1 / 2.0, a]);
    let bot_r = DVector::from_vec(vec![s2 / 2.0, -b]);
    // Right side through top_r and bot_r; outward normal.
    let dir = &bot_r - &top_r;
    let mut right_normal = DVector::from_vec(vec![-dir[1], dir[0]]).normalize();
    if right_normal.dot(&top_r) < 0.0 {
        right_normal = -right_normal;
    }
    let right_support = right_normal.dot(&top_r);
    let left_normal = DVector::from_vec(vec![-right_normal[0], right_normal[1]]);
    let normals = vec![
        DVector::from_vec(vec![0.0, 1.0]),
        DVector::from_vec(vec![0.0, -1.0]),
        right_normal,
        left_normal,
    ];
    let supports = vec![a, b, right_support, right_support];
    Polytope::from_support(&normals, &supports)
}

/// Per-subspace report for the truncated-pyramid family: mass of
/// `ξ_i = lin{u_1..u_i}` against the bound `(i/n)·V`.
#[derive(Debug, Clone, Copy)]
pub struct PyramidReport {
    pub i: usize,
    pub mass: f64,
    pub bound: f64,
}

impl PyramidReport {
    pub fn violated(&self) -> bool {
        self.mass > self.bound
    }
}

/// The truncated pyramid `P_r = conv(−r·u1 + r·W, u1 + W)` with `W` the
/// unit cube in `u1^⊥` (axes e2..en), together with the mass/bound report
/// for every `ξ_i = lin{e1..e_i}`, `i = 1..n-1`. For small `r` every bound
/// is violated even though each ξ_i is essential; at `r = 1` the body is a
/// box and all bounds hold with equality.
pub fn truncated_pyramid_example(
    r: f64,
    n: usize,
) -> Result<(Polytope, Vec<PyramidReport>), GeometryError> {
    if n < 2 {
        return Err(GeometryError::DimensionMismatch);
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(GeometryError::Degenerate(format!(
            "pyramid parameter r={r} outside (0, 1]"
        )));
    }
    let mut normals: Vec<DVector<f64>> = Vec::new();
    let mut supports: Vec<f64> = Vec::new();
    let e = |i: usize, s: f64| {
        let mut v = DVector::zeros(n);
        v[i] = s;
        v
    };
    normals.push(e(0, 1.0));
    supports.push(1.0);
    normals.push(e(0, -1.0));
    supports.push(r);
    // Slanted sides through the bottom edge (x1=-r, x_i=±r) and the top
    // edge (x1=1, x_i=±1).
    let denom = ((1.0 - r).powi(2) + (1.0 + r).powi(2)).sqrt();
    for i in 1..n {
        for s in [1.0, -1.0] {
            let mut w = DVector::zeros(n);
            w[0] = (r - 1.0) / denom;
            w[i] = s * (1.0 + r) / denom;
            normals.push(w);
            supports.push(2.0 * r / denom);
        }
    }
    let p = Polytope::from_support(&normals, &supports)?;

    let mut reports = Vec::new();
    for i in 1..n {
        // Atoms of V_P inside lin{e1..e_i}: the ±e1 facets plus the slanted
        // pairs for axes 2..=i.
        let mut mass = p.cone_mass(0) + p.cone_mass(1);
        for j in 1..i {
            let base = 2 + 2 * (j - 1);
            mass += p.cone_mass(base) + p.cone_mass(base + 1);
        }
        reports.push(PyramidReport {
            i,
            mass,
            bound: (i as f64 / n as f64) * p.volume(),
        });
    }
    Ok((p, reports))
}

/// Scan a decreasing grid of `r` values and report the largest one at which
/// every subspace bound is violated (`None` if none is).
pub fn truncated_pyramid_crossover(n: usize, grid: &[f64]) -> Result<Option<f64>, GeometryError> {
    let mut crossover = None;
    for &r in grid {
        let (_, reports) = truncated_pyramid_example(r, n)?;
        if reports.iter().all(|rep| rep.violated()) {
            crossover = Some(r);
            break;
        }
    }
    Ok(crossover)
}
