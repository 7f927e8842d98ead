//! Incremental beneath–beyond convex hull in low dimension.
//!
//! Points are inserted in a deterministic order (norm descending, then
//! lexicographic). Facets are kept simplicial; several simplicial facets may
//! share a supporting hyperplane for degenerate inputs (boxes, prisms), and
//! consumers are expected to work with the facet *planes* rather than the
//! triangulation. A point whose maximal signed distance to the current hull
//! is below the tolerance extends the hull by less than `eps` and is
//! dropped, which keeps the computed hull within `eps` Hausdorff distance of
//! the exact one.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error)]
pub enum HullError {
    #[error("input points are affinely dependent (no full-dimensional hull)")]
    Degenerate,
    #[error("hull construction lost numerical consistency: {0}")]
    Numerical(String),
}

/// A simplicial facet of the hull: `dim` vertex indices, unit outward
/// normal and offset with `normal · x = offset` on the facet plane.
#[derive(Debug, Clone)]
pub struct HullFacet {
    pub vertices: Vec<usize>,
    pub normal: DVector<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub dim: usize,
    pub facets: Vec<HullFacet>,
    /// A point strictly inside the hull (centroid of the initial simplex).
    pub interior: DVector<f64>,
    eps: f64,
}

impl Hull {
    /// Tolerance used during construction (relative epsilon times the point
    /// scale).
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Volume by fan decomposition from the interior point over the
    /// simplicial facets.
    pub fn volume(&self, points: &[DVector<f64>]) -> f64 {
        let d = self.dim;
        if d == 1 {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for f in &self.facets {
                let x = points[f.vertices[0]][0];
                lo = lo.min(x);
                hi = hi.max(x);
            }
            return (hi - lo).max(0.0);
        }
        let mut total = 0.0;
        let mut fact = 1.0;
        for i in 1..=d {
            fact *= i as f64;
        }
        for f in &self.facets {
            let m = DMatrix::from_fn(d, d, |i, j| points[f.vertices[j]][i] - self.interior[i]);
            total += m.determinant().abs() / fact;
        }
        total
    }

    /// Indices of the input points that appear as facet vertices.
    pub fn vertex_indices(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Compute the convex hull of `points` in R^d with relative epsilon
/// `rel_eps` (the spec-level default is 1e-9).
pub fn convex_hull(points: &[DVector<f64>], rel_eps: f64) -> Result<Hull, HullError> {
    if points.is_empty() {
        return Err(HullError::Degenerate);
    }
    let dim = points[0].len();
    if dim == 1 {
        return hull_1d(points);
    }

    let scale = points.iter().map(|p| p.norm()).fold(0.0f64, f64::max);
    if scale <= 0.0 {
        return Err(HullError::Degenerate);
    }
    let eps = rel_eps * scale;

    let order = insertion_order(points);
    let chosen = initial_simplex(points, &order, dim, eps)?;
    let interior = {
        let mut z = DVector::zeros(dim);
        for &i in &chosen {
            z += &points[i];
        }
        z / (dim as f64 + 1.0)
    };

    let mut facets: Vec<HullFacet> = Vec::new();
    for omit in 0..=dim {
        let verts: Vec<usize> = chosen
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != omit)
            .map(|(_, &i)| i)
            .collect();
        facets.push(expect_facet(points, &verts, &interior, eps)?);
    }

    let in_simplex: std::collections::HashSet<usize> = chosen.iter().copied().collect();
    for &idx in &order {
        if in_simplex.contains(&idx) {
            continue;
        }
        insert_point(points, &mut facets, idx, &interior, eps)?;
    }

    let hull = Hull {
        dim,
        facets,
        interior,
        eps,
    };
    validate(&hull, points)?;
    Ok(hull)
}

fn hull_1d(points: &[DVector<f64>]) -> Result<Hull, HullError> {
    let mut lo = 0usize;
    let mut hi = 0usize;
    for (i, p) in points.iter().enumerate() {
        if p[0] < points[lo][0] {
            lo = i;
        }
        if p[0] > points[hi][0] {
            hi = i;
        }
    }
    let scale = points[lo][0].abs().max(points[hi][0].abs()).max(1.0);
    if points[hi][0] - points[lo][0] <= 1e-12 * scale {
        return Err(HullError::Degenerate);
    }
    let facets = vec![
        HullFacet {
            vertices: vec![hi],
            normal: DVector::from_vec(vec![1.0]),
            offset: points[hi][0],
        },
        HullFacet {
            vertices: vec![lo],
            normal: DVector::from_vec(vec![-1.0]),
            offset: -points[lo][0],
        },
    ];
    Ok(Hull {
        dim: 1,
        facets,
        interior: DVector::from_vec(vec![0.5 * (points[lo][0] + points[hi][0])]),
        eps: 1e-12 * scale,
    })
}

/// Deterministic insertion order: norm descending, lexicographic ascending
/// as the tie-break.
fn insertion_order(points: &[DVector<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let na = points[a].norm();
        let nb = points[b].norm();
        nb.partial_cmp(&na)
            .unwrap()
            .then_with(|| lex_cmp(&points[a], &points[b]))
    });
    order
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for i in 0..a.len() {
        match a[i].partial_cmp(&b[i]).unwrap() {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Greedily pick `dim + 1` affinely independent points following the
/// insertion order.
fn initial_simplex(
    points: &[DVector<f64>],
    order: &[usize],
    dim: usize,
    eps: f64,
) -> Result<Vec<usize>, HullError> {
    let mut chosen = vec![order[0]];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for &idx in &order[1..] {
        if chosen.len() == dim + 1 {
            break;
        }
        let mut delta = &points[idx] - &points[chosen[0]];
        for b in &basis {
            let c = b.dot(&delta);
            delta -= b * c;
        }
        if delta.norm() > 10.0 * eps {
            basis.push(delta.normalize());
            chosen.push(idx);
        }
    }
    if chosen.len() < dim + 1 {
        return Err(HullError::Degenerate);
    }
    Ok(chosen)
}

enum FacetBuild {
    Ok(HullFacet),
    /// The candidate vertices are affinely dependent (zero-volume sliver).
    DegeneratePlane,
}

fn make_facet(
    points: &[DVector<f64>],
    vertices: &[usize],
    interior: &DVector<f64>,
    eps: f64,
) -> Result<FacetBuild, HullError> {
    let dim = points[0].len();
    let p0 = &points[vertices[0]];
    let diffs = DMatrix::from_fn(dim, dim - 1, |i, j| points[vertices[j + 1]][i] - p0[i]);
    let Some(normal) = linalg::hyperplane_normal(&diffs) else {
        return Ok(FacetBuild::DegeneratePlane);
    };
    let mut normal = normal;
    let mut offset = normal.dot(p0);
    let side = offset - normal.dot(interior);
    if side.abs() <= eps {
        return Err(HullError::Numerical(
            "facet plane passes through the interior point".into(),
        ));
    }
    if side < 0.0 {
        normal = -normal;
        offset = -offset;
    }
    Ok(FacetBuild::Ok(HullFacet {
        vertices: vertices.to_vec(),
        normal,
        offset,
    }))
}

fn expect_facet(
    points: &[DVector<f64>],
    vertices: &[usize],
    interior: &DVector<f64>,
    eps: f64,
) -> Result<HullFacet, HullError> {
    match make_facet(points, vertices, interior, eps)? {
        FacetBuild::Ok(f) => Ok(f),
        FacetBuild::DegeneratePlane => {
            Err(HullError::Numerical("degenerate facet plane".into()))
        }
    }
}

fn insert_point(
    points: &[DVector<f64>],
    facets: &mut Vec<HullFacet>,
    idx: usize,
    interior: &DVector<f64>,
    eps: f64,
) -> Result<(), HullError> {
    let p = &points[idx];
    let mut visible: Vec<bool> = facets
        .iter()
        .map(|f| f.normal.dot(p) - f.offset > eps)
        .collect();
    if !visible.iter().any(|&v| v) {
        return Ok(());
    }

    // Ridge bookkeeping: every ridge must be shared by exactly two facets;
    // horizon ridges have exactly one visible side.
    let mut ridges: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (fi, f) in facets.iter().enumerate() {
        for omit in 0..f.vertices.len() {
            let mut r: Vec<usize> = f
                .vertices
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != omit)
                .map(|(_, &v)| v)
                .collect();
            r.sort_unstable();
            ridges.entry(r).or_default().push(fi);
        }
    }
    for owners in ridges.values() {
        if owners.len() != 2 {
            return Err(HullError::Numerical(format!(
                "ridge shared by {} facets",
                owners.len()
            )));
        }
    }

    // Build the replacement facets over the horizon. When the new point is
    // affinely dependent with a horizon ridge it lies in the plane of the
    // invisible neighbor; absorb that facet into the visible region and
    // recompute the horizon (local coplanar-facet merging for degenerate
    // inputs such as boxes).
    let mut new_facets: Vec<HullFacet>;
    'grow: loop {
        new_facets = Vec::new();
        for (ridge, owners) in &ridges {
            let vis: Vec<bool> = owners.iter().map(|&fi| visible[fi]).collect();
            if vis[0] == vis[1] {
                continue;
            }
            let hidden = if vis[0] { owners[1] } else { owners[0] };
            let mut verts = ridge.clone();
            verts.push(idx);
            match make_facet(points, &verts, interior, eps)? {
                FacetBuild::Ok(f) => new_facets.push(f),
                FacetBuild::DegeneratePlane => {
                    let side = facets[hidden].normal.dot(p) - facets[hidden].offset;
                    if side < -10.0 * eps {
                        return Err(HullError::Numerical(
                            "degenerate facet away from the inserted point".into(),
                        ));
                    }
                    visible[hidden] = true;
                    continue 'grow;
                }
            }
        }
        break;
    }
    if visible.iter().all(|&v| v) {
        return Err(HullError::Numerical(
            "entire hull became visible from an inserted point".into(),
        ));
    }

    let mut kept: Vec<HullFacet> = facets
        .drain(..)
        .enumerate()
        .filter(|&(fi, _)| !visible[fi])
        .map(|(_, f)| f)
        .collect();
    kept.append(&mut new_facets);
    *facets = kept;
    Ok(())
}

fn validate(hull: &Hull, points: &[DVector<f64>]) -> Result<(), HullError> {
    let tol = 10.0 * hull.eps;
    for f in &hull.facets {
        for p in points {
            if f.normal.dot(p) - f.offset > tol {
                return Err(HullError::Numerical(
                    "input point lies outside the computed hull".into(),
                ));
            }
        }
    }
    let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
    for f in &hull.facets {
        for omit in 0..f.vertices.len() {
            let mut r: Vec<usize> = f
                .vertices
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != omit)
                .map(|(_, &v)| v)
                .collect();
            r.sort_unstable();
            *ridges.entry(r).or_default() += 1;
        }
    }
    if hull.dim >= 2 && ridges.values().any(|&c| c != 2) {
        return Err(HullError::Numerical("hull boundary is not closed".into()));
    }
    Ok(())
}

/// `d`-dimensional volume of the convex hull of a point cloud living in
/// R^d. Degenerate clouds have measure zero; a single point in dimension
/// zero has counting measure one.
pub fn cloud_measure(points: &[DVector<f64>], dim: usize) -> f64 {
    if dim == 0 {
        return 1.0;
    }
    if points.is_empty() {
        return 0.0;
    }
    if dim == 1 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in points {
            lo = lo.min(p[0]);
            hi = hi.max(p[0]);
        }
        return (hi - lo).max(0.0);
    }
    match convex_hull(points, 1e-9) {
        Ok(h) => h.volume(points),
        Err(_) => 0.0,
    }
}
