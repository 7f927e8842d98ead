//! Low-dimensional convex polytope kernel.
//!
//! A [`Polytope`] is built from a halfspace representation `{x : x·u_k <=
//! h_k}` with all supports positive (so the origin is interior). The vertex
//! representation is recovered through polar duality: vertices of `P`
//! correspond to facet planes of the convex hull of the dual points
//! `u_k / h_k`. All derived data (vertices, facet areas, volume) is
//! recomputed from scratch rather than carried through the dual hull's
//! combinatorics, which keeps degenerate inputs (boxes, prisms, transient
//! solver iterates) robust.

pub mod hull;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::hemisphere::{self, HemisphereStatus};
use crate::linalg;
use crate::measure::{DiscreteMeasure, MeasureError};
use hull::{convex_hull, HullError};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("support values must be positive (found {0})")]
    NonPositiveSupport(f64),
    #[error("normals are concentrated on a closed hemisphere; the intersection is unbounded")]
    Unbounded,
    #[error("degenerate halfspace data: {0}")]
    Degenerate(String),
    #[error("origin is not interior to the polytope")]
    OriginNotInterior,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("embeddings are not orthonormal with orthogonal spanning images")]
    NonOrthogonalEmbedding,
    #[error("cut depth {delta} outside [0, {max})")]
    DeltaOutOfRange { delta: f64, max: f64 },
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// One halfspace `x·normal <= support` of the H-representation.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub support: f64,
}

/// Derived facet data for one halfspace. `area` is the (n-1)-volume of the
/// contact set; it is zero for redundant halfspaces and for degenerate
/// contacts of dimension below n-1.
#[derive(Debug, Clone)]
pub struct FacetData {
    pub normal_index: usize,
    pub area: f64,
    pub vertex_indices: Vec<usize>,
    pub centroid: DVector<f64>,
}

/// An H-polytope with derived vertex, facet and volume data.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<DVector<f64>>,
    facets: Vec<FacetData>,
    volume: f64,
}

const AREA_FLOOR: f64 = 1e-12;

impl Polytope {
    /// Build the intersection of `{x·u_k <= h_k}` from unit normals and
    /// positive supports. The normals must not be concentrated on a closed
    /// hemisphere (this guarantees boundedness and an interior origin).
    pub fn from_support(
        normals: &[DVector<f64>],
        supports: &[f64],
    ) -> Result<Polytope, GeometryError> {
        if normals.is_empty() || normals.len() != supports.len() {
            return Err(GeometryError::DimensionMismatch);
        }
        let dim = normals[0].len();
        let mut halfspaces = Vec::with_capacity(normals.len());
        for (u, &h) in normals.iter().zip(supports.iter()) {
            if u.len() != dim {
                return Err(GeometryError::DimensionMismatch);
            }
            if !(h > 0.0) {
                return Err(GeometryError::NonPositiveSupport(h));
            }
            let norm = u.norm();
            if norm <= 1e-14 {
                return Err(GeometryError::Degenerate("zero normal".into()));
            }
            halfspaces.push(Halfspace {
                normal: u / norm,
                support: h,
            });
        }
        let unit_normals: Vec<DVector<f64>> =
            halfspaces.iter().map(|hs| hs.normal.clone()).collect();
        if let HemisphereStatus::Concentrated { .. } = hemisphere::hemisphere_status(&unit_normals)
        {
            return Err(GeometryError::Unbounded);
        }

        // Polar duality: vertices of P are facet planes of conv{u_k/h_k}.
        let dual: Vec<DVector<f64>> = halfspaces
            .iter()
            .map(|hs| &hs.normal / hs.support)
            .collect();
        let dual_hull = convex_hull(&dual, 1e-9)?;
        let mut candidates: Vec<DVector<f64>> = Vec::new();
        for f in &dual_hull.facets {
            if f.offset <= 1e-12 {
                return Err(GeometryError::Degenerate(
                    "dual hull facet through the origin".into(),
                ));
            }
            candidates.push(&f.normal / f.offset);
        }
        Self::assemble(dim, halfspaces, candidates)
    }

    /// Finish construction from halfspaces plus a (possibly redundant)
    /// vertex candidate list: dedup, filter, recompute incidence, facet
    /// areas and volume.
    fn assemble(
        dim: usize,
        halfspaces: Vec<Halfspace>,
        candidates: Vec<DVector<f64>>,
    ) -> Result<Polytope, GeometryError> {
        let hscale = halfspaces
            .iter()
            .map(|hs| hs.support.abs())
            .fold(1.0f64, f64::max);
        let xscale = candidates.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
        let feas_tol = 1e-8 * hscale.max(xscale);
        let dedup_tol = 1e-9 * xscale;

        let mut vertices: Vec<DVector<f64>> = Vec::new();
        'cand: for x in candidates {
            // Drop numerically infeasible candidates (sliver planes of the
            // dual hull) and duplicates.
            for hs in &halfspaces {
                if hs.normal.dot(&x) - hs.support > feas_tol {
                    continue 'cand;
                }
            }
            let tight = halfspaces
                .iter()
                .filter(|hs| (hs.normal.dot(&x) - hs.support).abs() <= feas_tol)
                .count();
            if tight < dim {
                continue;
            }
            if vertices.iter().any(|v| (v - &x).norm() <= dedup_tol) {
                continue;
            }
            vertices.push(x);
        }
        if vertices.len() < dim + 1 {
            return Err(GeometryError::Degenerate(format!(
                "only {} vertices recovered",
                vertices.len()
            )));
        }

        // Facet per halfspace: tight vertex set, chart area, centroid.
        let tight_tol = feas_tol;
        let mut facets = Vec::with_capacity(halfspaces.len());
        for (k, hs) in halfspaces.iter().enumerate() {
            let idxs: Vec<usize> = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| (hs.normal.dot(v) - hs.support).abs() <= tight_tol)
                .map(|(i, _)| i)
                .collect();
            let (area, centroid) = if idxs.len() < dim {
                (0.0, mean(&idxs, &vertices, dim))
            } else {
                let centroid = mean(&idxs, &vertices, dim);
                let basis = linalg::orthonormal_complement(
                    &linalg::span_basis(&[hs.normal.clone()], linalg::RANK_REL_TOL),
                    dim,
                );
                let coords: Vec<DVector<f64>> = idxs
                    .iter()
                    .map(|&i| basis.transpose() * (&vertices[i] - &centroid))
                    .collect();
                let raw = hull::cloud_measure(&coords, dim - 1);
                let area = if raw > AREA_FLOOR { raw } else { 0.0 };
                (area, centroid)
            };
            facets.push(FacetData {
                normal_index: k,
                area,
                vertex_indices: idxs,
                centroid,
            });
        }

        // Volume by cone decomposition about the vertex centroid. Using an
        // interior point other than the origin makes the cone identity about
        // the origin a nontrivial cross-check (it needs Minkowski's relation
        // sum u_k |F_k| = 0), which the test suite exploits.
        let zbar = mean(&(0..vertices.len()).collect::<Vec<_>>(), &vertices, dim);
        let mut volume = 0.0;
        for (hs, f) in halfspaces.iter().zip(facets.iter()) {
            volume += (hs.support - hs.normal.dot(&zbar)) * f.area;
        }
        volume /= dim as f64;
        if !(volume > 0.0) {
            return Err(GeometryError::Degenerate("non-positive volume".into()));
        }

        Ok(Polytope {
            dim,
            halfspaces,
            vertices,
            facets,
            volume,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[FacetData] {
        &self.facets
    }

    /// Facets with positive (n-1)-volume.
    pub fn proper_facets(&self) -> impl Iterator<Item = &FacetData> {
        self.facets.iter().filter(|f| f.area > 0.0)
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn facet_area(&self, k: usize) -> f64 {
        self.facets[k].area
    }

    /// Support function `h(P, x) = max { x·v : v vertex }`.
    pub fn support(&self, x: &DVector<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|v| x.dot(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Diameter: max pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                d = d.max((&self.vertices[i] - &self.vertices[j]).norm());
            }
        }
        d
    }

    /// Mass `(1/n) h_k |F_k|` of the cone over facet `k`.
    pub fn cone_mass(&self, k: usize) -> f64 {
        self.halfspaces[k].support * self.facets[k].area / self.dim as f64
    }

    /// Cone-volume measure: one atom per facet with positive area, weight
    /// `(1/n) h_k |F_k|`. Requires the origin interior.
    pub fn cone_volume_measure(&self) -> Result<DiscreteMeasure, GeometryError> {
        if self.halfspaces.iter().any(|hs| hs.support <= 0.0) {
            return Err(GeometryError::OriginNotInterior);
        }
        let mut atoms = Vec::new();
        for (hs, f) in self.halfspaces.iter().zip(self.facets.iter()) {
            if f.area > 0.0 {
                atoms.push((hs.normal.clone(), hs.support * f.area / self.dim as f64));
            }
        }
        Ok(DiscreteMeasure::new(self.dim, atoms)?)
    }

    /// Translate by `x`: supports become `h_k + u_k·x`.
    pub fn translate(&self, x: &DVector<f64>) -> Polytope {
        assert_eq!(x.len(), self.dim);
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|hs| Halfspace {
                normal: hs.normal.clone(),
                support: hs.support + hs.normal.dot(x),
            })
            .collect();
        let vertices = self.vertices.iter().map(|v| v + x).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| FacetData {
                normal_index: f.normal_index,
                area: f.area,
                vertex_indices: f.vertex_indices.clone(),
                centroid: &f.centroid + x,
            })
            .collect();
        Polytope {
            dim: self.dim,
            halfspaces,
            vertices,
            facets,
            volume: self.volume,
        }
    }

    /// Dilate by `lambda > 0`.
    pub fn scale(&self, lambda: f64) -> Polytope {
        assert!(lambda > 0.0, "scale factor must be positive");
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|hs| Halfspace {
                normal: hs.normal.clone(),
                support: hs.support * lambda,
            })
            .collect();
        let vertices = self.vertices.iter().map(|v| v * lambda).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| FacetData {
                normal_index: f.normal_index,
                area: f.area * lambda.powi(self.dim as i32 - 1),
                vertex_indices: f.vertex_indices.clone(),
                centroid: &f.centroid * lambda,
            })
            .collect();
        Polytope {
            dim: self.dim,
            halfspaces,
            vertices,
            facets,
            volume: self.volume * lambda.powi(self.dim as i32),
        }
    }

    /// Image under an invertible linear map: normals move to
    /// `A^{-T} u / |A^{-T} u|`, supports are recomputed as the exact support
    /// of the mapped vertex set, and all derived data is rebuilt.
    pub fn linear_image(&self, a: &DMatrix<f64>) -> Result<Polytope, GeometryError> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(GeometryError::DimensionMismatch);
        }
        let lu = a.clone().lu();
        if lu.determinant().abs() <= 1e-14 {
            return Err(GeometryError::SingularMatrix);
        }
        let a_inv_t = lu
            .try_inverse()
            .ok_or(GeometryError::SingularMatrix)?
            .transpose();
        let mapped: Vec<DVector<f64>> = self.vertices.iter().map(|v| a * v).collect();
        let mut halfspaces = Vec::with_capacity(self.halfspaces.len());
        for hs in &self.halfspaces {
            let w = (&a_inv_t * &hs.normal).normalize();
            let h = mapped.iter().map(|v| w.dot(v)).fold(f64::NEG_INFINITY, f64::max);
            halfspaces.push(Halfspace { normal: w, support: h });
        }
        Self::assemble(self.dim, halfspaces, mapped)
    }

    /// Cartesian-product body `{x : proj_1 x in p1, proj_2 x in p2}` for
    /// orthonormal embeddings with mutually orthogonal spanning images.
    pub fn direct_sum(
        p1: &Polytope,
        p2: &Polytope,
        embed1: &DMatrix<f64>,
        embed2: &DMatrix<f64>,
    ) -> Result<Polytope, GeometryError> {
        let n = embed1.nrows();
        if embed2.nrows() != n
            || embed1.ncols() != p1.dim
            || embed2.ncols() != p2.dim
            || p1.dim + p2.dim != n
        {
            return Err(GeometryError::DimensionMismatch);
        }
        let tol = 1e-9;
        if !linalg::is_orthonormal(embed1, tol)
            || !linalg::is_orthonormal(embed2, tol)
            || (embed1.transpose() * embed2).amax() > tol
        {
            return Err(GeometryError::NonOrthogonalEmbedding);
        }
        let mut halfspaces = Vec::new();
        for hs in &p1.halfspaces {
            halfspaces.push(Halfspace {
                normal: embed1 * &hs.normal,
                support: hs.support,
            });
        }
        for hs in &p2.halfspaces {
            halfspaces.push(Halfspace {
                normal: embed2 * &hs.normal,
                support: hs.support,
            });
        }
        let mut vertices = Vec::with_capacity(p1.vertices.len() * p2.vertices.len());
        for v1 in &p1.vertices {
            for v2 in &p2.vertices {
                vertices.push(embed1 * v1 + embed2 * v2);
            }
        }
        Self::assemble(n, halfspaces, vertices)
    }

    /// Volume of the cap `P ∩ {x·v >= h(P,v) - delta}`, computed from the
    /// clipped vertex representation.
    pub fn cut_volume(&self, v: &DVector<f64>, delta: f64) -> Result<f64, GeometryError> {
        let v = v.normalize();
        let top = self.support(&v);
        let width = top + self.support(&(-&v));
        if !(0.0..width).contains(&delta) {
            return Err(GeometryError::DeltaOutOfRange { delta, max: width });
        }
        if delta == 0.0 {
            return Ok(0.0);
        }
        let level = top - delta;
        let scale = self.vertices.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
        let tol = 1e-12 * scale;

        let mut points: Vec<DVector<f64>> = Vec::new();
        for x in &self.vertices {
            if v.dot(x) >= level - tol {
                points.push(x.clone());
            }
        }
        for (i, j) in self.edges() {
            let si = v.dot(&self.vertices[i]);
            let sj = v.dot(&self.vertices[j]);
            if (si - level) * (sj - level) < -tol * tol {
                let t = (level - si) / (sj - si);
                points.push(&self.vertices[i] + (&self.vertices[j] - &self.vertices[i]) * t);
            }
        }
        if points.len() < self.dim + 1 {
            return Ok(0.0);
        }
        match convex_hull(&points, 1e-9) {
            Ok(h) => Ok(h.volume(&points)),
            Err(HullError::Degenerate) => Ok(0.0),
            Err(e) => Err(e.into()),
        }
    }

    /// Vertex pairs sharing at least `n-1` tight halfspaces (the edges of
    /// the polytope graph).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let hscale = self
            .halfspaces
            .iter()
            .map(|hs| hs.support.abs())
            .fold(1.0f64, f64::max);
        let xscale = self.vertices.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
        let tol = 1e-8 * hscale.max(xscale);
        let tight: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|x| {
                self.halfspaces
                    .iter()
                    .enumerate()
                    .filter(|(_, hs)| (hs.normal.dot(x) - hs.support).abs() <= tol)
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        let mut edges = Vec::new();
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let common = tight[i].iter().filter(|k| tight[j].contains(k)).count();
                if common >= self.dim - 1 {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// Sampled sup-norm distance between support functions. The maximum is
    /// taken over both bodies' facet normals, vertex directions, and 1000
    /// seeded random directions, so the estimate is a lower bound of the
    /// true Hausdorff distance that is exact whenever the maximiser is one
    /// of the sampled directions (facet normals in particular).
    pub fn hausdorff_distance(&self, other: &Polytope) -> Result<f64, GeometryError> {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        if self.dim != other.dim {
            return Err(GeometryError::DimensionMismatch);
        }
        let mut dirs: Vec<DVector<f64>> = Vec::new();
        for p in [self, other] {
            for hs in &p.halfspaces {
                dirs.push(hs.normal.clone());
            }
            for x in &p.vertices {
                let norm = x.norm();
                if norm > 1e-12 {
                    dirs.push(x / norm);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x4c4f474d494e4bu64);
        let normal = rand::distributions::Standard;
        for _ in 0..1000 {
            let v = DVector::from_fn(self.dim, |_, _| {
                let x: f64 = rng.sample(normal);
                2.0 * x - 1.0
            });
            let norm = v.norm();
            if norm > 1e-9 {
                dirs.push(v / norm);
            }
        }
        let mut best = 0.0f64;
        for u in &dirs {
            best = best.max((self.support(u) - other.support(u)).abs());
        }
        Ok(best)
    }
}

fn mean(idxs: &[usize], vertices: &[DVector<f64>], dim: usize) -> DVector<f64> {
    if idxs.is_empty() {
        return DVector::zeros(dim);
    }
    let mut m = DVector::zeros(dim);
    for &i in idxs {
        m += &vertices[i];
    }
    m / idxs.len() as f64
}

#[cfg(test)]
mod tests;
