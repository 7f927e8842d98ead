//! Discrete spherical measures and the hypotheses of the existence theorem:
//! hemisphere concentration, general position, essential subspaces, and the
//! (strict) essential subspace concentration condition.
//!
//! A linear subspace ξ with 1 <= dim ξ <= n-1 is *essential* when the atoms
//! lying in ξ are not concentrated on a closed hemisphere of ξ ∩ S^{n-1}.
//! The concentration condition bounds the mass of every essential subspace
//! by `(dim ξ / n) · μ(S^{n-1})`, and equality forces a complementary
//! subspace carrying the rest of the mass.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::hull::convex_hull;
use crate::hemisphere::{self, HemisphereStatus};
use crate::linalg;

/// Angular tolerance below which two unit normals count as the same atom.
pub const DUPLICATE_ANGLE_TOL: f64 = 1e-10;
/// Distance tolerance for "atom lies in subspace" decisions.
pub const SUBSPACE_MEMBER_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("dimension mismatch among normals")]
    DimensionMismatch,
    #[error("atom normal has zero length")]
    ZeroNormal,
    #[error("atom weight must be positive (found {0})")]
    NonPositiveWeight(f64),
    #[error("need at least {need} atoms, have {have}")]
    TooFewAtoms { need: usize, have: usize },
    #[error(
        "subspace enumeration guard exceeded: {atoms} atoms in dimension {dim} \
         (limits {max_atoms} atoms, dimension {max_dim})"
    )]
    EnumerationGuard {
        atoms: usize,
        dim: usize,
        max_atoms: usize,
        max_dim: usize,
    },
    #[error("measure is concentrated on a closed hemisphere")]
    HemisphereConcentrated { witness: Vec<f64> },
    #[error("no atoms lie in the given subspace")]
    NoAtomsInSubspace,
    #[error("vector does not lie in the linear span of the support")]
    NotInSpan,
    #[error("subspace basis is not orthonormal")]
    BasisNotOrthonormal,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// One atom: a unit normal with a positive weight.
#[derive(Debug, Clone)]
pub struct Atom {
    pub normal: DVector<f64>,
    pub weight: f64,
}

/// A discrete measure on S^{n-1}: unit normals with positive weights.
/// Duplicate normals (within [`DUPLICATE_ANGLE_TOL`]) are merged on
/// construction by summing weights; antipodal pairs are distinct atoms.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Build a measure from (normal, weight) pairs. Normals are normalized;
    /// zero normals and non-positive weights are rejected.
    pub fn new(
        dim: usize,
        atoms: Vec<(DVector<f64>, f64)>,
    ) -> Result<DiscreteMeasure, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::TooFewAtoms { need: 1, have: 0 });
        }
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for (u, w) in atoms {
            if u.len() != dim {
                return Err(MeasureError::DimensionMismatch);
            }
            if !(w > 0.0) {
                return Err(MeasureError::NonPositiveWeight(w));
            }
            let norm = u.norm();
            if norm <= 1e-14 {
                return Err(MeasureError::ZeroNormal);
            }
            let unit = u / norm;
            if let Some(existing) = merged
                .iter_mut()
                .find(|a| (&a.normal - &unit).norm() <= DUPLICATE_ANGLE_TOL)
            {
                existing.weight += w;
            } else {
                merged.push(Atom { normal: unit, weight: w });
            }
        }
        Ok(DiscreteMeasure { dim, atoms: merged })
    }

    /// Convenience constructor from plain rows, mostly for tests and docs.
    pub fn from_rows(dim: usize, rows: &[(Vec<f64>, f64)]) -> Result<DiscreteMeasure, MeasureError> {
        Self::new(
            dim,
            rows.iter()
                .map(|(u, w)| (DVector::from_row_slice(u), *w))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn normals(&self) -> Vec<DVector<f64>> {
        self.atoms.iter().map(|a| a.normal.clone()).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    /// Total mass `|μ| = Σ γ_k`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Measure with all weights multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> DiscreteMeasure {
        assert!(c > 0.0);
        DiscreteMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    normal: a.normal.clone(),
                    weight: a.weight * c,
                })
                .collect(),
        }
    }

    /// Measure with all normals rotated by an orthogonal matrix.
    pub fn rotated(&self, q: &DMatrix<f64>) -> DiscreteMeasure {
        DiscreteMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    normal: (q * &a.normal).normalize(),
                    weight: a.weight,
                })
                .collect(),
        }
    }

    /// Weight of the atom matching `u` within `tol` in Euclidean distance
    /// between unit vectors (first-order equal to the angle).
    pub fn weight_at(&self, u: &DVector<f64>, tol: f64) -> Option<f64> {
        self.atoms
            .iter()
            .find(|a| (&a.normal - u).norm() <= tol)
            .map(|a| a.weight)
    }
}

/// True iff there is a direction `v != 0` with `v·u_k <= 0` for all atoms.
pub fn is_hemisphere_concentrated(m: &DiscreteMeasure) -> bool {
    hemisphere::is_concentrated(&m.normals())
}

/// Full hemisphere test with witness extraction.
pub fn hemisphere_status(m: &DiscreteMeasure) -> HemisphereStatus {
    hemisphere::hemisphere_status(&m.normals())
}

/// True iff every subset of at most `n` normals is linearly independent.
/// Requires at least `n` atoms.
pub fn is_general_position(m: &DiscreteMeasure) -> Result<bool, MeasureError> {
    let n = m.dim;
    if m.len() < n {
        return Err(MeasureError::TooFewAtoms {
            need: n,
            have: m.len(),
        });
    }
    let normals = m.normals();
    for size in 2..=n {
        let mut subset = vec![0usize; size];
        if !all_subsets_independent(&normals, size, 0, 0, &mut subset) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn all_subsets_independent(
    normals: &[DVector<f64>],
    size: usize,
    start: usize,
    k: usize,
    subset: &mut Vec<usize>,
) -> bool {
    if k == size {
        let cols: Vec<DVector<f64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        let m = linalg::columns(&cols);
        return linalg::rank(&m, linalg::RANK_REL_TOL) == size;
    }
    for i in start..normals.len() {
        subset[k] = i;
        if !all_subsets_independent(normals, size, i + 1, k + 1, subset) {
            return false;
        }
    }
    true
}

/// Status of one subspace against the concentration bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceStatus {
    Strict,
    Equality,
    Violated,
}

/// One essential subspace with its mass, bound and classification.
#[derive(Debug, Clone)]
pub struct SubspaceReport {
    /// Orthonormal basis of ξ, one column per dimension.
    pub basis: DMatrix<f64>,
    pub dim_xi: usize,
    pub essential: bool,
    /// μ(ξ ∩ S^{n-1}).
    pub mass: f64,
    /// (dim ξ / n) · μ(S^{n-1}).
    pub bound: f64,
    pub status: SubspaceStatus,
    /// Complementary equality subspace, filled in by
    /// [`classify_concentration`] for equality cases.
    pub partner: Option<Box<SubspaceReport>>,
    /// Indices of the atoms lying in ξ.
    pub atom_indices: Vec<usize>,
}

/// Resource guard for the subspace enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationGuard {
    pub max_atoms: usize,
    pub max_dim: usize,
}

impl Default for EnumerationGuard {
    fn default() -> Self {
        EnumerationGuard {
            max_atoms: 32,
            max_dim: 6,
        }
    }
}

/// Enumerate the essential subspaces of `m`: spans of atom subsets of
/// dimension 1..n-1 whose atoms surround the origin within the subspace.
/// For a measure in general position the list is empty.
pub fn enumerate_essential_subspaces(
    m: &DiscreteMeasure,
) -> Result<Vec<SubspaceReport>, MeasureError> {
    enumerate_essential_subspaces_guarded(m, EnumerationGuard::default())
}

pub fn enumerate_essential_subspaces_guarded(
    m: &DiscreteMeasure,
    guard: EnumerationGuard,
) -> Result<Vec<SubspaceReport>, MeasureError> {
    let n = m.dim;
    if n < 2 {
        return Ok(Vec::new());
    }
    if m.len() > guard.max_atoms || n > guard.max_dim {
        return Err(MeasureError::EnumerationGuard {
            atoms: m.len(),
            dim: n,
            max_atoms: guard.max_atoms,
            max_dim: guard.max_dim,
        });
    }

    let normals = m.normals();
    let total = m.total_mass();
    let tol = 1e-9 * total;

    let mut reports: Vec<SubspaceReport> = Vec::new();
    let mut projectors: Vec<DMatrix<f64>> = Vec::new();

    // Spans of independent subsets of size 1..n-1 cover every candidate:
    // an essential subspace equals the span of its atoms.
    let max_size = (n - 1).min(m.len());
    for size in 1..=max_size {
        let mut subset = vec![0usize; size];
        enumerate_subsets(normals.len(), size, 0, 0, &mut subset, &mut |subset| {
            let cols: Vec<DVector<f64>> = subset.iter().map(|&i| normals[i].clone()).collect();
            let basis = linalg::span_basis(&cols, linalg::RANK_REL_TOL);
            let d = basis.ncols();
            if d != size || d == 0 || d >= n {
                // Dependent subsets span a space already covered by a
                // smaller subset.
                return;
            }
            let proj = linalg::projector(&basis);
            if projectors
                .iter()
                .any(|p| linalg::projector_distance(p, &proj) <= SUBSPACE_MEMBER_TOL)
            {
                return;
            }
            projectors.push(proj);
            if let Some(report) = subspace_report(m, basis, total, tol) {
                reports.push(report);
            }
        });
    }

    reports.sort_by(|a, b| {
        a.dim_xi
            .cmp(&b.dim_xi)
            .then_with(|| basis_lex_cmp(&a.basis, &b.basis))
    });
    Ok(reports)
}

fn enumerate_subsets(
    n: usize,
    size: usize,
    start: usize,
    k: usize,
    subset: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if k == size {
        f(subset);
        return;
    }
    for i in start..n {
        subset[k] = i;
        enumerate_subsets(n, size, i + 1, k + 1, subset, f);
    }
}

fn basis_lex_cmp(a: &DMatrix<f64>, b: &DMatrix<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Build the report for one candidate subspace; `None` when it is not
/// essential.
fn subspace_report(
    m: &DiscreteMeasure,
    basis: DMatrix<f64>,
    total: f64,
    tol: f64,
) -> Option<SubspaceReport> {
    let d = basis.ncols();
    let atom_indices: Vec<usize> = m
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| linalg::distance_to_span(&basis, &a.normal) <= SUBSPACE_MEMBER_TOL)
        .map(|(i, _)| i)
        .collect();
    if atom_indices.is_empty() {
        return None;
    }
    // Essential iff the atoms in ξ surround the origin within ξ: run the
    // hemisphere test in intrinsic coordinates.
    let intrinsic: Vec<DVector<f64>> = atom_indices
        .iter()
        .map(|&i| (basis.transpose() * &m.atoms[i].normal).normalize())
        .collect();
    if hemisphere::is_concentrated(&intrinsic) {
        return None;
    }
    let mass: f64 = atom_indices.iter().map(|&i| m.atoms[i].weight).sum();
    let bound = (d as f64 / m.dim as f64) * total;
    let status = if mass < bound - tol {
        SubspaceStatus::Strict
    } else if mass > bound + tol {
        SubspaceStatus::Violated
    } else {
        SubspaceStatus::Equality
    };
    Some(SubspaceReport {
        basis,
        dim_xi: d,
        essential: true,
        mass,
        bound,
        status,
        partner: None,
        atom_indices,
    })
}

/// Aggregate verdict of the concentration condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionStatus {
    /// Every essential subspace satisfies the bound strictly (vacuously for
    /// general-position measures).
    StrictOk,
    /// Equalities occur and each has a complementary equality partner
    /// covering the support.
    EqualityOk,
    Fail,
}

#[derive(Debug, Clone)]
pub struct ConditionVerdict {
    pub hemisphere_ok: bool,
    pub general_position: bool,
    pub status: ConditionStatus,
    /// All essential subspaces found, with partners attached to equality
    /// reports when they exist.
    pub witnesses: Vec<SubspaceReport>,
}

/// Evaluate the essential subspace concentration condition. The measure
/// must not be concentrated on a closed hemisphere; that failure is
/// reported as a distinct error carrying the witness direction.
pub fn classify_concentration(m: &DiscreteMeasure) -> Result<ConditionVerdict, MeasureError> {
    if let HemisphereStatus::Concentrated { witness } = hemisphere_status(m) {
        return Err(MeasureError::HemisphereConcentrated {
            witness: witness.iter().copied().collect(),
        });
    }
    let n = m.dim;
    let general_position = if m.len() >= n {
        is_general_position(m)?
    } else {
        false
    };
    if n == 1 {
        return Ok(ConditionVerdict {
            hemisphere_ok: true,
            general_position,
            status: ConditionStatus::StrictOk,
            witnesses: Vec::new(),
        });
    }

    let mut reports = enumerate_essential_subspaces(m)?;
    let total = m.total_mass();
    let tol = 1e-9 * total;

    let mut any_violated = false;
    let mut any_equality = false;
    let mut equality_unpaired = false;
    for report in reports.iter_mut() {
        match report.status {
            SubspaceStatus::Violated => any_violated = true,
            SubspaceStatus::Equality => {
                any_equality = true;
                match find_equality_partner(m, report, total, tol) {
                    Some(partner) => report.partner = Some(Box::new(partner)),
                    None => equality_unpaired = true,
                }
            }
            SubspaceStatus::Strict => {}
        }
    }
    let status = if any_violated || equality_unpaired {
        ConditionStatus::Fail
    } else if any_equality {
        ConditionStatus::EqualityOk
    } else {
        ConditionStatus::StrictOk
    };
    Ok(ConditionVerdict {
        hemisphere_ok: true,
        general_position,
        status,
        witnesses: reports,
    })
}

/// Search a complementary subspace ξ' with equality mass among spans of the
/// atoms outside ξ, requiring the union to cover the support.
fn find_equality_partner(
    m: &DiscreteMeasure,
    report: &SubspaceReport,
    total: f64,
    tol: f64,
) -> Option<SubspaceReport> {
    let n = m.dim;
    let d = report.dim_xi;
    let d_prime = n - d;
    let outside: Vec<usize> = (0..m.len())
        .filter(|i| !report.atom_indices.contains(i))
        .collect();
    if outside.len() < d_prime {
        return None;
    }

    let normals = m.normals();
    let mut candidates: Vec<DMatrix<f64>> = Vec::new();
    let mut projectors: Vec<DMatrix<f64>> = Vec::new();
    let mut subset = vec![0usize; d_prime];
    enumerate_subsets(outside.len(), d_prime, 0, 0, &mut subset, &mut |subset| {
        let cols: Vec<DVector<f64>> = subset.iter().map(|&j| normals[outside[j]].clone()).collect();
        let basis = linalg::span_basis(&cols, linalg::RANK_REL_TOL);
        if basis.ncols() != d_prime {
            return;
        }
        let proj = linalg::projector(&basis);
        if projectors
            .iter()
            .any(|p| linalg::projector_distance(p, &proj) <= SUBSPACE_MEMBER_TOL)
        {
            return;
        }
        projectors.push(proj);
        candidates.push(basis);
    });
    candidates.sort_by(basis_lex_cmp);

    for basis in candidates {
        // Complementary: joint span must be all of R^n.
        let mut joint: Vec<DVector<f64>> = (0..d).map(|j| report.basis.column(j).clone_owned()).collect();
        joint.extend((0..d_prime).map(|j| basis.column(j).clone_owned()));
        if linalg::rank(&linalg::columns(&joint), linalg::RANK_REL_TOL) != n {
            continue;
        }
        let atom_indices: Vec<usize> = m
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| linalg::distance_to_span(&basis, &a.normal) <= SUBSPACE_MEMBER_TOL)
            .map(|(i, _)| i)
            .collect();
        let mass: f64 = atom_indices.iter().map(|&i| m.atoms[i].weight).sum();
        let bound = (d_prime as f64 / n as f64) * total;
        if (mass - bound).abs() > tol {
            continue;
        }
        // The support must be covered by ξ ∪ ξ'.
        let covered = (0..m.len()).all(|i| report.atom_indices.contains(&i) || atom_indices.contains(&i));
        if !covered {
            continue;
        }
        let essential = {
            let intrinsic: Vec<DVector<f64>> = atom_indices
                .iter()
                .map(|&i| (basis.transpose() * &m.atoms[i].normal).normalize())
                .collect();
            !hemisphere::is_concentrated(&intrinsic)
        };
        return Some(SubspaceReport {
            basis,
            dim_xi: d_prime,
            essential,
            mass,
            bound,
            status: SubspaceStatus::Equality,
            partner: None,
            atom_indices,
        });
    }
    None
}

/// Write `u` as a nonnegative combination of at most `dim lin(supp)` atoms
/// with coefficients bounded by `1/r`, where `r` is the inradius of
/// `conv(supp)` about the origin. Realized by intersecting the ray through
/// `u` with the boundary of the convex hull of the atoms.
pub fn positive_decomposition(
    u: &DVector<f64>,
    m: &DiscreteMeasure,
) -> Result<Vec<(usize, f64)>, MeasureError> {
    let normals = m.normals();
    let span = linalg::span_basis(&normals, linalg::RANK_REL_TOL);
    let d = span.ncols();
    if linalg::distance_to_span(&span, u) > SUBSPACE_MEMBER_TOL {
        return Err(MeasureError::NotInSpan);
    }
    let intrinsic: Vec<DVector<f64>> = normals.iter().map(|v| span.transpose() * v).collect();
    let q = (span.transpose() * u).normalize();
    if hemisphere::is_concentrated(&intrinsic) {
        let witness = match hemisphere::hemisphere_status(&intrinsic) {
            HemisphereStatus::Concentrated { witness } => witness.iter().copied().collect(),
            _ => Vec::new(),
        };
        return Err(MeasureError::HemisphereConcentrated { witness });
    }

    if d == 1 {
        let i = intrinsic
            .iter()
            .position(|p| (p[0] - q[0]).abs() <= 1e-9)
            .ok_or(MeasureError::NotInSpan)?;
        return Ok(vec![(i, 1.0)]);
    }

    let hull = convex_hull(&intrinsic, 1e-9)
        .map_err(|e| MeasureError::Numerical(format!("support hull: {e}")))?;

    // Facets ordered by the ray parameter t with t u ∈ facet plane.
    let mut hits: Vec<(f64, usize)> = Vec::new();
    for (fi, f) in hull.facets.iter().enumerate() {
        let denom = f.normal.dot(&q);
        if denom > 1e-12 {
            hits.push((f.offset / denom, fi));
        }
    }
    hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    for (t, fi) in hits {
        let f = &hull.facets[fi];
        // Barycentric coordinates of t·q in the facet simplex: the d+1
        // equations (coordinates plus the affine constraint) in d unknowns
        // are consistent, solved through the normal equations.
        let mut sys = DMatrix::zeros(d + 1, d);
        let mut rhs = DVector::zeros(d + 1);
        for (j, &vid) in f.vertices.iter().enumerate() {
            for i in 0..d {
                sys[(i, j)] = intrinsic[vid][i];
            }
            sys[(d, j)] = 1.0;
        }
        for i in 0..d {
            rhs[i] = t * q[i];
        }
        rhs[d] = 1.0;
        let gram = sys.transpose() * &sys;
        let Some(alpha) = gram.lu().solve(&(sys.transpose() * &rhs)) else {
            continue;
        };
        if alpha.iter().any(|&a| a < -1e-9) {
            continue;
        }
        let mut out: Vec<(usize, f64)> = Vec::new();
        for (j, &vid) in f.vertices.iter().enumerate() {
            let c = (alpha[j] / t).max(0.0);
            if c > 1e-12 {
                out.push((vid, c));
            }
        }
        // Validate the decomposition before returning it.
        let mut recon = DVector::zeros(m.dim);
        for &(i, c) in &out {
            recon += &normals[i] * c;
        }
        if (recon - u).norm() <= 1e-9 {
            return Ok(out);
        }
    }
    Err(MeasureError::Numerical(
        "ray-facet intersection failed to produce a valid decomposition".into(),
    ))
}

/// Largest coefficient bound `1/r` from the positive hull decomposition:
/// the reciprocal inradius of `conv(supp)` about the origin, in the
/// intrinsic coordinates of `lin(supp)`.
pub fn decomposition_bound(m: &DiscreteMeasure) -> Result<f64, MeasureError> {
    let normals = m.normals();
    let span = linalg::span_basis(&normals, linalg::RANK_REL_TOL);
    let d = span.ncols();
    let intrinsic: Vec<DVector<f64>> = normals.iter().map(|v| span.transpose() * v).collect();
    if hemisphere::is_concentrated(&intrinsic) {
        return Err(MeasureError::HemisphereConcentrated { witness: Vec::new() });
    }
    if d == 1 {
        return Ok(1.0);
    }
    let hull = convex_hull(&intrinsic, 1e-9)
        .map_err(|e| MeasureError::Numerical(format!("support hull: {e}")))?;
    let r = hull
        .facets
        .iter()
        .map(|f| f.offset)
        .fold(f64::INFINITY, f64::min);
    if r <= 0.0 {
        return Err(MeasureError::Numerical("non-positive inradius".into()));
    }
    Ok(1.0 / r)
}

/// Restriction of `m` to the subspace spanned by an orthonormal basis,
/// expressed in the intrinsic coordinates of that basis.
pub fn restrict(m: &DiscreteMeasure, basis: &DMatrix<f64>) -> Result<DiscreteMeasure, MeasureError> {
    if basis.nrows() != m.dim {
        return Err(MeasureError::DimensionMismatch);
    }
    if !linalg::is_orthonormal(basis, 1e-9) {
        return Err(MeasureError::BasisNotOrthonormal);
    }
    let mut atoms = Vec::new();
    for a in &m.atoms {
        if linalg::distance_to_span(basis, &a.normal) <= SUBSPACE_MEMBER_TOL {
            atoms.push(((basis.transpose() * &a.normal).normalize(), a.weight));
        }
    }
    if atoms.is_empty() {
        return Err(MeasureError::NoAtomsInSubspace);
    }
    DiscreteMeasure::new(basis.ncols(), atoms)
}
