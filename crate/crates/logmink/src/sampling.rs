//! Seeded random generators for sweeps and regression batteries: unit
//! vectors, rotations, bounded random polytopes, and measure families with
//! prescribed concentration behaviour. Everything is deterministic given
//! the RNG state.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::geometry::Polytope;
use crate::hemisphere;
use crate::measure::{
    classify_concentration, enumerate_essential_subspaces, is_general_position, ConditionStatus,
    DiscreteMeasure,
};

/// Standard normal sample by Box–Muller.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform unit vector (Gaussian normalization).
pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Random orthogonal matrix (QR of a Gaussian matrix).
pub fn random_rotation<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let a = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
        let qr = a.qr();
        let q = qr.q();
        if q.determinant().abs() > 0.5 {
            return q;
        }
    }
}

/// Random bounded polytope: `num_normals` Gaussian-normalized directions
/// (resampled until they surround the origin) with supports uniform in
/// [0.5, 2].
pub fn random_polytope<R: Rng>(rng: &mut R, n: usize, num_normals: usize) -> Polytope {
    assert!(num_normals > n);
    loop {
        let normals: Vec<DVector<f64>> = (0..num_normals).map(|_| unit_vector(rng, n)).collect();
        if hemisphere::is_concentrated(&normals) {
            continue;
        }
        let supports: Vec<f64> = (0..num_normals).map(|_| rng.gen_range(0.5..2.0)).collect();
        if let Ok(p) = Polytope::from_support(&normals, &supports) {
            return p;
        }
    }
}

/// Random measure whose support is in general position and surrounds the
/// origin; weights uniform in [0.5, 2].
pub fn random_general_position_measure<R: Rng>(
    rng: &mut R,
    n: usize,
    num_atoms: usize,
) -> DiscreteMeasure {
    assert!(num_atoms > n);
    loop {
        let atoms: Vec<(DVector<f64>, f64)> = (0..num_atoms)
            .map(|_| (unit_vector(rng, n), rng.gen_range(0.5..2.0)))
            .collect();
        let Ok(m) = DiscreteMeasure::new(n, atoms) else { continue };
        if is_hemi_free(&m) && is_general_position(&m).unwrap_or(false) {
            return m;
        }
    }
}

fn is_hemi_free(m: &DiscreteMeasure) -> bool {
    !hemisphere::is_concentrated(&m.normals())
}

/// Random measure containing at least one essential subspace, all of them
/// strictly below the concentration bound: `d+1` atoms surrounding the
/// origin inside a random `d`-dimensional subspace carrying a strict
/// fraction of the mass, plus generic atoms outside. Validated by
/// `classify_concentration` before being returned.
pub fn random_strict_essential_measure<R: Rng>(rng: &mut R, n: usize) -> DiscreteMeasure {
    assert!(n >= 2);
    'outer: loop {
        let d = if n == 2 { 1 } else { rng.gen_range(1..n) };
        let rot = random_rotation(rng, n);
        let basis = rot.columns(0, d).into_owned();

        // d+1 directions surrounding the origin inside the subspace.
        let inside_dirs: Vec<DVector<f64>> = loop {
            let dirs: Vec<DVector<f64>> = (0..d + 1).map(|_| unit_vector(rng, d)).collect();
            if !hemisphere::is_concentrated(&dirs) {
                break dirs;
            }
        };

        // Strict mass fraction: between 30% and 80% of the bound d/n.
        let frac = rng.gen_range(0.3..0.8) * d as f64 / n as f64;
        let raw: Vec<f64> = (0..d + 1).map(|_| rng.gen_range(0.5..2.0)).collect();
        let raw_sum: f64 = raw.iter().sum();

        let mut atoms: Vec<(DVector<f64>, f64)> = inside_dirs
            .iter()
            .zip(raw.iter())
            .map(|(dir, &w)| (&basis * dir, frac * w / raw_sum))
            .collect();

        let outside_count = n + 1 + rng.gen_range(0..3) as usize;
        let raw_out: Vec<f64> = (0..outside_count).map(|_| rng.gen_range(0.5..2.0)).collect();
        let out_sum: f64 = raw_out.iter().sum();
        for w in raw_out {
            atoms.push((unit_vector(rng, n), (1.0 - frac) * w / out_sum));
        }

        let Ok(m) = DiscreteMeasure::new(n, atoms) else { continue };
        if !is_hemi_free(&m) {
            continue;
        }
        match classify_concentration(&m) {
            Ok(v) if v.status == ConditionStatus::StrictOk => {
                match enumerate_essential_subspaces(&m) {
                    Ok(reports) if !reports.is_empty() => return m,
                    _ => continue 'outer,
                }
            }
            _ => continue,
        }
    }
}
