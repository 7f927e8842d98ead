//! JSON schemas for measures and polytopes.
//!
//! Measure: `{ "dim": n, "atoms": [ { "u": [..n floats..], "gamma": g } ] }`
//! — normals are normalized on load, `gamma <= 0` is rejected.
//!
//! Polytope: `{ "dim": n, "halfspaces": [ { "u": [...], "h": h } ],
//! "vertices": [[...]], "facets": [ { "k": k, "area": a } ], "volume": v }`
//! — writers always emit the derived data; readers rebuild the polytope
//! from the halfspaces and verify the recomputed data against the file
//! within 1e-6.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Polytope};
use crate::measure::{DiscreteMeasure, MeasureError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("stored {field} disagrees with recomputed value ({stored} vs {computed})")]
    Verification {
        field: &'static str,
        stored: f64,
        computed: f64,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MeasureJson {
    pub dim: usize,
    pub atoms: Vec<AtomJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtomJson {
    pub u: Vec<f64>,
    pub gamma: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub halfspaces: Vec<HalfspaceJson>,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<FacetJson>,
    pub volume: f64,
    /// Extra diagnostics (e.g. solver residual); absent unless a producer
    /// fills it in. Readers ignore it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HalfspaceJson {
    pub u: Vec<f64>,
    pub h: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FacetJson {
    pub k: usize,
    pub area: f64,
}

pub fn measure_to_json(m: &DiscreteMeasure) -> MeasureJson {
    MeasureJson {
        dim: m.dim(),
        atoms: m
            .atoms()
            .iter()
            .map(|a| AtomJson {
                u: a.normal.iter().copied().collect(),
                gamma: a.weight,
            })
            .collect(),
    }
}

pub fn measure_from_json(j: &MeasureJson) -> Result<DiscreteMeasure, IoError> {
    let atoms = j
        .atoms
        .iter()
        .map(|a| (DVector::from_row_slice(&a.u), a.gamma))
        .collect();
    Ok(DiscreteMeasure::new(j.dim, atoms)?)
}

pub fn read_measure(text: &str) -> Result<DiscreteMeasure, IoError> {
    let j: MeasureJson = serde_json::from_str(text)?;
    measure_from_json(&j)
}

pub fn write_measure(m: &DiscreteMeasure) -> String {
    serde_json::to_string_pretty(&measure_to_json(m)).expect("measure serialization")
}

pub fn polytope_to_json(p: &Polytope) -> PolytopeJson {
    PolytopeJson {
        dim: p.dim(),
        halfspaces: p
            .halfspaces()
            .iter()
            .map(|hs| HalfspaceJson {
                u: hs.normal.iter().copied().collect(),
                h: hs.support,
            })
            .collect(),
        vertices: p
            .vertices()
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect(),
        facets: p
            .facets()
            .iter()
            .map(|f| FacetJson {
                k: f.normal_index,
                area: f.area,
            })
            .collect(),
        volume: p.volume(),
        residual: None,
    }
}

/// Rebuild the polytope from the stored halfspaces and verify the derived
/// data in the file against the recomputation within 1e-6.
pub fn polytope_from_json(j: &PolytopeJson) -> Result<Polytope, IoError> {
    let normals: Vec<DVector<f64>> = j
        .halfspaces
        .iter()
        .map(|hs| DVector::from_row_slice(&hs.u))
        .collect();
    let supports: Vec<f64> = j.halfspaces.iter().map(|hs| hs.h).collect();
    let p = Polytope::from_support(&normals, &supports)?;

    let tol = 1e-6 * (1.0 + p.volume().abs());
    if (p.volume() - j.volume).abs() > tol {
        return Err(IoError::Verification {
            field: "volume",
            stored: j.volume,
            computed: p.volume(),
        });
    }
    for fj in &j.facets {
        let computed = p.facet_area(fj.k);
        if (computed - fj.area).abs() > 1e-6 * (1.0 + computed.abs()) {
            return Err(IoError::Verification {
                field: "facet area",
                stored: fj.area,
                computed,
            });
        }
    }
    Ok(p)
}

pub fn read_polytope(text: &str) -> Result<Polytope, IoError> {
    let j: PolytopeJson = serde_json::from_str(text)?;
    polytope_from_json(&j)
}

pub fn write_polytope(p: &Polytope) -> String {
    serde_json::to_string_pretty(&polytope_to_json(p)).expect("polytope serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_round_trip_merges_and_normalizes() {
        let text = r#"{
            "dim": 2,
            "atoms": [
                { "u": [2.0, 0.0], "gamma": 1.0 },
                { "u": [1.0, 0.0], "gamma": 0.5 },
                { "u": [0.0, -3.0], "gamma": 2.0 }
            ]
        }"#;
        let m = read_measure(text).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.total_mass() - 3.5).abs() < 1e-12);
        let back = read_measure(&write_measure(&m)).unwrap();
        assert_eq!(back.len(), 2);
    }

    #[test]
    fn loader_rejects_nonpositive_gamma() {
        let text = r#"{ "dim": 2, "atoms": [ { "u": [1.0, 0.0], "gamma": 0.0 } ] }"#;
        assert!(read_measure(text).is_err());
    }

    #[test]
    fn polytope_round_trip_verifies() {
        let square = Polytope::from_support(
            &[
                DVector::from_row_slice(&[1.0, 0.0]),
                DVector::from_row_slice(&[-1.0, 0.0]),
                DVector::from_row_slice(&[0.0, 1.0]),
                DVector::from_row_slice(&[0.0, -1.0]),
            ],
            &[1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        let text = write_polytope(&square);
        let p = read_polytope(&text).unwrap();
        assert!((p.volume() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn polytope_reader_rejects_tampered_volume() {
        let square = Polytope::from_support(
            &[
                DVector::from_row_slice(&[1.0, 0.0]),
                DVector::from_row_slice(&[-1.0, 0.0]),
                DVector::from_row_slice(&[0.0, 1.0]),
                DVector::from_row_slice(&[0.0, -1.0]),
            ],
            &[1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        let mut j = polytope_to_json(&square);
        j.volume = 5.0;
        assert!(polytope_from_json(&j).is_err());
    }
}
