//! Outer variational descent: minimize `h ↦ max_ξ Φ_{P(h)}(ξ)` over support
//! vectors of unit-volume polytopes. At the minimizer the cone-volume
//! measure of the polytope equals the target measure, which is the content
//! of the Euler–Lagrange identity `γ_k = (1/n) h_k |F_k|`.
//!
//! The iterate is kept canonical — recentred so the log-center sits at the
//! origin, then rescaled to unit volume — because the gradient formula
//! `g_k = γ_k/h_k − |F_k|/n` assumes both. The optimization variable is
//! `z = log h`, which keeps supports positive without projection; in these
//! coordinates the gradient is exactly the per-atom cone-mass defect
//! `γ_k − (1/n) h_k |F_k|`.

use std::time::Instant;

use nalgebra::DVector;
use thiserror::Error;

use crate::geometry::{GeometryError, Polytope};
use crate::logcenter::{self, LogCenterError};
use crate::measure::{
    classify_concentration, ConditionStatus, DiscreteMeasure, MeasureError,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("measure does not satisfy the strict condition: {0}")]
    Precondition(String),
    #[error("descent did not reach the residual tolerance within {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        trace: Box<SolveTrace>,
    },
    #[error("iterate diameter exceeded the divergence guard (1e6); check for near-equality subspaces")]
    DiameterGuard,
    #[error("a measure normal is missing from the polytope constraints")]
    NormalMismatch,
    #[error("converged polytope is missing facet {index} (area {area:.3e})")]
    MissingFacet { index: usize, area: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    LogCenter(#[from] LogCenterError),
}

/// Options for the outer descent.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Convergence threshold on the relative cone-mass error (∞-norm).
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Initial step size, reset at every iteration before backtracking.
    pub step0: f64,
    /// Recorded for reproducibility bookkeeping; the descent itself is
    /// deterministic.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            residual_tol: 1e-8,
            max_iter: 5000,
            step0: 1.0,
            seed: 0,
        }
    }
}

/// Per-iteration record of the outer descent.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub objective: f64,
    pub residual_inf: f64,
    pub step: f64,
    pub min_support: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SolveTrace {
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    pub wall_time: f64,
}

const ARMIJO_C: f64 = 1e-4;
const DIAMETER_GUARD: f64 = 1e6;

/// Canonical state of the iterate: support vector with unit volume and
/// log-center at the origin, plus the polytope and objective value.
struct Canonical {
    h: DVector<f64>,
    polytope: Polytope,
    objective: f64,
}

fn canonicalize(
    normals: &[DVector<f64>],
    h: &DVector<f64>,
    m_unit: &DiscreteMeasure,
) -> Result<Canonical, SolveError> {
    let supports: Vec<f64> = h.iter().copied().collect();
    let p = Polytope::from_support(normals, &supports)?;
    let lc = logcenter::log_center(&p, m_unit)?;

    // Recentre, then normalize the volume (Φ shifts by log λ · |μ| = log λ).
    let mut h_shift = DVector::zeros(h.len());
    for (k, u) in normals.iter().enumerate() {
        let v = h[k] - lc.xi.dot(u);
        if !(v > 0.0) {
            return Err(SolveError::Geometry(GeometryError::Degenerate(
                "recentred support became non-positive".into(),
            )));
        }
        h_shift[k] = v;
    }
    let p = p.translate(&(-&lc.xi));
    let lambda = p.volume().powf(-1.0 / p.dim() as f64);
    let p = p.scale(lambda);
    let h_canon = h_shift * lambda;
    let objective = lc.phi_value + lambda.ln();
    Ok(Canonical {
        h: h_canon,
        polytope: p,
        objective,
    })
}

/// The normalized extremal objective: build `P(h)`, rescale to unit volume,
/// and return Φ at the log-center. Invariant under `h → c·h` and under
/// replacing `h` by the supports of a translate of the same body.
pub fn objective(h: &DVector<f64>, m: &DiscreteMeasure) -> Result<f64, SolveError> {
    let m_unit = m.scaled(1.0 / m.total_mass());
    let normals = m_unit.normals();
    Ok(canonicalize(&normals, h, &m_unit)?.objective)
}

/// Gradient of the objective in the support variables, evaluated at the
/// canonical representative of `h` (unit volume, log-center at the origin):
/// `g_k = γ_k / h_k − |F_k| / n`. The envelope theorem kills the ξ'(0)
/// term, and vanished facets contribute `|F_k| = 0`, leaving the positive
/// pull `γ_k / h_k` that brings the support back down.
pub fn objective_gradient(
    h: &DVector<f64>,
    m: &DiscreteMeasure,
) -> Result<DVector<f64>, SolveError> {
    let m_unit = m.scaled(1.0 / m.total_mass());
    let normals = m_unit.normals();
    let canon = canonicalize(&normals, h, &m_unit)?;
    let n = m.dim() as f64;
    let mut g = DVector::zeros(h.len());
    for (k, a) in m_unit.atoms().iter().enumerate() {
        g[k] = a.weight / canon.h[k] - canon.polytope.facet_area(k) / n;
    }
    Ok(g)
}

/// ∞-norm of the relative cone-mass error of `p` against `m`, with missing
/// facets counted as mass zero. Every atom of `m` must match a constraint
/// normal of `p` within 1e-9.
pub fn residual(p: &Polytope, m: &DiscreteMeasure) -> Result<f64, SolveError> {
    let mut worst = 0.0f64;
    for a in m.atoms() {
        let k = p
            .halfspaces()
            .iter()
            .position(|hs| (&hs.normal - &a.normal).norm() <= 1e-9)
            .ok_or(SolveError::NormalMismatch)?;
        let mass = p.cone_mass(k);
        worst = worst.max((mass - a.weight).abs() / a.weight);
    }
    Ok(worst)
}

/// Solve the strict-case logarithmic Minkowski problem: find a polytope
/// with constraint normals `supp(m)`, log-center at the origin and volume
/// `|μ|`, whose cone-volume measure is `m`. Requires
/// `classify_concentration(m) = StrictOk`.
pub fn solve_strict(
    m: &DiscreteMeasure,
    opts: &SolveOptions,
) -> Result<(Polytope, SolveTrace), SolveError> {
    let verdict = classify_concentration(m)?;
    if verdict.status != ConditionStatus::StrictOk {
        return Err(SolveError::Precondition(format!(
            "classification is {:?}",
            verdict.status
        )));
    }
    solve_strict_unchecked(m, opts)
}

/// The descent itself, without re-running the classification (the splitter
/// has already established the strict case when it routes here).
pub fn solve_strict_unchecked(
    m: &DiscreteMeasure,
    opts: &SolveOptions,
) -> Result<(Polytope, SolveTrace), SolveError> {
    let start = Instant::now();
    let total = m.total_mass();
    let m_unit = m.scaled(1.0 / total);
    let normals = m_unit.normals();
    let n = m.dim();
    let nf = n as f64;

    let mut trace = SolveTrace::default();
    let mut state = canonicalize(&normals, &DVector::from_element(normals.len(), 1.0), &m_unit)?;
    let mut last_step = 0.0f64;
    let mut converged = false;

    for _iter in 0..opts.max_iter {
        if state.polytope.diameter() > DIAMETER_GUARD {
            return Err(SolveError::DiameterGuard);
        }
        // Residual and z-gradient share the cone-mass defect γ_k - V_k.
        let mut res = 0.0f64;
        let mut gz = DVector::zeros(normals.len());
        for (k, a) in m_unit.atoms().iter().enumerate() {
            let mass = state.polytope.cone_mass(k);
            gz[k] = a.weight - mass;
            res = res.max((mass - a.weight).abs() / a.weight);
        }
        trace.iterations.push(IterationRecord {
            objective: state.objective,
            residual_inf: res,
            step: last_step,
            min_support: state.h.min(),
        });
        if res <= opts.residual_tol {
            converged = true;
            break;
        }

        let g2 = gz.norm_squared();
        let mut t = opts.step0;
        let mut accepted = None;
        for _ in 0..60 {
            let h_try = DVector::from_fn(state.h.len(), |k, _| state.h[k] * (-t * gz[k]).exp());
            match canonicalize(&normals, &h_try, &m_unit) {
                Ok(next) => {
                    if next.objective <= state.objective - ARMIJO_C * t * g2 {
                        accepted = Some((next, t));
                        break;
                    }
                }
                Err(SolveError::Geometry(_)) | Err(SolveError::LogCenter(_)) => {
                    // Step left the feasible region; shrink.
                }
                Err(e) => return Err(e),
            }
            t *= 0.5;
        }
        match accepted {
            Some((next, t)) => {
                state = next;
                last_step = t;
            }
            None => break,
        }
    }

    trace.converged = converged;
    trace.wall_time = start.elapsed().as_secs_f64();
    if !converged {
        let iterations = trace.iterations.len();
        return Err(SolveError::NonConvergence {
            iterations,
            trace: Box::new(trace),
        });
    }

    // Rescale to V = |μ| and recentre exactly once more.
    let p = state.polytope.scale(total.powf(1.0 / nf));
    let lc = logcenter::log_center(&p, &m_unit)?;
    let p = p.translate(&(-&lc.xi));

    // Minimizers have all N facets (the paper's cut-volume argument); a
    // missing facet at convergence signals a misclassified input.
    for (k, f) in p.facets().iter().enumerate() {
        if f.area <= 1e-10 {
            return Err(SolveError::MissingFacet {
                index: k,
                area: f.area,
            });
        }
    }
    Ok((p, trace))
}
