use super::*;
use crate::solver;
use nalgebra::dvector;

fn e(i: usize, n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn box_measure(n: usize, w: f64) -> DiscreteMeasure {
    DiscreteMeasure::new(
        n,
        (0..n).flat_map(|i| [(e(i, n), w), (-e(i, n), w)]).collect(),
    )
    .unwrap()
}

#[test]
fn interval_base_case() {
    let m = DiscreteMeasure::new(1, vec![(dvector![1.0], 3.0), (dvector![-1.0], 2.0)]).unwrap();
    let p = solve(&m).unwrap();
    assert!((p.volume() - 5.0).abs() < 1e-12);
    assert!((p.support(&dvector![1.0]) - 3.0).abs() < 1e-12);
    assert!((p.support(&dvector![-1.0]) - 2.0).abs() < 1e-12);
}

#[test]
fn interval_rejects_one_sided_measure() {
    let m = DiscreteMeasure::new(1, vec![(dvector![1.0], 3.0)]).unwrap();
    assert!(matches!(
        solve(&m),
        Err(SplitError::Measure(MeasureError::HemisphereConcentrated { .. }))
    ));
}

#[test]
fn unit_cross_gives_the_square() {
    let m = box_measure(2, 1.0);
    let p = solve(&m).unwrap();
    assert!((p.volume() - 4.0).abs() < 1e-9);
    for hs in p.halfspaces() {
        assert!((hs.support - 1.0).abs() < 1e-9);
    }
    assert!(solver::residual(&p, &m).unwrap() <= 1e-9);
}

#[test]
fn violated_measure_fails_with_verdict() {
    let m = DiscreteMeasure::new(
        2,
        vec![
            (e(0, 2), 2.0),
            (-e(0, 2), 2.0),
            (e(1, 2), 1.0),
            (-e(1, 2), 1.0),
        ],
    )
    .unwrap();
    match solve(&m) {
        Err(SplitError::ConditionFailed { verdict }) => {
            assert_eq!(verdict.status, crate::measure::ConditionStatus::Fail);
        }
        other => panic!("expected condition failure, got {other:?}"),
    }
}

#[test]
fn box_measure_in_three_dimensions() {
    // Weights 4/3: the unit cube. The recursion splits into an interval
    // and a square (or deeper), recombines, and rescales.
    let m = box_measure(3, 4.0 / 3.0);
    let p = solve(&m).unwrap();
    assert!((p.volume() - 8.0).abs() < 1e-9);
    for hs in p.halfspaces() {
        assert!((hs.support - 1.0).abs() < 1e-9);
    }
    assert!(solver::residual(&p, &m).unwrap() <= 1e-10);
}

#[test]
fn anisotropic_box_measure() {
    // Equality per axis with asymmetric weights inside the e1-line:
    // weights (3, 1) on ±e1, (2, 2) on ±e2. Box solutions form a
    // one-parameter family (only per-axis ratios and the volume are
    // determined); the geometric-mean convention puts volume
    // sqrt(8) = 2√2 on each axis, giving [-1/√2, 3/√2] × [-√2, √2].
    let m = DiscreteMeasure::new(
        2,
        vec![
            (e(0, 2), 3.0),
            (-e(0, 2), 1.0),
            (e(1, 2), 2.0),
            (-e(1, 2), 2.0),
        ],
    )
    .unwrap();
    let p = solve(&m).unwrap();
    assert!((p.volume() - 8.0).abs() < 1e-9);
    assert!(solver::residual(&p, &m).unwrap() <= 1e-9);
    // Ratio within the e1-axis is convention-independent.
    let ratio = p.support(&e(0, 2)) / p.support(&(-e(0, 2)));
    assert!((ratio - 3.0).abs() < 1e-9);
    let s = std::f64::consts::SQRT_2;
    assert!((p.support(&e(0, 2)) - 3.0 / s).abs() < 1e-9);
    assert!((p.support(&e(1, 2)) - s).abs() < 1e-9);
}

#[test]
fn nonorthogonal_equality_pair_combines() {
    // Atoms ±e1 and ±(e1+e2)/√2 with equal weights: complementary
    // equality lines that are not orthogonal. The solution is a
    // parallelogram; the recombination verifies the cone-volume match.
    let d = dvector![1.0, 1.0].normalize();
    let m = DiscreteMeasure::new(
        2,
        vec![
            (e(0, 2), 1.0),
            (-e(0, 2), 1.0),
            (d.clone(), 1.0),
            (-d.clone(), 1.0),
        ],
    )
    .unwrap();
    let p = solve(&m).unwrap();
    assert!((p.volume() - 4.0).abs() < 1e-9);
    assert!(solver::residual(&p, &m).unwrap() <= 1e-8);
    // All four constraint directions are facets.
    assert_eq!(p.proper_facets().count(), 4);
}

#[test]
fn combine_checks_branch_solutions() {
    // Hand the combiner a wrong branch solution: it must refuse.
    let m = box_measure(2, 1.0);
    let xi = crate::linalg::span_basis(&[e(0, 2)], 1e-9);
    let xi_p = crate::linalg::span_basis(&[e(1, 2)], 1e-9);
    let good = Polytope::from_support(&[dvector![1.0], dvector![-1.0]], &[1.0, 1.0]).unwrap();
    let bad = Polytope::from_support(&[dvector![1.0], dvector![-1.0]], &[2.0, 1.0]).unwrap();
    assert!(combine(&xi, &xi_p, &good, &good, &m).is_ok());
    assert!(matches!(
        combine(&xi, &xi_p, &bad, &good, &m),
        Err(SplitError::BranchMismatch { .. })
    ));
}

#[test]
fn splitter_routes_strict_cases_to_the_solver() {
    let m = DiscreteMeasure::new(
        2,
        vec![
            (e(0, 2), 1.0),
            (e(1, 2), 1.0),
            (dvector![-1.0, -1.0].normalize(), 1.0),
        ],
    )
    .unwrap();
    let p = solve(&m).unwrap();
    assert!(solver::residual(&p, &m).unwrap() <= 1e-8);
}

#[test]
fn mass_split_identity_on_equality_output() {
    // V_K(ξ ∩ S^{n-1}) = (dim ξ / n) V(K) on the recombined body.
    let m = box_measure(3, 4.0 / 3.0);
    let p = solve(&m).unwrap();
    let nu = p.cone_volume_measure().unwrap();
    for i in 0..3 {
        let axis_mass = nu.weight_at(&e(i, 3), 1e-9).unwrap()
            + nu.weight_at(&(-e(i, 3)), 1e-9).unwrap();
        assert!((axis_mass - p.volume() / 3.0).abs() <= 1e-9 * p.volume());
    }
}
