use super::*;
use nalgebra::dvector;

fn e(i: usize, n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn cross_normals(n: usize) -> Vec<DVector<f64>> {
    (0..n).flat_map(|i| [e(i, n), -e(i, n)]).collect()
}

pub fn square() -> Polytope {
    Polytope::from_support(&cross_normals(2), &[1.0; 4]).unwrap()
}

pub fn cube() -> Polytope {
    Polytope::from_support(&cross_normals(3), &[1.0; 6]).unwrap()
}

#[test]
fn unit_square() {
    let p = square();
    assert_eq!(p.vertices().len(), 4);
    assert!((p.volume() - 4.0).abs() < 1e-12);
    for f in p.facets() {
        assert!((f.area - 2.0).abs() < 1e-12);
        assert_eq!(f.vertex_indices.len(), 2);
    }
}

#[test]
fn hexagon_with_active_diagonals() {
    // Adding ±(e1+e2)/sqrt(2) with support 1 to the unit square cuts the
    // two corners on that diagonal: a hexagon. The diagonal facets run
    // from (1, sqrt(2)-1) to (sqrt(2)-1, 1), length sqrt(2)(2-sqrt(2)) =
    // 2 sqrt(2) - 2; the four axis facets have length sqrt(2). Volume
    // cross-check: 4 - 2·(2-sqrt(2))²/2 = 4·sqrt(2) - 2.
    let d = dvector![1.0, 1.0].normalize();
    let mut normals = cross_normals(2);
    normals.push(d.clone());
    normals.push(-d);
    let p = Polytope::from_support(&normals, &[1.0; 6]).unwrap();
    assert_eq!(p.vertices().len(), 6);
    let s = std::f64::consts::SQRT_2;
    for k in 0..4 {
        assert!((p.facet_area(k) - s).abs() < 1e-9, "axis facet {k}");
    }
    for k in 4..6 {
        assert!((p.facet_area(k) - (2.0 * s - 2.0)).abs() < 1e-9, "diag facet {k}");
    }
    assert!((p.volume() - (4.0 * s - 2.0)).abs() < 1e-9);
}

#[test]
fn redundant_diagonals_have_zero_area() {
    // Support 2 > sqrt(2) leaves the diagonal constraints inactive.
    let d = dvector![1.0, 1.0].normalize();
    let mut normals = cross_normals(2);
    normals.push(d.clone());
    normals.push(-d);
    let p = Polytope::from_support(&normals, &[1.0, 1.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
    assert_eq!(p.vertices().len(), 4);
    assert!((p.volume() - 4.0).abs() < 1e-10);
    assert_eq!(p.facet_area(4), 0.0);
    assert_eq!(p.facet_area(5), 0.0);
    // Touching contact (support exactly sqrt(2)) is a degenerate non-facet.
    let q = Polytope::from_support(
        &[
            e(0, 2), -e(0, 2), e(1, 2), -e(1, 2),
            dvector![1.0, 1.0].normalize(),
        ],
        &[1.0, 1.0, 1.0, 1.0, std::f64::consts::SQRT_2],
    )
    .unwrap();
    assert!((q.volume() - 4.0).abs() < 1e-9);
    assert_eq!(q.facet_area(4), 0.0);
}

#[test]
fn from_support_rejects_bad_input() {
    assert!(matches!(
        Polytope::from_support(&cross_normals(2), &[1.0, 1.0, 1.0, 0.0]),
        Err(GeometryError::NonPositiveSupport(_))
    ));
    // Unbounded: all normals in a halfplane.
    assert!(matches!(
        Polytope::from_support(&[e(0, 2), e(1, 2)], &[1.0, 1.0]),
        Err(GeometryError::Unbounded)
    ));
}

#[test]
fn cone_volume_of_boxes() {
    let nu = cube().cone_volume_measure().unwrap();
    assert_eq!(nu.len(), 6);
    for a in nu.atoms() {
        assert!((a.weight - 4.0 / 3.0).abs() < 1e-12);
    }
    assert!((nu.total_mass() - cube().volume()).abs() < 1e-10);

    let nu = square().cone_volume_measure().unwrap();
    for a in nu.atoms() {
        assert!((a.weight - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cone_volume_after_translation() {
    // Shift the square by (1/2, 0): masses 3/2, 1/2, 1, 1.
    let p = square().translate(&dvector![0.5, 0.0]);
    let nu = p.cone_volume_measure().unwrap();
    assert!((nu.weight_at(&e(0, 2), 1e-9).unwrap() - 1.5).abs() < 1e-12);
    assert!((nu.weight_at(&(-e(0, 2)), 1e-9).unwrap() - 0.5).abs() < 1e-12);
    assert!((nu.weight_at(&e(1, 2), 1e-9).unwrap() - 1.0).abs() < 1e-12);
    assert!((nu.total_mass() - 4.0).abs() < 1e-10);
}

#[test]
fn cone_volume_requires_interior_origin() {
    let p = square().translate(&dvector![2.0, 0.0]);
    assert!(matches!(
        p.cone_volume_measure(),
        Err(GeometryError::OriginNotInterior)
    ));
}

#[test]
fn metric_queries() {
    let p = square();
    assert!((p.support(&dvector![1.0, 1.0]) - 2.0).abs() < 1e-12);
    assert!((p.diameter() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
}

#[test]
fn transforms() {
    let p = square();
    let s = p.scale(2.0);
    assert!((s.volume() - 16.0).abs() < 1e-10);
    assert!((s.support(&e(0, 2)) - 2.0).abs() < 1e-12);

    let t = p.translate(&dvector![0.5, 0.0]);
    let hs: Vec<f64> = t.halfspaces().iter().map(|h| h.support).collect();
    assert_eq!(hs, vec![1.5, 0.5, 1.0, 1.0]);
    assert!((t.volume() - 4.0).abs() < 1e-12);

    // diag(2,1) sends the square to the rectangle [-2,2]x[-1,1].
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
    let r = p.linear_image(&a).unwrap();
    assert!((r.volume() - 8.0).abs() < 1e-10);
    assert!((r.support(&e(0, 2)) - 2.0).abs() < 1e-12);
    assert!((r.support(&e(1, 2)) - 1.0).abs() < 1e-12);

    let singular = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    assert!(matches!(
        p.linear_image(&singular),
        Err(GeometryError::SingularMatrix)
    ));
}

#[test]
fn direct_sums() {
    let interval = |a: f64, b: f64| {
        Polytope::from_support(&[dvector![1.0], dvector![-1.0]], &[b, a]).unwrap()
    };
    let i1 = interval(1.0, 1.0);
    let embed_x = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
    let embed_y = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
    let sq = Polytope::direct_sum(&i1, &i1, &embed_x, &embed_y).unwrap();
    assert!((sq.volume() - 4.0).abs() < 1e-12);

    // Interval ⊕ square = cube.
    let e1_of3 = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
    let yz = DMatrix::from_column_slice(3, 2, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let c = Polytope::direct_sum(&i1, &square(), &e1_of3, &yz).unwrap();
    assert!((c.volume() - 8.0).abs() < 1e-10);

    // [-2,2] ⊕ [-1,1]: cone masses (2,2,2,2).
    let r = Polytope::direct_sum(&interval(2.0, 2.0), &i1, &embed_x, &embed_y).unwrap();
    let nu = r.cone_volume_measure().unwrap();
    for a in nu.atoms() {
        assert!((a.weight - 2.0).abs() < 1e-12);
    }

    // Non-orthogonal images are rejected.
    let skew = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
    assert!(matches!(
        Polytope::direct_sum(&i1, &i1, &embed_x, &skew),
        Err(GeometryError::NonOrthogonalEmbedding)
    ));
}

#[test]
fn cut_volumes() {
    let p = square();
    // Facet-direction strip: width 1/2, height 2.
    assert!((p.cut_volume(&e(0, 2), 0.5).unwrap() - 1.0).abs() < 1e-10);
    // Vertex-direction cut: corner triangle of area delta².
    let d = dvector![1.0, 1.0].normalize();
    for delta in [0.1, 0.2, 0.4] {
        assert!((p.cut_volume(&d, delta).unwrap() - delta * delta).abs() < 1e-10);
    }
    assert_eq!(p.cut_volume(&e(0, 2), 0.0).unwrap(), 0.0);
    assert!(matches!(
        p.cut_volume(&e(0, 2), 2.5),
        Err(GeometryError::DeltaOutOfRange { .. })
    ));
}

#[test]
fn hausdorff_estimates() {
    let p = square();
    assert!(p.hausdorff_distance(&p).unwrap() < 1e-12);
    // sup_u |h_{2Q} - h_Q| = sup_u h_Q(u) = sqrt(2), at the corner
    // direction (equivalently: the corner (2,2) of 2Q is sqrt(2) from Q).
    let s = std::f64::consts::SQRT_2;
    assert!((p.hausdorff_distance(&p.scale(2.0)).unwrap() - s).abs() < 2e-2);
    let t = p.translate(&dvector![0.3, 0.0]);
    assert!((p.hausdorff_distance(&t).unwrap() - 0.3).abs() < 2e-2);
}

#[test]
fn one_dimensional_interval_polytope() {
    let p = Polytope::from_support(&[dvector![1.0], dvector![-1.0]], &[3.0, 2.0]).unwrap();
    assert!((p.volume() - 5.0).abs() < 1e-12);
    assert_eq!(p.facets().len(), 2);
    assert!((p.facet_area(0) - 1.0).abs() < 1e-12);
    assert!((p.facet_area(1) - 1.0).abs() < 1e-12);
    let nu = p.cone_volume_measure().unwrap();
    assert!((nu.weight_at(&dvector![1.0], 1e-9).unwrap() - 3.0).abs() < 1e-12);
    assert!((nu.weight_at(&dvector![-1.0], 1e-9).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn vertex_invariants_hold() {
    let d = dvector![1.0, 1.0, 1.0].normalize();
    let mut normals = cross_normals(3);
    normals.push(d.clone());
    normals.push(-d);
    let p = Polytope::from_support(&normals, &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5, 1.5]).unwrap();
    for v in p.vertices() {
        let mut tight = 0;
        for hs in p.halfspaces() {
            let s = hs.normal.dot(v) - hs.support;
            assert!(s <= 1e-9, "vertex violates a constraint: {s:.3e}");
            if s.abs() <= 1e-8 {
                tight += 1;
            }
        }
        assert!(tight >= 3, "vertex on fewer than n constraints");
    }
    // Cone identity about the origin.
    let mass: f64 = (0..p.halfspaces().len()).map(|k| p.cone_mass(k)).sum();
    assert!((mass - p.volume()).abs() <= 1e-8 * p.volume());
}

#[test]
fn euler_relation_in_3d() {
    for p in [
        cube(),
        Polytope::from_support(
            &[
                e(0, 3), -e(0, 3), e(1, 3), -e(1, 3), e(2, 3), -e(2, 3),
                dvector![1.0, 1.0, 1.0].normalize(),
            ],
            &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.4],
        )
        .unwrap(),
    ] {
        let v = p.vertices().len() as i64;
        let f = p.proper_facets().count() as i64;
        let edg = p.edges().len() as i64;
        assert_eq!(v - edg + f, 2, "V={v} E={edg} F={f}");
    }
}
