use betti_index::ambient::{make_ambient, AmbientKind, AmbientModel};
use nalgebra::DVector;
use proptest::prelude::*;

fn cp(m: usize) -> AmbientModel {
    make_ambient(AmbientKind::ComplexProjectiveVeronese { m }).unwrap()
}

#[test]
fn embedding_dimensions_match_the_table() {
    let cases = [
        (AmbientKind::Sphere { dim: 3 }, 3, 4),
        (AmbientKind::RealProjective { dim: 4 }, 4, 5),
        (AmbientKind::ComplexProjectiveVeronese { m: 2 }, 4, 9),
        (AmbientKind::ComplexProjectiveVeronese { m: 3 }, 6, 16),
        (AmbientKind::QuaternionicProjectiveVeronese { p: 2 }, 8, 15),
        (AmbientKind::CircleTimesSphere { n: 3 }, 4, 6),
        (AmbientKind::SphereTimesSphere { p: 2, q: 3 }, 5, 7),
        (AmbientKind::Ellipsoid { semi_axes: vec![1.0, 1.0, 1.0, 2.0] }, 3, 4),
    ];
    for (kind, n1, d) in cases {
        let m = make_ambient(kind.clone()).unwrap();
        assert_eq!(m.intrinsic_dim(), n1, "{kind}");
        assert_eq!(m.embed_dim(), d, "{kind}");
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(make_ambient(AmbientKind::Sphere { dim: 1 }).is_err());
    assert!(make_ambient(AmbientKind::Ellipsoid { semi_axes: vec![1.0, -1.0, 1.0] }).is_err());
    assert!(make_ambient(AmbientKind::ComplexProjectiveVeronese { m: 0 }).is_err());
}

#[test]
fn veronese_identities_cp2_cp3() {
    for m in [2, 3] {
        let report = cp(m).verify_model_identities(1000, 11);
        for (name, r) in &report.residuals {
            assert!(*r < 1e-8, "CP^{m} {name} = {r:e}");
        }
        let k = report.einstein_estimate.unwrap();
        assert!((k - (2 * m + 2) as f64).abs() < 1e-8);
        assert!(report.sectional_min >= 1.0 - 1e-9 && report.sectional_max <= 4.0 + 1e-9);
    }
}

#[test]
fn quaternionic_einstein_constant() {
    let hp = make_ambient(AmbientKind::QuaternionicProjectiveVeronese { p: 2 }).unwrap();
    let report = hp.verify_model_identities(500, 3);
    for (name, r) in &report.residuals {
        assert!(*r < 1e-8, "HP^2 {name} = {r:e}");
    }
    // n + 1 = 8, so n + 9 = 16
    assert!((report.einstein_estimate.unwrap() - 16.0).abs() < 1e-8);
}

#[test]
fn sphere_is_einstein_and_umbilic() {
    let s = make_ambient(AmbientKind::Sphere { dim: 4 }).unwrap();
    let report = s.verify_model_identities(100, 5);
    assert!(report.passes(1e-9), "{:?}", report.residuals);
    assert!((report.einstein_estimate.unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn products_and_ellipsoids_pass_their_identities() {
    for kind in [
        AmbientKind::CircleTimesSphere { n: 3 },
        AmbientKind::SphereTimesSphere { p: 2, q: 2 },
        AmbientKind::Ellipsoid { semi_axes: vec![1.0, 1.2, 0.9, 1.5] },
    ] {
        let report = make_ambient(kind.clone()).unwrap().verify_model_identities(100, 9);
        assert!(report.passes(1e-7), "{kind}: {:?}", report.residuals);
    }
}

#[test]
fn generic_level_set_matches_ellipsoid() {
    let a = [1.0, 1.2, 0.9, 1.5];
    let generic = AmbientModel::level_set("ellipsoid", 4, move |x: &DVector<f64>| {
        x.iter().zip(a).map(|(xi, ai)| (xi / ai).powi(2)).sum::<f64>() - 1.0
    })
    .unwrap();
    let exact = make_ambient(AmbientKind::Ellipsoid { semi_axes: a.to_vec() }).unwrap();
    let p = exact.point_from_lift(&DVector::from_vec(vec![0.3, -0.5, 0.4, 0.9])).unwrap();
    let q = generic.point_from_lift(&p.position).unwrap();
    let kp = exact.principal_curvatures(&p).unwrap();
    let kq = generic.principal_curvatures(&q).unwrap();
    for (u, v) in kp.iter().zip(&kq) {
        assert!((u - v).abs() < 1e-6, "{kp:?} vs {kq:?}");
    }
    let report = generic.verify_model_identities(20, 1);
    assert!(report.passes(1e-5), "{:?}", report.residuals);
}

#[test]
fn circle_and_sphere_factors_do_not_interact() {
    let m = make_ambient(AmbientKind::CircleTimesSphere { n: 3 }).unwrap();
    let p = m.point_from_lift(&DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
    let x = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let y = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    assert!(m.second_fundamental_form(&p, &x, &y).unwrap().norm() < 1e-15);
    assert!(m.riemann_xyxy(&p, &x, &y).unwrap().abs() < 1e-15);
    assert!(m.ricci(&p, &x).unwrap().abs() < 1e-14);
}

#[test]
fn non_tangent_and_zero_inputs_error() {
    let s = make_ambient(AmbientKind::Sphere { dim: 3 }).unwrap();
    let p = s.point_from_lift(&DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
    let radial = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let t = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
    assert!(s.second_fundamental_form(&p, &radial, &t).is_err());
    assert!(s.ricci(&p, &DVector::zeros(4)).is_err());
    assert!((s.second_fundamental_form(&p, &t, &t).unwrap().norm() - 1.0).abs() < 1e-15);
}

#[test]
fn round_ellipsoid_has_unit_curvature_ratio() {
    let e = make_ambient(AmbientKind::Ellipsoid { semi_axes: vec![1.0; 4] }).unwrap();
    let mut rng = rand::rng();
    for _ in 0..20 {
        let p = e.random_point(&mut rng);
        let k = e.principal_curvatures(&p).unwrap();
        assert!((k[2] / k[0] - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn riemann_is_symmetric_and_quadratic(seed in 0u64..10_000, c in -3.0f64..3.0) {
        let m = cp(2);
        let (p, x, y) = m.sample_pairs(1, seed).pop().unwrap();
        let y = &y * 0.7 + &x * 0.2;
        let r = m.riemann_xyxy(&p, &x, &y).unwrap();
        prop_assert!((r - m.riemann_xyxy(&p, &y, &x).unwrap()).abs() < 1e-12);
        prop_assert!((m.riemann_xyxy(&p, &(&x * c), &y).unwrap() - c * c * r).abs() < 1e-11);
        let a = m.second_fundamental_form(&p, &x, &y).unwrap();
        let b = m.second_fundamental_form(&p, &y, &x).unwrap();
        prop_assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn gauss_closure_on_products(seed in 0u64..10_000) {
        let m = make_ambient(AmbientKind::SphereTimesSphere { p: 2, q: 3 }).unwrap();
        let (p, x, y) = m.sample_pairs(1, seed).pop().unwrap();
        let r = m.riemann_xyxy(&p, &x, &y).unwrap();
        prop_assert!((r - m.analytic_riemann_xyxy(&p, &x, &y).unwrap()).abs() < 1e-12);
    }
}
