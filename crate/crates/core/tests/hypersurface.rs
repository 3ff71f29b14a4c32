use betti_index::ambient::{make_ambient, AmbientKind};
use betti_index::hypersurface::catalog::{minimal_geodesic_radius, sphere_volume};
use betti_index::hypersurface::{build_hypersurface, lift_to_double_cover, CatalogKind, Parity};
use betti_index::LabError;
use std::f64::consts::PI;

fn sphere(dim: usize) -> betti_index::ambient::AmbientModel {
    make_ambient(AmbientKind::Sphere { dim }).unwrap()
}

#[test]
fn clifford_torus_geometry() {
    let hyp = build_hypersurface(&sphere(3), CatalogKind::CliffordTorus, Some(&[64, 64])).unwrap();
    // oracle: x = (cos u, sin u, cos v, sin v)/√2 has principal curvatures ±1
    for a in 0..hyp.node_count() {
        assert!((hyp.a_norm_sq[a] - 2.0).abs() < 1e-9);
        assert!((hyp.ricci_nn[a] - 2.0).abs() < 1e-12);
        assert!((hyp.potential[a] - 4.0).abs() < 1e-9);
        let mut k: Vec<f64> = hyp.shape[a].symmetric_eigenvalues().iter().copied().collect();
        k.sort_by(f64::total_cmp);
        assert!((k[0] + 1.0).abs() < 1e-9 && (k[1] - 1.0).abs() < 1e-9);
    }
    let rep = hyp.geometry_report();
    assert!(rep.normal_tangency < 1e-10 && rep.normal_unit < 1e-12);
    assert!(rep.mean_curvature_residual < 1e-9);
    assert!((hyp.volume() - 2.0 * PI * PI).abs() < 1e-9);
}

#[test]
fn equators_are_totally_geodesic() {
    for dim in [3, 4] {
        let n = dim - 1;
        let hyp = build_hypersurface(&sphere(dim), CatalogKind::EquatorInSphere, None).unwrap();
        assert_eq!(hyp.dim(), n);
        for a in 0..hyp.node_count() {
            assert!(hyp.shape[a].norm() < 1e-9);
            assert!((hyp.potential[a] - n as f64).abs() < 1e-9);
        }
        assert!((hyp.volume() - sphere_volume(n)).abs() < 1e-9);
    }
}

#[test]
fn generalized_clifford_matches_product_sphere_curvatures() {
    // S¹(r) × S²(s) in S⁴ with r² = 1/3: curvatures −s/r = −√2 once, r/s = 1/√2 twice
    let hyp = build_hypersurface(&sphere(4), CatalogKind::GeneralizedClifford, Some(&[24, 16, 24])).unwrap();
    let expected = [-(2.0f64).sqrt(), 0.5f64.sqrt(), 0.5f64.sqrt()];
    for a in 0..hyp.node_count() {
        let mut k: Vec<f64> = hyp.shape[a].symmetric_eigenvalues().iter().copied().collect();
        k.sort_by(f64::total_cmp);
        for (x, y) in k.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-8, "{k:?}");
        }
        assert!((hyp.a_norm_sq[a] - 3.0).abs() < 1e-8);
        assert!((hyp.potential[a] - 6.0).abs() < 1e-8);
    }
    assert!((hyp.volume() - hyp.analytic_volume().unwrap()).abs() < 1e-8);
}

#[test]
fn geodesic_sphere_in_cp2_is_minimal() {
    let cp2 = make_ambient(AmbientKind::ComplexProjectiveVeronese { m: 2 }).unwrap();
    let hyp = build_hypersurface(&cp2, CatalogKind::GeodesicSphereCp { radius: None }, Some(&[32, 32, 32])).unwrap();
    let r = hyp.geodesic_radius().unwrap();
    assert!((r - PI / 3.0).abs() < 1e-10);
    assert!((r - minimal_geodesic_radius(2, 1e-13)).abs() < 1e-12);
    assert!(hyp.mean_curvature_residual() < 1e-6, "{}", hyp.mean_curvature_residual());
    // principal curvatures −2cot 2r (along JN) and −cot r (twice), up to sign
    let c1 = (2.0 / (2.0 * r).tan()).abs();
    let c2 = (1.0 / r.tan()).abs();
    for a in (0..hyp.node_count()).step_by(97) {
        let mut k: Vec<f64> = hyp.shape[a].symmetric_eigenvalues().iter().map(|x| x.abs()).collect();
        k.sort_by(f64::total_cmp);
        assert!((k[0] - c2).abs() < 1e-7 && (k[1] - c2).abs() < 1e-7 && (k[2] - c1).abs() < 1e-7);
        assert!((hyp.a_norm_sq[a] - 2.0).abs() < 1e-7);
    }
    let vol = 2.0 * PI * PI * r.sin().powi(3) * r.cos();
    assert!((hyp.volume() - vol).abs() < 1e-8);
}

#[test]
fn non_minimal_geodesic_sphere_reports_mean_curvature() {
    let cp2 = make_ambient(AmbientKind::ComplexProjectiveVeronese { m: 2 }).unwrap();
    let r = 0.8;
    let hyp = build_hypersurface(&cp2, CatalogKind::GeodesicSphereCp { radius: Some(r) }, Some(&[8, 8, 8])).unwrap();
    let h = betti_index::hypersurface::catalog::geodesic_sphere_mean_curvature(2, r).abs();
    assert!((hyp.mean_curvature_residual() - h).abs() < 1e-7);
}

#[test]
fn gauss_equation_closure_on_surfaces() {
    for (amb, kind) in [
        (sphere(3), CatalogKind::CliffordTorus),
        (sphere(3), CatalogKind::EquatorInSphere),
        (make_ambient(AmbientKind::CircleTimesSphere { n: 2 }).unwrap(), CatalogKind::CircleTimesEquator),
    ] {
        let hyp = build_hypersurface(&amb, kind.clone(), Some(&[24, 32])).unwrap();
        let k_in = hyp.intrinsic_gaussian_curvature().unwrap();
        let k_ex = hyp.extrinsic_gaussian_curvature().unwrap();
        // polar caps of latitude charts are excluded
        let w: Vec<f64> = hyp.coord_tangents.iter().map(|t| t.column(0).norm() * t.column(1).norm()).collect();
        let wmax = w.iter().copied().fold(0.0, f64::max);
        for k in 0..hyp.node_count() {
            if w[k] > 0.1 * wmax {
                assert!((k_in[k] - k_ex[k]).abs() < 1e-6, "{kind:?}: {} vs {}", k_in[k], k_ex[k]);
            }
        }
    }
}

#[test]
fn ellipsoid_section_is_totally_geodesic() {
    let e = make_ambient(AmbientKind::Ellipsoid { semi_axes: vec![1.0, 1.3, 0.8, 1.1] }).unwrap();
    let hyp = build_hypersurface(&e, CatalogKind::EllipsoidSection { axis: 3 }, Some(&[16, 24])).unwrap();
    assert!(hyp.shape.iter().all(|a| a.norm() < 1e-8));
    assert!(hyp.geometry_report().normal_ambient_tangency < 1e-12);
}

#[test]
fn guards() {
    assert!(matches!(
        build_hypersurface(&sphere(3), CatalogKind::CliffordTorus, Some(&[2, 64])),
        Err(LabError::ResolutionTooSmall(_))
    ));
    assert!(matches!(
        build_hypersurface(&sphere(4), CatalogKind::CliffordTorus, None),
        Err(LabError::Incompatible(_))
    ));
    assert!(matches!(
        build_hypersurface(&sphere(3), CatalogKind::CircleTimesEquator, None),
        Err(LabError::Incompatible(_))
    ));
}

#[test]
fn antipodal_lift_of_clifford_torus() {
    let rp3 = make_ambient(AmbientKind::RealProjective { dim: 3 }).unwrap();
    let hyp = build_hypersurface(&rp3, CatalogKind::CliffordTorus, Some(&[16, 16])).unwrap();
    let lift = lift_to_double_cover(&hyp).unwrap();
    assert_eq!(lift.normal_parity(), Parity::Odd);
    assert!(lift.pairing().iter().enumerate().all(|(a, &b)| a != b && lift.pairing()[b] == a));
    let ones = vec![1.0; hyp.node_count()];
    assert_eq!(lift.classify(&ones), Parity::Even);
    let n0: Vec<f64> = hyp.normals.iter().map(|v| v[0]).collect();
    assert_eq!(lift.classify(&n0), Parity::Odd);
    assert!(matches!(lift.descend_field(&n0), Err(LabError::NotEven { .. })));
    assert_eq!(lift.descend_field(&ones).unwrap().len(), hyp.node_count() / 2);
}

#[test]
fn odd_resolution_breaks_antipodal_symmetry() {
    let hyp = build_hypersurface(&sphere(3), CatalogKind::CliffordTorus, Some(&[15, 16])).unwrap();
    assert!(matches!(lift_to_double_cover(&hyp), Err(LabError::NotAntipodal(_))));
}

#[test]
fn mesh_dump_lists_every_node() {
    let hyp = build_hypersurface(&sphere(3), CatalogKind::CliffordTorus, Some(&[8, 8])).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.txt");
    hyp.write_mesh_dump(&path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("node ")).count(), 64);
    assert_eq!(text.lines().filter(|l| l.starts_with("cell ")).count(), 64);
}
