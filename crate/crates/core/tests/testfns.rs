use betti_index::ambient::{make_ambient, AmbientKind};
use betti_index::hodge::{
    analytic_harmonic_forms, exact_form, harmonic_one_forms, param_differential, DiscreteOneForm,
};
use betti_index::hypersurface::{build_hypersurface, lift_to_double_cover, CatalogKind, DiscreteHypersurface, Parity};
use betti_index::numerics::{random_orthogonal, standard_normal};
use betti_index::spectral::assemble_jacobi;
use betti_index::testfns::*;
use betti_index::LabError;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn torus(res: usize) -> DiscreteHypersurface {
    let s3 = make_ambient(AmbientKind::Sphere { dim: 3 }).unwrap();
    build_hypersurface(&s3, CatalogKind::CliffordTorus, Some(&[res, res])).unwrap()
}

#[test]
fn zero_form_gives_zero_functions() {
    let h = torus(12);
    let set = test_functions(&h, &DiscreteOneForm::zero(&h), TestMode::NormalWedge).unwrap();
    assert_eq!(set.values.len(), 6);
    assert!(set.values.iter().flatten().all(|v| *v == 0.0));
}

#[test]
fn pointwise_norm_identities() {
    let h = torus(16);
    let w = param_differential(&h, 0);
    for mode in [TestMode::Coordinates, TestMode::StarCoordinates, TestMode::NormalWedge] {
        let set = test_functions(&h, &w, mode).unwrap();
        for (s, n) in set.pointwise_sum_sq().iter().zip(w.norm_sq()) {
            // |dθ₁|² = 2 from the induced metric of the torus with radii 1/√2
            assert!((n - 2.0).abs() < 1e-8);
            assert!((s - n).abs() < 1e-12, "{mode:?}: {s} vs {n}");
        }
    }
    assert_eq!(test_functions(&h, &w, TestMode::NormalWedge).unwrap().labels[0], vec![0, 1]);
}

#[test]
fn torus_identities_close() {
    let h = torus(24);
    let sys = assemble_jacobi(&h, None).unwrap();
    for w in analytic_harmonic_forms(&h).unwrap() {
        let wedge = q_identity_report_with(&h, &sys, &w, TestMode::NormalWedge).unwrap();
        // −(2n − 2)∫|ω|² with n = 2
        assert!((wedge.rhs / wedge.form_mass + 2.0).abs() < 1e-8, "{wedge:?}");
        assert!(wedge.relative_residual < 1e-4, "{wedge:?}");
        let coords = q_identity_report_with(&h, &sys, &w, TestMode::Coordinates).unwrap();
        // Σ|II(e_k,ω♯)|² − (R/2)|ω|² = |ω|² − 3|ω|² on the unit 3-sphere
        assert!((coords.rhs / coords.form_mass + 2.0).abs() < 1e-8, "{coords:?}");
        assert!(coords.relative_residual < 1e-4, "{coords:?}");
        let star = q_identity_report_with(&h, &sys, &w, TestMode::StarCoordinates).unwrap();
        assert!(star.relative_residual < 1e-4);
    }
}

#[test]
fn solver_forms_satisfy_the_identities() {
    let h = torus(24);
    let sys = assemble_jacobi(&h, None).unwrap();
    for w in harmonic_one_forms(&h).unwrap().forms {
        let r = q_identity_report_with(&h, &sys, &w, TestMode::NormalWedge).unwrap();
        assert!(r.relative_residual < 1e-4, "{r:?}");
    }
}

#[test]
fn scalar_curvature_of_the_unit_three_sphere() {
    let h = torus(8);
    assert!((h.ambient().scalar_curvature(&h.points[3]) - 6.0).abs() < 1e-10);
}

#[test]
fn generalized_clifford_in_s4() {
    let s4 = make_ambient(AmbientKind::Sphere { dim: 4 }).unwrap();
    let h = build_hypersurface(&s4, CatalogKind::GeneralizedClifford, Some(&[12, 10, 12])).unwrap();
    let w = &analytic_harmonic_forms(&h).unwrap()[0];
    let r = q_identity_report(&h, w, TestMode::NormalWedge).unwrap();
    assert!((r.rhs / r.form_mass + 4.0).abs() < 1e-8, "{r:?}");
    assert!(r.relative_residual < 1e-4, "{r:?}");
    assert!(matches!(
        q_identity_report(&h, w, TestMode::Coordinates),
        Err(LabError::InvalidDimension(_))
    ));
}

#[test]
fn circle_times_equator_integrand_is_negative() {
    let amb = make_ambient(AmbientKind::CircleTimesSphere { n: 3 }).unwrap();
    let h = build_hypersurface(&amb, CatalogKind::CircleTimesEquator, Some(&[12, 10, 12])).unwrap();
    let forms = analytic_harmonic_forms(&h).unwrap();
    let g = integrand_quadratic_form(&h, &forms, TestMode::NormalWedge).unwrap();
    assert!(g.max_ratio() < 0.0);
    let r = q_identity_report(&h, &forms[0], TestMode::NormalWedge).unwrap();
    assert!(r.relative_residual < 1e-4, "{r:?}");
}

#[test]
fn sums_are_independent_of_the_euclidean_basis() {
    let h = torus(16);
    let sys = assemble_jacobi(&h, None).unwrap();
    let w = param_differential(&h, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mode in [TestMode::Coordinates, TestMode::NormalWedge] {
        let base: f64 = test_functions(&h, &w, mode).unwrap().values.iter().map(|u| sys.q_value(u).0).sum();
        for _ in 0..3 {
            let theta = random_orthogonal(4, &mut rng);
            let rotated: f64 = test_functions_in_basis(&h, &w, mode, &theta)
                .unwrap()
                .values
                .iter()
                .map(|u| sys.q_value(u).0)
                .sum();
            assert!((rotated - base).abs() < 1e-12 * base.abs().max(1.0), "{rotated} vs {base}");
        }
    }
}

#[test]
fn polarization_matches_direct_quadrature() {
    let h = torus(16);
    let forms = vec![param_differential(&h, 0), param_differential(&h, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for mode in [TestMode::NormalWedge, TestMode::Coordinates, TestMode::StarCoordinates] {
        let g = integrand_quadratic_form(&h, &forms, mode).unwrap();
        for _ in 0..20 {
            let c = DVector::from_fn(2, |_, _| standard_normal(&mut rng));
            let w = forms[0].scaled(c[0]).axpy(c[1], &forms[1]);
            let direct = direct_integrand_integral(&h, &w, mode).unwrap();
            let (polar, _) = g.quadratic(&c);
            assert!((polar - direct).abs() < 1e-10 * direct.abs().max(1.0), "{polar} vs {direct}");
        }
    }
}

#[test]
fn torus_integrand_form_is_negative_definite() {
    let h = torus(16);
    let forms = analytic_harmonic_forms(&h).unwrap();
    let g = integrand_quadratic_form(&h, &forms, TestMode::NormalWedge).unwrap();
    assert!(g.negative_definite_below(0.0));
    // both diagonal entries are −2 on an orthonormal basis
    assert!((g.gram[(0, 0)] + 2.0).abs() < 1e-8 && (g.gram[(1, 1)] + 2.0).abs() < 1e-8);
    let with_zero = vec![forms[0].clone(), DiscreteOneForm::zero(&h)];
    assert!(matches!(
        integrand_quadratic_form(&h, &with_zero, TestMode::NormalWedge),
        Err(LabError::IllConditioned { .. })
    ));
}

#[test]
fn non_harmonic_forms_are_rejected() {
    let h = torus(16);
    let f: Vec<f64> = h.points.iter().map(|p| p.position[0] * p.position[0]).collect();
    let df = exact_form(&h, &f);
    assert!(matches!(
        q_identity_report(&h, &df, TestMode::NormalWedge),
        Err(LabError::NotHarmonic { .. })
    ));
}

#[test]
fn wedge_functions_descend_to_projective_space() {
    let rp3 = make_ambient(AmbientKind::RealProjective { dim: 3 }).unwrap();
    let h = build_hypersurface(&rp3, CatalogKind::CliffordTorus, Some(&[16, 16])).unwrap();
    let lift = lift_to_double_cover(&h).unwrap();
    assert_eq!(lift.normal_parity(), Parity::Odd);
    let w = param_differential(&h, 0);
    for u in test_functions(&h, &w, TestMode::NormalWedge).unwrap().values {
        assert_eq!(lift.classify(&u), Parity::Even);
    }
    // the coordinates of the normal itself are odd and do not descend
    let n0: Vec<f64> = h.normals.iter().map(|v| v[0]).collect();
    assert_eq!(lift.classify(&n0), Parity::Odd);
}
