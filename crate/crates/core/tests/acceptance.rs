//! The acceptance criteria, run in order on one thread so that the reported
//! runtimes are not distorted by other tests. Each criterion prints one line.

use betti_index::ambient::{make_ambient, AmbientKind};
use betti_index::bounds::*;
use betti_index::cli::Scenario;
use betti_index::hodge::{alignment_distance, analytic_harmonic_forms, harmonic_one_forms, param_differential};
use betti_index::hypersurface::{
    build_hypersurface, catalog::{geodesic_sphere_mean_curvature, minimal_geodesic_radius}, CatalogKind,
    DiscreteHypersurface,
};
use betti_index::numerics::standard_normal;
use betti_index::spectral::{assemble_jacobi, SpectralSystem, SpectrumReport};
use betti_index::testfns::{q_identity_report_with, TestMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(
        elapsed <= Duration::from_secs(limit_s),
        format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64()),
    )
}

struct Torus {
    hyp: DiscreteHypersurface,
    system: SpectralSystem,
    spectrum: SpectrumReport,
}

fn torus(res: usize) -> DiscreteHypersurface {
    let s3 = make_ambient(AmbientKind::Sphere { dim: 3 }).unwrap();
    build_hypersurface(&s3, CatalogKind::CliffordTorus, Some(&[res, res])).unwrap()
}

fn torus96() -> Torus {
    let hyp = torus(96);
    let system = assemble_jacobi(&hyp, None).unwrap();
    let spectrum = system.spectrum().unwrap();
    Torus { hyp, system, spectrum }
}

/// `dθ₁` followed by five random combinations of the angle forms.
fn test_forms(hyp: &DiscreteHypersurface) -> Vec<betti_index::hodge::DiscreteOneForm> {
    let basis = analytic_harmonic_forms(hyp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = vec![param_differential(hyp, 0)];
    for _ in 0..5 {
        let (a, b) = (standard_normal(&mut rng), standard_normal(&mut rng));
        out.push(basis[0].scaled(a).axpy(b, &basis[1]));
    }
    out
}

fn wedge_identity(t: &Torus) -> Outcome {
    let start = Instant::now();
    let (mut worst, mut worst_rhs): (f64, f64) = (0.0, 0.0);
    for w in test_forms(&t.hyp) {
        let r = q_identity_report_with(&t.hyp, &t.system, &w, TestMode::NormalWedge).map_err(|e| e.to_string())?;
        worst = worst.max(r.relative_residual);
        worst_rhs = worst_rhs.max((r.rhs / r.form_mass + 2.0).abs());
    }
    ensure(worst < 1e-4, format!("relative residual {worst:.2e}"))?;
    ensure(worst_rhs < 1e-6, format!("rhs/|ω|² off −2 by {worst_rhs:.2e}"))?;
    within(start.elapsed(), 30)?;
    Ok(format!("residual {worst:.1e}, rhs/|ω|² = −2 ± {worst_rhs:.1e}"))
}

fn coordinate_identity(t: &Torus) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for w in test_forms(&t.hyp) {
        let r = q_identity_report_with(&t.hyp, &t.system, &w, TestMode::Coordinates).map_err(|e| e.to_string())?;
        worst = worst.max(r.relative_residual);
        // Σ|II(e_k,ω♯)|² − 3|ω|² = −2|ω|² on the torus in the unit sphere
        ensure((r.rhs / r.form_mass + 2.0).abs() < 1e-6, format!("rhs/|ω|² = {}", r.rhs / r.form_mass))?;
    }
    let scalar = t.hyp.ambient().scalar_curvature(&t.hyp.points[0]);
    ensure((scalar - 6.0).abs() < 1e-10, format!("ambient scalar curvature {scalar}"))?;
    ensure(worst < 1e-4, format!("relative residual {worst:.2e}"))?;
    within(start.elapsed(), 30)?;
    Ok(format!("residual {worst:.1e}, R = {scalar}"))
}

fn spectrum_oracle(t: &Torus, build: Duration) -> Outcome {
    let start = Instant::now();
    // 2(j² + k²) − 4 for integer pairs
    let oracle = [-4.0, -2.0, -2.0, -2.0, -2.0, 0.0, 0.0, 0.0, 0.0];
    let ev = &t.spectrum.eigenvalues;
    let mut worst_rel: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    for (got, exact) in ev.iter().zip(oracle) {
        if exact == 0.0 {
            worst_zero = worst_zero.max(got.abs());
        } else {
            worst_rel = worst_rel.max(((got - exact) / exact).abs());
        }
    }
    ensure(worst_rel < 0.01, format!("relative error {worst_rel:.2e}"))?;
    ensure(worst_zero < 0.05, format!("zero cluster error {worst_zero:.2e}"))?;
    ensure(t.spectrum.morse_index == 5, format!("index {}", t.spectrum.morse_index))?;
    for (dim, res) in [(3usize, vec![24, 32]), (4, vec![16, 16, 24])] {
        let n = (dim - 1) as f64;
        let s = make_ambient(AmbientKind::Sphere { dim }).unwrap();
        let h = build_hypersurface(&s, CatalogKind::EquatorInSphere, Some(&res)).unwrap();
        let spec = assemble_jacobi(&h, None).and_then(|s| s.spectrum()).map_err(|e| e.to_string())?;
        let rel = ((spec.eigenvalues[0] + n) / n).abs();
        ensure(rel < 0.01, format!("equator in S^{dim}: λ₁ = {}", spec.eigenvalues[0]))?;
        ensure(spec.morse_index == 1, format!("equator in S^{dim}: index {}", spec.morse_index))?;
    }
    within(build + start.elapsed(), 120)?;
    Ok(format!("index 5, rel err {worst_rel:.1e}, zero cluster {worst_zero:.1e}, equators index 1"))
}

fn bound_consistency(t: &Torus) -> Outcome {
    let b1 = harmonic_one_forms(&t.hyp).map_err(|e| e.to_string())?.betti_number();
    let r = index_bound_report(&t.hyp, b1, t.spectrum.morse_index).map_err(|e| e.to_string())?;
    ensure(r.bound == 5 && r.consistent, format!("bound {} for index {}", r.bound, r.index))?;
    let mut worst: f64 = 0.0;
    for i in 0..t.hyp.embed_dim() {
        let u: Vec<f64> = t.hyp.normals.iter().map(|v| v[i]).collect();
        let m = t.system.mass_value(&u);
        let (q, _) = t.system.q_value(&u);
        worst = worst.max(((q / m + 2.0) / 2.0).abs());
    }
    ensure(worst < 0.01, format!("normal coordinate quotient off −2 by {:.2e}", 2.0 * worst))?;
    Ok(format!("index {} ≥ bound {}, normal quotients −2 ± {:.1e}", r.index, r.bound, 2.0 * worst))
}

fn certificates(t: &Torus) -> Outcome {
    let start = Instant::now();
    let forms = analytic_harmonic_forms(&t.hyp).map_err(|e| e.to_string())?;
    let mut line = Vec::new();
    for (mode, required) in [(CertificateMode::Wedge, 1), (CertificateMode::SurfacePair, 1)] {
        let r = certificate_with_spectrum(&t.hyp, &forms, 0.0, mode, None, &t.spectrum).map_err(|e| e.to_string())?;
        ensure(r.hypothesis_margin < 0.0, format!("{mode:?}: margin {}", r.hypothesis_margin))?;
        ensure(r.required == required && r.actual == 5, format!("{mode:?}: {} of {}", r.actual, r.required))?;
        ensure(r.passes(), format!("{mode:?}: {:?}", r.verdict))?;
        line.push(format!("{mode:?} {}≥{} margin {:.3}", r.actual, r.required, r.hypothesis_margin));
    }
    within(start.elapsed(), 60)?;
    Ok(line.join(", "))
}

fn veronese() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [2usize, 3] {
        let amb = make_ambient(AmbientKind::ComplexProjectiveVeronese { m }).unwrap();
        let r = amb.verify_model_identities(1000, 0x5eed);
        for key in ["ii_unit_norm", "polarized", "ii_mixed_vs_curvature", "sectional_formula", "einstein"] {
            let v = *r.residuals.get(key).ok_or(format!("CP^{m}: no {key} residual"))?;
            ensure(v < 1e-8, format!("CP^{m} {key} = {v:.2e}"))?;
        }
        worst = worst.max(r.max_residual());
        ensure(r.max_residual() < 1e-8, format!("CP^{m}: {:.2e}", r.max_residual()))?;
        // n + 3 with n + 1 = 2m
        let k = r.einstein_estimate.unwrap_or(f64::NAN);
        ensure((k - (2 * m + 2) as f64).abs() < 1e-8, format!("CP^{m}: Einstein constant {k}"))?;
    }
    let hp = make_ambient(AmbientKind::QuaternionicProjectiveVeronese { p: 2 }).unwrap();
    let r = hp.verify_model_identities(1000, 0x5eed);
    let k = r.einstein_estimate.unwrap_or(f64::NAN);
    // n + 1 = 8, so n + 9 = 16
    ensure((k - 16.0).abs() < 1e-8, format!("HP^2: Einstein constant {k}"))?;
    ensure(r.max_residual() < 1e-8, format!("HP^2: {:.2e}", r.max_residual()))?;
    within(start.elapsed(), 60)?;
    Ok(format!("CP^2, CP^3 residuals ≤ {worst:.1e}, HP^2 Einstein {k}"))
}

fn cp2_geodesic_sphere() -> Outcome {
    let start = Instant::now();
    let r = minimal_geodesic_radius(2, 1e-12);
    ensure((r - PI / 3.0).abs() < 1e-10, format!("radius {r}"))?;
    ensure(geodesic_sphere_mean_curvature(2, r).abs() < 1e-9, "mean curvature at the root")?;
    let cp2 = make_ambient(AmbientKind::ComplexProjectiveVeronese { m: 2 }).unwrap();
    let coarse = build_hypersurface(&cp2, CatalogKind::GeodesicSphereCp { radius: None }, Some(&[16, 16, 16]))
        .map_err(|e| e.to_string())?;
    let (c, f) = borderline_refinement(&coarse, |x| (x[0] + 2.0 * x[4]).sin()).map_err(|e| e.to_string())?;
    ensure(f.resolution == vec![32, 32, 32], format!("fine resolution {:?}", f.resolution))?;
    let fine = coarse.rebuild(&[32, 32, 32]).map_err(|e| e.to_string())?;
    let h = fine.geometry_report().mean_curvature_residual;
    ensure(h < 1e-6, format!("mean curvature residual {h:.2e} at 32³"))?;
    for (name, a, b) in [
        ("div(JN)", c.div_u, f.div_u),
        ("decomposition", c.decomposition, f.decomposition),
        ("traced Gauss", c.traced_gauss, f.traced_gauss),
        ("div form", c.div_form, f.div_form),
    ] {
        ensure(b < 1e-5, format!("{name} = {b:.2e}"))?;
        ensure(decays(a, b), format!("{name}: {a:.2e} -> {b:.2e} does not decay"))?;
    }
    within(start.elapsed(), 120)?;
    Ok(format!(
        "r = π/3 ± {:.0e}, H residual {h:.1e}, decomposition {:.1e} -> {:.1e}, max {:.1e}",
        (r - PI / 3.0).abs(),
        c.decomposition,
        f.decomposition,
        f.max_residual()
    ))
}

fn product_inequality() -> Outcome {
    let q = product_q_margin(2001, 10_000, 0x5eed).map_err(|e| e.to_string())?;
    ensure((q.field.min - 0.875).abs() < 1e-6, format!("grid minimum {}", q.field.min))?;
    ensure(q.residuals["closed_form"] < 1e-12, format!("closed form {:.2e}", q.residuals["closed_form"]))?;
    let mut maxima = Vec::new();
    for (n, res) in [(3usize, vec![16, 12, 16]), (4, vec![10, 8, 8, 10])] {
        let amb = make_ambient(AmbientKind::CircleTimesSphere { n }).unwrap();
        let h = build_hypersurface(&amb, CatalogKind::CircleTimesEquator, Some(&res)).map_err(|e| e.to_string())?;
        let w = &analytic_harmonic_forms(&h).map_err(|e| e.to_string())?[0];
        let r = product_integrand_margin(&h, w).map_err(|e| e.to_string())?;
        ensure(r.field.max < 0.0, format!("n = {n}: integrand reaches {}", r.field.max))?;
        ensure(r.verdict == MarginVerdict::Pass, format!("n = {n}: {:?}", r.verdict))?;
        maxima.push(format!("{:.3}", r.field.max));
    }
    Ok(format!("min q = {:.9}, integrand max {}", q.field.min, maxima.join(" / ")))
}

fn pinching() -> Outcome {
    let round = make_ambient(AmbientKind::Ellipsoid { semi_axes: vec![1.0; 4] }).unwrap();
    let r = convex_margin(&round, 500, 0x5eed).map_err(|e| e.to_string())?;
    ensure(r.verdict == MarginVerdict::Pass, format!("round ellipsoid {:?}", r.verdict))?;
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/elongated-ellipsoid.cfg");
    let sc = Scenario::load(&cfg).map_err(|e| e.to_string())?;
    let long = convex_margin(&sc.validate(None).map_err(|e| e.to_string())?, 500, 0x5eed).map_err(|e| e.to_string())?;
    ensure(long.verdict == MarginVerdict::Fail, format!("elongated ellipsoid {:?}", long.verdict))?;
    let s3 = make_ambient(AmbientKind::Sphere { dim: 3 }).unwrap();
    let s = scalar3_margin(&s3, 500, 0x5eed).map_err(|e| e.to_string())?;
    ensure(s.field.min > 0.0 && (s.field.min - 3.0).abs() < 1e-8, format!("2R − |H|² min {}", s.field.min))?;
    let c = contraction_residual(&s3, 500, 0x5eed);
    ensure(c < 1e-8, format!("contraction residual {c:.2e}"))?;
    Ok(format!(
        "round ratio {:.3}, elongated ratio {:.3} > {:.4}, 2R − |H|² = {:.6}",
        r.thresholds["max_ratio"], long.thresholds["max_ratio"], long.thresholds["ratio_threshold"], s.field.min
    ))
}

fn constant_closure() -> Outcome {
    let table = constant_table();
    let open: Vec<_> = table.iter().filter(|r| !r.closes).collect();
    ensure(open.is_empty(), format!("{} rows do not close: {open:?}", open.len()))?;
    let cay = constant_row(Family::CayleyPlane).map_err(|e| e.to_string())?;
    ensure(cay.d == 27 && cay.stated == "1/351", format!("{cay:?}"))?;
    Ok(format!("{} rows close exactly", table.len()))
}

fn hodge_kernel() -> Outcome {
    let t = torus(48);
    let basis = harmonic_one_forms(&t).map_err(|e| e.to_string())?;
    ensure(basis.betti_number() == 2, format!("torus kernel {}", basis.betti_number()))?;
    let d = alignment_distance(&t, &basis.forms, &analytic_harmonic_forms(&t).map_err(|e| e.to_string())?);
    ensure(d < 1e-4, format!("alignment distance {d:.2e}"))?;
    let s3 = make_ambient(AmbientKind::Sphere { dim: 3 }).unwrap();
    let sphere = build_hypersurface(&s3, CatalogKind::EquatorInSphere, Some(&[16, 32])).unwrap();
    let k = harmonic_one_forms(&sphere).map_err(|e| e.to_string())?.betti_number();
    ensure(k == 0, format!("sphere kernel {k}"))?;
    Ok(format!("kernels 2 and 0, alignment {d:.1e}"))
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let t = torus96();
    let build = start.elapsed();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "wedge identity on the Clifford torus", wedge_identity(&t)),
        (2, "coordinate identity on the Clifford torus", coordinate_identity(&t)),
        (3, "Jacobi spectrum oracle", spectrum_oracle(&t, build)),
        (4, "index bound consistency", bound_consistency(&t)),
        (5, "concentration certificates", certificates(&t)),
        (6, "Veronese identities", veronese()),
        (7, "CP^2 minimal geodesic sphere", cp2_geodesic_sphere()),
        (8, "product inequality", product_inequality()),
        (9, "pinching checkers", pinching()),
        (10, "constant table", constant_closure()),
        (11, "Hodge solver", hodge_kernel()),
    ];
    let mut failed = Vec::new();
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(why) => {
                println!("criterion {n:>2} FAIL  {name}: {why}");
                failed.push(*n);
            }
        }
    }
    println!("total {:.1} s", start.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
