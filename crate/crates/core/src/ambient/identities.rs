use super::{AmbientKind, AmbientModel, AmbientPoint};
use crate::numerics::{richardson_d1, richardson_d2};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Step of the finite-difference chart oracle (one Richardson level).
const ORACLE_STEP: f64 = 2e-3;

/// Max residuals of the model identities over random samples.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct IdentityReport {
    pub model: String,
    pub samples: usize,
    pub residuals: BTreeMap<String, f64>,
    pub einstein_estimate: Option<f64>,
    pub sectional_min: f64,
    pub sectional_max: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.residuals.values().all(|r| r.is_finite() && *r < tol)
    }

    fn record(&mut self, name: &str, value: f64) {
        let slot = self.residuals.entry(name.to_string()).or_insert(0.0);
        if value.is_nan() || value > *slot {
            *slot = value;
        }
    }
}

pub(super) fn verify(model: &AmbientModel, sample_count: usize, seed: u64) -> IdentityReport {
    let mut report = IdentityReport {
        model: model.kind().to_string(),
        samples: sample_count,
        sectional_min: f64::INFINITY,
        sectional_max: f64::NEG_INFINITY,
        ..Default::default()
    };
    let k_einstein = model.einstein_constant();
    let mut ric_sum = 0.0;
    for (p, x, y) in model.sample_pairs(sample_count.max(1), seed) {
        check_chart(model, &p, &x, &mut report);
        let t = model.tangent_basis(&p);
        let ortho = (t.transpose() * &t - nalgebra::DMatrix::identity(t.ncols(), t.ncols())).norm();
        report.record("frame_orthonormality", ortho);

        let xy = model.ii_unchecked(&p, &x, &y);
        let yx = model.ii_unchecked(&p, &y, &x);
        report.record("ii_symmetry", (&xy - &yx).norm());
        report.record("ii_normality", model.project_tangent(&p, &xy).norm());

        let rm = model.rm_unchecked(&p, &x, &y);
        report.record("riemann_symmetry", (rm - model.rm_unchecked(&p, &y, &x)).abs());
        let c = 1.7;
        report.record(
            "riemann_scaling",
            (model.rm_unchecked(&p, &(&x * c), &y) - c * c * rm).abs(),
        );
        report.sectional_min = report.sectional_min.min(rm);
        report.sectional_max = report.sectional_max.max(rm);
        if let Some(a) = model.analytic_riemann_xyxy(&p, &x, &y) {
            let name = match model.kind() {
                AmbientKind::CircleTimesSphere { .. } | AmbientKind::SphereTimesSphere { .. } => {
                    "product_curvature"
                }
                _ => "gauss_vs_analytic",
            };
            report.record(name, (rm - a).abs());
        }

        let ric = model.ricci_in_frame(&p, &t, &x);
        ric_sum += ric;
        if let Some(k) = k_einstein {
            report.record("einstein", (ric - k).abs());
            let via_completion = model.ricci(&p, &x).unwrap_or(f64::NAN);
            report.record("ricci_frame_independence", (via_completion - ric).abs());
        }

        let h = model.mean_curvature_vector(&p);
        let r = model.scalar_curvature(&p);
        report.record(
            "scalar_contraction",
            (r - (h.norm_squared() - model.ii_norm_squared(&p))).abs(),
        );

        match model.kind() {
            AmbientKind::Sphere { .. } | AmbientKind::RealProjective { .. } => {
                let w = &x * 0.3 + &y * 1.1;
                let umb = model.ii_unchecked(&p, &x, &w) + &p.position * x.dot(&w);
                report.record("umbilicity", umb.norm());
            }
            AmbientKind::ComplexProjectiveVeronese { .. }
            | AmbientKind::QuaternionicProjectiveVeronese { .. } => {
                check_veronese(model, &p, &x, &y, rm, &mut report);
            }
            _ => {}
        }
    }
    if k_einstein.is_some() {
        report.einstein_estimate = Some(ric_sum / sample_count.max(1) as f64);
    }
    report
}

/// Chart oracle: finite differences along a curve on the model with velocity `x`.
fn check_chart(model: &AmbientModel, p: &AmbientPoint, x: &DVector<f64>, report: &mut IdentityReport) {
    report.record("variety", model.variety_residual(p));
    let pos = |t: f64| model.curve(p, x, t).position;
    let v = richardson_d1(pos, ORACLE_STEP);
    report.record("chart_tangency", (&v - model.project_tangent(p, &v)).norm());
    report.record("isometry", (v.norm() - x.norm()).abs());
    let acc = richardson_d2(pos, ORACLE_STEP);
    let normal = &acc - model.project_tangent(p, &acc);
    report.record("ii_vs_chart_oracle", (normal - model.ii_unchecked(p, x, x)).norm());
}

fn check_veronese(
    model: &AmbientModel,
    p: &AmbientPoint,
    x: &DVector<f64>,
    y: &DVector<f64>,
    rm: f64,
    report: &mut IdentityReport,
) {
    let xx = model.ii_unchecked(p, x, x);
    let yy = model.ii_unchecked(p, y, y);
    let xy = model.ii_unchecked(p, x, y);
    report.record("ii_unit_norm", (xx.norm_squared() - 4.0).abs());
    report.record("polarized", (xx.dot(&yy) + 2.0 * xy.norm_squared() - 4.0).abs());
    report.record("ii_mixed_vs_curvature", (xy.norm_squared() - (4.0 - rm) / 3.0).abs());
    report.record("sectional_range", (1.0 - rm).max(rm - 4.0).max(0.0));

    for jx in model.complex_structures(p, x) {
        report.record("structure_isometry", (jx.norm() - x.norm()).abs());
        report.record("structure_skew", jx.dot(x).abs());
        report.record("structure_tangency", model.tangency_residual(p, &jx));
    }
    if let Some(jx) = model.complex_structure(p, x) {
        let jjx = model.complex_structure(p, &jx).expect("CP has J");
        report.record("j_squared", (jjx + x).norm());
        let jy = model.complex_structure(p, y).expect("CP has J");
        let formula = 1.0 + 3.0 * x.dot(&jy).powi(2);
        report.record("sectional_formula", (rm - formula).abs());
        report.record("j_parallel", j_parallel_residual(model, p, x, y));
    }
}

/// `|∇_X (J Y) − J ∇_X Y|` for the tangent field `Y(t) = P_T Y₀` along a curve.
fn j_parallel_residual(model: &AmbientModel, p: &AmbientPoint, x: &DVector<f64>, y0: &DVector<f64>) -> f64 {
    let field = |t: f64| {
        let q = model.curve(p, x, t);
        let y = model.project_tangent(&q, y0);
        (model.complex_structure(&q, &y).expect("CP has J"), y)
    };
    let djy = richardson_d1(|t| field(t).0, 1e-3);
    let dy = richardson_d1(|t| field(t).1, 1e-3);
    let nabla_jy = model.project_tangent(p, &djy);
    let j_nabla_y = model
        .complex_structure(p, &model.project_tangent(p, &dy))
        .expect("CP has J");
    (nabla_jy - j_nabla_y).norm()
}
