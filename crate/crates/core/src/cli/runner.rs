//! Executes the tasks of one scenario and assembles its report.

use super::config::{Application, ScalarField, Scenario, Task};
use crate::ambient::AmbientModel;
use crate::bounds::{
    borderline_cp_report, borderline_refinement, certificate_with_spectrum, constant_table, convex_margin,
    cross_margin, decays, exploratory_margin, index_bound_report, product_integrand_margin, product_q,
    product_q_margin, scalar3_margin, sphere_margin, BorderlineReport, CertificateMode, CertificateVerdict,
    IndexBoundReport, MarginReport, MarginVerdict,
};
use crate::error::{LabError, Result};
use crate::hodge::{harmonic_one_forms, HarmonicBasis, Provenance};
use crate::hypersurface::{build_hypersurface, DiscreteHypersurface, Parity};
use crate::spectral::{assemble_jacobi, SpectrumReport};
use crate::testfns::{q_identity_report_with, TestMode};
use nalgebra::DVector;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskVerdict {
    Pass,
    Fail,
    NotApplicable,
    Error,
}

impl TaskVerdict {
    fn ok(self) -> bool {
        matches!(self, TaskVerdict::Pass | TaskVerdict::NotApplicable)
    }

    fn of(pass: bool) -> Self {
        if pass {
            TaskVerdict::Pass
        } else {
            TaskVerdict::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    pub index: usize,
    /// Keyed by threshold.
    pub count_below: BTreeMap<String, usize>,
    pub parity: Option<Parity>,
    pub clusters: Vec<(f64, usize)>,
    pub trial_dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicSummary {
    pub b1: usize,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateSummary {
    pub mode: CertificateMode,
    pub eta: f64,
    pub q: usize,
    pub d: usize,
    pub required: usize,
    pub required_real: f64,
    pub actual: usize,
    pub equality_count: usize,
    pub margin: f64,
    pub normalized_margin: f64,
    pub verdict: CertificateVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct BorderlineSummary {
    pub field: ScalarField,
    pub coarse: BorderlineReport,
    pub fine: Option<BorderlineReport>,
    pub decay: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    pub ambient: String,
    pub hypersurface: Option<String>,
    pub resolution: Vec<usize>,
    pub tasks: Vec<Task>,
    pub residuals: BTreeMap<String, f64>,
    pub harmonic: Option<HarmonicSummary>,
    pub spectrum: Option<SpectrumSummary>,
    pub certificate: Option<CertificateSummary>,
    pub bound: Option<IndexBoundReport>,
    pub margins: BTreeMap<String, MarginReport>,
    pub borderline: Option<BorderlineSummary>,
    pub verdicts: BTreeMap<String, TaskVerdict>,
    pub errors: Vec<String>,
    pub pass: bool,
}

/// Lazily built shared state of one scenario.
struct Context<'a> {
    sc: &'a Scenario,
    ambient: &'a AmbientModel,
    hyp: Option<DiscreteHypersurface>,
    spectrum: Option<SpectrumReport>,
    basis: Option<HarmonicBasis>,
}

impl<'a> Context<'a> {
    fn hyp(&mut self) -> Result<&DiscreteHypersurface> {
        if self.hyp.is_none() {
            let spec = self
                .sc
                .hypersurface
                .as_ref()
                .ok_or_else(|| LabError::Incompatible("no hypersurface configured".into()))?;
            self.hyp = Some(build_hypersurface(self.ambient, spec.kind.clone(), spec.resolution.as_deref())?);
        }
        Ok(self.hyp.as_ref().expect("built above"))
    }

    fn spectrum(&mut self) -> Result<&SpectrumReport> {
        if self.spectrum.is_none() {
            let parity = self.sc.parity();
            let s = assemble_jacobi(self.hyp()?, parity)?.spectrum()?;
            self.spectrum = Some(s);
        }
        Ok(self.spectrum.as_ref().expect("computed above"))
    }

    fn basis(&mut self) -> Result<&HarmonicBasis> {
        if self.basis.is_none() {
            let b = harmonic_one_forms(self.hyp()?)?;
            self.basis = Some(b);
        }
        Ok(self.basis.as_ref().expect("computed above"))
    }
}

/// Files written next to the report.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub report: PathBuf,
    pub extra: Vec<PathBuf>,
}

pub fn run_scenario(sc: &Scenario, ambient: &AmbientModel, tasks: &[Task], out_dir: &Path) -> Result<(ScenarioReport, Artifacts)> {
    let mut ctx = Context { sc, ambient, hyp: None, spectrum: None, basis: None };
    let mut report = ScenarioReport {
        scenario: sc.scenario.id.clone(),
        seed: sc.scenario.seed,
        ambient: ambient.kind().to_string(),
        hypersurface: sc.hypersurface.as_ref().map(|h| format!("{:?}", h.kind)),
        resolution: Vec::new(),
        tasks: tasks.to_vec(),
        residuals: BTreeMap::new(),
        harmonic: None,
        spectrum: None,
        certificate: None,
        bound: None,
        margins: BTreeMap::new(),
        borderline: None,
        verdicts: BTreeMap::new(),
        errors: Vec::new(),
        pass: true,
    };
    std::fs::create_dir_all(out_dir)?;
    let mut artifacts = Artifacts { report: out_dir.join(format!("{}.json", sc.scenario.id)), extra: Vec::new() };

    for &task in tasks {
        let verdict = match run_task(task, &mut ctx, &mut report, out_dir, &mut artifacts) {
            Ok(v) => v,
            Err(e) => {
                report.errors.push(format!("{}: {e}", task.name()));
                TaskVerdict::Error
            }
        };
        report.verdicts.insert(task.name().into(), verdict);
    }
    if let Some(h) = &ctx.hyp {
        report.resolution = h.resolution().to_vec();
    }
    if let Some(b) = &ctx.basis {
        report.harmonic = Some(HarmonicSummary { b1: b.betti_number(), provenance: b.provenance });
    }
    report.pass = report.verdicts.values().all(|v| v.ok());

    let json = serde_json::to_string_pretty(&report).map_err(|e| LabError::Config(e.to_string()))?;
    std::fs::write(&artifacts.report, json + "\n")?;
    Ok((report, artifacts))
}

fn run_task(
    task: Task,
    ctx: &mut Context,
    report: &mut ScenarioReport,
    out_dir: &Path,
    artifacts: &mut Artifacts,
) -> Result<TaskVerdict> {
    let sc = ctx.sc;
    let tol = &sc.tolerances;
    let id = &sc.scenario.id;
    match task {
        Task::Identities => {
            let r = ctx.ambient.verify_model_identities(sc.scenario.samples, sc.scenario.seed);
            for (k, v) in &r.residuals {
                report.residuals.insert(format!("ambient.{k}"), *v);
            }
            let mut pass = r.passes(tol.identity);
            if sc.hypersurface.is_some() {
                let g = ctx.hyp()?.geometry_report().clone();
                report.residuals.insert("hypersurface.mean_curvature".into(), g.mean_curvature_residual);
                report.residuals.insert("hypersurface.normal_tangency".into(), g.normal_tangency);
                report.residuals.insert("hypersurface.normal_unit".into(), g.normal_unit);
                report.residuals.insert("hypersurface.shape_asymmetry".into(), g.shape_asymmetry);
                if let Some(v) = g.analytic_volume {
                    report.residuals.insert("hypersurface.volume".into(), (g.volume - v).abs() / v);
                }
                pass &= g.mean_curvature_residual < tol.mean_curvature;
            }
            Ok(TaskVerdict::of(pass))
        }
        Task::Spectrum => {
            let parity = sc.parity();
            let s = ctx.spectrum()?;
            let count_below = sc
                .spectrum
                .count_below
                .iter()
                .map(|eta| (format!("{eta}"), s.count_below(*eta)))
                .collect();
            let take = sc.spectrum.report_eigenvalues.min(s.eigenvalues.len());
            let summary = SpectrumSummary {
                eigenvalues: s.eigenvalues[..take].to_vec(),
                index: s.morse_index,
                count_below,
                parity,
                clusters: s.cluster_summary(take),
                trial_dimension: s.eigenvalues.len(),
            };
            let pass = sc.spectrum.expected_index.is_none_or(|k| k == s.morse_index);
            let path = out_dir.join(format!("{id}-spectrum.csv"));
            s.write_csv(&path)?;
            artifacts.extra.push(path);
            report.spectrum = Some(summary);
            Ok(TaskVerdict::of(pass))
        }
        Task::QIdentity => {
            let forms = ctx.basis()?.forms.clone();
            if forms.is_empty() {
                return Ok(TaskVerdict::NotApplicable);
            }
            let hyp = ctx.hyp()?;
            let system = assemble_jacobi(hyp, None)?;
            let mut modes = vec![TestMode::NormalWedge];
            if hyp.dim() == 2 {
                modes.extend([TestMode::Coordinates, TestMode::StarCoordinates]);
            }
            let mut pass = true;
            for mode in modes {
                let mut worst: f64 = 0.0;
                for w in &forms {
                    worst = worst.max(q_identity_report_with(hyp, &system, w, mode)?.relative_residual);
                }
                let key = serde_json::to_value(mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                report.residuals.insert(format!("q_identity.{key}"), worst);
                pass &= worst < tol.q_identity;
            }
            Ok(TaskVerdict::of(pass))
        }
        Task::Certificate => {
            let forms = ctx.basis()?.forms.clone();
            if forms.is_empty() {
                return Ok(TaskVerdict::NotApplicable);
            }
            let parity = sc.parity();
            ctx.spectrum()?;
            let (hyp, spectrum) = (ctx.hyp.as_ref().expect("built"), ctx.spectrum.as_ref().expect("computed"));
            let c = certificate_with_spectrum(hyp, &forms, sc.certificate.eta, sc.certificate.mode, parity, spectrum)?;
            let pass = c.passes();
            report.certificate = Some(CertificateSummary {
                mode: c.mode,
                eta: c.eta,
                q: c.q,
                d: c.d,
                required: c.required,
                required_real: c.required_real,
                actual: c.actual,
                equality_count: c.equality_count,
                margin: c.hypothesis_margin,
                normalized_margin: c.normalized_margin,
                verdict: c.verdict,
            });
            Ok(TaskVerdict::of(pass))
        }
        Task::Margins => {
            let mut pass = true;
            for app in sc.applications(ctx.ambient) {
                let r = run_margin(app, ctx, out_dir, artifacts)?;
                pass &= r.verdict != MarginVerdict::Fail;
                let key = serde_json::to_value(app).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                report.margins.insert(key, r);
            }
            Ok(TaskVerdict::of(pass))
        }
        Task::Borderline => {
            let field = sc.borderline.field;
            let f = move |x: &DVector<f64>| match field {
                ScalarField::Constant => 1.0,
                ScalarField::Zero => 0.0,
                ScalarField::Sine => (x[0] + 2.0 * x[x.len() / 2]).sin(),
            };
            let hyp = ctx.hyp()?;
            let summary = if sc.borderline.refine {
                let (coarse, fine) = borderline_refinement(hyp, f)?;
                let pairs = [
                    (coarse.div_u, fine.div_u),
                    (coarse.u_skew, fine.u_skew),
                    (coarse.traced_gauss, fine.traced_gauss),
                    (coarse.div_form, fine.div_form),
                    (coarse.decomposition, fine.decomposition),
                ];
                let decay = pairs.iter().all(|(c, f)| decays(*c, *f));
                BorderlineSummary { field, coarse, fine: Some(fine), decay: Some(decay) }
            } else {
                let values: Vec<f64> = hyp.points.iter().map(|p| f(&p.position)).collect();
                BorderlineSummary { field, coarse: borderline_cp_report(hyp, &values)?, fine: None, decay: None }
            };
            let last = summary.fine.as_ref().unwrap_or(&summary.coarse);
            let pass = last.max_residual() < tol.borderline && summary.decay.unwrap_or(true);
            report.residuals.insert("borderline.max".into(), last.max_residual());
            report.borderline = Some(summary);
            Ok(TaskVerdict::of(pass))
        }
        Task::BoundTable => {
            let closes = constant_table().iter().all(|r| r.closes);
            if sc.hypersurface.is_none() {
                return Ok(TaskVerdict::of(closes));
            }
            let b1 = ctx.basis()?.betti_number();
            let index = ctx.spectrum()?.morse_index;
            let b = index_bound_report(ctx.hyp.as_ref().expect("built"), b1, index)?;
            let pass = closes && b.consistent && b.constants.closes;
            report.bound = Some(b);
            Ok(TaskVerdict::of(pass))
        }
    }
}

fn run_margin(app: Application, ctx: &mut Context, out_dir: &Path, artifacts: &mut Artifacts) -> Result<MarginReport> {
    let sc = ctx.sc;
    let (samples, seed) = (sc.scenario.samples, sc.scenario.seed);
    let first_form = |ctx: &mut Context| -> Result<Option<crate::hodge::DiscreteOneForm>> {
        Ok(ctx.basis()?.forms.first().cloned())
    };
    match app {
        Application::Cross => cross_margin(ctx.ambient, samples, seed),
        Application::Convex => convex_margin(ctx.ambient, samples, seed),
        Application::Scalar3 => scalar3_margin(ctx.ambient, samples, seed),
        Application::ProductQ => {
            let r = product_q_margin(sc.margins.product_grid, sc.margins.product_random, seed)?;
            let path = out_dir.join(format!("{}-q-grid.csv", sc.scenario.id));
            write_q_grid(&path, 181)?;
            artifacts.extra.push(path);
            Ok(r)
        }
        Application::Sphere | Application::ProductIntegrand | Application::Exploratory => {
            let Some(w) = first_form(ctx)? else {
                return Ok(not_applicable(app, ctx.ambient, "no harmonic forms"));
            };
            let hyp = ctx.hyp()?;
            match app {
                Application::Sphere => sphere_margin(hyp, &w),
                Application::ProductIntegrand => product_integrand_margin(hyp, &w),
                _ => Ok(exploratory_margin(hyp, &w)),
            }
        }
    }
}

fn not_applicable(app: Application, ambient: &AmbientModel, why: &str) -> MarginReport {
    MarginReport {
        application: format!("{app:?}"),
        target: ambient.kind().to_string(),
        field: Default::default(),
        thresholds: BTreeMap::new(),
        residuals: BTreeMap::new(),
        verdict: MarginVerdict::NotApplicable,
        notes: vec![why.into()],
    }
}

/// Columns `theta,phi,q` on an `n × n` lattice of `[0,π]²`.
fn write_q_grid(path: &Path, n: usize) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "theta,phi,q")?;
    let step = PI / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            let (t, p) = (i as f64 * step, j as f64 * step);
            writeln!(f, "{t:.6},{p:.6},{:.12}", product_q(t, p))?;
        }
    }
    Ok(())
}

/// One summary row per scenario.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub ambient: String,
    pub hypersurface: String,
    pub b1: Option<usize>,
    pub index: Option<usize>,
    pub bound: Option<usize>,
    pub certificate: String,
    pub failed: String,
    pub pass: bool,
}

impl From<&ScenarioReport> for SummaryRow {
    fn from(r: &ScenarioReport) -> Self {
        let failed: Vec<&str> = r.verdicts.iter().filter(|(_, v)| !v.ok()).map(|(k, _)| k.as_str()).collect();
        Self {
            scenario: r.scenario.clone(),
            ambient: r.ambient.clone(),
            hypersurface: r.hypersurface.clone().unwrap_or_default(),
            b1: r.harmonic.as_ref().map(|h| h.b1),
            index: r.spectrum.as_ref().map(|s| s.index),
            bound: r.bound.as_ref().map(|b| b.bound),
            certificate: r
                .certificate
                .as_ref()
                .map(|c| format!("{:?}", c.verdict).to_lowercase())
                .unwrap_or_default(),
            failed: failed.join(";"),
            pass: r.pass,
        }
    }
}

pub fn write_summary(path: &Path, reports: &[ScenarioReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| LabError::Config(e.to_string()))?;
    for r in reports {
        w.serialize(SummaryRow::from(r)).map_err(|e| LabError::Config(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
