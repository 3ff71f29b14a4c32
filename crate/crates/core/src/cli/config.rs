//! Scenario files: TOML with one table per section.
//!
//! ```toml
//! [scenario]
//! id = "clifford"
//! seed = 7                 # optional
//! out_dir = "reports"      # optional
//!
//! [ambient]
//! kind = "sphere"
//! dim = 3
//!
//! [hypersurface]
//! kind = "clifford_torus"
//! resolution = [48, 48]
//!
//! [tasks]
//! run = ["identities", "spectrum", "q-identity", "certificate", "margins", "bound-table"]
//! ```

use crate::ambient::{make_ambient, AmbientKind, AmbientModel};
use crate::bounds::CertificateMode;
use crate::error::{LabError, Result};
use crate::hypersurface::{CatalogKind, Parity};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Identities,
    Spectrum,
    QIdentity,
    Certificate,
    Margins,
    Borderline,
    BoundTable,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Identities,
        Task::Spectrum,
        Task::QIdentity,
        Task::Certificate,
        Task::Margins,
        Task::Borderline,
        Task::BoundTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Identities => "identities",
            Task::Spectrum => "spectrum",
            Task::QIdentity => "q-identity",
            Task::Certificate => "certificate",
            Task::Margins => "margins",
            Task::Borderline => "borderline",
            Task::BoundTable => "bound-table",
        }
    }

    fn needs_hypersurface(self) -> bool {
        !matches!(self, Task::Identities | Task::Margins | Task::BoundTable)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Application {
    Sphere,
    Cross,
    ProductQ,
    ProductIntegrand,
    Convex,
    Scalar3,
    Exploratory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarField {
    Constant,
    Zero,
    Sine,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub id: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Random points for sampled identities and margins.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_samples() -> usize {
    500
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HypersurfaceSection {
    #[serde(flatten)]
    pub kind: CatalogKind,
    #[serde(default)]
    pub resolution: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TasksSection {
    #[serde(default)]
    pub run: Option<Vec<Task>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Ambient model identities.
    pub identity: f64,
    /// Mean curvature of the discrete hypersurface.
    pub mean_curvature: f64,
    /// Relative residual of the test-function identities.
    pub q_identity: f64,
    /// Structure and form residuals of the borderline report.
    pub borderline: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { identity: 1e-8, mean_curvature: 1e-6, q_identity: 1e-4, borderline: 1e-5 }
    }
}

impl Tolerances {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            identity: self.identity * s,
            mean_curvature: self.mean_curvature * s,
            q_identity: self.q_identity * s,
            borderline: self.borderline * s,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    /// Restriction on the sphere cover; defaults to even for `RP`.
    pub parity: Option<Parity>,
    pub expected_index: Option<usize>,
    /// Thresholds at which `count_below` is reported.
    pub count_below: Vec<f64>,
    /// How many eigenvalues the report lists.
    pub report_eigenvalues: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self { parity: None, expected_index: None, count_below: vec![0.0], report_eigenvalues: 16 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateSection {
    pub eta: f64,
    pub mode: CertificateMode,
}

impl Default for CertificateSection {
    fn default() -> Self {
        Self { eta: 0.0, mode: CertificateMode::Wedge }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarginsSection {
    /// Defaults to every application that fits the ambient.
    pub applications: Option<Vec<Application>>,
    pub product_grid: usize,
    pub product_random: usize,
}

impl Default for MarginsSection {
    fn default() -> Self {
        Self { applications: None, product_grid: 2001, product_random: 10_000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BorderlineSection {
    pub field: ScalarField,
    /// Also run at doubled resolution and require first-order decay.
    pub refine: bool,
}

impl Default for BorderlineSection {
    fn default() -> Self {
        Self { field: ScalarField::Sine, refine: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scenario: ScenarioSection,
    pub ambient: AmbientKind,
    #[serde(default)]
    pub hypersurface: Option<HypersurfaceSection>,
    #[serde(default)]
    pub tasks: TasksSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub certificate: CertificateSection,
    #[serde(default)]
    pub margins: MarginsSection,
    #[serde(default)]
    pub borderline: BorderlineSection,
}

/// Command-line adjustments applied after parsing.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub resolution_scale: Option<f64>,
    pub tol_scale: Option<f64>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.scenario.seed = seed;
        }
        if let (Some(s), Some(h)) = (o.resolution_scale, self.hypersurface.as_mut()) {
            if let Some(res) = h.resolution.as_mut() {
                for r in res.iter_mut() {
                    *r = ((*r as f64 * s).round() as usize).max(1);
                }
            }
        }
        if let Some(s) = o.tol_scale {
            self.tolerances = self.tolerances.scaled(s);
        }
    }

    /// Configured tasks, or every task that fits the scenario.
    pub fn tasks(&self, ambient: &AmbientModel) -> Vec<Task> {
        match &self.tasks.run {
            Some(list) => {
                let mut t = list.clone();
                t.sort();
                t.dedup();
                t
            }
            None => Task::ALL.into_iter().filter(|t| self.compatible(*t, ambient).is_ok()).collect(),
        }
    }

    pub fn parity(&self) -> Option<Parity> {
        self.spectrum
            .parity
            .or(matches!(self.ambient, AmbientKind::RealProjective { .. }).then_some(Parity::Even))
    }

    /// Applications for the margins task.
    pub fn applications(&self, ambient: &AmbientModel) -> Vec<Application> {
        if let Some(list) = &self.margins.applications {
            return list.clone();
        }
        let hyp = self.hypersurface.is_some();
        let mut out = Vec::new();
        match &self.ambient {
            AmbientKind::Sphere { .. } | AmbientKind::RealProjective { .. } if hyp => out.push(Application::Sphere),
            AmbientKind::ComplexProjectiveVeronese { .. } | AmbientKind::QuaternionicProjectiveVeronese { .. } => {
                out.push(Application::Cross)
            }
            AmbientKind::CircleTimesSphere { .. } => {
                out.push(Application::ProductQ);
                if hyp {
                    out.push(Application::ProductIntegrand);
                }
            }
            AmbientKind::Ellipsoid { .. } => out.push(Application::Convex),
            AmbientKind::SphereTimesSphere { .. } if hyp => out.push(Application::Exploratory),
            _ => {}
        }
        if ambient.intrinsic_dim() == 3 {
            out.push(Application::Scalar3);
        }
        out
    }

    fn compatible(&self, task: Task, ambient: &AmbientModel) -> Result<()> {
        let fail = |why: &str| Err(LabError::Incompatible(format!("task {}: {why}", task.name())));
        let hyp = self.hypersurface.as_ref();
        if task.needs_hypersurface() && hyp.is_none() {
            return fail("needs a [hypersurface] section");
        }
        match task {
            Task::Borderline if !ambient.has_complex_structure() => fail("needs a complex projective ambient"),
            Task::Certificate if self.certificate.mode == CertificateMode::SurfacePair && ambient.intrinsic_dim() != 3 => {
                fail("the surface pair needs a three-dimensional ambient")
            }
            Task::Margins => {
                let apps = self.applications(ambient);
                if apps.is_empty() {
                    return fail("no application fits this ambient");
                }
                for app in apps {
                    let ok = match app {
                        Application::Sphere | Application::Exploratory => hyp.is_some(),
                        Application::ProductIntegrand => {
                            hyp.is_some() && matches!(self.ambient, AmbientKind::CircleTimesSphere { .. })
                        }
                        Application::Cross => ambient.is_veronese(),
                        Application::ProductQ => true,
                        Application::Convex => ambient.has_outward_normal(),
                        Application::Scalar3 => ambient.intrinsic_dim() == 3,
                    };
                    if !ok {
                        return fail(&format!("application {app:?} does not fit {}", ambient.kind()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Builds the ambient and checks every requested task against it.
    pub fn validate(&self, requested: Option<Task>) -> Result<AmbientModel> {
        if self.scenario.id.is_empty() || self.scenario.id.contains(['/', '\\']) {
            return Err(LabError::Config(format!("invalid scenario id {:?}", self.scenario.id)));
        }
        let ambient = make_ambient(self.ambient.clone())?;
        let tasks = match requested {
            Some(t) => vec![t],
            None => self.tasks(&ambient),
        };
        for t in tasks {
            self.compatible(t, &ambient)?;
        }
        Ok(ambient)
    }
}
