//! Test functions built from a harmonic 1-form (Euclidean coordinates of `ω♯`,
//! of `*ω♯`, or of `N ∧ ω♯`) and independent evaluation of both sides of the
//! index-form identities they satisfy.

use crate::ambient::{AmbientModel, AmbientPoint};
use crate::error::{LabError, Result};
use crate::hodge::{bochner_residual, hodge_star_surface, DiscreteOneForm};
use crate::hypersurface::DiscreteHypersurface;
use crate::spectral::{assemble_jacobi, SpectralSystem};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Bochner residual above which a form is rejected as non-harmonic.
pub const HARMONIC_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMode {
    /// `u_i = ⟨ω♯, θ_i⟩`, surfaces only.
    Coordinates,
    /// `u*_i = ⟨*ω♯, θ_i⟩`, surfaces only.
    StarCoordinates,
    /// `u_ij = ⟨N ∧ ω♯, θ_i ∧ θ_j⟩`, `i < j`.
    NormalWedge,
}

impl TestMode {
    fn surfaces_only(self) -> bool {
        !matches!(self, TestMode::NormalWedge)
    }
}

/// Node-sampled test functions with their `(i)` or `(i, j)` labels.
#[derive(Clone, Debug)]
pub struct TestFunctionSet {
    pub mode: TestMode,
    pub labels: Vec<Vec<usize>>,
    pub values: Vec<Vec<f64>>,
}

impl TestFunctionSet {
    /// `Σ u²` at every node.
    pub fn pointwise_sum_sq(&self) -> Vec<f64> {
        let nodes = self.values.first().map_or(0, Vec::len);
        (0..nodes).map(|a| self.values.iter().map(|u| u[a] * u[a]).sum()).collect()
    }
}

/// Test functions in the standard Euclidean basis.
pub fn test_functions(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm, mode: TestMode) -> Result<TestFunctionSet> {
    test_functions_in_basis(hyp, omega, mode, &DMatrix::identity(hyp.embed_dim(), hyp.embed_dim()))
}

/// Test functions in the orthonormal basis `θ_i` given by the columns of `theta`.
pub fn test_functions_in_basis(
    hyp: &DiscreteHypersurface,
    omega: &DiscreteOneForm,
    mode: TestMode,
    theta: &DMatrix<f64>,
) -> Result<TestFunctionSet> {
    let d = hyp.embed_dim();
    if omega.components.len() != hyp.node_count() || omega.components.iter().any(|c| c.len() != hyp.dim()) {
        return Err(LabError::InvalidDimension(format!(
            "form sampled as {} × {} does not match {} nodes × n = {}",
            omega.components.len(),
            omega.components.first().map_or(0, |c| c.len()),
            hyp.node_count(),
            hyp.dim()
        )));
    }
    if theta.nrows() != d || theta.ncols() != d {
        return Err(LabError::InvalidDimension(format!("basis must be {d} × {d}")));
    }
    if mode.surfaces_only() && hyp.dim() != 2 {
        return Err(LabError::InvalidDimension(format!("{mode:?} needs n = 2, got {}", hyp.dim())));
    }
    let form = match mode {
        TestMode::StarCoordinates => hodge_star_surface(hyp, omega)?,
        _ => omega.clone(),
    };
    let sharp: Vec<DVector<f64>> = form.sharp(hyp).iter().map(|v| theta.transpose() * v).collect();
    let (labels, values) = match mode {
        TestMode::Coordinates | TestMode::StarCoordinates => (
            (0..d).map(|i| vec![i]).collect(),
            (0..d).map(|i| sharp.iter().map(|v| v[i]).collect()).collect(),
        ),
        TestMode::NormalWedge => {
            let normals: Vec<DVector<f64>> = hyp.normals.iter().map(|v| theta.transpose() * v).collect();
            let mut labels = Vec::new();
            let mut values = Vec::new();
            for i in 0..d {
                for j in (i + 1)..d {
                    labels.push(vec![i, j]);
                    values.push(
                        normals
                            .iter()
                            .zip(&sharp)
                            .map(|(nv, w)| nv[i] * w[j] - nv[j] * w[i])
                            .collect(),
                    );
                }
            }
            (labels, values)
        }
    };
    Ok(TestFunctionSet { mode, labels, values })
}

/// Per-node symmetric matrices `B_a` (in the tangent frame) of the identity's
/// right-hand integrand, which is quadratic in `ω`: integrand `= cᵀ B_a c` for
/// frame components `c` of `ω` at node `a`.
#[derive(Clone, Debug)]
pub struct IntegrandDensity {
    pub mode: TestMode,
    pub per_node: Vec<DMatrix<f64>>,
}

/// Integrand of the wedge identity at an ambient point, for a hypersurface
/// with orthonormal tangent frame `frame` (columns), unit normal `normal` and
/// `ric_nn = Ric(N,N)`:
/// `Σ|II(e_k,X)|² + Σ|II(e_k,N)|²|X|² − ΣRm(e_k,X,e_k,X) − Ric(N,N)|X|²`.
pub fn wedge_integrand(
    amb: &AmbientModel,
    p: &AmbientPoint,
    frame: &DMatrix<f64>,
    normal: &DVector<f64>,
    ric_nn: f64,
    x: &DVector<f64>,
) -> f64 {
    let x2 = x.norm_squared();
    let mut total = -ric_nn * x2;
    for ek in frame.column_iter() {
        let ek = ek.into_owned();
        total += amb.ii_unchecked(p, &ek, x).norm_squared();
        total += amb.ii_unchecked(p, &ek, normal).norm_squared() * x2;
        total -= amb.rm_unchecked(p, &ek, x);
    }
    total
}

/// Integrand of the coordinate identity for surfaces:
/// `Σ|II(e_k,X)|² − (R/2)|X|²`.
pub fn coordinate_integrand(amb: &AmbientModel, p: &AmbientPoint, frame: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let ii: f64 = frame
        .column_iter()
        .map(|ek| amb.ii_unchecked(p, &ek.into_owned(), x).norm_squared())
        .sum();
    ii - 0.5 * amb.scalar_curvature(p) * x.norm_squared()
}

/// The identity's integrand at node `a` for the tangent vector `x`.
pub fn pointwise_integrand(hyp: &DiscreteHypersurface, a: usize, mode: TestMode, x: &DVector<f64>) -> f64 {
    let amb = hyp.ambient();
    match mode {
        TestMode::Coordinates | TestMode::StarCoordinates => {
            coordinate_integrand(amb, &hyp.points[a], &hyp.frames[a], x)
        }
        TestMode::NormalWedge => {
            wedge_integrand(amb, &hyp.points[a], &hyp.frames[a], &hyp.normals[a], hyp.ricci_nn[a], x)
        }
    }
}

/// Builds `B_a` by polarization of the pointwise integrand on frame vectors.
pub fn integrand_density(hyp: &DiscreteHypersurface, mode: TestMode) -> Result<IntegrandDensity> {
    if mode.surfaces_only() && hyp.dim() != 2 {
        return Err(LabError::InvalidDimension(format!("{mode:?} needs n = 2, got {}", hyp.dim())));
    }
    let n = hyp.dim();
    let per_node = (0..hyp.node_count())
        .map(|a| {
            let e = &hyp.frames[a];
            let mut b = DMatrix::zeros(n, n);
            for j in 0..n {
                for l in j..n {
                    let (ej, el) = (e.column(j).into_owned(), e.column(l).into_owned());
                    let v = if j == l {
                        pointwise_integrand(hyp, a, mode, &ej)
                    } else {
                        0.25 * (pointwise_integrand(hyp, a, mode, &(&ej + &el))
                            - pointwise_integrand(hyp, a, mode, &(&ej - &el)))
                    };
                    b[(j, l)] = v;
                    b[(l, j)] = v;
                }
            }
            b
        })
        .collect();
    Ok(IntegrandDensity { mode, per_node })
}

/// Right-hand side by direct pointwise evaluation, without polarization.
pub fn direct_integrand_integral(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm, mode: TestMode) -> Result<f64> {
    if mode.surfaces_only() && hyp.dim() != 2 {
        return Err(LabError::InvalidDimension(format!("{mode:?} needs n = 2, got {}", hyp.dim())));
    }
    let form = match mode {
        TestMode::StarCoordinates => hodge_star_surface(hyp, omega)?,
        _ => omega.clone(),
    };
    let sharp = form.sharp(hyp);
    let f: Vec<f64> = (0..hyp.node_count())
        .map(|a| pointwise_integrand(hyp, a, mode, &sharp[a]))
        .collect();
    Ok(hyp.integrate(&f))
}

/// Both sides of `Σ Q(u,u) = ∫ integrand`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QIdentityReport {
    pub mode: TestMode,
    pub lhs: f64,
    pub rhs: f64,
    /// `∫|ω|² dM`.
    pub form_mass: f64,
    /// `|lhs − rhs| / ∫|ω|²`.
    pub relative_residual: f64,
    /// Largest relative `L²` distance of a test function from the trial space.
    pub projection_residual: f64,
}

/// Assembles the Jacobi system and compares both sides of the identity.
pub fn q_identity_report(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm, mode: TestMode) -> Result<QIdentityReport> {
    let system = assemble_jacobi(hyp, None)?;
    q_identity_report_with(hyp, &system, omega, mode)
}

/// As [`q_identity_report`], reusing an assembled system so that `Q` shares
/// the discretization of the eigenproblem.
pub fn q_identity_report_with(
    hyp: &DiscreteHypersurface,
    system: &SpectralSystem,
    omega: &DiscreteOneForm,
    mode: TestMode,
) -> Result<QIdentityReport> {
    let residual = bochner_residual(hyp, omega);
    if !(residual <= HARMONIC_TOL) {
        return Err(LabError::NotHarmonic { residual });
    }
    let set = test_functions(hyp, omega, mode)?;
    let mut lhs = 0.0;
    let mut projection_residual: f64 = 0.0;
    for u in &set.values {
        let (q, res) = system.q_value(u);
        lhs += q;
        projection_residual = projection_residual.max(res);
    }
    let rhs = direct_integrand_integral(hyp, omega, mode)?;
    let form_mass = hyp.integrate(&omega.norm_sq());
    Ok(QIdentityReport {
        mode,
        lhs,
        rhs,
        form_mass,
        relative_residual: (lhs - rhs).abs() / form_mass,
        projection_residual,
    })
}

/// Gram matrix `G` of the integrand and `L²` mass `M_V` on a basis of forms.
#[derive(Clone, Debug)]
pub struct IntegrandForm {
    pub mode: TestMode,
    pub gram: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}

impl IntegrandForm {
    /// Generalized eigenvalues of `G c = μ M_V c`, ascending; the hypothesis
    /// with threshold `η` holds iff the largest is `< η`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let chol = self.mass.clone().cholesky().expect("mass checked at construction");
        let linv = chol.l().try_inverse().expect("triangular factor");
        crate::numerics::sym_eigen_sorted(&(&linv * &self.gram * linv.transpose())).0
    }

    /// Largest Rayleigh quotient `cᵀGc / cᵀM_V c`.
    pub fn max_ratio(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Whether `G − η M_V` is negative definite.
    pub fn negative_definite_below(&self, eta: f64) -> bool {
        self.max_ratio() < eta
    }

    pub fn quadratic(&self, c: &DVector<f64>) -> (f64, f64) {
        (c.dot(&(&self.gram * c)), c.dot(&(&self.mass * c)))
    }
}

/// Assembles `G` and `M_V` over the span of `forms`.
pub fn integrand_quadratic_form(
    hyp: &DiscreteHypersurface,
    forms: &[DiscreteOneForm],
    mode: TestMode,
) -> Result<IntegrandForm> {
    if forms.is_empty() {
        return Err(LabError::Degenerate("empty form space".into()));
    }
    let density = integrand_density(hyp, mode)?;
    let q = forms.len();
    let comps: Vec<Vec<DVector<f64>>> = forms
        .iter()
        .map(|f| match mode {
            TestMode::StarCoordinates => hodge_star_surface(hyp, f).map(|s| s.components),
            _ => Ok(f.components.clone()),
        })
        .collect::<Result<_>>()?;
    let mut gram = DMatrix::zeros(q, q);
    let mut mass = DMatrix::zeros(q, q);
    for i in 0..q {
        for j in i..q {
            let g: Vec<f64> = (0..hyp.node_count())
                .map(|a| comps[i][a].dot(&(&density.per_node[a] * &comps[j][a])))
                .collect();
            let m: Vec<f64> = (0..hyp.node_count())
                .map(|a| forms[i].components[a].dot(&forms[j].components[a]))
                .collect();
            gram[(i, j)] = hyp.integrate(&g);
            gram[(j, i)] = gram[(i, j)];
            mass[(i, j)] = hyp.integrate(&m);
            mass[(j, i)] = mass[(i, j)];
        }
    }
    let (vals, _) = crate::numerics::sym_eigen_sorted(&mass);
    let (lo, hi) = (vals[0], vals[q - 1]);
    if !(lo > 1e-10 * hi) {
        return Err(LabError::IllConditioned { min_eig: lo });
    }
    Ok(IntegrandForm { mode, gram, mass })
}
