//! Harmonic 1-forms on catalog hypersurfaces: a Whitney-element Hodge solver
//! for surfaces, parallel circle forms from the catalog otherwise, the surface
//! Hodge star and the integrated Bochner identity.

pub mod sparse;
pub mod whitney;

use crate::error::{LabError, Result};
use crate::hypersurface::DiscreteHypersurface;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
pub use whitney::{KernelReport, WhitneyComplex};

/// Seed of the random start block of the kernel iteration.
const KERNEL_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    AnalyticCatalog,
    HodgeSolver,
}

/// A 1-form stored by its frame components `ω(e_1), …, ω(e_n)` at every node.
#[derive(Clone, Debug)]
pub struct DiscreteOneForm {
    pub label: String,
    pub provenance: Provenance,
    pub components: Vec<DVector<f64>>,
}

impl DiscreteOneForm {
    pub fn zero(hyp: &DiscreteHypersurface) -> Self {
        Self {
            label: "0".into(),
            provenance: Provenance::AnalyticCatalog,
            components: vec![DVector::zeros(hyp.dim()); hyp.node_count()],
        }
    }

    /// `ω♯` as `R^d` vectors.
    pub fn sharp(&self, hyp: &DiscreteHypersurface) -> Vec<DVector<f64>> {
        hyp.to_ambient_vectors(&self.components)
    }

    /// `|ω|²` per node.
    pub fn norm_sq(&self) -> Vec<f64> {
        self.components.iter().map(DVector::norm_squared).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { components: self.components.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    pub fn axpy(&self, s: f64, other: &DiscreteOneForm) -> Self {
        Self {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b * s).collect(),
            ..self.clone()
        }
    }
}

/// `∫⟨α, β⟩ dM`.
pub fn l2_inner(hyp: &DiscreteHypersurface, a: &DiscreteOneForm, b: &DiscreteOneForm) -> f64 {
    let f: Vec<f64> = a.components.iter().zip(&b.components).map(|(x, y)| x.dot(y)).collect();
    hyp.integrate(&f)
}

/// L² Gram matrix of a list of forms.
pub fn gram_matrix(hyp: &DiscreteHypersurface, forms: &[DiscreteOneForm]) -> DMatrix<f64> {
    DMatrix::from_fn(forms.len(), forms.len(), |i, j| l2_inner(hyp, &forms[i], &forms[j]))
}

/// Gram–Schmidt in the given order, twice for stability.
pub fn l2_orthonormalize(hyp: &DiscreteHypersurface, forms: &[DiscreteOneForm]) -> Result<Vec<DiscreteOneForm>> {
    let mut out: Vec<DiscreteOneForm> = Vec::with_capacity(forms.len());
    for f in forms {
        let mut v = f.clone();
        for _ in 0..2 {
            for q in &out {
                v = v.axpy(-l2_inner(hyp, &v, q), q);
            }
        }
        let norm = l2_inner(hyp, &v, &v).sqrt();
        let reference = l2_inner(hyp, f, f).sqrt();
        if !(norm > 1e-10 * reference) {
            return Err(LabError::Degenerate(format!("form {} is linearly dependent", f.label)));
        }
        out.push(v.scaled(1.0 / norm));
    }
    Ok(out)
}

/// Distance between the spans of two L²-orthonormal families:
/// `√Σ_i (1 − Σ_j ⟨s_i, a_j⟩²)`, zero iff `span s ⊆ span a`.
pub fn alignment_distance(hyp: &DiscreteHypersurface, s: &[DiscreteOneForm], a: &[DiscreteOneForm]) -> f64 {
    s.iter()
        .map(|si| {
            let proj: f64 = a.iter().map(|aj| l2_inner(hyp, si, aj).powi(2)).sum();
            (1.0 - proj).max(0.0)
        })
        .sum::<f64>()
        .sqrt()
}

/// `dt_α` of every circle-factor parameter, L²-orthonormalized.
pub fn analytic_harmonic_forms(hyp: &DiscreteHypersurface) -> Result<Vec<DiscreteOneForm>> {
    let forms: Vec<DiscreteOneForm> = hyp
        .harmonic_param_axes()
        .into_iter()
        .map(|alpha| param_differential(hyp, alpha))
        .collect();
    l2_orthonormalize(hyp, &forms)
}

/// The parameter differential `dt_α`: `dt_α(e_k)` is the `(α, k)` entry of the
/// frame coefficients since `e_k = Σ_β ∂_β x · C_βk`.
pub fn param_differential(hyp: &DiscreteHypersurface, alpha: usize) -> DiscreteOneForm {
    DiscreteOneForm {
        label: format!("dt{}", alpha + 1),
        provenance: Provenance::AnalyticCatalog,
        components: hyp.frame_coeffs.iter().map(|c| c.row(alpha).transpose()).collect(),
    }
}

/// Exact form `df` of a node function.
pub fn exact_form(hyp: &DiscreteHypersurface, f: &[f64]) -> DiscreteOneForm {
    DiscreteOneForm {
        label: "df".into(),
        provenance: Provenance::AnalyticCatalog,
        components: hyp.frame_gradient(f),
    }
}

/// An L²-orthonormal basis of harmonic 1-forms, with the solver report when
/// the basis came from the Whitney solver.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub forms: Vec<DiscreteOneForm>,
    pub provenance: Provenance,
    pub solver: Option<KernelReport>,
}

impl HarmonicBasis {
    pub fn betti_number(&self) -> usize {
        self.forms.len()
    }
}

/// Harmonic 1-forms: the discrete Hodge kernel for surfaces, the analytic
/// catalog otherwise. A kernel dimension that disagrees with the topology of
/// the catalog kind is an error.
pub fn harmonic_one_forms(hyp: &DiscreteHypersurface) -> Result<HarmonicBasis> {
    let expected = hyp.harmonic_param_axes().len();
    if hyp.dim() != 2 {
        return Ok(HarmonicBasis {
            forms: analytic_harmonic_forms(hyp)?,
            provenance: Provenance::AnalyticCatalog,
            solver: None,
        });
    }
    let complex = WhitneyComplex::build(hyp)?;
    let (kernel, report) = complex.kernel(KERNEL_SEED)?;
    if kernel.len() != expected {
        return Err(LabError::UnexpectedKernel { expected, found: kernel.len() });
    }
    let forms: Vec<DiscreteOneForm> = kernel
        .iter()
        .enumerate()
        .map(|(i, x)| DiscreteOneForm {
            label: format!("h{}", i + 1),
            provenance: Provenance::HodgeSolver,
            components: complex.node_components(hyp, x),
        })
        .collect();
    Ok(HarmonicBasis {
        forms: l2_orthonormalize(hyp, &forms)?,
        provenance: Provenance::HodgeSolver,
        solver: Some(report),
    })
}

/// `(*ω)(e_1) = −ω(e_2)`, `(*ω)(e_2) = ω(e_1)` in the oriented frame.
pub fn hodge_star_surface(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm) -> Result<DiscreteOneForm> {
    if hyp.dim() != 2 {
        return Err(LabError::InvalidDimension(format!("Hodge star on 1-forms needs n = 2, got {}", hyp.dim())));
    }
    Ok(DiscreteOneForm {
        label: format!("*{}", omega.label),
        provenance: omega.provenance,
        components: omega
            .components
            .iter()
            .map(|c| DVector::from_vec(vec![-c[1], c[0]]))
            .collect(),
    })
}

/// Relative `dω` and `d*ω` residuals computed spectrally on the chart:
/// `‖dω‖ / ‖ω‖` and `‖div ω♯‖ / ‖ω‖` in L².
pub fn closedness_residuals(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm) -> (f64, f64) {
    let n = hyp.dim();
    let norm = l2_inner(hyp, omega, omega).sqrt();
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    // coordinate components ω_α = ω(∂_α x) = Σ_k ω(e_k) ⟨e_k, ∂_α x⟩
    let coord: Vec<Vec<f64>> = (0..n)
        .map(|alpha| {
            (0..hyp.node_count())
                .map(|a| {
                    let t = hyp.coord_tangents[a].column(alpha);
                    (hyp.frames[a].transpose() * t).dot(&omega.components[a])
                })
                .collect()
        })
        .collect();
    // frame components Ω_jk = Σ_{α<β} (∂_α ω_β − ∂_β ω_α)(C_αj C_βk − C_βj C_αk)
    let mut curl = vec![DMatrix::<f64>::zeros(n, n); hyp.node_count()];
    for alpha in 0..n {
        for beta in (alpha + 1)..n {
            let da = hyp.grid().differentiate(&coord[beta], alpha);
            let db = hyp.grid().differentiate(&coord[alpha], beta);
            for (a, om) in curl.iter_mut().enumerate() {
                let c = &hyp.frame_coeffs[a];
                let v = da[a] - db[a];
                for j in 0..n {
                    for k in 0..n {
                        om[(j, k)] += v * (c[(alpha, j)] * c[(beta, k)] - c[(beta, j)] * c[(alpha, k)]);
                    }
                }
            }
        }
    }
    let curl_sq: Vec<f64> = curl.iter().map(|om| 0.5 * om.norm_squared()).collect();
    let sharp = omega.sharp(hyp);
    let dv = hyp.frame_derivative(&sharp);
    let div_sq: Vec<f64> = (0..hyp.node_count())
        .map(|a| {
            let e = &hyp.frames[a];
            (0..n).map(|k| dv[a].column(k).dot(&e.column(k))).sum::<f64>().powi(2)
        })
        .collect();
    (hyp.integrate(&curl_sq).sqrt() / norm, hyp.integrate(&div_sq).sqrt() / norm)
}

/// `∫|∇^M ω|²` and `∫Ric^M(ω♯, ω♯)`, with `∇^M_{e_k} ω♯` the tangential part
/// of the Euclidean derivative and `Ric^M` from the Gauss equation.
pub fn bochner_integrals(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm) -> (f64, f64) {
    let n = hyp.dim();
    let sharp = omega.sharp(hyp);
    let dv = hyp.frame_derivative(&sharp);
    let ambient = hyp.ambient();
    let mut grad_sq = Vec::with_capacity(hyp.node_count());
    let mut ric = Vec::with_capacity(hyp.node_count());
    for a in 0..hyp.node_count() {
        let e = &hyp.frames[a];
        grad_sq.push((e.transpose() * &dv[a]).norm_squared());
        let x = &sharp[a];
        let c = &omega.components[a];
        let ax = &hyp.shape[a] * c;
        let mut r = hyp.shape[a].trace() * c.dot(&ax) - ax.norm_squared();
        if x.norm_squared() > 0.0 {
            for k in 0..n {
                r += ambient.rm_unchecked(&hyp.points[a], &e.column(k).into_owned(), x);
            }
        }
        ric.push(r);
    }
    (hyp.integrate(&grad_sq), hyp.integrate(&ric))
}

/// `|∫|∇^M ω|² + ∫Ric^M(ω♯,ω♯)| / ∫|ω|²`; small exactly for harmonic ω.
pub fn bochner_residual(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm) -> f64 {
    let (g, r) = bochner_integrals(hyp, omega);
    (g + r).abs() / hyp.integrate(&omega.norm_sq())
}

/// Rejects forms whose spectral `dω` or `d*ω` residual exceeds `tol`.
pub fn require_harmonic(hyp: &DiscreteHypersurface, omega: &DiscreteOneForm, tol: f64) -> Result<()> {
    let (d, dstar) = closedness_residuals(hyp, omega);
    let residual = d.max(dstar);
    if residual > tol {
        return Err(LabError::NotHarmonic { residual });
    }
    Ok(())
}
