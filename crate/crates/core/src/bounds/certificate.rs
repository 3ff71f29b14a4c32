//! Concentration-of-spectrum certificates: if the test-function integrand is
//! below `η` on a `q`-dimensional space of harmonic forms, at least a fixed
//! fraction of `q` Jacobi eigenvalues lie below `η`.

use crate::error::{LabError, Result};
use crate::hodge::DiscreteOneForm;
use crate::hypersurface::{DiscreteHypersurface, Parity};
use crate::numerics::sym_eigen_sorted;
use crate::spectral::{assemble_jacobi, equality_band, SpectrumReport};
use crate::testfns::{integrand_quadratic_form, IntegrandForm, TestMode};
use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMode {
    /// Wedge test functions `u_ij`; count `≥ 2q/(d(d−1))`.
    Wedge,
    /// Coordinates of `ω♯` and `*ω♯` on a surface; count `≥ q/(2d)`.
    SurfacePair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    Pass,
    /// `G − ηM_V` is not negative definite (an equality counts as failure).
    HypothesisFails,
    /// The hypothesis holds but the count is short: the discretization is wrong.
    CountShort,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    pub mode: CertificateMode,
    pub eta: f64,
    pub q: usize,
    pub d: usize,
    /// Eigenvalue restriction on the cover, if any.
    pub parity: Option<Parity>,
    /// The real-valued bound before taking the ceiling.
    pub required_real: f64,
    pub required: usize,
    pub actual: usize,
    /// Eigenvalues inside the equality band of `η`; never counted.
    pub equality_count: usize,
    /// Largest eigenvalue of `G − ηM_V`, or of `G − 2ηM_V` for the surface pair.
    pub hypothesis_margin: f64,
    /// Largest `cᵀGc / cᵀM_V c` minus `η` (halved first for the surface pair).
    pub normalized_margin: f64,
    pub verdict: CertificateVerdict,
}

impl CertificateReport {
    pub fn passes(&self) -> bool {
        self.verdict == CertificateVerdict::Pass
    }
}

/// `2q/(d(d−1))` or `q/(2d)`, exactly.
pub fn required_ratio(mode: CertificateMode, q: usize, d: usize) -> Ratio<i64> {
    let (q, d) = (q as i64, d as i64);
    match mode {
        CertificateMode::Wedge => Ratio::new(2 * q, d * (d - 1)),
        CertificateMode::SurfacePair => Ratio::new(q, 2 * d),
    }
}

/// The form whose negativity the certificate needs, with its `η` factor.
fn hypothesis_form(hyp: &DiscreteHypersurface, forms: &[DiscreteOneForm], mode: CertificateMode) -> Result<(IntegrandForm, f64)> {
    match mode {
        CertificateMode::Wedge => Ok((integrand_quadratic_form(hyp, forms, TestMode::NormalWedge)?, 1.0)),
        CertificateMode::SurfacePair => {
            if hyp.dim() != 2 {
                return Err(LabError::InvalidDimension(format!("the surface pair needs n = 2, got {}", hyp.dim())));
            }
            let mut g = integrand_quadratic_form(hyp, forms, TestMode::Coordinates)?;
            let star = integrand_quadratic_form(hyp, forms, TestMode::StarCoordinates)?;
            g.gram += star.gram;
            Ok((g, 2.0))
        }
    }
}

/// Certificate over the span of `forms`, assembling and solving the Jacobi
/// problem (restricted to `parity` on a double cover when given).
pub fn concentration_certificate(
    hyp: &DiscreteHypersurface,
    forms: &[DiscreteOneForm],
    eta: f64,
    mode: CertificateMode,
    parity: Option<Parity>,
) -> Result<CertificateReport> {
    let spectrum = assemble_jacobi(hyp, parity)?.spectrum()?;
    certificate_with_spectrum(hyp, forms, eta, mode, parity, &spectrum)
}

/// As [`concentration_certificate`] with a precomputed spectrum.
pub fn certificate_with_spectrum(
    hyp: &DiscreteHypersurface,
    forms: &[DiscreteOneForm],
    eta: f64,
    mode: CertificateMode,
    parity: Option<Parity>,
    spectrum: &SpectrumReport,
) -> Result<CertificateReport> {
    let (form, factor) = hypothesis_form(hyp, forms, mode)?;
    let shifted: DMatrix<f64> = &form.gram - &form.mass * (factor * eta);
    let hypothesis_margin = *sym_eigen_sorted(&shifted).0.last().expect("nonempty form space");
    let normalized_margin = form.max_ratio() / factor - eta;

    let q = forms.len();
    let d = hyp.embed_dim();
    let ratio = required_ratio(mode, q, d);
    let required = ratio.ceil().to_integer() as usize;
    let actual = spectrum.count_below(eta);

    // a margin inside the band is an equality, not a strict inequality
    let strict = normalized_margin < -equality_band(eta);
    let verdict = if !strict || hypothesis_margin >= 0.0 {
        CertificateVerdict::HypothesisFails
    } else if actual < required {
        CertificateVerdict::CountShort
    } else {
        CertificateVerdict::Pass
    };
    Ok(CertificateReport {
        mode,
        eta,
        q,
        d,
        parity,
        required_real: *ratio.numer() as f64 / *ratio.denom() as f64,
        required,
        actual,
        equality_count: spectrum.count_at(eta),
        hypothesis_margin,
        normalized_margin,
        verdict,
    })
}
