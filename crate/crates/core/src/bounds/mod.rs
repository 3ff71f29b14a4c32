//! Index-versus-Betti bounds: the concentration certificates, the theorem
//! constants, pointwise margins per application, and the borderline checks
//! for complex projective space.

pub mod borderline;
pub mod certificate;
pub mod constants;
pub mod margins;

pub use borderline::{borderline_cp_report, borderline_refinement, decays, BorderlineReport};
pub use certificate::{
    certificate_with_spectrum, concentration_certificate, required_ratio, CertificateMode, CertificateReport,
    CertificateVerdict,
};
pub use constants::{constant_row, constant_table, general_constant, integer_bound, ConstantRow, Family, Rational};
pub use margins::{
    contraction_residual, convex_margin, cross_margin, cross_table, exploratory_margin, product_integrand_margin,
    product_q, product_q_definition, product_q_margin, scalar3_margin, sphere_margin, CrossRow, FieldStats,
    MarginReport, MarginVerdict,
};

use crate::error::Result;
use crate::hypersurface::DiscreteHypersurface;
use serde::{Deserialize, Serialize};

/// `max |A|²` below this counts as totally geodesic.
pub const TOTALLY_GEODESIC_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexBoundReport {
    pub constants: ConstantRow,
    pub b1: usize,
    pub totally_geodesic: bool,
    pub additive: usize,
    /// `C·b₁` before the ceiling.
    pub bound_real: f64,
    pub bound: usize,
    pub index: usize,
    pub consistent: bool,
    pub tight: bool,
}

/// The applicable theorem bound for `hyp` against a computed index.
pub fn index_bound_report(hyp: &DiscreteHypersurface, b1: usize, index: usize) -> Result<IndexBoundReport> {
    let family = Family::of_ambient(hyp.ambient().kind())?;
    let constant = family.stated_constant()?;
    let max_a2 = hyp.a_norm_sq.iter().copied().fold(0.0, f64::max);
    let totally_geodesic = max_a2 < TOTALLY_GEODESIC_TOL;
    let additive = family.additive(totally_geodesic);
    let bound = integer_bound(constant, b1, additive);
    let bound_real = *constant.numer() as f64 / *constant.denom() as f64 * b1 as f64 + additive as f64;
    Ok(IndexBoundReport {
        constants: constant_row(family)?,
        b1,
        totally_geodesic,
        additive,
        bound_real,
        bound,
        index,
        consistent: index >= bound,
        tight: index == bound,
    })
}
