//! Computable steps of the argument excluding equality in `CP^m`: a harmonic
//! form with `ω♯ = f JN` must vanish. With `U = JN` this checks that `U` is
//! divergence free, that `|∇(fU)|² = |∇f|² + f²|∇U|²` pointwise, and the
//! traced Gauss equation `Ric^M(U,U) + |A(U,·)|² = 2m − 2`.

use crate::error::{LabError, Result};
use crate::hypersurface::DiscreteHypersurface;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Residuals at or below this are treated as rounding.
pub const RESIDUAL_FLOOR: f64 = 1e-11;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BorderlineReport {
    pub m: usize,
    pub resolution: Vec<usize>,
    /// Largest `|⟨JN, N⟩|`; `JN` must be tangent to `M`.
    pub tangency: f64,
    /// Largest `|div_M JN|`.
    pub div_u: f64,
    /// Largest `|⟨U, ∇_{e_k} U⟩|`.
    pub u_skew: f64,
    /// Largest `|Σ_k Rm(e_k,U,e_k,U) + H·A(U,U) − (2m − 2)|`.
    pub traced_gauss: f64,
    /// Largest `|Ric^N(U,U) − (2m + 2)|`.
    pub ambient_ricci: f64,
    /// Largest `|Rm^N(U,N,U,N) − 4|`.
    pub holomorphic_sectional: f64,
    /// Largest `|div_M(fU) − (Uf + f div_M U)|`.
    pub div_form: f64,
    /// Largest `| |∇(fU)|² − |∇f|² − f²|∇U|² |`.
    pub decomposition: f64,
}

impl BorderlineReport {
    /// Residuals that depend on `U` only.
    pub fn structure_max(&self) -> f64 {
        [self.tangency, self.div_u, self.u_skew, self.traced_gauss, self.ambient_ricci, self.holomorphic_sectional]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Residuals of the form `fU`; exactly zero for `f ≡ 0`.
    pub fn form_max(&self) -> f64 {
        self.div_form.max(self.decomposition)
    }

    pub fn max_residual(&self) -> f64 {
        self.structure_max().max(self.form_max())
    }
}

/// Residuals for `ω♯ = f JN` with `f` given at the nodes.
pub fn borderline_cp_report(hyp: &DiscreteHypersurface, f: &[f64]) -> Result<BorderlineReport> {
    let amb = hyp.ambient();
    if !amb.has_complex_structure() {
        return Err(LabError::Incompatible(format!("{} has no complex structure", amb.kind())));
    }
    if f.len() != hyp.node_count() {
        return Err(LabError::InvalidDimension(format!("{} values for {} nodes", f.len(), hyp.node_count())));
    }
    let m = amb.intrinsic_dim() / 2;
    let n = hyp.dim();
    let u: Vec<DVector<f64>> = (0..hyp.node_count())
        .map(|a| amb.complex_structure(&hyp.points[a], &hyp.normals[a]).expect("complex structure"))
        .collect();
    let v: Vec<DVector<f64>> = u.iter().zip(f).map(|(u, f)| u * *f).collect();
    let du = hyp.frame_derivative(&u);
    let dv = hyp.frame_derivative(&v);
    let grad_f = hyp.frame_gradient(f);

    let mut r = BorderlineReport {
        m,
        resolution: hyp.resolution().to_vec(),
        tangency: 0.0,
        div_u: 0.0,
        u_skew: 0.0,
        traced_gauss: 0.0,
        ambient_ricci: 0.0,
        holomorphic_sectional: 0.0,
        div_form: 0.0,
        decomposition: 0.0,
    };
    for a in 0..hyp.node_count() {
        let (p, e, nrm) = (&hyp.points[a], &hyp.frames[a], &hyp.normals[a]);
        let tu = e.transpose() * &du[a];
        let tv = e.transpose() * &dv[a];
        let uc = e.transpose() * &u[a];
        r.tangency = r.tangency.max(u[a].dot(nrm).abs());

        let div_u = tu.trace();
        r.div_u = r.div_u.max(div_u.abs());
        r.u_skew = r.u_skew.max((uc.transpose() * &tu).amax());
        let uf = uc.dot(&grad_f[a]);
        r.div_form = r.div_form.max((tv.trace() - (uf + f[a] * div_u)).abs());
        let lhs = tv.norm_squared();
        let rhs = grad_f[a].norm_squared() + f[a] * f[a] * tu.norm_squared();
        r.decomposition = r.decomposition.max((lhs - rhs).abs());

        let shape = &hyp.shape[a];
        let au = shape * &uc;
        let tangential: f64 = (0..n).map(|k| amb.rm_unchecked(p, &e.column(k).into_owned(), &u[a])).sum();
        let gauss = tangential + shape.trace() * uc.dot(&au);
        r.traced_gauss = r.traced_gauss.max((gauss - (2.0 * m as f64 - 2.0)).abs());
        let full = amb.tangent_basis(p);
        r.ambient_ricci = r.ambient_ricci.max((amb.ricci_in_frame(p, &full, &u[a]) - (2.0 * m as f64 + 2.0)).abs());
        r.holomorphic_sectional = r.holomorphic_sectional.max((amb.rm_unchecked(p, &u[a], nrm) - 4.0).abs());
    }
    Ok(r)
}

/// Reports at `hyp` and at doubled resolution for `f` sampled from ambient positions.
pub fn borderline_refinement<F>(hyp: &DiscreteHypersurface, f: F) -> Result<(BorderlineReport, BorderlineReport)>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let sample = |h: &DiscreteHypersurface| h.points.iter().map(|p| f(&p.position)).collect::<Vec<_>>();
    let coarse = borderline_cp_report(hyp, &sample(hyp))?;
    let doubled: Vec<usize> = hyp.resolution().iter().map(|r| 2 * r).collect();
    let fine_hyp = hyp.rebuild(&doubled)?;
    let fine = borderline_cp_report(&fine_hyp, &sample(&fine_hyp))?;
    Ok((coarse, fine))
}

/// At least first-order decay: each residual halves, or both levels sit at the
/// rounding floor.
pub fn decays(coarse: f64, fine: f64) -> bool {
    fine <= RESIDUAL_FLOOR.max(0.5 * coarse)
}
