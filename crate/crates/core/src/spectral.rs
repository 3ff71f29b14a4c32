//! The index form `Q(φ,φ) = ∫|∇φ|² − (Ric(N,N) + |A|²)φ²` as a generalized
//! symmetric eigenproblem.
//!
//! The trial space is the restriction to `M` of the ambient polynomials of
//! degree at most `degree` in the coordinates of `R^d`, integrated with the mesh
//! quadrature. The space is conforming, so computed eigenvalues bound the exact
//! ones from above, and it contains every coordinate function and every
//! quadratic test function used by the index estimates.

use crate::error::{LabError, Result};
use crate::hypersurface::{DiscreteHypersurface, Parity};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Default polynomial degree of the trial space.
pub const DEFAULT_DEGREE: usize = 4;

/// Singular values below this fraction of the largest are dropped from the basis.
const RANK_TOL: f64 = 1e-10;

/// Relative gap separating multiplicity clusters.
pub const CLUSTER_GAP: f64 = 1e-3;

/// Discrete index form on an `M`-orthonormal basis of the trial space.
#[derive(Clone, Debug)]
pub struct SpectralSystem {
    /// `∫ ∇φ_i · ∇φ_j`.
    pub stiffness: DMatrix<f64>,
    /// `∫ (Ric(N,N) + |A|²) φ_i φ_j`.
    pub potential: DMatrix<f64>,
    /// `∫ φ_i φ_j`; the identity up to rounding.
    pub mass: DMatrix<f64>,
    pub parity: Option<Parity>,
    pub degree: usize,
    /// Node values of the basis functions (nodes × basis).
    basis_values: DMatrix<f64>,
    weights: DVector<f64>,
}

/// Exponent vectors of the monomials of total degree `<= degree` in `d` variables.
fn monomial_exponents(d: usize, degree: usize, parity: Option<Parity>) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, degree as u32, &mut current, &mut out);
    out.retain(|e| {
        let total: u32 = e.iter().sum();
        match parity {
            Some(Parity::Even) => total.is_multiple_of(2),
            Some(Parity::Odd) => total % 2 == 1,
            _ => true,
        }
    });
    out
}

fn monomial_value_and_gradient(e: &[u32], x: &DVector<f64>) -> (f64, DVector<f64>) {
    let pows: Vec<f64> = e.iter().zip(x.iter()).map(|(&k, xi)| xi.powi(k as i32)).collect();
    let value = pows.iter().product();
    let grad = DVector::from_fn(e.len(), |i, _| {
        if e[i] == 0 {
            return 0.0;
        }
        let mut g = e[i] as f64 * x[i].powi(e[i] as i32 - 1);
        for (j, p) in pows.iter().enumerate() {
            if j != i {
                g *= p;
            }
        }
        g
    });
    (value, grad)
}

/// Assembles the index form; `parity` restricts to even or odd functions under
/// `x ↦ −x`, as needed on the sphere cover of `RP^{n+1}`.
pub fn assemble_jacobi(hyp: &DiscreteHypersurface, parity: Option<Parity>) -> Result<SpectralSystem> {
    assemble_jacobi_with_degree(hyp, parity, DEFAULT_DEGREE)
}

pub fn assemble_jacobi_with_degree(
    hyp: &DiscreteHypersurface,
    parity: Option<Parity>,
    degree: usize,
) -> Result<SpectralSystem> {
    if parity == Some(Parity::Neither) {
        return Err(LabError::Incompatible("parity restriction must be even or odd".into()));
    }
    if let Some(ax) = hyp.grid().axes.iter().find(|ax| ax.len() < degree + 2) {
        return Err(LabError::ResolutionTooSmall(format!(
            "axis with {} points cannot resolve degree-{degree} products",
            ax.len()
        )));
    }
    if hyp.potential.len() != hyp.node_count() {
        return Err(LabError::Degenerate("missing geometry cache".into()));
    }
    let d = hyp.embed_dim();
    let n = hyp.dim();
    let exps = monomial_exponents(d, degree, parity);
    let nodes = hyp.node_count();
    let m = exps.len();

    let mut phi = DMatrix::zeros(nodes, m);
    // frame derivatives, one nodes × m block per frame direction
    let mut dphi = vec![DMatrix::zeros(nodes, m); n];
    for a in 0..nodes {
        let x = &hyp.points[a].position;
        let e = &hyp.frames[a];
        for (j, ex) in exps.iter().enumerate() {
            let (v, g) = monomial_value_and_gradient(ex, x);
            phi[(a, j)] = v;
            let gk = e.transpose() * g;
            for k in 0..n {
                dphi[k][(a, j)] = gk[k];
            }
        }
    }
    let w = DVector::from_column_slice(&hyp.weights);
    let sqrt_w = w.map(f64::sqrt);

    // W-orthonormal basis of the restricted space from the SVD of √W Φ
    let mut scaled = phi.clone();
    for (a, s) in sqrt_w.iter().enumerate() {
        scaled.row_mut(a).scale_mut(*s);
    }
    let svd = scaled.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_TOL * smax)
        .collect();
    let mut t = DMatrix::zeros(m, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        t.set_column(c, &(v_t.row(i).transpose() / svd.singular_values[i]));
    }

    let basis_values = &phi * &t;
    let weighted = |mat: &DMatrix<f64>, f: &dyn Fn(usize) -> f64| {
        let mut out = mat.clone();
        for a in 0..nodes {
            out.row_mut(a).scale_mut(f(a));
        }
        out
    };
    let mass = basis_values.transpose() * weighted(&basis_values, &|a| w[a]);
    let potential = basis_values.transpose() * weighted(&basis_values, &|a| w[a] * hyp.potential[a]);
    let mut stiffness = DMatrix::zeros(keep.len(), keep.len());
    for dk in &dphi {
        let g = dk * &t;
        stiffness += g.transpose() * weighted(&g, &|a| w[a]);
    }
    let sym = |x: DMatrix<f64>| (&x + x.transpose()) * 0.5;
    Ok(SpectralSystem {
        stiffness: sym(stiffness),
        potential: sym(potential),
        mass: sym(mass),
        parity,
        degree,
        basis_values,
        weights: w,
    })
}

impl SpectralSystem {
    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    /// `K − P`.
    pub fn index_form(&self) -> DMatrix<f64> {
        &self.stiffness - &self.potential
    }

    /// Node values of the basis functions.
    pub fn basis_values(&self) -> &DMatrix<f64> {
        &self.basis_values
    }

    /// Coefficients of the `L²` projection of a node field onto the trial space
    /// and the relative `L²` residual of that projection.
    pub fn project(&self, u: &[f64]) -> (DVector<f64>, f64) {
        let u = DVector::from_column_slice(u);
        let wu = u.component_mul(&self.weights);
        let rhs = self.basis_values.transpose() * &wu;
        let coeffs = self
            .mass
            .clone()
            .cholesky()
            .map(|c| c.solve(&rhs))
            .unwrap_or(rhs);
        let r = &u - &self.basis_values * &coeffs;
        let norm2 = u.dot(&wu);
        let res2 = r.dot(&r.component_mul(&self.weights));
        let rel = if norm2 > 0.0 { (res2 / norm2).sqrt() } else { res2.sqrt() };
        (coeffs, rel)
    }

    /// `Q(u,u)` for a node field through the assembled matrices, with the
    /// projection residual of `u`.
    pub fn q_value(&self, u: &[f64]) -> (f64, f64) {
        let (c, res) = self.project(u);
        (c.dot(&(self.index_form() * &c)), res)
    }

    /// `∫ u²` through the mass matrix.
    pub fn mass_value(&self, u: &[f64]) -> f64 {
        let (c, _) = self.project(u);
        c.dot(&(&self.mass * &c))
    }

    /// Full spectrum of `(K − P)φ = λ M φ`.
    pub fn spectrum(&self) -> Result<SpectrumReport> {
        let chol = self.mass.clone().cholesky().ok_or(LabError::NonConvergence {
            what: "mass matrix is not positive definite".into(),
            residual: f64::NAN,
        })?;
        let l = chol.l();
        let linv = l.clone().try_inverse().ok_or(LabError::NonConvergence {
            what: "mass factor inversion".into(),
            residual: f64::NAN,
        })?;
        let a = self.index_form();
        let reduced = &linv * &a * linv.transpose();
        let (values, vectors) = crate::numerics::sym_eigen_sorted(&reduced);
        let coeffs = linv.transpose() * vectors;
        let mut residuals = Vec::with_capacity(values.len());
        for (i, lam) in values.iter().enumerate() {
            let c = coeffs.column(i);
            let r = &a * c - &self.mass * c * *lam;
            residuals.push(r.norm() / c.norm());
        }
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        let scale = a.norm().max(1.0);
        if !(worst <= 1e-8 * scale) {
            return Err(LabError::NonConvergence { what: "dense eigensolve".into(), residual: worst });
        }
        Ok(SpectrumReport::new(values, residuals, coeffs))
    }

    /// Node values of a coefficient vector.
    pub fn node_values(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.basis_values * coeffs
    }
}

/// Ordered eigenvalues with counting functions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<usize>,
    pub morse_index: usize,
    #[serde(skip)]
    pub eigenvectors: DMatrix<f64>,
}

/// Half-width of the band in which `λ` is treated as equal to a threshold.
pub fn equality_band(eta: f64) -> f64 {
    1e-9 * eta.abs().max(1.0)
}

impl SpectrumReport {
    fn new(eigenvalues: Vec<f64>, residuals: Vec<f64>, eigenvectors: DMatrix<f64>) -> Self {
        let mut clusters = Vec::with_capacity(eigenvalues.len());
        let mut id = 0;
        for (i, lam) in eigenvalues.iter().enumerate() {
            if i > 0 {
                let prev: f64 = eigenvalues[i - 1];
                if lam - prev > CLUSTER_GAP * lam.abs().max(prev.abs()).max(1.0) {
                    id += 1;
                }
            }
            clusters.push(id);
        }
        let mut report = Self { eigenvalues, residuals, clusters, morse_index: 0, eigenvectors };
        report.morse_index = report.count_below(0.0);
        report
    }

    /// Number of eigenvalues strictly below `eta`; values within
    /// [`equality_band`] of `eta` count as equal and are excluded.
    pub fn count_below(&self, eta: f64) -> usize {
        let cut = eta - equality_band(eta);
        self.eigenvalues.iter().filter(|&&l| l < cut).count()
    }

    /// Eigenvalues within the equality band of `eta`.
    pub fn count_at(&self, eta: f64) -> usize {
        let band = equality_band(eta);
        self.eigenvalues.iter().filter(|&&l| (l - eta).abs() <= band).count()
    }

    /// The first `how_many` eigenvalues as `(value, multiplicity)` clusters.
    pub fn cluster_summary(&self, how_many: usize) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for i in 0..how_many.min(self.eigenvalues.len()) {
            if i > 0 && self.clusters[i] == self.clusters[i - 1] {
                let last = out.last_mut().expect("nonempty");
                last.0 = (last.0 * last.1 as f64 + self.eigenvalues[i]) / (last.1 + 1) as f64;
                last.1 += 1;
            } else {
                out.push((self.eigenvalues[i], 1));
            }
        }
        out
    }

    /// CSV with columns `index,eigenvalue,residual,cluster`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "index,eigenvalue,residual,cluster")?;
        for i in 0..self.eigenvalues.len() {
            writeln!(
                f,
                "{},{:.15e},{:.3e},{}",
                i, self.eigenvalues[i], self.residuals[i], self.clusters[i]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_exponents(4, 4, None).len(), 70);
        let even = monomial_exponents(4, 4, Some(Parity::Even)).len();
        let odd = monomial_exponents(4, 4, Some(Parity::Odd)).len();
        assert_eq!(even + odd, 70);
    }

    #[test]
    fn monomial_gradient_matches_difference_quotient() {
        let e = vec![2u32, 0, 1];
        let x = DVector::from_vec(vec![0.3, -0.7, 1.1]);
        let (v, g) = monomial_value_and_gradient(&e, &x);
        assert!((v - 0.09 * 1.1).abs() < 1e-15);
        assert!((g[0] - 2.0 * 0.3 * 1.1).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
        assert!((g[2] - 0.09).abs() < 1e-15);
    }
}
