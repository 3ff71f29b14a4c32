//! Catalog minimal hypersurfaces discretized as quadrature meshes on structured
//! tensor grids, with cached normal, frame, shape form and Jacobi potential.

pub mod catalog;
pub mod grid;
pub mod lift;

use crate::ambient::{AmbientModel, AmbientPoint};
use crate::error::{LabError, Result};
use crate::numerics::richardson_d1;
use catalog::Chart;
pub use catalog::CatalogKind;
use grid::TensorGrid;
pub use lift::{lift_to_double_cover, DoubleCoverLift, Parity};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Step for differentiating chart values in parameter space (one Richardson level).
const CHART_STEP: f64 = 1e-3;

/// A catalog minimal hypersurface `M^n ⊂ N^{n+1} ⊂ R^d` sampled on a tensor grid.
///
/// Per-node vectors live in `R^d`; `frames[a]` holds the orthonormal tangent
/// frame `e_1..e_n` of `M` as columns, and `coord_tangents[a] · frame_coeffs[a]`
/// equals `frames[a]`.
#[derive(Clone, Debug)]
pub struct DiscreteHypersurface {
    ambient: AmbientModel,
    catalog: CatalogKind,
    chart: Chart,
    grid: TensorGrid,
    resolution: Vec<usize>,
    pub points: Vec<AmbientPoint>,
    /// Quadrature weights `w_a > 0`, the discrete `dM`.
    pub weights: Vec<f64>,
    pub normals: Vec<DVector<f64>>,
    pub frames: Vec<DMatrix<f64>>,
    pub coord_tangents: Vec<DMatrix<f64>>,
    pub frame_coeffs: Vec<DMatrix<f64>>,
    /// `A_jk = −⟨D_{e_j} N, e_k⟩`, symmetrized.
    pub shape: Vec<DMatrix<f64>>,
    pub a_norm_sq: Vec<f64>,
    pub ricci_nn: Vec<f64>,
    /// Jacobi potential `Ric(N,N) + |A|²`.
    pub potential: Vec<f64>,
    report: GeometryReport,
}

/// Residuals of the hypersurface invariants at construction time.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GeometryReport {
    pub nodes: usize,
    pub normal_tangency: f64,
    pub normal_unit: f64,
    pub normal_ambient_tangency: f64,
    pub shape_asymmetry: f64,
    pub mean_curvature_residual: f64,
    pub volume: f64,
    pub analytic_volume: Option<f64>,
}

/// Builds the catalog hypersurface on a grid with the given points per axis
/// (`None` selects the kind's default resolution).
pub fn build_hypersurface(
    ambient: &AmbientModel,
    kind: CatalogKind,
    resolution: Option<&[usize]>,
) -> Result<DiscreteHypersurface> {
    let chart = Chart::new(ambient, &kind)?;
    let resolution = resolution.map(<[usize]>::to_vec).unwrap_or_else(|| chart.default_resolution());
    let grid = TensorGrid::new(chart.axes(&resolution)?);
    let n = chart.dim();
    let count = grid.node_count();

    let mut hyp = DiscreteHypersurface {
        ambient: ambient.clone(),
        catalog: kind,
        chart,
        grid,
        resolution,
        points: Vec::with_capacity(count),
        weights: Vec::with_capacity(count),
        normals: Vec::with_capacity(count),
        frames: Vec::with_capacity(count),
        coord_tangents: Vec::with_capacity(count),
        frame_coeffs: Vec::with_capacity(count),
        shape: Vec::with_capacity(count),
        a_norm_sq: Vec::with_capacity(count),
        ricci_nn: Vec::with_capacity(count),
        potential: Vec::with_capacity(count),
        report: GeometryReport::default(),
    };

    let mut degenerate = Vec::new();
    let mut rep = GeometryReport { nodes: count, ..Default::default() };
    for node in 0..count {
        let t = hyp.grid.params(node);
        let (p, nrm) = hyp.chart.eval(ambient, &t);
        let mut dx = DMatrix::zeros(ambient.embed_dim(), n);
        let mut dn = DMatrix::zeros(ambient.embed_dim(), n);
        for alpha in 0..n {
            let shifted = |h: f64| {
                let mut s = t.clone();
                s[alpha] += h;
                s
            };
            dx.set_column(
                alpha,
                &richardson_d1(|h| hyp.chart.eval(ambient, &shifted(h)).0.position, CHART_STEP),
            );
            dn.set_column(
                alpha,
                &richardson_d1(|h| hyp.chart.eval(ambient, &shifted(h)).1, CHART_STEP),
            );
        }
        let qr = dx.clone().qr();
        let r = qr.r();
        let diag_max = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
        let diag_min = (0..n).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
        if !(diag_min > 1e-9 * diag_max) {
            degenerate.push(node);
            continue;
        }
        let mut frame = qr.q();
        let mut coeffs = r.try_inverse().expect("nonsingular triangular factor");
        if let Some(nb) = ambient.oriented_normals(&p) {
            let mut full = DMatrix::zeros(ambient.embed_dim(), ambient.embed_dim());
            full.columns_mut(0, nb.ncols()).copy_from(&nb);
            full.columns_mut(nb.ncols(), n).copy_from(&frame);
            full.set_column(ambient.embed_dim() - 1, &nrm);
            if full.determinant() < 0.0 {
                frame.column_mut(n - 1).neg_mut();
                coeffs.column_mut(n - 1).neg_mut();
            }
        }
        // A_jk = −⟨D_{e_j} N, e_k⟩
        let dn_frame = &dn * &coeffs;
        let a_raw = -(frame.transpose() * &dn_frame).transpose();
        let asym = (&a_raw - a_raw.transpose()).norm();
        let a = (&a_raw + a_raw.transpose()) * 0.5;
        let a2 = a.norm_squared();
        let ric = ambient.ricci_in_frame(&p, &ambient.tangent_basis(&p), &nrm);

        rep.normal_tangency = rep.normal_tangency.max((frame.transpose() * &nrm).amax());
        rep.normal_unit = rep.normal_unit.max((nrm.norm() - 1.0).abs());
        rep.normal_ambient_tangency = rep.normal_ambient_tangency.max(ambient.tangency_residual(&p, &nrm));
        rep.shape_asymmetry = rep.shape_asymmetry.max(asym);
        rep.mean_curvature_residual = rep.mean_curvature_residual.max(a.trace().abs());

        let jac = (dx.transpose() * &dx).determinant().sqrt();
        hyp.weights.push(hyp.grid.param_weight(node) * jac);
        hyp.points.push(p);
        hyp.normals.push(nrm);
        hyp.frames.push(frame);
        hyp.coord_tangents.push(dx);
        hyp.frame_coeffs.push(coeffs);
        hyp.shape.push(a);
        hyp.a_norm_sq.push(a2);
        hyp.ricci_nn.push(ric);
        hyp.potential.push(ric + a2);
    }
    if !degenerate.is_empty() {
        return Err(LabError::FrameDegeneracy { nodes: degenerate });
    }
    rep.volume = hyp.weights.iter().sum();
    rep.analytic_volume = hyp.chart.analytic_volume();
    hyp.report = rep;
    Ok(hyp)
}

impl DiscreteHypersurface {
    pub fn ambient(&self) -> &AmbientModel {
        &self.ambient
    }

    pub fn catalog(&self) -> &CatalogKind {
        &self.catalog
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    /// Dimension `n` of the hypersurface.
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn embed_dim(&self) -> usize {
        self.ambient.embed_dim()
    }

    pub fn node_count(&self) -> usize {
        self.points.len()
    }

    pub fn geometry_report(&self) -> &GeometryReport {
        &self.report
    }

    pub fn mean_curvature_residual(&self) -> f64 {
        self.report.mean_curvature_residual
    }

    pub fn volume(&self) -> f64 {
        self.report.volume
    }

    pub fn analytic_volume(&self) -> Option<f64> {
        self.report.analytic_volume
    }

    /// Radius of the geodesic sphere when the kind is one.
    pub fn geodesic_radius(&self) -> Option<f64> {
        match self.chart {
            Chart::GeodesicSphere { radius, .. } => Some(radius),
            _ => None,
        }
    }

    /// Parameter axes `α` with `dt_α` a parallel harmonic 1-form.
    pub fn harmonic_param_axes(&self) -> Vec<usize> {
        self.chart.harmonic_axes()
    }

    /// Position of the chart at arbitrary parameters (not necessarily a node).
    pub fn chart_position(&self, t: &[f64]) -> DVector<f64> {
        self.chart.eval(&self.ambient, t).0.position
    }

    /// The same hypersurface at another resolution.
    pub fn rebuild(&self, resolution: &[usize]) -> Result<Self> {
        let kind = match (&self.catalog, &self.chart) {
            (CatalogKind::GeodesicSphereCp { .. }, Chart::GeodesicSphere { radius, .. }) => {
                CatalogKind::GeodesicSphereCp { radius: Some(*radius) }
            }
            (k, _) => k.clone(),
        };
        build_hypersurface(&self.ambient, kind, Some(resolution))
    }

    /// `∫ f dM` by the mesh quadrature.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Parameter-space partial derivatives of a node field.
    pub fn param_derivatives(&self, f: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|a| self.grid.differentiate(f, a)).collect()
    }

    /// Frame components `(e_k f)` of the gradient of a node field.
    pub fn frame_gradient(&self, f: &[f64]) -> Vec<DVector<f64>> {
        let partials = self.param_derivatives(f);
        (0..self.node_count())
            .map(|a| {
                let df = DVector::from_fn(self.dim(), |alpha, _| partials[alpha][a]);
                self.frame_coeffs[a].transpose() * df
            })
            .collect()
    }

    /// Euclidean derivatives `D_{e_k} V` (columns) of an `R^d`-valued node field.
    pub fn frame_derivative(&self, field: &[DVector<f64>]) -> Vec<DMatrix<f64>> {
        let d = self.embed_dim();
        let n = self.dim();
        let mut partials = vec![DMatrix::zeros(d, n); self.node_count()];
        for i in 0..d {
            let comp: Vec<f64> = field.iter().map(|v| v[i]).collect();
            for alpha in 0..n {
                let der = self.grid.differentiate(&comp, alpha);
                for (a, m) in partials.iter_mut().enumerate() {
                    m[(i, alpha)] = der[a];
                }
            }
        }
        partials
            .into_iter()
            .zip(&self.frame_coeffs)
            .map(|(p, c)| p * c)
            .collect()
    }

    /// `R^d` vectors `Σ_k c_k e_k` from frame components.
    pub fn to_ambient_vectors(&self, components: &[DVector<f64>]) -> Vec<DVector<f64>> {
        self.frames.iter().zip(components).map(|(e, c)| e * c).collect()
    }

    /// Frame components of tangent `R^d` vectors.
    pub fn to_frame_components(&self, vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
        self.frames.iter().zip(vectors).map(|(e, v)| e.transpose() * v).collect()
    }

    /// Gaussian curvature of a surface from its induced metric alone, for
    /// orthogonal charts: `K = −(∂_1(G_1/W) + ∂_2(E_2/W)) / (2W)`, `W = √(EG)`.
    pub fn intrinsic_gaussian_curvature(&self) -> Result<Vec<f64>> {
        if self.dim() != 2 {
            return Err(LabError::InvalidDimension("Gaussian curvature needs n = 2".into()));
        }
        let g: Vec<(f64, f64, f64)> = self
            .coord_tangents
            .iter()
            .map(|t| {
                let (a, b) = (t.column(0), t.column(1));
                (a.norm_squared(), a.dot(&b), b.norm_squared())
            })
            .collect();
        if g.iter().any(|(e, f, gg)| f.abs() > 1e-8 * (e * gg).sqrt()) {
            return Err(LabError::Incompatible("chart is not orthogonal".into()));
        }
        let w: Vec<f64> = g.iter().map(|(e, _, gg)| (e * gg).sqrt()).collect();
        let e: Vec<f64> = g.iter().map(|x| x.0).collect();
        let gg: Vec<f64> = g.iter().map(|x| x.2).collect();
        let g1 = self.grid.differentiate(&gg, 0);
        let e2 = self.grid.differentiate(&e, 1);
        let a: Vec<f64> = g1.iter().zip(&w).map(|(x, w)| x / w).collect();
        let b: Vec<f64> = e2.iter().zip(&w).map(|(x, w)| x / w).collect();
        let da = self.grid.differentiate(&a, 0);
        let db = self.grid.differentiate(&b, 1);
        Ok((0..self.node_count())
            .map(|k| -(da[k] + db[k]) / (2.0 * w[k]))
            .collect())
    }

    /// Gaussian curvature by the Gauss equation: `Rm^N(e_1,e_2,e_1,e_2) + det A`.
    pub fn extrinsic_gaussian_curvature(&self) -> Result<Vec<f64>> {
        if self.dim() != 2 {
            return Err(LabError::InvalidDimension("Gaussian curvature needs n = 2".into()));
        }
        Ok((0..self.node_count())
            .map(|k| {
                let e = &self.frames[k];
                let rm = self.ambient.rm_unchecked(
                    &self.points[k],
                    &e.column(0).into_owned(),
                    &e.column(1).into_owned(),
                );
                rm + self.shape[k].determinant()
            })
            .collect())
    }

    /// Writes the node table: `node`, parameters, `R^d` position, weight; then
    /// one `cell` line per grid cell listing its corner node ids.
    pub fn write_mesh_dump(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            f,
            "# columns: node t_1..t_{} x_1..x_{} weight",
            self.dim(),
            self.embed_dim()
        )?;
        for a in 0..self.node_count() {
            write!(f, "node {a}")?;
            for t in self.grid.params(a) {
                write!(f, " {t:.17e}")?;
            }
            for x in self.points[a].position.iter() {
                write!(f, " {x:.17e}")?;
            }
            writeln!(f, " {:.17e}", self.weights[a])?;
        }
        for cell in self.grid.cells() {
            write!(f, "cell")?;
            for c in cell {
                write!(f, " {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
