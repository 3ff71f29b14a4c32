//! Lowest-order Whitney complex on the triangulated structured mesh of a
//! surface, and the kernel of its weak 1-form Hodge Laplacian.

use super::sparse::{SkylineCholesky, SparseMatrix};
use crate::error::{LabError, Result};
use crate::hypersurface::grid::AxisKind;
use crate::hypersurface::DiscreteHypersurface;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Ritz values below `largest / KERNEL_GAP` count as kernel.
pub const KERNEL_GAP: f64 = 1e6;
const BLOCK: usize = 8;
const MAX_ITERS: usize = 60;

/// Simplicial 2-complex with Whitney mass matrices.
///
/// Vertices `0..node_count` are the grid nodes in grid order; interval-axis
/// meshes add two pole vertices closed off by triangle fans.
#[derive(Clone, Debug)]
pub struct WhitneyComplex {
    node_count: usize,
    positions: Vec<DVector<f64>>,
    params: Vec<Vec<f64>>,
    periodic: [bool; 2],
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    triangles: Vec<[usize; 3]>,
    areas: Vec<f64>,
    d0: SparseMatrix,
    d1: SparseMatrix,
    m0: Vec<f64>,
    m1: SparseMatrix,
    laplacian: SparseMatrix,
}

/// Outcome of the kernel extraction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelReport {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler_characteristic: i64,
    /// Ritz values of `L x = λ M₁ x` from the block, ascending.
    pub ritz_values: Vec<f64>,
    pub kernel_dim: usize,
    pub iterations: usize,
    /// Largest `xᵀLx / xᵀM₁x` over the kernel vectors.
    pub kernel_residual: f64,
}

/// Barycentric gradients `∇λ_0, ∇λ_1, ∇λ_2` of a triangle in `R^d`, and its area.
fn barycentric_gradients(p: [&DVector<f64>; 3]) -> ([DVector<f64>; 3], f64) {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let (g11, g12, g22) = (e1.dot(&e1), e1.dot(&e2), e2.dot(&e2));
    let det = g11 * g22 - g12 * g12;
    let (i11, i12, i22) = (g22 / det, -g12 / det, g11 / det);
    let l1 = &e1 * i11 + &e2 * i12;
    let l2 = &e1 * i12 + &e2 * i22;
    let l0 = -(&l1 + &l2);
    ([l0, l1, l2], 0.5 * det.sqrt())
}

impl WhitneyComplex {
    pub fn build(hyp: &DiscreteHypersurface) -> Result<Self> {
        if hyp.dim() != 2 {
            return Err(LabError::InvalidDimension(format!(
                "Whitney solver needs a surface, got n = {}",
                hyp.dim()
            )));
        }
        let grid = hyp.grid();
        let kinds = [grid.axes[0].kind, grid.axes[1].kind];
        let (n0, n1) = (grid.axes[0].len(), grid.axes[1].len());
        let periodic = [kinds[0] == AxisKind::Periodic, kinds[1] == AxisKind::Periodic];
        if !periodic[1] {
            return Err(LabError::Incompatible("second chart axis must be periodic".into()));
        }
        let node_count = hyp.node_count();
        let mut positions: Vec<DVector<f64>> = hyp.points.iter().map(|p| p.position.clone()).collect();
        let mut params: Vec<Vec<f64>> = (0..node_count).map(|a| grid.params(a)).collect();
        let id = |i: usize, j: usize| i * n1 + j % n1;
        let mut triangles = Vec::new();
        let rows = if periodic[0] { n0 } else { n0 - 1 };
        for i in 0..rows {
            let ip = (i + 1) % n0;
            for j in 0..n1 {
                let (a, b, c, d) = (id(i, j), id(ip, j), id(ip, j + 1), id(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        if !periodic[0] {
            let (lo, hi) = (grid.axes[0].lo, grid.axes[0].hi);
            let north = positions.len();
            positions.push(hyp.chart_position(&[lo, 0.0]));
            params.push(vec![lo, 0.0]);
            let south = positions.len();
            positions.push(hyp.chart_position(&[hi, 0.0]));
            params.push(vec![hi, 0.0]);
            for j in 0..n1 {
                triangles.push([north, id(0, j), id(0, j + 1)]);
                triangles.push([id(n0 - 1, j + 1), id(n0 - 1, j), south]);
            }
        }

        let nv = positions.len();
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
            }
        }
        let ne = edges.len();
        let nf = triangles.len();

        let mut d0 = SparseMatrix::zeros(ne, nv);
        for (e, &(a, b)) in edges.iter().enumerate() {
            d0.add(e, a, -1.0);
            d0.add(e, b, 1.0);
        }
        let mut d1 = SparseMatrix::zeros(nf, ne);
        let mut m0 = vec![0.0; nv];
        let mut m1 = SparseMatrix::zeros(ne, ne);
        let mut areas = Vec::with_capacity(nf);
        for (f, t) in triangles.iter().enumerate() {
            let (grad, area) = barycentric_gradients([&positions[t[0]], &positions[t[1]], &positions[t[2]]]);
            if !(area > 0.0) {
                return Err(LabError::Degenerate(format!("triangle {f} has zero area")));
            }
            areas.push(area);
            for &v in t {
                m0[v] += area / 3.0;
            }
            // local edge k runs t[k] → t[k+1]
            let local: Vec<(usize, usize, usize, f64)> = (0..3)
                .map(|k| {
                    let (i, j) = (k, (k + 1) % 3);
                    let (a, b) = (t[i], t[j]);
                    let e = edge_index[&(a.min(b), a.max(b))];
                    (i, j, e, if a < b { 1.0 } else { -1.0 })
                })
                .collect();
            for &(_, _, e, s) in &local {
                d1.add(f, e, s);
            }
            let g = |a: usize, b: usize| grad[a].dot(&grad[b]);
            let l = |a: usize, b: usize| area * if a == b { 2.0 } else { 1.0 } / 12.0;
            for &(i, j, e, s) in &local {
                for &(k, m, e2, s2) in &local {
                    // ∫⟨λ_i∇λ_j − λ_j∇λ_i, λ_k∇λ_m − λ_m∇λ_k⟩
                    let v = l(i, k) * g(j, m) - l(i, m) * g(j, k) - l(j, k) * g(i, m) + l(j, m) * g(i, k);
                    m1.add(e, e2, s * s2 * v);
                }
            }
        }
        let m2: Vec<f64> = areas.iter().map(|a| 1.0 / a).collect();
        let d1t = d1.transpose();
        let curl = d1t.mul(&d1.scale_rows(&m2));
        let b = m1.mul(&d0);
        let inv_m0: Vec<f64> = m0.iter().map(|m| 1.0 / m).collect();
        let grad_div = b.mul(&b.transpose().scale_rows(&inv_m0));
        let laplacian = curl.plus(&grad_div, 1.0);

        Ok(Self { node_count, positions, params, periodic, edges, edge_index, triangles, areas, d0, d1, m0, m1, laplacian })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn laplacian(&self) -> &SparseMatrix {
        &self.laplacian
    }

    pub fn mass1(&self) -> &SparseMatrix {
        &self.m1
    }

    /// Edge integrals of the parameter differential `dt_axis`.
    pub fn param_cochain(&self, axis: usize) -> Vec<f64> {
        self.edges
            .iter()
            .map(|&(a, b)| {
                let mut dt = self.params[b][axis] - self.params[a][axis];
                if self.periodic[axis] {
                    dt -= 2.0 * PI * (dt / (2.0 * PI)).round();
                }
                dt
            })
            .collect()
    }

    /// Edge integrals `f(b) − f(a)` of `df` for a vertex function.
    pub fn exact_cochain(&self, f: &[f64]) -> Vec<f64> {
        self.d0.mul_vec(f)
    }

    /// `xᵀLx / xᵀM₁x`; zero exactly on the discrete harmonic space.
    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        dot(x, &self.laplacian.mul_vec(x)) / dot(x, &self.m1.mul_vec(x))
    }

    /// Relative discrete `dω` and `d*ω` residuals of a cochain.
    pub fn closedness_residuals(&self, x: &[f64]) -> (f64, f64) {
        let norm = dot(x, &self.m1.mul_vec(x)).sqrt();
        let dx = self.d1.mul_vec(x);
        let curl: f64 = dx.iter().zip(&self.areas).map(|(v, a)| v * v / a).sum::<f64>().sqrt();
        let co = self.d0.transpose().mul_vec(&self.m1.mul_vec(x));
        let div: f64 = co.iter().zip(&self.m0).map(|(v, m)| v * v / m).sum::<f64>().sqrt();
        (curl / norm, div / norm)
    }

    /// Kernel of `L` relative to `M₁` by block inverse iteration with Rayleigh–Ritz.
    pub fn kernel(&self, seed: u64) -> Result<(Vec<Vec<f64>>, KernelReport)> {
        let ne = self.edge_count();
        let scale = (0..ne).map(|e| diag(&self.laplacian, e)).sum::<f64>()
            / (0..ne).map(|e| diag(&self.m1, e)).sum::<f64>();
        // tiny positive shift keeps the factorization definite; kernel vectors
        // still converge at ratio ~ shift / λ_1 per sweep
        let shift = 1e-9 * scale;
        let chol = SkylineCholesky::factor(&self.laplacian.plus(&self.m1, shift))?;
        let block = BLOCK.min(ne);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = DMatrix::from_fn(ne, block, |_, _| crate::numerics::standard_normal(&mut rng));
        let mut ritz = vec![f64::INFINITY; block];
        let mut iterations = 0;
        for it in 0..MAX_ITERS {
            iterations = it + 1;
            let mut y = DMatrix::zeros(ne, block);
            for c in 0..block {
                let rhs = self.m1.mul_vec(x.column(c).as_slice());
                y.set_column(c, &DVector::from_vec(chol.solve(&rhs)));
            }
            let (vals, vecs) = self.rayleigh_ritz(&y)?;
            x = &y * vecs;
            // only the lower half decides the rank; the top of the block converges slowly
            let change = vals[..block / 2]
                .iter()
                .zip(&ritz)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            ritz = vals;
            if change <= 1e-8 * ritz[block - 1].abs() {
                break;
            }
        }
        let largest = ritz[block - 1];
        let kernel_dim = ritz.iter().filter(|&&v| v < largest / KERNEL_GAP).count();
        if kernel_dim == block {
            return Err(LabError::NonConvergence {
                what: "kernel fills the whole iteration block".into(),
                residual: largest,
            });
        }
        let vectors: Vec<Vec<f64>> = (0..kernel_dim).map(|c| x.column(c).iter().copied().collect()).collect();
        let kernel_residual = vectors.iter().map(|v| self.rayleigh_quotient(v).abs()).fold(0.0, f64::max);
        let report = KernelReport {
            vertices: self.vertex_count(),
            edges: ne,
            triangles: self.triangle_count(),
            euler_characteristic: self.euler_characteristic(),
            ritz_values: ritz,
            kernel_dim,
            iterations,
            kernel_residual,
        };
        Ok((vectors, report))
    }

    fn rayleigh_ritz(&self, y: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let b = y.ncols();
        let mut ly = DMatrix::zeros(y.nrows(), b);
        let mut my = DMatrix::zeros(y.nrows(), b);
        for c in 0..b {
            ly.set_column(c, &DVector::from_vec(self.laplacian.mul_vec(y.column(c).as_slice())));
            my.set_column(c, &DVector::from_vec(self.m1.mul_vec(y.column(c).as_slice())));
        }
        let lr = y.transpose() * ly;
        let mr = y.transpose() * my;
        let lr = (&lr + lr.transpose()) * 0.5;
        let mr = (&mr + mr.transpose()) * 0.5;
        let chol = mr.cholesky().ok_or_else(|| LabError::NonConvergence {
            what: "iteration block lost rank".into(),
            residual: 0.0,
        })?;
        let linv = chol.l().try_inverse().expect("triangular factor");
        let reduced = &linv * lr * linv.transpose();
        let (vals, vecs) = crate::numerics::sym_eigen_sorted(&reduced);
        Ok((vals.to_vec(), linv.transpose() * vecs))
    }

    /// Per-node frame components of the piecewise-constant form recovered from a
    /// cochain, area-averaged over the triangles around each grid node.
    pub fn node_components(&self, hyp: &DiscreteHypersurface, x: &[f64]) -> Vec<DVector<f64>> {
        let d = hyp.embed_dim();
        let mut acc = vec![DVector::zeros(d); self.node_count];
        let mut wsum = vec![0.0; self.node_count];
        let edge_value = |a: usize, b: usize| -> f64 {
            let e = self.edge_index[&(a.min(b), a.max(b))];
            if a < b {
                x[e]
            } else {
                -x[e]
            }
        };
        for (t, area) in self.triangles.iter().zip(&self.areas) {
            let p = [&self.positions[t[0]], &self.positions[t[1]], &self.positions[t[2]]];
            let e1 = p[1] - p[0];
            let e2 = p[2] - p[0];
            let (g11, g12, g22) = (e1.dot(&e1), e1.dot(&e2), e2.dot(&e2));
            let det = g11 * g22 - g12 * g12;
            let (c1, c2) = (edge_value(t[0], t[1]), edge_value(t[0], t[2]));
            // α = E G⁻¹ c satisfies α·e1 = c1, α·e2 = c2 within the triangle plane
            let a1 = (g22 * c1 - g12 * c2) / det;
            let a2 = (-g12 * c1 + g11 * c2) / det;
            let alpha = &e1 * a1 + &e2 * a2;
            for &v in t {
                if v < self.node_count {
                    acc[v] += &alpha * *area;
                    wsum[v] += area;
                }
            }
        }
        acc.iter()
            .zip(&wsum)
            .zip(&hyp.frames)
            .map(|((v, w), e)| e.transpose() * (v / *w))
            .collect()
    }
}

fn diag(m: &SparseMatrix, i: usize) -> f64 {
    m.row(i).find(|&(j, _)| j == i).map_or(0.0, |(_, v)| v)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
