//! Structured tensor grids: uniform periodic axes and Gauss–Legendre axes, with
//! spectral differentiation of node fields along each axis.

use crate::numerics::{fourier_diff_matrix, gauss_legendre, lagrange_diff_matrix};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisKind {
    /// Uniform nodes `2πj/n` on a circle.
    Periodic,
    /// Gauss–Legendre nodes on an open interval; endpoints are never nodes.
    Interval,
}

#[derive(Clone, Debug)]
pub struct Axis {
    pub kind: AxisKind,
    pub lo: f64,
    pub hi: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    diff: DMatrix<f64>,
}

impl Axis {
    pub fn periodic(n: usize) -> Self {
        let h = 2.0 * PI / n as f64;
        let nodes = (0..n).map(|j| j as f64 * h).collect();
        Self {
            kind: AxisKind::Periodic,
            lo: 0.0,
            hi: 2.0 * PI,
            nodes,
            weights: vec![h; n],
            diff: fourier_diff_matrix(n),
        }
    }

    pub fn interval(n: usize, lo: f64, hi: f64) -> Self {
        let (nodes, weights) = gauss_legendre(n, lo, hi);
        let diff = lagrange_diff_matrix(&nodes);
        Self { kind: AxisKind::Interval, lo, hi, nodes, weights, diff }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spectral differentiation matrix of this axis.
    pub fn diff_matrix(&self) -> &DMatrix<f64> {
        &self.diff
    }
}

/// Row-major tensor product of axes (last axis varies fastest).
#[derive(Clone, Debug)]
pub struct TensorGrid {
    pub axes: Vec<Axis>,
    strides: Vec<usize>,
}

impl TensorGrid {
    pub fn new(axes: Vec<Axis>) -> Self {
        let mut strides = vec![1; axes.len()];
        for a in (0..axes.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * axes[a + 1].len();
        }
        Self { axes, strides }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn multi_index(&self, mut node: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (a, s) in self.strides.iter().enumerate() {
            idx[a] = node / s;
            node %= s;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn params(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .zip(&self.axes)
            .map(|(&i, ax)| ax.nodes[i])
            .collect()
    }

    /// Product of axis weights at a node.
    pub fn param_weight(&self, node: usize) -> f64 {
        self.multi_index(node)
            .iter()
            .zip(&self.axes)
            .map(|(&i, ax)| ax.weights[i])
            .product()
    }

    /// Spectral derivative of a node field along one parameter axis.
    pub fn differentiate(&self, field: &[f64], axis: usize) -> Vec<f64> {
        let n = self.axes[axis].len();
        let stride = self.strides[axis];
        let d = self.axes[axis].diff_matrix();
        let mut out = vec![0.0; field.len()];
        let mut line = vec![0.0; n];
        for start in 0..field.len() {
            if !(start / stride).is_multiple_of(n) {
                continue;
            }
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = field[start + i * stride];
            }
            for i in 0..n {
                let mut acc = 0.0;
                for (j, v) in line.iter().enumerate() {
                    acc += d[(i, j)] * v;
                }
                out[start + i * stride] = acc;
            }
        }
        out
    }

    /// Grid cells as corner lists (`2^dim` corners); periodic axes wrap around.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let dim = self.dim();
        let counts: Vec<usize> = self
            .axes
            .iter()
            .map(|ax| match ax.kind {
                AxisKind::Periodic => ax.len(),
                AxisKind::Interval => ax.len() - 1,
            })
            .collect();
        let total: usize = counts.iter().product();
        let mut cells = Vec::with_capacity(total);
        for c in 0..total {
            let mut rem = c;
            let mut base = vec![0; dim];
            for a in (0..dim).rev() {
                base[a] = rem % counts[a];
                rem /= counts[a];
            }
            let mut corners = Vec::with_capacity(1 << dim);
            for mask in 0..(1usize << dim) {
                let idx: Vec<usize> = (0..dim)
                    .map(|a| {
                        let step = (mask >> (dim - 1 - a)) & 1;
                        (base[a] + step) % self.axes[a].len()
                    })
                    .collect();
                corners.push(self.flat_index(&idx));
            }
            cells.push(corners);
        }
        cells
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let g = TensorGrid::new(vec![Axis::interval(3, 0.0, 1.0), Axis::periodic(4), Axis::periodic(5)]);
        assert_eq!(g.node_count(), 60);
        for k in 0..60 {
            assert_eq!(g.flat_index(&g.multi_index(k)), k);
        }
        assert_eq!(g.cells().len(), 2 * 4 * 5);
    }

    #[test]
    fn axis_derivatives_are_spectral() {
        let g = TensorGrid::new(vec![Axis::interval(16, 0.0, PI), Axis::periodic(16)]);
        let f: Vec<f64> = (0..g.node_count())
            .map(|k| {
                let p = g.params(k);
                p[0].sin() * (2.0 * p[1]).cos()
            })
            .collect();
        let d0 = g.differentiate(&f, 0);
        let d1 = g.differentiate(&f, 1);
        for k in 0..g.node_count() {
            let p = g.params(k);
            assert!((d0[k] - p[0].cos() * (2.0 * p[1]).cos()).abs() < 1e-9);
            assert!((d1[k] + 2.0 * p[0].sin() * (2.0 * p[1]).sin()).abs() < 1e-11);
        }
    }
}
