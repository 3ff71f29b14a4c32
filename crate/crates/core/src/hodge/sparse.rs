//! Minimal sparse symmetric linear algebra: row-map matrices, reverse
//! Cuthill–McKee ordering and a profile (skyline) Cholesky factorization.

use crate::error::{LabError, Result};
use std::collections::{BTreeMap, VecDeque};

/// Sparse matrix stored as one ordered map per row.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    rows: Vec<BTreeMap<usize, f64>>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, rows: vec![BTreeMap::new(); nrows] }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.add(i, i, *v);
        }
        m
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        *self.rows[i].entry(j).or_insert(0.0) += v;
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows[i].iter().map(|(&j, &v)| (j, v))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for (i, r) in self.rows.iter().enumerate() {
            for (&j, &v) in r {
                t.add(j, i, v);
            }
        }
        t
    }

    pub fn mul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zeros(self.nrows, other.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for (&k, &a) in r {
                for (&j, &b) in &other.rows[k] {
                    out.add(i, j, a * b);
                }
            }
        }
        out
    }

    pub fn scale_rows(&self, s: &[f64]) -> Self {
        let mut out = self.clone();
        for (r, f) in out.rows.iter_mut().zip(s) {
            for v in r.values_mut() {
                *v *= f;
            }
        }
        out
    }

    pub fn plus(&self, other: &SparseMatrix, alpha: f64) -> Self {
        let mut out = self.clone();
        for (i, r) in other.rows.iter().enumerate() {
            for (&j, &v) in r {
                out.add(i, j, alpha * v);
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(&j, &v)| v * x[j]).sum())
            .collect()
    }
}

/// Reverse Cuthill–McKee permutation of a symmetric sparsity pattern.
/// `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseMatrix) -> Vec<usize> {
    let n = a.nrows;
    let degree: Vec<usize> = (0..n).map(|i| a.rows[i].len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .expect("unvisited node");
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = a.rows[v].keys().copied().filter(|&j| !visited[j]).collect();
            nbrs.sort_by_key(|&j| degree[j]);
            for j in nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Cholesky factor `L` of a symmetric positive-definite matrix in profile storage,
/// under a fill-reducing permutation.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    inv: Vec<usize>,
    first: Vec<usize>,
    /// Row `i` of `L`, columns `first[i]..=i`.
    rows: Vec<Vec<f64>>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.nrows;
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old, r) in a.rows.iter().enumerate() {
            let i = inv[old];
            for &j_old in r.keys() {
                let j = inv[j_old];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut rows: Vec<Vec<f64>> = (0..n).map(|i| vec![0.0; i - first[i] + 1]).collect();
        for (old, r) in a.rows.iter().enumerate() {
            let i = inv[old];
            for (&j_old, &v) in r {
                let j = inv[j_old];
                if j <= i {
                    rows[i][j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = rows[i][j - fi];
                if j < i {
                    let (ri, rj) = (&rows[i], &rows[j]);
                    for k in k0..j {
                        s -= ri[k - fi] * rj[k - fj];
                    }
                    rows[i][j - fi] = s / rows[j][j - fj];
                } else {
                    let ri = &rows[i];
                    for k in k0..i {
                        s -= ri[k - fi] * ri[k - fi];
                    }
                    if !(s > 0.0) {
                        return Err(LabError::NonConvergence {
                            what: format!("Cholesky pivot {i} is not positive"),
                            residual: s,
                        });
                    }
                    rows[i][i - fi] = s.sqrt();
                }
            }
        }
        Ok(Self { perm, inv, first, rows })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let mut s = y[i];
            for k in fi..i {
                s -= self.rows[i][k - fi] * y[k];
            }
            y[i] = s / self.rows[i][i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            y[i] /= self.rows[i][i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= self.rows[i][k - fi] * yi;
            }
        }
        (0..n).map(|old| y[self.inv[old]]).collect()
    }

    /// Stored entries of the factor.
    pub fn profile_size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_periodic_laplacian_plus_shift() {
        let n = 40;
        let mut a = SparseMatrix::zeros(n, n);
        for i in 0..n {
            a.add(i, i, 2.5);
            a.add(i, (i + 1) % n, -1.0);
            a.add((i + 1) % n, i, -1.0);
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x);
        let chol = SkylineCholesky::factor(&a).unwrap();
        let y = chol.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
        // RCM keeps the wrap-around profile narrow
        assert!(chol.profile_size() < 4 * n);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let mut a = SparseMatrix::zeros(2, 2);
        a.add(0, 0, 1.0);
        a.add(0, 1, 2.0);
        a.add(1, 0, 2.0);
        a.add(1, 1, 1.0);
        assert!(SkylineCholesky::factor(&a).is_err());
    }
}
