//! The Veronese embedding `[z] ↦ z z̄ᵗ` of complex and quaternionic projective
//! spaces into Hermitian matrices with the metric `⟨A,B⟩ = ½ Re tr(AB)`.
//!
//! Homogeneous coordinates are unit vectors `z` in `S^{n}` (scalars of dimension
//! `S::DIM`), stored as real vectors of length `S::DIM · n`. Hermitian matrices
//! are stored in orthonormal real coordinates: `A_ii / √2` for each diagonal entry
//! followed by the `S::DIM` real components of `A_ij` for `i < j`.

use super::scalars::ProjScalar;
use crate::numerics::orthogonal_complement;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::SQRT_2;
use std::marker::PhantomData;

#[derive(Clone, Debug)]
pub struct Veronese<S> {
    n: usize,
    _scalar: PhantomData<S>,
}

impl<S: ProjScalar> Veronese<S> {
    /// Projective space of homogeneous dimension `n` (so `n - 1` projective dimension).
    pub fn new(n: usize) -> Self {
        Self { n, _scalar: PhantomData }
    }

    pub fn homogeneous_len(&self) -> usize {
        self.n
    }

    pub fn lift_dim(&self) -> usize {
        S::DIM * self.n
    }

    pub fn embed_dim(&self) -> usize {
        self.n + S::DIM * self.n * (self.n - 1) / 2
    }

    /// Real dimension of the projective space.
    pub fn intrinsic_dim(&self) -> usize {
        S::DIM * (self.n - 1)
    }

    fn scalars(&self, v: &DVector<f64>) -> Vec<S> {
        (0..self.n)
            .map(|i| S::from_slice(&v.as_slice()[S::DIM * i..S::DIM * (i + 1)]))
            .collect()
    }

    fn real(&self, s: &[S]) -> DVector<f64> {
        let mut out = DVector::zeros(self.lift_dim());
        for (i, x) in s.iter().enumerate() {
            x.write(&mut out.as_mut_slice()[S::DIM * i..S::DIM * (i + 1)]);
        }
        out
    }

    /// `a b̄ᵗ + b āᵗ` as a row-major matrix.
    fn sym_outer(&self, a: &[S], b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut m = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = a[i] * b[j].conj() + b[i] * a[j].conj();
            }
        }
        m
    }

    fn coords(&self, m: &[S]) -> DVector<f64> {
        let n = self.n;
        let mut c = DVector::zeros(self.embed_dim());
        for i in 0..n {
            c[i] = m[i * n + i].re() / SQRT_2;
        }
        let mut k = n;
        let mut buf = vec![0.0; S::DIM];
        for i in 0..n {
            for j in (i + 1)..n {
                m[i * n + j].write(&mut buf);
                c.as_mut_slice()[k..k + S::DIM].copy_from_slice(&buf);
                k += S::DIM;
            }
        }
        c
    }

    fn matrix(&self, c: &DVector<f64>) -> Vec<S> {
        let n = self.n;
        let mut m = vec![S::zero(); n * n];
        for i in 0..n {
            m[i * n + i] = S::from_real(c[i] * SQRT_2);
        }
        let mut k = n;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = S::from_slice(&c.as_slice()[k..k + S::DIM]);
                m[i * n + j] = a;
                m[j * n + i] = a.conj();
                k += S::DIM;
            }
        }
        m
    }

    fn mat_vec(&self, m: &[S], z: &[S]) -> Vec<S> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).fold(S::zero(), |acc, j| acc + m[i * n + j] * z[j]))
            .collect()
    }

    /// `z̄ᵗ v`, the algebra-valued Hermitian product.
    fn herm(&self, z: &[S], v: &[S]) -> S {
        z.iter().zip(v).fold(S::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    /// Coordinates of `P = z z̄ᵗ` for a unit lift `z`.
    pub fn embed(&self, z: &DVector<f64>) -> DVector<f64> {
        let s = self.scalars(z);
        let mut m = self.sym_outer(&s, &s);
        for x in &mut m {
            *x = x.scale(0.5);
        }
        self.coords(&m)
    }

    /// Hermitian matrix `P` (row-major, real components) for membership checks.
    pub fn variety_residual(&self, c: &DVector<f64>) -> f64 {
        let n = self.n;
        let m = self.matrix(c);
        let mut worst: f64 = 0.0;
        let mut trace = 0.0;
        for i in 0..n {
            trace += m[i * n + i].re();
            for j in 0..n {
                let sq = (0..n).fold(S::zero(), |acc, k| acc + m[i * n + k] * m[k * n + j]);
                let diff = sq - m[i * n + j];
                let mut buf = vec![0.0; S::DIM];
                diff.write(&mut buf);
                worst = worst.max(buf.iter().map(|x| x * x).sum::<f64>().sqrt());
            }
        }
        worst.max((trace - 1.0).abs())
    }

    /// Differential of the chart at `z` applied to a lift vector `v`: `v z̄ᵗ + z v̄ᵗ`.
    pub fn differential(&self, z: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let zs = self.scalars(z);
        let vs = self.scalars(v);
        self.coords(&self.sym_outer(&vs, &zs))
    }

    /// Horizontal lift `v` of a tangent vector `x` at `[z]`, i.e. the horizontal part of `H_x z`.
    pub fn horizontal_lift(&self, z: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        let zs = self.scalars(z);
        let hz = self.mat_vec(&self.matrix(x), &zs);
        let c = self.herm(&zs, &hz);
        let v: Vec<S> = hz.iter().zip(&zs).map(|(h, zi)| *h - *zi * c).collect();
        self.real(&v)
    }

    /// Orthonormal basis of the horizontal space at `z` (columns, real lift coordinates).
    pub fn horizontal_basis(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let zs = self.scalars(z);
        let mut units = vec![S::from_real(1.0)];
        units.extend(S::imaginary_units());
        let vertical: Vec<DVector<f64>> = units
            .iter()
            .map(|u| self.real(&zs.iter().map(|zi| *zi * *u).collect::<Vec<_>>()))
            .collect();
        orthogonal_complement(&DMatrix::from_columns(&vertical), self.lift_dim())
    }

    /// Orthonormal tangent basis of the embedded projective space at `[z]`.
    pub fn tangent_basis(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let h = self.horizontal_basis(z);
        let cols: Vec<DVector<f64>> = h
            .column_iter()
            .map(|v| self.differential(z, &v.into_owned()))
            .collect();
        DMatrix::from_columns(&cols)
    }

    /// `II(X,Y) = v w̄ᵗ + w v̄ᵗ − 2 Re⟨v,w⟩ z z̄ᵗ` for horizontal lifts `v`, `w`.
    pub fn second_fundamental_form(
        &self,
        z: &DVector<f64>,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> DVector<f64> {
        let v = self.horizontal_lift(z, x);
        let w = self.horizontal_lift(z, y);
        let re = v.dot(&w);
        let zs = self.scalars(z);
        let mut m = self.sym_outer(&self.scalars(&v), &self.scalars(&w));
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = m[i * n + j] - (zs[i] * zs[j].conj()).scale(2.0 * re);
            }
        }
        self.coords(&m)
    }

    /// Images of `x` under the complex structures: right multiplication of the
    /// horizontal lift by each imaginary unit.
    pub fn structures(&self, z: &DVector<f64>, x: &DVector<f64>) -> Vec<DVector<f64>> {
        let v = self.scalars(&self.horizontal_lift(z, x));
        S::imaginary_units()
            .into_iter()
            .map(|u| {
                let vu: Vec<S> = v.iter().map(|a| *a * u).collect();
                self.differential(z, &self.real(&vu))
            })
            .collect()
    }

    /// Residual of `x` from the tangent space at `[z]`.
    pub fn tangency_residual(&self, z: &DVector<f64>, x: &DVector<f64>) -> f64 {
        let v = self.horizontal_lift(z, x);
        (self.differential(z, &v) - x).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn coordinates_are_isometric_to_half_trace_metric() {
        let v = Veronese::<Complex64>::new(3);
        let z = DVector::from_vec(vec![0.6, 0.0, 0.0, 0.8, 0.0, 0.0]);
        let p = v.embed(&z);
        // |P|² = ½ tr(P²) = ½ for a rank-one projector
        assert!((p.norm_squared() - 0.5).abs() < 1e-15);
        assert!(v.variety_residual(&p) < 1e-15);
        assert_eq!(v.embed_dim(), 9);
    }
}
