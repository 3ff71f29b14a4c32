//! Small numerical building blocks shared by the geometry modules: Gauss–Legendre
//! rules, spectral differentiation matrices, Richardson-extrapolated finite
//! differences and a few dense linear-algebra helpers.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root
        nodes[n - 1 - i] = mid + half * x;
        nodes[i] = mid - half * x;
        weights[n - 1 - i] = half * w;
        weights[i] = half * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fourier differentiation matrix for `n` uniform nodes `2πj/n` on a circle.
pub fn fourier_diff_matrix(n: usize) -> DMatrix<f64> {
    let h = 2.0 * PI / n as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 0.0;
        }
        let k = i as isize - j as isize;
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let arg = 0.5 * k as f64 * h;
        if n.is_multiple_of(2) {
            0.5 * sign / arg.tan()
        } else {
            0.5 * sign / arg.sin()
        }
    })
}

/// Differentiation matrix of the interpolating polynomial through `nodes`.
pub fn lagrange_diff_matrix(nodes: &[f64]) -> DMatrix<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] /= nodes[j] - nodes[k];
            }
        }
    }
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// Central first derivative with one level of Richardson extrapolation.
pub fn richardson_d1<F>(f: F, h: f64) -> DVector<f64>
where
    F: Fn(f64) -> DVector<f64>,
{
    let d_h = (f(h) - f(-h)) / (2.0 * h);
    let d_h2 = (f(0.5 * h) - f(-0.5 * h)) / h;
    (4.0 * d_h2 - d_h) / 3.0
}

/// Central second derivative with one level of Richardson extrapolation.
pub fn richardson_d2<F>(f: F, h: f64) -> DVector<f64>
where
    F: Fn(f64) -> DVector<f64>,
{
    let f0 = f(0.0);
    let s_h = (f(h) - &f0 * 2.0 + f(-h)) / (h * h);
    let hh = 0.5 * h;
    let s_h2 = (f(hh) - &f0 * 2.0 + f(-hh)) / (hh * hh);
    (4.0 * s_h2 - s_h) / 3.0
}

/// Orthonormalizes the columns of `m` (modified Gram–Schmidt, two passes).
/// Columns whose residual norm falls below `tol` relative to their input norm are dropped.
pub fn orthonormalize_columns(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dot(&v);
                v.axpy(-proj, c, 1.0);
            }
        }
        let nv = v.norm();
        if nv > tol * norm0 {
            cols.push(v / nv);
        }
    }
    if cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

/// Orthonormal basis of the orthogonal complement of the column span of `q`
/// (which must already have orthonormal columns) inside `R^dim`.
pub fn orthogonal_complement(q: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let mut all = DMatrix::zeros(dim, q.ncols() + dim);
    all.columns_mut(0, q.ncols()).copy_from(q);
    all.columns_mut(q.ncols(), dim).fill_with_identity();
    let basis = orthonormalize_columns(&all, 1e-8);
    basis.columns(q.ncols(), basis.ncols() - q.ncols()).into_owned()
}

/// Eigen-decomposition of a symmetric matrix with ascending eigenvalues.
pub fn sym_eigen_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn sym_max_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let (vals, _) = sym_eigen_sorted(a);
    vals.last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// Random orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| standard_normal(rng));
    orthonormalize_columns(&g, 1e-12)
}

/// Standard normal deviate via Box–Muller.
pub fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6, 0.0, 2.0);
        // degree 11 is the exactness limit for 6 nodes
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(11)).sum();
        assert!((integral - 2f64.powi(12) / 12.0).abs() < 1e-9);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn fourier_matrix_differentiates_trig_polynomials() {
        for n in [16usize, 17] {
            let d = fourier_diff_matrix(n);
            let h = 2.0 * PI / n as f64;
            let f = DVector::from_fn(n, |i, _| (3.0 * i as f64 * h).sin());
            let df = &d * f;
            for i in 0..n {
                let exact = 3.0 * (3.0 * i as f64 * h).cos();
                assert!((df[i] - exact).abs() < 1e-11, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn lagrange_matrix_differentiates_smooth_functions() {
        let (x, _) = gauss_legendre(24, 0.0, PI);
        let d = lagrange_diff_matrix(&x);
        let f = DVector::from_iterator(x.len(), x.iter().map(|t| (2.0 * t).sin()));
        let df = &d * f;
        for (i, t) in x.iter().enumerate() {
            assert!((df[i] - 2.0 * (2.0 * t).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn richardson_derivatives_are_accurate() {
        let f = |t: f64| DVector::from_vec(vec![(1.0 + t).exp()]);
        let d1 = richardson_d1(f, 1e-3);
        let d2 = richardson_d2(f, 1e-2);
        let e = std::f64::consts::E;
        assert!((d1[0] - e).abs() < 1e-11);
        assert!((d2[0] - e).abs() < 1e-8);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let q = orthonormalize_columns(
            &DMatrix::from_column_slice(4, 2, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0]),
            1e-12,
        );
        let c = orthogonal_complement(&q, 4);
        assert_eq!(c.ncols(), 2);
        assert!((q.transpose() * &c).norm() < 1e-14);
        assert!((c.transpose() * &c - DMatrix::<f64>::identity(2, 2)).norm() < 1e-14);
    }
}
