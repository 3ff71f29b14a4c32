//! Closed-form charts of the catalog minimal hypersurfaces.

use super::grid::Axis;
use crate::ambient::{AmbientKind, AmbientModel, AmbientPoint};
use crate::error::{LabError, Result};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogKind {
    /// Totally geodesic `S^n ⊂ S^{n+1}`.
    EquatorInSphere,
    /// `S¹(1/√2) × S¹(1/√2) ⊂ S³`.
    CliffordTorus,
    /// `S¹(r) × S^{n−1}(s) ⊂ S^{n+1}` with `r² = 1/n`, `s² = 1 − r²`.
    GeneralizedClifford,
    /// `S¹ × S^{n−1} ⊂ S¹ × S^n`.
    CircleTimesEquator,
    /// Geodesic sphere of the given radius about a point of `CP^m`;
    /// `None` selects the minimal radius.
    GeodesicSphereCp { radius: Option<f64> },
    /// The section `{x_axis = 0}` of an ellipsoid.
    EllipsoidSection { axis: usize },
}

/// Mean curvature of the geodesic sphere of radius `r` in `CP^m`.
pub fn geodesic_sphere_mean_curvature(m: usize, r: f64) -> f64 {
    2.0 / (2.0 * r).tan() + (2.0 * m as f64 - 2.0) / r.tan()
}

/// Root of the geodesic-sphere mean curvature in `(0, π/2)`, by bisection.
pub fn minimal_geodesic_radius(m: usize, tol: f64) -> f64 {
    let (mut lo, mut hi) = (1e-9, FRAC_PI_2 - 1e-9);
    // h > 0 near 0 and h < 0 near π/2
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if geodesic_sphere_mean_curvature(m, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Volume of the unit sphere `S^k`.
pub fn sphere_volume(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_volume(k - 2),
    }
}

/// Unit vector in `R^{k+1}` from `k − 1` polar angles followed by one azimuth.
pub fn hyperspherical(angles: &[f64]) -> Vec<f64> {
    let k = angles.len();
    let mut out = vec![0.0; k + 1];
    let mut s = 1.0;
    for (i, a) in angles.iter().enumerate() {
        out[i] = s * a.cos();
        s *= a.sin();
    }
    out[k] = s;
    out
}

fn sphere_axes(k: usize, res: &[usize]) -> Vec<Axis> {
    let mut axes: Vec<Axis> = (0..k - 1).map(|i| Axis::interval(res[i], 0.0, PI)).collect();
    axes.push(Axis::periodic(res[k - 1]));
    axes
}

#[derive(Clone, Debug)]
pub(crate) enum Chart {
    Equator { n: usize },
    Clifford { n: usize, r: f64, s: f64 },
    CircleEquator { n: usize },
    GeodesicSphere { m: usize, radius: f64 },
    EllipsoidSection { semi_axes: Vec<f64>, axis: usize },
}

impl Chart {
    pub(crate) fn new(ambient: &AmbientModel, kind: &CatalogKind) -> Result<Self> {
        let mismatch = || {
            Err(LabError::Incompatible(format!(
                "{kind:?} does not live in {}",
                ambient.kind()
            )))
        };
        let chart = match (kind, ambient.kind()) {
            (
                CatalogKind::EquatorInSphere,
                AmbientKind::Sphere { dim } | AmbientKind::RealProjective { dim },
            ) => Chart::Equator { n: dim - 1 },
            (
                CatalogKind::CliffordTorus,
                AmbientKind::Sphere { dim: 3 } | AmbientKind::RealProjective { dim: 3 },
            ) => Chart::Clifford { n: 2, r: 0.5f64.sqrt(), s: 0.5f64.sqrt() },
            (
                CatalogKind::GeneralizedClifford,
                AmbientKind::Sphere { dim } | AmbientKind::RealProjective { dim },
            ) => {
                let n = dim - 1;
                let r = (1.0 / n as f64).sqrt();
                Chart::Clifford { n, r, s: (1.0 - r * r).sqrt() }
            }
            (CatalogKind::CircleTimesEquator, AmbientKind::CircleTimesSphere { n }) if *n >= 2 => {
                Chart::CircleEquator { n: *n }
            }
            (CatalogKind::GeodesicSphereCp { radius }, AmbientKind::ComplexProjectiveVeronese { m })
                if *m >= 2 =>
            {
                let radius = radius.unwrap_or_else(|| minimal_geodesic_radius(*m, 1e-13));
                if !(radius > 0.0 && radius < FRAC_PI_2) {
                    return Err(LabError::ChartDomain(format!(
                        "geodesic radius {radius} outside (0, π/2)"
                    )));
                }
                Chart::GeodesicSphere { m: *m, radius }
            }
            (CatalogKind::EllipsoidSection { axis }, AmbientKind::Ellipsoid { semi_axes })
                if *axis < semi_axes.len() =>
            {
                Chart::EllipsoidSection { semi_axes: semi_axes.clone(), axis: *axis }
            }
            _ => return mismatch(),
        };
        Ok(chart)
    }

    pub(crate) fn dim(&self) -> usize {
        match self {
            Chart::Equator { n } | Chart::Clifford { n, .. } | Chart::CircleEquator { n } => *n,
            Chart::GeodesicSphere { m, .. } => 2 * m - 1,
            Chart::EllipsoidSection { semi_axes, .. } => semi_axes.len() - 2,
        }
    }

    pub(crate) fn default_resolution(&self) -> Vec<usize> {
        match self {
            Chart::Clifford { n: 2, .. } => vec![64, 64],
            Chart::GeodesicSphere { .. } => vec![16; self.dim()],
            _ => vec![24; self.dim()],
        }
    }

    /// Minimum points per axis: interval axes need 2, periodic axes 4.
    pub(crate) fn axes(&self, res: &[usize]) -> Result<Vec<Axis>> {
        let n = self.dim();
        if res.len() != n {
            return Err(LabError::ResolutionTooSmall(format!(
                "expected {n} axis resolutions, got {}",
                res.len()
            )));
        }
        if let Some(r) = res.iter().find(|&&r| r < 2) {
            return Err(LabError::ResolutionTooSmall(format!("axis with {r} points")));
        }
        let axes = match self {
            Chart::Equator { n } => sphere_axes(*n, res),
            Chart::EllipsoidSection { .. } => sphere_axes(n, res),
            Chart::Clifford { n, .. } | Chart::CircleEquator { n } => {
                let mut axes = vec![Axis::periodic(res[0])];
                axes.extend(sphere_axes(n - 1, &res[1..]));
                axes
            }
            Chart::GeodesicSphere { m, .. } => {
                if *m == 2 {
                    vec![
                        Axis::interval(res[0], 0.0, FRAC_PI_2),
                        Axis::periodic(res[1]),
                        Axis::periodic(res[2]),
                    ]
                } else {
                    sphere_axes(2 * m - 1, res)
                }
            }
        };
        for ax in &axes {
            let min = match ax.kind {
                super::grid::AxisKind::Periodic => 4,
                super::grid::AxisKind::Interval => 2,
            };
            if ax.len() < min {
                return Err(LabError::ResolutionTooSmall(format!(
                    "axis with {} points (minimum {min})",
                    ax.len()
                )));
            }
        }
        Ok(axes)
    }

    /// Chart value: the ambient point and the unit normal at parameters `t`.
    pub(crate) fn eval(&self, ambient: &AmbientModel, t: &[f64]) -> (AmbientPoint, DVector<f64>) {
        let d = ambient.embed_dim();
        match self {
            Chart::Equator { n } => {
                let mut x = DVector::zeros(d);
                x.rows_mut(0, n + 1).copy_from_slice(&hyperspherical(t));
                let mut nrm = DVector::zeros(d);
                nrm[n + 1] = 1.0;
                (point(&x), nrm)
            }
            Chart::Clifford { r, s, .. } => {
                let y = hyperspherical(&t[1..]);
                let mut x = DVector::zeros(d);
                let mut nrm = DVector::zeros(d);
                x[0] = r * t[0].cos();
                x[1] = r * t[0].sin();
                nrm[0] = s * t[0].cos();
                nrm[1] = s * t[0].sin();
                for (i, yi) in y.iter().enumerate() {
                    x[2 + i] = s * yi;
                    nrm[2 + i] = -r * yi;
                }
                (point(&x), nrm)
            }
            Chart::CircleEquator { n } => {
                let y = hyperspherical(&t[1..]);
                let mut x = DVector::zeros(d);
                x[0] = t[0].cos();
                x[1] = t[0].sin();
                for (i, yi) in y.iter().enumerate() {
                    x[2 + i] = *yi;
                }
                let mut nrm = DVector::zeros(d);
                nrm[n + 2] = 1.0;
                (point(&x), nrm)
            }
            Chart::GeodesicSphere { m, radius } => {
                let w: Vec<f64> = if *m == 2 {
                    let (a, p1, p2) = (t[0], t[1], t[2]);
                    vec![a.cos() * p1.cos(), a.cos() * p1.sin(), a.sin() * p2.cos(), a.sin() * p2.sin()]
                } else {
                    hyperspherical(t)
                };
                let (sr, cr) = radius.sin_cos();
                let len = 2 * (m + 1);
                let mut z = DVector::zeros(len);
                let mut v = DVector::zeros(len);
                z[0] = cr;
                v[0] = -sr;
                for (i, wi) in w.iter().enumerate() {
                    z[2 + i] = sr * wi;
                    v[2 + i] = cr * wi;
                }
                let p = ambient.point_from_lift(&z).expect("unit lift");
                let nrm = ambient.lift_differential(&p, &v);
                (p, nrm)
            }
            Chart::EllipsoidSection { semi_axes, axis } => {
                let y = hyperspherical(t);
                let mut x = DVector::zeros(d);
                let mut k = 0;
                for (j, a) in semi_axes.iter().enumerate() {
                    if j != *axis {
                        x[j] = a * y[k];
                        k += 1;
                    }
                }
                let mut nrm = DVector::zeros(d);
                nrm[*axis] = 1.0;
                (point(&x), nrm)
            }
        }
    }

    /// Parameter axes whose differentials are parallel harmonic 1-forms; their
    /// count is the first Betti number of the hypersurface.
    pub(crate) fn harmonic_axes(&self) -> Vec<usize> {
        match self {
            Chart::Clifford { n: 2, .. } | Chart::CircleEquator { n: 2 } => vec![0, 1],
            Chart::Clifford { .. } | Chart::CircleEquator { .. } | Chart::Equator { n: 1 } => {
                vec![0]
            }
            _ => vec![],
        }
    }

    pub(crate) fn analytic_volume(&self) -> Option<f64> {
        match self {
            Chart::Equator { n } => Some(sphere_volume(*n)),
            Chart::Clifford { n, r, s } => {
                Some(2.0 * PI * r * sphere_volume(n - 1) * s.powi(*n as i32 - 1))
            }
            Chart::CircleEquator { n } => Some(2.0 * PI * sphere_volume(n - 1)),
            Chart::GeodesicSphere { m, radius } => Some(
                sphere_volume(2 * m - 1) * radius.sin().powi(2 * *m as i32 - 1) * radius.cos(),
            ),
            Chart::EllipsoidSection { .. } => None,
        }
    }
}

fn point(x: &DVector<f64>) -> AmbientPoint {
    AmbientPoint { position: x.clone(), lift: x.clone() }
}
