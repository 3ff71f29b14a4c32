//! Ambient Riemannian manifolds with explicit isometric embeddings into `R^d`.
//!
//! Every curvature quantity is computed from the embedding's second fundamental
//! form through the Gauss equation; analytic curvature formulas are kept only as
//! cross-checks.

pub mod scalars;
pub mod veronese;

use crate::error::{LabError, Result};
use crate::numerics::{orthogonal_complement, richardson_d1, richardson_d2, standard_normal};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scalars::Quaternion;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use veronese::Veronese;

/// Relative tolerance for accepting a vector as tangent.
pub const TANGENCY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbientKind {
    /// Unit sphere `S^dim ⊂ R^{dim+1}`.
    Sphere { dim: usize },
    /// `RP^dim`, carried by its sphere cover and the antipodal map.
    RealProjective { dim: usize },
    ComplexProjectiveVeronese { m: usize },
    QuaternionicProjectiveVeronese { p: usize },
    /// `S¹ × S^n` with unit factors.
    CircleTimesSphere { n: usize },
    SphereTimesSphere { p: usize, q: usize },
    Ellipsoid { semi_axes: Vec<f64> },
    /// A level set `{F = 0}` of a user function on `R^d`.
    GenericEmbeddedHypersurface { name: String, embed_dim: usize },
}

impl fmt::Display for AmbientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientKind::Sphere { dim } => write!(f, "S^{dim}"),
            AmbientKind::RealProjective { dim } => write!(f, "RP^{dim}"),
            AmbientKind::ComplexProjectiveVeronese { m } => write!(f, "CP^{m}"),
            AmbientKind::QuaternionicProjectiveVeronese { p } => write!(f, "HP^{p}"),
            AmbientKind::CircleTimesSphere { n } => write!(f, "S^1xS^{n}"),
            AmbientKind::SphereTimesSphere { p, q } => write!(f, "S^{p}xS^{q}"),
            AmbientKind::Ellipsoid { semi_axes } => write!(f, "Ellipsoid{semi_axes:?}"),
            AmbientKind::GenericEmbeddedHypersurface { name, .. } => write!(f, "LevelSet({name})"),
        }
    }
}

type LevelFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

#[derive(Clone)]
enum LevelSet {
    Ellipsoid(Vec<f64>),
    Generic(LevelFn),
}

impl LevelSet {
    fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            LevelSet::Ellipsoid(a) => {
                x.iter().zip(a).map(|(xi, ai)| (xi / ai).powi(2)).sum::<f64>() - 1.0
            }
            LevelSet::Generic(f) => f(x),
        }
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            LevelSet::Ellipsoid(a) => DVector::from_fn(x.len(), |i, _| 2.0 * x[i] / (a[i] * a[i])),
            LevelSet::Generic(f) => DVector::from_fn(x.len(), |i, _| {
                let d = richardson_d1(
                    |t| {
                        let mut y = x.clone();
                        y[i] += t;
                        DVector::from_element(1, f(&y))
                    },
                    1e-5,
                );
                d[0]
            }),
        }
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match self {
            LevelSet::Ellipsoid(a) => {
                DMatrix::from_diagonal(&DVector::from_fn(x.len(), |i, _| 2.0 / (a[i] * a[i])))
            }
            LevelSet::Generic(f) => {
                let n = x.len();
                let mut h = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let mut dir = DVector::zeros(n);
                        dir[i] += 1.0;
                        dir[j] += 1.0;
                        let s = dir.norm_squared();
                        // second directional derivative along e_i + e_j, polarized below
                        let d2 = richardson_d2(
                            |t| DVector::from_element(1, f(&(x + &dir * t))),
                            1e-3,
                        )[0];
                        h[(i, j)] = d2 / s;
                    }
                }
                // h holds D²F(e_i+e_j)/|e_i+e_j|²; recover mixed partials
                let diag: Vec<f64> = (0..n).map(|i| h[(i, i)]).collect();
                let mut out = DMatrix::zeros(n, n);
                for i in 0..n {
                    out[(i, i)] = diag[i];
                    for j in (i + 1)..n {
                        let full = h[(i, j)] * 2.0;
                        let v = 0.5 * (full - diag[i] - diag[j]);
                        out[(i, j)] = v;
                        out[(j, i)] = v;
                    }
                }
                out
            }
        }
    }

    /// Newton projection onto `{F = 0}` along the gradient.
    fn project(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut x = y.clone();
        for _ in 0..60 {
            let fx = self.value(&x);
            if fx.abs() < 1e-15 {
                break;
            }
            let g = self.gradient(&x);
            x -= g.clone() * (fx / g.norm_squared());
        }
        x
    }
}

#[derive(Clone)]
enum Geometry {
    /// Unit sphere in `R^d`.
    Sphere,
    /// Product of unit spheres occupying consecutive coordinate blocks `(offset, len)`.
    Product(Vec<(usize, usize)>),
    Complex(Veronese<Complex64>),
    Quaternionic(Veronese<Quaternion>),
    Level(LevelSet),
}

/// A point of an ambient model: its position in `R^d` and its lift
/// (homogeneous coordinates for Veronese kinds, the position otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientPoint {
    pub position: DVector<f64>,
    pub lift: DVector<f64>,
}

/// A Riemannian manifold with an explicit isometric embedding.
#[derive(Clone)]
pub struct AmbientModel {
    kind: AmbientKind,
    intrinsic_dim: usize,
    embed_dim: usize,
    geometry: Geometry,
}

impl fmt::Debug for AmbientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmbientModel")
            .field("kind", &self.kind)
            .field("intrinsic_dim", &self.intrinsic_dim)
            .field("embed_dim", &self.embed_dim)
            .finish()
    }
}

/// Builds an ambient model; generic level sets use [`AmbientModel::level_set`].
pub fn make_ambient(kind: AmbientKind) -> Result<AmbientModel> {
    let bad = |msg: String| Err(LabError::InvalidDimension(msg));
    let (intrinsic_dim, embed_dim, geometry) = match &kind {
        AmbientKind::Sphere { dim } | AmbientKind::RealProjective { dim } => {
            if *dim < 2 {
                return bad(format!("{kind} needs dimension >= 2"));
            }
            (*dim, dim + 1, Geometry::Sphere)
        }
        AmbientKind::ComplexProjectiveVeronese { m } => {
            if *m < 1 {
                return bad("CP^m needs m >= 1".into());
            }
            let v = Veronese::<Complex64>::new(m + 1);
            (v.intrinsic_dim(), v.embed_dim(), Geometry::Complex(v))
        }
        AmbientKind::QuaternionicProjectiveVeronese { p } => {
            if *p < 1 {
                return bad("HP^p needs p >= 1".into());
            }
            let v = Veronese::<Quaternion>::new(p + 1);
            (v.intrinsic_dim(), v.embed_dim(), Geometry::Quaternionic(v))
        }
        AmbientKind::CircleTimesSphere { n } => {
            if *n < 1 {
                return bad("S^1 x S^n needs n >= 1".into());
            }
            (n + 1, n + 3, Geometry::Product(vec![(0, 2), (2, n + 1)]))
        }
        AmbientKind::SphereTimesSphere { p, q } => {
            if *p < 1 || *q < 1 {
                return bad("S^p x S^q needs p, q >= 1".into());
            }
            (p + q, p + q + 2, Geometry::Product(vec![(0, p + 1), (p + 1, q + 1)]))
        }
        AmbientKind::Ellipsoid { semi_axes } => {
            if semi_axes.len() < 3 {
                return bad("ellipsoid needs at least 3 semi-axes".into());
            }
            if semi_axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                return Err(LabError::ChartDomain("ellipsoid semi-axes must be positive".into()));
            }
            (
                semi_axes.len() - 1,
                semi_axes.len(),
                Geometry::Level(LevelSet::Ellipsoid(semi_axes.clone())),
            )
        }
        AmbientKind::GenericEmbeddedHypersurface { .. } => {
            return Err(LabError::Incompatible(
                "generic level sets are built with AmbientModel::level_set".into(),
            ))
        }
    };
    Ok(AmbientModel { kind, intrinsic_dim, embed_dim, geometry })
}

impl AmbientModel {
    /// Hypersurface `{F = 0}` in `R^embed_dim`, star-shaped about the origin.
    pub fn level_set<F>(name: &str, embed_dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    {
        if embed_dim < 3 {
            return Err(LabError::InvalidDimension("level set needs embed_dim >= 3".into()));
        }
        Ok(Self {
            kind: AmbientKind::GenericEmbeddedHypersurface { name: name.into(), embed_dim },
            intrinsic_dim: embed_dim - 1,
            embed_dim,
            geometry: Geometry::Level(LevelSet::Generic(Arc::new(f))),
        })
    }

    pub fn kind(&self) -> &AmbientKind {
        &self.kind
    }

    /// Dimension `n + 1` of the ambient manifold.
    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    /// Dimension `d` of the Euclidean target.
    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn has_complex_structure(&self) -> bool {
        matches!(self.geometry, Geometry::Complex(_))
    }

    pub fn is_veronese(&self) -> bool {
        matches!(self.geometry, Geometry::Complex(_) | Geometry::Quaternionic(_))
    }

    pub fn has_outward_normal(&self) -> bool {
        matches!(self.geometry, Geometry::Level(_))
    }

    /// Einstein constant `K` with `Ric = K g`, when the model is Einstein.
    pub fn einstein_constant(&self) -> Option<f64> {
        let n1 = self.intrinsic_dim as f64;
        match &self.kind {
            AmbientKind::Sphere { .. } | AmbientKind::RealProjective { .. } => Some(n1 - 1.0),
            AmbientKind::ComplexProjectiveVeronese { .. } => Some(n1 + 2.0),
            AmbientKind::QuaternionicProjectiveVeronese { .. } => Some(n1 + 8.0),
            AmbientKind::SphereTimesSphere { p, q } if p == q => Some(*p as f64 - 1.0),
            _ => None,
        }
    }

    /// Length of the lift vector accepted by [`AmbientModel::point_from_lift`].
    pub fn lift_dim(&self) -> usize {
        match &self.geometry {
            Geometry::Complex(v) => v.lift_dim(),
            Geometry::Quaternionic(v) => v.lift_dim(),
            _ => self.embed_dim,
        }
    }

    /// Chart: maps a lift (homogeneous coordinates, or a point of `R^d` near the
    /// model) to the model, normalizing as needed.
    pub fn point_from_lift(&self, lift: &DVector<f64>) -> Result<AmbientPoint> {
        if lift.len() != self.lift_dim() || lift.iter().any(|x| !x.is_finite()) {
            return Err(LabError::ChartDomain(format!(
                "lift of length {} for {}",
                lift.len(),
                self.kind
            )));
        }
        let point = match &self.geometry {
            Geometry::Sphere => {
                let nrm = lift.norm();
                if nrm == 0.0 {
                    return Err(LabError::ChartDomain("zero vector".into()));
                }
                let x = lift / nrm;
                AmbientPoint { position: x.clone(), lift: x }
            }
            Geometry::Product(blocks) => {
                let mut x = lift.clone();
                for &(o, l) in blocks {
                    let nrm = x.rows(o, l).norm();
                    if nrm == 0.0 {
                        return Err(LabError::ChartDomain("zero factor".into()));
                    }
                    x.rows_mut(o, l).unscale_mut(nrm);
                }
                AmbientPoint { position: x.clone(), lift: x }
            }
            Geometry::Complex(v) => {
                let z = normalized(lift)?;
                AmbientPoint { position: v.embed(&z), lift: z }
            }
            Geometry::Quaternionic(v) => {
                let z = normalized(lift)?;
                AmbientPoint { position: v.embed(&z), lift: z }
            }
            Geometry::Level(ls) => {
                let x = ls.project(lift);
                if ls.value(&x).abs() > 1e-10 {
                    return Err(LabError::ChartDomain("projection onto level set failed".into()));
                }
                AmbientPoint { position: x.clone(), lift: x }
            }
        };
        Ok(point)
    }

    /// Uniform-ish random point (exactly uniform for spheres and projective spaces).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> AmbientPoint {
        let g = DVector::from_fn(self.lift_dim(), |_, _| standard_normal(rng));
        let lift = match &self.geometry {
            Geometry::Level(LevelSet::Ellipsoid(a)) => {
                let u = &g / g.norm();
                DVector::from_fn(u.len(), |i, _| a[i] * u[i])
            }
            Geometry::Level(_) => &g / g.norm(),
            _ => g,
        };
        self.point_from_lift(&lift).expect("random lift is in the chart domain")
    }

    /// Residual measuring how far `p` is from the model variety.
    pub fn variety_residual(&self, p: &AmbientPoint) -> f64 {
        match &self.geometry {
            Geometry::Sphere => (p.position.norm() - 1.0).abs(),
            Geometry::Product(blocks) => blocks
                .iter()
                .map(|&(o, l)| (p.position.rows(o, l).norm() - 1.0).abs())
                .fold(0.0, f64::max),
            Geometry::Complex(v) => v
                .variety_residual(&p.position)
                .max((v.embed(&p.lift) - &p.position).norm()),
            Geometry::Quaternionic(v) => v
                .variety_residual(&p.position)
                .max((v.embed(&p.lift) - &p.position).norm()),
            Geometry::Level(ls) => ls.value(&p.position).abs(),
        }
    }

    /// Orthonormal basis of `T_p N` as columns in `R^d`.
    pub fn tangent_basis(&self, p: &AmbientPoint) -> DMatrix<f64> {
        match &self.geometry {
            Geometry::Sphere => sphere_tangent(&p.position),
            Geometry::Product(blocks) => {
                let d = self.embed_dim;
                let mut cols = Vec::new();
                for &(o, l) in blocks {
                    let t = sphere_tangent(&p.position.rows(o, l).into_owned());
                    for c in t.column_iter() {
                        let mut v = DVector::zeros(d);
                        v.rows_mut(o, l).copy_from(&c);
                        cols.push(v);
                    }
                }
                DMatrix::from_columns(&cols)
            }
            Geometry::Complex(v) => v.tangent_basis(&p.lift),
            Geometry::Quaternionic(v) => v.tangent_basis(&p.lift),
            Geometry::Level(ls) => {
                let g = ls.gradient(&p.position);
                sphere_tangent(&(g.clone() / g.norm()))
            }
        }
    }

    /// Orthonormal basis of the normal space of the embedding at `p`.
    pub fn normal_basis(&self, p: &AmbientPoint) -> DMatrix<f64> {
        orthogonal_complement(&self.tangent_basis(p), self.embed_dim)
    }

    /// Orthogonal projection of an `R^d` vector onto `T_p N`.
    pub fn project_tangent(&self, p: &AmbientPoint, v: &DVector<f64>) -> DVector<f64> {
        match &self.geometry {
            Geometry::Sphere => v - &p.position * p.position.dot(v),
            Geometry::Product(blocks) => {
                let mut out = v.clone();
                for &(o, l) in blocks {
                    let x = p.position.rows(o, l).into_owned();
                    let c = x.dot(&v.rows(o, l));
                    out.rows_mut(o, l).axpy(-c, &x, 1.0);
                }
                out
            }
            Geometry::Complex(m) => m.differential(&p.lift, &m.horizontal_lift(&p.lift, v)),
            Geometry::Quaternionic(m) => m.differential(&p.lift, &m.horizontal_lift(&p.lift, v)),
            Geometry::Level(ls) => {
                let g = ls.gradient(&p.position);
                v - &g * (g.dot(v) / g.norm_squared())
            }
        }
    }

    /// Distance of `x` from `T_p N`.
    pub fn tangency_residual(&self, p: &AmbientPoint, x: &DVector<f64>) -> f64 {
        (self.project_tangent(p, x) - x).norm()
    }

    fn check_tangent(&self, p: &AmbientPoint, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.embed_dim {
            return Err(LabError::InvalidDimension(format!(
                "vector of length {} in R^{}",
                x.len(),
                self.embed_dim
            )));
        }
        let residual = self.tangency_residual(p, x);
        if residual > TANGENCY_TOL * x.norm().max(1.0) {
            return Err(LabError::TangencyViolation { residual });
        }
        Ok(())
    }

    /// Second fundamental form of `N ⊂ R^d`: the normal part of `D_X Y`.
    pub fn second_fundamental_form(
        &self,
        p: &AmbientPoint,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.check_tangent(p, x)?;
        self.check_tangent(p, y)?;
        Ok(self.ii_unchecked(p, x, y))
    }

    pub(crate) fn ii_unchecked(
        &self,
        p: &AmbientPoint,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> DVector<f64> {
        match &self.geometry {
            Geometry::Sphere => -&p.position * x.dot(y),
            Geometry::Product(blocks) => {
                let mut out = DVector::zeros(self.embed_dim);
                for &(o, l) in blocks {
                    let c = x.rows(o, l).dot(&y.rows(o, l));
                    out.rows_mut(o, l).axpy(-c, &p.position.rows(o, l), 1.0);
                }
                out
            }
            Geometry::Complex(v) => v.second_fundamental_form(&p.lift, x, y),
            Geometry::Quaternionic(v) => v.second_fundamental_form(&p.lift, x, y),
            Geometry::Level(ls) => {
                let g = ls.gradient(&p.position);
                let gn = g.norm();
                let h = ls.hessian(&p.position);
                let c = x.dot(&(&h * y)) / gn;
                -(g / gn) * c
            }
        }
    }

    /// Complex structures applied to `x`: `[J x]` for CP, `[I x, J x, K x]` for HP.
    pub fn complex_structures(&self, p: &AmbientPoint, x: &DVector<f64>) -> Vec<DVector<f64>> {
        match &self.geometry {
            Geometry::Complex(v) => v.structures(&p.lift, x),
            Geometry::Quaternionic(v) => v.structures(&p.lift, x),
            _ => Vec::new(),
        }
    }

    /// The Kähler complex structure `J x`, present for CP only.
    pub fn complex_structure(&self, p: &AmbientPoint, x: &DVector<f64>) -> Option<DVector<f64>> {
        match &self.geometry {
            Geometry::Complex(v) => v.structures(&p.lift, x).pop(),
            _ => None,
        }
    }

    /// `Rm(X,Y,X,Y) = ⟨II(X,X),II(Y,Y)⟩ − |II(X,Y)|²`.
    pub fn riemann_xyxy(&self, p: &AmbientPoint, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_tangent(p, x)?;
        self.check_tangent(p, y)?;
        Ok(self.rm_unchecked(p, x, y))
    }

    pub(crate) fn rm_unchecked(&self, p: &AmbientPoint, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let xx = self.ii_unchecked(p, x, x);
        let yy = self.ii_unchecked(p, y, y);
        let xy = self.ii_unchecked(p, x, y);
        xx.dot(&yy) - xy.norm_squared()
    }

    /// `Ric(X,X) = Σ_k Rm(e_k,X,e_k,X)` over an orthonormal frame completing `X`.
    pub fn ricci(&self, p: &AmbientPoint, x: &DVector<f64>) -> Result<f64> {
        self.check_tangent(p, x)?;
        let nx = x.norm();
        if nx < 1e-300 {
            return Err(LabError::Degenerate("cannot complete a frame from X = 0".into()));
        }
        let t = self.tangent_basis(p);
        let mut first = DMatrix::zeros(self.embed_dim, 1);
        first.set_column(0, &(x / nx));
        let rest = orthogonal_complement(&first, self.embed_dim);
        // completion of X inside T_p N: project the complement onto the tangent span
        let mut cols = vec![x / nx];
        for c in rest.column_iter() {
            let v = &t * (t.transpose() * c);
            cols.push(v);
        }
        let frame = crate::numerics::orthonormalize_columns(&DMatrix::from_columns(&cols), 1e-6);
        if frame.ncols() != self.intrinsic_dim {
            return Err(LabError::Degenerate("frame completion lost rank".into()));
        }
        Ok(frame
            .column_iter()
            .skip(1)
            .map(|e| self.rm_unchecked(p, &e.into_owned(), x))
            .sum())
    }

    /// Ricci in a given orthonormal tangent frame (no tangency checks).
    pub(crate) fn ricci_in_frame(&self, p: &AmbientPoint, frame: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
        frame
            .column_iter()
            .map(|e| self.rm_unchecked(p, &e.into_owned(), x))
            .sum()
    }

    /// Scalar curvature `R = Σ_{k,l} Rm(e_k,e_l,e_k,e_l)`.
    pub fn scalar_curvature(&self, p: &AmbientPoint) -> f64 {
        let t = self.tangent_basis(p);
        let mut r = 0.0;
        for k in 0..t.ncols() {
            for l in 0..t.ncols() {
                if k != l {
                    r += self.rm_unchecked(p, &t.column(k).into_owned(), &t.column(l).into_owned());
                }
            }
        }
        r
    }

    /// Mean curvature vector `H⃗ = Σ_k II(e_k,e_k)` of `N ⊂ R^d`.
    pub fn mean_curvature_vector(&self, p: &AmbientPoint) -> DVector<f64> {
        let t = self.tangent_basis(p);
        t.column_iter().fold(DVector::zeros(self.embed_dim), |acc, e| {
            let e = e.into_owned();
            acc + self.ii_unchecked(p, &e, &e)
        })
    }

    /// `|II|² = Σ_{k,l} |II(e_k,e_l)|²`.
    pub fn ii_norm_squared(&self, p: &AmbientPoint) -> f64 {
        let t = self.tangent_basis(p);
        let mut s = 0.0;
        for k in 0..t.ncols() {
            for l in 0..t.ncols() {
                s += self
                    .ii_unchecked(p, &t.column(k).into_owned(), &t.column(l).into_owned())
                    .norm_squared();
            }
        }
        s
    }

    /// Closed-form `Rm(X,Y,X,Y)` where the kind has one.
    pub fn analytic_riemann_xyxy(
        &self,
        p: &AmbientPoint,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Option<f64> {
        let base = |a: &DVector<f64>, b: &DVector<f64>| {
            a.norm_squared() * b.norm_squared() - a.dot(b).powi(2)
        };
        match &self.geometry {
            Geometry::Sphere => Some(base(x, y)),
            Geometry::Product(blocks) => Some(
                blocks
                    .iter()
                    .map(|&(o, l)| base(&x.rows(o, l).into_owned(), &y.rows(o, l).into_owned()))
                    .sum(),
            ),
            Geometry::Complex(_) | Geometry::Quaternionic(_) => {
                let extra: f64 = self
                    .complex_structures(p, y)
                    .iter()
                    .map(|jy| x.dot(jy).powi(2))
                    .sum();
                Some(base(x, y) + 3.0 * extra)
            }
            Geometry::Level(ls) => {
                let g = ls.gradient(&p.position).norm();
                let h = ls.hessian(&p.position);
                let s = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(&h * b)) / g;
                Some(s(x, x) * s(y, y) - s(x, y).powi(2))
            }
        }
    }

    /// Outward unit normal `ν` of a level-set model.
    pub fn outward_normal(&self, p: &AmbientPoint) -> Option<DVector<f64>> {
        match &self.geometry {
            Geometry::Level(ls) => {
                let g = ls.gradient(&p.position);
                Some(&g / g.norm())
            }
            _ => None,
        }
    }

    /// Shape operator `S = Dν` of a level-set model in the tangent basis at `p`.
    pub fn shape_operator(&self, p: &AmbientPoint) -> Option<DMatrix<f64>> {
        match &self.geometry {
            Geometry::Level(ls) => {
                let g = ls.gradient(&p.position).norm();
                let t = self.tangent_basis(p);
                let s = t.transpose() * ls.hessian(&p.position) * &t / g;
                Some((&s + s.transpose()) * 0.5)
            }
            _ => None,
        }
    }

    /// Principal curvatures `k_1 ≤ … ≤ k_{n+1}` of a level-set model.
    pub fn principal_curvatures(&self, p: &AmbientPoint) -> Option<Vec<f64>> {
        self.shape_operator(p)
            .map(|s| crate::numerics::sym_eigen_sorted(&s).0)
    }

    /// A curve through `p` with initial velocity `x`, staying on the model.
    pub fn curve(&self, p: &AmbientPoint, x: &DVector<f64>, t: f64) -> AmbientPoint {
        let lift = match &self.geometry {
            Geometry::Complex(v) => &p.lift + v.horizontal_lift(&p.lift, x) * t,
            Geometry::Quaternionic(v) => &p.lift + v.horizontal_lift(&p.lift, x) * t,
            _ => &p.position + x * t,
        };
        self.point_from_lift(&lift).expect("curve stays in the chart domain")
    }

    /// Differential of the chart at the lift of `p`, applied to a lift-space vector.
    pub fn lift_differential(&self, p: &AmbientPoint, v: &DVector<f64>) -> DVector<f64> {
        match &self.geometry {
            Geometry::Complex(m) => m.differential(&p.lift, v),
            Geometry::Quaternionic(m) => m.differential(&p.lift, v),
            _ => v.clone(),
        }
    }

    /// Oriented basis of the normal space of `N ⊂ R^d` where one is canonical
    /// (position for spheres, factor positions for products, `ν` for level sets).
    pub fn oriented_normals(&self, p: &AmbientPoint) -> Option<DMatrix<f64>> {
        match &self.geometry {
            Geometry::Sphere => Some(DMatrix::from_columns(std::slice::from_ref(&p.position))),
            Geometry::Product(blocks) => {
                let cols: Vec<DVector<f64>> = blocks
                    .iter()
                    .map(|&(o, l)| {
                        let mut v = DVector::zeros(self.embed_dim);
                        v.rows_mut(o, l).copy_from(&p.position.rows(o, l));
                        v
                    })
                    .collect();
                Some(DMatrix::from_columns(&cols))
            }
            Geometry::Level(_) => self.outward_normal(p).map(|v| DMatrix::from_columns(&[v])),
            _ => None,
        }
    }

    /// Samples `count` random points with random orthonormal tangent pairs.
    pub fn sample_pairs(
        &self,
        count: usize,
        seed: u64,
    ) -> Vec<(AmbientPoint, DVector<f64>, DVector<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let p = self.random_point(&mut rng);
                let t = self.tangent_basis(&p);
                let (x, y) = random_orthonormal_pair(&t, &mut rng);
                (p, x, y)
            })
            .collect()
    }

    pub fn verify_model_identities(&self, sample_count: usize, seed: u64) -> IdentityReport {
        identities::verify(self, sample_count, seed)
    }
}

mod identities;
pub use identities::IdentityReport;

fn normalized(v: &DVector<f64>) -> Result<DVector<f64>> {
    let n = v.norm();
    if n == 0.0 {
        return Err(LabError::ChartDomain("zero homogeneous coordinates".into()));
    }
    Ok(v / n)
}

fn sphere_tangent(x: &DVector<f64>) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(x.len(), 1);
    q.set_column(0, x);
    orthogonal_complement(&q, x.len())
}

/// Random orthonormal pair in the column span of an orthonormal basis `t`.
pub fn random_orthonormal_pair<R: Rng + ?Sized>(
    t: &DMatrix<f64>,
    rng: &mut R,
) -> (DVector<f64>, DVector<f64>) {
    let k = t.ncols();
    let a = DVector::from_fn(k, |_, _| standard_normal(rng));
    let mut b = DVector::from_fn(k, |_, _| standard_normal(rng));
    let a = &a / a.norm();
    b -= &a * a.dot(&b);
    let b = &b / b.norm();
    (t * a, t * b)
}
