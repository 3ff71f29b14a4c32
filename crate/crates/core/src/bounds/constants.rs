//! Index-versus-Betti constants of the gallery theorems, as exact rationals,
//! and their closure against the general constant `2/(d(d−1))`.

use crate::ambient::AmbientKind;
use crate::error::{LabError, Result};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i64>;

/// Constant `2/(d(d−1))` of the general bound for an embedding in `R^d`.
pub fn general_constant(d: usize) -> Rational {
    let d = d as i64;
    Ratio::new(2, d * (d - 1))
}

/// Families of ambient spaces with a stated constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `S^{n+1} ⊂ R^{n+2}`; non-totally-geodesic hypersurfaces gain `n + 2`.
    Sphere { n: usize },
    RealProjective { n: usize },
    /// `S¹ × S^n ⊂ R^{n+3}`, `n ≥ 3`.
    CircleTimesSphere { n: usize },
    /// `CP^m ⊂ R^{(m+1)²}`.
    ComplexProjective { m: usize },
    /// `HP^p ⊂ R^{(2p+1)(p+1)}`.
    QuaternionicProjective { p: usize },
    /// The Cayley plane in `R^27`.
    CayleyPlane,
    /// `S^p × S^q ⊂ R^{p+q+2}`, `(p, q) ≠ (2, 2)`.
    SphereTimesSphere { p: usize, q: usize },
    /// A pinched convex hypersurface `N^{n+1} ⊂ R^{n+2}`.
    ConvexHypersurface { n: usize },
    /// Any other embedding, under the general hypothesis.
    General { d: usize },
}

impl Family {
    /// Euclidean dimension of the embedding used by the theorem.
    pub fn embed_dim(&self) -> usize {
        match *self {
            Family::Sphere { n } | Family::RealProjective { n } | Family::ConvexHypersurface { n } => n + 2,
            Family::CircleTimesSphere { n } => n + 3,
            Family::ComplexProjective { m } => (m + 1) * (m + 1),
            Family::QuaternionicProjective { p } => (2 * p + 1) * (p + 1),
            Family::CayleyPlane => 27,
            Family::SphereTimesSphere { p, q } => p + q + 2,
            Family::General { d } => d,
        }
    }

    /// The constant exactly as the theorem displays it.
    pub fn stated_constant(&self) -> Result<Rational> {
        let c = |num: i64, den: usize| Ratio::new(num, den as i64);
        Ok(match *self {
            Family::Sphere { n } | Family::RealProjective { n } | Family::ConvexHypersurface { n } => {
                c(2, (n + 2) * (n + 1))
            }
            Family::CircleTimesSphere { n } => {
                if n < 3 {
                    return Err(LabError::Incompatible("the circle product bound needs n ≥ 3".into()));
                }
                c(2, (n + 3) * (n + 2))
            }
            Family::ComplexProjective { m } => c(2, m * (m + 2) * (m + 1) * (m + 1)),
            Family::QuaternionicProjective { p } => c(2, (2 * p + 3) * (2 * p + 1) * (p + 1) * p),
            Family::CayleyPlane => c(1, 351),
            Family::SphereTimesSphere { p, q } => {
                if p < 2 || q < 2 || (p, q) == (2, 2) {
                    return Err(LabError::Incompatible(format!("no bound is claimed for S^{p} × S^{q}")));
                }
                c(2, (p + q + 2) * (p + q + 1))
            }
            Family::General { d } => general_constant(d),
        })
    }

    /// Additive term of the bound (`n + 2` for non-totally-geodesic sphere cases).
    pub fn additive(&self, totally_geodesic: bool) -> usize {
        match *self {
            Family::Sphere { n } if !totally_geodesic => n + 2,
            _ => 0,
        }
    }

    /// The family of a charted ambient kind.
    pub fn of_ambient(kind: &AmbientKind) -> Result<Self> {
        Ok(match kind {
            AmbientKind::Sphere { dim } => Family::Sphere { n: dim - 1 },
            AmbientKind::RealProjective { dim } => Family::RealProjective { n: dim - 1 },
            AmbientKind::CircleTimesSphere { n } => Family::CircleTimesSphere { n: *n },
            AmbientKind::ComplexProjectiveVeronese { m } => Family::ComplexProjective { m: *m },
            AmbientKind::QuaternionicProjectiveVeronese { p } => Family::QuaternionicProjective { p: *p },
            AmbientKind::SphereTimesSphere { p, q } => Family::SphereTimesSphere { p: *p, q: *q },
            AmbientKind::Ellipsoid { semi_axes } => Family::ConvexHypersurface { n: semi_axes.len() - 2 },
            AmbientKind::GenericEmbeddedHypersurface { embed_dim, .. } => Family::General { d: *embed_dim },
        })
    }
}

/// One row of the constant table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantRow {
    pub family: Family,
    pub d: usize,
    /// Rendered as `num/den`.
    pub stated: String,
    pub general: String,
    pub closes: bool,
}

pub fn constant_row(family: Family) -> Result<ConstantRow> {
    let d = family.embed_dim();
    let stated = family.stated_constant()?;
    let general = general_constant(d);
    Ok(ConstantRow { family, d, stated: stated.to_string(), general: general.to_string(), closes: stated == general })
}

/// Every family over a range of parameters.
pub fn constant_table() -> Vec<ConstantRow> {
    let mut families = Vec::new();
    for n in 1..=8 {
        families.push(Family::Sphere { n });
        families.push(Family::RealProjective { n });
        families.push(Family::ConvexHypersurface { n });
    }
    families.extend((3..=8).map(|n| Family::CircleTimesSphere { n }));
    families.extend((2..=6).map(|m| Family::ComplexProjective { m }));
    families.extend((1..=5).map(|p| Family::QuaternionicProjective { p }));
    families.push(Family::CayleyPlane);
    for p in 2..=5 {
        for q in 2..=5 {
            if (p, q) != (2, 2) {
                families.push(Family::SphereTimesSphere { p, q });
            }
        }
    }
    families.into_iter().filter_map(|f| constant_row(f).ok()).collect()
}

/// `⌈c · b⌉ + additive` in exact arithmetic.
pub fn integer_bound(constant: Rational, b1: usize, additive: usize) -> usize {
    (constant * Ratio::from_integer(b1 as i64)).ceil().to_integer() as usize + additive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cp2_constant() {
        let f = Family::ComplexProjective { m: 2 };
        assert_eq!(f.embed_dim(), 9);
        assert_eq!(f.stated_constant().unwrap(), Ratio::new(1, 36));
    }

    #[test]
    fn ceiling_is_exact() {
        assert_eq!(integer_bound(Ratio::new(1, 6), 2, 4), 5);
        assert_eq!(integer_bound(Ratio::new(1, 6), 6, 0), 1);
        assert_eq!(integer_bound(Ratio::new(1, 6), 0, 0), 0);
    }
}
