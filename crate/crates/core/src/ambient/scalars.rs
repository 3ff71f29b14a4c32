//! Scalars of the projective-space Veronese embeddings: complex numbers and
//! quaternions, both viewed as real vectors with a conjugation.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Quaternion `w + x i + y j + z k` with the Hamilton product.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// A real division algebra used as the coefficient field of a projective space.
pub trait ProjScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Real dimension of the algebra.
    const DIM: usize;

    fn zero() -> Self;
    fn from_real(r: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn from_slice(v: &[f64]) -> Self;
    fn write(self, out: &mut [f64]);
    /// Imaginary units; right multiplication by these realizes the complex structures.
    fn imaginary_units() -> Vec<Self>;
}

impl ProjScalar for Complex64 {
    const DIM: usize = 2;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn from_slice(v: &[f64]) -> Self {
        Complex64::new(v[0], v[1])
    }
    fn write(self, out: &mut [f64]) {
        out[0] = self.re;
        out[1] = self.im;
    }
    fn imaginary_units() -> Vec<Self> {
        vec![Complex64::new(0.0, 1.0)]
    }
}

impl ProjScalar for Quaternion {
    const DIM: usize = 4;

    fn zero() -> Self {
        Quaternion::default()
    }
    fn from_real(r: f64) -> Self {
        Quaternion::new(r, 0.0, 0.0, 0.0)
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn re(self) -> f64 {
        self.w
    }
    fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
    fn from_slice(v: &[f64]) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }
    fn write(self, out: &mut [f64]) {
        out[0] = self.w;
        out[1] = self.x;
        out[2] = self.y;
        out[3] = self.z;
    }
    fn imaginary_units() -> Vec<Self> {
        vec![
            Quaternion::new(0.0, 1.0, 0.0, 0.0),
            Quaternion::new(0.0, 0.0, 1.0, 0.0),
            Quaternion::new(0.0, 0.0, 0.0, 1.0),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamilton_rules() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let k = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        let minus_one = Quaternion::new(-1.0, 0.0, 0.0, 0.0);
        assert_eq!(i * i, minus_one);
        assert_eq!(j * j, minus_one);
        assert_eq!(k * k, minus_one);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(i * j * k, minus_one);
    }

    #[test]
    fn conjugate_reverses_products() {
        let a = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        let b = Quaternion::new(-0.5, 0.1, 1.4, -0.9);
        let lhs = (a * b).conj();
        let rhs = b.conj() * a.conj();
        assert!((lhs - rhs).norm_sqr() < 1e-28);
        assert!(((a * a.conj()).w - a.norm_sqr()).abs() < 1e-14);
    }
}
