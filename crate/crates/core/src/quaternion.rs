//! Real quaternions, the sphere of imaginary units and slice coordinates.
//!
//! Every quaternion can be written as `x + I y` with `x, y` real, `y >= 0`
//! and `I` a unit imaginary quaternion. The complex line `C_I = R + I R` is
//! the slice through `I`; most of the function theory in this crate is
//! computed slice by slice.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Renormalization window for [`UnitImaginary::new`].
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// A quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    /// The point `x + I y` of the slice `C_I`.
    #[inline]
    pub fn from_slice(x: f64, y: f64, unit: UnitImaginary) -> Self {
        Self::new(x, y * unit.x, y * unit.y, y * unit.z)
    }

    /// Maps the complex number `a + b i` to `a + b I` in `C_I`.
    #[inline]
    pub fn from_complex(z: Complex64, unit: UnitImaginary) -> Self {
        Self::from_slice(z.re, z.im, unit)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    #[inline]
    pub fn im(self) -> Quaternion {
        Self::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn is_real(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product on `R^4`.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroDivision);
        }
        Ok(self.conj() / n2)
    }

    /// Conjugate, modulus and inverse in one call.
    pub fn conj_norm_inv(self) -> Result<(Self, f64, Self)> {
        Ok((self.conj(), self.norm(), self.inverse()?))
    }

    /// `q = x + I y` with `x = Re q`, `y = |Im q|`; the unit is `None` for
    /// real `q` because every unit represents it.
    pub fn slice_decompose(self) -> SliceCoords {
        let y = self.im_norm();
        let unit =
            if y == 0.0 { None } else { Some(UnitImaginary::from_normalized(self.x / y, self.y / y, self.z / y)) };
        SliceCoords { x: self.w, y, unit }
    }

    /// `[q]_J = x + J y`: the point of `C_J` with the same real part and
    /// imaginary modulus as `q`.
    pub fn slice_transfer(self, unit: UnitImaginary) -> Self {
        Self::from_slice(self.w, self.im_norm(), unit)
    }

    /// The point `α + Jβ` for `q = α + Iβ` read on `C_I`, keeping the sign
    /// of `β`. Any component of `q` off `C_I` is discarded.
    pub fn transfer_between(self, from: UnitImaginary, to: UnitImaginary) -> Self {
        Self::from_slice(self.w, self.im().dot(from.to_quaternion()), to)
    }

    /// Coordinates of `q` as a complex number on `C_I`, provided `q` lies on
    /// that slice (up to `tol` relative to `|q|`).
    pub fn to_complex_on(self, unit: UnitImaginary, tol: f64) -> Option<Complex64> {
        let b = self.im().dot(unit.to_quaternion());
        let off = (self.im() - unit.to_quaternion() * b).norm();
        if off <= tol * self.norm().max(1.0) {
            Some(Complex64::new(self.w, b))
        } else {
            None
        }
    }

    /// Norm of the component orthogonal to `span{1, I}`.
    pub fn off_slice_norm(self, unit: UnitImaginary) -> f64 {
        let b = self.im().dot(unit.to_quaternion());
        (self.im() - unit.to_quaternion() * b).norm()
    }

    /// `exp(x + I y) = e^x (cos y + I sin y)`.
    pub fn exp(self) -> Self {
        let s = self.slice_decompose();
        let ex = s.x.exp();
        match s.unit {
            None => Self::real(ex),
            Some(u) => Self::from_slice(ex * s.y.cos(), ex * s.y.sin(), u),
        }
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn powi(self, n: i64) -> Result<Self> {
        let mut base = if n < 0 { self.inverse()? } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Scalar-aware distance used in tolerance checks:
    /// `|a - b| / max(1, |a|, |b|)`.
    pub fn rel_dist(self, other: Self) -> f64 {
        (self - other).norm() / 1f64.max(self.norm()).max(other.norm())
    }
}

/// Slice coordinates of a quaternion, see [`Quaternion::slice_decompose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceCoords {
    pub x: f64,
    pub y: f64,
    pub unit: Option<UnitImaginary>,
}

impl SliceCoords {
    /// The complex number `x + i y` representing the sphere point.
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, r: f64) -> Self {
        Self::new(self.w * r, self.x * r, self.y * r, self.z * r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, r: f64) -> Self {
        Self::new(self.w / r, self.x / r, self.y / r, self.z / r)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Self::real(r)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(D::Error::custom("quaternion components must be finite"));
        }
        Ok(Self::from_array(a))
    }
}

/// A purely imaginary unit quaternion, i.e. an element of the sphere `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitImaginary {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitImaginary {
    /// Accepts vectors whose norm is within [`UNIT_TOLERANCE`] of 1 and
    /// renormalizes them.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnitImaginary { norm: n });
        }
        Ok(Self::from_normalized(x / n, y / n, z / n))
    }

    /// Normalizes any nonzero vector onto `S`.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotUnitImaginary { norm: n });
        }
        Ok(Self::from_normalized(x / n, y / n, z / n))
    }

    pub(crate) const fn from_normalized(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn i() -> Self {
        Self::from_normalized(1.0, 0.0, 0.0)
    }

    pub const fn j() -> Self {
        Self::from_normalized(0.0, 1.0, 0.0)
    }

    pub const fn k() -> Self {
        Self::from_normalized(0.0, 0.0, 1.0)
    }

    pub fn components(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    /// `(⟨I, J⟩, I × J)`, so that `IJ = -⟨I, J⟩ + I × J`.
    pub fn inner_cross(self, other: Self) -> (f64, Quaternion) {
        let inner = self.x * other.x + self.y * other.y + self.z * other.z;
        let cross = Quaternion::new(
            0.0,
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        );
        (inner, cross)
    }

    /// `I^a`, which cycles through `1, I, -1, -I` with period four.
    pub fn unit_power(self, a: i64) -> Quaternion {
        match a.rem_euclid(4) {
            0 => Quaternion::ONE,
            1 => self.to_quaternion(),
            2 => -Quaternion::ONE,
            _ => -self.to_quaternion(),
        }
    }

    /// Some unit orthogonal to `self`.
    pub fn orthogonal(self) -> Self {
        // cross with the basis vector least aligned with self
        let (ax, ay, az) = (self.x.abs(), self.y.abs(), self.z.abs());
        let e = if ax <= ay && ax <= az {
            Self::i()
        } else if ay <= az {
            Self::j()
        } else {
            Self::k()
        };
        let (_, c) = self.inner_cross(e);
        Self::normalize(c.x, c.y, c.z).expect("cross product with a non-parallel axis")
    }

    /// Requires `⟨self, other⟩ = 0` up to `tol`.
    pub fn check_orthogonal(self, other: Self, tol: f64) -> Result<()> {
        let (inner, _) = self.inner_cross(other);
        if inner.abs() > tol {
            return Err(Error::NonOrthogonal { inner });
        }
        Ok(())
    }
}

impl Neg for UnitImaginary {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_normalized(-self.x, -self.y, -self.z)
    }
}

impl From<UnitImaginary> for Quaternion {
    fn from(u: UnitImaginary) -> Self {
        u.to_quaternion()
    }
}

impl Serialize for UnitImaginary {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.components().serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitImaginary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        UnitImaginary::new(x, y, z).map_err(D::Error::custom)
    }
}
