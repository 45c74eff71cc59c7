//! Regular power series `Σ (q - c)^n a_n` with right quaternionic
//! coefficients, and the operations of the regular function calculus on
//! them: evaluation, the ⋆-product, splitting along a slice, extension from
//! a slice and composition with slice preserving series.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::realpoly::RealPoly;

/// Default number of retained coefficients for transcendental series.
pub const DEFAULT_ORDER: usize = 64;

/// Points are accepted as lying on a slice up to this relative distance.
pub const SLICE_TOLERANCE: f64 = 1e-12;

/// Whether a series is an exact polynomial or known only below some order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Exact,
    /// Coefficients of index `< N` are known; the rest are unknown.
    Order(usize),
}

impl Truncation {
    fn min(self, other: Truncation) -> Truncation {
        match (self, other) {
            (Truncation::Exact, t) | (t, Truncation::Exact) => t,
            (Truncation::Order(a), Truncation::Order(b)) => Truncation::Order(a.min(b)),
        }
    }

    fn limit(self) -> Option<usize> {
        match self {
            Truncation::Exact => None,
            Truncation::Order(n) => Some(n),
        }
    }
}

/// A regular series centred at a real point.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularSeries {
    center: f64,
    coeffs: Vec<Quaternion>,
    truncation: Truncation,
    radius: Option<f64>,
}

impl RegularSeries {
    /// Exact polynomial `Σ q^n a_n`; trailing zeros are dropped.
    pub fn polynomial(coeffs: Vec<Quaternion>) -> Self {
        Self::build(0.0, coeffs, Truncation::Exact)
    }

    /// Exact polynomial with real coefficients.
    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| Quaternion::real(c)).collect())
    }

    /// Series known through index `order - 1`; extra coefficients are cut
    /// and missing ones are zero.
    pub fn truncated(mut coeffs: Vec<Quaternion>, order: usize) -> Self {
        coeffs.resize(order, Quaternion::ZERO);
        Self::build(0.0, coeffs, Truncation::Order(order))
    }

    fn build(center: f64, mut coeffs: Vec<Quaternion>, truncation: Truncation) -> Self {
        match truncation {
            Truncation::Exact => {
                while coeffs.last().is_some_and(|c| *c == Quaternion::ZERO) {
                    coeffs.pop();
                }
            }
            Truncation::Order(n) => coeffs.resize(n, Quaternion::ZERO),
        }
        Self { center, coeffs, truncation, radius: None }
    }

    pub fn zero() -> Self {
        Self::polynomial(Vec::new())
    }

    pub fn constant(c: Quaternion) -> Self {
        Self::polynomial(vec![c])
    }

    /// The identity function `q`.
    pub fn identity() -> Self {
        Self::real_polynomial(&[0.0, 1.0])
    }

    /// Taylor series of `exp(q)` at 0, retaining `order` coefficients.
    pub fn exp_series(order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order);
        let mut c = 1.0;
        for n in 0..order {
            if n > 0 {
                c /= n as f64;
            }
            coeffs.push(Quaternion::real(c));
        }
        Self::truncated(coeffs, order)
    }

    /// The same coefficients expanded around `center` instead.
    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    /// Refuse evaluation farther than `radius` from the center.
    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn from_real_poly(p: &RealPoly) -> Self {
        Self::real_polynomial(p.coeffs())
    }

    /// The real polynomial represented by an exact slice preserving series
    /// centred at 0.
    pub fn to_real_poly(&self) -> Result<RealPoly> {
        if self.truncation != Truncation::Exact {
            return Err(Error::NotPolynomial);
        }
        if !self.is_slice_preserving() {
            return Err(Error::NotSlicePreserving);
        }
        let p = RealPoly::new(self.coeffs.iter().map(|c| c.w).collect());
        Ok(if self.center == 0.0 { p } else { p.taylor_shift(-self.center) })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Quaternion {
        self.coeffs.get(n).copied().unwrap_or(Quaternion::ZERO)
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn is_exact(&self) -> bool {
        self.truncation == Truncation::Exact
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// Degree of an exact polynomial (`None` for the zero polynomial or a
    /// truncated series).
    pub fn degree(&self) -> Option<usize> {
        match self.truncation {
            Truncation::Exact => self.coeffs.len().checked_sub(1),
            Truncation::Order(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Quaternion::ZERO)
    }

    /// All coefficients real.
    pub fn is_slice_preserving(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real())
    }

    /// `Σ (q - c)^n a_n`, evaluated by Horner's rule with the powers acting
    /// from the left.
    pub fn evaluate(&self, q: Quaternion) -> Result<Quaternion> {
        let t = q - Quaternion::real(self.center);
        if let (Truncation::Order(_), Some(r)) = (self.truncation, self.radius) {
            if t.norm() > r {
                return Err(Error::Divergence { distance: t.norm(), radius: r });
            }
        }
        Ok(self.coeffs.iter().rev().fold(Quaternion::ZERO, |acc, &a| t * acc + a))
    }

    /// Evaluation on the slice `C_I` in complex coordinates, valid for
    /// slice preserving series.
    pub fn evaluate_complex(&self, z: Complex64) -> Complex64 {
        let t = z - self.center;
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| t * acc + a.w)
    }

    fn check_center(&self, other: &Self) -> Result<()> {
        if self.center != other.center {
            return Err(Error::CenterMismatch { left: self.center, right: other.center });
        }
        Ok(())
    }

    fn combined(&self, other: &Self, coeffs: Vec<Quaternion>) -> Self {
        let truncation = self.truncation.min(other.truncation);
        let mut out = Self::build(self.center, coeffs, truncation);
        out.radius = match (self.radius, other.radius) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Ok(self.combined(other, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_right(Quaternion::real(-1.0)))
    }

    /// `f(q) · c`, i.e. every coefficient multiplied by `c` on the right.
    pub fn scale_right(&self, c: Quaternion) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| a * c).collect();
        self.clone().with_coeffs(coeffs)
    }

    fn with_coeffs(self, coeffs: Vec<Quaternion>) -> Self {
        let radius = self.radius;
        let mut out = Self::build(self.center, coeffs, self.truncation);
        out.radius = radius;
        out
    }

    /// The ⋆-product: `c_n = Σ_k a_k b_{n-k}` with the coefficient of `self`
    /// on the left.
    pub fn star(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(self.combined(other, Vec::new()));
        }
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(n) = self.truncation.min(other.truncation).limit() {
            len = len.min(n);
        }
        let mut coeffs = vec![Quaternion::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j < len {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Ok(self.combined(other, coeffs))
    }

    /// `n`-fold ⋆-power (`f^{⋆0} = 1`).
    pub fn star_pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::constant(Quaternion::ONE).with_center(self.center);
        for _ in 0..n {
            acc = acc.star(self)?;
        }
        Ok(acc)
    }

    /// The regular conjugate `f^c`, with conjugated coefficients.
    pub fn regular_conjugate(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a = a.conj());
        out
    }

    /// The symmetrization `f ⋆ f^c`, whose coefficients are real.
    pub fn symmetrization(&self) -> Result<Self> {
        let mut s = self.star(&self.regular_conjugate())?;
        s.coeffs.iter_mut().for_each(|a| *a = Quaternion::real(a.w));
        Ok(s.clone().with_coeffs(s.coeffs))
    }

    /// Splitting along `(I, J)`: `a_n = α_n + β_n J` with `α_n, β_n ∈ C_I`.
    pub fn split(&self, i: UnitImaginary, j: UnitImaginary) -> Result<Splitting> {
        i.check_orthogonal(j, 1e-12)?;
        let (iq, jq) = (i.to_quaternion(), j.to_quaternion());
        let ij = iq * jq;
        let mut first = Vec::with_capacity(self.coeffs.len());
        let mut second = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            first.push(Complex64::new(a.w, a.dot(iq)));
            second.push(Complex64::new(a.dot(jq), a.dot(ij)));
        }
        Ok(Splitting { center: self.center, i, j, first, second })
    }

    /// The ⋆-product of `self` and `other` evaluated at points of `C_I`
    /// through the splitting formula
    /// `(FH - G·conj(K(z̄))) + (FK + G·conj(H(z̄)))J`.
    pub fn star_via_splitting(
        &self,
        other: &Self,
        i: UnitImaginary,
        j: UnitImaginary,
        samples: &[Quaternion],
    ) -> Result<Vec<Quaternion>> {
        self.check_center(other)?;
        let f = self.split(i, j)?;
        let g = other.split(i, j)?;
        samples
            .iter()
            .map(|&q| {
                let z = q.to_complex_on(i, SLICE_TOLERANCE).ok_or(Error::NotOnSlice)?;
                let (ff, gg) = f.eval(z);
                let (hh, kk) = g.eval(z);
                let (hb, kb) = g.eval(z.conj());
                let u = ff * hh - gg * kb.conj();
                let v = ff * kk + gg * hb.conj();
                Ok(f.assemble(u, v))
            })
            .collect()
    }

    /// The slice preserving composition `g ∘ f` with `g = self`.
    ///
    /// `g` is re-expanded around `w0 = f(c_f)` and `f - w0` is substituted.
    /// When either input is truncated, the result keeps only the orders
    /// that the known coefficients determine.
    pub fn compose_slice_preserving(&self, f: &Self) -> Result<Self> {
        if !f.is_slice_preserving() {
            return Err(Error::NotSlicePreserving);
        }
        let w0 = f.coeff(0).w;
        let g = self.recenter(w0)?;
        let mut shifted = f.coeffs.clone();
        if let Some(a) = shifted.first_mut() {
            *a = Quaternion::ZERO;
        }
        let h = Self::build(f.center, shifted, f.truncation);
        // terms h^n with n beyond g's known order start at n · val(h)
        let order = match h.coeffs.iter().position(|c| *c != Quaternion::ZERO) {
            None => f.truncation,
            Some(val) => {
                let from_g = g.truncation.limit().map(|n| Truncation::Order(n.saturating_mul(val)));
                f.truncation.min(from_g.unwrap_or(Truncation::Exact))
            }
        };
        // Horner in the composition ring: acc = acc ⋆ h + d_n
        let cap = order.limit();
        let mut acc = Self::build(f.center, Vec::new(), Truncation::Exact);
        for &d in g.coeffs.iter().rev() {
            let mut coeffs = if acc.coeffs.is_empty() {
                Vec::new()
            } else {
                let mut out = vec![Quaternion::ZERO; acc.coeffs.len() + h.coeffs.len() - 1];
                for (k, &hk) in h.coeffs.iter().enumerate() {
                    for (m, &am) in acc.coeffs.iter().enumerate() {
                        out[k + m] += hk * am;
                    }
                }
                out
            };
            if let Some(n) = cap {
                coeffs.truncate(n);
            }
            if coeffs.is_empty() {
                coeffs.push(Quaternion::ZERO);
            }
            coeffs[0] += d;
            acc = Self::build(f.center, coeffs, Truncation::Exact);
        }
        let mut out = Self::build(f.center, acc.coeffs, order);
        out.radius = f.radius;
        Ok(out)
    }

    /// The same function expanded around another real point, by Taylor
    /// shifting the coefficients. For truncated series only the retained
    /// coefficients contribute.
    pub fn recenter(&self, center: f64) -> Result<Self> {
        let s = center - self.center;
        if s == 0.0 {
            return Ok(self.clone());
        }
        if let (Truncation::Order(_), Some(r)) = (self.truncation, self.radius) {
            if s.abs() > r {
                return Err(Error::Divergence { distance: s.abs(), radius: r });
            }
        }
        // (t + s)^n expanded by repeated synthetic division
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let next = a[k + 1];
                a[k] += next * s;
            }
        }
        let mut out = Self::build(center, a, self.truncation);
        out.radius = self.radius.map(|r| r - s.abs());
        Ok(out)
    }

    /// Zeros of an exact polynomial, from the roots of its symmetrization.
    ///
    /// Every zero lies on a sphere `[x + yS]` where `f ⋆ f^c` vanishes. On
    /// each such sphere, `f(x + yI) = A + I B` with `A`, `B` independent of
    /// `I`: either both vanish (a spherical zero) or the sphere carries the
    /// single zero `x + yI` with `I = -A B^{-1}`.
    pub fn zeros(&self) -> Result<Vec<Zero>> {
        if !self.is_exact() {
            return Err(Error::NotPolynomial);
        }
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let base = self.recenter(0.0)?;
        let sym = base.symmetrization()?.to_real_poly()?;
        let mut out = Vec::new();
        for s in sym.root_spheres()? {
            if s.y == 0.0 {
                out.push(Zero::Isolated(Quaternion::real(s.x)));
                continue;
            }
            let (a, b) = base.sphere_parts(s.x, s.y);
            let r = Complex64::new(s.x, s.y).norm();
            let size: f64 = base.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
            if b.norm() <= 1e-7 * size {
                out.push(Zero::Spherical { x: s.x, y: s.y });
                continue;
            }
            let unit = -(a * b.inverse()?);
            let u = UnitImaginary::normalize(unit.x, unit.y, unit.z)?;
            out.push(Zero::Isolated(Quaternion::from_slice(s.x, s.y, u)));
        }
        Ok(out)
    }

    /// `(A, B)` with `f(x + yI) = A + I B` for every unit `I`.
    fn sphere_parts(&self, x: f64, y: f64) -> (Quaternion, Quaternion) {
        let w = Complex64::new(x, y) - self.center;
        let mut p = Complex64::new(1.0, 0.0);
        let (mut a, mut b) = (Quaternion::ZERO, Quaternion::ZERO);
        for &c in &self.coeffs {
            a += c * p.re;
            b += c * p.im;
            p *= w;
        }
        (a, b)
    }
}

/// A zero of a quaternionic polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Zero {
    Isolated(Quaternion),
    /// The whole sphere `[x + yS]`.
    Spherical {
        x: f64,
        y: f64,
    },
}

/// Holomorphic pair `(F, G)` on `C_I` with `f = F + G J` there.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub center: f64,
    pub i: UnitImaginary,
    pub j: UnitImaginary,
    pub first: Vec<Complex64>,
    pub second: Vec<Complex64>,
}

impl Splitting {
    /// `(F(z), G(z))`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let t = z - self.center;
        let horner = |c: &[Complex64]| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| t * acc + a);
        (horner(&self.first), horner(&self.second))
    }

    /// `u + v J` as a quaternion, with `u, v ∈ C_I`.
    pub fn assemble(&self, u: Complex64, v: Complex64) -> Quaternion {
        let iq = self.i.to_quaternion();
        let jq = self.j.to_quaternion();
        Quaternion::from_complex(u, self.i) + (Quaternion::real(v.re) + iq * v.im) * jq
    }

    /// `F(z) + G(z) J`.
    pub fn reconstruct(&self, z: Complex64) -> Quaternion {
        let (f, g) = self.eval(z);
        self.assemble(f, g)
    }
}

/// Representation formula: the regular extension at `q` of a function on
/// `C_I` given by its values `s_plus = s(x + yI)` and `s_minus = s(x - yI)`,
/// where `q = x + yJ`:
/// `½(s₊ + s₋) + (J I / 2)(s₋ - s₊)`.
/// For real `q` both samples coincide and `s_plus` is returned.
pub fn extend_from_slice(s_plus: Quaternion, s_minus: Quaternion, i: UnitImaginary, q: Quaternion) -> Quaternion {
    let sc = q.slice_decompose();
    let Some(j) = sc.unit else { return s_plus };
    let ji = j.to_quaternion() * i.to_quaternion();
    (s_plus + s_minus) * 0.5 + ji * (s_minus - s_plus) * 0.5
}

/// [`extend_from_slice`] with the samples taken from a function on `C_I`.
pub fn extend_with<F>(sampler: F, i: UnitImaginary, q: Quaternion) -> Quaternion
where
    F: Fn(Quaternion) -> Quaternion,
{
    let sc = q.slice_decompose();
    let plus = sampler(Quaternion::from_slice(sc.x, sc.y, i));
    if sc.unit.is_none() {
        return plus;
    }
    let minus = sampler(Quaternion::from_slice(sc.x, -sc.y, i));
    extend_from_slice(plus, minus, i, q)
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    #[serde(default)]
    center: f64,
    coeffs: Vec<Quaternion>,
    #[serde(default = "exact_by_default")]
    exact: bool,
}

fn exact_by_default() -> bool {
    true
}

impl Serialize for RegularSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson { center: self.center, coeffs: self.coeffs.clone(), exact: self.is_exact() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RegularSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        if !raw.center.is_finite() {
            return Err(serde::de::Error::custom("series center must be finite"));
        }
        let truncation = if raw.exact { Truncation::Exact } else { Truncation::Order(raw.coeffs.len()) };
        Ok(Self::build(raw.center, raw.coeffs, truncation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        a.rel_dist(b) <= tol
    }

    #[test]
    fn evaluation_uses_right_coefficients() {
        let sq = RegularSeries::real_polynomial(&[0.0, 0.0, 1.0]);
        assert_eq!(sq.evaluate(J).unwrap(), q(-1.0, 0.0, 0.0, 0.0));
        let f = RegularSeries::polynomial(vec![-I, Quaternion::ONE]);
        assert_eq!(f.evaluate(I).unwrap(), Quaternion::ZERO);
        let qi = RegularSeries::polynomial(vec![Quaternion::ZERO, I]);
        assert_eq!(qi.evaluate(J).unwrap(), -K);
    }

    #[test]
    fn truncated_series_respects_radius() {
        let e = RegularSeries::exp_series(30).with_radius(2.0);
        assert!(matches!(e.evaluate(q(3.0, 0.0, 0.0, 0.0)), Err(Error::Divergence { .. })));
        let v = e.evaluate(q(1.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(close(v, q(1.0, 0.0, 1.0, 0.0).exp(), 1e-12));
    }

    #[test]
    fn star_examples() {
        let a = RegularSeries::polynomial(vec![-I, Quaternion::ONE]);
        let b = RegularSeries::polynomial(vec![-J, Quaternion::ONE]);
        let p = a.star(&b).unwrap();
        assert_eq!(p.coeffs(), &[K, -I - J, Quaternion::ONE]);
        let one = RegularSeries::constant(Quaternion::ONE);
        assert_eq!(a.star(&one).unwrap(), a);
        let c = RegularSeries::real_polynomial(&[-2.0, 1.0]).star(&RegularSeries::real_polynomial(&[2.0, 1.0]));
        assert_eq!(c.unwrap(), RegularSeries::real_polynomial(&[-4.0, 0.0, 1.0]));
    }

    #[test]
    fn star_rejects_mismatched_centers() {
        let a = RegularSeries::identity();
        let b = RegularSeries::identity().with_center(1.0);
        assert!(matches!(a.star(&b), Err(Error::CenterMismatch { .. })));
    }

    #[test]
    fn star_truncation_is_minimum() {
        let e = RegularSeries::exp_series(10);
        let p = RegularSeries::real_polynomial(&[1.0, 1.0]);
        let s = e.star(&p).unwrap();
        assert_eq!(s.truncation(), Truncation::Order(10));
        assert_eq!(s.coeffs().len(), 10);
    }

    #[test]
    fn splitting_examples() {
        let (i, j) = (UnitImaginary::i(), UnitImaginary::j());
        let s = RegularSeries::identity().split(i, j).unwrap();
        assert_eq!(s.first, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(s.second.iter().all(|c| c.norm() == 0.0));
        let k = RegularSeries::constant(K).split(i, j).unwrap();
        assert_eq!(k.first, vec![Complex64::new(0.0, 0.0)]);
        assert_eq!(k.second, vec![Complex64::new(0.0, 1.0)]);
        let qj = RegularSeries::polynomial(vec![Quaternion::ZERO, J]).split(i, j).unwrap();
        assert_eq!(qj.second, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(RegularSeries::identity().split(i, i).is_err());
    }

    #[test]
    fn splitting_formula_examples() {
        let (i, j) = (UnitImaginary::i(), UnitImaginary::j());
        let id = RegularSeries::identity();
        let v = id.star_via_splitting(&id, i, j, &[q(1.0, 1.0, 0.0, 0.0)]).unwrap();
        assert!(close(v[0], q(0.0, 2.0, 0.0, 0.0), 1e-15));
        let a = RegularSeries::polynomial(vec![-I, Quaternion::ONE]);
        let b = RegularSeries::polynomial(vec![-J, Quaternion::ONE]);
        let v = a.star_via_splitting(&b, i, j, &[I]).unwrap();
        assert!(v[0].norm() < 1e-15);
        let cj = RegularSeries::constant(J);
        let v = cj.star_via_splitting(&cj, i, j, &[Quaternion::ONE]).unwrap();
        assert_eq!(v[0], q(-1.0, 0.0, 0.0, 0.0));
        assert!(matches!(a.star_via_splitting(&b, i, j, &[J]), Err(Error::NotOnSlice)));
    }

    #[test]
    fn extension_examples() {
        let i = UnitImaginary::i();
        let sq = |z: Quaternion| z * z;
        let p = q(0.7, 0.0, -1.3, 0.0);
        assert!(close(extend_with(sq, i, p), p * p, 1e-15));
        let c = q(1.0, 2.0, 3.0, 4.0);
        assert_eq!(extend_with(|_| c, i, q(0.3, 1.0, 1.0, 1.0)), c);
        let cube = |z: Quaternion| z * z * z;
        let v = extend_with(cube, i, q(1.0, 0.0, 0.0, 1.0));
        assert!(close(v, q(-2.0, 0.0, 0.0, 2.0), 1e-15));
        assert_eq!(extend_with(cube, i, Quaternion::real(2.0)), Quaternion::real(8.0));
    }

    #[test]
    fn composition_examples() {
        let g = RegularSeries::real_polynomial(&[0.0, 0.0, 1.0]);
        let f = RegularSeries::real_polynomial(&[1.0, 1.0]);
        assert_eq!(g.compose_slice_preserving(&f).unwrap(), RegularSeries::real_polynomial(&[1.0, 2.0, 1.0]));
        let h = RegularSeries::real_polynomial(&[-3.0, 0.5, 2.0]);
        assert_eq!(RegularSeries::identity().compose_slice_preserving(&h).unwrap(), h);
        let e = RegularSeries::exp_series(8);
        let half_sq = RegularSeries::real_polynomial(&[0.0, 0.0, 0.5]);
        let c = e.compose_slice_preserving(&half_sq).unwrap();
        assert_eq!(c.truncation(), Truncation::Order(16));
        let v = c.evaluate(Quaternion::ONE).unwrap();
        assert!((v.w - 0.5f64.exp()).abs() <= 1e-6);
        assert!(g.compose_slice_preserving(&RegularSeries::constant(I)).is_err());
    }

    #[test]
    fn composition_recenters_quaternionic_outer_function() {
        // g(w) = (w - 1)·i around 1, f(q) = q + 3: g(f(q)) = (q + 2)·i
        let g = RegularSeries::polynomial(vec![Quaternion::ZERO, I]).with_center(1.0);
        let f = RegularSeries::real_polynomial(&[3.0, 1.0]);
        let c = g.compose_slice_preserving(&f).unwrap();
        assert_eq!(c.coeffs(), &[q(0.0, 2.0, 0.0, 0.0), I]);
    }

    #[test]
    fn zeros_of_quaternionic_polynomials() {
        // (q - i) ⋆ (q - j) vanishes at i only
        let a = RegularSeries::polynomial(vec![-I, Quaternion::ONE]);
        let b = RegularSeries::polynomial(vec![-J, Quaternion::ONE]);
        let p = a.star(&b).unwrap();
        let zs = p.zeros().unwrap();
        assert_eq!(zs.len(), 1);
        match zs[0] {
            Zero::Isolated(z) => assert!(close(z, I, 1e-9)),
            other => panic!("unexpected {other:?}"),
        }
        let sphere = RegularSeries::real_polynomial(&[1.0, 0.0, 1.0]).zeros().unwrap();
        assert!(matches!(sphere[..], [Zero::Spherical { x, y }] if x.abs() < 1e-12 && (y - 1.0).abs() < 1e-12));
    }

    #[test]
    fn json_shape() {
        let p = RegularSeries::polynomial(vec![Quaternion::ONE, I]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"center":0.0,"coeffs":[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0]],"exact":true}"#);
        let back: RegularSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let t: RegularSeries = serde_json::from_str(r#"{"center":1.5,"coeffs":[[1,0,0,0]],"exact":false}"#).unwrap();
        assert_eq!(t.truncation(), Truncation::Order(1));
        assert_eq!(t.center(), 1.5);
        let short: RegularSeries = serde_json::from_str(r#"{"coeffs":[[1,0,0,0],[0,1,0,0]]}"#).unwrap();
        assert_eq!(short, p);
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(Quaternion::from_array)
    }

    fn poly(max_len: usize) -> impl Strategy<Value = RegularSeries> {
        prop::collection::vec(quat(), 1..=max_len).prop_map(RegularSeries::polynomial)
    }

    fn real_poly(max_len: usize) -> impl Strategy<Value = RegularSeries> {
        prop::collection::vec(-2.0f64..2.0, 1..=max_len).prop_map(|c| RegularSeries::real_polynomial(&c))
    }

    fn unit() -> impl Strategy<Value = UnitImaginary> {
        prop::array::uniform3(-1.0f64..1.0)
            .prop_filter("nonzero", |v| v.iter().map(|t| t * t).sum::<f64>() > 1e-3)
            .prop_map(|v| UnitImaginary::normalize(v[0], v[1], v[2]).unwrap())
    }

    proptest! {
        #[test]
        fn star_is_associative(a in poly(7), b in poly(7), c in poly(7)) {
            let l = a.star(&b).unwrap().star(&c).unwrap();
            let r = a.star(&b.star(&c).unwrap()).unwrap();
            prop_assert_eq!(l.coeffs().len(), r.coeffs().len());
            for (x, y) in l.coeffs().iter().zip(r.coeffs()) {
                prop_assert!((*x - *y).norm() <= 1e-12 * 1f64.max(x.norm()));
            }
        }

        #[test]
        fn slice_preserving_factor_commutes(f in real_poly(7), g in poly(7), p in quat()) {
            let fg = f.star(&g).unwrap();
            let gf = g.star(&f).unwrap();
            for (x, y) in fg.coeffs().iter().zip(gf.coeffs()) {
                prop_assert!((*x - *y).norm() <= 1e-12 * 1f64.max(x.norm()));
            }
            let pointwise = f.evaluate(p).unwrap() * g.evaluate(p).unwrap();
            prop_assert!(close(fg.evaluate(p).unwrap(), pointwise, 1e-9));
        }

        #[test]
        fn split_reconstructs_on_slice(f in poly(7), i in unit(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let j = i.orthogonal();
            let s = f.split(i, j).unwrap();
            let z = Complex64::new(re, im);
            let direct = f.evaluate(Quaternion::from_complex(z, i)).unwrap();
            prop_assert!(close(s.reconstruct(z), direct, 1e-12));
        }

        #[test]
        fn splitting_agrees_with_convolution(f in poly(7), g in poly(7), i in unit(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let j = i.orthogonal();
            let z = Quaternion::from_complex(Complex64::new(re, im), i);
            let via = f.star_via_splitting(&g, i, j, &[z]).unwrap()[0];
            let conv = f.star(&g).unwrap().evaluate(z).unwrap();
            prop_assert!(close(via, conv, 1e-9));
        }

        #[test]
        fn extension_reproduces_evaluation(f in poly(7), p in quat()) {
            let i = UnitImaginary::i();
            let ext = extend_with(|z| f.evaluate(z).unwrap(), i, p);
            prop_assert!(close(ext, f.evaluate(p).unwrap(), 1e-10));
        }

        #[test]
        fn slice_preserving_values_stay_on_slice(f in real_poly(7), i in unit(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let v = f.evaluate(Quaternion::from_slice(x, y, i)).unwrap();
            prop_assert!(v.off_slice_norm(i) <= 1e-10 * 1f64.max(v.norm()));
        }

        #[test]
        fn composition_matches_pointwise(g in poly(5), f in real_poly(4), p in quat()) {
            let c = g.compose_slice_preserving(&f).unwrap();
            let direct = g.evaluate(f.evaluate(p).unwrap()).unwrap();
            prop_assert!(close(c.evaluate(p).unwrap(), direct, 1e-9));
        }

        #[test]
        fn recentering_preserves_values(f in poly(7), c in -2.0f64..2.0, p in quat()) {
            let r = f.recenter(c).unwrap();
            prop_assert_eq!(r.center(), c);
            prop_assert!(close(r.evaluate(p).unwrap(), f.evaluate(p).unwrap(), 1e-10));
        }
    }

    #[test]
    fn exp_series_matches_scalar_exp() {
        let e = RegularSeries::exp_series(DEFAULT_ORDER);
        assert_relative_eq!(e.evaluate(Quaternion::ONE).unwrap().w, std::f64::consts::E, max_relative = 1e-15);
    }
}
