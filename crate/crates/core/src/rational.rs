//! The quotient field of slice preserving polynomials: normalized
//! quotients `num / den`, their arithmetic, poles, the σ/τ pseudo-metrics
//! and slice Laurent expansions.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::divisor::{Sphere, SphericalDivisor, SphericalOrder, IDENTIFICATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::realpoly::{RealPoly, DEFLATION_TOLERANCE, MERGE_TOLERANCE};
use crate::series::RegularSeries;

/// A quotient of slice preserving polynomials without common spheres of
/// zeros, with a monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiregularRational {
    num: RealPoly,
    den: RealPoly,
    poles: SphericalDivisor,
}

/// Nature of a point relative to a rational function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Singularity {
    Regular,
    Removable,
    Pole { order: u32 },
}

impl SemiregularRational {
    /// Cancels common factors and makes the denominator monic.
    pub fn normalize(num: RealPoly, den: RealPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (mut num, mut den) = (num, den);
        let mut poles = SphericalDivisor::zero();
        if !den.is_constant() {
            let num_spheres = if num.is_constant() { Vec::new() } else { num.root_spheres()? };
            for r in den.root_spheres()? {
                let s = Sphere { x: r.x, y: r.y };
                let matched = num_spheres.iter().find(|t| Sphere { x: t.x, y: t.y }.matches(&s, MERGE_TOLERANCE));
                let deflated = if num.is_constant() { 0 } else { num.multiplicity_at(s.x, s.y, DEFLATION_TOLERANCE) };
                let (shared, factor) = match matched {
                    Some(t) if t.mult > deflated => (t.mult.min(r.mult), RealPoly::factor_for(t.x, t.y)),
                    _ => (deflated.min(r.mult), s.factor()),
                };
                for _ in 0..shared {
                    num = num.exact_quotient(&factor)?;
                    den = den.exact_quotient(&s.factor())?;
                }
                poles.insert(s, (r.mult - shared) as i64);
            }
        }
        let lead = den.leading();
        Ok(Self { num: num.scale(1.0 / lead), den: den.scale(1.0 / lead), poles })
    }

    pub fn zero() -> Self {
        Self::polynomial(RealPoly::zero())
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(RealPoly::constant(c))
    }

    pub fn polynomial(p: RealPoly) -> Self {
        Self { num: p, den: RealPoly::one(), poles: SphericalDivisor::zero() }
    }

    /// The identity function `q`.
    pub fn identity() -> Self {
        Self::polynomial(RealPoly::identity())
    }

    pub fn num(&self) -> &RealPoly {
        &self.num
    }

    pub fn den(&self) -> &RealPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Spheres of poles with their orders.
    pub fn pole_divisor(&self) -> &SphericalDivisor {
        &self.poles
    }

    /// True iff `div(f) ≥ 0`, i.e. the function is a polynomial.
    pub fn is_holomorphic(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.den == other.den {
            return Self::normalize(&self.num + &other.num, self.den.clone());
        }
        Self::normalize(&(&self.num * &other.den) + &(&other.num * &self.den), &self.den * &other.den)
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::normalize(&self.num * &other.num, &self.den * &other.den)
    }

    /// `r · f` for a real scalar.
    pub fn scale(&self, r: f64) -> Self {
        if r == 0.0 {
            return Self::zero();
        }
        Self { num: self.num.scale(r), ..self.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivision);
        }
        Self::normalize(self.den.clone(), self.num.clone())
    }

    pub fn quotient(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// `f ∘ h` for a slice preserving polynomial `h`.
    pub fn compose(&self, h: &RealPoly) -> Result<Self> {
        let sub = |p: &RealPoly| {
            p.coeffs().iter().rev().fold(RealPoly::zero(), |acc, &c| &(&acc * h) + &RealPoly::constant(c))
        };
        Self::normalize(sub(&self.num), sub(&self.den))
    }

    /// Value at `q`, computed on the slice through `q`.
    pub fn evaluate(&self, q: Quaternion) -> Result<Quaternion> {
        let sc = q.slice_decompose();
        let s = Sphere { x: sc.x, y: sc.y };
        if self.poles.entries().iter().any(|(t, _)| t.matches(&s, IDENTIFICATION_TOLERANCE)) {
            return Err(Error::PoleEvaluation);
        }
        let z = sc.complex();
        let d = self.den.eval_complex(z);
        if d.norm() == 0.0 {
            return Err(Error::PoleEvaluation);
        }
        let v = self.num.eval_complex(z) / d;
        Ok(Quaternion::from_complex(v, sc.unit.unwrap_or(UnitImaginary::i())))
    }

    /// Classification of `p`; after normalization only regular points and
    /// poles occur.
    pub fn classify_singularity(&self, p: Quaternion) -> Singularity {
        let order = self.poles.mult_at(&Sphere::of(p), IDENTIFICATION_TOLERANCE);
        if order > 0 {
            Singularity::Pole { order: order as u32 }
        } else {
            Singularity::Regular
        }
    }

    /// Laurent coefficients `a_n`, `n_min ≤ n ≤ n_max`, of
    /// `f(q) = Σ (q - p)^{⋆n} a_n` around `p`.
    ///
    /// On the slice `C_I` through `p` the ⋆-powers restrict to ordinary
    /// powers, so these are the classical Laurent coefficients of the
    /// complex function `num(z) / den(z)` at `w = x + iy`, carried back to
    /// `C_I`.
    pub fn laurent_coefficients(&self, p: Quaternion, n_min: i64, n_max: i64) -> Result<Vec<Quaternion>> {
        if n_min > n_max {
            return Err(Error::InvalidRange(format!("n_min = {n_min} exceeds n_max = {n_max}")));
        }
        let sc = p.slice_decompose();
        let unit = sc.unit.unwrap_or(UnitImaginary::i());
        let w = sc.complex();
        let order = match self.classify_singularity(p) {
            Singularity::Pole { order } => order as usize,
            _ => 0,
        };
        let num = complex_shift(self.num.coeffs(), w);
        let den = complex_shift(self.den.coeffs(), w);
        let den = &den[order.min(den.len())..];
        let count = n_max + order as i64 + 1;
        let taylor = if count > 0 { series_quotient(&num, den, count as usize)? } else { Vec::new() };
        Ok((n_min..=n_max)
            .map(|n| {
                let idx = n + order as i64;
                let c = if idx < 0 { Complex64::new(0.0, 0.0) } else { taylor[idx as usize] };
                Quaternion::from_complex(c, unit)
            })
            .collect())
    }

    /// As a pair of exact slice preserving series.
    pub fn to_series(&self) -> (RegularSeries, RegularSeries) {
        (RegularSeries::from_real_poly(&self.num), RegularSeries::from_real_poly(&self.den))
    }
}

/// Classification of `p` for a possibly unnormalized quotient, where common
/// factors show up as removable singularities.
pub fn classify_unnormalized(num: &RealPoly, den: &RealPoly, p: Quaternion) -> Result<Singularity> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let s = Sphere::of(p);
    let k_den = den.sord(&s)?;
    if k_den == 0 {
        return Ok(Singularity::Regular);
    }
    let k_num = if num.is_zero() { i64::MAX } else { num.sord(&s)? };
    Ok(if k_num >= k_den { Singularity::Removable } else { Singularity::Pole { order: (k_den - k_num) as u32 } })
}

/// `div(f) ≥ 0`.
pub fn holomorphy_check(f: &SemiregularRational) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    Ok(f.is_holomorphic())
}

impl SphericalOrder for SemiregularRational {
    fn div(&self) -> Result<SphericalDivisor> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        Ok(self.num.div()?.sub(&self.poles))
    }

    fn sord(&self, s: &Sphere) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        Ok(self.num.sord(s)? - self.den.sord(s)?)
    }
}

/// `(σ(p, q), τ(p, q))`: both equal `|p - q|` when `p` and `q` lie on a
/// common complex line; otherwise the distances from `p` to the farthest
/// and nearest points of the sphere through `q`.
pub fn sigma_tau(p: Quaternion, q: Quaternion) -> (f64, f64) {
    let (a, b) = (p.im(), q.im());
    let (na, nb) = (a.norm(), b.norm());
    let cross = Quaternion::new(0.0, a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);
    if na == 0.0 || nb == 0.0 || cross.norm() <= 1e-12 * na * nb {
        let d = (p - q).norm();
        return (d, d);
    }
    let dx = p.re() - q.re();
    (dx.hypot(na + nb), dx.hypot(na - nb))
}

/// Membership of `q` in `Σ(p; d1, d2) = {τ(q, p) > d1, σ(q, p) < d2}`.
pub fn in_sigma_region(q: Quaternion, p: Quaternion, d1: f64, d2: f64) -> Result<bool> {
    if d1.is_nan() || d2.is_nan() || d1 < 0.0 || d1 >= d2 {
        return Err(Error::InvalidRange(format!("need 0 <= d1 < d2, got d1 = {d1}, d2 = {d2}")));
    }
    let (sigma, tau) = sigma_tau(q, p);
    Ok(tau > d1 && sigma < d2)
}

/// Coefficients of `p(w + t)` in powers of `t`.
fn complex_shift(coeffs: &[f64], w: Complex64) -> Vec<Complex64> {
    let mut a: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let n = a.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            let next = a[k + 1];
            a[k] += next * w;
        }
    }
    a
}

/// First `count` Taylor coefficients of `num / den`.
fn series_quotient(num: &[Complex64], den: &[Complex64], count: usize) -> Result<Vec<Complex64>> {
    let d0 = *den.first().ok_or(Error::ZeroDenominator)?;
    if d0.norm() == 0.0 {
        return Err(Error::ZeroDivision);
    }
    let mut out: Vec<Complex64> = Vec::with_capacity(count);
    for m in 0..count {
        let mut acc = num.get(m).copied().unwrap_or_default();
        for j in 1..=m.min(den.len().saturating_sub(1)) {
            acc -= den[j] * out[m - j];
        }
        out.push(acc / d0);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: RegularSeries,
    den: RegularSeries,
}

impl Serialize for SemiregularRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (num, den) = self.to_series();
        RationalJson { num, den }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SemiregularRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RationalJson::deserialize(d)?;
        let num = raw.num.to_real_poly().map_err(D::Error::custom)?;
        let den = raw.den.to_real_poly().map_err(D::Error::custom)?;
        Self::normalize(num, den).map_err(D::Error::custom)
    }
}
