//! Spherical divisors: finitely supported integer multiplicities on the
//! spheres `[x + yS]` of ℍ, and the spherical order of slice preserving
//! functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::realpoly::{RealPoly, DEFLATION_TOLERANCE, MERGE_TOLERANCE};
use crate::series::RegularSeries;

/// A computed root sphere is identified with a requested sphere when their
/// coordinates agree to this relative accuracy.
pub const IDENTIFICATION_TOLERANCE: f64 = 1e-6;

/// The sphere `[x + yS]`; `y = 0` is the real point `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sphere {
    pub x: f64,
    pub y: f64,
}

impl Sphere {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() || y < 0.0 {
            return Err(Error::InvalidParameter(format!("sphere ({x}, {y}) needs finite x and y >= 0")));
        }
        Ok(Self { x, y })
    }

    pub fn real(x: f64) -> Self {
        Self { x, y: 0.0 }
    }

    /// The sphere through `q`.
    pub fn of(q: Quaternion) -> Self {
        Self { x: q.re(), y: q.im_norm() }
    }

    pub fn is_real(&self) -> bool {
        self.y == 0.0
    }

    /// Coordinates agree within `tol`, relative to `max(1, |coordinate|)`.
    pub fn matches(&self, other: &Sphere, tol: f64) -> bool {
        (self.is_real() == other.is_real())
            && (self.x - other.x).abs() <= tol * self.x.abs().max(other.x.abs()).max(1.0)
            && (self.y - other.y).abs() <= tol * self.y.abs().max(other.y.abs()).max(1.0)
    }

    /// `(q - x)` for a real point, `(q - x)^2 + y^2` otherwise.
    pub fn factor(&self) -> RealPoly {
        RealPoly::factor_for(self.x, self.y)
    }

    /// Degree of [`Sphere::factor`].
    pub fn degree(&self) -> usize {
        if self.is_real() {
            1
        } else {
            2
        }
    }

    fn cmp_key(&self, other: &Sphere) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Sphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} + {}S]", self.x, self.y)
    }
}

/// One `(sphere, multiplicity)` pair in JSON form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorEntry {
    pub x: f64,
    pub y: f64,
    pub mult: i64,
}

/// A finitely supported map from spheres to nonzero integers, kept sorted
/// by `(x, y)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<DivisorEntry>", into = "Vec<DivisorEntry>")]
pub struct SphericalDivisor {
    entries: Vec<(Sphere, i64)>,
}

impl SphericalDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a divisor, summing entries whose spheres agree within the
    /// merge tolerance and dropping zero multiplicities.
    pub fn from_entries<I: IntoIterator<Item = (Sphere, i64)>>(entries: I) -> Self {
        let mut out = Self::zero();
        for (s, m) in entries {
            out.insert(s, m);
        }
        out
    }

    /// Adds `mult` at sphere `s`.
    pub fn insert(&mut self, s: Sphere, mult: i64) {
        if mult == 0 {
            return;
        }
        if let Some(pos) = self.entries.iter().position(|(t, _)| t.matches(&s, MERGE_TOLERANCE)) {
            self.entries[pos].1 += mult;
            if self.entries[pos].1 == 0 {
                self.entries.remove(pos);
            }
            return;
        }
        let pos = self.entries.partition_point(|(t, _)| t.cmp_key(&s).is_lt());
        self.entries.insert(pos, (s, mult));
    }

    /// A single sphere with multiplicity `mult`.
    pub fn single(s: Sphere, mult: i64) -> Self {
        Self::from_entries([(s, mult)])
    }

    pub fn entries(&self) -> &[(Sphere, i64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Multiplicity at `s` (spheres compared within `tol`).
    pub fn mult_at(&self, s: &Sphere, tol: f64) -> i64 {
        self.entries.iter().find(|(t, _)| t.matches(s, tol)).map_or(0, |e| e.1)
    }

    /// `d ≥ 0`.
    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|e| e.1 >= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_entries(self.entries.iter().chain(&other.entries).copied())
    }

    pub fn neg(&self) -> Self {
        Self { entries: self.entries.iter().map(|&(s, m)| (s, -m)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Same support with equal multiplicities, sphere coordinates compared
    /// within `tol`.
    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self.entries.iter().all(|(s, m)| other.entries.iter().any(|(t, n)| m == n && s.matches(t, tol)))
    }

    /// Total degree `Σ mult · deg(factor)`, the degree of the monic
    /// polynomial realizing a positive divisor.
    pub fn degree(&self) -> i64 {
        self.entries.iter().map(|(s, m)| m * s.degree() as i64).sum()
    }

    /// The monic polynomial `Π factor(s)^{mult}` of a positive divisor.
    pub fn polynomial(&self) -> Result<RealPoly> {
        self.entries.iter().try_fold(RealPoly::one(), |acc, &(s, m)| {
            if m < 0 {
                return Err(Error::NegativeDivisor { x: s.x, y: s.y, mult: m });
            }
            Ok(&acc * &s.factor().pow(m as u32))
        })
    }
}

impl TryFrom<Vec<DivisorEntry>> for SphericalDivisor {
    type Error = Error;

    fn try_from(v: Vec<DivisorEntry>) -> Result<Self> {
        let mut out = Self::zero();
        for e in v {
            out.insert(Sphere::new(e.x, e.y)?, e.mult);
        }
        Ok(out)
    }
}

impl From<SphericalDivisor> for Vec<DivisorEntry> {
    fn from(d: SphericalDivisor) -> Self {
        d.entries.into_iter().map(|(s, mult)| DivisorEntry { x: s.x, y: s.y, mult }).collect()
    }
}

impl fmt::Display for SphericalDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, m)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}·{s}")?;
        }
        Ok(())
    }
}

/// Functions with a spherical order at every sphere.
pub trait SphericalOrder {
    /// The principal divisor `div(f)`.
    fn div(&self) -> Result<SphericalDivisor>;

    /// `sord_f(s)`: the exponent of the factor of `s` in `f`.
    fn sord(&self, s: &Sphere) -> Result<i64> {
        Ok(self.div()?.mult_at(s, IDENTIFICATION_TOLERANCE))
    }
}

/// `sord` of a polynomial counts exact deflations by the factor of `s`.
impl SphericalOrder for RealPoly {
    fn div(&self) -> Result<SphericalDivisor> {
        Ok(SphericalDivisor::from_entries(
            self.root_spheres()?.into_iter().map(|r| (Sphere { x: r.x, y: r.y }, r.mult as i64)),
        ))
    }

    fn sord(&self, s: &Sphere) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        Ok(self.multiplicity_at(s.x, s.y, DEFLATION_TOLERANCE) as i64)
    }
}

impl SphericalOrder for RegularSeries {
    fn div(&self) -> Result<SphericalDivisor> {
        self.to_real_poly()?.div()
    }

    fn sord(&self, s: &Sphere) -> Result<i64> {
        self.to_real_poly()?.sord(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sph(x: f64, y: f64) -> Sphere {
        Sphere::new(x, y).unwrap()
    }

    fn d(entries: &[(f64, f64, i64)]) -> SphericalDivisor {
        SphericalDivisor::from_entries(entries.iter().map(|&(x, y, m)| (sph(x, y), m)))
    }

    #[test]
    fn group_examples() {
        let a = d(&[(0.0, 1.0, 1), (3.0, 0.0, 1)]);
        assert_eq!(a.add(&SphericalDivisor::zero()), a);
        assert!(d(&[(0.0, 1.0, 2)]).add(&d(&[(0.0, 1.0, -2)])).is_empty());
        assert_eq!(a.add(&d(&[(0.0, 1.0, 1)])), d(&[(0.0, 1.0, 2), (3.0, 0.0, 1)]));
    }

    #[test]
    fn entries_merge_within_tolerance() {
        let a = d(&[(1.0, 2.0, 1), (1.0 + 1e-10, 2.0, 2), (-1.0, 0.0, 1)]);
        assert_eq!(a.len(), 2);
        assert_eq!(a.entries()[0].0, sph(-1.0, 0.0));
        assert_eq!(a.mult_at(&sph(1.0, 2.0), MERGE_TOLERANCE), 3);
        // a real point never merges with a thin sphere
        assert_eq!(d(&[(1.0, 0.0, 1), (1.0, 1e-12, 1)]).len(), 2);
    }

    #[test]
    fn sord_examples() {
        let f = &RealPoly::sphere_factor(0.0, 1.0).pow(2) * &RealPoly::linear(3.0);
        assert_eq!(f.sord(&sph(0.0, 1.0)).unwrap(), 2);
        assert_eq!(f.sord(&sph(3.0, 0.0)).unwrap(), 1);
        assert_eq!(f.sord(&sph(2.0, 0.0)).unwrap(), 0);
        assert!(RealPoly::zero().sord(&sph(0.0, 0.0)).is_err());
    }

    #[test]
    fn div_examples() {
        let p = RealPoly::new(vec![1.0, 0.0, 1.0]);
        assert_eq!(p.div().unwrap(), d(&[(0.0, 1.0, 1)]));
        assert!(RealPoly::one().div().unwrap().is_empty());
        let cubic = RealPoly::new(vec![0.0, -1.0, 0.0, 1.0]);
        assert!(cubic.div().unwrap().matches(&d(&[(0.0, 0.0, 1), (1.0, 0.0, 1), (-1.0, 0.0, 1)]), 1e-12));
        assert!(RealPoly::zero().div().is_err());
    }

    #[test]
    fn polynomial_realizes_positive_divisor() {
        let a = d(&[(0.0, 1.0, 2), (3.0, 0.0, 1)]);
        let p = a.polynomial().unwrap();
        assert_eq!(p.degree(), Some(5));
        assert!(p.div().unwrap().matches(&a, 1e-8));
        assert!(matches!(d(&[(1.0, 0.0, -1)]).polynomial(), Err(Error::NegativeDivisor { .. })));
    }

    #[test]
    fn json_shape() {
        let a = d(&[(3.0, 0.0, 1), (0.0, 1.0, 2)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[{"x":0.0,"y":1.0,"mult":2},{"x":3.0,"y":0.0,"mult":1}]"#);
        let back: SphericalDivisor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<SphericalDivisor>(r#"[{"x":0,"y":-1,"mult":1}]"#).is_err());
    }

    fn divisor() -> impl Strategy<Value = SphericalDivisor> {
        prop::collection::vec((-8i32..8, prop::bool::ANY, 1i32..12, -3i64..4), 0..6).prop_map(|v| {
            SphericalDivisor::from_entries(
                v.into_iter().map(|(x, real, y, m)| (sph(x as f64 / 4.0, if real { 0.0 } else { y as f64 / 4.0 }), m)),
            )
        })
    }

    proptest! {
        #[test]
        fn abelian_group_laws(a in divisor(), b in divisor(), c in divisor()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert!(a.add(&a.neg()).is_empty());
            prop_assert_eq!(a.sub(&b).add(&b), a);
        }

        #[test]
        fn sorted_and_nonzero(a in divisor()) {
            prop_assert!(a.entries().windows(2).all(|w| w[0].0.cmp_key(&w[1].0).is_lt()));
            prop_assert!(a.entries().iter().all(|e| e.1 != 0));
        }
    }
}
