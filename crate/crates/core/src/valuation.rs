//! Valuations on the field of slice preserving rational functions and a
//! checker for the valuation laws.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::Serialize;

use crate::divisor::{Sphere, SphericalOrder};
use crate::error::Result;
use crate::rational::SemiregularRational;
use crate::report::{AxiomReport, Witness};

/// An integer or `+∞`, the value at the zero function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ValuationValue {
    Finite(i64),
    Infinite,
}

impl Ord for ValuationValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.cmp(b),
            (Self::Finite(_), Self::Infinite) => Ordering::Less,
            (Self::Infinite, Self::Finite(_)) => Ordering::Greater,
            (Self::Infinite, Self::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ValuationValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ValuationValue {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinite,
        }
    }
}

impl std::ops::Neg for ValuationValue {
    type Output = Self;

    /// Only meaningful for finite values.
    fn neg(self) -> Self {
        match self {
            Self::Finite(a) => Self::Finite(-a),
            Self::Infinite => Self::Infinite,
        }
    }
}

impl fmt::Display for ValuationValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(a) => write!(f, "{a}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

pub trait Valuation {
    fn value(&self, f: &SemiregularRational) -> Result<ValuationValue>;

    /// True for the spherical order family, where `v(q) ≥ 0` is checked.
    fn is_sord(&self) -> bool {
        false
    }
}

/// `v(f) = sord_s(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SordValuation {
    pub sphere: Sphere,
}

pub fn sord_valuation(sphere: Sphere) -> SordValuation {
    SordValuation { sphere }
}

impl Valuation for SordValuation {
    fn value(&self, f: &SemiregularRational) -> Result<ValuationValue> {
        if f.is_zero() {
            return Ok(ValuationValue::Infinite);
        }
        Ok(ValuationValue::Finite(f.sord(&self.sphere)?))
    }

    fn is_sord(&self) -> bool {
        true
    }
}

/// `v ≡ 0` on nonzero functions.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrivialValuation;

impl Valuation for TrivialValuation {
    fn value(&self, f: &SemiregularRational) -> Result<ValuationValue> {
        Ok(if f.is_zero() { ValuationValue::Infinite } else { ValuationValue::Finite(0) })
    }
}

/// A user-supplied integer map on nonzero functions.
pub struct FnValuation<F>(pub F);

impl<F> Valuation for FnValuation<F>
where
    F: Fn(&SemiregularRational) -> Result<i64>,
{
    fn value(&self, f: &SemiregularRational) -> Result<ValuationValue> {
        if f.is_zero() {
            return Ok(ValuationValue::Infinite);
        }
        Ok(ValuationValue::Finite((self.0)(f)?))
    }
}

fn label(f: &SemiregularRational) -> String {
    format!("{}/{}", f.num(), f.den())
}

fn witness(inputs: Vec<String>, expected: impl fmt::Display, actual: impl fmt::Display) -> Witness {
    Witness { inputs, expected: expected.to_string(), actual: actual.to_string() }
}

/// Checks `v(fg) = v(f) + v(g)` on all pairs, `v(f+g) ≥ min` on pairs with
/// `f ≠ -g`, equality with the minimum where the values differ, `v(1) = 0`,
/// `v(1/f) = -v(f)`, nonnegativity on polynomial samples and, for the
/// spherical order family, `v(q) ≥ 0`.
pub fn check_valuation_axioms(v: &dyn Valuation, samples: &[SemiregularRational]) -> Result<Vec<AxiomReport>> {
    let values = samples.iter().map(|f| v.value(f)).collect::<Result<Vec<_>>>()?;
    let mut v1 = AxiomReport::new("V1 multiplicativity");
    let mut v2 = AxiomReport::new("V2 ultrametric");
    let mut v2s = AxiomReport::new("V2' strict minimum");
    for i in 0..samples.len() {
        for j in i..samples.len() {
            let (f, g) = (&samples[i], &samples[j]);
            let inputs = || vec![label(f), label(g)];
            let prod = v.value(&f.mul(g)?)?;
            v1.record(prod == values[i] + values[j], || witness(inputs(), values[i] + values[j], prod));
            let sum = f.add(g)?;
            if sum.is_zero() {
                continue;
            }
            let vs = v.value(&sum)?;
            let low = values[i].min(values[j]);
            v2.record(vs >= low, || witness(inputs(), format!(">= {low}"), vs));
            if values[i] != values[j] {
                v2s.record(vs == low, || witness(inputs(), low, vs));
            }
        }
    }
    let mut unit = AxiomReport::new("v(1) = 0");
    let one = v.value(&SemiregularRational::one())?;
    unit.record(one == ValuationValue::Finite(0), || witness(vec!["1".into()], 0, one));
    let mut inverse = AxiomReport::new("v(1/f) = -v(f)");
    let mut nonneg = AxiomReport::new("v(f) >= 0 on polynomials");
    for (f, &val) in samples.iter().zip(&values) {
        if f.is_zero() {
            continue;
        }
        let inv = v.value(&f.inv()?)?;
        inverse.record(inv == -val, || witness(vec![label(f)], -val, inv));
        if f.is_holomorphic() {
            nonneg.record(val >= ValuationValue::Finite(0), || witness(vec![label(f)], ">= 0", val));
        }
    }
    let mut out = vec![v1, v2, v2s, unit, inverse, nonneg];
    if v.is_sord() {
        let mut id = AxiomReport::new("v(q) >= 0 (sord family)");
        let got = v.value(&SemiregularRational::identity())?;
        id.record(got >= ValuationValue::Finite(0), || witness(vec!["q".into()], ">= 0", got));
        out.push(id);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realpoly::RealPoly;
    use crate::report::all_passed;
    use proptest::prelude::*;

    fn rat(n: &[f64], d: &[f64]) -> SemiregularRational {
        SemiregularRational::normalize(RealPoly::new(n.to_vec()), RealPoly::new(d.to_vec())).unwrap()
    }

    #[test]
    fn sord_examples() {
        let f = rat(&[1.0, 0.0, 1.0], &[-2.0, 1.0]);
        assert_eq!(sord_valuation(Sphere::new(0.0, 1.0).unwrap()).value(&f).unwrap(), ValuationValue::Finite(1));
        assert_eq!(sord_valuation(Sphere::real(2.0)).value(&f).unwrap(), ValuationValue::Finite(-1));
        for s in [Sphere::real(0.0), Sphere::real(2.0), Sphere::new(0.3, 0.4).unwrap()] {
            assert_eq!(
                sord_valuation(s).value(&SemiregularRational::constant(5.0)).unwrap(),
                ValuationValue::Finite(0)
            );
            assert_eq!(sord_valuation(s).value(&SemiregularRational::zero()).unwrap(), ValuationValue::Infinite);
        }
    }

    #[test]
    fn infinity_orders_above_integers() {
        assert!(ValuationValue::Infinite > ValuationValue::Finite(i64::MAX));
        assert_eq!(ValuationValue::Finite(3) + ValuationValue::Infinite, ValuationValue::Infinite);
        assert_eq!(ValuationValue::Finite(-2).min(ValuationValue::Infinite), ValuationValue::Finite(-2));
    }

    fn samples() -> Vec<SemiregularRational> {
        vec![
            rat(&[1.0, 0.0, 1.0], &[-2.0, 1.0]),
            rat(&[1.0], &[1.0, 0.0, 1.0]),
            rat(&[2.0, 0.0, 1.0], &[1.0]),
            rat(&[0.0, 1.0], &[3.0, 1.0]),
            rat(&[1.0, 0.0, 2.0, 0.0, 1.0], &[1.0, 1.0]),
            SemiregularRational::constant(-4.0),
        ]
    }

    #[test]
    fn sord_passes_all_axioms() {
        for s in [Sphere::new(0.0, 1.0).unwrap(), Sphere::real(2.0), Sphere::real(0.0), Sphere::real(-3.0)] {
            let reports = check_valuation_axioms(&sord_valuation(s), &samples()).unwrap();
            assert!(all_passed(&reports), "{reports:?}");
            assert_eq!(reports.len(), 7);
        }
    }

    #[test]
    fn trivial_valuation_passes() {
        let reports = check_valuation_axioms(&TrivialValuation, &samples()).unwrap();
        assert!(all_passed(&reports));
        assert_eq!(reports.len(), 6);
    }

    #[test]
    fn strict_minimum_witness() {
        let v = sord_valuation(Sphere::new(0.0, 1.0).unwrap());
        let f = rat(&[1.0, 0.0, 1.0], &[1.0]);
        let g = SemiregularRational::one();
        assert_eq!(v.value(&f).unwrap(), ValuationValue::Finite(1));
        assert_eq!(v.value(&f.add(&g).unwrap()).unwrap(), ValuationValue::Finite(0));
    }

    #[test]
    fn broken_valuations_are_reported() {
        let degree = FnValuation(|f: &SemiregularRational| Ok(f.num().degree().unwrap_or(0) as i64 + 1));
        let reports = check_valuation_axioms(&degree, &samples()).unwrap();
        let v1 = reports.iter().find(|r| r.axiom.starts_with("V1")).unwrap();
        assert!(!v1.passed && v1.witness.is_some());
        assert!(!reports.iter().any(|r| r.axiom.contains("sord")));
    }

    proptest! {
        #[test]
        fn sord_is_exactly_additive(a in prop::collection::vec((-2i32..3, 0i32..3, 1i64..3), 0..4), b in prop::collection::vec((-2i32..3, 0i32..3, 1i64..3), 0..4), k in 0usize..4) {
            let build = |v: &[(i32, i32, i64)]| {
                let mut num = RealPoly::one();
                let mut den = RealPoly::one();
                for (idx, &(x, y, m)) in v.iter().enumerate() {
                    let f = RealPoly::factor_for(x as f64, y as f64).pow(m as u32);
                    if idx % 2 == 0 { num = &num * &f } else { den = &den * &f }
                }
                SemiregularRational::normalize(num, den).unwrap()
            };
            let (f, g) = (build(&a), build(&b));
            let spheres: Vec<Sphere> = a.iter().chain(&b).map(|&(x, y, _)| if y == 0 { Sphere::real(x as f64) } else { Sphere::new(x as f64, y as f64).unwrap() }).collect();
            let s = spheres.get(k).copied().unwrap_or(Sphere::real(0.5));
            let v = sord_valuation(s);
            prop_assert_eq!(v.value(&f.mul(&g).unwrap()).unwrap(), v.value(&f).unwrap() + v.value(&g).unwrap());
        }
    }
}
