//! Entire slice preserving functions given as finite products of
//! elementary factors, together with the constructions built from them:
//! realization of spherical divisors, factorization of polynomials, roots
//! of `exp(P)` and the d-adic product family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::divisor::{Sphere, SphericalDivisor, SphericalOrder};
use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::realpoly::{RealPoly, RootSphere};

/// Largest degree the polynomial part is ever expanded to.
pub const MAX_EXPANDED_DEGREE: usize = 512;

/// Default cap on `Σ d^n` for [`isssa_family`].
pub const DEFAULT_EXPONENT_BUDGET: u64 = 10_000;

/// One factor of an [`EntireEvaluator`], raised to `exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Factor {
    /// `q^exponent`.
    Power { exponent: i64 },
    /// `(1 - q/root)^exponent`.
    Linear { root: f64, exponent: i64 },
    /// `(q²/|c|² - 2q·x/|c|² + 1)^exponent` for `c = x + iy`.
    Spherical { x: f64, y: f64, exponent: i64 },
    /// `g_{n,a}(q)^exponent`.
    Convfactor { n: usize, a: f64, exponent: i64 },
    /// `exp(P(q))^exponent` for a real polynomial `P`.
    Exppoly { coeffs: Vec<f64>, exponent: i64 },
}

impl Factor {
    pub fn exponent(&self) -> i64 {
        match self {
            Factor::Power { exponent }
            | Factor::Linear { exponent, .. }
            | Factor::Spherical { exponent, .. }
            | Factor::Convfactor { exponent, .. }
            | Factor::Exppoly { exponent, .. } => *exponent,
        }
    }

    fn with_exponent(&self, e: i64) -> Self {
        let mut f = self.clone();
        match &mut f {
            Factor::Power { exponent }
            | Factor::Linear { exponent, .. }
            | Factor::Spherical { exponent, .. }
            | Factor::Convfactor { exponent, .. }
            | Factor::Exppoly { exponent, .. } => *exponent = e,
        }
        f
    }

    fn validate(&self) -> Result<()> {
        let bad = match self {
            Factor::Power { .. } => false,
            Factor::Linear { root, .. } => *root == 0.0 || !root.is_finite(),
            Factor::Spherical { x, y, .. } => x.hypot(*y) == 0.0 || !x.is_finite() || !y.is_finite(),
            Factor::Convfactor { a, .. } => *a == 0.0 || !a.is_finite(),
            Factor::Exppoly { coeffs, .. } => coeffs.iter().any(|c| !c.is_finite()),
        };
        if bad {
            Err(Error::ZeroParameter)
        } else if i32::try_from(self.exponent()).is_err() {
            Err(Error::InvalidParameter(format!("exponent {} out of range", self.exponent())))
        } else {
            Ok(())
        }
    }

    /// The base of the factor, without the exponent, at `z`.
    fn base(&self, z: Complex64) -> Complex64 {
        match self {
            Factor::Power { .. } => z,
            Factor::Linear { root, .. } => 1.0 - z / root,
            Factor::Spherical { x, y, .. } => {
                let r2 = x * x + y * y;
                z * z / r2 - z * (2.0 * x / r2) + 1.0
            }
            Factor::Convfactor { .. } | Factor::Exppoly { .. } => Complex64::new(1.0, 0.0),
        }
    }

    /// The exponent of the exponential factors, already multiplied by `exponent`.
    fn log(&self, z: Complex64) -> Complex64 {
        let e = self.exponent() as f64;
        match self {
            Factor::Convfactor { n, a, .. } => convergence_log(*n, *a, z) * e,
            Factor::Exppoly { coeffs, .. } => horner(coeffs, z) * e,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Factor::Convfactor { .. } | Factor::Exppoly { .. } => Ok(self.log(z).exp()),
            _ => {
                let b = self.base(z);
                let e = self.exponent();
                if e < 0 && b.norm() == 0.0 {
                    return Err(Error::PoleEvaluation);
                }
                Ok(b.powi(e as i32))
            }
        }
    }

    /// The polynomial base of a zero-carrying factor.
    fn base_poly(&self) -> Option<RealPoly> {
        match self {
            Factor::Power { .. } => Some(RealPoly::identity()),
            Factor::Linear { root, .. } => Some(RealPoly::new(vec![1.0, -1.0 / root])),
            Factor::Spherical { x, y, .. } => {
                let r2 = x * x + y * y;
                Some(RealPoly::new(vec![1.0, -2.0 * x / r2, 1.0 / r2]))
            }
            _ => None,
        }
    }
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `Σ_{k=1..n} z^k a^{-k} / k`.
fn convergence_log(n: usize, a: f64, z: Complex64) -> Complex64 {
    let w = z / a;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        pow *= w;
        sum += pow / k as f64;
    }
    sum
}

/// The convergence-producing factor `g_{n,a}(q) = exp(Σ_{k=1..n} q^k a^{-k}/k)`,
/// with `g_{0,a} = 1`.
pub fn convergence_factor(n: usize, a: f64, q: Quaternion) -> Result<Quaternion> {
    EntireEvaluator::new(vec![Factor::Convfactor { n, a, exponent: 1 }])?.evaluate(q)
}

/// A slice preserving entire function `Π factor_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "EvaluatorJson", into = "EvaluatorJson")]
pub struct EntireEvaluator {
    factors: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct EvaluatorJson {
    factors: Vec<Factor>,
}

impl TryFrom<EvaluatorJson> for EntireEvaluator {
    type Error = Error;

    fn try_from(raw: EvaluatorJson) -> Result<Self> {
        Self::new(raw.factors)
    }
}

impl From<EntireEvaluator> for EvaluatorJson {
    fn from(e: EntireEvaluator) -> Self {
        EvaluatorJson { factors: e.factors }
    }
}

impl EntireEvaluator {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            f.validate()?;
        }
        Ok(Self { factors })
    }

    /// The constant function 1.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Number of retained factors.
    pub fn truncation_count(&self) -> usize {
        self.factors.len()
    }

    /// The product `self · other`.
    pub fn times(&self, other: &Self) -> Self {
        Self { factors: self.factors.iter().chain(&other.factors).cloned().collect() }
    }

    /// `self^e`, by scaling every exponent.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let exp =
                    f.exponent().checked_mul(e).ok_or_else(|| Error::InvalidParameter("exponent overflow".into()))?;
                let g = f.with_exponent(exp);
                g.validate()?;
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }

    /// The same product with factors reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.factors.len()];
        if perm.len() != seen.len() || perm.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidParameter("not a permutation of the factor list".into()));
        }
        Ok(Self { factors: perm.iter().map(|&i| self.factors[i].clone()).collect() })
    }

    /// Value of the restriction to `C_i` at `z`.
    pub fn evaluate_complex(&self, z: Complex64) -> Result<Complex64> {
        let mut log = Complex64::new(0.0, 0.0);
        let mut prod = Complex64::new(1.0, 0.0);
        for f in &self.factors {
            match f {
                Factor::Convfactor { .. } | Factor::Exppoly { .. } => log += f.log(z),
                _ => prod *= f.eval_complex(z)?,
            }
        }
        Ok(prod * log.exp())
    }

    /// Value at `q`, computed on the slice through `q` and transported back.
    pub fn evaluate(&self, q: Quaternion) -> Result<Quaternion> {
        let sc = q.slice_decompose();
        let v = self.evaluate_complex(sc.complex())?;
        Ok(Quaternion::from_complex(v, sc.unit.unwrap_or(UnitImaginary::i())))
    }

    /// Product of the zero-carrying factors, expanded; the exponential
    /// factors are nowhere zero and are left out.
    pub fn polynomial_part(&self) -> Result<RealPoly> {
        let mut degree = 0usize;
        for f in &self.factors {
            if let Some(b) = f.base_poly() {
                if f.exponent() < 0 {
                    return Err(Error::NotPolynomial);
                }
                degree = degree.saturating_add(b.degree().unwrap_or(0).saturating_mul(f.exponent() as usize));
            }
        }
        if degree > MAX_EXPANDED_DEGREE {
            return Err(Error::DegreeTooLarge { degree, cap: MAX_EXPANDED_DEGREE });
        }
        Ok(self
            .factors
            .iter()
            .filter_map(|f| f.base_poly().map(|b| b.pow(f.exponent() as u32)))
            .fold(RealPoly::one(), |acc, p| &acc * &p))
    }

    /// Divisor read off from the factor data, without any root finding.
    pub fn nominal_divisor(&self) -> Result<SphericalDivisor> {
        let mut d = SphericalDivisor::zero();
        for f in &self.factors {
            match f {
                Factor::Power { exponent } => d.insert(Sphere::real(0.0), *exponent),
                Factor::Linear { root, exponent } => d.insert(Sphere::real(*root), *exponent),
                Factor::Spherical { x, y, exponent } => d.insert(Sphere::new(*x, y.abs())?, *exponent),
                _ => {}
            }
        }
        Ok(d)
    }

    /// Largest relative change between `self` and `other` over `grid`.
    pub fn relative_gap(&self, other: &Self, grid: &[Quaternion]) -> Result<f64> {
        grid.iter().try_fold(0.0f64, |worst, &q| Ok(worst.max(self.evaluate(q)?.rel_dist(other.evaluate(q)?))))
    }
}

impl SphericalOrder for EntireEvaluator {
    fn div(&self) -> Result<SphericalDivisor> {
        self.polynomial_part()?.div()
    }

    fn sord(&self, s: &Sphere) -> Result<i64> {
        self.polynomial_part()?.sord(s)
    }
}

/// Empirical compact convergence: doubling the number of factors of
/// `family` from `count` changes values on `grid` by at most `tol`
/// relatively.
pub fn converges_by_doubling<F>(family: F, count: usize, grid: &[Quaternion], tol: f64) -> Result<bool>
where
    F: Fn(usize) -> Result<EntireEvaluator>,
{
    Ok(family(count)?.relative_gap(&family(2 * count)?, grid)? <= tol)
}

/// Realizes a positive spherical divisor as an entire function with
/// exactly those zeros. Real zeros `b ≠ 0` carry `(1 - q/b)·g_{genus,b}`,
/// spherical zeros with representative `c = x + iy` carry the normalized
/// quadratic times `exp(Σ_{k≤genus} q^k·2Re(c^k)/(k|c|^{2k}))`.
pub fn construct_from_divisor(d: &SphericalDivisor, genus: usize) -> Result<EntireEvaluator> {
    let mut factors = Vec::new();
    for &(s, mult) in d.entries() {
        if mult < 0 {
            return Err(Error::NegativeDivisor { x: s.x, y: s.y, mult });
        }
        if s.x == 0.0 && s.y == 0.0 {
            factors.push(Factor::Power { exponent: mult });
        } else if s.is_real() {
            factors.push(Factor::Linear { root: s.x, exponent: mult });
            if genus > 0 {
                factors.push(Factor::Convfactor { n: genus, a: s.x, exponent: mult });
            }
        } else {
            factors.push(Factor::Spherical { x: s.x, y: s.y, exponent: mult });
            if genus > 0 {
                factors.push(Factor::Exppoly { coeffs: spherical_exponent(s.x, s.y, genus), exponent: mult });
            }
        }
    }
    EntireEvaluator::new(factors)
}

/// Coefficients `0, 2Re(c)/|c|², ..., 2Re(c^n)/(n|c|^{2n})` for `c = x + iy`.
fn spherical_exponent(x: f64, y: f64, n: usize) -> Vec<f64> {
    let c = Complex64::new(x, y);
    let r2 = c.norm_sqr();
    let mut out = vec![0.0];
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        pow *= c / r2;
        out.push(2.0 * pow.re / k as f64);
    }
    out
}

/// A real root with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealFactor {
    pub root: f64,
    pub mult: u32,
}

/// A sphere of zeros `[x + yS]`, `y > 0`, with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalFactor {
    pub x: f64,
    pub y: f64,
    pub mult: u32,
}

/// `f = q^m · Π (q - b)^{mult} · Π ((q - x)² + y²)^{mult} · h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub m: u32,
    pub real_factors: Vec<RealFactor>,
    pub spherical_factors: Vec<SphericalFactor>,
    pub h: f64,
}

impl Factorization {
    pub fn reconstruct(&self) -> RealPoly {
        let mut p = RealPoly::monomial(self.m as usize).scale(self.h);
        for r in &self.real_factors {
            p = &p * &RealPoly::linear(r.root).pow(r.mult);
        }
        for s in &self.spherical_factors {
            p = &p * &RealPoly::sphere_factor(s.x, s.y).pow(s.mult);
        }
        p
    }

    /// The same function as a normalized product: `q^m`, `(1 - q/b)` and
    /// `q²/|c|² - 2qx/|c|² + 1` factors, with the constant moved into `h`.
    pub fn normalized(&self) -> (EntireEvaluator, f64) {
        let mut h = self.h;
        let mut factors = vec![Factor::Power { exponent: self.m as i64 }];
        for r in &self.real_factors {
            h *= (-r.root).powi(r.mult as i32);
            factors.push(Factor::Linear { root: r.root, exponent: r.mult as i64 });
        }
        for s in &self.spherical_factors {
            h *= (s.x * s.x + s.y * s.y).powi(s.mult as i32);
            factors.push(Factor::Spherical { x: s.x, y: s.y, exponent: s.mult as i64 });
        }
        (EntireEvaluator { factors }, h)
    }
}

/// Decomposes a slice preserving polynomial into its zero factors and a
/// nonvanishing constant.
pub fn factorize_polynomial(f: &RealPoly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let mut out = Factorization { m: 0, real_factors: Vec::new(), spherical_factors: Vec::new(), h: f.leading() };
    let spheres: Vec<RootSphere> = if f.is_constant() { Vec::new() } else { f.root_spheres()? };
    for r in spheres {
        if r.x == 0.0 && r.y == 0.0 {
            out.m = r.mult;
        } else if r.y == 0.0 {
            out.real_factors.push(RealFactor { root: r.x, mult: r.mult });
        } else {
            out.spherical_factors.push(SphericalFactor { x: r.x, y: r.y, mult: r.mult });
        }
    }
    Ok(out)
}

/// An `ell`-th root of `exp(P)`: the function `exp(P/ell)`.
pub fn exp_poly_root(p: &RealPoly, ell: u32) -> Result<EntireEvaluator> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be positive".into()));
    }
    let coeffs = p.coeffs().iter().map(|c| c / ell as f64).collect();
    EntireEvaluator::new(vec![Factor::Exppoly { coeffs, exponent: 1 }])
}

/// Truncations of the d-adic product with zeros `a_n = n` and the
/// auxiliary functions built from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsssaFamily {
    pub d: u32,
    pub ell: u32,
    /// `Π_{n≤N} (1 - q/n)^{d^n} g_{n,n}^{d^n}`.
    pub p_d: EntireEvaluator,
    /// The tail `Π_{ℓ≤n≤N} (1 - q/n)^{d^n} g_{n,n}^{d^n}`.
    pub p_ell: EntireEvaluator,
    /// `P_d` with the first `ℓ - 1` linear factors removed.
    pub h_ell: EntireEvaluator,
    /// `Π_{ℓ≤n≤N} (1 - q/n)^{d^{n-ℓ}} g_{n,n}^{d^{n-ℓ}}`, a `d^ℓ`-th root of `P_ℓ`.
    pub q_ell: EntireEvaluator,
    /// `G_h` with `G_h^{d^ℓ} = g_{h,h}`, for `1 ≤ h < ℓ`.
    pub g_list: Vec<EntireEvaluator>,
}

/// Builds the family with `n_factors` zero factors, checking `Σ d^n`
/// against `budget`.
pub fn isssa_family(d: u32, ell: u32, n_factors: usize, budget: u64) -> Result<IsssaFamily> {
    if d < 2 || ell < 2 {
        return Err(Error::InvalidParameter(format!("need d >= 2 and ell >= 2, got d = {d}, ell = {ell}")));
    }
    if n_factors < ell as usize {
        return Err(Error::InvalidParameter(format!("n_factors = {n_factors} is below ell = {ell}")));
    }
    let exceeded = || Error::BudgetExceeded { cost: u64::MAX, cap: budget };
    let mut powers = vec![1u64];
    let mut cost = 0u64;
    for n in 1..=n_factors {
        let p = powers[n - 1].checked_mul(d as u64).ok_or_else(exceeded)?;
        cost = cost.checked_add(p).ok_or_else(exceeded)?;
        if cost > budget {
            return Err(Error::BudgetExceeded { cost, cap: budget });
        }
        powers.push(p);
    }
    let ell_u = ell as usize;
    let zero_factor = |n: usize, e: u64| {
        let a = n as f64;
        vec![Factor::Linear { root: a, exponent: e as i64 }, Factor::Convfactor { n, a, exponent: e as i64 }]
    };
    let p_d = EntireEvaluator::new((1..=n_factors).flat_map(|n| zero_factor(n, powers[n])).collect())?;
    let p_ell = EntireEvaluator::new((ell_u..=n_factors).flat_map(|n| zero_factor(n, powers[n])).collect())?;
    let head = (1..ell_u).map(|h| Factor::Convfactor { n: h, a: h as f64, exponent: powers[h] as i64 });
    let h_ell = EntireEvaluator::new(head.chain(p_ell.factors.iter().cloned()).collect())?;
    let q_ell = EntireEvaluator::new((ell_u..=n_factors).flat_map(|n| zero_factor(n, powers[n - ell_u])).collect())?;
    let g_list = (1..ell_u)
        .map(|h| {
            let a = h as f64;
            let coeffs = (0..=h).map(|k| if k == 0 { 0.0 } else { a.powi(-(k as i32)) / k as f64 }).collect();
            exp_poly_root(&RealPoly::new(coeffs), powers[ell_u] as u32)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IsssaFamily { d, ell, p_d, p_ell, h_ell, q_ell, g_list })
}

impl IsssaFamily {
    /// `(H_ℓ(q), (Q_ℓ(q)·Π G_h(q)^{d^h})^{d^ℓ})`, each side evaluated
    /// numerically from its own factors.
    pub fn identity_sides(&self, q: Quaternion) -> Result<(Quaternion, Quaternion)> {
        let sc = q.slice_decompose();
        let unit = sc.unit.unwrap_or(UnitImaginary::i());
        let z = sc.complex();
        let lhs = self.h_ell.evaluate_complex(z)?;
        let mut inner = self.q_ell.evaluate_complex(z)?;
        for (h, g) in self.g_list.iter().enumerate() {
            inner *= g.evaluate_complex(z)?.powi((self.d as i32).pow(h as u32 + 1));
        }
        let rhs = inner.powi((self.d as i32).pow(self.ell));
        Ok((Quaternion::from_complex(lhs, unit), Quaternion::from_complex(rhs, unit)))
    }

    /// Largest relative residual of the identity over `points`.
    pub fn identity_residual(&self, points: &[Quaternion]) -> Result<f64> {
        points.iter().try_fold(0.0f64, |worst, &q| {
            let (l, r) = self.identity_sides(q)?;
            Ok(worst.max(l.rel_dist(r)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_q(rng: &mut ChaCha8Rng, r: f64) -> Quaternion {
        Quaternion::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
    }

    #[test]
    fn convergence_factor_examples() {
        let q = Quaternion::new(0.3, -1.0, 2.0, 0.5);
        assert_eq!(convergence_factor(0, 3.0, q).unwrap(), Quaternion::ONE);
        assert_eq!(convergence_factor(1, 1.0, Quaternion::ZERO).unwrap(), Quaternion::ONE);
        let v = convergence_factor(2, 2.0, Quaternion::ONE).unwrap();
        assert_relative_eq!(v.re(), 0.625f64.exp(), max_relative = 1e-15);
        assert!(matches!(convergence_factor(2, 0.0, q), Err(Error::ZeroParameter)));
    }

    #[test]
    fn convergence_factor_matches_quaternion_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (n, a, q) = (rng.gen_range(0..7), rng.gen_range(1.0f64..4.0), random_q(&mut rng, 1.0));
            let mut sum = Quaternion::ZERO;
            for k in 1..=n {
                sum += q.powi(k as i64).unwrap() * (a.powi(-(k as i32)) / k as f64);
            }
            assert!(convergence_factor(n, a, q).unwrap().rel_dist(sum.exp()) <= 1e-12);
        }
    }

    #[test]
    fn convergence_factors_never_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.gen_range(0..=6);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let mut q = random_q(&mut rng, 10.0);
            if q.norm() > 10.0 {
                q = q * (10.0 / q.norm());
            }
            // The modulus is exp(Re L) with L the finite exponent; below
            // |a| = 3 that can leave the range of f64, so the float check
            // is made where it is representable and L is checked everywhere.
            let a = rng.gen_range(3.0..10.0) * sign;
            assert!(convergence_factor(n, a, q).unwrap().norm() > 0.0);
            let small = rng.gen_range(0.2..3.0) * sign;
            let sc = q.slice_decompose();
            assert!(convergence_log(n, small, sc.complex()).re.is_finite());
        }
    }

    #[test]
    fn construct_examples() {
        let d = SphericalDivisor::single(Sphere::real(3.0), 1);
        let e = construct_from_divisor(&d, 0).unwrap();
        assert_eq!(e.evaluate(Quaternion::real(3.0)).unwrap(), Quaternion::ZERO);
        assert_eq!(e.evaluate(Quaternion::ZERO).unwrap(), Quaternion::ONE);
        let d = SphericalDivisor::single(Sphere::new(0.0, 1.0).unwrap(), 1);
        let e = construct_from_divisor(&d, 0).unwrap();
        assert!(e.evaluate(Quaternion::I).unwrap().norm() < 1e-15);
        assert!(e.evaluate(Quaternion::J).unwrap().norm() < 1e-15);
        assert_eq!(e.evaluate(Quaternion::ZERO).unwrap(), Quaternion::ONE);
        let e = construct_from_divisor(&SphericalDivisor::zero(), 2).unwrap();
        assert_eq!(e.evaluate(Quaternion::new(1.0, 2.0, 3.0, 4.0)).unwrap(), Quaternion::ONE);
        let neg = SphericalDivisor::single(Sphere::real(1.0), -1);
        assert!(matches!(construct_from_divisor(&neg, 0), Err(Error::NegativeDivisor { .. })));
    }

    #[test]
    fn spherical_exponent_cancels_logarithm() {
        // log(1 - z/c) + log(1 - z/c̄) = -Σ z^k (c^{-k} + c̄^{-k}) / k near 0.
        let (x, y) = (1.3, 0.7);
        let d = SphericalDivisor::single(Sphere::new(x, y).unwrap(), 1);
        let e = construct_from_divisor(&d, 40).unwrap();
        let z = Complex64::new(0.1, 0.05);
        assert!((e.evaluate_complex(z).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn genus_keeps_divisor() {
        let d = SphericalDivisor::from_entries([
            (Sphere::real(0.0), 2),
            (Sphere::real(-1.5), 1),
            (Sphere::new(0.5, 1.0).unwrap(), 2),
        ]);
        for genus in 0..4 {
            let e = construct_from_divisor(&d, genus).unwrap();
            assert_eq!(e.nominal_divisor().unwrap(), d);
            assert!(e.div().unwrap().matches(&d, 1e-6));
        }
    }

    #[test]
    fn factorize_examples() {
        let f = factorize_polynomial(&RealPoly::new(vec![0.0, -1.0, 0.0, 1.0])).unwrap();
        assert_eq!((f.m, f.h), (1, 1.0));
        assert!(f.spherical_factors.is_empty());
        let mut roots: Vec<f64> = f.real_factors.iter().map(|r| r.root).collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] + 1.0).abs() < 1e-12 && (roots[1] - 1.0).abs() < 1e-12);
        let g = factorize_polynomial(&RealPoly::new(vec![1.0, 0.0, 1.0])).unwrap();
        assert_eq!((g.m, g.h, g.real_factors.len()), (0, 1.0, 0));
        assert!((g.spherical_factors[0].x).abs() < 1e-12 && (g.spherical_factors[0].y - 1.0).abs() < 1e-12);
        let c = factorize_polynomial(&RealPoly::constant(5.0)).unwrap();
        assert_eq!(c, Factorization { m: 0, real_factors: vec![], spherical_factors: vec![], h: 5.0 });
        assert!(matches!(factorize_polynomial(&RealPoly::zero()), Err(Error::ZeroFunction)));
    }

    #[test]
    fn normalized_factorization_agrees() {
        let p = &(&RealPoly::new(vec![0.0, 3.0]) * &RealPoly::linear(2.0)) * &RealPoly::sphere_factor(1.0, 1.0);
        let f = factorize_polynomial(&p).unwrap();
        let (e, h) = f.normalized();
        let z = Complex64::new(0.4, -0.9);
        assert!((e.evaluate_complex(z).unwrap() * h - p.eval_complex(z)).norm() < 1e-12);
    }

    #[test]
    fn exp_root_examples() {
        let q2 = RealPoly::monomial(2);
        let v = exp_poly_root(&q2, 2).unwrap().evaluate(Quaternion::ONE).unwrap();
        assert_relative_eq!((v * v).re(), std::f64::consts::E, max_relative = 1e-15);
        let c = exp_poly_root(&RealPoly::zero(), 7).unwrap();
        assert_eq!(c.evaluate(Quaternion::new(1.0, 2.0, 0.0, 0.0)).unwrap(), Quaternion::ONE);
        let q = Quaternion::new(0.0, std::f64::consts::PI, 0.0, 0.0);
        let v = exp_poly_root(&RealPoly::identity(), 3).unwrap().evaluate(q).unwrap();
        assert!((v * v * v + Quaternion::ONE).norm() < 1e-14);
        assert!(exp_poly_root(&q2, 0).is_err());
    }

    #[test]
    fn isssa_examples() {
        let fam = isssa_family(2, 2, 3, DEFAULT_EXPONENT_BUDGET).unwrap();
        assert_eq!(fam.p_d.evaluate(Quaternion::ONE).unwrap(), Quaternion::ZERO);
        assert!(fam.p_d.evaluate(Quaternion::real(0.5)).unwrap().norm() > 0.0);
        assert!(fam.identity_residual(&[Quaternion::real(1.0 / 3.0)]).unwrap() <= 1e-6);
        for (d, ell) in [(2, 2), (3, 2), (2, 3)] {
            let fam = isssa_family(d, ell, 4, DEFAULT_EXPONENT_BUDGET).unwrap();
            for e in [&fam.p_d, &fam.p_ell, &fam.h_ell, &fam.q_ell].into_iter().chain(&fam.g_list) {
                assert_eq!(e.evaluate(Quaternion::ZERO).unwrap(), Quaternion::ONE);
            }
        }
        assert!(matches!(isssa_family(10, 2, 5, DEFAULT_EXPONENT_BUDGET), Err(Error::BudgetExceeded { .. })));
        assert!(isssa_family(2, 3, 2, DEFAULT_EXPONENT_BUDGET).is_err());
    }

    #[test]
    fn isssa_zero_orders() {
        let fam = isssa_family(2, 2, 3, DEFAULT_EXPONENT_BUDGET).unwrap();
        let p = fam.p_d.polynomial_part().unwrap();
        for (n, m) in [(1.0, 2), (2.0, 4), (3.0, 8)] {
            assert_eq!(p.multiplicity_at(n, 0.0, 1e-7), m);
        }
    }

    #[test]
    fn isssa_product_converges() {
        let grid: Vec<Quaternion> = (0..8)
            .map(|k| Quaternion::new(0.4 * (k as f64 * 0.8).cos(), 0.4 * (k as f64 * 0.8).sin(), 0.0, 0.0))
            .collect();
        let family = |n| Ok(isssa_family(2, 2, n, DEFAULT_EXPONENT_BUDGET)?.p_d);
        assert!(converges_by_doubling(family, 6, &grid, 1e-6).unwrap());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let e = EntireEvaluator::new(vec![Factor::Linear { root: 2.0, exponent: 600 }]).unwrap();
        assert!(matches!(e.polynomial_part(), Err(Error::DegreeTooLarge { .. })));
        assert!(e.evaluate(Quaternion::real(1.0)).is_ok());
    }

    #[test]
    fn json_shape() {
        let e = EntireEvaluator::new(vec![Factor::Power { exponent: 2 }, Factor::Linear { root: 3.0, exponent: 1 }])
            .unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["factors"][0]["kind"], "power");
        assert_eq!(v["factors"][1]["root"], 3.0);
        assert_eq!(serde_json::from_value::<EntireEvaluator>(v).unwrap(), e);
        let bad = serde_json::json!({"factors": [{"kind": "linear", "root": 0.0, "exponent": 1}]});
        assert!(serde_json::from_value::<EntireEvaluator>(bad).is_err());
    }

    fn evaluator() -> impl Strategy<Value = EntireEvaluator> {
        let factor = prop_oneof![
            (0i64..3).prop_map(|e| Factor::Power { exponent: e }),
            (0.5f64..3.0, 0i64..3).prop_map(|(r, e)| Factor::Linear { root: r, exponent: e }),
            (-2.0f64..2.0, 0.2f64..2.0, 0i64..3).prop_map(|(x, y, e)| Factor::Spherical { x, y, exponent: e }),
            (0usize..4, 0.5f64..3.0, -2i64..3).prop_map(|(n, a, e)| Factor::Convfactor { n, a, exponent: e }),
            (prop::collection::vec(-1.0f64..1.0, 0..4), -2i64..3)
                .prop_map(|(c, e)| Factor::Exppoly { coeffs: c, exponent: e }),
        ];
        prop::collection::vec(factor, 0..6).prop_map(|f| EntireEvaluator::new(f).unwrap())
    }

    proptest! {
        #[test]
        fn evaluators_preserve_slices(e in evaluator(), v in prop::array::uniform3(-1.0f64..1.0), x in -1.5f64..1.5, y in 0.01f64..1.5) {
            prop_assume!(v.iter().map(|t| t * t).sum::<f64>() > 1e-3);
            let u = UnitImaginary::normalize(v[0], v[1], v[2]).unwrap();
            let val = e.evaluate(Quaternion::from_slice(x, y, u)).unwrap();
            prop_assert!(val.off_slice_norm(u) <= 1e-9 * val.norm().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn factor_order_is_irrelevant(e in evaluator(), seed in any::<u64>(), q in prop::array::uniform4(-1.5f64..1.5)) {
            use rand::seq::SliceRandom;
            let mut perm: Vec<usize> = (0..e.truncation_count()).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let q = Quaternion::from_array(q);
            let a = e.evaluate(q).unwrap();
            let b = e.permuted(&perm).unwrap().evaluate(q).unwrap();
            prop_assert!(a.rel_dist(b) <= 1e-10);
        }

        #[test]
        fn exp_root_identity(p in prop::collection::vec(-1.0f64..1.0, 0..5), ell in prop::sample::select(vec![2u32, 3, 5]), q in prop::array::uniform4(-1.0f64..1.0)) {
            let p = RealPoly::new(p);
            let q = Quaternion::from_array(q);
            let root = exp_poly_root(&p, ell).unwrap().evaluate(q).unwrap();
            let lhs = root.powi(ell as i64).unwrap();
            prop_assert!(lhs.rel_dist(p.eval_quaternion(q).exp()) <= 1e-9);
        }

        #[test]
        fn positive_divisors_round_trip(entries in prop::collection::vec((-3.0f64..3.0, prop::bool::ANY, 0.3f64..2.0, 1i64..4), 1..4)) {
            let d = SphericalDivisor::from_entries(entries.into_iter().map(|(x, real, y, m)| {
                (if real { Sphere::real((x * 2.0).round() / 2.0) } else { Sphere::new((x * 2.0).round() / 2.0, (y * 2.0).round() / 2.0 + 0.5).unwrap() }, m)
            }));
            let e = construct_from_divisor(&d, 1).unwrap();
            let got = e.div().unwrap();
            prop_assert!(got.matches(&d, 1e-6), "{} vs {}", got, d);
        }
    }
}
