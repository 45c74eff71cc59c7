//! Seeded property suites exercising the library end to end. Each suite
//! draws its own random inputs from the seed and reports how many checks
//! ran, how many failed and the worst error seen.

use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::characters::{
    bers_recover, check_character_axioms, composition_oracle, CharacterSamples, EvaluationCharacter,
};
use crate::divisor::{Sphere, SphericalDivisor, SphericalOrder, IDENTIFICATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::rational::SemiregularRational;
use crate::realpoly::RealPoly;
use crate::report::all_passed;
use crate::series::{extend_with, RegularSeries, Zero};
use crate::valuation::{check_valuation_axioms, sord_valuation, Valuation, ValuationValue};
use crate::weierstrass::{construct_from_divisor, exp_poly_root, isssa_family, DEFAULT_EXPONENT_BUDGET};

/// Suite names with the number of the criterion each one checks.
pub const SUITES: [(&str, u32); 11] = [
    ("star", 1),
    ("commutativity", 2),
    ("representation", 3),
    ("zeros", 4),
    ("divisor", 5),
    ("realization", 6),
    ("exp-root", 7),
    ("isssa", 8),
    ("valuation", 9),
    ("character", 10),
    ("laurent", 11),
];

/// Minimum distance between prescribed root points in generated divisors.
pub const SPHERE_SEPARATION: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: u32,
    pub passed: bool,
    pub checks: u64,
    pub failures: u64,
    pub worst: f64,
    pub tolerance: f64,
    pub first_failure: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

struct Tally {
    checks: u64,
    failures: u64,
    worst: f64,
    tol: f64,
    first: Option<String>,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Self { checks: 0, failures: 0, worst: 0.0, tol, first: None }
    }

    fn error(&mut self, err: f64, what: impl FnOnce() -> String) {
        let err = if err.is_nan() { f64::INFINITY } else { err };
        self.worst = self.worst.max(err);
        self.flag(err <= self.tol, what);
    }

    fn flag(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn finish(self, suite: &str, criterion: u32, start: Instant) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            criterion,
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst: self.worst,
            tolerance: self.tol,
            first_failure: self.first,
            elapsed: start.elapsed(),
        }
    }
}

/// Runs the suite called `name`.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let &(suite, criterion) = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {name:?}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(criterion as u64);
    let start = Instant::now();
    let tally = match criterion {
        1 => star_suite(&mut rng)?,
        2 => commutativity_suite(&mut rng)?,
        3 => representation_suite(&mut rng)?,
        4 => zeros_suite(&mut rng)?,
        5 => divisor_suite(&mut rng)?,
        6 => realization_suite(&mut rng)?,
        7 => exp_root_suite(&mut rng)?,
        8 => isssa_suite(&mut rng)?,
        9 => valuation_suite(&mut rng)?,
        10 => character_suite(&mut rng)?,
        _ => laurent_suite(&mut rng)?,
    };
    Ok(tally.finish(suite, criterion, start))
}

/// Runs every suite, or the one called `name` unless it is `"all"`.
pub fn run_suites(name: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        SUITES.iter().map(|(n, _)| run_suite(n, seed)).collect()
    } else {
        Ok(vec![run_suite(name, seed)?])
    }
}

pub fn random_quaternion(rng: &mut impl Rng, radius: f64) -> Quaternion {
    loop {
        let v = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm() <= 1.0 {
            return v * radius;
        }
    }
}

pub fn random_unit(rng: &mut impl Rng) -> UnitImaginary {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = v.iter().map(|t| t * t).sum::<f64>();
        if n > 1e-2 && n <= 1.0 {
            return UnitImaginary::normalize(v[0], v[1], v[2]).expect("nonzero vector");
        }
    }
}

/// A random unit orthogonal to `i`.
pub fn random_orthogonal(rng: &mut impl Rng, i: UnitImaginary) -> UnitImaginary {
    loop {
        let v = random_unit(rng).to_quaternion();
        let w = v - i.to_quaternion() * v.dot(i.to_quaternion());
        if w.norm() > 0.1 {
            return UnitImaginary::normalize(w.x, w.y, w.z).expect("nonzero vector");
        }
    }
}

/// Polynomial of degree drawn from `degrees` with quaternion coefficients
/// of norm at most `mag`.
pub fn random_series(rng: &mut impl Rng, degrees: RangeInclusive<usize>, mag: f64) -> RegularSeries {
    let degree = rng.gen_range(degrees);
    RegularSeries::polynomial((0..=degree).map(|_| random_quaternion(rng, mag)).collect())
}

pub fn random_real_poly(rng: &mut impl Rng, degrees: RangeInclusive<usize>, mag: f64) -> RealPoly {
    let degree = rng.gen_range(degrees);
    RealPoly::new((0..=degree).map(|_| rng.gen_range(-mag..mag)).collect())
}

/// Distinct spheres, as many as drawn from `counts`, whose root points
/// `x ± iy` are pairwise at least [`SPHERE_SEPARATION`] apart, with
/// multiplicities in `1..=max_mult`. The sphere at the origin is allowed
/// when `with_origin` holds.
pub fn random_divisor(
    rng: &mut impl Rng,
    counts: RangeInclusive<usize>,
    max_mult: i64,
    with_origin: bool,
) -> SphericalDivisor {
    let count = rng.gen_range(counts);
    let mut spheres: Vec<Sphere> = Vec::new();
    if with_origin && rng.gen_bool(0.25) && count > 0 {
        spheres.push(Sphere::real(0.0));
    }
    while spheres.len() < count {
        let x = (rng.gen_range(-3.0f64..3.0) * 8.0).round() / 8.0;
        let y = if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(0.25f64..3.0) };
        if x == 0.0 && y == 0.0 {
            continue;
        }
        if spheres.iter().any(|s| (s.x - x).hypot(s.y - y) < SPHERE_SEPARATION)
            || (y > 0.0 && 2.0 * y < SPHERE_SEPARATION)
        {
            continue;
        }
        spheres.push(if y == 0.0 { Sphere::real(x) } else { Sphere::new(x, y).expect("positive radius") });
    }
    SphericalDivisor::from_entries(spheres.into_iter().map(|s| (s, rng.gen_range(1..=max_mult))))
}

/// `|a - b| / max(|a|, |b|, scale)`.
fn rel(a: Quaternion, b: Quaternion, scale: f64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.norm().max(b.norm()).max(scale)
    }
}

fn abs_scale(f: &RegularSeries, r: f64) -> f64 {
    f.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn slice_point(rng: &mut impl Rng, unit: UnitImaginary, radius: f64) -> Quaternion {
    let z = Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
    Quaternion::from_complex(z, unit)
}

fn star_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for pair in 0..200 {
        let f = random_series(rng, 0..=6, 2.0);
        let g = random_series(rng, 0..=6, 2.0);
        let i = random_unit(rng);
        let j = random_orthogonal(rng, i);
        let points: Vec<Quaternion> = (0..20).map(|_| slice_point(rng, i, 1.5)).collect();
        let split = f.star_via_splitting(&g, i, j, &points)?;
        let fg = f.star(&g)?;
        for (&q, &s) in points.iter().zip(&split) {
            let direct = fg.evaluate(q)?;
            let scale = abs_scale(&f, q.norm()) * abs_scale(&g, q.norm());
            t.error(rel(s, direct, scale), || format!("pair {pair} at {q}: {s} vs {direct}"));
        }
    }
    Ok(t)
}

fn commutativity_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for pair in 0..100 {
        let f = RegularSeries::from_real_poly(&random_real_poly(rng, 0..=6, 2.0));
        let g = random_series(rng, 0..=6, 2.0);
        let (fg, gf) = (f.star(&g)?, g.star(&f)?);
        for _ in 0..50 {
            let q = random_quaternion(rng, 1.5);
            let pointwise = f.evaluate(q)? * g.evaluate(q)?;
            let scale = abs_scale(&f, q.norm()) * abs_scale(&g, q.norm());
            let (a, b) = (fg.evaluate(q)?, gf.evaluate(q)?);
            t.error(rel(a, pointwise, scale), || format!("pair {pair}: f*g at {q}: {a} vs {pointwise}"));
            t.error(rel(b, pointwise, scale), || format!("pair {pair}: g*f at {q}: {b} vs {pointwise}"));
        }
    }
    Ok(t)
}

fn representation_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for k in 0..100 {
        let f = random_series(rng, 0..=6, 2.0);
        for _ in 0..100 {
            let q = random_quaternion(rng, 1.5);
            let ext = extend_with(
                |z| f.evaluate(z).unwrap_or(Quaternion::new(f64::NAN, 0.0, 0.0, 0.0)),
                UnitImaginary::i(),
                q,
            );
            let direct = f.evaluate(q)?;
            t.error(rel(ext, direct, abs_scale(&f, q.norm())), || format!("polynomial {k} at {q}: {ext} vs {direct}"));
        }
    }
    Ok(t)
}

fn zeros_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-7);
    for pair in 0..100 {
        let f = random_series(rng, 1..=3, 2.0);
        let g = random_series(rng, 1..=3, 2.0);
        let fg = f.star(&g)?;
        let zeros = fg.zeros()?;
        t.flag(!zeros.is_empty(), || format!("pair {pair}: no zeros found"));
        for z in zeros {
            let points: Vec<Quaternion> = match z {
                Zero::Isolated(p) => vec![p],
                Zero::Spherical { x, y } => (0..4).map(|_| Quaternion::from_slice(x, y, random_unit(rng))).collect(),
            };
            for p in points {
                let r = p.norm();
                let fp = f.evaluate(p)?;
                let f_res = fp.norm() / abs_scale(&f, r);
                let g_res = match fp.inverse() {
                    Ok(inv) => g.evaluate(inv * p * fp)?.norm() / abs_scale(&g, r),
                    Err(_) => f64::INFINITY,
                };
                let fg_res = fg.evaluate(p)?.norm() / abs_scale(&fg, r);
                t.error(fg_res, || format!("pair {pair}: {p} is not a zero of f*g ({fg_res:e})"));
                t.error(f_res.min(g_res), || format!("pair {pair}: dichotomy fails at {p} ({f_res:e}, {g_res:e})"));
            }
        }
    }
    Ok(t)
}

/// Monic product realizing a positive divisor.
fn product_of(d: &SphericalDivisor, lead: f64) -> RealPoly {
    d.entries().iter().fold(RealPoly::constant(lead), |acc, (s, m)| &acc * &s.factor().pow(*m as u32))
}

fn signed_scalar(rng: &mut impl Rng) -> f64 {
    rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
}

fn divisor_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(0.0);
    for pair in 0..50 {
        let total = random_divisor(rng, 1..=6, 3, true);
        let mut df = SphericalDivisor::zero();
        let mut dg = SphericalDivisor::zero();
        for &(s, m) in total.entries() {
            let mf = rng.gen_range(0..=m);
            df.insert(s, mf);
            dg.insert(s, m - mf);
        }
        let f = product_of(&df, signed_scalar(rng));
        let g = product_of(&dg, signed_scalar(rng));
        let (div_f, div_g, div_fg) = (f.div()?, g.div()?, (&f * &g).div()?);
        let tol = IDENTIFICATION_TOLERANCE;
        t.flag(div_f.matches(&df, tol) && div_g.matches(&dg, tol), || {
            format!("pair {pair}: factors {df} / {dg} recovered as {div_f} / {div_g}")
        });
        t.flag(div_fg.matches(&total, tol), || format!("pair {pair}: div(fg) = {div_fg}, expected {total}"));
        let additive = div_fg.len() == total.len()
            && div_fg.entries().iter().all(|(s, m)| div_f.mult_at(s, tol) + div_g.mult_at(s, tol) == *m);
        t.flag(additive, || format!("pair {pair}: div(fg) = {div_fg} but div(f) + div(g) = {} + {}", div_f, div_g));
        t.flag(div_f.is_positive() && div_g.is_positive() && div_fg.is_positive(), || {
            format!("pair {pair}: negative polynomial divisor")
        });
    }
    Ok(t)
}

fn realization_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(0.0);
    for k in 0..50 {
        let d = random_divisor(rng, 1..=6, 3, true);
        let genus = rng.gen_range(0..=2);
        let got = construct_from_divisor(&d, genus)?.div()?;
        t.flag(got.matches(&d, IDENTIFICATION_TOLERANCE), || {
            format!("divisor {k} = {d} (genus {genus}) came back as {got}")
        });
    }
    Ok(t)
}

fn exp_root_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for k in 0..20 {
        let p = random_real_poly(rng, 0..=4, 1.0);
        for ell in [2u32, 3, 5] {
            let root = exp_poly_root(&p, ell)?;
            for _ in 0..100 {
                let q = random_quaternion(rng, 1.5);
                let lhs = root.evaluate(q)?.powi(ell as i64)?;
                let rhs = p.eval_quaternion(q).exp();
                t.error((lhs - rhs).norm() / rhs.norm(), || {
                    format!("polynomial {k}, ell {ell}, q = {q}: {lhs} vs {rhs}")
                });
            }
        }
    }
    Ok(t)
}

fn isssa_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-6);
    let fam = isssa_family(2, 2, 3, DEFAULT_EXPONENT_BUDGET)?;
    for _ in 0..20 {
        let q = random_quaternion(rng, 0.4);
        let (l, r) = fam.identity_sides(q)?;
        t.error((l - r).norm() / l.norm(), || format!("identity at {q}: {l} vs {r}"));
    }
    let p = fam.p_d.polynomial_part()?;
    for (n, m) in [(1.0, 2), (2.0, 4), (3.0, 8)] {
        let got = p.multiplicity_at(n, 0.0, 1e-10);
        t.flag(got == m, || format!("order at {n}: {got}, expected {m}"));
    }
    Ok(t)
}

fn valuation_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(0.0);
    for k in 0..10 {
        let pool = random_divisor(rng, 4..=4, 1, false);
        let spheres: Vec<Sphere> = pool.entries().iter().map(|e| e.0).collect();
        let s = spheres[rng.gen_range(0..spheres.len())];
        let others: Vec<Sphere> = spheres.iter().copied().filter(|o| *o != s).collect();
        let v = sord_valuation(s);
        let mut samples = Vec::new();
        for _ in 0..7 {
            let e: i64 = rng.gen_range(-2..=2);
            let mut num = RealPoly::constant(signed_scalar(rng));
            let mut den = RealPoly::one();
            let factor = s.factor().pow(e.unsigned_abs() as u32);
            if e >= 0 {
                num = &num * &factor;
            } else {
                den = &den * &factor;
            }
            for o in &others {
                match rng.gen_range(0..3) {
                    0 => num = &num * &o.factor(),
                    1 => den = &den * &o.factor(),
                    _ => {}
                }
            }
            let f = SemiregularRational::normalize(num, den)?;
            let got = v.value(&f)?;
            t.flag(got == ValuationValue::Finite(e), || format!("sphere {k}: v(f) = {got}, built with order {e}"));
            samples.push(f);
        }
        for r in check_valuation_axioms(&v, &samples)? {
            t.flag(r.passed, || format!("sphere {k} ({s}): {} fails with {:?}", r.axiom, r.witness));
        }
        for _ in 0..5 {
            let c = signed_scalar(rng) * 3.0;
            let got = v.value(&SemiregularRational::constant(c))?;
            t.flag(got == ValuationValue::Finite(0), || format!("sphere {k}: v({c}) = {got}"));
        }
    }
    Ok(t)
}

fn character_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    let mut fs: Vec<SemiregularRational> =
        (0..6).map(|_| SemiregularRational::polynomial(random_real_poly(rng, 1..=4, 2.0))).collect();
    for _ in 0..4 {
        let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(1.6..2.5));
        fs.push(SemiregularRational::normalize(random_real_poly(rng, 2..=2, 2.0), RealPoly::sphere_factor(x, y))?);
    }
    let samples = CharacterSamples::new(fs)?;
    for k in 0..100 {
        let chi = EvaluationCharacter::new(random_quaternion(rng, 1.0), random_unit(rng));
        let reports = check_character_axioms(&chi, &samples, 2, rng.gen())?;
        t.flag(all_passed(&reports), || format!("character {k}: {:?}", reports.iter().find(|r| !r.passed)));
    }
    for k in 0..20 {
        let h0 = random_real_poly(rng, 1..=3, 2.0);
        let points: Vec<Quaternion> = (0..50).map(|_| random_quaternion(rng, 1.0)).collect();
        let phi = composition_oracle(h0.clone());
        match bers_recover(&phi, samples.functions(), &points, 1e-8) {
            Ok(h) => {
                let err = (0..=h0.coeffs().len().max(h.num().coeffs().len()))
                    .map(|n| (h.num().coeff(n) - h0.coeff(n)).abs())
                    .fold(if h.is_holomorphic() { 0.0 } else { f64::INFINITY }, f64::max);
                t.error(err, || format!("oracle {k}: recovered {}/{} for {h0}", h.num(), h.den()));
                let again = bers_recover(&phi, samples.functions(), &points[..5], 1e-8)?;
                t.flag(again == h, || format!("oracle {k}: recovery is not unique"));
            }
            Err(e) => t.flag(false, || format!("oracle {k} (h = {h0}): {e}")),
        }
    }
    Ok(t)
}

fn laurent_suite(rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut t = Tally::new(1e-7);
    let mut k = 0;
    while k < 50 {
        let poles = random_divisor(rng, 1..=2, 2, false);
        let num = random_real_poly(rng, 0..=3, 2.0);
        if num.is_zero() {
            continue;
        }
        let f = SemiregularRational::normalize(num, product_of(&poles, signed_scalar(rng)))?;
        let unit = random_unit(rng);
        let singular: Vec<Complex64> = f
            .pole_divisor()
            .entries()
            .iter()
            .flat_map(|(s, _)| [Complex64::new(s.x, s.y), Complex64::new(s.x, -s.y)])
            .collect();
        let w = if rng.gen_bool(0.5) && !singular.is_empty() {
            singular[rng.gen_range(0..singular.len())]
        } else {
            let w = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if singular.iter().any(|s| (s - w).norm() < SPHERE_SEPARATION) {
                continue;
            }
            w
        };
        let radius = singular.iter().map(|s| (s - w).norm()).filter(|&d| d > 1e-9).fold(f64::INFINITY, f64::min);
        let p = Quaternion::from_complex(w, unit);
        let coeffs = f.laurent_coefficients(p, -5, 15)?;
        for _ in 0..3 {
            let rho = rng.gen_range(0.02..0.15) * radius.min(4.0);
            let tq =
                Quaternion::from_complex(Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU)), unit);
            let q = p + tq;
            let mut sum = Quaternion::ZERO;
            let mut scale = 0.0;
            for (idx, a) in coeffs.iter().enumerate() {
                let term = tq.powi(idx as i64 - 5)? * *a;
                scale += term.norm();
                sum += term;
            }
            let direct = f.evaluate(q)?;
            t.error(rel(sum, direct, scale), || {
                format!("rational {k} ({}) / ({}) around {p} at {q}: {sum} vs {direct}", f.num(), f.den())
            });
        }
        k += 1;
    }
    Ok(t)
}
