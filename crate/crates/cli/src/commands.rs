use std::fs;
use std::io::{self, Read};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use slicereg::divisor::IDENTIFICATION_TOLERANCE;
use slicereg::realpoly::DEFLATION_TOLERANCE;
use slicereg::verify::{random_quaternion, run_suites};
use slicereg::weierstrass::{
    construct_from_divisor, exp_poly_root, factorize_polynomial, isssa_family, DEFAULT_EXPONENT_BUDGET,
};
use slicereg::{
    EntireEvaluator, Error, Quaternion, RealPoly, RegularSeries, SemiregularRational, SphericalDivisor, SphericalOrder,
    Truncation,
};

use crate::args::{Cli, Command};

/// A failed request, sorted by exit status.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Mathematical(String),
    Verification { message: String, report: Option<Value> },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Mathematical(_) => 2,
            Self::Verification { .. } => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Self::Validation(m) => ("validation", m),
            Self::Mathematical(m) => ("mathematical", m),
            Self::Verification { message, .. } => ("verification", message),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }

    /// Output that should still reach standard output, such as the report of
    /// a failing suite run.
    pub fn report(&self) -> Option<&Value> {
        match self {
            Self::Verification { report, .. } => report.as_ref(),
            _ => None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::VerificationFailure(m) => Self::Verification { message: m, report: None },
            e if e.is_mathematical() => Self::Mathematical(e.to_string()),
            e => Self::Validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::Validation(format!("invalid JSON payload: {e}"))
    }
}

type Outcome = std::result::Result<Value, Failure>;

/// A function given as JSON, told apart by its keys.
enum Function {
    Series(RegularSeries),
    Rational(SemiregularRational),
    Evaluator(EntireEvaluator),
}

impl Function {
    fn from_value(v: Value) -> std::result::Result<Self, Failure> {
        let keys = v.as_object().ok_or_else(|| Failure::Validation("function payload must be a JSON object".into()))?;
        if keys.contains_key("factors") {
            Ok(Self::Evaluator(serde_json::from_value(v)?))
        } else if keys.contains_key("num") {
            Ok(Self::Rational(serde_json::from_value(v)?))
        } else if keys.contains_key("coeffs") {
            Ok(Self::Series(serde_json::from_value(v)?))
        } else {
            Err(Failure::Validation(
                "expected a series (coeffs), a rational (num, den) or an evaluator (factors)".into(),
            ))
        }
    }

    fn rational(self) -> std::result::Result<SemiregularRational, Failure> {
        match self {
            Self::Rational(f) => Ok(f),
            Self::Series(s) => Ok(SemiregularRational::polynomial(s.to_real_poly()?)),
            Self::Evaluator(e) => Ok(SemiregularRational::polynomial(e.polynomial_part()?)),
        }
    }
}

fn read_payload(cli: &Cli) -> std::result::Result<Value, Failure> {
    let src = cli.input.as_deref().ok_or_else(|| Failure::Validation("missing --input".into()))?;
    let text = match src.trim_start().chars().next() {
        Some('{') | Some('[') => src.to_string(),
        _ if src == "-" => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Validation(format!("reading standard input: {e}")))?;
            s
        }
        _ => fs::read_to_string(src).map_err(|e| Failure::Validation(format!("reading {src}: {e}")))?,
    };
    Ok(serde_json::from_str(&text)?)
}

fn parse<T: DeserializeOwned>(v: Value) -> std::result::Result<T, Failure> {
    Ok(serde_json::from_value(v)?)
}

fn point(cli: &Cli) -> std::result::Result<Quaternion, Failure> {
    let raw = cli.point.as_deref().ok_or_else(|| Failure::Validation("missing --point".into()))?;
    Ok(serde_json::from_str(raw)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Outcome {
    Ok(serde_json::to_value(v)?)
}

/// Caps a truncated series at `order` terms; exact series are untouched.
fn cap(s: RegularSeries, order: usize) -> RegularSeries {
    match s.truncation() {
        Truncation::Order(n) if n > order => {
            RegularSeries::truncated(s.coeffs()[..order].to_vec(), order).with_center(s.center())
        }
        _ => s,
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match cli.command {
        Command::Eval => eval(cli),
        Command::Star => star(cli),
        Command::Divisor => divisor(cli),
        Command::Construct => construct(cli),
        Command::Factor => factor(cli),
        Command::Laurent => laurent(cli),
        Command::Roots => roots(cli),
        Command::IsssaDemo => isssa_demo(cli),
        Command::Verify => verify(cli),
    }
}

fn eval(cli: &Cli) -> Outcome {
    let q = point(cli)?;
    let value = match Function::from_value(read_payload(cli)?)? {
        Function::Series(s) => cap(s, cli.truncation).evaluate(q)?,
        Function::Rational(f) => f.evaluate(q)?,
        Function::Evaluator(e) => e.evaluate(q)?,
    };
    to_value(&value)
}

#[derive(Deserialize)]
struct StarInput {
    f: RegularSeries,
    g: RegularSeries,
}

fn star(cli: &Cli) -> Outcome {
    let StarInput { f, g } = parse(read_payload(cli)?)?;
    to_value(&cap(f.star(&g)?, cli.truncation))
}

fn divisor(cli: &Cli) -> Outcome {
    let d = match Function::from_value(read_payload(cli)?)? {
        Function::Series(s) => s.div()?,
        Function::Rational(f) => f.div()?,
        Function::Evaluator(e) => identified(e.div()?, &e.nominal_divisor()?),
    };
    to_value(&d)
}

/// Moves each computed sphere onto the factor parameter it is identified
/// with, so a product built from a divisor reports that divisor verbatim.
fn identified(computed: SphericalDivisor, nominal: &SphericalDivisor) -> SphericalDivisor {
    SphericalDivisor::from_entries(computed.entries().iter().map(|&(s, m)| {
        let exact = nominal.entries().iter().map(|e| e.0).find(|t| t.matches(&s, IDENTIFICATION_TOLERANCE));
        (exact.unwrap_or(s), m)
    }))
}

fn construct(cli: &Cli) -> Outcome {
    let d: SphericalDivisor = parse(read_payload(cli)?)?;
    to_value(&construct_from_divisor(&d, cli.genus)?)
}

fn factor(cli: &Cli) -> Outcome {
    let f = Function::from_value(read_payload(cli)?)?.rational()?;
    if !f.den().is_constant() {
        return Err(Failure::Validation("factor needs a polynomial".into()));
    }
    to_value(&factorize_polynomial(&f.num().scale(1.0 / f.den().leading()))?)
}

fn laurent(cli: &Cli) -> Outcome {
    let p = point(cli)?;
    let f = Function::from_value(read_payload(cli)?)?.rational()?;
    let coeffs = f.laurent_coefficients(p, cli.n_min, cli.n_max)?;
    Ok(json!({
        "point": p,
        "singularity": f.classify_singularity(p),
        "n_min": cli.n_min,
        "n_max": cli.n_max,
        "coeffs": coeffs,
    }))
}

#[derive(Deserialize)]
struct RootsInput {
    p: Vec<f64>,
    ell: u32,
    #[serde(default)]
    points: Option<Vec<Quaternion>>,
}

fn sample_points(cli: &Cli, count: usize, radius: f64) -> Vec<Quaternion> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    (0..count).map(|_| random_quaternion(&mut rng, radius)).collect()
}

fn checked(report: Value, passed: bool, what: &str) -> Outcome {
    if passed {
        Ok(report)
    } else {
        Err(Failure::Verification { message: format!("{what} exceeds the tolerance"), report: Some(report) })
    }
}

fn roots(cli: &Cli) -> Outcome {
    let input: RootsInput = parse(read_payload(cli)?)?;
    let p = RealPoly::new(input.p);
    let root = exp_poly_root(&p, input.ell)?;
    let points = match (input.points, &cli.point) {
        (Some(pts), _) => pts,
        (None, Some(_)) => vec![point(cli)?],
        (None, None) => sample_points(cli, 10, 1.5),
    };
    let mut worst = 0.0f64;
    let mut checks = Vec::new();
    for q in points {
        let power = root.evaluate(q)?.powi(input.ell as i64)?;
        let target = p.eval_quaternion(q).exp();
        let err = power.rel_dist(target);
        worst = worst.max(err);
        checks.push(json!({ "point": q, "root_power": power, "exp": target, "relative_error": err }));
    }
    let report = json!({
        "ell": input.ell,
        "root": root,
        "checks": checks,
        "worst": worst,
        "tolerance": cli.tolerance,
        "passed": worst <= cli.tolerance,
    });
    checked(report, worst <= cli.tolerance, "exp-root residual")
}

fn isssa_demo(cli: &Cli) -> Outcome {
    let fam = isssa_family(cli.d, cli.ell, cli.n_factors, DEFAULT_EXPONENT_BUDGET)?;
    let points = sample_points(cli, 20, 0.4);
    let residual = fam.identity_residual(&points)?;
    let vanishing = fam.p_d.polynomial_part()?;
    let mut orders = Vec::new();
    let mut orders_ok = true;
    for n in 1..=cli.n_factors {
        let expected = (cli.d as u64).pow(n as u32);
        let detected = vanishing.multiplicity_at(n as f64, 0.0, DEFLATION_TOLERANCE) as u64;
        orders_ok &= detected == expected;
        orders.push(json!({ "at": n, "expected": expected, "detected": detected }));
    }
    let passed = residual <= cli.tolerance && orders_ok;
    let report = json!({
        "d": cli.d,
        "ell": cli.ell,
        "n_factors": cli.n_factors,
        "points": points.len(),
        "identity_residual": residual,
        "tolerance": cli.tolerance,
        "vanishing_orders": orders,
        "passed": passed,
    });
    checked(report, passed, "identity residual or vanishing order")
}

fn verify(cli: &Cli) -> Outcome {
    let reports = run_suites(&cli.suite, cli.seed)?;
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({
        "seed": cli.seed,
        "suite": cli.suite,
        "passed": passed,
        "suites_passed": reports.iter().filter(|r| r.passed).count(),
        "suites_failed": reports.iter().filter(|r| !r.passed).count(),
        "checks": reports.iter().map(|r| r.checks).sum::<u64>(),
        "failures": reports.iter().map(|r| r.failures).sum::<u64>(),
        "suites": reports,
    });
    if passed {
        Ok(report)
    } else {
        let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.suite.as_str()).collect();
        Err(Failure::Verification { message: format!("failing suites: {}", failed.join(", ")), report: Some(report) })
    }
}
