//! Evaluation characters on slice preserving functions and recovery of
//! composition homomorphisms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quaternion::{Quaternion, UnitImaginary};
use crate::rational::SemiregularRational;
use crate::report::{AxiomReport, Witness};

/// Agreement required by the character checks.
pub const CHARACTER_TOLERANCE: f64 = 1e-9;

/// An R-algebra map from slice preserving functions to the quaternions.
pub trait Character {
    fn apply(&self, f: &SemiregularRational) -> Result<Quaternion>;

    /// Slice the image is expected to lie in, if any.
    fn target(&self) -> Option<UnitImaginary> {
        None
    }

    fn label(&self) -> String;
}

/// `χ_{c,J}(f) = [f(c)]_J`, transferring from the slice through `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationCharacter {
    pub c: Quaternion,
    pub j: UnitImaginary,
}

impl EvaluationCharacter {
    pub fn new(c: Quaternion, j: UnitImaginary) -> Self {
        Self { c, j }
    }

    /// `χ_c = χ_{c,I}` for `c ∈ C_I`: plain evaluation at `c`.
    pub fn at(c: Quaternion) -> Self {
        Self { c, j: c.slice_decompose().unit.unwrap_or(UnitImaginary::i()) }
    }
}

impl Character for EvaluationCharacter {
    fn apply(&self, f: &SemiregularRational) -> Result<Quaternion> {
        let v = f.evaluate(self.c)?;
        let from = self.c.slice_decompose().unit.unwrap_or(UnitImaginary::i());
        Ok(v.transfer_between(from, self.j))
    }

    fn target(&self) -> Option<UnitImaginary> {
        Some(self.j)
    }

    fn label(&self) -> String {
        format!("chi(c = {:?}, J = {:?})", self.c.to_array(), self.j.components())
    }
}

/// The trivial character `f ↦ 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroCharacter;

impl Character for ZeroCharacter {
    fn apply(&self, _f: &SemiregularRational) -> Result<Quaternion> {
        Ok(Quaternion::ZERO)
    }

    fn label(&self) -> String {
        "zero character".into()
    }
}

pub fn apply_character(chi: &dyn Character, f: &SemiregularRational) -> Result<Quaternion> {
    chi.apply(f)
}

/// Sample functions with their pairwise sums and products, computed once
/// so that many characters can be checked against them.
#[derive(Debug, Clone)]
pub struct CharacterSamples {
    fs: Vec<SemiregularRational>,
    sums: Vec<Vec<SemiregularRational>>,
    products: Vec<Vec<SemiregularRational>>,
}

impl CharacterSamples {
    pub fn new(fs: Vec<SemiregularRational>) -> Result<Self> {
        let n = fs.len();
        let mut sums = Vec::with_capacity(n);
        let mut products = Vec::with_capacity(n);
        for i in 0..n {
            sums.push((i..n).map(|j| fs[i].add(&fs[j])).collect::<Result<Vec<_>>>()?);
            products.push((i..n).map(|j| fs[i].mul(&fs[j])).collect::<Result<Vec<_>>>()?);
        }
        Ok(Self { fs, sums, products })
    }

    pub fn functions(&self) -> &[SemiregularRational] {
        &self.fs
    }
}

fn close(a: Quaternion, b: Quaternion) -> bool {
    a.rel_dist(b) <= CHARACTER_TOLERANCE
}

fn witness(inputs: Vec<String>, expected: Quaternion, actual: Quaternion) -> Witness {
    Witness { inputs, expected: format!("{expected}"), actual: format!("{actual}") }
}

/// Checks nontriviality, real constants, additivity, real-scalar
/// compatibility, multiplicativity and, for characters with a target
/// slice, image containment. `trials` random real scalars are used per
/// function.
pub fn check_character_axioms(
    chi: &dyn Character,
    samples: &CharacterSamples,
    trials: usize,
    seed: u64,
) -> Result<Vec<AxiomReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs = &samples.fs;
    let values = fs.iter().map(|f| chi.apply(f)).collect::<Result<Vec<_>>>()?;
    let name = |i: usize| format!("{}/{}", fs[i].num(), fs[i].den());

    let mut nontrivial = AxiomReport::new("nontriviality");
    let one = chi.apply(&SemiregularRational::one())?;
    nontrivial.record(close(one, Quaternion::ONE), || witness(vec!["1".into()], Quaternion::ONE, one));

    let mut constants = AxiomReport::new("real_constants");
    let mut scalar = AxiomReport::new("real_scalar");
    for (i, f) in fs.iter().enumerate() {
        for _ in 0..trials {
            let r: f64 = rng.gen_range(-3.0..3.0);
            let c = chi.apply(&SemiregularRational::constant(r))?;
            constants.record(close(c, Quaternion::real(r)), || witness(vec![format!("{r}")], Quaternion::real(r), c));
            let got = chi.apply(&f.scale(r))?;
            let want = values[i] * r;
            scalar.record(close(got, want), || witness(vec![name(i), format!("{r}")], want, got));
        }
    }

    let mut additive = AxiomReport::new("additivity");
    let mut multiplicative = AxiomReport::new("multiplicativity");
    for i in 0..fs.len() {
        for j in i..fs.len() {
            let s = chi.apply(&samples.sums[i][j - i])?;
            additive
                .record(close(s, values[i] + values[j]), || witness(vec![name(i), name(j)], values[i] + values[j], s));
            let p = chi.apply(&samples.products[i][j - i])?;
            multiplicative
                .record(close(p, values[i] * values[j]), || witness(vec![name(i), name(j)], values[i] * values[j], p));
        }
    }

    let mut out = vec![nontrivial, constants, additive, scalar, multiplicative];
    if let Some(j) = chi.target() {
        let mut image = AxiomReport::new("image_in_slice");
        for (i, &v) in values.iter().enumerate() {
            image.record(v.off_slice_norm(j) <= 1e-12 * v.norm().max(1.0), || {
                witness(vec![name(i)], v.transfer_between(j, j), v)
            });
        }
        out.push(image);
    }
    Ok(out)
}

/// Recovers `h = φ(id)` from a composition homomorphism `φ` and verifies
/// `φ(f)(q) = f(h(q))` for every sample function and point.
pub fn bers_recover<F>(
    phi: F,
    samples: &[SemiregularRational],
    points: &[Quaternion],
    tol: f64,
) -> Result<SemiregularRational>
where
    F: Fn(&SemiregularRational) -> Result<SemiregularRational>,
{
    let h = phi(&SemiregularRational::identity())?;
    for f in samples {
        let image = phi(f)?;
        for &q in points {
            let direct = image.evaluate(q);
            let composed = h.evaluate(q).and_then(|w| f.evaluate(w));
            let ok = match (&direct, &composed) {
                (Ok(a), Ok(b)) => a.rel_dist(*b) <= tol,
                (Err(Error::PoleEvaluation), Err(Error::PoleEvaluation)) => true,
                _ => false,
            };
            if !ok {
                return Err(Error::VerificationFailure(format!(
                    "phi(f) != f o h for f = {}/{} at q = {q}: {direct:?} vs {composed:?}",
                    f.num(),
                    f.den()
                )));
            }
        }
    }
    Ok(h)
}

/// The homomorphism `f ↦ f ∘ h`.
pub fn composition_oracle(
    h: crate::realpoly::RealPoly,
) -> impl Fn(&SemiregularRational) -> Result<SemiregularRational> {
    move |f| f.compose(&h)
}
