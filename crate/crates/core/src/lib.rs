pub mod characters;
pub mod divisor;
pub mod error;
pub mod quaternion;
pub mod rational;
pub mod realpoly;
pub mod report;
pub mod series;
pub mod valuation;
pub mod verify;
pub mod weierstrass;

pub use characters::{Character, EvaluationCharacter, ZeroCharacter};
pub use divisor::{Sphere, SphericalDivisor, SphericalOrder};
pub use error::{Error, Result};
pub use quaternion::{Quaternion, SliceCoords, UnitImaginary};
pub use rational::{SemiregularRational, Singularity};
pub use realpoly::{RealPoly, RootSphere};
pub use report::AxiomReport;
pub use series::{RegularSeries, Truncation, Zero};
pub use valuation::{SordValuation, Valuation, ValuationValue};
pub use weierstrass::{EntireEvaluator, Factor, Factorization};
