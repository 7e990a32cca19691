pub mod chern;
pub mod cohomology;
pub mod delta;
pub mod asymptotics;
pub mod jets;
pub mod error;
pub mod rational;
pub mod verify;
pub mod young;

pub use chern::{chern_class, integrate_chern_monomial, ChernClass, ChernMonomial, DegreePolynomial};
pub use error::{Error, Result};
pub use rational::Rational;
pub use young::{MultiplicityTable, Partition, Tableau};
pub use asymptotics::{FamilyKey, Harness, LogPolynomial, Mode, NablaPoint, Value};
pub use cohomology::{CohomologyVector, HypersurfaceContext};
pub use delta::{DeltaDeterminant, JetPoint, PlueckerRelation};
pub use jets::{GrDecomposition, JetConfig};
pub use num_bigint::BigInt;
pub use verify::{SuiteResult, VerifyOptions};
