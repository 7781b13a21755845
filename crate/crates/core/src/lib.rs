//! Computable metric universal algebra on finite spaces.
//!
//! Finite (pseudo)metric spaces with exact extended-rational distances,
//! nonexpanding maps, their limits, colimits and closed monoidal structure,
//! `(X, Y)`-ary equational theories with (enriched) algebras and
//! quantitative equations, monoids for the tensor, and a law harness that
//! checks commutation properties exhaustively on small instances.
//!
//! Everything is generic over an exact [`Scalar`]; the aliases at the crate
//! root fix it to `Ratio<i64>`.

pub mod constructions;
pub mod distance;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod laws;
pub mod map;
pub mod monoids;
pub mod space;
pub mod theories;

pub use distance::{ExtDistance, Scalar};
pub use error::Error;
pub use map::{compose_maps, factorize, Factorization, MapClassification, NonexpMap};
pub use space::{metric_closure, standard_space, FinSpace, SpaceKind, StandardSpace};

/// Default exact scalar.
pub type Rational = num_rational::Ratio<i64>;
/// Arbitrary-precision scalar.
pub type BigRational = num_rational::Ratio<num_bigint::BigInt>;

pub type Distance = ExtDistance<Rational>;
pub type Space = FinSpace<Rational>;
pub type Map = NonexpMap<Rational>;
pub type Algebra = theories::Algebra<Rational>;
pub type Theory = theories::Theory<Rational>;
