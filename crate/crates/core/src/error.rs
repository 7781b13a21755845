use std::fmt;

use thiserror::Error;

/// Which metric axiom a matrix fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Square,
    DuplicatePoint,
    Diagonal,
    Symmetry,
    Triangle,
    Separation,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Square => "square",
            Axiom::DuplicatePoint => "duplicate point",
            Axiom::Diagonal => "zero diagonal",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle",
            Axiom::Separation => "separation",
        };
        f.write_str(s)
    }
}

/// One failing instance of an axiom, with the points involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub points: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({})", self.axiom, self.points.join(","))
    }
}

/// Monoid axiom families checked by [`crate::monoids::check_monoid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoidAxiom {
    Totality,
    Associativity,
    Unit,
    Nonexpanding,
}

impl fmt::Display for MonoidAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MonoidAxiom::Totality => "totality",
            MonoidAxiom::Associativity => "associativity",
            MonoidAxiom::Unit => "unit",
            MonoidAxiom::Nonexpanding => "nonexpanding",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("axiom violation: {}", fmt_violations(.0))]
    AxiomViolation(Vec<Violation>),
    #[error("matrix is not symmetric at ({0},{1})")]
    NonSymmetric(String, String),
    #[error("negative distance {0}")]
    NegativeEntry(String),
    #[error("map is expansive at ({0},{1})")]
    Expansive(String, String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("arity mismatch at position {position}: {detail}")]
    ArityMismatch { position: usize, detail: String },
    #[error("unknown operation symbol {0:?}")]
    UnknownSymbol(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("name clash: {0:?} is already in the signature")]
    NameClash(String),
    #[error("search space of size {bound} exceeds the budget {budget}")]
    BudgetExceeded { bound: String, budget: u128 },
    #[error("not a collapse theory: {0}")]
    NotCollapseTheory(String),
    #[error("pair is not reflexive")]
    NotReflexive,
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("multiplication does not descend to the quotient: {0}")]
    DescentFailure(String),
    #[error("monoid axiom {kind} fails at {witness}")]
    MonoidAxiom { kind: MonoidAxiom, witness: String },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
