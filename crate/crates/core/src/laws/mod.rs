//! Property-test harness for the commutation laws.
//!
//! Every law runs an exhaustive tier over all instances within
//! `(max_points, grid)`, a random tier of `random_count` seeded instances,
//! and for some laws a fixed tier of hand-built instances. Each instance is
//! checked by building the canonical comparison map from the mediating maps
//! of the universal properties and asserting that it is a bijective
//! isometry, or by an exact equality of matrices. The first failing
//! instance stops the law and is reported with both sides.

mod gen;
mod run;

pub use gen::{gen_instance, Instance, InstanceKind, ReflexivePair};
pub use run::{run_law, run_suite};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LawId {
    #[serde(rename = "reflector_products")]
    ReflectorProducts,
    #[serde(rename = "product_coeq_commute")]
    ProductCoeqCommute,
    #[serde(rename = "tensor_coeq_commute")]
    TensorCoeqCommute,
    #[serde(rename = "hom_discrete_coeq")]
    HomDiscreteCoeq,
    #[serde(rename = "onestep_coeq_formula")]
    OnestepCoeqFormula,
    #[serde(rename = "fp_chain")]
    FpChain,
    /// The collapse-theory monad and its failure to preserve isometries.
    #[serde(rename = "example_3_13")]
    CollapseMonad,
    #[serde(rename = "quant_encoding_equiv")]
    QuantEncodingEquiv,
    #[serde(rename = "monoid_forgetful")]
    MonoidForgetful,
}

impl LawId {
    pub const ALL: [LawId; 9] = [
        LawId::ReflectorProducts,
        LawId::ProductCoeqCommute,
        LawId::TensorCoeqCommute,
        LawId::HomDiscreteCoeq,
        LawId::OnestepCoeqFormula,
        LawId::FpChain,
        LawId::CollapseMonad,
        LawId::QuantEncodingEquiv,
        LawId::MonoidForgetful,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawId::ReflectorProducts => "reflector_products",
            LawId::ProductCoeqCommute => "product_coeq_commute",
            LawId::TensorCoeqCommute => "tensor_coeq_commute",
            LawId::HomDiscreteCoeq => "hom_discrete_coeq",
            LawId::OnestepCoeqFormula => "onestep_coeq_formula",
            LawId::FpChain => "fp_chain",
            LawId::CollapseMonad => "example_3_13",
            LawId::QuantEncodingEquiv => "quant_encoding_equiv",
            LawId::MonoidForgetful => "monoid_forgetful",
        }
    }

    fn index(self) -> u64 {
        LawId::ALL.iter().position(|&l| l == self).expect("listed") as u64
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        LawId::ALL.iter().copied().find(|l| l.name() == s).ok_or_else(|| Error::Parse(format!("unknown law {s:?}")))
    }
}

/// Deliberately broken constructions that must make some law fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Products carry the `+` metric instead of `max`.
    ProductSum,
    /// Coequalizers carry the raw one-step infimum instead of the path metric.
    CoequalizerOneStep,
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "product-sum" => Ok(Mutation::ProductSum),
            "coequalizer-one-step" => Ok(Mutation::CoequalizerOneStep),
            _ => Err(Error::Parse(format!("unknown mutation {s:?}"))),
        }
    }
}

fn default_stages() -> u64 {
    64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Scalar", deserialize = "S: Scalar"), deny_unknown_fields)]
pub struct HarnessConfig<S> {
    pub max_points: usize,
    #[serde(rename = "distance_grid", alias = "grid")]
    pub grid: Vec<ExtDistance<S>>,
    pub random_count: usize,
    pub seed: u64,
    /// Largest apex tried by the cocone oracle.
    #[serde(rename = "oracle_apex_bound", alias = "oracle_bound")]
    pub oracle_bound: usize,
    #[serde(default)]
    pub mutation: Option<Mutation>,
    /// Largest stage of the finite-presentability chain.
    #[serde(default = "default_stages")]
    pub chain_stages: u64,
}

impl<S: Scalar> Default for HarnessConfig<S> {
    fn default() -> Self {
        HarnessConfig {
            max_points: 3,
            grid: vec![ExtDistance::ratio(1, 2), ExtDistance::one(), ExtDistance::integer(2), ExtDistance::Infinite],
            random_count: 200,
            seed: 2024,
            oracle_bound: 3,
            mutation: None,
            chain_stages: 64,
        }
    }
}

impl<S: Scalar> HarnessConfig<S> {
    pub fn validate(&self) -> Result<(), Error> {
        if self.max_points == 0 {
            return Err(Error::Invalid("max_points must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Invalid("grid must be nonempty".into()));
        }
        if self.grid.iter().any(|d| d.is_zero()) {
            return Err(Error::Invalid("grid values must be positive".into()));
        }
        if self.chain_stages == 0 {
            return Err(Error::Invalid("chain_stages must be positive".into()));
        }
        Ok(())
    }

    /// The grid, sorted and deduplicated.
    pub(crate) fn metric_grid(&self) -> Vec<ExtDistance<S>> {
        let mut g = self.grid.clone();
        g.sort();
        g.dedup();
        g
    }

    /// The grid plus `0`, for pseudometric instances.
    pub(crate) fn pseudo_grid(&self) -> Vec<ExtDistance<S>> {
        let mut g = self.metric_grid();
        g.insert(0, ExtDistance::zero());
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fixed,
    Exhaustive,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub tier: Tier,
    /// Position of the instance within its tier.
    pub index: u64,
    /// Seed of a random-tier instance; `gen` replays it.
    pub seed: Option<u64>,
    pub description: String,
    pub instance: serde_json::Value,
    pub lhs: Vec<Vec<String>>,
    pub rhs: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Pass,
    Counterexample(Box<Counterexample>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub law: LawId,
    pub instances_checked: u64,
    #[serde(flatten)]
    pub status: Status,
    /// Observations that are recorded but not asserted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub verdicts: Vec<Verdict>,
    pub all_passed: bool,
}

impl SuiteReport {
    /// One line per law.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let status = match &v.status {
                Status::Pass => "pass".to_string(),
                Status::Counterexample(c) => format!("COUNTEREXAMPLE ({:?} #{}: {})", c.tier, c.index, c.description),
            };
            out.push_str(&format!("{:<22} {:>9}  {}\n", v.law.name(), v.instances_checked, status));
        }
        out.push_str(if self.all_passed { "all laws passed\n" } else { "some laws failed\n" });
        out
    }
}
