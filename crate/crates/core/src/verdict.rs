//! Three-valued, witness-carrying answers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::groups::GroupElement;
use crate::records::{PatternRecord, RingRecord, RuleRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CertifiedYes,
    CertifiedNo,
    Unknown,
}

impl Status {
    /// Exit code for the command line: 0 yes, 1 no, 2 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::CertifiedYes => 0,
            Status::CertifiedNo => 1,
            Status::Unknown => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Witness {
    /// `V_n` is empty for the window `E_n = ball(n₀ + n)`.
    EmptyKernelWindow { n: usize },
    /// Two configurations with the same image. On a finite universe they are
    /// full configurations; on `Z^d` they are `L`-periodic, given on the
    /// quotient by `lattice`.
    CollidingPair { lattice: Option<Vec<Vec<i64>>>, left: Vec<usize>, right: Vec<usize> },
    /// A nonzero finitely supported configuration mapped to the neutral one.
    FiniteKernel { pattern: PatternRecord },
    /// A pattern outside the image of the window map on its window. For
    /// linear automata `annihilator` is a functional vanishing on the image
    /// but not on the pattern.
    Orphan { pattern: PatternRecord, annihilator: Option<Vec<u32>> },
    /// The window map onto `window` is surjective; no orphan there.
    WindowConsistent { window: Vec<GroupElement> },
    /// Exhaustive check over a finite configuration space.
    Exhaustive {
        property: String,
        #[serde(with = "decimal")]
        checked: u128,
    },
    InverseRule { radius: usize, rule: RuleRecord },
    /// Finitely supported preimages of the single-site deviations.
    Preimages { letters: Vec<usize>, preimages: Vec<PatternRecord> },
    /// Exact answer read off the scalar Laurent polynomial of the rule.
    ScalarOracle { polynomial: RingRecord, claim: String },
    Exact1d { injective: bool, surjective: bool },
    SweepReport { rules: usize, injective: usize, surjective_among_injective: usize, violations: Vec<RuleRecord> },
    /// `σ∘τ = Id` was checked; `defect` is a pattern where `τ∘σ` differs
    /// from the identity, if any.
    DirectFiniteness { defect: Option<Vec<usize>> },
    LeftInverse { beta: RingRecord },
    /// `αβ − 1`, empty when `αβ = 1`.
    RingDefect { defect: RingRecord },
    SingularRegularRepresentation { size: usize, rank: usize },
    PhiRule { rule: RuleRecord },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub decider: String,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    pub radius: Option<usize>,
    pub witness: Option<Witness>,
    pub transcript: Vec<String>,
}

impl Verdict {
    pub fn new(decider: &str) -> Self {
        Verdict {
            decider: decider.to_string(),
            parameters: BTreeMap::new(),
            status: Status::Unknown,
            radius: None,
            witness: None,
            transcript: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.transcript.push(line.into());
    }

    pub fn yes(mut self, radius: Option<usize>, witness: Witness) -> Self {
        self.status = Status::CertifiedYes;
        self.radius = radius;
        self.witness = Some(witness);
        self
    }

    pub fn no(mut self, radius: Option<usize>, witness: Witness) -> Self {
        self.status = Status::CertifiedNo;
        self.radius = radius;
        self.witness = Some(witness);
        self
    }

    pub fn unknown(mut self, radius: Option<usize>) -> Self {
        self.status = Status::Unknown;
        self.radius = radius;
        self
    }

    pub fn is_yes(&self) -> bool {
        self.status == Status::CertifiedYes
    }

    pub fn is_no(&self) -> bool {
        self.status == Status::CertifiedNo
    }
}

/// `u128` as a decimal string; tagged enums cannot buffer 128-bit integers.
mod decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
