//! Serialized forms of universes, alphabets, rules, patterns and ring
//! elements. The same records appear in job configurations and in
//! certificates, so a certificate can be replayed from its own job echo.
//!
//! Group elements are written as an integer (finite groups), an integer
//! array (`Z^d`) or a word string (free groups, `""` is the identity).
//! Rule bodies are flat integer arrays: tables in pattern index order,
//! endomorphism tables concatenated in memory order, matrices row-major and
//! concatenated in memory order.

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::alphabets::{Alphabet, LocalRule, RuleBody};
use crate::ca::Pattern;
use crate::error::{GcaError, Result};
use crate::fp::FpMatrix;
use crate::groups::{word_from_string, word_to_string, FiniteGroup, FiniteSubset, GroupElement, GroupUniverse, Preset};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ElementRepr {
    Index(usize),
    Vector(Vec<i64>),
    Word(String),
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GroupElement::Index(i) => ElementRepr::Index(*i).serialize(s),
            GroupElement::Vector(v) => ElementRepr::Vector(v.clone()).serialize(s),
            GroupElement::Word(w) => ElementRepr::Word(word_to_string(w)).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ElementRepr::deserialize(d)? {
            ElementRepr::Index(i) => Ok(GroupElement::Index(i)),
            ElementRepr::Vector(v) => Ok(GroupElement::Vector(v)),
            ElementRepr::Word(s) => {
                let letters = word_from_string(&s).map_err(serde::de::Error::custom)?;
                let mut reduced: Vec<i32> = Vec::new();
                for x in letters {
                    if reduced.last() == Some(&-x) {
                        reduced.pop();
                    } else {
                        reduced.push(x);
                    }
                }
                Ok(GroupElement::Word(reduced))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum UniverseSpec {
    Cyclic { n: usize },
    Dihedral { n: usize },
    Symmetric { n: usize },
    Product { factors: Vec<UniverseSpec> },
    Table { rows: Vec<Vec<usize>> },
    FreeAbelian { rank: usize },
    Free { rank: usize },
}

impl UniverseSpec {
    fn preset(&self) -> Result<Option<Preset>> {
        Ok(Some(match self {
            UniverseSpec::Cyclic { n } => Preset::Cyclic(*n),
            UniverseSpec::Dihedral { n } => Preset::Dihedral(*n),
            UniverseSpec::Symmetric { n } => Preset::Symmetric(*n),
            UniverseSpec::Product { factors } => Preset::Product(
                factors
                    .iter()
                    .map(|f| {
                        f.preset()?.ok_or_else(|| GcaError::Config("product factors must be named finite groups".into()))
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => return Ok(None),
        }))
    }

    pub fn build(&self) -> Result<GroupUniverse> {
        if let Some(p) = self.preset()? {
            return GroupUniverse::from_preset(p);
        }
        match self {
            UniverseSpec::Table { rows } => GroupUniverse::from_table(rows),
            UniverseSpec::FreeAbelian { rank } => Ok(GroupUniverse::free_abelian(*rank)),
            UniverseSpec::Free { rank } => Ok(GroupUniverse::free(*rank)),
            _ => unreachable!("presets handled above"),
        }
    }

    pub fn finite_group(&self) -> Result<FiniteGroup> {
        match self.build()? {
            GroupUniverse::Finite(g) => Ok(g),
            _ => Err(GcaError::Config("a finite group is required here".into())),
        }
    }

    pub fn from_preset(p: &Preset) -> Self {
        match p {
            Preset::Cyclic(n) => UniverseSpec::Cyclic { n: *n },
            Preset::Dihedral(n) => UniverseSpec::Dihedral { n: *n },
            Preset::Symmetric(n) => UniverseSpec::Symmetric { n: *n },
            Preset::Product(fs) => UniverseSpec::Product { factors: fs.iter().map(Self::from_preset).collect() },
        }
    }

    pub fn from_finite(g: &FiniteGroup) -> Self {
        match &g.preset {
            Some(p) => Self::from_preset(p),
            None => UniverseSpec::Table { rows: g.table.rows() },
        }
    }

    pub fn from_universe(u: &GroupUniverse) -> Self {
        match u {
            GroupUniverse::Finite(g) => Self::from_finite(g),
            GroupUniverse::FreeAbelian { rank } => UniverseSpec::FreeAbelian { rank: *rank },
            GroupUniverse::Free { rank } => UniverseSpec::Free { rank: *rank },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphabetSpec {
    Set { size: usize },
    Group { group: UniverseSpec },
    Vector { p: u32, dim: usize },
}

impl AlphabetSpec {
    pub fn build(&self) -> Result<Alphabet> {
        match self {
            AlphabetSpec::Set { size } => Alphabet::plain(*size),
            AlphabetSpec::Group { group } => Ok(Alphabet::FiniteGroup(group.finite_group()?)),
            AlphabetSpec::Vector { p, dim } => Alphabet::vector(*p, *dim),
        }
    }

    pub fn from_alphabet(a: &Alphabet) -> Self {
        match a {
            Alphabet::PlainSet { size } => AlphabetSpec::Set { size: *size },
            Alphabet::FiniteGroup(g) => AlphabetSpec::Group { group: UniverseSpec::from_finite(g) },
            Alphabet::VectorSpace { p, dim } => AlphabetSpec::Vector { p: *p, dim: *dim },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    Table,
    Hom,
    Linear,
}

/// A local rule; `memory` must be listed in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleRecord {
    pub memory: Vec<GroupElement>,
    pub kind: BodyKind,
    pub data: Vec<u64>,
}

impl RuleRecord {
    pub fn from_rule(rule: &LocalRule) -> Self {
        let memory = rule.memory().elements().to_vec();
        let (kind, data) = match rule.body() {
            RuleBody::Table(t) => (BodyKind::Table, t.iter().map(|&x| x as u64).collect()),
            RuleBody::Hom(ts) => (BodyKind::Hom, ts.iter().flatten().map(|&x| x as u64).collect()),
            RuleBody::Linear(ms) => {
                (BodyKind::Linear, ms.iter().flat_map(|m| m.data().iter().map(|&x| x as u64)).collect())
            }
        };
        RuleRecord { memory, kind, data }
    }

    pub fn build(&self, universe: &GroupUniverse, alphabet: &Alphabet) -> Result<LocalRule> {
        let memory = FiniteSubset::new(self.memory.iter().cloned());
        if memory.elements() != self.memory.as_slice() {
            return Err(GcaError::Config("memory must be listed in canonical order without repeats".into()));
        }
        let m = memory.len();
        let body = match self.kind {
            BodyKind::Table => RuleBody::Table(self.data.iter().map(|&x| x as usize).collect()),
            BodyKind::Hom => {
                let size = alphabet.size();
                if self.data.len() != m * size {
                    return Err(GcaError::MalformedRule(format!(
                        "hom body needs {} entries, got {}",
                        m * size,
                        self.data.len()
                    )));
                }
                RuleBody::Hom(self.data.chunks(size).map(|c| c.iter().map(|&x| x as usize).collect()).collect())
            }
            BodyKind::Linear => {
                let (p, n) = alphabet
                    .field()
                    .ok_or_else(|| GcaError::MalformedRule("linear body needs a vector alphabet".into()))?;
                if self.data.len() != m * n * n {
                    return Err(GcaError::MalformedRule(format!(
                        "linear body needs {} entries, got {}",
                        m * n * n,
                        self.data.len()
                    )));
                }
                RuleBody::Linear(
                    self.data
                        .chunks(n * n)
                        .map(|c| FpMatrix::from_flat(p, n, n, c.iter().map(|&x| (x % p as u64) as u32).collect()))
                        .collect::<Result<_>>()?,
                )
            }
        };
        LocalRule::new(universe, alphabet.clone(), memory, body)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternRecord {
    pub window: Vec<GroupElement>,
    pub values: Vec<usize>,
}

impl PatternRecord {
    pub fn from_pattern(p: &Pattern) -> Self {
        PatternRecord { window: p.window.elements().to_vec(), values: p.values.clone() }
    }

    pub fn build(&self) -> Result<Pattern> {
        let window = FiniteSubset::new(self.window.iter().cloned());
        if window.elements() != self.window.as_slice() {
            return Err(GcaError::Config("pattern window must be in canonical order".into()));
        }
        Pattern::new(window, self.values.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingTerm {
    pub element: GroupElement,
    pub entries: Vec<u32>,
}

/// Element of `Mat_n(F_p[G])`; terms sorted by element, zero matrices omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingRecord {
    pub p: u32,
    pub n: usize,
    pub support: Vec<RingTerm>,
}
