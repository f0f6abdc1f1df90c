//! Alphabets and local rules.
//!
//! A letter is always stored as an index into `0..|A|`. For vector-space
//! alphabets `F_p^n` the index is the base-`p` number whose digits are the
//! coordinates, first coordinate most significant. Patterns over a window
//! are indexed the same way: letters in canonical window order, first
//! element most significant.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GcaError, Result};
use crate::fp::{check_prime, FpMatrix};
use crate::groups::{CayleyTable, FiniteGroup, FiniteSubset, GroupElement, GroupUniverse, Preset};

pub type Letter = usize;

/// Largest dense table any rule or window map may materialize.
pub const TABLE_CAP: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alphabet {
    PlainSet { size: usize },
    FiniteGroup(FiniteGroup),
    VectorSpace { p: u32, dim: usize },
}

impl Alphabet {
    pub fn plain(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(GcaError::Config("alphabet must be nonempty".into()));
        }
        Ok(Alphabet::PlainSet { size })
    }

    pub fn group(preset: Preset) -> Result<Self> {
        let table = preset.table()?;
        Ok(Alphabet::FiniteGroup(FiniteGroup { table: Arc::new(table), preset: Some(preset) }))
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::group(Preset::Cyclic(n))
    }

    pub fn from_cayley(table: CayleyTable) -> Self {
        Alphabet::FiniteGroup(FiniteGroup { table: Arc::new(table), preset: None })
    }

    pub fn vector(p: u32, dim: usize) -> Result<Self> {
        check_prime(p)?;
        if dim == 0 {
            return Err(GcaError::Config("vector alphabet needs dimension >= 1".into()));
        }
        Ok(Alphabet::VectorSpace { p, dim })
    }

    pub fn size(&self) -> usize {
        match self {
            Alphabet::PlainSet { size } => *size,
            Alphabet::FiniteGroup(g) => g.table.order(),
            Alphabet::VectorSpace { p, dim } => (*p as usize).pow(*dim as u32),
        }
    }

    /// The neutral letter `e`; letter 0 for plain sets.
    pub fn neutral(&self) -> Letter {
        match self {
            Alphabet::FiniteGroup(g) => g.table.identity(),
            _ => 0,
        }
    }

    pub fn has_group_law(&self) -> bool {
        !matches!(self, Alphabet::PlainSet { .. })
    }

    pub fn group_table(&self) -> Option<&CayleyTable> {
        match self {
            Alphabet::FiniteGroup(g) => Some(&g.table),
            _ => None,
        }
    }

    /// Group law: multiplication in a group alphabet, addition in a vector space.
    pub fn op(&self, a: Letter, b: Letter) -> Letter {
        match self {
            Alphabet::FiniteGroup(g) => g.table.mul(a, b),
            Alphabet::VectorSpace { p, .. } => {
                let (va, vb) = (self.to_vector(a), self.to_vector(b));
                self.from_vector(&va.iter().zip(&vb).map(|(x, y)| (x + y) % p).collect::<Vec<_>>())
            }
            Alphabet::PlainSet { .. } => panic!("plain alphabets have no group law"),
        }
    }

    pub fn inverse(&self, a: Letter) -> Letter {
        match self {
            Alphabet::FiniteGroup(g) => g.table.inv(a),
            Alphabet::VectorSpace { p, .. } => {
                let v: Vec<u32> = self.to_vector(a).iter().map(|x| (p - x) % p).collect();
                self.from_vector(&v)
            }
            Alphabet::PlainSet { .. } => panic!("plain alphabets have no group law"),
        }
    }

    pub fn to_vector(&self, mut a: Letter) -> Vec<u32> {
        let Alphabet::VectorSpace { p, dim } = self else {
            panic!("not a vector alphabet");
        };
        let mut v = vec![0u32; *dim];
        for slot in v.iter_mut().rev() {
            *slot = (a % *p as usize) as u32;
            a /= *p as usize;
        }
        v
    }

    pub fn from_vector(&self, v: &[u32]) -> Letter {
        let Alphabet::VectorSpace { p, .. } = self else {
            panic!("not a vector alphabet");
        };
        v.iter().fold(0, |acc, &x| acc * *p as usize + x as usize)
    }

    pub fn field(&self) -> Option<(u32, usize)> {
        match self {
            Alphabet::VectorSpace { p, dim } => Some((*p, *dim)),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Alphabet::PlainSet { size } => format!("set({size})"),
            Alphabet::FiniteGroup(g) => match &g.preset {
                Some(p) => p.to_string(),
                None => format!("group(order {})", g.table.order()),
            },
            Alphabet::VectorSpace { p, dim } => format!("F_{p}^{dim}"),
        }
    }
}

/// `base^exp` as a `u128`, saturating.
pub fn pow_count(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

pub fn encode_pattern(size: usize, letters: &[Letter]) -> usize {
    letters.iter().fold(0, |acc, &x| acc * size + x)
}

pub fn decode_pattern(size: usize, mut index: usize, len: usize) -> Vec<Letter> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
    out
}

/// Why a list of endomorphism tables fails to define a group local rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomRejection {
    WrongLength { position: usize, expected: usize, found: usize },
    LetterOutOfRange { position: usize, letter: usize },
    /// `φ(a b) ≠ φ(a) φ(b)` for the table at `position`.
    NotEndomorphism { position: usize, a: Letter, b: Letter },
    /// `φ_first(a)` and `φ_second(b)` do not commute.
    ImagesDoNotCommute { first: usize, second: usize, a: Letter, b: Letter },
}

impl fmt::Display for HomRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomRejection::WrongLength { position, expected, found } => {
                write!(f, "table {position} has {found} entries, expected {expected}")
            }
            HomRejection::LetterOutOfRange { position, letter } => {
                write!(f, "table {position} maps to letter {letter}, which is out of range")
            }
            HomRejection::NotEndomorphism { position, a, b } => {
                write!(f, "phi_{position}({a}*{b}) != phi_{position}({a})*phi_{position}({b})")
            }
            HomRejection::ImagesDoNotCommute { first, second, a, b } => {
                write!(f, "phi_{first}({a}) and phi_{second}({b}) do not commute")
            }
        }
    }
}

/// Accepts iff every table is an endomorphism of the group and the images of
/// distinct tables commute elementwise.
pub fn validate_hom_tables(group: &CayleyTable, tables: &[Vec<Letter>]) -> Result<(), HomRejection> {
    let n = group.order();
    for (position, phi) in tables.iter().enumerate() {
        if phi.len() != n {
            return Err(HomRejection::WrongLength { position, expected: n, found: phi.len() });
        }
        if let Some(&letter) = phi.iter().find(|&&x| x >= n) {
            return Err(HomRejection::LetterOutOfRange { position, letter });
        }
        for a in 0..n {
            for b in 0..n {
                if phi[group.mul(a, b)] != group.mul(phi[a], phi[b]) {
                    return Err(HomRejection::NotEndomorphism { position, a, b });
                }
            }
        }
    }
    for (first, phi) in tables.iter().enumerate() {
        for (second, psi) in tables.iter().enumerate().skip(first + 1) {
            for a in 0..n {
                for b in 0..n {
                    let (x, y) = (phi[a], psi[b]);
                    if group.mul(x, y) != group.mul(y, x) {
                        return Err(HomRejection::ImagesDoNotCommute { first, second, a, b });
                    }
                }
            }
        }
    }
    Ok(())
}

/// All endomorphisms of a finite group, sorted lexicographically as tables.
pub fn endomorphisms(group: &CayleyTable) -> Vec<Vec<Letter>> {
    let n = group.order();
    let mut gens: Vec<usize> = Vec::new();
    let mut covered = group.closure(&gens);
    for x in 0..n {
        if covered.binary_search(&x).is_err() {
            gens.push(x);
            covered = group.closure(&gens);
        }
    }
    let mut out = Vec::new();
    let mut images = vec![0usize; gens.len()];
    'assign: loop {
        if let Some(map) = extend_to_hom(group, &gens, &images) {
            out.push(map);
        }
        let mut k = gens.len();
        loop {
            if k == 0 {
                break 'assign;
            }
            k -= 1;
            images[k] += 1;
            if images[k] < n {
                continue 'assign;
            }
            images[k] = 0;
        }
    }
    out.sort();
    out
}

fn extend_to_hom(group: &CayleyTable, gens: &[usize], images: &[usize]) -> Option<Vec<Letter>> {
    let n = group.order();
    let mut map = vec![usize::MAX; n];
    map[group.identity()] = group.identity();
    let mut queue = std::collections::VecDeque::from([group.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&g, &img) in gens.iter().zip(images) {
            let y = group.mul(x, g);
            let value = group.mul(map[x], img);
            if map[y] == usize::MAX {
                map[y] = value;
                queue.push_back(y);
            } else if map[y] != value {
                return None;
            }
        }
    }
    Some(map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleBody {
    /// Letter for every pattern index over the memory set.
    Table(Vec<Letter>),
    /// One endomorphism table per memory element; `μ(x) = ∏ φ_g(x(g))`.
    Hom(Vec<Vec<Letter>>),
    /// One `n × n` matrix per memory element; `μ(x) = Σ M_g x(g)`.
    Linear(Vec<FpMatrix>),
}

impl RuleBody {
    pub fn kind(&self) -> &'static str {
        match self {
            RuleBody::Table(_) => "table",
            RuleBody::Hom(_) => "hom",
            RuleBody::Linear(_) => "linear",
        }
    }
}

/// A local defining map `μ: A^M → A` on a canonical memory set.
///
/// The memory set always contains the identity and is closed under inverses;
/// construction adds the missing elements and extends the body so that it
/// ignores them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRule {
    alphabet: Alphabet,
    memory: FiniteSubset,
    body: RuleBody,
    identity_pos: usize,
}

impl LocalRule {
    pub fn new(universe: &GroupUniverse, alphabet: Alphabet, memory: FiniteSubset, body: RuleBody) -> Result<Self> {
        for g in memory.iter() {
            universe.validate(g)?;
        }
        if memory.is_empty() {
            return Err(GcaError::MalformedRule("memory set is empty".into()));
        }
        let m = memory.len();
        let size = alphabet.size();
        match &body {
            RuleBody::Table(t) => {
                let expected = pow_count(size, m);
                if expected > TABLE_CAP {
                    return Err(GcaError::WindowTooLarge { size: expected, cap: TABLE_CAP });
                }
                if t.len() as u128 != expected {
                    return Err(GcaError::MalformedRule(format!(
                        "table has {} entries, expected {expected}",
                        t.len()
                    )));
                }
                if t.iter().any(|&x| x >= size) {
                    return Err(GcaError::MalformedRule("table letter out of range".into()));
                }
            }
            RuleBody::Hom(tables) => {
                let group = alphabet.group_table().ok_or(GcaError::NotAGroupAlphabet)?;
                if tables.len() != m {
                    return Err(GcaError::MalformedRule(format!(
                        "{} endomorphism tables for {m} memory elements",
                        tables.len()
                    )));
                }
                validate_hom_tables(group, tables).map_err(GcaError::HomRejected)?;
            }
            RuleBody::Linear(mats) => {
                let (p, dim) = alphabet
                    .field()
                    .ok_or_else(|| GcaError::MalformedRule("linear body needs a vector alphabet".into()))?;
                if mats.len() != m {
                    return Err(GcaError::MalformedRule(format!("{} matrices for {m} memory elements", mats.len())));
                }
                if mats.iter().any(|a| a.p() != p || a.rows() != dim || a.cols() != dim) {
                    return Err(GcaError::MalformedRule(format!("matrices must be {dim}x{dim} over F_{p}")));
                }
            }
        }
        let rule = LocalRule { alphabet, memory, body, identity_pos: 0 };
        rule.canonicalize(universe)
    }

    pub fn table(universe: &GroupUniverse, alphabet: Alphabet, memory: FiniteSubset, table: Vec<Letter>) -> Result<Self> {
        Self::new(universe, alphabet, memory, RuleBody::Table(table))
    }

    pub fn hom(universe: &GroupUniverse, alphabet: Alphabet, memory: FiniteSubset, tables: Vec<Vec<Letter>>) -> Result<Self> {
        Self::new(universe, alphabet, memory, RuleBody::Hom(tables))
    }

    pub fn linear(universe: &GroupUniverse, alphabet: Alphabet, memory: FiniteSubset, mats: Vec<FpMatrix>) -> Result<Self> {
        Self::new(universe, alphabet, memory, RuleBody::Linear(mats))
    }

    /// `μ(x) = x(g)`: the automaton `c ↦ (h ↦ c(hg))`.
    pub fn shift(universe: &GroupUniverse, alphabet: Alphabet, g: GroupElement) -> Result<Self> {
        let memory = FiniteSubset::new([g]);
        let body = match &alphabet {
            Alphabet::VectorSpace { p, dim } => RuleBody::Linear(vec![FpMatrix::identity(*p, *dim)]),
            Alphabet::FiniteGroup(t) => RuleBody::Hom(vec![(0..t.table.order()).collect()]),
            Alphabet::PlainSet { size } => RuleBody::Table((0..*size).collect()),
        };
        Self::new(universe, alphabet, memory, body)
    }

    pub fn identity(universe: &GroupUniverse, alphabet: Alphabet) -> Result<Self> {
        Self::shift(universe, alphabet, universe.identity())
    }

    fn canonicalize(self, universe: &GroupUniverse) -> Result<Self> {
        let full = universe.symmetrize(&self.memory);
        let mut rule = if full == self.memory { self } else { self.extend_to(&full)? };
        rule.identity_pos = rule.memory.index_of(&universe.identity()).expect("symmetrized memory holds 1");
        Ok(rule)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    pub fn memory(&self) -> &FiniteSubset {
        &self.memory
    }
    pub fn body(&self) -> &RuleBody {
        &self.body
    }
    /// Position of `1_G` in the memory set.
    pub fn identity_pos(&self) -> usize {
        self.identity_pos
    }

    pub fn pattern_count(&self) -> u128 {
        pow_count(self.alphabet.size(), self.memory.len())
    }

    /// `μ(x)` for letters listed in canonical memory order.
    pub fn eval(&self, x: &[Letter]) -> Letter {
        debug_assert_eq!(x.len(), self.memory.len());
        match &self.body {
            RuleBody::Table(t) => t[encode_pattern(self.alphabet.size(), x)],
            RuleBody::Hom(tables) => {
                let group = self.alphabet.group_table().expect("hom body on group alphabet");
                tables.iter().zip(x).fold(group.identity(), |acc, (phi, &a)| group.mul(acc, phi[a]))
            }
            RuleBody::Linear(mats) => {
                let (p, dim) = self.alphabet.field().expect("linear body on vector alphabet");
                let mut acc = vec![0u32; dim];
                for (m, &a) in mats.iter().zip(x) {
                    if a == 0 {
                        continue;
                    }
                    let v = m.mul_vec(&self.alphabet.to_vector(a));
                    for (s, t) in acc.iter_mut().zip(v) {
                        *s = (*s + t) % p;
                    }
                }
                self.alphabet.from_vector(&acc)
            }
        }
    }

    /// Evaluates on a pattern whose window must be exactly the memory set.
    pub fn eval_pattern(&self, window: &FiniteSubset, values: &[Letter]) -> Result<Letter> {
        if window != &self.memory || values.len() != window.len() {
            return Err(GcaError::DomainMismatch);
        }
        if values.iter().any(|&x| x >= self.alphabet.size()) {
            return Err(GcaError::DomainMismatch);
        }
        Ok(self.eval(values))
    }

    /// The same map on a larger memory set, ignoring the new coordinates.
    pub fn extend_to(&self, superset: &FiniteSubset) -> Result<Self> {
        let pos: Vec<usize> = self
            .memory
            .iter()
            .map(|g| {
                superset
                    .index_of(g)
                    .ok_or_else(|| GcaError::MalformedRule("extension target does not contain memory".into()))
            })
            .collect::<Result<_>>()?;
        let size = self.alphabet.size();
        let body = match &self.body {
            RuleBody::Linear(mats) => {
                let (p, dim) = self.alphabet.field().expect("vector alphabet");
                let mut out = vec![FpMatrix::zeros(p, dim, dim); superset.len()];
                for (m, &j) in mats.iter().zip(&pos) {
                    out[j] = m.clone();
                }
                RuleBody::Linear(out)
            }
            RuleBody::Hom(tables) => {
                let e = self.alphabet.neutral();
                let mut out = vec![vec![e; size]; superset.len()];
                for (t, &j) in tables.iter().zip(&pos) {
                    out[j] = t.clone();
                }
                RuleBody::Hom(out)
            }
            RuleBody::Table(_) => {
                let count = pow_count(size, superset.len());
                if count > TABLE_CAP {
                    return Err(GcaError::WindowTooLarge { size: count, cap: TABLE_CAP });
                }
                let mut buf = vec![0; self.memory.len()];
                let table = (0..count as usize)
                    .map(|idx| {
                        let y = decode_pattern(size, idx, superset.len());
                        for (slot, &j) in buf.iter_mut().zip(&pos) {
                            *slot = y[j];
                        }
                        self.eval(&buf)
                    })
                    .collect();
                RuleBody::Table(table)
            }
        };
        let identity_pos = superset.index_of(&self.memory.elements()[self.identity_pos]).unwrap_or(0);
        Ok(LocalRule { alphabet: self.alphabet.clone(), memory: superset.clone(), body, identity_pos })
    }

    /// Dense table over the memory set.
    pub fn to_table(&self) -> Result<Vec<Letter>> {
        if let RuleBody::Table(t) = &self.body {
            return Ok(t.clone());
        }
        let count = self.pattern_count();
        if count > TABLE_CAP {
            return Err(GcaError::WindowTooLarge { size: count, cap: TABLE_CAP });
        }
        let size = self.alphabet.size();
        let m = self.memory.len();
        Ok((0..count as usize).map(|idx| self.eval(&decode_pattern(size, idx, m))).collect())
    }

    pub fn with_table_body(&self) -> Result<Self> {
        Ok(LocalRule { body: RuleBody::Table(self.to_table()?), ..self.clone() })
    }

    /// Pushes the rule along a group homomorphism given by the images of the
    /// memory elements. Coordinates that collide are merged: matrices add,
    /// endomorphisms multiply, table rules read the shared letter twice.
    pub fn pushforward(&self, target: &GroupUniverse, images: &[GroupElement]) -> Result<Self> {
        assert_eq!(images.len(), self.memory.len());
        let new_memory = FiniteSubset::new(images.iter().cloned());
        let pos: Vec<usize> = images.iter().map(|g| new_memory.index_of(g).expect("image present")).collect();
        let size = self.alphabet.size();
        let body = match &self.body {
            RuleBody::Linear(mats) => {
                let (p, dim) = self.alphabet.field().expect("vector alphabet");
                let mut out = vec![FpMatrix::zeros(p, dim, dim); new_memory.len()];
                for (m, &j) in mats.iter().zip(&pos) {
                    out[j] = out[j].add(m);
                }
                RuleBody::Linear(out)
            }
            RuleBody::Hom(tables) => {
                let group = self.alphabet.group_table().expect("group alphabet");
                let mut out = vec![vec![group.identity(); size]; new_memory.len()];
                for (t, &j) in tables.iter().zip(&pos) {
                    for a in 0..size {
                        out[j][a] = group.mul(out[j][a], t[a]);
                    }
                }
                RuleBody::Hom(out)
            }
            RuleBody::Table(_) => {
                let count = pow_count(size, new_memory.len());
                if count > TABLE_CAP {
                    return Err(GcaError::WindowTooLarge { size: count, cap: TABLE_CAP });
                }
                let mut buf = vec![0; self.memory.len()];
                let table = (0..count as usize)
                    .map(|idx| {
                        let y = decode_pattern(size, idx, new_memory.len());
                        for (slot, &j) in buf.iter_mut().zip(&pos) {
                            *slot = y[j];
                        }
                        self.eval(&buf)
                    })
                    .collect();
                RuleBody::Table(table)
            }
        };
        LocalRule::new(target, self.alphabet.clone(), new_memory, body)
    }

    /// Extensional equality of two rules over the same alphabet.
    pub fn equivalent(&self, other: &LocalRule) -> Result<bool> {
        if self.alphabet != other.alphabet {
            return Ok(false);
        }
        let union = self.memory.union(&other.memory);
        let (a, b) = (self.extend_to(&union)?, other.extend_to(&union)?);
        match (&a.body, &b.body) {
            (RuleBody::Linear(x), RuleBody::Linear(y)) => Ok(x == y),
            (RuleBody::Hom(x), RuleBody::Hom(y)) => Ok(x == y),
            _ => Ok(a.to_table()? == b.to_table()?),
        }
    }

    /// The lexicographically least pattern `x` with `μ(x) ≠ x(1_G)`, or
    /// `None` when the rule is the identity.
    pub fn identity_defect(&self) -> Result<Option<Vec<Letter>>> {
        let m = self.memory.len();
        let size = self.alphabet.size();
        match &self.body {
            RuleBody::Table(t) => Ok(t.iter().enumerate().find_map(|(idx, &v)| {
                let x = decode_pattern(size, idx, m);
                (v != x[self.identity_pos]).then_some(x)
            })),
            // For Hom and Linear bodies the map is a product of per-site maps,
            // so it is the identity iff every single-site pattern is fixed.
            // Patterns supported on later sites are smaller, so scanning
            // single-site patterns from the last site finds the least defect.
            _ => {
                let e = self.alphabet.neutral();
                for pos in (0..m).rev() {
                    let letters: Vec<Letter> = match &self.alphabet {
                        Alphabet::VectorSpace { p, dim } => {
                            // within one site, unit vectors from the last coordinate
                            (0..*dim)
                                .rev()
                                .map(|k| (*p as usize).pow((*dim - 1 - k) as u32))
                                .collect()
                        }
                        _ => (0..size).filter(|&a| a != e).collect(),
                    };
                    for a in letters {
                        let mut x = vec![e; m];
                        x[pos] = a;
                        if self.eval(&x) != x[self.identity_pos] {
                            return Ok(Some(x));
                        }
                    }
                }
                Ok(None)
            }
        }
    }

    pub fn is_identity(&self) -> Result<bool> {
        Ok(self.identity_defect()?.is_none())
    }

    /// Reads off per-site matrices when the rule is additive on a vector
    /// alphabet; `None` otherwise.
    pub fn to_linear(&self) -> Result<Option<Self>> {
        match (&self.body, &self.alphabet) {
            (RuleBody::Linear(_), _) => Ok(Some(self.clone())),
            (RuleBody::Table(_), Alphabet::VectorSpace { p, dim }) => {
                if !self.is_additive()? {
                    return Ok(None);
                }
                let m = self.memory.len();
                let e = self.alphabet.neutral();
                let mut mats = Vec::with_capacity(m);
                for pos in 0..m {
                    let mut mat = FpMatrix::zeros(*p, *dim, *dim);
                    for k in 0..*dim {
                        let mut unit = vec![0u32; *dim];
                        unit[k] = 1;
                        let mut x = vec![e; m];
                        x[pos] = self.alphabet.from_vector(&unit);
                        let col = self.alphabet.to_vector(self.eval(&x));
                        for (r, v) in col.into_iter().enumerate() {
                            mat.set(r, k, v);
                        }
                    }
                    mats.push(mat);
                }
                Ok(Some(LocalRule { body: RuleBody::Linear(mats), ..self.clone() }))
            }
            _ => Ok(None),
        }
    }

    /// Checks `μ(xy) = μ(x)μ(y)` for every pattern `x` and every single-site
    /// pattern `y`. Single-site patterns generate `A^M`, so this is exhaustive.
    pub fn is_additive(&self) -> Result<bool> {
        if !self.alphabet.has_group_law() {
            return Ok(false);
        }
        let size = self.alphabet.size();
        let m = self.memory.len();
        let count = self.pattern_count();
        let checks = count.saturating_mul((m * size) as u128);
        if checks > TABLE_CAP {
            return Err(GcaError::CapExceeded { size: checks, cap: TABLE_CAP });
        }
        let op: Vec<Letter> = (0..size * size).map(|k| self.alphabet.op(k / size, k % size)).collect();
        let table = self.to_table()?;
        let e = self.alphabet.neutral();
        let weights: Vec<usize> = (0..m).map(|i| size.pow((m - 1 - i) as u32)).collect();
        for (i, &mu_x) in table.iter().enumerate() {
            let x = decode_pattern(size, i, m);
            for pos in 0..m {
                for a in 0..size {
                    let mut y = vec![e; m];
                    y[pos] = a;
                    let mu_y = table[encode_pattern(size, &y)];
                    let xy = i - x[pos] * weights[pos] + op[x[pos] * size + a] * weights[pos];
                    if table[xy] != op[mu_x * size + mu_y] {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// All valid homomorphism rules on the memory set `memory` (before
/// canonicalization), in lexicographic order of their endomorphism tuples.
/// `budget` bounds the number of candidate tuples examined.
pub fn enumerate_hom_rules(
    universe: &GroupUniverse,
    alphabet: &Alphabet,
    memory: &FiniteSubset,
    budget: u128,
) -> Result<Vec<LocalRule>> {
    let group = alphabet.group_table().ok_or(GcaError::NotAGroupAlphabet)?;
    let ends = endomorphisms(group);
    let commute: Vec<Vec<bool>> = ends
        .iter()
        .map(|phi| {
            ends.iter()
                .map(|psi| {
                    phi.iter().all(|&x| psi.iter().all(|&y| group.mul(x, y) == group.mul(y, x)))
                })
                .collect()
        })
        .collect();
    let m = memory.len();
    let mut choice = vec![0usize; m];
    let mut examined: u128 = 0;
    let mut rules = Vec::new();
    'tuples: loop {
        examined += 1;
        if examined > budget {
            return Err(GcaError::BudgetExceeded { partial: rules.len() });
        }
        let ok = (0..m).all(|i| (i + 1..m).all(|j| commute[choice[i]][choice[j]]));
        if ok {
            let tables = choice.iter().map(|&c| ends[c].clone()).collect();
            rules.push(LocalRule::hom(universe, alphabet.clone(), memory.clone(), tables)?);
        }
        let mut k = m;
        loop {
            if k == 0 {
                break 'tuples;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < ends.len() {
                continue 'tuples;
            }
            choice[k] = 0;
        }
    }
    Ok(rules)
}

/// Linear rule with matrices drawn uniformly from `Mat_n(F_p)`; a
/// deterministic function of `seed`.
pub fn random_linear_rule(
    universe: &GroupUniverse,
    p: u32,
    n: usize,
    memory: &FiniteSubset,
    seed: u64,
) -> Result<LocalRule> {
    let alphabet = Alphabet::vector(p, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats = memory
        .iter()
        .map(|_| FpMatrix::from_flat(p, n, n, (0..n * n).map(|_| rng.gen_range(0..p)).collect()))
        .collect::<Result<Vec<_>>>()?;
    LocalRule::linear(universe, alphabet, memory.clone(), mats)
}
