//! Group backends: finite groups given by Cayley tables, free abelian groups
//! `Z^d`, and free groups `F_k`.
//!
//! Elements have a unique canonical representation (an index, an integer
//! vector, or a freely reduced word), so structural equality is group
//! equality. [`FiniteSubset`] keeps its elements sorted in the canonical
//! order: index order for finite groups, lexicographic order for vectors,
//! and length-then-lexicographic order for words with `a < A < b < B < ...`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{GcaError, Result};
use crate::lattice;

/// A named family a finite group table was generated from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Product(Vec<Preset>),
}

impl Preset {
    pub fn table(&self) -> Result<CayleyTable> {
        match self {
            Preset::Cyclic(n) => CayleyTable::cyclic(*n),
            Preset::Dihedral(n) => CayleyTable::dihedral(*n),
            Preset::Symmetric(n) => CayleyTable::symmetric(*n),
            Preset::Product(factors) => {
                let mut acc = CayleyTable::cyclic(1)?;
                for f in factors {
                    acc = CayleyTable::product(&acc, &f.table()?);
                }
                Ok(acc)
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Cyclic(n) => write!(f, "cyclic({n})"),
            Preset::Dihedral(n) => write!(f, "dihedral({n})"),
            Preset::Symmetric(n) => write!(f, "symmetric({n})"),
            Preset::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|p| p.to_string()).collect();
                write!(f, "product({})", parts.join(", "))
            }
        }
    }
}

/// Multiplication table of a finite group on `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl CayleyTable {
    /// Validates the group axioms on every triple and derives the identity
    /// and inverse tables.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(GcaError::InvalidGroupTable("empty table".into()));
        }
        if rows.iter().any(|r| r.len() != order) {
            return Err(GcaError::InvalidGroupTable("table is not square".into()));
        }
        if rows.iter().flatten().any(|&x| x >= order) {
            return Err(GcaError::InvalidGroupTable("entry out of range".into()));
        }
        let table: Vec<usize> = rows.concat();
        let at = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| GcaError::InvalidGroupTable("no identity element".into()))?;
        let mut inverse = vec![0; order];
        for a in 0..order {
            inverse[a] = (0..order)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| GcaError::InvalidGroupTable(format!("element {a} has no inverse")))?;
        }
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GcaError::InvalidGroupTable(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(CayleyTable { order, table, identity, inverse })
    }

    /// Builds a table known to be a group, deriving identity and inverses
    /// without re-checking associativity.
    pub(crate) fn from_trusted(order: usize, table: Vec<usize>) -> Self {
        let at = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order).find(|&e| (0..order).all(|x| at(e, x) == x)).expect("group has an identity");
        let inverse = (0..order)
            .map(|a| (0..order).find(|&b| at(a, b) == identity).expect("group has inverses"))
            .collect();
        CayleyTable { order, table, identity, inverse }
    }

    fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let rows: Vec<Vec<usize>> = (0..order).map(|a| (0..order).map(|b| f(a, b)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GcaError::InvalidGroupTable("cyclic group of order 0".into()));
        }
        Self::from_fn(n, |a, b| (a + b) % n)
    }

    /// Dihedral group of order `2n`; element `r^i s^j` has index `i + n j`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GcaError::InvalidGroupTable("dihedral group with n = 0".into()));
        }
        Self::from_fn(2 * n, |x, y| {
            let (a, b) = (x % n, x / n);
            let (c, d) = (y % n, y / n);
            let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
            rot + n * ((b + d) % 2)
        })
    }

    /// Symmetric group on `n` points; permutations are indexed in
    /// lexicographic order and compose as functions, `(st)(i) = s(t(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(GcaError::InvalidGroupTable(format!("symmetric({n}) is out of range 1..=6")));
        }
        let perms = permutations(n);
        let index_of = |p: &Vec<usize>| perms.binary_search(p).expect("closed under composition");
        Self::from_fn(perms.len(), |a, b| {
            let comp: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index_of(&comp)
        })
    }

    /// Direct product; `(a, b)` has index `a * |B| + b`.
    pub fn product(a: &CayleyTable, b: &CayleyTable) -> CayleyTable {
        let (na, nb) = (a.order, b.order);
        let order = na * nb;
        let mut table = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                table[x * order + y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
            }
        }
        let inverse = (0..order).map(|x| a.inv(x / nb) * nb + b.inv(x % nb)).collect();
        CayleyTable { order, table, identity: a.identity * nb + b.identity, inverse }
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    /// Closure of `gens` under multiplication, as a sorted index list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub table: Arc<CayleyTable>,
    pub preset: Option<Preset>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupUniverse {
    Finite(FiniteGroup),
    FreeAbelian { rank: usize },
    Free { rank: usize },
}

/// A group element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Index(usize),
    Vector(Vec<i64>),
    /// Reduced word; letter `i > 0` is generator `i`, `-i` its inverse.
    Word(Vec<i32>),
}

fn letter_key(x: i32) -> (i32, bool) {
    (x.abs(), x < 0)
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        use GroupElement::*;
        match (self, other) {
            (Index(a), Index(b)) => a.cmp(b),
            (Vector(a), Vector(b)) => a.cmp(b),
            (Word(a), Word(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.iter().map(|&x| letter_key(x)).cmp(b.iter().map(|&x| letter_key(x)))),
            _ => self.variant_rank().cmp(&other.variant_rank()),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GroupElement {
    fn variant_rank(&self) -> u8 {
        match self {
            GroupElement::Index(_) => 0,
            GroupElement::Vector(_) => 1,
            GroupElement::Word(_) => 2,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            GroupElement::Index(i) => Some(*i),
            _ => None,
        }
    }

    pub fn vector(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Vector(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Index(i) => write!(f, "{i}"),
            GroupElement::Vector(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Word(w) if w.is_empty() => write!(f, "1"),
            GroupElement::Word(w) => write!(f, "{}", word_to_string(w)),
        }
    }
}

/// Renders a word with `a, b, c, ...` for generators and capitals for inverses.
pub fn word_to_string(w: &[i32]) -> String {
    w.iter()
        .map(|&x| {
            let c = (b'a' + (x.unsigned_abs() - 1) as u8) as char;
            if x < 0 {
                c.to_ascii_uppercase()
            } else {
                c
            }
        })
        .collect()
}

pub fn word_from_string(s: &str) -> Result<Vec<i32>> {
    s.chars()
        .map(|c| {
            if c.is_ascii_lowercase() {
                Ok((c as u8 - b'a') as i32 + 1)
            } else if c.is_ascii_uppercase() {
                Ok(-((c as u8 - b'A') as i32 + 1))
            } else {
                Err(GcaError::InvalidElement(format!("bad word letter {c:?}")))
            }
        })
        .collect()
}

/// Sorted, duplicate-free list of group elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FiniteSubset {
    elements: Vec<GroupElement>,
}

impl FiniteSubset {
    pub fn new(elements: impl IntoIterator<Item = GroupElement>) -> Self {
        let mut elements: Vec<GroupElement> = elements.into_iter().collect();
        elements.sort();
        elements.dedup();
        FiniteSubset { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elements.iter()
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index_of(g).is_some()
    }

    pub fn is_subset(&self, other: &FiniteSubset) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }

    pub fn union(&self, other: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::new(self.elements.iter().chain(other.iter()).cloned())
    }
}

impl<'a> IntoIterator for &'a FiniteSubset {
    type Item = &'a GroupElement;
    type IntoIter = std::slice::Iter<'a, GroupElement>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

fn free_mul(a: &[i32], b: &[i32]) -> Vec<i32> {
    let mut out = a.to_vec();
    for &x in b {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

impl GroupUniverse {
    pub fn from_preset(preset: Preset) -> Result<Self> {
        let table = preset.table()?;
        Ok(GroupUniverse::Finite(FiniteGroup { table: Arc::new(table), preset: Some(preset) }))
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::from_preset(Preset::Cyclic(n))
    }

    pub fn dihedral(n: usize) -> Result<Self> {
        Self::from_preset(Preset::Dihedral(n))
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        Self::from_preset(Preset::Symmetric(n))
    }

    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self> {
        Ok(GroupUniverse::Finite(FiniteGroup { table: Arc::new(CayleyTable::from_rows(rows)?), preset: None }))
    }

    pub fn from_cayley(table: CayleyTable) -> Self {
        GroupUniverse::Finite(FiniteGroup { table: Arc::new(table), preset: None })
    }

    pub fn free_abelian(rank: usize) -> Self {
        GroupUniverse::FreeAbelian { rank }
    }

    pub fn free(rank: usize) -> Self {
        GroupUniverse::Free { rank }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupUniverse::Finite(_))
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            GroupUniverse::Finite(g) => Some(g.table.order()),
            GroupUniverse::FreeAbelian { rank: 0 } | GroupUniverse::Free { rank: 0 } => Some(1),
            _ => None,
        }
    }

    pub fn cayley(&self) -> Option<&CayleyTable> {
        match self {
            GroupUniverse::Finite(g) => Some(&g.table),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GroupUniverse::Finite(g) => match &g.preset {
                Some(p) => p.to_string(),
                None => format!("finite(order {})", g.table.order()),
            },
            GroupUniverse::FreeAbelian { rank } => format!("Z^{rank}"),
            GroupUniverse::Free { rank } => format!("F_{rank}"),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupUniverse::Finite(g) => GroupElement::Index(g.table.identity()),
            GroupUniverse::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
            GroupUniverse::Free { .. } => GroupElement::Word(Vec::new()),
        }
    }

    /// Checks that `g` is a canonical element of this universe.
    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        let ok = match (self, g) {
            (GroupUniverse::Finite(t), GroupElement::Index(i)) => *i < t.table.order(),
            (GroupUniverse::FreeAbelian { rank }, GroupElement::Vector(v)) => v.len() == *rank,
            (GroupUniverse::Free { rank }, GroupElement::Word(w)) => {
                w.iter().all(|&x| x != 0 && x.unsigned_abs() as usize <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GcaError::InvalidElement(format!("{g} is not an element of {}", self.describe())))
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (GroupUniverse::Finite(t), GroupElement::Index(x), GroupElement::Index(y)) => {
                GroupElement::Index(t.table.mul(*x, *y))
            }
            (GroupUniverse::FreeAbelian { .. }, GroupElement::Vector(x), GroupElement::Vector(y)) => {
                GroupElement::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupUniverse::Free { .. }, GroupElement::Word(x), GroupElement::Word(y)) => {
                GroupElement::Word(free_mul(x, y))
            }
            _ => panic!("element kind does not match universe {}", self.describe()),
        }
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (GroupUniverse::Finite(t), GroupElement::Index(x)) => GroupElement::Index(t.table.inv(*x)),
            (GroupUniverse::FreeAbelian { .. }, GroupElement::Vector(x)) => {
                GroupElement::Vector(x.iter().map(|v| -v).collect())
            }
            (GroupUniverse::Free { .. }, GroupElement::Word(w)) => {
                GroupElement::Word(w.iter().rev().map(|x| -x).collect())
            }
            _ => panic!("element kind does not match universe {}", self.describe()),
        }
    }

    /// The fixed symmetric generating set that defines the word metric.
    pub fn generators(&self) -> Vec<GroupElement> {
        match self {
            GroupUniverse::Finite(t) => (0..t.table.order())
                .filter(|&i| i != t.table.identity())
                .map(GroupElement::Index)
                .collect(),
            GroupUniverse::FreeAbelian { rank } => (0..*rank)
                .flat_map(|i| {
                    [1i64, -1].into_iter().map(move |s| {
                        let mut v = vec![0; *rank];
                        v[i] = s;
                        GroupElement::Vector(v)
                    })
                })
                .collect(),
            GroupUniverse::Free { rank } => {
                (1..=*rank as i32).flat_map(|i| [GroupElement::Word(vec![i]), GroupElement::Word(vec![-i])]).collect()
            }
        }
    }

    /// Word length with respect to [`generators`](Self::generators).
    pub fn word_length(&self, g: &GroupElement) -> usize {
        match g {
            GroupElement::Index(_) => usize::from(*g != self.identity()),
            GroupElement::Vector(v) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
            GroupElement::Word(w) => w.len(),
        }
    }

    /// Smallest `r` with `set ⊆ ball(r)`.
    pub fn radius_of(&self, set: &FiniteSubset) -> usize {
        set.iter().map(|g| self.word_length(g)).max().unwrap_or(0)
    }

    pub fn ball(&self, r: usize) -> FiniteSubset {
        match self {
            GroupUniverse::Finite(t) => {
                if r == 0 {
                    FiniteSubset::new([self.identity()])
                } else {
                    FiniteSubset::new((0..t.table.order()).map(GroupElement::Index))
                }
            }
            GroupUniverse::FreeAbelian { rank } => {
                fn go(rank: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<GroupElement>) {
                    if prefix.len() == rank {
                        out.push(GroupElement::Vector(prefix.clone()));
                        return;
                    }
                    for x in -budget..=budget {
                        prefix.push(x);
                        go(rank, budget - x.abs(), prefix, out);
                        prefix.pop();
                    }
                }
                let mut out = Vec::new();
                go(*rank, r as i64, &mut Vec::new(), &mut out);
                FiniteSubset::new(out)
            }
            GroupUniverse::Free { rank } => {
                let letters: Vec<i32> = (1..=*rank as i32).flat_map(|i| [i, -i]).collect();
                let mut out = vec![Vec::new()];
                let mut frontier = vec![Vec::<i32>::new()];
                for _ in 0..r {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for &x in &letters {
                            if w.last() != Some(&-x) {
                                let mut v = w.clone();
                                v.push(x);
                                next.push(v);
                            }
                        }
                    }
                    out.extend(next.iter().cloned());
                    frontier = next;
                }
                FiniteSubset::new(out.into_iter().map(GroupElement::Word))
            }
        }
    }

    /// `{ef : e ∈ E, f ∈ F}`.
    pub fn product_set(&self, e: &FiniteSubset, f: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::new(e.iter().flat_map(|x| f.iter().map(move |y| self.mul(x, y))))
    }

    pub fn inverse_set(&self, e: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::new(e.iter().map(|x| self.inv(x)))
    }

    /// `M ∪ M⁻¹ ∪ {1}`.
    pub fn symmetrize(&self, m: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::new(
            m.iter().cloned().chain(m.iter().map(|x| self.inv(x))).chain(std::iter::once(self.identity())),
        )
    }

    /// All elements of a finite universe in index order.
    pub fn enumerate(&self) -> Result<Vec<GroupElement>> {
        match self {
            GroupUniverse::Finite(t) => Ok((0..t.table.order()).map(GroupElement::Index).collect()),
            _ => Err(GcaError::InfiniteUniverse),
        }
    }

    /// The subgroup generated by `s`, with its embedding into this universe.
    pub fn subgroup_generated(&self, s: &FiniteSubset) -> Result<Subgroup> {
        match self {
            GroupUniverse::Finite(t) => {
                let gens: Vec<usize> = s
                    .iter()
                    .map(|g| {
                        self.validate(g)?;
                        Ok(g.index().expect("validated"))
                    })
                    .collect::<Result<_>>()?;
                let members = t.table.closure(&gens);
                let pos = |x: usize| members.binary_search(&x).expect("closed");
                let rows: Vec<Vec<usize>> = members
                    .iter()
                    .map(|&a| members.iter().map(|&b| pos(t.table.mul(a, b))).collect())
                    .collect();
                Ok(Subgroup {
                    universe: GroupUniverse::from_table(&rows)?,
                    embedding: Embedding::Indices(members),
                })
            }
            GroupUniverse::FreeAbelian { rank } => {
                let gens: Vec<Vec<i64>> = s
                    .iter()
                    .map(|g| {
                        self.validate(g)?;
                        Ok(g.vector().expect("validated").to_vec())
                    })
                    .collect::<Result<_>>()?;
                let basis = lattice::hermite_normal_form(&gens, *rank);
                Ok(Subgroup {
                    universe: GroupUniverse::FreeAbelian { rank: basis.len() },
                    embedding: Embedding::Lattice { basis, ambient_rank: *rank },
                })
            }
            GroupUniverse::Free { .. } => Err(GcaError::UnsupportedUniverse(
                "subgroups of free groups are not supported".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Embedding {
    /// Subgroup index `i` maps to parent index `members[i]`.
    Indices(Vec<usize>),
    /// Subgroup coordinates map to integer combinations of the normal form rows.
    Lattice { basis: Vec<Vec<i64>>, ambient_rank: usize },
}

/// A subgroup as a universe of its own, together with the inclusion map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub universe: GroupUniverse,
    pub embedding: Embedding,
}

impl Subgroup {
    pub fn embed(&self, h: &GroupElement) -> GroupElement {
        match (&self.embedding, h) {
            (Embedding::Indices(m), GroupElement::Index(i)) => GroupElement::Index(m[*i]),
            (Embedding::Lattice { basis, ambient_rank }, GroupElement::Vector(c)) => {
                GroupElement::Vector(lattice::combine(basis, c, *ambient_rank))
            }
            _ => panic!("element kind does not match subgroup"),
        }
    }

    /// The subgroup element mapping to `g`, if `g` lies in the subgroup.
    pub fn pullback(&self, g: &GroupElement) -> Option<GroupElement> {
        match (&self.embedding, g) {
            (Embedding::Indices(m), GroupElement::Index(i)) => m.binary_search(i).ok().map(GroupElement::Index),
            (Embedding::Lattice { basis, .. }, GroupElement::Vector(v)) => {
                lattice::coordinates(basis, v).map(GroupElement::Vector)
            }
            _ => None,
        }
    }

    /// `[G : H]`, or `None` when it is infinite.
    pub fn index(&self, parent: &GroupUniverse) -> Option<u64> {
        match &self.embedding {
            Embedding::Indices(m) => parent.order().map(|n| (n / m.len()) as u64),
            Embedding::Lattice { basis, ambient_rank } => {
                (basis.len() == *ambient_rank).then(|| lattice::index(basis))
            }
        }
    }

    pub fn basis(&self) -> Option<&[Vec<i64>]> {
        match &self.embedding {
            Embedding::Lattice { basis, .. } => Some(basis),
            Embedding::Indices(_) => None,
        }
    }
}

/// Elements of a subset as a set, for tests and diagnostics.
pub fn as_set(s: &FiniteSubset) -> BTreeSet<GroupElement> {
    s.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(v: i64) -> GroupElement {
        GroupElement::Vector(vec![v])
    }

    fn w(s: &str) -> GroupElement {
        GroupElement::Word(word_from_string(s).unwrap())
    }

    #[test]
    fn balls_in_z() {
        let g = GroupUniverse::free_abelian(1);
        assert_eq!(g.ball(0), FiniteSubset::new([z(0)]));
        assert_eq!(g.ball(2), FiniteSubset::new((-2..=2).map(z)));
    }

    #[test]
    fn free_group_ball_sizes() {
        let f2 = GroupUniverse::free(2);
        // 1 + 4 + 12 reduced words
        assert_eq!(f2.ball(2).len(), 17);
        assert_eq!(f2.ball(3).len(), 17 + 36);
    }

    #[test]
    fn product_sets() {
        let g = GroupUniverse::free_abelian(1);
        let e = FiniteSubset::new([z(0), z(1)]);
        let m = FiniteSubset::new([z(-1), z(0), z(1)]);
        assert_eq!(g.product_set(&e, &m), FiniteSubset::new((-1..=2).map(z)));

        let f2 = GroupUniverse::free(2);
        let e = FiniteSubset::new([w(""), w("a")]);
        let f = FiniteSubset::new([w(""), w("b")]);
        let p = f2.product_set(&e, &f);
        assert_eq!(p.elements(), &[w(""), w("a"), w("b"), w("ab")]);

        let s3 = GroupUniverse::symmetric(3).unwrap();
        let all = s3.ball(1);
        assert_eq!(s3.product_set(&all, &all), all);
    }

    #[test]
    fn canonical_word_order() {
        let s = FiniteSubset::new([w("ab"), w("B"), w("b"), w("A"), w("a"), w("")]);
        let names: Vec<String> = s.iter().map(|g| g.to_string()).collect();
        assert_eq!(names, ["1", "a", "A", "b", "B", "ab"]);
    }

    #[test]
    fn subgroup_of_z2_lattice() {
        let g = GroupUniverse::free_abelian(2);
        let s = FiniteSubset::new([GroupElement::Vector(vec![2, 0]), GroupElement::Vector(vec![0, 3])]);
        let h = g.subgroup_generated(&s).unwrap();
        assert_eq!(h.universe, GroupUniverse::free_abelian(2));
        assert_eq!(h.basis().unwrap(), &[vec![2, 0], vec![0, 3]]);
        assert_eq!(h.index(&g), Some(6));
        for x in s.iter() {
            let back = h.pullback(x).unwrap();
            assert_eq!(&h.embed(&back), x);
        }
    }

    #[test]
    fn subgroup_of_s3() {
        let g = GroupUniverse::symmetric(3).unwrap();
        let t = g.cayley().unwrap();
        // a transposition is an involution other than the identity
        let transposition = (0..6).find(|&i| i != t.identity() && t.mul(i, i) == t.identity()).unwrap();
        let h = g.subgroup_generated(&FiniteSubset::new([GroupElement::Index(transposition)])).unwrap();
        assert_eq!(h.universe.order(), Some(2));
        assert_eq!(h.index(&g), Some(3));
        let trivial = g.subgroup_generated(&FiniteSubset::new([g.identity()])).unwrap();
        assert_eq!(trivial.universe.order(), Some(1));
    }

    #[test]
    fn free_subgroups_are_rejected() {
        let f2 = GroupUniverse::free(2);
        assert!(matches!(
            f2.subgroup_generated(&FiniteSubset::new([w("a")])),
            Err(GcaError::UnsupportedUniverse(_))
        ));
    }

    #[test]
    fn enumeration() {
        assert_eq!(GroupUniverse::cyclic(4).unwrap().enumerate().unwrap().len(), 4);
        assert_eq!(GroupUniverse::symmetric(3).unwrap().enumerate().unwrap().len(), 6);
        assert_eq!(GroupUniverse::free_abelian(1).enumerate(), Err(GcaError::InfiniteUniverse));
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(CayleyTable::from_rows(&[vec![0, 1], vec![1, 1]]).is_err());
        // a Latin square that is not associative
        let rows = vec![vec![0, 1, 2, 3, 4], vec![1, 0, 3, 4, 2], vec![2, 4, 0, 1, 3], vec![3, 2, 4, 0, 1], vec![4, 3, 1, 2, 0]];
        assert!(CayleyTable::from_rows(&rows).is_err());
    }

    #[test]
    fn finite_axioms_exhaustive() {
        for u in [
            GroupUniverse::cyclic(6).unwrap(),
            GroupUniverse::dihedral(4).unwrap(),
            GroupUniverse::symmetric(3).unwrap(),
            GroupUniverse::from_preset(Preset::Product(vec![Preset::Cyclic(2), Preset::Cyclic(2)])).unwrap(),
        ] {
            let all = u.enumerate().unwrap();
            for a in &all {
                assert_eq!(u.mul(a, &u.identity()), *a);
                assert_eq!(u.mul(a, &u.inv(a)), u.identity());
                for b in &all {
                    for c in &all {
                        assert_eq!(u.mul(&u.mul(a, b), c), u.mul(a, &u.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn ball_products_nest() {
        for u in [GroupUniverse::free_abelian(2), GroupUniverse::free(2), GroupUniverse::cyclic(5).unwrap()] {
            for r in 0..=3 {
                for s in 0..=3 {
                    if r + s > 4 {
                        continue;
                    }
                    let prod = u.product_set(&u.ball(r), &u.ball(s));
                    assert!(prod.is_subset(&u.ball(r + s)));
                }
                assert!(u.ball(r).is_subset(&u.ball(r + 1)));
                assert_eq!(u.inverse_set(&u.ball(r)), u.ball(r));
            }
        }
    }

    fn word_strategy() -> impl Strategy<Value = GroupElement> {
        proptest::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2)], 0..8)
            .prop_map(|letters| GroupElement::Word(free_mul(&[], &letters)))
    }

    fn vector_strategy() -> impl Strategy<Value = GroupElement> {
        proptest::collection::vec(-5i64..5, 3).prop_map(GroupElement::Vector)
    }

    proptest! {
        #[test]
        fn free_group_axioms(a in word_strategy(), b in word_strategy(), c in word_strategy()) {
            let u = GroupUniverse::free(2);
            prop_assert!(u.validate(&a).is_ok());
            prop_assert_eq!(u.mul(&u.mul(&a, &b), &c), u.mul(&a, &u.mul(&b, &c)));
            prop_assert_eq!(u.mul(&a, &u.inv(&a)), u.identity());
            prop_assert_eq!(u.mul(&u.identity(), &a), a);
        }

        #[test]
        fn free_abelian_axioms(a in vector_strategy(), b in vector_strategy(), c in vector_strategy()) {
            let u = GroupUniverse::free_abelian(3);
            prop_assert_eq!(u.mul(&u.mul(&a, &b), &c), u.mul(&a, &u.mul(&b, &c)));
            prop_assert_eq!(u.mul(&a, &u.inv(&a)), u.identity());
        }

        #[test]
        fn canonical_order_is_independent_of_input_order(mut xs in proptest::collection::vec(word_strategy(), 0..12)) {
            let a = FiniteSubset::new(xs.clone());
            xs.reverse();
            let b = FiniteSubset::new(xs);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn generated_subgroups_are_closed(gens in proptest::collection::vec(0usize..8, 0..3)) {
            let g = GroupUniverse::dihedral(4).unwrap();
            let s = FiniteSubset::new(gens.into_iter().map(GroupElement::Index));
            let h = g.subgroup_generated(&s).unwrap();
            let members: Vec<GroupElement> =
                h.universe.enumerate().unwrap().iter().map(|x| h.embed(x)).collect();
            let set = FiniteSubset::new(members.clone());
            prop_assert!(s.is_subset(&set));
            for a in &members {
                prop_assert!(set.contains(&g.inv(a)));
                for b in &members {
                    prop_assert!(set.contains(&g.mul(a, b)));
                }
            }
        }
    }
}
