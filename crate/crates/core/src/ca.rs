//! Cellular automata, finite window maps, composition, periodic quotients
//! and restriction to the subgroup generated by the memory set.
//!
//! The action is `τ(c)(g) = μ((g⁻¹c)|_M)`, i.e. `τ(c)(g) = μ(h ↦ c(gh))`.

use std::collections::HashMap;

use crate::alphabets::{decode_pattern, encode_pattern, pow_count, Alphabet, Letter, LocalRule, RuleBody, TABLE_CAP};
use crate::error::{GcaError, Result};
use crate::fp::FpMatrix;
use crate::groups::{CayleyTable, FiniteGroup, FiniteSubset, GroupElement, GroupUniverse, Preset, Subgroup};
use crate::lattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaClass {
    Plain,
    Group,
    Linear,
}

impl CaClass {
    pub fn name(self) -> &'static str {
        match self {
            CaClass::Plain => "plain",
            CaClass::Group => "group",
            CaClass::Linear => "linear",
        }
    }
}

/// Letters on a finite window, in the window's canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub window: FiniteSubset,
    pub values: Vec<Letter>,
}

impl Pattern {
    pub fn new(window: FiniteSubset, values: Vec<Letter>) -> Result<Self> {
        if window.len() != values.len() {
            return Err(GcaError::DomainMismatch);
        }
        Ok(Pattern { window, values })
    }

    pub fn constant(window: FiniteSubset, letter: Letter) -> Self {
        let values = vec![letter; window.len()];
        Pattern { window, values }
    }

    pub fn get(&self, g: &GroupElement) -> Option<Letter> {
        self.window.index_of(g).map(|i| self.values[i])
    }

    pub fn restrict(&self, sub: &FiniteSubset) -> Result<Pattern> {
        let values = sub.iter().map(|g| self.get(g).ok_or(GcaError::DomainMismatch)).collect::<Result<_>>()?;
        Ok(Pattern { window: sub.clone(), values })
    }

    /// `(g·c)(x) = c(g⁻¹x)`, supported on `g·W`.
    pub fn translate(&self, universe: &GroupUniverse, g: &GroupElement) -> Pattern {
        let window = FiniteSubset::new(self.window.iter().map(|w| universe.mul(g, w)));
        let ginv = universe.inv(g);
        let values = window.iter().map(|x| self.get(&universe.mul(&ginv, x)).expect("translated")).collect();
        Pattern { window, values }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularAutomaton {
    universe: GroupUniverse,
    rule: LocalRule,
}

impl CellularAutomaton {
    pub fn new(universe: GroupUniverse, rule: LocalRule) -> Result<Self> {
        for g in rule.memory() {
            universe.validate(g)?;
        }
        if !rule.memory().contains(&universe.identity()) {
            return Err(GcaError::MalformedRule("rule was not built for this universe".into()));
        }
        Ok(CellularAutomaton { universe, rule })
    }

    pub fn identity(universe: &GroupUniverse, alphabet: Alphabet) -> Result<Self> {
        let rule = LocalRule::identity(universe, alphabet)?;
        Self::new(universe.clone(), rule)
    }

    /// `τ(c)(h) = c(hg)`.
    pub fn shift(universe: &GroupUniverse, alphabet: Alphabet, g: GroupElement) -> Result<Self> {
        let rule = LocalRule::shift(universe, alphabet, g)?;
        Self::new(universe.clone(), rule)
    }

    pub fn universe(&self) -> &GroupUniverse {
        &self.universe
    }
    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }
    pub fn alphabet(&self) -> &Alphabet {
        self.rule.alphabet()
    }
    pub fn memory(&self) -> &FiniteSubset {
        self.rule.memory()
    }

    /// Smallest `n₀` with `M ⊆ ball(n₀)`.
    pub fn memory_radius(&self) -> usize {
        self.universe.radius_of(self.memory())
    }

    /// The strongest algebraic class of the rule. Hom and Linear bodies are
    /// classified structurally, table bodies by an exhaustive check.
    pub fn classify(&self) -> Result<CaClass> {
        match self.rule.body() {
            RuleBody::Linear(_) => Ok(CaClass::Linear),
            RuleBody::Hom(_) => Ok(CaClass::Group),
            RuleBody::Table(_) => {
                if !self.rule.is_additive()? {
                    return Ok(CaClass::Plain);
                }
                match self.alphabet() {
                    Alphabet::VectorSpace { .. } => Ok(CaClass::Linear),
                    _ => Ok(CaClass::Group),
                }
            }
        }
    }

    /// The same automaton with an algebraic body when the rule has one:
    /// additive tables become Linear or Hom bodies.
    pub fn structured(&self) -> Result<(CaClass, CellularAutomaton)> {
        let class = self.classify()?;
        let rule = match (class, self.rule.body()) {
            (CaClass::Linear, RuleBody::Table(_)) => self.rule.to_linear()?.expect("additive table"),
            (CaClass::Group, RuleBody::Table(_)) => {
                let m = self.memory().len();
                let size = self.alphabet().size();
                let e = self.alphabet().neutral();
                let tables = (0..m)
                    .map(|pos| {
                        (0..size)
                            .map(|a| {
                                let mut x = vec![e; m];
                                x[pos] = a;
                                self.rule.eval(&x)
                            })
                            .collect()
                    })
                    .collect();
                LocalRule::hom(&self.universe, self.alphabet().clone(), self.memory().clone(), tables)?
            }
            _ => self.rule.clone(),
        };
        Ok((class, CellularAutomaton { universe: self.universe.clone(), rule }))
    }

    /// Group or linear form of the automaton, or `NotAGroupOrLinearCA`.
    pub fn require_algebraic(&self) -> Result<(CaClass, CellularAutomaton)> {
        let (class, ca) = self.structured()?;
        if class == CaClass::Plain {
            return Err(GcaError::NotAGroupOrLinearCA);
        }
        Ok((class, ca))
    }

    pub fn window_map(&self, e: &FiniteSubset) -> Result<WindowMap> {
        if e.is_empty() {
            return Err(GcaError::Config("window must be nonempty".into()));
        }
        for g in e {
            self.universe.validate(g)?;
        }
        let source = self.universe.product_set(e, self.memory());
        let gather: Vec<Vec<usize>> = e
            .iter()
            .map(|g| {
                self.memory()
                    .iter()
                    .map(|h| source.index_of(&self.universe.mul(g, h)).expect("EM contains gh"))
                    .collect()
            })
            .collect();
        let matrix = match self.rule.body() {
            RuleBody::Linear(mats) => {
                let (p, n) = self.alphabet().field().expect("vector alphabet");
                let mut t = FpMatrix::zeros(p, n * e.len(), n * source.len());
                for (i, cols) in gather.iter().enumerate() {
                    for (m, &j) in mats.iter().zip(cols) {
                        t.add_block(n * i, n * j, m);
                    }
                }
                Some(t)
            }
            _ => None,
        };
        Ok(WindowMap { source, target: e.clone(), gather, rule: self.rule.clone(), matrix })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &CellularAutomaton) -> Result<CellularAutomaton> {
        if self.universe != other.universe {
            return Err(GcaError::IncompatibleAutomata("different universes".into()));
        }
        if self.alphabet() != other.alphabet() {
            return Err(GcaError::IncompatibleAutomata("different alphabets".into()));
        }
        let u = &self.universe;
        let (ms, mt) = (self.memory(), other.memory());
        let memory = u.product_set(ms, mt);
        let pos: Vec<Vec<usize>> = ms
            .iter()
            .map(|h| mt.iter().map(|k| memory.index_of(&u.mul(h, k)).expect("product")).collect())
            .collect();
        let alphabet = self.alphabet().clone();
        let size = alphabet.size();
        let rule = match (self.rule.body(), other.rule.body()) {
            (RuleBody::Linear(s), RuleBody::Linear(t)) => {
                let (p, n) = alphabet.field().expect("vector alphabet");
                let mut mats = vec![FpMatrix::zeros(p, n, n); memory.len()];
                for (i, sh) in s.iter().enumerate() {
                    for (j, tk) in t.iter().enumerate() {
                        let m = pos[i][j];
                        mats[m] = mats[m].add(&sh.mul(tk));
                    }
                }
                LocalRule::linear(u, alphabet, memory, mats)?
            }
            (RuleBody::Hom(s), RuleBody::Hom(t)) => {
                let group = alphabet.group_table().expect("group alphabet");
                let mut tables = vec![vec![group.identity(); size]; memory.len()];
                for (i, sh) in s.iter().enumerate() {
                    for (j, tk) in t.iter().enumerate() {
                        let m = pos[i][j];
                        for a in 0..size {
                            tables[m][a] = group.mul(tables[m][a], sh[tk[a]]);
                        }
                    }
                }
                match LocalRule::hom(u, alphabet.clone(), memory.clone(), tables) {
                    Ok(rule) => rule,
                    Err(GcaError::HomRejected(_)) => self.compose_table(other, &memory, &pos)?,
                    Err(err) => return Err(err),
                }
            }
            _ => self.compose_table(other, &memory, &pos)?,
        };
        CellularAutomaton::new(u.clone(), rule)
    }

    fn compose_table(&self, other: &CellularAutomaton, memory: &FiniteSubset, pos: &[Vec<usize>]) -> Result<LocalRule> {
        let size = self.alphabet().size();
        let count = pow_count(size, memory.len());
        if count > TABLE_CAP {
            return Err(GcaError::WindowTooLarge { size: count, cap: TABLE_CAP });
        }
        let mut inner = vec![0; other.memory().len()];
        let mut outer = vec![0; self.memory().len()];
        let table = (0..count as usize)
            .map(|idx| {
                let x = decode_pattern(size, idx, memory.len());
                for (slot, row) in outer.iter_mut().zip(pos) {
                    for (v, &j) in inner.iter_mut().zip(row) {
                        *v = x[j];
                    }
                    *slot = other.rule.eval(&inner);
                }
                self.rule.eval(&outer)
            })
            .collect();
        LocalRule::table(&self.universe, self.alphabet().clone(), memory.clone(), table)
    }

    pub fn is_identity(&self) -> Result<bool> {
        self.rule.is_identity()
    }

    /// Extensional equality.
    pub fn equivalent(&self, other: &CellularAutomaton) -> Result<bool> {
        Ok(self.universe == other.universe && self.rule.equivalent(&other.rule)?)
    }

    /// The image of a full configuration on a finite universe, listed in
    /// element index order.
    pub fn apply_finite(&self, config: &[Letter]) -> Result<Vec<Letter>> {
        let t = self.universe.cayley().ok_or(GcaError::InfiniteUniverse)?;
        if config.len() != t.order() {
            return Err(GcaError::DomainMismatch);
        }
        let mem: Vec<usize> = self.memory().iter().map(|h| h.index().expect("finite")).collect();
        let mut x = vec![0; mem.len()];
        Ok((0..t.order())
            .map(|g| {
                for (slot, &h) in x.iter_mut().zip(&mem) {
                    *slot = config[t.mul(g, h)];
                }
                self.rule.eval(&x)
            })
            .collect())
    }

    /// Image of the configuration equal to `w` on its window and neutral
    /// elsewhere, restricted to `W·M`. Outside `W·M` the image is `μ(e^M)`.
    pub fn apply_pattern(&self, w: &Pattern) -> Result<Pattern> {
        let target = self.universe.product_set(&w.window, self.memory());
        let e = self.alphabet().neutral();
        let values = target
            .iter()
            .map(|g| {
                let x: Vec<Letter> =
                    self.memory().iter().map(|h| w.get(&self.universe.mul(g, h)).unwrap_or(e)).collect();
                self.rule.eval(&x)
            })
            .collect();
        Ok(Pattern { window: target, values })
    }

    /// Action on configurations that are periodic under a full-rank lattice
    /// of `Z^d`, realized as an automaton on the finite quotient.
    pub fn periodic_action(&self, generators: &[Vec<i64>]) -> Result<PeriodicAction> {
        let GroupUniverse::FreeAbelian { rank } = self.universe else {
            return Err(GcaError::UnsupportedUniverse("periodic actions need Z^d".into()));
        };
        let basis = lattice::hermite_normal_form(generators, rank);
        lattice::require_full_rank(&basis, rank)?;
        let diag: Vec<i64> = (0..rank).map(|i| basis[i][i]).collect();
        let order = diag.iter().product::<i64>() as usize;
        let reps: Vec<Vec<i64>> = (0..order)
            .map(|mut idx| {
                let mut v = vec![0i64; rank];
                for i in (0..rank).rev() {
                    v[i] = (idx % diag[i] as usize) as i64;
                    idx /= diag[i] as usize;
                }
                v
            })
            .collect();
        let index_of = |v: &[i64]| -> usize {
            let w = lattice::reduce(&basis, v);
            w.iter().zip(&diag).fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
        };
        let mut table = vec![0; order * order];
        for (i, a) in reps.iter().enumerate() {
            for (j, b) in reps.iter().enumerate() {
                let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                table[i * order + j] = index_of(&s);
            }
        }
        let diagonal = (0..rank).all(|i| (i + 1..rank).all(|j| basis[i][j] == 0));
        let preset = if rank == 1 {
            Some(Preset::Cyclic(order))
        } else if diagonal {
            Some(Preset::Product(diag.iter().map(|&d| Preset::Cyclic(d as usize)).collect()))
        } else {
            None
        };
        let quotient_universe = GroupUniverse::Finite(FiniteGroup {
            table: std::sync::Arc::new(CayleyTable::from_trusted(order, table)),
            preset,
        });
        let images: Vec<GroupElement> = self
            .memory()
            .iter()
            .map(|m| GroupElement::Index(index_of(m.vector().expect("vector element"))))
            .collect();
        let rule = self.rule.pushforward(&quotient_universe, &images)?;
        Ok(PeriodicAction {
            basis,
            reps,
            quotient: CellularAutomaton { universe: quotient_universe, rule },
        })
    }

    /// `τ_H` on `H = ⟨M⟩` with the same local rule.
    pub fn restrict_to_subgroup(&self) -> Result<(Subgroup, CellularAutomaton)> {
        let sub = self.universe.subgroup_generated(self.memory())?;
        let images: Vec<GroupElement> =
            self.memory().iter().map(|m| sub.pullback(m).expect("memory lies in its span")).collect();
        let rule = self.rule.pushforward(&sub.universe, &images)?;
        let ca = CellularAutomaton { universe: sub.universe.clone(), rule };
        Ok((sub, ca))
    }
}

/// An `L`-periodic view of an automaton on `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicAction {
    /// Normal form basis of `L`.
    pub basis: Vec<Vec<i64>>,
    /// Coset representatives in quotient index order.
    pub reps: Vec<Vec<i64>>,
    pub quotient: CellularAutomaton,
}

impl PeriodicAction {
    pub fn index_of(&self, v: &[i64]) -> usize {
        let w = lattice::reduce(&self.basis, v);
        (0..w.len()).fold(0usize, |acc, i| acc * self.basis[i][i] as usize + w[i] as usize)
    }

    /// The periodic configuration's value at `v`.
    pub fn value_at(&self, config: &[Letter], v: &[i64]) -> Letter {
        config[self.index_of(v)]
    }
}

/// A materialized restriction `τ_E^+ : A^{EM} → A^E`.
#[derive(Clone, Debug)]
pub struct WindowMap {
    source: FiniteSubset,
    target: FiniteSubset,
    /// For each target element `g`, the source positions of `gh`, `h ∈ M`.
    gather: Vec<Vec<usize>>,
    rule: LocalRule,
    matrix: Option<FpMatrix>,
}

impl WindowMap {
    pub fn source(&self) -> &FiniteSubset {
        &self.source
    }
    pub fn target(&self) -> &FiniteSubset {
        &self.target
    }
    pub fn gather(&self) -> &[Vec<usize>] {
        &self.gather
    }
    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    /// Block matrix of shape `n|E| × n|EM|` for linear rules.
    pub fn matrix(&self) -> Option<&FpMatrix> {
        self.matrix.as_ref()
    }

    pub fn input_count(&self) -> u128 {
        pow_count(self.rule.alphabet().size(), self.source.len())
    }

    pub fn output_count(&self) -> u128 {
        pow_count(self.rule.alphabet().size(), self.target.len())
    }

    pub fn eval(&self, x: &[Letter]) -> Vec<Letter> {
        let mut buf = vec![0; self.rule.memory().len()];
        self.gather
            .iter()
            .map(|cols| {
                for (slot, &j) in buf.iter_mut().zip(cols) {
                    *slot = x[j];
                }
                self.rule.eval(&buf)
            })
            .collect()
    }

    pub fn eval_pattern(&self, x: &Pattern) -> Result<Pattern> {
        if x.window != self.source {
            return Err(GcaError::DomainMismatch);
        }
        Ok(Pattern { window: self.target.clone(), values: self.eval(&x.values) })
    }

    /// Output pattern index for every input pattern index.
    pub fn dense_table(&self, cap: u128) -> Result<Vec<usize>> {
        let count = self.input_count();
        let limit = cap.min(TABLE_CAP);
        if count > limit || self.output_count() > u64::MAX as u128 {
            return Err(GcaError::WindowTooLarge { size: count, cap: limit });
        }
        let size = self.rule.alphabet().size();
        Ok((0..count as usize)
            .map(|idx| encode_pattern(size, &self.eval(&decode_pattern(size, idx, self.source.len()))))
            .collect())
    }
}

/// Images of every input of a window map, grouped: output index to the
/// first input index producing it.
pub fn image_map(map: &WindowMap, cap: u128) -> Result<HashMap<usize, usize>> {
    let table = map.dense_table(cap)?;
    let mut out = HashMap::new();
    for (i, o) in table.into_iter().enumerate() {
        out.entry(o).or_insert(i);
    }
    Ok(out)
}
