//! Matrices over group rings `Mat_n(F_p[G])` and the map onto linear
//! cellular automata.
//!
//! Multiplication is convolution, `(αβ)(m) = Σ_{hk=m} α(h)β(k)`, and
//! `Φ(α)` is the automaton `τ(c)(g) = Σ_h α(h)c(gh)`. With these
//! conventions `Φ(αβ) = Φ(α)∘Φ(β)`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::alphabets::{Alphabet, LocalRule, RuleBody};
use crate::ca::CellularAutomaton;
use crate::deciders::direct_finiteness_check;
use crate::error::{GcaError, Result};
use crate::fp::{check_prime, FpMatrix};
use crate::groups::{FiniteSubset, GroupElement, GroupUniverse};
use crate::records::{RingRecord, RingTerm};
use crate::verdict::{Verdict, Witness};

#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingMatrix {
    universe: GroupUniverse,
    p: u32,
    n: usize,
    support: BTreeMap<GroupElement, FpMatrix>,
}

impl fmt::Debug for GroupRingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingMatrix(p={}, n={}, {} over {})", self.p, self.n, self, self.universe.describe())
    }
}

impl fmt::Display for GroupRingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .support
            .iter()
            .map(|(g, m)| {
                if self.n == 1 {
                    format!("{}*{}", m.get(0, 0), g)
                } else {
                    format!("{:?}*{}", m.data(), g)
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl GroupRingMatrix {
    /// Sums the given terms; zero coefficients are dropped.
    pub fn new(
        universe: &GroupUniverse,
        p: u32,
        n: usize,
        terms: impl IntoIterator<Item = (GroupElement, FpMatrix)>,
    ) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(GcaError::IncompatibleOperands("matrix size must be at least 1".into()));
        }
        let mut support: BTreeMap<GroupElement, FpMatrix> = BTreeMap::new();
        for (g, m) in terms {
            universe.validate(&g)?;
            if m.p() != p || m.rows() != n || m.cols() != n {
                return Err(GcaError::IncompatibleOperands(format!("coefficients must be {n}x{n} over F_{p}")));
            }
            let entry = support.entry(g).or_insert_with(|| FpMatrix::zeros(p, n, n));
            *entry = entry.add(&m);
        }
        support.retain(|_, m| !m.is_zero());
        Ok(GroupRingMatrix { universe: universe.clone(), p, n, support })
    }

    pub fn zero(universe: &GroupUniverse, p: u32, n: usize) -> Result<Self> {
        Self::new(universe, p, n, [])
    }

    pub fn unit(universe: &GroupUniverse, p: u32, n: usize) -> Result<Self> {
        Self::delta(universe, p, n, universe.identity())
    }

    /// `δ_g · I`.
    pub fn delta(universe: &GroupUniverse, p: u32, n: usize, g: GroupElement) -> Result<Self> {
        Self::new(universe, p, n, [(g, FpMatrix::identity(p, n))])
    }

    /// A scalar element `Σ c_g g` of `F_p[G]`.
    pub fn scalar(universe: &GroupUniverse, p: u32, terms: &[(GroupElement, u32)]) -> Result<Self> {
        Self::new(
            universe,
            p,
            1,
            terms.iter().map(|(g, c)| (g.clone(), FpMatrix::from_flat(p, 1, 1, vec![*c]).expect("1x1"))),
        )
    }

    /// Uniformly random coefficients on `support`.
    pub fn random(universe: &GroupUniverse, p: u32, n: usize, support: &FiniteSubset, rng: &mut impl Rng) -> Result<Self> {
        let terms: Vec<(GroupElement, FpMatrix)> = support
            .iter()
            .map(|g| {
                let data = (0..n * n).map(|_| rng.gen_range(0..p)).collect();
                (g.clone(), FpMatrix::from_flat(p, n, n, data).expect("square"))
            })
            .collect();
        Self::new(universe, p, n, terms)
    }

    pub fn universe(&self) -> &GroupUniverse {
        &self.universe
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn support(&self) -> &BTreeMap<GroupElement, FpMatrix> {
        &self.support
    }

    pub fn support_set(&self) -> FiniteSubset {
        FiniteSubset::new(self.support.keys().cloned())
    }

    pub fn get(&self, g: &GroupElement) -> FpMatrix {
        self.support.get(g).cloned().unwrap_or_else(|| FpMatrix::zeros(self.p, self.n, self.n))
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.support.len() == 1
            && self.support.get(&self.universe.identity()).is_some_and(FpMatrix::is_identity)
    }

    /// Largest word length in the support.
    pub fn radius(&self) -> usize {
        self.support.keys().map(|g| self.universe.word_length(g)).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.universe != other.universe || self.p != other.p || self.n != other.n {
            return Err(GcaError::IncompatibleOperands(format!(
                "Mat_{}(F_{}[{}]) vs Mat_{}(F_{}[{}])",
                self.n,
                self.p,
                self.universe.describe(),
                other.n,
                other.p,
                other.universe.describe()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let terms = self.support.iter().chain(&other.support).map(|(g, m)| (g.clone(), m.clone()));
        Self::new(&self.universe, self.p, self.n, terms.collect::<Vec<_>>())
    }

    pub fn neg(&self) -> Self {
        let support = self.support.iter().map(|(g, m)| (g.clone(), m.neg())).collect();
        GroupRingMatrix { support, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = Vec::with_capacity(self.support.len() * other.support.len());
        for (h, a) in &self.support {
            for (k, b) in &other.support {
                terms.push((self.universe.mul(h, k), a.mul(b)));
            }
        }
        Self::new(&self.universe, self.p, self.n, terms)
    }

    /// The linear automaton `Φ(α)`.
    pub fn phi(&self) -> Result<CellularAutomaton> {
        let alphabet = Alphabet::vector(self.p, self.n)?;
        let (memory, mats) = if self.support.is_empty() {
            (FiniteSubset::new([self.universe.identity()]), vec![FpMatrix::zeros(self.p, self.n, self.n)])
        } else {
            (self.support_set(), self.support.values().cloned().collect())
        };
        let rule = LocalRule::linear(&self.universe, alphabet, memory, mats)?;
        CellularAutomaton::new(self.universe.clone(), rule)
    }

    /// `Φ⁻¹` of a linear automaton.
    pub fn phi_inv(ca: &CellularAutomaton) -> Result<Self> {
        let rule = ca.rule().to_linear()?.ok_or(GcaError::NotLinear)?;
        let (p, n) = rule.alphabet().field().ok_or(GcaError::NotLinear)?;
        let RuleBody::Linear(mats) = rule.body() else {
            return Err(GcaError::NotLinear);
        };
        Self::new(ca.universe(), p, n, rule.memory().iter().cloned().zip(mats.iter().cloned()))
    }

    /// `Mat_n(F_p[G]) → Mat_n(F_p)[G]`: an `n × n` array of scalar elements
    /// becomes one element with matrix coefficients.
    pub fn flatten(entries: &[Vec<GroupRingMatrix>]) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|row| row.len() != n) {
            return Err(GcaError::RaggedInput("entries must form a nonempty square array".into()));
        }
        let first = &entries[0][0];
        let (universe, p) = (first.universe.clone(), first.p);
        for e in entries.iter().flatten() {
            if e.n != 1 || e.universe != universe || e.p != p {
                return Err(GcaError::RaggedInput("entries must be scalar elements over one ring".into()));
            }
        }
        let mut support: BTreeMap<GroupElement, FpMatrix> = BTreeMap::new();
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                for (g, c) in &e.support {
                    support.entry(g.clone()).or_insert_with(|| FpMatrix::zeros(p, n, n)).set(i, j, c.get(0, 0));
                }
            }
        }
        Self::new(&universe, p, n, support)
    }

    pub fn unflatten(&self) -> Vec<Vec<GroupRingMatrix>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let terms: Vec<(GroupElement, u32)> =
                            self.support.iter().map(|(g, m)| (g.clone(), m.get(i, j))).collect();
                        Self::scalar(&self.universe, self.p, &terms).expect("same ring")
                    })
                    .collect()
            })
            .collect()
    }

    /// Lexicographically least `β` supported in `ball(radius)` with
    /// `βα = 1`, or `None` when no such `β` exists at this radius.
    pub fn find_left_inverse(&self, radius: usize) -> Result<Option<Self>> {
        let (p, n) = (self.p, self.n);
        let ball = self.universe.ball(radius);
        let eqs = self
            .universe
            .product_set(&ball, &self.support_set())
            .union(&FiniteSubset::new([self.universe.identity()]));
        let mut a = FpMatrix::zeros(p, eqs.len() * n * n, ball.len() * n * n);
        for (hi, h) in ball.iter().enumerate() {
            for (k, alpha) in &self.support {
                let mi = eqs.index_of(&self.universe.mul(h, k)).expect("product listed");
                for i in 0..n {
                    for j in 0..n {
                        let row = (mi * n + i) * n + j;
                        for l in 0..n {
                            let col = (hi * n + i) * n + l;
                            let v = (a.get(row, col) + alpha.get(l, j)) % p;
                            a.set(row, col, v);
                        }
                    }
                }
            }
        }
        let one = eqs.index_of(&self.universe.identity()).expect("identity listed");
        let mut rhs = vec![0u32; eqs.len() * n * n];
        for i in 0..n {
            rhs[(one * n + i) * n + i] = 1;
        }
        let Some(x) = a.solve_lex_least(&rhs) else {
            return Ok(None);
        };
        let terms = ball
            .iter()
            .enumerate()
            .map(|(hi, h)| {
                let data = x[hi * n * n..(hi + 1) * n * n].to_vec();
                (h.clone(), FpMatrix::from_flat(p, n, n, data).expect("square"))
            })
            .collect::<Vec<_>>();
        Ok(Some(Self::new(&self.universe, p, n, terms)?))
    }

    /// The `n|G| × n|G|` matrix with block `(g, gh)` equal to `α(h)`.
    pub fn regular_representation(&self) -> Result<FpMatrix> {
        let t = self.universe.cayley().ok_or(GcaError::InfiniteUniverse)?;
        let (n, order) = (self.n, t.order());
        let mut m = FpMatrix::zeros(self.p, n * order, n * order);
        for g in 0..order {
            for (h, a) in &self.support {
                let gh = t.mul(g, h.index().expect("finite element"));
                m.add_block(n * g, n * gh, a);
            }
        }
        Ok(m)
    }

    pub fn to_record(&self) -> RingRecord {
        RingRecord {
            p: self.p,
            n: self.n,
            support: self
                .support
                .iter()
                .map(|(g, m)| RingTerm { element: g.clone(), entries: m.data().to_vec() })
                .collect(),
        }
    }

    pub fn from_record(universe: &GroupUniverse, rec: &RingRecord) -> Result<Self> {
        let terms = rec
            .support
            .iter()
            .map(|t| Ok((t.element.clone(), FpMatrix::from_flat(rec.p, rec.n, rec.n, t.entries.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(universe, rec.p, rec.n, terms)
    }

    /// The same data as a matrix of Laurent polynomials; `Z^d` only.
    pub fn to_laurent(&self) -> Result<LaurentForm> {
        let GroupUniverse::FreeAbelian { rank } = self.universe else {
            return Err(GcaError::UnsupportedUniverse("Laurent form needs Z^d".into()));
        };
        let entries = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        self.support
                            .iter()
                            .filter(|(_, m)| m.get(i, j) != 0)
                            .map(|(g, m)| (g.vector().expect("vector").to_vec(), m.get(i, j)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(LaurentForm { vars: rank, p: self.p, entries })
    }

    pub fn from_laurent(form: &LaurentForm) -> Result<Self> {
        let universe = GroupUniverse::free_abelian(form.vars);
        let n = form.entries.len();
        let mut terms = Vec::new();
        for (i, row) in form.entries.iter().enumerate() {
            if row.len() != n {
                return Err(GcaError::RaggedInput("Laurent matrix is not square".into()));
            }
            for (j, poly) in row.iter().enumerate() {
                for (exp, c) in poly {
                    let mut m = FpMatrix::zeros(form.p, n, n);
                    m.set(i, j, *c);
                    terms.push((GroupElement::Vector(exp.clone()), m));
                }
            }
        }
        Self::new(&universe, form.p, n, terms)
    }
}

/// Matrix of Laurent polynomials in `vars` variables; each polynomial is a
/// list of `(exponent vector, coefficient)` in increasing exponent order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentForm {
    pub vars: usize,
    pub p: u32,
    pub entries: Vec<Vec<Vec<(Vec<i64>, u32)>>>,
}

impl LaurentForm {
    /// Renders one entry, e.g. `1 + x` or `x^-1 + 2 y^2`.
    pub fn entry_to_string(&self, i: usize, j: usize) -> String {
        let names: Vec<String> = if self.vars <= 3 {
            ["x", "y", "z"][..self.vars].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=self.vars).map(|k| format!("x{k}")).collect()
        };
        let poly = &self.entries[i][j];
        if poly.is_empty() {
            return "0".into();
        }
        poly.iter()
            .map(|(exp, c)| {
                let mono: Vec<String> = exp
                    .iter()
                    .zip(&names)
                    .filter(|(e, _)| **e != 0)
                    .map(|(e, name)| if *e == 1 { name.clone() } else { format!("{name}^{e}") })
                    .collect();
                match (mono.is_empty(), *c) {
                    (true, c) => c.to_string(),
                    (false, 1) => mono.join(" "),
                    (false, c) => format!("{c} {}", mono.join(" ")),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Given `βα = 1`, decides whether also `αβ = 1`, and cross-checks the
/// answer through `Φ` and, on finite universes, the regular representation.
pub fn verify_stable_finiteness_instance(alpha: &GroupRingMatrix, beta: &GroupRingMatrix) -> Result<Verdict> {
    let unit = GroupRingMatrix::unit(alpha.universe(), alpha.p(), alpha.n())?;
    let left = beta.mul(alpha)?;
    if !left.is_unit() {
        let defect = left.sub(&unit)?;
        return Err(GcaError::PreconditionFailed(format!("beta*alpha - 1 = {defect}")));
    }
    let mut v = Verdict::new("stable-finite")
        .param("alpha", alpha.to_record())
        .param("beta", beta.to_record());
    v.note("beta*alpha = 1 checked by convolution");
    let right = alpha.mul(beta)?;
    let defect = right.sub(&unit)?;
    v.note(format!("alpha*beta - 1 = {defect}"));

    let cross = direct_finiteness_check(&beta.phi()?, &alpha.phi()?)?;
    v.note(format!("Phi cross-check: Phi(beta)∘Phi(alpha) = Id, Phi(alpha)∘Phi(beta) status {:?}", cross.status));
    if cross.is_yes() != defect.is_zero() {
        return Err(GcaError::PreconditionFailed("Phi cross-check disagrees with convolution".into()));
    }
    if alpha.universe().is_finite() {
        let ra = alpha.regular_representation()?;
        let rb = beta.regular_representation()?;
        let both = rb.mul(&ra).is_identity() && ra.mul(&rb).is_identity();
        v.note(format!("regular representation: both products identity = {both}"));
        if both != defect.is_zero() {
            return Err(GcaError::PreconditionFailed("regular representation disagrees with convolution".into()));
        }
    }
    let witness = Witness::RingDefect { defect: defect.to_record() };
    Ok(if defect.is_zero() { v.yes(None, witness) } else { v.no(None, witness) })
}

/// Searches for a left inverse with support in `ball(R)`, `R = 0..=max_radius`.
/// On a finite universe the search runs until `ball(R) = G`, and a singular
/// regular representation certifies that none exists.
pub fn left_inverse_verdict(alpha: &GroupRingMatrix, max_radius: usize) -> Result<Verdict> {
    let mut v = Verdict::new("left-inverse").param("alpha", alpha.to_record()).param("max_radius", max_radius);
    let u = alpha.universe();
    let last = match u.order() {
        Some(order) => (0..).find(|&r| u.ball(r).len() == order).expect("finite group").max(max_radius),
        None => max_radius,
    };
    for r in 0..=last {
        if let Some(beta) = alpha.find_left_inverse(r)? {
            return Ok(v.yes(Some(r), Witness::LeftInverse { beta: beta.to_record() }));
        }
        v.note(format!("no left inverse supported in ball({r})"));
    }
    if let Some(w) = singular_witness(alpha)? {
        v.note("regular representation is singular, so no one-sided inverse exists");
        return Ok(v.no(None, w));
    }
    Ok(v.unknown(Some(last)))
}

fn singular_witness(alpha: &GroupRingMatrix) -> Result<Option<Witness>> {
    if !alpha.universe().is_finite() {
        return Ok(None);
    }
    let m = alpha.regular_representation()?;
    let rank = m.rank();
    Ok((rank < m.rows()).then_some(Witness::SingularRegularRepresentation { size: m.rows(), rank }))
}

/// Finds `β` with `βα = 1` and decides whether `αβ = 1`.
pub fn stable_finite_verdict(alpha: &GroupRingMatrix, max_radius: usize) -> Result<Verdict> {
    let found = left_inverse_verdict(alpha, max_radius)?;
    match &found.witness {
        Some(Witness::LeftInverse { beta }) => {
            let beta = GroupRingMatrix::from_record(alpha.universe(), beta)?;
            let mut v = verify_stable_finiteness_instance(alpha, &beta)?;
            v.radius = found.radius;
            v.transcript.splice(0..0, found.transcript);
            Ok(v)
        }
        _ => {
            let mut v = found;
            v.decider = "stable-finite".into();
            Ok(v)
        }
    }
}

pub fn phi_verdict(alpha: &GroupRingMatrix) -> Result<Verdict> {
    let ca = alpha.phi()?;
    let v = Verdict::new("phi").param("alpha", alpha.to_record());
    Ok(v.yes(None, Witness::PhiRule { rule: crate::records::RuleRecord::from_rule(ca.rule()) }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(v: i64) -> GroupElement {
        GroupElement::Vector(vec![v])
    }

    fn i_plus_xn() -> GroupRingMatrix {
        let u = GroupUniverse::free_abelian(1);
        let n = FpMatrix::from_rows(2, &[vec![0, 1], vec![0, 0]]).unwrap();
        GroupRingMatrix::new(&u, 2, 2, [(z(0), FpMatrix::identity(2, 2)), (z(1), n)]).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let c2 = GroupUniverse::cyclic(2).unwrap();
        let one_plus_t = GroupRingMatrix::scalar(&c2, 2, &[(GroupElement::Index(0), 1), (GroupElement::Index(1), 1)]).unwrap();
        assert!(one_plus_t.mul(&one_plus_t).unwrap().is_zero());
        let a = i_plus_xn();
        assert!(a.mul(&a).unwrap().is_unit());
        let unit = GroupRingMatrix::unit(a.universe(), 2, 2).unwrap();
        assert_eq!(unit.mul(&a).unwrap(), a);
        let other = GroupRingMatrix::unit(&c2, 2, 2).unwrap();
        assert!(matches!(a.mul(&other), Err(GcaError::IncompatibleOperands(_))));
    }

    #[test]
    fn phi_examples() {
        let u = GroupUniverse::free_abelian(1);
        let unit = GroupRingMatrix::unit(&u, 3, 2).unwrap();
        assert!(unit.phi().unwrap().is_identity().unwrap());
        let xor = GroupRingMatrix::scalar(&u, 2, &[(z(0), 1), (z(1), 1)]).unwrap();
        let ca = xor.phi().unwrap();
        let w = ca.window_map(&FiniteSubset::new([z(0)])).unwrap();
        for x in 0..8 {
            let pat = crate::alphabets::decode_pattern(2, x, 3);
            assert_eq!(w.eval(&pat), vec![(pat[1] + pat[2]) % 2]);
        }
        assert_eq!(GroupRingMatrix::phi_inv(&ca).unwrap(), xor);
        let shift = GroupRingMatrix::delta(&u, 2, 1, z(2)).unwrap().phi().unwrap();
        let expected = CellularAutomaton::shift(&u, Alphabet::vector(2, 1).unwrap(), z(2)).unwrap();
        assert!(shift.equivalent(&expected).unwrap());
        let id = CellularAutomaton::identity(&u, Alphabet::vector(2, 1).unwrap()).unwrap();
        assert!(GroupRingMatrix::phi_inv(&id).unwrap().is_unit());
        // zero coefficients vanish from the support
        let rule = LocalRule::linear(
            &u,
            Alphabet::vector(2, 1).unwrap(),
            FiniteSubset::new([z(0), z(1)]),
            vec![FpMatrix::identity(2, 1), FpMatrix::zeros(2, 1, 1)],
        )
        .unwrap();
        let ca = CellularAutomaton::new(u.clone(), rule).unwrap();
        assert_eq!(GroupRingMatrix::phi_inv(&ca).unwrap().support_set(), FiniteSubset::new([z(0)]));
        let plain = LocalRule::table(&u, Alphabet::plain(2).unwrap(), FiniteSubset::new([z(0)]), vec![1, 0]).unwrap();
        assert_eq!(GroupRingMatrix::phi_inv(&CellularAutomaton::new(u, plain).unwrap()), Err(GcaError::NotLinear));
    }

    #[test]
    fn flatten_examples() {
        let u = GroupUniverse::free_abelian(1);
        let x = GroupRingMatrix::scalar(&u, 2, &[(z(1), 1)]).unwrap();
        let zero = GroupRingMatrix::zero(&u, 2, 1).unwrap();
        let flat = GroupRingMatrix::flatten(&[vec![x.clone(), zero.clone()], vec![zero.clone(), x.clone()]]).unwrap();
        assert_eq!(flat, GroupRingMatrix::delta(&u, 2, 2, z(1)).unwrap());
        let one = GroupRingMatrix::unit(&u, 2, 1).unwrap();
        assert!(GroupRingMatrix::flatten(&[vec![one.clone(), zero.clone()], vec![zero.clone(), one]]).unwrap().is_unit());
        assert!(matches!(GroupRingMatrix::flatten(&[vec![x.clone(), zero], vec![x]]), Err(GcaError::RaggedInput(_))));
    }

    #[test]
    fn left_inverse_examples() {
        let u = GroupUniverse::free_abelian(1);
        let d = GroupRingMatrix::delta(&u, 3, 2, z(2)).unwrap();
        assert_eq!(d.find_left_inverse(1).unwrap(), None);
        assert_eq!(d.find_left_inverse(2).unwrap(), Some(GroupRingMatrix::delta(&u, 3, 2, z(-2)).unwrap()));
        let xor = GroupRingMatrix::scalar(&u, 2, &[(z(0), 1), (z(1), 1)]).unwrap();
        for r in 0..5 {
            assert_eq!(xor.find_left_inverse(r).unwrap(), None);
        }
        let a = i_plus_xn();
        assert_eq!(a.find_left_inverse(1).unwrap(), Some(a.clone()));
    }

    #[test]
    fn stable_finiteness_examples() {
        let c2 = GroupUniverse::cyclic(2).unwrap();
        let t = GroupRingMatrix::scalar(&c2, 2, &[(GroupElement::Index(1), 1)]).unwrap();
        assert!(verify_stable_finiteness_instance(&t, &t).unwrap().is_yes());
        let unit = GroupRingMatrix::unit(&c2, 2, 1).unwrap();
        assert!(verify_stable_finiteness_instance(&unit, &unit).unwrap().is_yes());
        let a = i_plus_xn();
        assert!(verify_stable_finiteness_instance(&a, &a).unwrap().is_yes());
        let one_plus_t = unit.add(&t).unwrap();
        assert!(matches!(verify_stable_finiteness_instance(&one_plus_t, &unit), Err(GcaError::PreconditionFailed(_))));
        let v = stable_finite_verdict(&one_plus_t, 3).unwrap();
        assert_eq!(v.witness, Some(Witness::SingularRegularRepresentation { size: 2, rank: 1 }));
        assert!(v.is_no());
        let v = stable_finite_verdict(&a, 2).unwrap();
        assert!(v.is_yes() && v.radius == Some(1));
        let z1 = GroupUniverse::free_abelian(1);
        let xor = GroupRingMatrix::scalar(&z1, 2, &[(z(0), 1), (z(1), 1)]).unwrap();
        assert_eq!(stable_finite_verdict(&xor, 2).unwrap().status, crate::verdict::Status::Unknown);
    }

    #[test]
    fn regular_representation_examples() {
        let c2 = GroupUniverse::cyclic(2).unwrap();
        let a = GroupRingMatrix::scalar(&c2, 2, &[(GroupElement::Index(0), 1), (GroupElement::Index(1), 1)]).unwrap();
        let m = a.regular_representation().unwrap();
        assert_eq!(m, FpMatrix::from_rows(2, &[vec![1, 1], vec![1, 1]]).unwrap());
        assert_eq!(m.rank(), 1);
        let unit = GroupRingMatrix::unit(&GroupUniverse::symmetric(3).unwrap(), 3, 2).unwrap();
        assert!(unit.regular_representation().unwrap().is_identity());
        let z1 = GroupUniverse::free_abelian(1);
        assert_eq!(GroupRingMatrix::unit(&z1, 2, 1).unwrap().regular_representation(), Err(GcaError::InfiniteUniverse));
    }

    #[test]
    fn laurent_round_trip() {
        let u = GroupUniverse::free_abelian(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = GroupRingMatrix::random(&u, 3, 2, &u.ball(1), &mut rng).unwrap();
        let form = a.to_laurent().unwrap();
        assert_eq!(GroupRingMatrix::from_laurent(&form).unwrap(), a);
        let z1 = GroupUniverse::free_abelian(1);
        let xor = GroupRingMatrix::scalar(&z1, 2, &[(z(0), 1), (z(1), 1)]).unwrap();
        assert_eq!(xor.to_laurent().unwrap().entry_to_string(0, 0), "1 + x");
    }

    fn universes() -> Vec<GroupUniverse> {
        vec![
            GroupUniverse::cyclic(6).unwrap(),
            GroupUniverse::symmetric(3).unwrap(),
            GroupUniverse::free_abelian(1),
            GroupUniverse::free_abelian(2),
            GroupUniverse::free(2),
        ]
    }

    proptest! {
        #[test]
        fn ring_axioms(which in 0usize..5, seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)], n in 1usize..3) {
            let u = universes()[which].clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = u.ball(1);
            let a = GroupRingMatrix::random(&u, p, n, &s, &mut rng).unwrap();
            let b = GroupRingMatrix::random(&u, p, n, &s, &mut rng).unwrap();
            let c = GroupRingMatrix::random(&u, p, n, &s, &mut rng).unwrap();
            let one = GroupRingMatrix::unit(&u, p, n).unwrap();
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().mul(&c).unwrap(), a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(one.mul(&a).unwrap(), a.clone());
            prop_assert_eq!(a.mul(&one).unwrap(), a);
        }

        #[test]
        fn phi_is_a_homomorphism(which in 0usize..5, seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)], n in 1usize..3) {
            let u = universes()[which].clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = u.ball(1);
            let a = GroupRingMatrix::random(&u, p, n, &s, &mut rng).unwrap();
            let b = GroupRingMatrix::random(&u, p, n, &s, &mut rng).unwrap();
            let lhs = a.mul(&b).unwrap().phi().unwrap();
            let rhs = a.phi().unwrap().compose(&b.phi().unwrap()).unwrap();
            prop_assert!(lhs.equivalent(&rhs).unwrap());
            prop_assert_eq!(GroupRingMatrix::phi_inv(&a.phi().unwrap()).unwrap(), a);
        }

        #[test]
        fn flatten_is_a_ring_isomorphism(seed in any::<u64>(), which in 0usize..3) {
            let u = universes()[which].clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = GroupRingMatrix::random(&u, 3, 2, &u.ball(1), &mut rng).unwrap();
            let b = GroupRingMatrix::random(&u, 3, 2, &u.ball(1), &mut rng).unwrap();
            prop_assert_eq!(GroupRingMatrix::flatten(&a.unflatten()).unwrap(), a.clone());
            // multiply the unflattened arrays entrywise as matrices over F_3[G]
            let (ua, ub) = (a.unflatten(), b.unflatten());
            let prod: Vec<Vec<GroupRingMatrix>> = (0..2).map(|i| (0..2).map(|j| {
                ua[i][0].mul(&ub[0][j]).unwrap().add(&ua[i][1].mul(&ub[1][j]).unwrap()).unwrap()
            }).collect()).collect();
            prop_assert_eq!(GroupRingMatrix::flatten(&prod).unwrap(), a.mul(&b).unwrap());
            let sum: Vec<Vec<GroupRingMatrix>> = (0..2).map(|i| (0..2).map(|j| ua[i][j].add(&ub[i][j]).unwrap()).collect()).collect();
            prop_assert_eq!(GroupRingMatrix::flatten(&sum).unwrap(), a.add(&b).unwrap());
        }

        #[test]
        fn regular_representation_is_a_ring_map(seed in any::<u64>(), which in 0usize..2) {
            let u = universes()[which].clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = GroupRingMatrix::random(&u, 2, 2, &u.ball(1), &mut rng).unwrap();
            let b = GroupRingMatrix::random(&u, 2, 2, &u.ball(1), &mut rng).unwrap();
            let (ra, rb) = (a.regular_representation().unwrap(), b.regular_representation().unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().regular_representation().unwrap(), ra.mul(&rb));
            prop_assert_eq!(a.add(&b).unwrap().regular_representation().unwrap(), ra.add(&rb));
        }
    }
}
