//! Radius-indexed decision procedures.
//!
//! Every decider returns a [`Verdict`]. `CertifiedYes` and `CertifiedNo`
//! carry a witness that [`crate::replay`] checks without searching; anything
//! the search could not settle is `Unknown` at the largest radius tried.
//! Witnesses are lexicographically least in canonical pattern order.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::alphabets::{decode_pattern, enumerate_hom_rules, pow_count, Alphabet, Letter, LocalRule, TABLE_CAP};
use crate::ca::{CaClass, CellularAutomaton, Pattern, WindowMap};
use crate::error::{GcaError, Result};
use crate::exact_1d::exact_1d;
use crate::fp::{echelon_rows, lex_least_nonzero, lex_reduce, FpMatrix};
use crate::group_ring::GroupRingMatrix;
use crate::groups::{FiniteSubset, GroupUniverse};
use crate::lattice;
use crate::records::{PatternRecord, RuleRecord};
use crate::verdict::{Verdict, Witness};

/// Resource bounds shared by all deciders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of patterns materialized by one enumeration.
    pub cap: u128,
    /// Largest number of nodes visited by one backtracking search.
    pub node_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { cap: TABLE_CAP, node_cap: 1 << 24 }
    }
}

/// Default escalation bound for `n` in [`certify_injective`].
pub fn default_max_n(universe: &GroupUniverse) -> usize {
    match universe {
        GroupUniverse::FreeAbelian { rank: 1 } => 6,
        GroupUniverse::FreeAbelian { .. } => 3,
        _ => 4,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelWindowReport {
    pub n: usize,
    pub empty: bool,
    /// Least element of `V_n`, on the window `E_n M`.
    pub sample: Option<Pattern>,
}

fn coords(alphabet: &Alphabet, values: &[Letter]) -> Vec<u32> {
    values.iter().flat_map(|&a| alphabet.to_vector(a)).collect()
}

fn letters(alphabet: &Alphabet, coords: &[u32]) -> Vec<Letter> {
    let (_, n) = alphabet.field().expect("vector alphabet");
    coords.chunks(n).map(|c| alphabet.from_vector(c)).collect()
}

/// Echelon basis of `{x ∈ span(basis) : x[c] = 0 for c ∈ cols}`.
fn vanishing_on(p: u32, basis: &[Vec<u32>], cols: std::ops::Range<usize>) -> Vec<Vec<u32>> {
    if cols.is_empty() || basis.is_empty() {
        return basis.to_vec();
    }
    let rows: Vec<Vec<u32>> = cols.map(|c| basis.iter().map(|b| b[c]).collect()).collect();
    let combos = FpMatrix::from_rows(p, &rows).expect("rectangular").nullspace();
    let vecs = combos
        .iter()
        .map(|c| {
            let mut v = vec![0u64; basis[0].len()];
            for (ci, b) in c.iter().zip(basis) {
                for (vj, &bj) in v.iter_mut().zip(b) {
                    *vj += *ci as u64 * bj as u64;
                }
            }
            v.into_iter().map(|x| (x % p as u64) as u32).collect()
        })
        .collect();
    echelon_rows(p, vecs)
}

/// Lexicographically least `x ∈ span(basis)` whose block `block` (of width
/// `n`) is nonzero.
fn least_with_nonzero_block(p: u32, basis: &[Vec<u32>], block: usize, n: usize) -> Option<Vec<u32>> {
    let s = block * n;
    let mut best: Option<Vec<u32>> = None;
    for t in s..s + n {
        let space = vanishing_on(p, basis, s..t);
        let Some(row) = space.iter().find(|r| r[t] != 0) else {
            continue;
        };
        let direction = vanishing_on(p, &space, t..t + 1);
        let inv = crate::fp::inv_mod(row[t], p) as u64;
        for v in 1..p as u64 {
            let point = row.iter().map(|&x| (x as u64 * inv % p as u64 * v % p as u64) as u32).collect();
            let cand = lex_reduce(p, point, &direction);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best
}

/// Lexicographically least assignment of `allowed` letters to the source of
/// `map` whose image at every target `t` equals `targets[t]` and which
/// `accept` approves.
fn search_lex(
    map: &WindowMap,
    targets: &[Letter],
    allowed: &[Vec<Letter>],
    node_cap: u64,
    accept: &dyn Fn(&[Letter]) -> bool,
) -> Result<Option<Vec<Letter>>> {
    let positions = allowed.len();
    let rule = map.rule();
    let mut checks_at: Vec<Vec<usize>> = vec![Vec::new(); positions];
    for (t, cols) in map.gather().iter().enumerate() {
        checks_at[*cols.iter().max().expect("nonempty memory")].push(t);
    }
    if positions == 0 {
        return Ok(accept(&[]).then(Vec::new));
    }
    let mut x = vec![0; positions];
    let mut choice = vec![0usize; positions];
    let mut buf = vec![0; rule.memory().len()];
    let mut pos = 0;
    let mut nodes: u64 = 0;
    loop {
        if pos == positions {
            if accept(&x) {
                return Ok(Some(x));
            }
            pos -= 1;
            choice[pos] += 1;
            continue;
        }
        if choice[pos] >= allowed[pos].len() {
            choice[pos] = 0;
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            choice[pos] += 1;
            continue;
        }
        nodes += 1;
        if nodes > node_cap {
            return Err(GcaError::CapExceeded { size: nodes as u128, cap: node_cap as u128 });
        }
        x[pos] = allowed[pos][choice[pos]];
        let ok = checks_at[pos].iter().all(|&t| {
            for (slot, &j) in buf.iter_mut().zip(&map.gather()[t]) {
                *slot = x[j];
            }
            rule.eval(&buf) == targets[t]
        });
        if ok {
            pos += 1;
        } else {
            choice[pos] += 1;
        }
    }
}

/// Columns of the window matrix belonging to source positions in `support`.
fn support_columns(map: &WindowMap, n: usize, support: &FiniteSubset) -> FpMatrix {
    let t = map.matrix().expect("linear window map");
    let mut out = FpMatrix::zeros(t.p(), t.rows(), n * support.len());
    for (wi, w) in support.iter().enumerate() {
        let si = map.source().index_of(w).expect("support inside source");
        out.add_block(0, n * wi, &t.block(0, n * si, t.rows(), n));
    }
    out
}

/// Least nonzero finitely supported `x` on `support` with `τ(x) = e`, and
/// the least `x` with `τ(x) = target` when `target` is given. The image is
/// checked on `support·M`, outside of which it is neutral.
fn solve_on_support(
    ca: &CellularAutomaton,
    class: CaClass,
    support: &FiniteSubset,
    target: Option<&Pattern>,
    limits: &Limits,
) -> Result<Option<Pattern>> {
    let u = ca.universe();
    let alphabet = ca.alphabet();
    let e = alphabet.neutral();
    let window = u.product_set(support, ca.memory());
    let map = ca.window_map(&window)?;
    let goal: Vec<Letter> = match target {
        Some(t) => window.iter().map(|g| t.get(g).unwrap_or(e)).collect(),
        None => vec![e; window.len()],
    };
    let found = if class == CaClass::Linear {
        let n = alphabet.field().expect("vector alphabet").1;
        let a = support_columns(&map, n, support);
        let x = match target {
            Some(_) => a.solve_lex_least(&coords(alphabet, &goal)),
            None => lex_least_nonzero(&a.nullspace()),
        };
        x.map(|x| letters(alphabet, &x))
    } else {
        let allowed: Vec<Vec<Letter>> = map
            .source()
            .iter()
            .map(|g| if support.contains(g) { (0..alphabet.size()).collect() } else { vec![e] })
            .collect();
        let nonzero = |x: &[Letter]| target.is_some() || x.iter().any(|&a| a != e);
        search_lex(&map, &goal, &allowed, limits.node_cap, &nonzero)?.map(|x| {
            support.iter().map(|g| x[map.source().index_of(g).expect("inside")]).collect()
        })
    };
    Ok(found.map(|values| Pattern { window: support.clone(), values }))
}

fn v_sample(ca: &CellularAutomaton, class: CaClass, window: &FiniteSubset, limits: &Limits) -> Result<Option<Pattern>> {
    let map = ca.window_map(window)?;
    let alphabet = ca.alphabet();
    let e = alphabet.neutral();
    let one = map.source().index_of(&ca.universe().identity()).expect("identity in E M");
    let values = if class == CaClass::Linear {
        let (p, n) = alphabet.field().expect("vector alphabet");
        let kernel = map.matrix().expect("linear").nullspace();
        least_with_nonzero_block(p, &kernel, one, n).map(|x| letters(alphabet, &x))
    } else {
        let allowed: Vec<Vec<Letter>> = (0..map.source().len())
            .map(|i| (0..alphabet.size()).filter(|&a| i != one || a != e).collect())
            .collect();
        search_lex(&map, &vec![e; window.len()], &allowed, limits.node_cap, &|_| true)?
    };
    Ok(values.map(|values| Pattern { window: map.source().clone(), values }))
}

/// Decides whether `V_n` is empty for `E_n = ball(n₀ + n)`.
pub fn kernel_window(ca: &CellularAutomaton, n: usize, limits: &Limits) -> Result<KernelWindowReport> {
    let (class, ca) = ca.require_algebraic()?;
    let window = ca.universe().ball(ca.memory_radius() + n);
    let sample = v_sample(&ca, class, &window, limits)?;
    Ok(KernelWindowReport { n, empty: sample.is_none(), sample })
}

/// Escalates `n = 0..=max_n`; the first empty `V_n` certifies injectivity.
/// Emptiness is re-checked at the three following windows.
pub fn certify_injective(ca: &CellularAutomaton, max_n: usize, limits: &Limits) -> Result<Verdict> {
    let mut v = Verdict::new("check-injective").param("max_n", max_n);
    for n in 0..=max_n {
        let report = kernel_window(ca, n, limits)?;
        if let Some(s) = &report.sample {
            v.note(format!("V_{n} nonempty: {:?}", s.values));
            continue;
        }
        v.note(format!("V_{n} empty"));
        for m in n + 1..=n + 3 {
            match kernel_window(ca, m, limits) {
                Ok(r) if r.empty => v.note(format!("V_{m} empty")),
                Ok(_) => {
                    v.note(format!("monotonicity violated: V_{n} empty but V_{m} is not"));
                    return Ok(v.unknown(Some(max_n)));
                }
                Err(GcaError::CapExceeded { .. } | GcaError::WindowTooLarge { .. }) => {
                    v.note(format!("V_{m} beyond caps, not rechecked"));
                    break;
                }
                Err(err) => return Err(err),
            }
        }
        return Ok(v.yes(Some(n), Witness::EmptyKernelWindow { n }));
    }
    Ok(v.unknown(Some(max_n)))
}

fn full_window(u: &GroupUniverse) -> Result<FiniteSubset> {
    Ok(FiniteSubset::new(u.enumerate()?))
}

/// Exact injectivity on a finite universe, with the least colliding pair.
pub fn injectivity_finite(ca: &CellularAutomaton, limits: &Limits) -> Result<Verdict> {
    let mut v = Verdict::new("injective-finite");
    let order = ca.universe().order().ok_or(GcaError::InfiniteUniverse)?;
    match colliding_pair(ca, limits)? {
        Some((left, right)) => Ok(v.no(None, Witness::CollidingPair { lattice: None, left, right })),
        None => {
            let checked = pow_count(ca.alphabet().size(), order);
            v.note(format!("no collision among {checked} configurations"));
            Ok(v.yes(None, Witness::Exhaustive { property: "injective".into(), checked }))
        }
    }
}

/// Two configurations of a finite universe with the same image; for group
/// and linear automata the pair is `e` and a kernel element.
fn colliding_pair(ca: &CellularAutomaton, limits: &Limits) -> Result<Option<(Vec<Letter>, Vec<Letter>)>> {
    let (class, sca) = ca.structured()?;
    let g = full_window(ca.universe())?;
    let e = ca.alphabet().neutral();
    if class != CaClass::Plain {
        let kernel = solve_on_support(&sca, class, &g, None, limits)?;
        return Ok(kernel.map(|k| (vec![e; g.len()], k.values)));
    }
    let k = ca.alphabet().size();
    let count = pow_count(k, g.len());
    if count > limits.cap {
        return Err(GcaError::CapExceeded { size: count, cap: limits.cap });
    }
    let mut seen: HashMap<Vec<Letter>, usize> = HashMap::new();
    for y in 0..count as usize {
        let image = ca.apply_finite(&decode_pattern(k, y, g.len()))?;
        if let Some(&x) = seen.get(&image) {
            return Ok(Some((decode_pattern(k, x, g.len()), decode_pattern(k, y, g.len()))));
        }
        seen.insert(image, y);
    }
    Ok(None)
}

/// Searches for a collision: exhaustively on finite universes, among
/// `L`-periodic configurations with `[Z^d : L] ≤ period_bound` on `Z^d`.
pub fn refute_injective(ca: &CellularAutomaton, period_bound: u64, limits: &Limits) -> Result<Verdict> {
    let mut v = Verdict::new("refute-injective").param("period_bound", period_bound);
    match ca.universe() {
        GroupUniverse::Finite(_) => {
            if let Some((left, right)) = colliding_pair(ca, limits)? {
                return Ok(v.no(None, Witness::CollidingPair { lattice: None, left, right }));
            }
            v.note("exhaustive search found no collision");
            Ok(v.unknown(None))
        }
        GroupUniverse::FreeAbelian { rank } => {
            for det in 1..=period_bound {
                for basis in lattice::lattices_of_index(*rank, det) {
                    let action = ca.periodic_action(&basis)?;
                    if let Some((left, right)) = colliding_pair(&action.quotient, limits)? {
                        v.note(format!("collision among configurations periodic under {basis:?}"));
                        return Ok(v.no(
                            Some(det as usize),
                            Witness::CollidingPair { lattice: Some(action.basis), left, right },
                        ));
                    }
                }
                v.note(format!("no collision at index {det}"));
            }
            Ok(v.unknown(Some(period_bound as usize)))
        }
        GroupUniverse::Free { .. } => Err(GcaError::UnsupportedUniverse("periodic search needs Z^d or a finite group".into())),
    }
}

/// Least pattern outside the image of `τ_E^+`, with an annihilating
/// functional for linear automata.
fn orphan(ca: &CellularAutomaton, window: &FiniteSubset, limits: &Limits) -> Result<Option<(Pattern, Option<Vec<u32>>)>> {
    let (class, sca) = ca.structured()?;
    let map = sca.window_map(window)?;
    let alphabet = ca.alphabet();
    if class == CaClass::Linear {
        let p = alphabet.field().expect("vector alphabet").0;
        let t = map.matrix().expect("linear");
        let left_null = t.transpose().nullspace();
        let Some(j) = (0..t.rows()).rev().find(|&j| left_null.iter().any(|y| y[j] != 0)) else {
            return Ok(None);
        };
        let y = left_null.iter().find(|y| y[j] != 0).expect("found above");
        let inv = crate::fp::inv_mod(y[j], p) as u64;
        let y: Vec<u32> = y.iter().map(|&c| (c as u64 * inv % p as u64) as u32).collect();
        let mut unit = vec![0u32; t.rows()];
        unit[j] = 1;
        return Ok(Some((Pattern { window: window.clone(), values: letters(alphabet, &unit) }, Some(y))));
    }
    let outputs = map.output_count();
    if map.input_count() > limits.cap {
        return Err(GcaError::CapExceeded { size: map.input_count(), cap: limits.cap });
    }
    let mut hit = vec![false; outputs as usize];
    for o in map.dense_table(limits.cap)? {
        hit[o] = true;
    }
    Ok(hit.iter().position(|h| !h).map(|o| {
        let values = decode_pattern(alphabet.size(), o, window.len());
        (Pattern { window: window.clone(), values }, None)
    }))
}

/// Looks for a Garden-of-Eden pattern on `window`.
pub fn goe_search(ca: &CellularAutomaton, window: &FiniteSubset, limits: &Limits) -> Result<Verdict> {
    let v = Verdict::new("goe").param("window", window.elements());
    let radius = Some(ca.universe().radius_of(window));
    Ok(match orphan(ca, window, limits)? {
        Some((pattern, annihilator)) => {
            v.no(radius, Witness::Orphan { pattern: PatternRecord::from_pattern(&pattern), annihilator })
        }
        None => {
            let mut v = v.unknown(radius);
            v.witness = Some(Witness::WindowConsistent { window: window.elements().to_vec() });
            v.note("every pattern on the window has a preimage");
            v
        }
    })
}

/// Exact surjectivity on a finite universe.
pub fn check_surjective_finite(ca: &CellularAutomaton, limits: &Limits) -> Result<Verdict> {
    let g = full_window(ca.universe())?;
    let v = Verdict::new("check-surjective");
    Ok(match orphan(ca, &g, limits)? {
        Some((pattern, annihilator)) => {
            v.no(None, Witness::Orphan { pattern: PatternRecord::from_pattern(&pattern), annihilator })
        }
        None => v.yes(None, Witness::WindowConsistent { window: g.elements().to_vec() }),
    })
}

/// Surjectivity by the strongest available method: exhaustive on finite
/// universes, the de Bruijn oracle on `Z`, window search up to `max_radius`
/// elsewhere.
pub fn check_surjective(ca: &CellularAutomaton, max_radius: usize, limits: &Limits) -> Result<Verdict> {
    match ca.universe() {
        GroupUniverse::Finite(_) => check_surjective_finite(ca, limits),
        GroupUniverse::FreeAbelian { rank: 1 } => {
            let r = exact_1d(ca, limits.cap)?;
            let v = Verdict::new("check-surjective");
            let w = Witness::Exact1d { injective: r.injective, surjective: r.surjective };
            Ok(if r.surjective { v.yes(None, w) } else { v.no(None, w) })
        }
        _ => {
            let mut last = None;
            for r in 0..=max_radius {
                let verdict = goe_search(ca, &ca.universe().ball(r), limits)?;
                if verdict.is_no() {
                    let mut verdict = verdict;
                    verdict.decider = "check-surjective".into();
                    return Ok(verdict);
                }
                last = Some(verdict);
            }
            let mut v = Verdict::new("check-surjective").param("max_radius", max_radius);
            v.transcript = last.map(|l| l.transcript).unwrap_or_default();
            Ok(v.unknown(Some(max_radius)))
        }
    }
}

/// Injectivity by the strongest available method.
pub fn check_injective(ca: &CellularAutomaton, max_n: usize, limits: &Limits) -> Result<Verdict> {
    let class = ca.classify()?;
    match ca.universe() {
        GroupUniverse::Finite(_) => {
            let mut v = injectivity_finite(ca, limits)?;
            v.decider = "check-injective".into();
            Ok(v)
        }
        GroupUniverse::FreeAbelian { rank: 1 } if class == CaClass::Plain => {
            let r = exact_1d(ca, limits.cap)?;
            let v = Verdict::new("check-injective");
            let w = Witness::Exact1d { injective: r.injective, surjective: r.surjective };
            Ok(if r.injective { v.yes(None, w) } else { v.no(None, w) })
        }
        _ => certify_injective(ca, max_n, limits),
    }
}

/// `σ∘τ = Id` is required; reports whether `τ∘σ = Id` as well.
pub fn direct_finiteness_check(sigma: &CellularAutomaton, tau: &CellularAutomaton) -> Result<Verdict> {
    let st = sigma.compose(tau)?;
    if let Some(d) = st.rule().identity_defect()? {
        return Err(GcaError::PreconditionFailed(format!("sigma after tau moves the pattern {d:?}")));
    }
    let mut v = Verdict::new("direct-finiteness");
    v.note(format!("sigma after tau is the identity on memory of size {}", st.memory().len()));
    let ts = tau.compose(sigma)?;
    Ok(match ts.rule().identity_defect()? {
        None => {
            v.note(format!("tau after sigma is the identity on memory of size {}", ts.memory().len()));
            v.yes(None, Witness::DirectFiniteness { defect: None })
        }
        Some(d) => v.no(None, Witness::DirectFiniteness { defect: Some(d) }),
    })
}

/// Looks for a local rule `η` on `ball(r)` with `η(τ_N^+(x)) = x(1)`.
/// Off the image `η` returns the neutral letter.
pub fn synthesize_inverse(ca: &CellularAutomaton, max_radius: usize, limits: &Limits) -> Result<Verdict> {
    let mut v = Verdict::new("invert").param("max_radius", max_radius);
    let (class, sca) = ca.structured()?;
    let u = ca.universe();
    let alphabet = ca.alphabet();
    for r in 0..=max_radius {
        let ball = u.ball(r);
        let map = sca.window_map(&ball)?;
        let one = map.source().index_of(&u.identity()).expect("identity in N M");
        let rule = if class == CaClass::Linear {
            let (p, n) = alphabet.field().expect("vector alphabet");
            let tt = map.matrix().expect("linear").transpose();
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let mut b = vec![0u32; tt.rows()];
                b[n * one + i] = 1;
                match tt.solve_lex_least(&b) {
                    Some(y) => rows.push(y),
                    None => break,
                }
            }
            if rows.len() < n {
                v.note(format!("radius {r}: x(1) is not a function of the window image"));
                continue;
            }
            let mats = (0..ball.len())
                .map(|g| {
                    let data = (0..n).flat_map(|i| rows[i][n * g..n * g + n].to_vec()).collect();
                    FpMatrix::from_flat(p, n, n, data).expect("square")
                })
                .collect();
            LocalRule::linear(u, alphabet.clone(), ball.clone(), mats)?
        } else {
            let k = alphabet.size();
            if map.input_count() > limits.cap {
                return Err(GcaError::CapExceeded { size: map.input_count(), cap: limits.cap });
            }
            let mut eta: Vec<Option<Letter>> = vec![None; map.output_count() as usize];
            let mut consistent = true;
            for (i, o) in map.dense_table(limits.cap)?.into_iter().enumerate() {
                let centre = decode_pattern(k, i, map.source().len())[one];
                match eta[o] {
                    Some(c) if c != centre => {
                        consistent = false;
                        break;
                    }
                    _ => eta[o] = Some(centre),
                }
            }
            if !consistent {
                v.note(format!("radius {r}: x(1) is not a function of the window image"));
                continue;
            }
            let e = alphabet.neutral();
            let table = eta.into_iter().map(|c| c.unwrap_or(e)).collect();
            LocalRule::table(u, alphabet.clone(), ball.clone(), table)?
        };
        let sigma = CellularAutomaton::new(u.clone(), rule)?;
        let check = direct_finiteness_check(&sigma, ca)?;
        v.transcript.extend(check.transcript.iter().cloned());
        if check.is_yes() {
            return Ok(v.yes(Some(r), Witness::InverseRule { radius: r, rule: RuleRecord::from_rule(sigma.rule()) }));
        }
        v.note(format!("radius {r}: left inverse found but tau after sigma is not the identity"));
    }
    Ok(v.unknown(Some(max_radius)))
}

/// Scalar linear rule on `Z^d`, as a group ring element.
fn scalar_polynomial(ca: &CellularAutomaton, class: CaClass, sca: &CellularAutomaton) -> Result<Option<GroupRingMatrix>> {
    if class != CaClass::Linear || !matches!(ca.universe(), GroupUniverse::FreeAbelian { .. }) {
        return Ok(None);
    }
    if ca.alphabet().field().map(|f| f.1) != Some(1) {
        return Ok(None);
    }
    Ok(Some(GroupRingMatrix::phi_inv(sca)?))
}

/// Pre-injectivity: distinct asymptotic configurations have distinct images.
pub fn pre_injectivity(ca: &CellularAutomaton, support_radius: usize, max_n: usize, limits: &Limits) -> Result<Verdict> {
    let mut v = Verdict::new("pre-injective").param("support_radius", support_radius);
    if ca.universe().is_finite() {
        v.note("finite universe: every pair of configurations is asymptotic");
        let mut inner = injectivity_finite(ca, limits)?;
        inner.decider = v.decider;
        inner.parameters = v.parameters;
        inner.transcript.splice(0..0, v.transcript);
        return Ok(inner);
    }
    let (class, sca) = ca.structured()?;
    if class == CaClass::Plain {
        return Err(GcaError::UnsupportedCombination("pre-injectivity of plain rules needs a finite universe".into()));
    }
    let ball = ca.universe().ball(support_radius);
    if let Some(k) = solve_on_support(&sca, class, &ball, None, limits)? {
        v.note("nonzero finitely supported kernel element");
        return Ok(v.no(Some(support_radius), Witness::FiniteKernel { pattern: PatternRecord::from_pattern(&k) }));
    }
    v.note(format!("no kernel element supported in ball({support_radius})"));
    if let Some(poly) = scalar_polynomial(ca, class, &sca)? {
        if !poly.is_zero() {
            v.note("nonzero scalar rule: F_p[Z^d] has no zero divisors");
            return Ok(v.yes(
                None,
                Witness::ScalarOracle { polynomial: poly.to_record(), claim: "nonzero".into() },
            ));
        }
    }
    let inj = certify_injective(&sca, max_n, limits)?;
    if let (true, Some(n)) = (inj.is_yes(), inj.radius) {
        v.note(format!("injective by V_{n} = empty"));
        return Ok(v.yes(Some(n), Witness::EmptyKernelWindow { n }));
    }
    Ok(v.unknown(Some(support_radius)))
}

/// Letters whose single-site deviations generate all finitely supported
/// deviations.
fn deviation_letters(alphabet: &Alphabet, class: CaClass) -> Vec<Letter> {
    let e = alphabet.neutral();
    match (class, alphabet.field()) {
        (CaClass::Linear, Some((_, n))) => (0..n)
            .map(|k| {
                let mut unit = vec![0u32; n];
                unit[k] = 1;
                alphabet.from_vector(&unit)
            })
            .collect(),
        _ => (0..alphabet.size()).filter(|&a| a != e).collect(),
    }
}

/// Post-surjectivity through finitely supported preimages of single-site
/// deviations. `deviation_radius` is recorded but not otherwise used.
pub fn post_surjectivity(
    ca: &CellularAutomaton,
    deviation_radius: usize,
    search_radius: usize,
    limits: &Limits,
) -> Result<Verdict> {
    let mut v = Verdict::new("post-surjective")
        .param("deviation_radius", deviation_radius)
        .param("search_radius", search_radius);
    let (class, sca) = ca.structured()?;
    let u = ca.universe();
    if class == CaClass::Plain {
        if !u.is_finite() {
            return Err(GcaError::NotAGroupOrLinearCA);
        }
        v.note("finite universe: post-surjectivity is surjectivity");
        let mut inner = check_surjective_finite(ca, limits)?;
        inner.decider = v.decider;
        inner.parameters = v.parameters;
        inner.transcript.splice(0..0, v.transcript);
        return Ok(inner);
    }
    let alphabet = ca.alphabet();
    let e = alphabet.neutral();
    let letters_needed = deviation_letters(alphabet, class);
    let deviation = |a: Letter| Pattern { window: FiniteSubset::new([u.identity()]), values: vec![a] };
    let radii: Vec<usize> = match u.order() {
        Some(order) => {
            let diam = (0..).find(|&r| u.ball(r).len() == order).expect("finite group");
            (0..=diam).collect()
        }
        None => {
            if let Some(poly) = scalar_polynomial(ca, class, &sca)? {
                if poly.support().len() != 1 {
                    v.note("scalar rule that is not a monomial is not a unit of F_p[Z^d]");
                    return Ok(v.no(
                        None,
                        Witness::ScalarOracle { polynomial: poly.to_record(), claim: "not a monomial".into() },
                    ));
                }
            }
            (0..=search_radius).collect()
        }
    };
    for &r in &radii {
        let ball = u.ball(r);
        let mut pre = Vec::with_capacity(letters_needed.len());
        for &a in &letters_needed {
            match solve_on_support(&sca, class, &ball, Some(&deviation(a)), limits)? {
                Some(w) => pre.push(PatternRecord::from_pattern(&w)),
                None => break,
            }
        }
        if pre.len() == letters_needed.len() {
            return Ok(v.yes(Some(r), Witness::Preimages { letters: letters_needed, preimages: pre }));
        }
        v.note(format!("radius {r}: deviation of letter {} has no preimage", letters_needed[pre.len()]));
        if u.order() == Some(ball.len()) {
            let a = letters_needed[pre.len()];
            let g = full_window(u)?;
            let d = Pattern { window: g.clone(), values: g.iter().map(|x| if *x == u.identity() { a } else { e }).collect() };
            let annihilator = if class == CaClass::Linear {
                let map = sca.window_map(&g)?;
                let (p, _) = alphabet.field().expect("vector alphabet");
                let dc = coords(alphabet, &d.values);
                map.matrix()
                    .expect("linear")
                    .transpose()
                    .nullspace()
                    .into_iter()
                    .find(|y| y.iter().zip(&dc).map(|(a, b)| *a as u64 * *b as u64).sum::<u64>() % p as u64 != 0)
            } else {
                None
            };
            return Ok(v.no(None, Witness::Orphan { pattern: PatternRecord::from_pattern(&d), annihilator }));
        }
    }
    Ok(v.unknown(Some(search_radius)))
}

/// Counts from a surjunctivity sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepCounts {
    pub rules: usize,
    pub injective: usize,
    pub surjective_among_injective: usize,
    pub unresolved: usize,
    pub violations: Vec<LocalRule>,
}

fn sweep_classify(ca: &CellularAutomaton, limits: &Limits) -> Result<(Option<bool>, Option<bool>)> {
    match ca.universe() {
        GroupUniverse::Finite(_) => {
            let inj = injectivity_finite(ca, limits)?.is_yes();
            let surj = check_surjective_finite(ca, limits)?.is_yes();
            Ok((Some(inj), Some(surj)))
        }
        GroupUniverse::FreeAbelian { rank: 1 } => {
            let r = exact_1d(ca, limits.cap)?;
            Ok((Some(r.injective), Some(r.surjective)))
        }
        GroupUniverse::FreeAbelian { .. } => {
            if !certify_injective(ca, default_max_n(ca.universe()), limits)?.is_yes() {
                return Ok((None, None));
            }
            if synthesize_inverse(ca, 4, limits)?.is_yes() {
                return Ok((Some(true), Some(true)));
            }
            for r in 1..=2 {
                if goe_search(ca, &ca.universe().ball(r), limits)?.is_no() {
                    return Ok((Some(true), Some(false)));
                }
            }
            Ok((Some(true), None))
        }
        GroupUniverse::Free { .. } => Err(GcaError::UnsupportedUniverse("sweeps need a finite group or Z^d".into())),
    }
}

/// Classifies every group rule on `memory` and counts injective rules that
/// fail to be surjective.
pub fn surjunctivity_sweep(
    universe: &GroupUniverse,
    alphabet: &Alphabet,
    memory: &FiniteSubset,
    budget: u128,
    limits: &Limits,
) -> Result<SweepCounts> {
    if let GroupUniverse::Free { .. } = universe {
        return Err(GcaError::UnsupportedUniverse("sweeps need a finite group or Z^d".into()));
    }
    let rules = enumerate_hom_rules(universe, alphabet, memory, budget)?;
    let verdicts = rules
        .par_iter()
        .map(|rule| {
            let ca = CellularAutomaton::new(universe.clone(), rule.clone())?;
            sweep_classify(&ca, limits)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = SweepCounts { rules: rules.len(), injective: 0, surjective_among_injective: 0, unresolved: 0, violations: Vec::new() };
    for (rule, (inj, surj)) in rules.iter().zip(verdicts) {
        match (inj, surj) {
            (Some(true), Some(true)) => {
                counts.injective += 1;
                counts.surjective_among_injective += 1;
            }
            (Some(true), Some(false)) => {
                counts.injective += 1;
                counts.violations.push(rule.clone());
            }
            (Some(true), None) => {
                counts.injective += 1;
                counts.unresolved += 1;
            }
            (None, _) => counts.unresolved += 1,
            (Some(false), _) => {}
        }
    }
    Ok(counts)
}

pub fn sweep_verdict(
    universe: &GroupUniverse,
    alphabet: &Alphabet,
    memory: &FiniteSubset,
    budget: u128,
    limits: &Limits,
) -> Result<Verdict> {
    let c = surjunctivity_sweep(universe, alphabet, memory, budget, limits)?;
    let mut v = Verdict::new("sweep").param("memory", memory.elements()).param("budget", budget.to_string());
    v.note(format!(
        "{} rules, {} injective, {} surjective among injective, {} violations",
        c.rules,
        c.injective,
        c.surjective_among_injective,
        c.violations.len()
    ));
    if c.unresolved > 0 {
        v.note(format!("{} rules not fully classified", c.unresolved));
    }
    let witness = Witness::SweepReport {
        rules: c.rules,
        injective: c.injective,
        surjective_among_injective: c.surjective_among_injective,
        violations: c.violations.iter().map(RuleRecord::from_rule).collect(),
    };
    Ok(if c.violations.is_empty() { v.yes(None, witness) } else { v.no(None, witness) })
}

pub fn exact_1d_verdict(ca: &CellularAutomaton, limits: &Limits) -> Result<Verdict> {
    let r = exact_1d(ca, limits.cap)?;
    let mut v = Verdict::new("exact-1d");
    v.note(format!("injective = {}, surjective = {}", r.injective, r.surjective));
    Ok(v.yes(None, Witness::Exact1d { injective: r.injective, surjective: r.surjective }))
}

/// `true` when `pattern` is the deviation `a` at the identity.
pub(crate) fn is_deviation(u: &GroupUniverse, e: Letter, pattern: &Pattern, a: Letter) -> bool {
    pattern.window.iter().zip(&pattern.values).all(|(g, &x)| x == if *g == u.identity() { a } else { e })
        && pattern.window.contains(&u.identity())
}

pub(crate) fn pattern_coords(alphabet: &Alphabet, values: &[Letter]) -> Vec<u32> {
    coords(alphabet, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabets::random_linear_rule;
    use crate::groups::GroupElement;
    use crate::fp::FpMatrix;
    use crate::groups::Preset;
    use crate::verdict::Status;
    use proptest::prelude::*;

    fn z(v: i64) -> GroupElement {
        GroupElement::Vector(vec![v])
    }
    fn zset(vs: &[i64]) -> FiniteSubset {
        FiniteSubset::new(vs.iter().map(|&v| z(v)))
    }
    fn lim() -> Limits {
        Limits::default()
    }
    fn xor_on(u: &GroupUniverse, mem: FiniteSubset) -> CellularAutomaton {
        let one = FpMatrix::identity(2, 1);
        let rule = LocalRule::linear(u, Alphabet::vector(2, 1).unwrap(), mem, vec![one.clone(), one]).unwrap();
        CellularAutomaton::new(u.clone(), rule).unwrap()
    }
    fn xor() -> CellularAutomaton {
        xor_on(&GroupUniverse::free_abelian(1), zset(&[0, 1]))
    }
    fn i_plus_xn() -> CellularAutomaton {
        let u = GroupUniverse::free_abelian(1);
        let n = FpMatrix::from_rows(2, &[vec![0, 1], vec![0, 0]]).unwrap();
        let rule = LocalRule::linear(&u, Alphabet::vector(2, 2).unwrap(), zset(&[0, 1]), vec![FpMatrix::identity(2, 2), n]).unwrap();
        CellularAutomaton::new(u, rule).unwrap()
    }
    fn c2_sum() -> CellularAutomaton {
        let u = GroupUniverse::cyclic(2).unwrap();
        let mem = FiniteSubset::new([GroupElement::Index(0), GroupElement::Index(1)]);
        let rule = LocalRule::hom(&u, Alphabet::cyclic(2).unwrap(), mem, vec![vec![0, 1], vec![0, 1]]).unwrap();
        CellularAutomaton::new(u, rule).unwrap()
    }

    #[test]
    fn kernel_window_examples() {
        let u = GroupUniverse::free_abelian(1);
        let id = CellularAutomaton::identity(&u, Alphabet::vector(2, 1).unwrap()).unwrap();
        assert!(kernel_window(&id, 0, &lim()).unwrap().empty);
        for n in 0..4 {
            let r = kernel_window(&xor(), n, &lim()).unwrap();
            let s = r.sample.unwrap();
            assert_eq!(s.window, u.ball(1 + n + 1));
            // the leftmost cell is read by no output, so the least sample
            // leaves it at 0; the all-ones pattern is also in V_n
            let mut ones = vec![1; s.values.len()];
            assert_eq!(s.values[1..], ones[1..]);
            assert_eq!(s.values[0], 0);
            let map = xor().window_map(&u.ball(1 + n)).unwrap();
            assert!(map.eval(&ones).iter().all(|&a| a == 0));
            ones[0] = 0;
            assert!(map.eval(&ones).iter().all(|&a| a == 0));
        }
        assert!(kernel_window(&i_plus_xn(), 1, &lim()).unwrap().empty);
        let plain = CellularAutomaton::new(
            u.clone(),
            LocalRule::table(&u, Alphabet::plain(2).unwrap(), zset(&[0]), vec![1, 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(kernel_window(&plain, 0, &lim()), Err(GcaError::NotAGroupOrLinearCA));
    }

    #[test]
    fn certify_injective_examples() {
        let u = GroupUniverse::free_abelian(1);
        let shift = CellularAutomaton::shift(&u, Alphabet::cyclic(3).unwrap(), z(1)).unwrap();
        let v = certify_injective(&shift, 4, &lim()).unwrap();
        assert_eq!((v.status, v.radius), (Status::CertifiedYes, Some(0)));
        let v = certify_injective(&i_plus_xn(), 4, &lim()).unwrap();
        assert!(v.is_yes() && v.radius.unwrap() <= 2);
        let v = certify_injective(&xor(), 4, &lim()).unwrap();
        assert_eq!((v.status, v.radius), (Status::Unknown, Some(4)));
    }

    #[test]
    fn refute_injective_examples() {
        let v = refute_injective(&c2_sum(), 1, &lim()).unwrap();
        assert_eq!(v.witness, Some(Witness::CollidingPair { lattice: None, left: vec![0, 0], right: vec![1, 1] }));
        let v = refute_injective(&xor(), 1, &lim()).unwrap();
        assert_eq!(v.witness, Some(Witness::CollidingPair { lattice: Some(vec![vec![1]]), left: vec![0], right: vec![1] }));
        let u = GroupUniverse::free_abelian(1);
        let shift = CellularAutomaton::shift(&u, Alphabet::plain(2).unwrap(), z(1)).unwrap();
        assert_eq!(refute_injective(&shift, 5, &lim()).unwrap().status, Status::Unknown);
        let f = GroupUniverse::free(2);
        let id = CellularAutomaton::identity(&f, Alphabet::plain(2).unwrap()).unwrap();
        assert!(matches!(refute_injective(&id, 2, &lim()), Err(GcaError::UnsupportedUniverse(_))));
        // plain collision on a finite universe
        let c3 = GroupUniverse::cyclic(3).unwrap();
        let rule = LocalRule::table(&c3, Alphabet::plain(2).unwrap(), FiniteSubset::new([GroupElement::Index(0)]), vec![0, 0]).unwrap();
        let v = refute_injective(&CellularAutomaton::new(c3, rule).unwrap(), 1, &lim()).unwrap();
        assert_eq!(v.witness, Some(Witness::CollidingPair { lattice: None, left: vec![0, 0, 0], right: vec![0, 0, 1] }));
    }

    #[test]
    fn goe_examples() {
        let u = GroupUniverse::free_abelian(1);
        let v = goe_search(&xor(), &zset(&[0, 1, 2]), &lim()).unwrap();
        assert!(matches!(v.witness, Some(Witness::WindowConsistent { .. })));
        assert_eq!(v.status, Status::Unknown);
        let q = xor().periodic_action(&[vec![3]]).unwrap().quotient;
        let g = FiniteSubset::new((0..3).map(GroupElement::Index));
        let v = goe_search(&q, &g, &lim()).unwrap();
        let Some(Witness::Orphan { pattern, annihilator }) = v.witness else { panic!() };
        assert_eq!(pattern.values, vec![0, 0, 1]);
        assert_eq!(annihilator, Some(vec![1, 1, 1]));
        // same orphan without linear algebra
        let tq = CellularAutomaton::new(q.universe().clone(), q.rule().with_table_body().unwrap()).unwrap();
        let plain = CellularAutomaton::new(
            q.universe().clone(),
            LocalRule::table(q.universe(), Alphabet::plain(2).unwrap(), q.memory().clone(), tq.rule().to_table().unwrap()).unwrap(),
        )
        .unwrap();
        let v = goe_search(&plain, &g, &lim()).unwrap();
        let Some(Witness::Orphan { pattern, .. }) = v.witness else { panic!() };
        assert_eq!(pattern.values, vec![0, 0, 1]);
        let id = CellularAutomaton::identity(&u, Alphabet::plain(3).unwrap()).unwrap();
        assert!(!goe_search(&id, &u.ball(2), &lim()).unwrap().is_no());
    }

    #[test]
    fn surjective_finite_examples() {
        let c4 = GroupUniverse::cyclic(4).unwrap();
        let id = CellularAutomaton::identity(&c4, Alphabet::plain(2).unwrap()).unwrap();
        assert!(check_surjective_finite(&id, &lim()).unwrap().is_yes());
        let v = check_surjective_finite(&c2_sum(), &lim()).unwrap();
        let Some(Witness::Orphan { pattern, .. }) = v.witness else { panic!() };
        assert_eq!(pattern.values, vec![0, 1]);
        let c3 = GroupUniverse::cyclic(3).unwrap();
        let shift = CellularAutomaton::shift(&c3, Alphabet::plain(2).unwrap(), GroupElement::Index(1)).unwrap();
        assert!(check_surjective_finite(&shift, &lim()).unwrap().is_yes());
        assert_eq!(check_surjective_finite(&xor(), &lim()), Err(GcaError::InfiniteUniverse));
    }

    #[test]
    fn inverse_examples() {
        let u = GroupUniverse::free_abelian(1);
        for alphabet in [Alphabet::plain(2).unwrap(), Alphabet::vector(3, 1).unwrap(), Alphabet::cyclic(3).unwrap()] {
            let shift = CellularAutomaton::shift(&u, alphabet.clone(), z(1)).unwrap();
            let v = synthesize_inverse(&shift, 3, &lim()).unwrap();
            assert_eq!(v.radius, Some(1));
            let Some(Witness::InverseRule { rule, .. }) = v.witness else { panic!() };
            let back = CellularAutomaton::new(u.clone(), rule.build(&u, &alphabet).unwrap()).unwrap();
            assert!(back.equivalent(&CellularAutomaton::shift(&u, alphabet, z(-1)).unwrap()).unwrap());
        }
        let v = synthesize_inverse(&i_plus_xn(), 3, &lim()).unwrap();
        assert_eq!(v.radius, Some(1));
        let Some(Witness::InverseRule { rule, .. }) = v.witness else { panic!() };
        let inv = CellularAutomaton::new(u.clone(), rule.build(&u, &Alphabet::vector(2, 2).unwrap()).unwrap()).unwrap();
        assert!(inv.equivalent(&i_plus_xn()).unwrap());
        assert_eq!(synthesize_inverse(&xor(), 3, &lim()).unwrap().status, Status::Unknown);
    }

    #[test]
    fn direct_finiteness_examples() {
        let u = GroupUniverse::free_abelian(1);
        let a = Alphabet::plain(3).unwrap();
        let id = CellularAutomaton::identity(&u, a.clone()).unwrap();
        assert!(direct_finiteness_check(&id, &id).unwrap().is_yes());
        let l = CellularAutomaton::shift(&u, a.clone(), z(-1)).unwrap();
        let r = CellularAutomaton::shift(&u, a, z(1)).unwrap();
        assert!(direct_finiteness_check(&l, &r).unwrap().is_yes());
        assert!(direct_finiteness_check(&i_plus_xn(), &i_plus_xn()).unwrap().is_yes());
        assert!(matches!(direct_finiteness_check(&xor(), &xor()), Err(GcaError::PreconditionFailed(_))));
    }

    #[test]
    fn pre_injectivity_examples() {
        let v = pre_injectivity(&xor(), 3, 2, &lim()).unwrap();
        assert!(v.is_yes());
        assert!(matches!(v.witness, Some(Witness::ScalarOracle { .. })));
        let v = pre_injectivity(&c2_sum(), 1, 2, &lim()).unwrap();
        assert_eq!(v.witness, Some(Witness::CollidingPair { lattice: None, left: vec![0, 0], right: vec![1, 1] }));
        let u = GroupUniverse::free_abelian(1);
        let id = CellularAutomaton::identity(&u, Alphabet::cyclic(2).unwrap()).unwrap();
        assert!(pre_injectivity(&id, 2, 2, &lim()).unwrap().is_yes());
        // a nilpotent coefficient kills a single site
        let n = FpMatrix::from_rows(2, &[vec![0, 1], vec![0, 0]]).unwrap();
        let rule = LocalRule::linear(&u, Alphabet::vector(2, 2).unwrap(), zset(&[0]), vec![n]).unwrap();
        let v = pre_injectivity(&CellularAutomaton::new(u.clone(), rule).unwrap(), 0, 2, &lim()).unwrap();
        let Some(Witness::FiniteKernel { pattern }) = v.witness else { panic!() };
        assert_eq!(pattern.values, vec![2]);
        let plain = CellularAutomaton::new(u.clone(), LocalRule::table(&u, Alphabet::plain(2).unwrap(), zset(&[0]), vec![1, 0]).unwrap()).unwrap();
        assert!(matches!(pre_injectivity(&plain, 1, 1, &lim()), Err(GcaError::UnsupportedCombination(_))));
    }

    #[test]
    fn post_surjectivity_examples() {
        let u = GroupUniverse::free_abelian(1);
        let shift = CellularAutomaton::shift(&u, Alphabet::cyclic(3).unwrap(), z(1)).unwrap();
        let v = post_surjectivity(&shift, 0, 3, &lim()).unwrap();
        assert_eq!((v.status, v.radius), (Status::CertifiedYes, Some(1)));
        let v = post_surjectivity(&xor(), 0, 3, &lim()).unwrap();
        assert!(v.is_no());
        assert!(matches!(v.witness, Some(Witness::ScalarOracle { .. })));
        let v = post_surjectivity(&i_plus_xn(), 0, 3, &lim()).unwrap();
        assert_eq!((v.status, v.radius), (Status::CertifiedYes, Some(1)));
        let v = post_surjectivity(&c2_sum(), 0, 3, &lim()).unwrap();
        assert!(v.is_no());
        let plain = CellularAutomaton::new(u.clone(), LocalRule::table(&u, Alphabet::plain(2).unwrap(), zset(&[0]), vec![1, 0]).unwrap()).unwrap();
        assert_eq!(post_surjectivity(&plain, 0, 1, &lim()), Err(GcaError::NotAGroupOrLinearCA));
    }

    #[test]
    fn sweep_examples() {
        let c3 = GroupUniverse::cyclic(3).unwrap();
        let a = Alphabet::cyclic(2).unwrap();
        let mem = FiniteSubset::new([GroupElement::Index(0), GroupElement::Index(1)]);
        let c = surjunctivity_sweep(&c3, &a, &mem, 1000, &lim()).unwrap();
        assert_eq!((c.rules, c.injective, c.surjective_among_injective, c.violations.len()), (4, 2, 2, 0));
        let c2 = GroupUniverse::cyclic(2).unwrap();
        let c = surjunctivity_sweep(&c2, &a, &FiniteSubset::new([GroupElement::Index(0)]), 1000, &lim()).unwrap();
        assert_eq!((c.rules, c.injective, c.surjective_among_injective), (2, 1, 1));
        let s3 = GroupUniverse::symmetric(3).unwrap();
        let t = s3.generators()[0].clone();
        let c = surjunctivity_sweep(&s3, &a, &FiniteSubset::new([s3.identity(), t]), 1000, &lim()).unwrap();
        assert!(c.violations.is_empty() && c.injective > 0);
        let z1 = GroupUniverse::free_abelian(1);
        let c = surjunctivity_sweep(&z1, &Alphabet::group(Preset::Symmetric(3)).unwrap(), &zset(&[0, 1]), 1000, &lim()).unwrap();
        assert!(c.violations.is_empty() && c.unresolved == 0);
    }

    proptest! {
        #[test]
        fn v_samples_lie_in_v_n(seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)], n in 1usize..3, lo in -2i64..1) {
            let u = GroupUniverse::free_abelian(1);
            let rule = random_linear_rule(&u, p, n, &zset(&[lo, lo + 1, lo + 2]), seed).unwrap();
            let ca = CellularAutomaton::new(u.clone(), rule).unwrap();
            let r = kernel_window(&ca, 1, &lim()).unwrap();
            if let Some(s) = r.sample {
                let window = u.ball(ca.memory_radius() + 1);
                let map = ca.window_map(&window).unwrap();
                prop_assert!(map.eval(&s.values).iter().all(|&a| a == 0));
                prop_assert!(s.get(&u.identity()) != Some(0));
                // no smaller element of V_n: compare with brute force when small
                if map.input_count() <= 1 << 16 {
                    let k = ca.alphabet().size();
                    let one = map.source().index_of(&u.identity()).unwrap();
                    let least = (0..map.input_count() as usize)
                        .map(|i| decode_pattern(k, i, map.source().len()))
                        .find(|x| x[one] != 0 && map.eval(x).iter().all(|&a| a == 0));
                    prop_assert_eq!(least, Some(s.values));
                }
            }
        }

        #[test]
        fn group_and_linear_searches_agree(seed in any::<u64>()) {
            // the same rule over F_3 seen as linear and as a group rule on Z/3
            let u = GroupUniverse::free_abelian(1);
            let mem = zset(&[-1, 0, 1]);
            let rule = random_linear_rule(&u, 3, 1, &mem, seed).unwrap();
            let lin = CellularAutomaton::new(u.clone(), rule.clone()).unwrap();
            let tables: Vec<Vec<usize>> = match rule.body() {
                crate::alphabets::RuleBody::Linear(ms) => ms.iter().map(|m| (0..3).map(|a| (m.get(0, 0) as usize * a) % 3).collect()).collect(),
                _ => unreachable!(),
            };
            let hom = CellularAutomaton::new(u.clone(), LocalRule::hom(&u, Alphabet::cyclic(3).unwrap(), mem, tables).unwrap()).unwrap();
            for n in 0..3 {
                let a = kernel_window(&lin, n, &lim()).unwrap();
                let b = kernel_window(&hom, n, &lim()).unwrap();
                prop_assert_eq!(a, b);
            }
            let a = post_surjectivity(&lin, 0, 2, &lim()).unwrap();
            let b = post_surjectivity(&hom, 0, 2, &lim()).unwrap();
            if let (Some(Witness::Preimages { preimages: pa, .. }), Some(Witness::Preimages { preimages: pb, .. })) = (&a.witness, &b.witness) {
                prop_assert_eq!(&pa[0], &pb[0]);
            }
        }
    }
}
