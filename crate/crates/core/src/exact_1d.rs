//! Exact injectivity and surjectivity for automata on `Z` via de Bruijn
//! graphs.
//!
//! The rule is cut down to the span of positions it really reads, giving a
//! block map `f : A^L → A`. Nodes are words of length `L - 1` and each word
//! of length `L` is an edge labelled by its image.
//!
//! Two bi-infinite sequences with the same image are a bi-infinite path in
//! the pair graph, so the automaton is injective iff no off-diagonal pair
//! survives trimming of sources and sinks. Surjectivity is pre-injectivity
//! on `Z`, which fails iff some path leaves the diagonal and comes back.
//!
//! Additive rules (group or linear) use the kernel graph instead: pairs are
//! replaced by their difference, so only edges with image `e` are kept and
//! the diagonal becomes the all-`e` word.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::alphabets::{decode_pattern, pow_count, Letter};
use crate::ca::{CaClass, CellularAutomaton};
use crate::error::{GcaError, Result};
use crate::groups::GroupUniverse;

/// Largest pair graph built for non-additive rules.
pub const PAIR_CAP: u128 = 1 << 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exact1dReport {
    pub injective: bool,
    pub surjective: bool,
}

/// The rule as a block map on `span` consecutive cells.
struct BlockMap {
    k: usize,
    span: usize,
    /// `out[w]` for every word `w` of length `span`, MSB first.
    out: Vec<Letter>,
}

impl BlockMap {
    fn from_ca(ca: &CellularAutomaton, cap: u128) -> Result<BlockMap> {
        let rule = ca.rule();
        let k = ca.alphabet().size();
        let offsets: Vec<i64> = ca.memory().iter().map(|g| g.vector().expect("Z element")[0]).collect();
        let m = offsets.len();
        if rule.pattern_count() > cap {
            return Err(GcaError::CapExceeded { size: rule.pattern_count(), cap });
        }
        // positions the rule actually reads
        let table: Vec<Letter> = (0..rule.pattern_count() as usize)
            .map(|i| rule.eval(&decode_pattern(k, i, m)))
            .collect();
        let stride = |j: usize| pow_count(k, m - 1 - j) as usize;
        let relevant: Vec<bool> = (0..m)
            .map(|j| {
                let s = stride(j);
                (0..table.len()).any(|i| {
                    let digit = (i / s) % k;
                    digit + 1 < k && table[i] != table[i + s]
                })
            })
            .collect();
        let used: Vec<i64> = (0..m).filter(|&j| relevant[j]).map(|j| offsets[j]).collect();
        let lo = used.iter().copied().min().unwrap_or(0);
        let hi = used.iter().copied().max().unwrap_or(0);
        let span = ((hi - lo + 1) as usize).max(2);
        let words = pow_count(k, span);
        if words > cap {
            return Err(GcaError::CapExceeded { size: words, cap });
        }
        let mut x = vec![0; m];
        let out = (0..words as usize)
            .map(|w| {
                let letters = decode_pattern(k, w, span);
                for (j, slot) in x.iter_mut().enumerate() {
                    let pos = offsets[j] - lo;
                    *slot = if relevant[j] && pos >= 0 && (pos as usize) < span { letters[pos as usize] } else { 0 };
                }
                rule.eval(&x)
            })
            .collect();
        Ok(BlockMap { k, span, out })
    }

    fn nodes(&self) -> usize {
        pow_count(self.k, self.span - 1) as usize
    }
}

pub fn exact_1d(ca: &CellularAutomaton, cap: u128) -> Result<Exact1dReport> {
    if ca.universe() != &GroupUniverse::free_abelian(1) {
        return Err(GcaError::UnsupportedUniverse("exact_1d needs Z".into()));
    }
    let map = BlockMap::from_ca(ca, cap)?;
    if ca.classify()? != CaClass::Plain {
        Ok(kernel_graph(&map, ca.alphabet().neutral()))
    } else {
        pair_graph(&map)
    }
}

/// Only meaningful for rules that are homomorphisms of the full shift.
fn kernel_graph(map: &BlockMap, e: Letter) -> Exact1dReport {
    let (k, nodes) = (map.k, map.nodes());
    let zero = (0..map.span - 1).fold(0, |acc, _| acc * k + e);
    let succ = |u: usize| (0..k).filter(move |&a| map.out[u * k + a] == e).map(move |a| (u * k + a) % nodes);
    let pred = |v: usize| (0..k).filter(move |&a| map.out[a * nodes + v] == e).map(move |a| (a * nodes + v) / k);

    let mut out_deg: Vec<u32> = (0..nodes).map(|u| succ(u).count() as u32).collect();
    let mut in_deg: Vec<u32> = (0..nodes).map(|v| pred(v).count() as u32).collect();
    let mut alive = vec![true; nodes];
    let mut queue: VecDeque<usize> = (0..nodes).filter(|&u| out_deg[u] == 0 || in_deg[u] == 0).collect();
    while let Some(u) = queue.pop_front() {
        if !alive[u] {
            continue;
        }
        alive[u] = false;
        for v in succ(u) {
            in_deg[v] -= 1;
            if alive[v] && in_deg[v] == 0 {
                queue.push_back(v);
            }
        }
        for v in pred(u) {
            out_deg[v] -= 1;
            if alive[v] && out_deg[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    let injective = (0..nodes).all(|u| u == zero || !alive[u]);

    let mut seen = vec![false; nodes];
    let mut queue: VecDeque<usize> = succ(zero).filter(|&v| v != zero).collect();
    for &v in &queue {
        seen[v] = true;
    }
    let mut surjective = true;
    while let Some(u) = queue.pop_front() {
        for v in succ(u) {
            if v == zero {
                surjective = false;
                break;
            }
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        if !surjective {
            break;
        }
    }
    Exact1dReport { injective, surjective }
}

fn pair_graph(map: &BlockMap) -> Result<Exact1dReport> {
    let (k, nodes) = (map.k, map.nodes());
    let pairs = (nodes as u128) * (nodes as u128);
    if pairs > PAIR_CAP {
        return Err(GcaError::CapExceeded { size: pairs, cap: PAIR_CAP });
    }
    // letters a with f(u a) = o, and with f(a u) = o
    let group = |word: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<Vec<u8>>> {
        (0..nodes)
            .map(|u| {
                let mut by_out = vec![Vec::new(); k];
                for a in 0..k {
                    by_out[map.out[word(u, a)]].push(a as u8);
                }
                by_out
            })
            .collect()
    };
    let fwd = group(&|u, a| u * k + a);
    let bwd = group(&|u, a| a * nodes + u);
    let next = |u: usize, a: u8| (u * k + a as usize) % nodes;
    let prev = |u: usize, a: u8| (a as usize * nodes + u) / k;

    let for_succ = |i: usize, f: &mut dyn FnMut(usize)| {
        let (u1, u2) = (i / nodes, i % nodes);
        for (l1, l2) in fwd[u1].iter().zip(&fwd[u2]) {
            for &a in l1 {
                for &b in l2 {
                    f(next(u1, a) * nodes + next(u2, b));
                }
            }
        }
    };
    let for_pred = |i: usize, f: &mut dyn FnMut(usize)| {
        let (u1, u2) = (i / nodes, i % nodes);
        for (l1, l2) in bwd[u1].iter().zip(&bwd[u2]) {
            for &a in l1 {
                for &b in l2 {
                    f(prev(u1, a) * nodes + prev(u2, b));
                }
            }
        }
    };
    let degree = |lists: &Vec<Vec<Vec<u8>>>, i: usize| -> u16 {
        let (u1, u2) = (i / nodes, i % nodes);
        lists[u1].iter().zip(&lists[u2]).map(|(a, b)| (a.len() * b.len()) as u16).sum()
    };
    let total = nodes * nodes;
    let mut out_deg: Vec<u16> = (0..total).map(|i| degree(&fwd, i)).collect();
    let mut in_deg: Vec<u16> = (0..total).map(|i| degree(&bwd, i)).collect();
    let mut alive = vec![true; total];
    let mut stack: Vec<usize> = (0..total).filter(|&i| out_deg[i] == 0 || in_deg[i] == 0).collect();
    while let Some(i) = stack.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for_succ(i, &mut |j| {
            in_deg[j] -= 1;
            if alive[j] && in_deg[j] == 0 {
                stack.push(j);
            }
        });
        for_pred(i, &mut |j| {
            out_deg[j] -= 1;
            if alive[j] && out_deg[j] == 0 {
                stack.push(j);
            }
        });
    }
    let injective = (0..total).all(|i| i / nodes == i % nodes || !alive[i]);

    let diagonal = |i: usize| i / nodes == i % nodes;
    let mut seen = vec![false; total];
    let mut stack = Vec::new();
    for u in 0..nodes {
        for_succ(u * nodes + u, &mut |j| {
            if !diagonal(j) && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        });
    }
    let mut surjective = true;
    while let Some(i) = stack.pop() {
        for_succ(i, &mut |j| {
            if diagonal(j) {
                surjective = false;
            } else if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        });
        if !surjective {
            break;
        }
    }
    Ok(Exact1dReport { injective, surjective })
}

/// The pair-graph answer even for additive rules; used to cross-check the
/// kernel graph.
pub fn exact_1d_pairs(ca: &CellularAutomaton, cap: u128) -> Result<Exact1dReport> {
    if ca.universe() != &GroupUniverse::free_abelian(1) {
        return Err(GcaError::UnsupportedUniverse("exact_1d needs Z".into()));
    }
    pair_graph(&BlockMap::from_ca(ca, cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabets::{random_linear_rule, Alphabet, LocalRule, TABLE_CAP};
    use crate::fp::FpMatrix;
    use crate::groups::{FiniteSubset, GroupElement};
    use proptest::prelude::*;

    fn z(v: i64) -> GroupElement {
        GroupElement::Vector(vec![v])
    }
    fn zset(vs: &[i64]) -> FiniteSubset {
        FiniteSubset::new(vs.iter().map(|&v| z(v)))
    }
    fn both(ca: &CellularAutomaton) -> Exact1dReport {
        let a = exact_1d(ca, TABLE_CAP).unwrap();
        assert_eq!(a, exact_1d_pairs(ca, TABLE_CAP).unwrap());
        a
    }

    #[test]
    fn examples() {
        let u = GroupUniverse::free_abelian(1);
        let f2 = Alphabet::vector(2, 1).unwrap();
        let id = CellularAutomaton::identity(&u, f2.clone()).unwrap();
        assert_eq!(both(&id), Exact1dReport { injective: true, surjective: true });
        let one = FpMatrix::identity(2, 1);
        let rule90 = LocalRule::linear(&u, f2.clone(), zset(&[-1, 1]), vec![one.clone(), one.clone()]).unwrap();
        let ca = CellularAutomaton::new(u.clone(), rule90).unwrap();
        assert_eq!(both(&ca), Exact1dReport { injective: false, surjective: true });
        let xor = LocalRule::linear(&u, f2.clone(), zset(&[0, 1]), vec![one.clone(), one]).unwrap();
        let ca = CellularAutomaton::new(u.clone(), xor).unwrap();
        assert_eq!(both(&ca), Exact1dReport { injective: false, surjective: true });
        let zero = LocalRule::linear(&u, f2, zset(&[0]), vec![FpMatrix::zeros(2, 1, 1)]).unwrap();
        let ca = CellularAutomaton::new(u.clone(), zero).unwrap();
        assert_eq!(both(&ca), Exact1dReport { injective: false, surjective: false });
        // majority is neither
        let plain = Alphabet::plain(2).unwrap();
        let table = (0..8).map(|i: usize| usize::from(i.count_ones() >= 2)).collect();
        let ca = CellularAutomaton::new(u.clone(), LocalRule::table(&u, plain.clone(), zset(&[-1, 0, 1]), table).unwrap()).unwrap();
        assert_eq!(both(&ca), Exact1dReport { injective: false, surjective: false });
        let shift = CellularAutomaton::shift(&u, plain, z(2)).unwrap();
        assert_eq!(both(&shift), Exact1dReport { injective: true, surjective: true });
    }

    #[test]
    fn rejects_other_universes() {
        let u = GroupUniverse::free_abelian(2);
        let ca = CellularAutomaton::identity(&u, Alphabet::plain(2).unwrap()).unwrap();
        assert!(matches!(exact_1d(&ca, TABLE_CAP), Err(GcaError::UnsupportedUniverse(_))));
    }

    /// Periodic brute force: a collision among `L`-periodic configurations
    /// refutes injectivity, and a non-surjective periodic action refutes
    /// nothing, but injectivity on `Z` forces injectivity on every period.
    fn periodic_injective(ca: &CellularAutomaton, period: i64) -> bool {
        let q = ca.periodic_action(&[vec![period]]).unwrap().quotient;
        let k = ca.alphabet().size();
        let count = pow_count(k, period as usize) as usize;
        let mut seen = std::collections::HashSet::new();
        (0..count).all(|i| seen.insert(q.apply_finite(&decode_pattern(k, i, period as usize)).unwrap()))
    }

    proptest! {
        #[test]
        fn additive_and_pair_graphs_agree(seed in any::<u64>(), p in prop_oneof![Just(2u32), Just(3)], lo in -1i64..1, width in 1i64..3) {
            let u = GroupUniverse::free_abelian(1);
            let mem = zset(&(lo..=lo + width).collect::<Vec<_>>());
            let rule = random_linear_rule(&u, p, 1, &mem, seed).unwrap();
            let ca = CellularAutomaton::new(u, rule).unwrap();
            let r = both(&ca);
            if r.injective {
                for period in 1..6 {
                    prop_assert!(periodic_injective(&ca, period));
                }
            }
        }

        #[test]
        fn plain_rules_agree_with_periodic_collisions(seed in any::<u64>()) {
            let u = GroupUniverse::free_abelian(1);
            let plain = Alphabet::plain(2).unwrap();
            let table = (0..8).map(|i| ((seed >> i) & 1) as usize).collect();
            let ca = CellularAutomaton::new(u.clone(), LocalRule::table(&u, plain, zset(&[-1, 0, 1]), table).unwrap()).unwrap();
            let r = exact_1d(&ca, TABLE_CAP).unwrap();
            if r.injective {
                prop_assert!(r.surjective);
                for period in 1..7 {
                    prop_assert!(periodic_injective(&ca, period));
                }
            }
        }
    }
}
