//! Certificate replay: checks a verdict's witness against its subject.
//!
//! Replay evaluates the automaton on the recorded patterns, recomputes the
//! recorded linear algebra, or reruns a deterministic exhaustive check; it
//! never searches for a witness.

use crate::alphabets::{pow_count, Alphabet};
use crate::ca::{CaClass, CellularAutomaton};
use crate::deciders::{
    direct_finiteness_check, injectivity_finite, is_deviation, kernel_window, pattern_coords, sweep_verdict, Limits,
};
use crate::error::{GcaError, Result};
use crate::exact_1d::exact_1d;
use crate::group_ring::GroupRingMatrix;
use crate::groups::{FiniteSubset, GroupUniverse};
use crate::records::RingRecord;
use crate::verdict::{Status, Verdict, Witness};

/// What a verdict is about.
#[derive(Clone, Debug)]
pub enum Subject {
    Automaton(CellularAutomaton),
    /// `σ` and `τ` of a direct finiteness check.
    Pair { sigma: CellularAutomaton, tau: CellularAutomaton },
    Ring(GroupRingMatrix),
    Sweep { universe: GroupUniverse, alphabet: Alphabet, memory: FiniteSubset, budget: u128 },
}

impl Subject {
    fn automaton(&self) -> Result<&CellularAutomaton> {
        match self {
            Subject::Automaton(ca) => Ok(ca),
            _ => Err(GcaError::Config("witness needs an automaton".into())),
        }
    }
    fn ring(&self) -> Result<&GroupRingMatrix> {
        match self {
            Subject::Ring(a) => Ok(a),
            _ => Err(GcaError::Config("witness needs a group ring element".into())),
        }
    }
}

/// `true` iff the witness confirms the recorded status. Verdicts without a
/// witness certify nothing and replay trivially.
pub fn replay(subject: &Subject, verdict: &Verdict, limits: &Limits) -> Result<bool> {
    let status = verdict.status;
    let Some(witness) = &verdict.witness else {
        return Ok(status == Status::Unknown);
    };
    match witness {
        Witness::EmptyKernelWindow { n } => {
            let ca = subject.automaton()?;
            Ok(status == Status::CertifiedYes && kernel_window(ca, *n, limits)?.empty)
        }
        Witness::CollidingPair { lattice, left, right } => {
            let ca = subject.automaton()?;
            let target = match lattice {
                Some(basis) => {
                    let action = ca.periodic_action(basis)?;
                    if &action.basis != basis {
                        return Ok(false);
                    }
                    action.quotient
                }
                None => ca.clone(),
            };
            Ok(status == Status::CertifiedNo
                && left != right
                && target.apply_finite(left)? == target.apply_finite(right)?)
        }
        Witness::FiniteKernel { pattern } => {
            let ca = subject.automaton()?;
            let pattern = pattern.build()?;
            let e = ca.alphabet().neutral();
            let image = ca.apply_pattern(&pattern)?;
            Ok(status == Status::CertifiedNo
                && ca.classify()? != CaClass::Plain
                && pattern.values.iter().any(|&a| a != e)
                && image.values.iter().all(|&a| a == e))
        }
        Witness::Orphan { pattern, annihilator } => {
            let ca = subject.automaton()?;
            let pattern = pattern.build()?;
            if status != Status::CertifiedNo {
                return Ok(false);
            }
            let (class, sca) = ca.structured()?;
            if verdict.decider == "post-surjective" && !ca.universe().is_finite() {
                return Ok(false);
            }
            let map = sca.window_map(&pattern.window)?;
            match (annihilator, map.matrix()) {
                (Some(y), Some(t)) if class == CaClass::Linear => {
                    let p = t.p() as u64;
                    let yt = t.transpose().mul_vec(y);
                    let x = pattern_coords(ca.alphabet(), &pattern.values);
                    let pairing = y.iter().zip(&x).map(|(a, b)| *a as u64 * *b as u64).sum::<u64>() % p;
                    Ok(yt.iter().all(|&c| c == 0) && pairing != 0)
                }
                _ => {
                    let size = ca.alphabet().size();
                    let target = crate::alphabets::encode_pattern(size, &pattern.values);
                    Ok(!map.dense_table(limits.cap)?.contains(&target))
                }
            }
        }
        Witness::WindowConsistent { window } => {
            let ca = subject.automaton()?;
            let window = FiniteSubset::new(window.iter().cloned());
            if status == Status::CertifiedYes {
                let full = FiniteSubset::new(ca.universe().enumerate()?);
                if window != full {
                    return Ok(false);
                }
            } else if status == Status::CertifiedNo {
                return Ok(false);
            }
            let (class, sca) = ca.structured()?;
            let map = sca.window_map(&window)?;
            if class == CaClass::Linear {
                let t = map.matrix().expect("linear");
                return Ok(t.rank() == t.rows());
            }
            let mut hit = vec![false; map.output_count() as usize];
            for o in map.dense_table(limits.cap)? {
                hit[o] = true;
            }
            Ok(hit.into_iter().all(|h| h))
        }
        Witness::Exhaustive { property, checked } => {
            let ca = subject.automaton()?;
            let order = ca.universe().order().ok_or(GcaError::InfiniteUniverse)?;
            if property != "injective" || *checked != pow_count(ca.alphabet().size(), order) {
                return Ok(false);
            }
            Ok(status == Status::CertifiedYes && injectivity_finite(ca, limits)?.is_yes())
        }
        Witness::InverseRule { radius, rule } => {
            let ca = subject.automaton()?;
            let u = ca.universe();
            let sigma = CellularAutomaton::new(u.clone(), rule.build(u, ca.alphabet())?)?;
            if !sigma.memory().is_subset(&u.ball(*radius)) {
                return Ok(false);
            }
            match direct_finiteness_check(&sigma, ca) {
                Ok(v) => Ok(status == Status::CertifiedYes && v.is_yes()),
                Err(GcaError::PreconditionFailed(_)) => Ok(false),
                Err(err) => Err(err),
            }
        }
        Witness::Preimages { letters, preimages } => {
            let ca = subject.automaton()?;
            let u = ca.universe();
            let (class, _) = ca.require_algebraic()?;
            let e = ca.alphabet().neutral();
            let expected: Vec<usize> = match (class, ca.alphabet().field()) {
                (CaClass::Linear, Some((p, n))) => (0..n).map(|k| (p as usize).pow((n - 1 - k) as u32)).collect(),
                _ => (0..ca.alphabet().size()).filter(|&a| a != e).collect(),
            };
            if status != Status::CertifiedYes || letters != &expected || preimages.len() != letters.len() {
                return Ok(false);
            }
            let ball = u.ball(verdict.radius.unwrap_or(0));
            for (&a, w) in letters.iter().zip(preimages) {
                let w = w.build()?;
                if !w.window.is_subset(&ball) || !is_deviation(u, e, &ca.apply_pattern(&w)?, a) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Witness::ScalarOracle { polynomial, claim } => {
            let ca = subject.automaton()?;
            if !matches!(ca.universe(), GroupUniverse::FreeAbelian { .. }) || ca.alphabet().field().map(|f| f.1) != Some(1) {
                return Ok(false);
            }
            let (class, sca) = ca.structured()?;
            if class != CaClass::Linear {
                return Ok(false);
            }
            let poly = GroupRingMatrix::phi_inv(&sca)?;
            if &poly.to_record() != polynomial {
                return Ok(false);
            }
            Ok(match claim.as_str() {
                "nonzero" => status == Status::CertifiedYes && !poly.is_zero(),
                "not a monomial" => status == Status::CertifiedNo && poly.support().len() != 1,
                _ => false,
            })
        }
        Witness::Exact1d { injective, surjective } => {
            let ca = subject.automaton()?;
            let r = exact_1d(ca, limits.cap)?;
            if (r.injective, r.surjective) != (*injective, *surjective) {
                return Ok(false);
            }
            let claimed = match verdict.decider.as_str() {
                "check-injective" => r.injective,
                "check-surjective" => r.surjective,
                _ => true,
            };
            Ok(status == if claimed { Status::CertifiedYes } else { Status::CertifiedNo })
        }
        Witness::SweepReport { .. } => {
            let Subject::Sweep { universe, alphabet, memory, budget } = subject else {
                return Err(GcaError::Config("witness needs a sweep subject".into()));
            };
            let again = sweep_verdict(universe, alphabet, memory, *budget, limits)?;
            Ok(again.status == status && again.witness.as_ref() == Some(witness))
        }
        Witness::DirectFiniteness { .. } => {
            let Subject::Pair { sigma, tau } = subject else {
                return Err(GcaError::Config("witness needs a pair of automata".into()));
            };
            let again = match direct_finiteness_check(sigma, tau) {
                Ok(v) => v,
                Err(GcaError::PreconditionFailed(_)) => return Ok(false),
                Err(err) => return Err(err),
            };
            Ok(again.status == status && again.witness.as_ref() == Some(witness))
        }
        Witness::LeftInverse { beta } => {
            let alpha = subject.ring()?;
            let beta = GroupRingMatrix::from_record(alpha.universe(), beta)?;
            Ok(status == Status::CertifiedYes && beta.mul(alpha)?.is_unit())
        }
        Witness::RingDefect { defect } => {
            let alpha = subject.ring()?;
            let Some(beta) = verdict.parameters.get("beta") else {
                return Ok(false);
            };
            let beta: RingRecord = serde_json::from_value(beta.clone()).map_err(|e| GcaError::Config(e.to_string()))?;
            let beta = GroupRingMatrix::from_record(alpha.universe(), &beta)?;
            if !beta.mul(alpha)?.is_unit() {
                return Ok(false);
            }
            let unit = GroupRingMatrix::unit(alpha.universe(), alpha.p(), alpha.n())?;
            let d = alpha.mul(&beta)?.sub(&unit)?;
            let expected = if d.is_zero() { Status::CertifiedYes } else { Status::CertifiedNo };
            Ok(&d.to_record() == defect && status == expected)
        }
        Witness::SingularRegularRepresentation { size, rank } => {
            let alpha = subject.ring()?;
            let m = alpha.regular_representation()?;
            Ok(status == Status::CertifiedNo && m.rows() == *size && m.rank() == *rank && rank < size)
        }
        Witness::PhiRule { rule } => {
            let alpha = subject.ring()?;
            let ca = alpha.phi()?;
            Ok(status == Status::CertifiedYes && &crate::records::RuleRecord::from_rule(ca.rule()) == rule)
        }
    }
}
