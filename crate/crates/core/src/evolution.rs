//! Polynomial WIDTIO insertion and deletion.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Atom, KnowledgeBase, ModelError, TBox};
use crate::reasoner::{ClosedAtomSet, Reasoner, ViolationSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvolutionError {
    #[error("the input knowledge base is unsatisfiable")]
    UnsatisfiableKb,
    #[error("the facts are unsatisfiable with the TBox")]
    UnsatisfiableFacts,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolutionResult {
    /// The resulting KB; its ABox is closed under the TBox.
    pub kb: KnowledgeBase,
    /// Atoms of the input closure missing from the result.
    pub dropped: BTreeSet<Atom>,
    /// Atoms of the result missing from the input closure.
    pub added: BTreeSet<Atom>,
    /// The closure did not change.
    pub no_op: bool,
    /// Violation sets that removed at least one atom (insertion only).
    pub fired_violations: Vec<ViolationSet>,
}

impl EvolutionResult {
    pub(crate) fn from_closures(
        kb: &KnowledgeBase,
        before: &BTreeSet<Atom>,
        after: BTreeSet<Atom>,
        fired_violations: Vec<ViolationSet>,
    ) -> Result<EvolutionResult, EvolutionError> {
        let dropped: BTreeSet<Atom> = before.difference(&after).cloned().collect();
        let added: BTreeSet<Atom> = after.difference(before).cloned().collect();
        Ok(EvolutionResult {
            no_op: dropped.is_empty() && added.is_empty(),
            kb: kb.with_abox(after)?,
            dropped,
            added,
            fired_violations,
        })
    }

    pub fn closure(&self) -> &BTreeSet<Atom> {
        self.kb.abox()
    }
}

/// Whether `candidate` is satisfiable and entails every atom of `facts`.
pub fn accomplishes_insertion(tbox: &TBox, candidate: &BTreeSet<Atom>, facts: &[Atom]) -> bool {
    let r = Reasoner::new(tbox);
    if !r.is_satisfiable(candidate) {
        return false;
    }
    let cl = r.closure(candidate);
    facts.iter().all(|f| cl.contains(f))
}

/// Whether `candidate` is satisfiable and misses at least one atom of
/// `facts`.
pub fn accomplishes_deletion(tbox: &TBox, candidate: &BTreeSet<Atom>, facts: &[Atom]) -> bool {
    let r = Reasoner::new(tbox);
    if !r.is_satisfiable(candidate) {
        return false;
    }
    let cl = r.closure(candidate);
    facts.iter().any(|f| !cl.contains(f))
}

fn check_inputs(kb: &KnowledgeBase, facts: &[Atom]) -> Result<(), EvolutionError> {
    for f in facts {
        kb.signature().check_atom(f)?;
    }
    Ok(())
}

/// Deduplicates, keeps the least member of each class of mutually
/// entailing facts, then drops facts entailed by another remaining fact.
pub fn reduce_deleted_facts(r: &Reasoner<'_>, facts: &[Atom]) -> BTreeSet<Atom> {
    let facts: BTreeSet<&Atom> = facts.iter().collect();
    let derived: Vec<(&Atom, BTreeSet<Atom>)> = facts.iter().map(|f| (*f, r.derive(f))).collect();
    let entails = |i: usize, j: usize| derived[i].1.contains(derived[j].0);
    let n = derived.len();
    let mut canonical = Vec::new();
    for i in 0..n {
        // BTreeSet order: an equivalent earlier fact is the representative
        let shadowed = (0..i).any(|j| entails(i, j) && entails(j, i));
        if !shadowed {
            canonical.push(i);
        }
    }
    canonical
        .iter()
        .filter(|&&i| !canonical.iter().any(|&j| j != i && entails(j, i)))
        .map(|&i| derived[i].0.clone())
        .collect()
}

/// `K ⊖ F`: the input closure minus, for every remaining fact, the atoms
/// that entail it on their own.
pub fn compute_deletion(kb: &KnowledgeBase, facts: &[Atom]) -> Result<EvolutionResult, EvolutionError> {
    check_inputs(kb, facts)?;
    let r = Reasoner::new(kb.tbox());
    if !r.is_satisfiable(kb.abox()) {
        return Err(EvolutionError::UnsatisfiableKb);
    }
    if !r.is_satisfiable(facts) {
        return Err(EvolutionError::UnsatisfiableFacts);
    }
    let before = r.closure(kb.abox());
    if facts.is_empty() || facts.iter().any(|f| !before.contains(f)) {
        let atoms = before.atoms().clone();
        return EvolutionResult::from_closures(kb, &atoms, atoms.clone(), Vec::new());
    }
    let mut removed = BTreeSet::new();
    for f in reduce_deleted_facts(&r, facts) {
        removed.extend(r.subsumee(&before, &f));
    }
    let after = before.atoms().difference(&removed).cloned().collect();
    EvolutionResult::from_closures(kb, before.atoms(), after, Vec::new())
}

/// Atoms of `before` that some violation set of `before ∪ cl(F)` makes
/// incompatible with `facts`, together with the violation sets involved.
pub fn conflicting_atoms(
    r: &Reasoner<'_>,
    before: &ClosedAtomSet,
    facts: &[Atom],
) -> (BTreeSet<Atom>, Vec<ViolationSet>) {
    let new = r.closure(facts);
    let union: BTreeSet<&Atom> = before.atoms().iter().chain(new.atoms()).collect();
    let mut conflicting = BTreeSet::new();
    let mut fired = Vec::new();
    for v in r.violation_sets(union.iter().copied()) {
        let mut hit = false;
        for alpha in v.atoms.iter().filter(|a| !new.contains(a)) {
            let rest = facts.iter().chain(v.atoms.iter().filter(|b| *b != alpha));
            if r.is_satisfiable(rest) {
                conflicting.insert(alpha.clone());
                hit = true;
            }
        }
        if hit {
            fired.push(v);
        }
    }
    (conflicting, fired)
}

/// `K ⊕ F`: the facts together with every atom of the input closure that
/// no violation set makes incompatible with them.
pub fn compute_insertion(kb: &KnowledgeBase, facts: &[Atom]) -> Result<EvolutionResult, EvolutionError> {
    check_inputs(kb, facts)?;
    let r = Reasoner::new(kb.tbox());
    if !r.is_satisfiable(kb.abox()) {
        return Err(EvolutionError::UnsatisfiableKb);
    }
    let before = r.closure(kb.abox());
    if !r.is_satisfiable(facts) {
        let atoms = before.atoms().clone();
        return EvolutionResult::from_closures(kb, &atoms, atoms.clone(), Vec::new());
    }
    let (conflicting, fired) = conflicting_atoms(&r, &before, facts);
    let kept = before.atoms().iter().filter(|a| !conflicting.contains(a));
    let after = r.closure(kept.chain(facts)).into_atoms();
    EvolutionResult::from_closures(kb, before.atoms(), after, fired)
}
