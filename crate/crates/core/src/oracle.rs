//! Exhaustive reference implementation of WIDTIO evolution.
//!
//! Deliberately shares nothing with [`crate::reasoner`]: closure comes from
//! a naive chase that materializes anonymous witnesses, and satisfiability
//! is checked on the chased structure. Candidate results are enumerated
//! as closed subsets of the input closure, so the cost is exponential and
//! guarded by an atom-count bound.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::evolution::{EvolutionError, EvolutionResult};
use crate::model::{
    Atom, BasicConcept, Datatype, Identification, KnowledgeBase, Path, PathStep, RoleExpr, TBox,
    TBoxAssertion, TypedValue,
};

pub const DEFAULT_BOUND: usize = 20;
const MAX_BOUND: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{atoms} atoms exceed the oracle bound of {bound}")]
    BoundExceeded { atoms: usize, bound: usize },
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeKind {
    Insertion,
    Deletion,
}

/// One minimal way of accomplishing a change, as a closed ABox.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalSet {
    pub closed_abox: BTreeSet<Atom>,
    pub kind: ChangeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Term {
    Named(String),
    Anon(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Value {
    Const(TypedValue),
    Anon(String),
}

/// A chased structure over named and anonymous terms.
///
/// Every anonymous witness is a fresh child of the term that needs it, so
/// the structure is a forest below the named individuals. A witness is
/// determined up to isomorphism by the existential that created it; only
/// the first witness of each kind gets children of its own, which keeps
/// the forest finite while still containing every kind of witness.
#[derive(Debug, Default, Clone)]
struct Chase {
    concepts: HashSet<(String, Term)>,
    roles: HashSet<(String, Term, Term)>,
    attributes: HashSet<(String, Term, Value)>,
    kind_of: HashMap<String, String>,
    expanded: HashMap<String, String>,
}

impl Chase {
    fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Chase {
        let mut c = Chase::default();
        for a in atoms {
            match a {
                Atom::Concept {
                    concept,
                    individual,
                } => {
                    c.concepts.insert((concept.clone(), Term::Named(individual.clone())));
                }
                Atom::Role {
                    role,
                    subject,
                    object,
                } => {
                    c.roles.insert((
                        role.clone(),
                        Term::Named(subject.clone()),
                        Term::Named(object.clone()),
                    ));
                }
                Atom::Attribute {
                    attribute,
                    subject,
                    value,
                } => {
                    c.attributes.insert((
                        attribute.clone(),
                        Term::Named(subject.clone()),
                        Value::Const(value.clone()),
                    ));
                }
            }
        }
        c
    }

    fn role_pairs(&self, q: &RoleExpr) -> Vec<(Term, Term)> {
        self.roles
            .iter()
            .filter(|(p, _, _)| *p == q.name)
            .map(|(_, s, o)| {
                if q.inverted {
                    (o.clone(), s.clone())
                } else {
                    (s.clone(), o.clone())
                }
            })
            .collect()
    }

    fn attribute_pairs(&self, u: &str) -> Vec<(Term, Value)> {
        self.attributes
            .iter()
            .filter(|(a, _, _)| a == u)
            .map(|(_, s, v)| (s.clone(), v.clone()))
            .collect()
    }

    fn extension(&self, b: &BasicConcept) -> BTreeSet<Term> {
        match b {
            BasicConcept::Atomic(a) => self
                .concepts
                .iter()
                .filter(|(c, _)| c == a)
                .map(|(_, x)| x.clone())
                .collect(),
            BasicConcept::Exists(q) => self.role_pairs(q).into_iter().map(|(x, _)| x).collect(),
            BasicConcept::Domain(u) => self.attribute_pairs(u).into_iter().map(|(x, _)| x).collect(),
        }
    }

    fn may_expand(&mut self, x: &Term) -> bool {
        let Term::Anon(id) = x else { return true };
        let kind = &self.kind_of[id];
        self.expanded.entry(kind.clone()).or_insert_with(|| id.clone()) == id
    }

    fn add_member(&mut self, b: &BasicConcept, x: Term) -> bool {
        let parent = match &x {
            Term::Named(n) => format!("named:{n}"),
            Term::Anon(id) => id.clone(),
        };
        match b {
            BasicConcept::Atomic(a) => self.concepts.insert((a.clone(), x)),
            BasicConcept::Exists(q) => {
                if !self.may_expand(&x) {
                    return false;
                }
                let id = format!("{parent}/{q}");
                self.kind_of.insert(id.clone(), q.to_string());
                let witness = Term::Anon(id);
                if q.inverted {
                    self.roles.insert((q.name.clone(), witness, x))
                } else {
                    self.roles.insert((q.name.clone(), x, witness))
                }
            }
            BasicConcept::Domain(u) => {
                if !self.may_expand(&x) {
                    return false;
                }
                let value = Value::Anon(format!("{parent}/{u}"));
                self.attributes.insert((u.clone(), x, value))
            }
        }
    }

    /// Applies the positive inclusions until nothing changes.
    fn saturate(&mut self, tbox: &TBox) {
        loop {
            let mut changed = false;
            for t in tbox {
                match t {
                    TBoxAssertion::ConceptInclusion {
                        lhs,
                        rhs,
                        negated: false,
                    } => {
                        for x in self.extension(lhs) {
                            changed |= self.add_member(rhs, x);
                        }
                    }
                    TBoxAssertion::RoleInclusion {
                        lhs,
                        rhs,
                        negated: false,
                    } => {
                        for (x, y) in self.role_pairs(lhs) {
                            let fact = if rhs.inverted {
                                (rhs.name.clone(), y, x)
                            } else {
                                (rhs.name.clone(), x, y)
                            };
                            changed |= self.roles.insert(fact);
                        }
                    }
                    TBoxAssertion::AttributeInclusion {
                        lhs,
                        rhs,
                        negated: false,
                    } => {
                        for (x, v) in self.attribute_pairs(lhs) {
                            changed |= self.attributes.insert((rhs.clone(), x, v));
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// The atoms over named individuals and constants.
    fn named_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (a, x) in &self.concepts {
            if let Term::Named(x) = x {
                out.insert(Atom::concept(a.clone(), x.clone()));
            }
        }
        for (p, s, o) in &self.roles {
            if let (Term::Named(s), Term::Named(o)) = (s, o) {
                out.insert(Atom::role(p.clone(), s.clone(), o.clone()));
            }
        }
        for (u, s, v) in &self.attributes {
            if let (Term::Named(s), Value::Const(v)) = (s, v) {
                out.insert(Atom::attribute(u.clone(), s.clone(), v.clone()));
            }
        }
        out
    }

    /// `(from, to)` pairs of a path between named terms and constants.
    fn path_pairs(&self, path: &Path) -> BTreeSet<(Term, Value)> {
        let mut current: Option<BTreeSet<(Term, Value)>> = None;
        for step in path.steps() {
            let rel: BTreeSet<(Term, Value)> = match step {
                PathStep::Role(q) => self
                    .role_pairs(q)
                    .into_iter()
                    .filter(|(x, y)| matches!((x, y), (Term::Named(_), Term::Named(_))))
                    .map(|(x, y)| (x, term_as_value(y)))
                    .collect(),
                PathStep::Attribute(u) => self
                    .attribute_pairs(u)
                    .into_iter()
                    .filter(|(x, v)| matches!((x, v), (Term::Named(_), Value::Const(_))))
                    .collect(),
                PathStep::Test(b) => self
                    .extension(b)
                    .into_iter()
                    .filter(|x| matches!(x, Term::Named(_)))
                    .map(|x| (x.clone(), term_as_value(x)))
                    .collect(),
            };
            current = Some(match current {
                None => rel,
                Some(prev) => prev
                    .iter()
                    .flat_map(|(x, mid)| {
                        rel.iter()
                            .filter(move |(from, _)| term_as_value(from.clone()) == *mid)
                            .map(move |(_, to)| (x.clone(), to.clone()))
                    })
                    .collect(),
            });
        }
        current.unwrap_or_default()
    }

    fn violates_identification(&self, id: &Identification) -> bool {
        let members: Vec<Term> = self
            .extension(id.concept())
            .into_iter()
            .filter(|x| matches!(x, Term::Named(_)))
            .collect();
        let fillers: Vec<BTreeSet<(Term, Value)>> = id.paths().iter().map(|p| self.path_pairs(p)).collect();
        let shares = |rel: &BTreeSet<(Term, Value)>, a: &Term, b: &Term| {
            rel.iter()
                .any(|(x, v)| x == a && rel.contains(&(b.clone(), v.clone())))
        };
        members.iter().enumerate().any(|(i, a)| {
            members[i + 1..]
                .iter()
                .any(|b| fillers.iter().all(|rel| shares(rel, a, b)))
        })
    }

    fn violates(&self, t: &TBoxAssertion) -> bool {
        match t {
            TBoxAssertion::ConceptInclusion { lhs, rhs, negated } => {
                *negated && !self.extension(lhs).is_disjoint(&self.extension(rhs))
            }
            TBoxAssertion::RoleInclusion { lhs, rhs, negated } => {
                let right: HashSet<(Term, Term)> = self.role_pairs(rhs).into_iter().collect();
                *negated && self.role_pairs(lhs).iter().any(|p| right.contains(p))
            }
            TBoxAssertion::AttributeInclusion { lhs, rhs, negated } => {
                let right: HashSet<(Term, Value)> = self.attribute_pairs(rhs).into_iter().collect();
                *negated && self.attribute_pairs(lhs).iter().any(|p| right.contains(p))
            }
            TBoxAssertion::ValueDomainInclusion { attribute, domain } => {
                *domain != Datatype::Top
                    && self.attribute_pairs(attribute).iter().any(|(_, v)| match v {
                        Value::Const(c) => c.datatype() != *domain,
                        Value::Anon(_) => false,
                    })
            }
            TBoxAssertion::AttributeFunctionality(u) => {
                let pairs: Vec<(Term, TypedValue)> = self
                    .attribute_pairs(u)
                    .into_iter()
                    .filter_map(|(x, v)| match v {
                        Value::Const(c) => Some((x, c)),
                        Value::Anon(_) => None,
                    })
                    .collect();
                pairs
                    .iter()
                    .any(|(x, v)| pairs.iter().any(|(y, w)| x == y && v != w))
            }
            TBoxAssertion::Identification(id) => self.violates_identification(id),
        }
    }
}

fn term_as_value(t: Term) -> Value {
    match t {
        Term::Named(n) => Value::Anon(format!("named:{n}")),
        Term::Anon(n) => Value::Anon(format!("anon:{n}")),
    }
}

fn chase<'a>(tbox: &TBox, atoms: impl IntoIterator<Item = &'a Atom>) -> Chase {
    let mut c = Chase::from_atoms(atoms);
    c.saturate(tbox);
    c
}

/// Closure by naive chase.
pub fn closure<'a>(tbox: &TBox, atoms: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Atom> {
    chase(tbox, atoms).named_atoms()
}

/// Whether `atoms` together with the positive inclusions and the single
/// non-positive assertion `t` have a model.
pub fn violates<'a>(tbox: &TBox, t: &TBoxAssertion, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
    chase(tbox, atoms).violates(t)
}

/// No non-positive assertion is violated on the chase.
pub fn is_satisfiable<'a>(tbox: &TBox, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
    let c = chase(tbox, atoms);
    tbox.iter().filter(|t| !t.is_positive()).all(|t| !c.violates(t))
}

type Mask = u64;

/// Atoms of a universe indexed by bit position, with per-atom closures.
struct Universe {
    atoms: Vec<Atom>,
    derived: Vec<Mask>,
}

impl Universe {
    fn new(tbox: &TBox, atoms: BTreeSet<Atom>) -> Universe {
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        let derived = atoms
            .iter()
            .map(|a| {
                let cl = closure(tbox, [a]);
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| cl.contains(b))
                    .fold(0, |m, (i, _)| m | (1 << i))
            })
            .collect();
        Universe { atoms, derived }
    }

    fn mask_of<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Mask {
        let set: BTreeSet<&Atom> = atoms.into_iter().collect();
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| set.contains(a))
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    fn atoms_of(&self, mask: Mask) -> impl Iterator<Item = &Atom> {
        self.atoms
            .iter()
            .enumerate()
            .filter(move |(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a)
    }

    fn is_closed(&self, mask: Mask) -> bool {
        (0..self.atoms.len()).all(|i| mask & (1 << i) == 0 || self.derived[i] & !mask == 0)
    }
}

/// Every subset of `within` (as a mask) closed under the TBox.
fn closed_subsets(u: &Universe, within: Mask) -> Vec<Mask> {
    let mut out = Vec::new();
    let mut sub = within;
    loop {
        if u.is_closed(sub) {
            out.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & within;
    }
    out
}

fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// `(deletions, insertions)` of a candidate relative to the input closure.
fn changes(before: Mask, candidate: Mask) -> (Mask, Mask) {
    (before & !candidate, candidate & !before)
}

/// Whether `a` has fewer changes than `b`.
fn fewer_changes(before: Mask, a: Mask, b: Mask) -> bool {
    let (da, ia) = changes(before, a);
    let (db, ib) = changes(before, b);
    if da != db {
        is_subset(da, db)
    } else {
        ia != ib && is_subset(ia, ib)
    }
}

fn check_bound(universe: &BTreeSet<Atom>, bound: usize) -> Result<(), OracleError> {
    let bound = bound.min(MAX_BOUND);
    if universe.len() > bound {
        return Err(OracleError::BoundExceeded {
            atoms: universe.len(),
            bound,
        });
    }
    Ok(())
}

/// All closed ABoxes that accomplish the change minimally.
pub fn enumerate_minimal(
    kb: &KnowledgeBase,
    facts: &[Atom],
    kind: ChangeKind,
    bound: usize,
) -> Result<Vec<MinimalSet>, OracleError> {
    let tbox = kb.tbox();
    if !is_satisfiable(tbox, kb.abox()) {
        return Err(EvolutionError::UnsatisfiableKb.into());
    }
    let before_atoms = closure(tbox, kb.abox());
    let fact_atoms = closure(tbox, facts);
    let universe: BTreeSet<Atom> = before_atoms.union(&fact_atoms).cloned().collect();
    check_bound(&universe, bound)?;
    let u = Universe::new(tbox, universe);
    let before = u.mask_of(&before_atoms);
    let f_mask = u.mask_of(facts);

    let mut candidates: Vec<Mask> = Vec::new();
    let mut seen = HashSet::new();
    for s in closed_subsets(&u, before) {
        let candidate = match kind {
            // subsets of a satisfiable closure stay satisfiable
            ChangeKind::Deletion if !is_subset(f_mask, s) && !facts.is_empty() => s,
            ChangeKind::Deletion => continue,
            ChangeKind::Insertion => s | u.mask_of(&fact_atoms),
        };
        if !seen.insert(candidate) {
            continue;
        }
        if kind == ChangeKind::Insertion && !is_satisfiable(tbox, u.atoms_of(candidate)) {
            continue;
        }
        candidates.push(candidate);
    }
    let mut minimal: Vec<MinimalSet> = candidates
        .iter()
        .filter(|&&c| !candidates.iter().any(|&d| fewer_changes(before, d, c)))
        .map(|&c| MinimalSet {
            closed_abox: u.atoms_of(c).cloned().collect(),
            kind,
        })
        .collect();
    minimal.sort_by(|a, b| a.closed_abox.cmp(&b.closed_abox));
    Ok(minimal)
}

/// Intersection of all minimal results, or the input closure when there
/// are none.
pub fn widtio(
    kb: &KnowledgeBase,
    facts: &[Atom],
    kind: ChangeKind,
    bound: usize,
) -> Result<EvolutionResult, OracleError> {
    for f in facts {
        kb.signature()
            .check_atom(f)
            .map_err(EvolutionError::from)?;
    }
    let minimal = enumerate_minimal(kb, facts, kind, bound)?;
    let before = closure(kb.tbox(), kb.abox());
    let after = match minimal.split_first() {
        None => before.clone(),
        Some((first, rest)) => rest.iter().fold(first.closed_abox.clone(), |acc, m| {
            acc.intersection(&m.closed_abox).cloned().collect()
        }),
    };
    Ok(EvolutionResult::from_closures(kb, &before, after, Vec::new())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_facts, parse_kb};

    const EXAMPLE: &str = "\
SIGNATURE
concept OD. concept TD. concept TM. concept RD. concept FT.
role mf.
TBOX
OD ISA TM. TD ISA TM. OD ISA not TD. RD ISA not TM. TM ISA exists mf.
TM ISA not FT. exists mf ISA TM. exists inv(mf) ISA FT.
id OD: mf. id FT: inv(mf).
ABOX
OD(s). mf(s,t1). TD(b). TM(p).
";

    fn atoms(kb: &KnowledgeBase, text: &str) -> BTreeSet<Atom> {
        parse_facts(text, kb.signature()).unwrap().into_iter().collect()
    }

    #[test]
    fn chase_closure_of_running_example() {
        let kb = parse_kb(EXAMPLE).unwrap();
        assert_eq!(
            closure(kb.tbox(), kb.abox()),
            atoms(&kb, "OD(s). TM(s). mf(s,t1). FT(t1). TD(b). TM(b). TM(p).")
        );
        assert!(is_satisfiable(kb.tbox(), kb.abox()));
    }

    #[test]
    fn anonymous_witnesses_detect_empty_concepts() {
        let kb = parse_kb(
            "SIGNATURE concept A. concept B. concept C. role p.
             TBOX A ISA exists p. exists inv(p) ISA B. exists inv(p) ISA C. B ISA not C.
             ABOX A(x).",
        )
        .unwrap();
        assert!(!is_satisfiable(kb.tbox(), kb.abox()));
    }

    #[test]
    fn anonymous_values_never_break_functionality() {
        let kb = parse_kb(
            "SIGNATURE concept A. attr u. TBOX A ISA delta(u). funct u. ABOX A(x). u(x, 1).",
        )
        .unwrap();
        assert!(is_satisfiable(kb.tbox(), kb.abox()));
    }

    #[test]
    fn example_insertion_candidates() {
        let kb = parse_kb(EXAMPLE).unwrap();
        let f1: Vec<Atom> = atoms(&kb, "RD(p). OD(b). mf(b,t1).").into_iter().collect();
        let found = enumerate_minimal(&kb, &f1, ChangeKind::Insertion, DEFAULT_BOUND).unwrap();
        let k1 = closure(kb.tbox(), &atoms(&kb, "RD(p). OD(b). mf(b,t1). TM(s). mf(s,t1)."));
        let k2 = closure(kb.tbox(), &atoms(&kb, "RD(p). OD(b). mf(b,t1). OD(s)."));
        let got: Vec<BTreeSet<Atom>> = found.into_iter().map(|m| m.closed_abox).collect();
        let mut expected = vec![k1, k2];
        expected.sort();
        assert_eq!(got, expected);

        let res = widtio(&kb, &f1, ChangeKind::Insertion, DEFAULT_BOUND).unwrap();
        assert_eq!(
            res.closure(),
            &atoms(&kb, "RD(p). OD(b). TM(b). mf(b,t1). FT(t1). TM(s).")
        );
    }

    #[test]
    fn chain_deletion() {
        let kb = parse_kb(
            "SIGNATURE concept B. concept C. concept D. concept E.
             TBOX B ISA C. C ISA D. E ISA D. ABOX B(a). E(a).",
        )
        .unwrap();
        let f: Vec<Atom> = atoms(&kb, "C(a). D(a).").into_iter().collect();
        let found = enumerate_minimal(&kb, &f, ChangeKind::Deletion, DEFAULT_BOUND).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].closed_abox, atoms(&kb, "E(a). D(a)."));
        assert!(enumerate_minimal(&kb, &[], ChangeKind::Deletion, DEFAULT_BOUND)
            .unwrap()
            .is_empty());
        assert!(widtio(&kb, &[], ChangeKind::Deletion, DEFAULT_BOUND).unwrap().no_op);
    }

    #[test]
    fn unsatisfiable_facts_leave_kb_unchanged() {
        let kb = parse_kb(EXAMPLE).unwrap();
        let f: Vec<Atom> = atoms(&kb, "OD(c). TD(c).").into_iter().collect();
        let res = widtio(&kb, &f, ChangeKind::Insertion, DEFAULT_BOUND).unwrap();
        assert!(res.no_op);
    }

    #[test]
    fn bound_is_enforced() {
        let kb = parse_kb(EXAMPLE).unwrap();
        assert_eq!(
            enumerate_minimal(&kb, &[], ChangeKind::Insertion, 3),
            Err(OracleError::BoundExceeded { atoms: 7, bound: 3 })
        );
    }
}
