//! Closure, entailment between single atoms, path evaluation and
//! violation-set enumeration.
//!
//! Positive inclusions are compiled once into a reflexive-transitive
//! hierarchy over basic concepts, roles and attributes. Every derivation is
//! single-premise, so the closure of a set is the union of the closures of
//! its atoms, and membership/role/attribute tests against a set give the
//! same answer as against its closure.

use std::borrow::Cow;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::model::{
    Atom, BasicConcept, Datatype, Identification, Path, PathStep, RoleExpr, TBox, TBoxAssertion,
    TypedValue,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error("the premise `{0}` is unsatisfiable on its own")]
    UnsatisfiablePremise(Atom),
}

/// A set of atoms closed under some TBox.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedAtomSet {
    atoms: BTreeSet<Atom>,
    tbox_fingerprint: u64,
}

impl ClosedAtomSet {
    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn into_atoms(self) -> BTreeSet<Atom> {
        self.atoms
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn tbox_fingerprint(&self) -> u64 {
        self.tbox_fingerprint
    }
}

/// A minimal set of atoms that clashes with one non-positive assertion
/// (together with the positive inclusions).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ViolationSet {
    pub violated: TBoxAssertion,
    pub atoms: BTreeSet<Atom>,
}

/// Second component of a path pair: an object or a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Object(String),
    Value(TypedValue),
}

/// One `(from, to)` pair of a path extension with a minimal support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathPair {
    pub from: String,
    pub to: Term,
    pub support: BTreeSet<Atom>,
}

pub fn tbox_fingerprint(tbox: &TBox) -> u64 {
    let mut h = DefaultHasher::new();
    tbox.hash(&mut h);
    h.finish()
}

#[derive(Debug)]
struct Graph<N> {
    sups: HashMap<N, BTreeSet<N>>,
    subs: HashMap<N, BTreeSet<N>>,
}

impl<N: Clone + Ord + Hash> Graph<N> {
    fn build(nodes: &BTreeSet<N>, edges: &[(N, N)]) -> Graph<N> {
        let mut succ: HashMap<&N, Vec<&N>> = HashMap::new();
        for (a, b) in edges {
            succ.entry(a).or_default().push(b);
        }
        let mut sups: HashMap<N, BTreeSet<N>> = HashMap::new();
        for n in nodes {
            let mut seen = BTreeSet::from([n.clone()]);
            let mut stack = vec![n];
            while let Some(cur) = stack.pop() {
                for &next in succ.get(cur).into_iter().flatten() {
                    if seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
            }
            sups.insert(n.clone(), seen);
        }
        let mut subs: HashMap<N, BTreeSet<N>> = HashMap::new();
        for (n, ups) in &sups {
            for up in ups {
                subs.entry(up.clone()).or_default().insert(n.clone());
            }
        }
        Graph { sups, subs }
    }

    fn sups(&self, n: &N) -> Cow<'_, BTreeSet<N>> {
        match self.sups.get(n) {
            Some(s) => Cow::Borrowed(s),
            None => Cow::Owned(BTreeSet::from([n.clone()])),
        }
    }

    fn subs(&self, n: &N) -> Cow<'_, BTreeSet<N>> {
        match self.subs.get(n) {
            Some(s) => Cow::Borrowed(s),
            None => Cow::Owned(BTreeSet::from([n.clone()])),
        }
    }
}

/// Reflexive-transitive closure of the positive inclusions.
#[derive(Debug)]
struct Hierarchy {
    concepts: Graph<BasicConcept>,
    roles: Graph<RoleExpr>,
    attributes: Graph<String>,
}

fn clash<N: Ord>(ups: &BTreeSet<N>, x: &N, y: &N) -> bool {
    ups.contains(x) && ups.contains(y)
}

fn mentioned_names(tbox: &TBox) -> (BTreeSet<String>, BTreeSet<String>, BTreeSet<String>) {
    let (mut concepts, mut roles, mut attrs) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    let mut basic = |b: &BasicConcept, roles: &mut BTreeSet<String>, attrs: &mut BTreeSet<String>| match b {
        BasicConcept::Atomic(a) => {
            concepts.insert(a.clone());
        }
        BasicConcept::Exists(q) => {
            roles.insert(q.name.clone());
        }
        BasicConcept::Domain(u) => {
            attrs.insert(u.clone());
        }
    };
    for t in tbox {
        match t {
            TBoxAssertion::ConceptInclusion { lhs, rhs, .. } => {
                basic(lhs, &mut roles, &mut attrs);
                basic(rhs, &mut roles, &mut attrs);
            }
            TBoxAssertion::RoleInclusion { lhs, rhs, .. } => {
                roles.insert(lhs.name.clone());
                roles.insert(rhs.name.clone());
            }
            TBoxAssertion::AttributeInclusion { lhs, rhs, .. } => {
                attrs.insert(lhs.clone());
                attrs.insert(rhs.clone());
            }
            TBoxAssertion::ValueDomainInclusion { attribute, .. }
            | TBoxAssertion::AttributeFunctionality(attribute) => {
                attrs.insert(attribute.clone());
            }
            TBoxAssertion::Identification(id) => {
                basic(id.concept(), &mut roles, &mut attrs);
                for p in id.paths() {
                    for s in p.steps() {
                        match s {
                            PathStep::Role(q) => {
                                roles.insert(q.name.clone());
                            }
                            PathStep::Attribute(u) => {
                                attrs.insert(u.clone());
                            }
                            PathStep::Test(b) => basic(b, &mut roles, &mut attrs),
                        }
                    }
                }
            }
        }
    }
    (concepts, roles, attrs)
}

impl Hierarchy {
    fn build(tbox: &TBox) -> Hierarchy {
        let (concepts, roles, attrs) = mentioned_names(tbox);
        let mut concept_nodes: BTreeSet<BasicConcept> =
            concepts.iter().cloned().map(BasicConcept::Atomic).collect();
        let mut role_nodes = BTreeSet::new();
        for r in &roles {
            role_nodes.insert(RoleExpr::direct(r.clone()));
            role_nodes.insert(RoleExpr::inverse(r.clone()));
            concept_nodes.insert(BasicConcept::Exists(RoleExpr::direct(r.clone())));
            concept_nodes.insert(BasicConcept::Exists(RoleExpr::inverse(r.clone())));
        }
        for u in &attrs {
            concept_nodes.insert(BasicConcept::Domain(u.clone()));
        }
        let (mut ce, mut re, mut ae) = (Vec::new(), Vec::new(), Vec::new());
        for t in tbox {
            match t {
                TBoxAssertion::ConceptInclusion {
                    lhs,
                    rhs,
                    negated: false,
                } => ce.push((lhs.clone(), rhs.clone())),
                TBoxAssertion::RoleInclusion {
                    lhs,
                    rhs,
                    negated: false,
                } => {
                    re.push((lhs.clone(), rhs.clone()));
                    re.push((lhs.inv(), rhs.inv()));
                    ce.push((BasicConcept::Exists(lhs.clone()), BasicConcept::Exists(rhs.clone())));
                    ce.push((BasicConcept::Exists(lhs.inv()), BasicConcept::Exists(rhs.inv())));
                }
                TBoxAssertion::AttributeInclusion {
                    lhs,
                    rhs,
                    negated: false,
                } => {
                    ae.push((lhs.clone(), rhs.clone()));
                    ce.push((BasicConcept::Domain(lhs.clone()), BasicConcept::Domain(rhs.clone())));
                }
                _ => {}
            }
        }
        Hierarchy {
            concepts: Graph::build(&concept_nodes, &ce),
            roles: Graph::build(&role_nodes, &re),
            attributes: Graph::build(&attrs, &ae),
        }
    }
}

/// Basic concepts, roles and attributes that have an empty extension in
/// every model of the positive inclusions plus one negative inclusion.
#[derive(Debug, Default)]
struct Emptiness {
    concepts: HashSet<BasicConcept>,
    roles: HashSet<RoleExpr>,
    attributes: HashSet<String>,
}

impl Emptiness {
    fn compute(h: &Hierarchy, negative: &TBoxAssertion) -> Emptiness {
        let mut e = Emptiness::default();
        let concept_nodes: Vec<&BasicConcept> = h.concepts.sups.keys().collect();
        let role_nodes: Vec<&RoleExpr> = h.roles.sups.keys().collect();
        let attr_nodes: Vec<&String> = h.attributes.sups.keys().collect();
        loop {
            let mut changed = false;
            for &b in &concept_nodes {
                if e.concepts.contains(b) {
                    continue;
                }
                let ups = h.concepts.sups(b);
                let empty = match negative {
                    TBoxAssertion::ConceptInclusion {
                        lhs,
                        rhs,
                        negated: true,
                    } => clash(&ups, lhs, rhs),
                    _ => false,
                } || ups.iter().any(|u| {
                    (u != b && e.concepts.contains(u))
                        || matches!(u, BasicConcept::Exists(q) if e.roles.contains(q))
                        || matches!(u, BasicConcept::Domain(a) if e.attributes.contains(a))
                });
                if empty {
                    e.concepts.insert(b.clone());
                    changed = true;
                }
            }
            for &q in &role_nodes {
                if e.roles.contains(q) {
                    continue;
                }
                let ups = h.roles.sups(q);
                let empty = e.concepts.contains(&BasicConcept::Exists(q.clone()))
                    || e.concepts.contains(&BasicConcept::Exists(q.inv()))
                    || ups.iter().any(|u| u != q && e.roles.contains(u))
                    || match negative {
                        TBoxAssertion::RoleInclusion {
                            lhs,
                            rhs,
                            negated: true,
                        } => clash(&ups, lhs, rhs) || clash(&ups, &lhs.inv(), &rhs.inv()),
                        _ => false,
                    };
                if empty {
                    e.roles.insert(q.clone());
                    e.roles.insert(q.inv());
                    changed = true;
                }
            }
            for &u in &attr_nodes {
                if e.attributes.contains(u) {
                    continue;
                }
                let ups = h.attributes.sups(u);
                let empty = e.concepts.contains(&BasicConcept::Domain(u.clone()))
                    || ups.iter().any(|v| v != u && e.attributes.contains(v))
                    || match negative {
                        TBoxAssertion::AttributeInclusion {
                            lhs,
                            rhs,
                            negated: true,
                        } => clash(&ups, lhs, rhs),
                        _ => false,
                    };
                if empty {
                    e.attributes.insert(u.clone());
                    changed = true;
                }
            }
            if !changed {
                return e;
            }
        }
    }

    fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

/// Lookup structure over a borrowed set of atoms.
struct AtomIndex<'a> {
    by_individual: HashMap<&'a str, Vec<&'a Atom>>,
    roles: HashMap<&'a str, Vec<(&'a str, &'a str, &'a Atom)>>,
    attributes: HashMap<&'a str, Vec<(&'a str, &'a TypedValue, &'a Atom)>>,
    objects: BTreeSet<&'a str>,
}

impl<'a> AtomIndex<'a> {
    fn new(atoms: impl IntoIterator<Item = &'a Atom>) -> AtomIndex<'a> {
        let mut idx = AtomIndex {
            by_individual: HashMap::new(),
            roles: HashMap::new(),
            attributes: HashMap::new(),
            objects: BTreeSet::new(),
        };
        for atom in atoms {
            match atom {
                Atom::Concept { individual, .. } => {
                    idx.by_individual.entry(individual).or_default().push(atom);
                    idx.objects.insert(individual);
                }
                Atom::Role {
                    role,
                    subject,
                    object,
                } => {
                    idx.by_individual.entry(subject).or_default().push(atom);
                    if subject != object {
                        idx.by_individual.entry(object).or_default().push(atom);
                    }
                    idx.roles.entry(role).or_default().push((subject, object, atom));
                    idx.objects.insert(subject);
                    idx.objects.insert(object);
                }
                Atom::Attribute {
                    attribute,
                    subject,
                    value,
                } => {
                    idx.by_individual.entry(subject).or_default().push(atom);
                    idx.attributes
                        .entry(attribute)
                        .or_default()
                        .push((subject, value, atom));
                    idx.objects.insert(subject);
                }
            }
        }
        idx
    }
}

/// Basic concepts that `atom` directly gives to individual `x`.
fn direct_concepts(atom: &Atom, x: &str) -> Vec<BasicConcept> {
    match atom {
        Atom::Concept {
            concept,
            individual,
        } if individual == x => vec![BasicConcept::Atomic(concept.clone())],
        Atom::Role {
            role,
            subject,
            object,
        } => {
            let mut v = Vec::new();
            if subject == x {
                v.push(BasicConcept::Exists(RoleExpr::direct(role.clone())));
            }
            if object == x {
                v.push(BasicConcept::Exists(RoleExpr::inverse(role.clone())));
            }
            v
        }
        Atom::Attribute {
            attribute, subject, ..
        } if subject == x => vec![BasicConcept::Domain(attribute.clone())],
        _ => Vec::new(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
enum Node<'a> {
    Obj(&'a str),
    Val(&'a TypedValue),
}

type Support<'a> = BTreeSet<&'a Atom>;

/// Keeps, per key, only supports with no strict subset among the others.
fn minimal_supports<K: Ord + Clone>(entries: Vec<(K, Support<'_>)>) -> Vec<(K, Support<'_>)> {
    let mut grouped: BTreeMap<K, Vec<Support<'_>>> = BTreeMap::new();
    for (k, s) in entries {
        grouped.entry(k).or_default().push(s);
    }
    let mut out = Vec::new();
    for (k, mut sets) in grouped {
        sets.sort_by_key(|s| s.len());
        sets.dedup();
        let mut kept: Vec<Support<'_>> = Vec::new();
        for s in sets {
            if !kept.iter().any(|k| k.is_subset(&s)) {
                kept.push(s);
            }
        }
        out.extend(kept.into_iter().map(|s| (k.clone(), s)));
    }
    out
}

struct Constraint<'t> {
    assertion: &'t TBoxAssertion,
    empty: Emptiness,
}

/// Reasoning services for one TBox.
pub struct Reasoner<'t> {
    tbox: &'t TBox,
    fingerprint: u64,
    hierarchy: Hierarchy,
    constraints: Vec<Constraint<'t>>,
}

impl<'t> Reasoner<'t> {
    pub fn new(tbox: &'t TBox) -> Reasoner<'t> {
        let hierarchy = Hierarchy::build(tbox);
        let constraints = tbox
            .iter()
            .filter(|t| !t.is_positive())
            .map(|t| Constraint {
                assertion: t,
                empty: Emptiness::compute(&hierarchy, t),
            })
            .collect();
        Reasoner {
            tbox,
            fingerprint: tbox_fingerprint(tbox),
            hierarchy,
            constraints,
        }
    }

    pub fn tbox(&self) -> &'t TBox {
        self.tbox
    }

    /// Every atom over the individuals of `atom` that `atom` alone entails,
    /// `atom` included.
    pub fn derive(&self, atom: &Atom) -> BTreeSet<Atom> {
        let h = &self.hierarchy;
        let mut out = BTreeSet::from([atom.clone()]);
        let concepts_of = |b: BasicConcept, x: &str, out: &mut BTreeSet<Atom>| {
            for up in h.concepts.sups(&b).iter() {
                if let BasicConcept::Atomic(a) = up {
                    out.insert(Atom::concept(a.clone(), x));
                }
            }
        };
        match atom {
            Atom::Concept {
                concept,
                individual,
            } => concepts_of(BasicConcept::Atomic(concept.clone()), individual, &mut out),
            Atom::Role {
                role,
                subject,
                object,
            } => {
                for up in h.roles.sups(&RoleExpr::direct(role.clone())).iter() {
                    out.insert(if up.inverted {
                        Atom::role(up.name.clone(), object.clone(), subject.clone())
                    } else {
                        Atom::role(up.name.clone(), subject.clone(), object.clone())
                    });
                }
                concepts_of(BasicConcept::Exists(RoleExpr::direct(role.clone())), subject, &mut out);
                concepts_of(BasicConcept::Exists(RoleExpr::inverse(role.clone())), object, &mut out);
            }
            Atom::Attribute {
                attribute,
                subject,
                value,
            } => {
                for up in h.attributes.sups(attribute).iter() {
                    out.insert(Atom::attribute(up.clone(), subject.clone(), value.clone()));
                }
                concepts_of(BasicConcept::Domain(attribute.clone()), subject, &mut out);
            }
        }
        out
    }

    pub fn closure<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> ClosedAtomSet {
        let mut closed = BTreeSet::new();
        for a in atoms {
            if !closed.contains(a) {
                closed.extend(self.derive(a));
            }
        }
        ClosedAtomSet {
            atoms: closed,
            tbox_fingerprint: self.fingerprint,
        }
    }

    /// Wraps a set the caller knows to be closed under this TBox.
    pub fn assume_closed(&self, atoms: BTreeSet<Atom>) -> ClosedAtomSet {
        debug_assert!(atoms.iter().all(|a| self.derive(a).is_subset(&atoms)));
        ClosedAtomSet {
            atoms,
            tbox_fingerprint: self.fingerprint,
        }
    }

    /// `⟨T,{premise}⟩ ⊨ conclusion`.
    pub fn entails_atom(&self, premise: &Atom, conclusion: &Atom) -> Result<bool, ReasonerError> {
        if !self.is_satisfiable([premise]) {
            return Err(ReasonerError::UnsatisfiablePremise(premise.clone()));
        }
        Ok(self.derive(premise).contains(conclusion))
    }

    /// Atoms of `closed` that on their own entail `target`.
    pub fn subsumee(&self, closed: &ClosedAtomSet, target: &Atom) -> BTreeSet<Atom> {
        if !closed.contains(target) {
            return BTreeSet::new();
        }
        let inds: Vec<&str> = target.individuals().collect();
        closed
            .atoms()
            .iter()
            .filter(|a| a.individuals().any(|i| inds.contains(&i)))
            .filter(|a| *a == target || self.derive(a).contains(target))
            .cloned()
            .collect()
    }

    fn member_witnesses<'a>(&self, idx: &AtomIndex<'a>, b: &BasicConcept, x: &str) -> Vec<&'a Atom> {
        let subs = self.hierarchy.concepts.subs(b);
        idx.by_individual
            .get(x)
            .into_iter()
            .flatten()
            .copied()
            .filter(|a| direct_concepts(a, x).iter().any(|d| subs.contains(d)))
            .collect()
    }

    fn role_pairs<'a>(&self, idx: &AtomIndex<'a>, q: &RoleExpr) -> Vec<(&'a str, &'a str, &'a Atom)> {
        let mut out = Vec::new();
        for sub in self.hierarchy.roles.subs(q).iter() {
            for &(s, o, atom) in idx.roles.get(sub.name.as_str()).into_iter().flatten() {
                out.push(if sub.inverted { (o, s, atom) } else { (s, o, atom) });
            }
        }
        out
    }

    fn attribute_pairs<'a>(
        &self,
        idx: &AtomIndex<'a>,
        u: &str,
    ) -> Vec<(&'a str, &'a TypedValue, &'a Atom)> {
        let mut out = Vec::new();
        for sub in self.hierarchy.attributes.subs(&u.to_string()).iter() {
            out.extend(idx.attributes.get(sub.as_str()).into_iter().flatten().copied());
        }
        out
    }

    fn eval_path_in<'a>(
        &self,
        idx: &AtomIndex<'a>,
        path: &Path,
    ) -> Vec<((&'a str, Node<'a>), Support<'a>)> {
        let mut current: Option<Vec<((&'a str, Node<'a>), Support<'a>)>> = None;
        for step in path.steps() {
            let rel: Vec<((&'a str, Node<'a>), Support<'a>)> = match step {
                PathStep::Role(q) => self
                    .role_pairs(idx, q)
                    .into_iter()
                    .map(|(s, o, a)| ((s, Node::Obj(o)), BTreeSet::from([a])))
                    .collect(),
                PathStep::Attribute(u) => self
                    .attribute_pairs(idx, u)
                    .into_iter()
                    .map(|(s, v, a)| ((s, Node::Val(v)), BTreeSet::from([a])))
                    .collect(),
                PathStep::Test(b) => {
                    let domain: BTreeSet<&'a str> = match &current {
                        None => idx.objects.clone(),
                        Some(rel) => rel
                            .iter()
                            .filter_map(|((_, to), _)| match to {
                                Node::Obj(o) => Some(*o),
                                Node::Val(_) => None,
                            })
                            .collect(),
                    };
                    domain
                        .into_iter()
                        .flat_map(|x| {
                            self.member_witnesses(idx, b, x)
                                .into_iter()
                                .map(move |w| ((x, Node::Obj(x)), BTreeSet::from([w])))
                        })
                        .collect()
                }
            };
            current = Some(match current {
                None => rel,
                Some(prev) => {
                    let mut by_from: HashMap<&'a str, Vec<usize>> = HashMap::new();
                    for (i, ((from, _), _)) in rel.iter().enumerate() {
                        by_from.entry(*from).or_default().push(i);
                    }
                    let mut joined = Vec::new();
                    for ((from, mid), sup) in &prev {
                        let Node::Obj(mid) = mid else { continue };
                        for &i in by_from.get(mid).into_iter().flatten() {
                            let ((_, to), sup2) = &rel[i];
                            joined.push(((*from, *to), sup.union(sup2).copied().collect()));
                        }
                    }
                    joined
                }
            });
            current = current.map(minimal_supports);
        }
        current.unwrap_or_default()
    }

    /// Hierarchy-aware path extension: role and attribute steps include
    /// their sub-roles and sub-attributes, tests include sub-concepts.
    pub fn eval_path<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>, path: &Path) -> Vec<PathPair> {
        let idx = AtomIndex::new(atoms);
        let mut out: Vec<PathPair> = self
            .eval_path_in(&idx, path)
            .into_iter()
            .map(|((from, to), support)| PathPair {
                from: from.to_string(),
                to: match to {
                    Node::Obj(o) => Term::Object(o.to_string()),
                    Node::Val(v) => Term::Value(v.clone()),
                },
                support: support.into_iter().cloned().collect(),
            })
            .collect();
        out.sort();
        out
    }

    /// Candidate clash sets for one constraint, not yet minimized.
    fn raw_violations<'a>(&self, c: &Constraint<'_>, idx: &AtomIndex<'a>) -> Vec<Support<'a>> {
        let mut out: Vec<Support<'a>> = Vec::new();
        if !c.empty.is_empty() {
            for (x, atoms) in &idx.by_individual {
                for a in atoms {
                    if direct_concepts(a, x).iter().any(|d| c.empty.concepts.contains(d)) {
                        out.push(BTreeSet::from([*a]));
                    }
                }
            }
        }
        match c.assertion {
            TBoxAssertion::ConceptInclusion { lhs, rhs, .. } => {
                for &x in &idx.objects {
                    let left = self.member_witnesses(idx, lhs, x);
                    if left.is_empty() {
                        continue;
                    }
                    let right = self.member_witnesses(idx, rhs, x);
                    for &l in &left {
                        for &r in &right {
                            out.push(BTreeSet::from([l, r]));
                        }
                    }
                }
            }
            TBoxAssertion::RoleInclusion { lhs, rhs, .. } => {
                let mut left: HashMap<(&str, &str), Vec<&Atom>> = HashMap::new();
                for (s, o, a) in self.role_pairs(idx, lhs) {
                    left.entry((s, o)).or_default().push(a);
                }
                for (s, o, r) in self.role_pairs(idx, rhs) {
                    for &l in left.get(&(s, o)).into_iter().flatten() {
                        out.push(BTreeSet::from([l, r]));
                    }
                }
            }
            TBoxAssertion::AttributeInclusion { lhs, rhs, .. } => {
                let mut left: HashMap<(&str, &TypedValue), Vec<&Atom>> = HashMap::new();
                for (s, v, a) in self.attribute_pairs(idx, lhs) {
                    left.entry((s, v)).or_default().push(a);
                }
                for (s, v, r) in self.attribute_pairs(idx, rhs) {
                    for &l in left.get(&(s, v)).into_iter().flatten() {
                        out.push(BTreeSet::from([l, r]));
                    }
                }
            }
            TBoxAssertion::ValueDomainInclusion { attribute, domain } => {
                if *domain != Datatype::Top {
                    for (_, v, a) in self.attribute_pairs(idx, attribute) {
                        if v.datatype() != *domain {
                            out.push(BTreeSet::from([a]));
                        }
                    }
                }
            }
            TBoxAssertion::AttributeFunctionality(u) => {
                let mut by_subject: HashMap<&str, Vec<(&TypedValue, &Atom)>> = HashMap::new();
                for (s, v, a) in self.attribute_pairs(idx, u) {
                    by_subject.entry(s).or_default().push((v, a));
                }
                for values in by_subject.values() {
                    for (i, (v1, a1)) in values.iter().enumerate() {
                        for (v2, a2) in &values[i + 1..] {
                            if v1 != v2 {
                                out.push(BTreeSet::from([*a1, *a2]));
                            }
                        }
                    }
                }
            }
            TBoxAssertion::Identification(id) => self.identification_violations(id, idx, &mut out),
        }
        out
    }

    fn identification_violations<'a>(
        &self,
        id: &Identification,
        idx: &AtomIndex<'a>,
        out: &mut Vec<Support<'a>>,
    ) {
        // fillers[i]: from -> [(to, support)]
        let mut fillers: Vec<HashMap<&'a str, Vec<(Node<'a>, Support<'a>)>>> = Vec::new();
        for path in id.paths() {
            let mut m: HashMap<&'a str, Vec<(Node<'a>, Support<'a>)>> = HashMap::new();
            for ((from, to), sup) in self.eval_path_in(idx, path) {
                m.entry(from).or_default().push((to, sup));
            }
            fillers.push(m);
        }
        let key = id
            .paths()
            .iter()
            .position(|p| p.len() == 1)
            .expect("identification assertions are local");
        let mut by_filler: BTreeMap<Node<'a>, BTreeSet<&'a str>> = BTreeMap::new();
        for (from, tos) in &fillers[key] {
            for (to, _) in tos {
                by_filler.entry(*to).or_default().insert(*from);
            }
        }
        let mut pairs: BTreeSet<(&'a str, &'a str)> = BTreeSet::new();
        for objs in by_filler.values() {
            let objs: Vec<&str> = objs.iter().copied().collect();
            for (i, a) in objs.iter().enumerate() {
                for b in &objs[i + 1..] {
                    pairs.insert((a, b));
                }
            }
        }
        let mut seen: HashSet<Support<'a>> = HashSet::new();
        for (a, b) in pairs {
            let wa = self.member_witnesses(idx, id.concept(), a);
            let wb = self.member_witnesses(idx, id.concept(), b);
            if wa.is_empty() || wb.is_empty() {
                continue;
            }
            let mut options: Vec<Vec<Support<'a>>> = vec![wa
                .iter()
                .flat_map(|&x| wb.iter().map(move |&y| BTreeSet::from([x, y])))
                .collect()];
            for f in &fillers {
                let (Some(fa), Some(fb)) = (f.get(a), f.get(b)) else {
                    options.clear();
                    break;
                };
                let mut shared = Vec::new();
                for (ta, sa) in fa {
                    for (tb, sb) in fb {
                        if ta == tb {
                            shared.push(((), sa.union(sb).copied().collect()));
                        }
                    }
                }
                if shared.is_empty() {
                    options.clear();
                    break;
                }
                options.push(minimal_supports(shared).into_iter().map(|(_, s)| s).collect());
            }
            if options.is_empty() {
                continue;
            }
            let mut combos: Vec<Support<'a>> = vec![BTreeSet::new()];
            for opts in &options {
                let mut next = Vec::new();
                for base in &combos {
                    for o in opts {
                        next.push(base.union(o).copied().collect());
                    }
                }
                next.sort();
                next.dedup();
                combos = next;
            }
            for c in combos {
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        }
    }

    fn violates<'a>(&self, c: &Constraint<'_>, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
        !self.raw_violations(c, &AtomIndex::new(atoms)).is_empty()
    }

    fn minimize<'a>(&self, c: &Constraint<'_>, set: Support<'a>) -> BTreeSet<Atom> {
        let mut kept: Vec<&Atom> = set.into_iter().collect();
        let mut i = 0;
        while i < kept.len() {
            let without: Vec<&Atom> = kept
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, a)| *a)
                .collect();
            if self.violates(c, without.iter().copied()) {
                kept = without;
            } else {
                i += 1;
            }
        }
        kept.into_iter().cloned().collect()
    }

    /// All minimal violation sets contained in `atoms`, sorted.
    pub fn violation_sets<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<ViolationSet> {
        let idx = AtomIndex::new(atoms);
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            let mut raw = self.raw_violations(c, &idx);
            raw.sort();
            raw.dedup();
            for set in raw {
                out.insert(ViolationSet {
                    violated: c.assertion.clone(),
                    atoms: self.minimize(c, set),
                });
            }
        }
        out.into_iter().collect()
    }

    pub fn is_satisfiable<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
        let idx = AtomIndex::new(atoms);
        self.constraints
            .iter()
            .all(|c| self.raw_violations(c, &idx).is_empty())
    }

    /// Whether `atoms` clash with `T⁺ ∪ {violated}`; `violated` must be a
    /// non-positive assertion of this TBox.
    pub fn violates_assertion<'a>(
        &self,
        violated: &TBoxAssertion,
        atoms: impl IntoIterator<Item = &'a Atom>,
    ) -> bool {
        self.constraints
            .iter()
            .find(|c| c.assertion == violated)
            .is_some_and(|c| self.violates(c, atoms))
    }
}

/// `cl_T(atoms)`.
pub fn closure<'a>(tbox: &TBox, atoms: impl IntoIterator<Item = &'a Atom>) -> ClosedAtomSet {
    Reasoner::new(tbox).closure(atoms)
}

/// Membership of `x` in `b` read directly off `atoms`, with every single
/// atom that witnesses it.
pub fn member_basic(atoms: &BTreeSet<Atom>, b: &BasicConcept, x: &str) -> (bool, Vec<Atom>) {
    let empty = TBox::new();
    let r = Reasoner::new(&empty);
    let idx = AtomIndex::new(atoms);
    let w: Vec<Atom> = r.member_witnesses(&idx, b, x).into_iter().cloned().collect();
    (!w.is_empty(), w)
}

/// Path extension read directly off `atoms`.
pub fn eval_path(atoms: &BTreeSet<Atom>, path: &Path) -> Vec<PathPair> {
    let empty = TBox::new();
    Reasoner::new(&empty).eval_path(atoms, path)
}

pub fn entails_atom(tbox: &TBox, premise: &Atom, conclusion: &Atom) -> Result<bool, ReasonerError> {
    Reasoner::new(tbox).entails_atom(premise, conclusion)
}

pub fn subsumee(tbox: &TBox, closed: &ClosedAtomSet, target: &Atom) -> BTreeSet<Atom> {
    Reasoner::new(tbox).subsumee(closed, target)
}

pub fn violation_sets(tbox: &TBox, atoms: &BTreeSet<Atom>) -> Vec<ViolationSet> {
    Reasoner::new(tbox).violation_sets(atoms)
}

pub fn is_satisfiable(tbox: &TBox, abox: &BTreeSet<Atom>) -> bool {
    Reasoner::new(tbox).is_satisfiable(abox)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Signature;
    use crate::parser::parse_kb;

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

    fn c(a: &str, x: &str) -> Atom {
        Atom::concept(a, x)
    }

    fn set(atoms: &[Atom]) -> BTreeSet<Atom> {
        atoms.iter().cloned().collect()
    }

    #[test]
    fn closure_of_running_example() {
        let kb = parse_kb(EXAMPLE).unwrap();
        let cl = closure(kb.tbox(), kb.abox());
        let expected = set(&[
            c("OD", "s"),
            c("TM", "s"),
            Atom::role("mf", "s", "t1"),
            c("FT", "t1"),
            c("TD", "b"),
            c("TM", "b"),
            c("TM", "p"),
        ]);
        assert_eq!(cl.atoms(), &expected);
        assert!(closure(kb.tbox(), &BTreeSet::new()).is_empty());
        assert_eq!(closure(&TBox::new(), kb.abox()).atoms(), kb.abox());
    }

    #[test]
    fn closure_follows_existential_chains() {
        // B ⊑ ∃p, ∃p ⊑ A: A(x) follows from B(x) without any named filler
        let kb = parse_kb(
            "SIGNATURE concept A. concept B. role p. role q. attr u. attr v.
             TBOX B ISA exists p. exists p ISA A. q ISA inv(p). attr u ISA v. delta(v) ISA B.
             ABOX B(x). q(y,z). u(w, 1).",
        )
        .unwrap();
        let cl = closure(kb.tbox(), kb.abox());
        for a in [
            c("A", "x"),
            Atom::role("p", "z", "y"),
            c("A", "z"),
            Atom::attribute("v", "w", TypedValue::integer(1)),
            c("B", "w"),
            c("A", "w"),
        ] {
            assert!(cl.contains(&a), "{a}");
        }
        assert!(!cl.contains(&c("A", "y")));
    }

    #[test]
    fn member_and_paths() {
        let atoms = set(&[Atom::role("mf", "s", "t1")]);
        let (yes, w) = member_basic(&atoms, &BasicConcept::Exists(RoleExpr::inverse("mf")), "t1");
        assert!(yes);
        assert_eq!(w, vec![Atom::role("mf", "s", "t1")]);
        assert!(!member_basic(&BTreeSet::new(), &BasicConcept::atomic("TM"), "p").0);
        let tm = set(&[c("TM", "p")]);
        assert_eq!(member_basic(&tm, &BasicConcept::atomic("TM"), "p"), (true, vec![c("TM", "p")]));

        let mf = Path::single(PathStep::Role(RoleExpr::direct("mf")));
        let pairs = eval_path(&atoms, &mf);
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].from.as_str(), &pairs[0].to), ("s", &Term::Object("t1".into())));

        let tested = Path::new(vec![
            PathStep::Test(BasicConcept::atomic("OD")),
            PathStep::Role(RoleExpr::direct("mf")),
        ])
        .unwrap();
        let with_od = set(&[c("OD", "s"), Atom::role("mf", "s", "t1")]);
        let pairs = eval_path(&with_od, &tested);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].support, with_od);

        let inv = Path::single(PathStep::Role(RoleExpr::inverse("mf")));
        let pairs = eval_path(&atoms, &inv);
        assert_eq!((pairs[0].from.as_str(), &pairs[0].to), ("t1", &Term::Object("s".into())));
    }

    #[test]
    fn singleton_entailment() {
        let kb = parse_kb(EXAMPLE).unwrap();
        let t = kb.tbox();
        assert!(entails_atom(t, &Atom::role("mf", "b", "t1"), &c("TM", "b")).unwrap());
        assert!(entails_atom(t, &c("TM", "p"), &c("TM", "p")).unwrap());
        assert!(!entails_atom(t, &c("TM", "p"), &c("OD", "p")).unwrap());
    }

    #[test]
    fn entailment_rejects_unsat_premise() {
        let kb = parse_kb("SIGNATURE concept A. TBOX A ISA not A. ABOX").unwrap();
        assert_eq!(
            entails_atom(kb.tbox(), &c("A", "a"), &c("A", "a")),
            Err(ReasonerError::UnsatisfiablePremise(c("A", "a")))
        );
    }

    #[test]
    fn subsumee_sets() {
        let kb = parse_kb(EXAMPLE).unwrap();
        let cl = closure(kb.tbox(), kb.abox());
        assert_eq!(
            subsumee(kb.tbox(), &cl, &c("TM", "s")),
            set(&[c("TM", "s"), c("OD", "s"), Atom::role("mf", "s", "t1")])
        );
        assert!(subsumee(kb.tbox(), &cl, &c("TM", "zz")).is_empty());

        let kb = parse_kb(
            "SIGNATURE concept B. concept C. concept D. concept E.
             TBOX B ISA C. C ISA D. E ISA D. ABOX B(a). C(a). D(a). E(a).",
        )
        .unwrap();
        let cl = closure(kb.tbox(), kb.abox());
        assert_eq!(subsumee(kb.tbox(), &cl, &c("D", "a")), kb.abox().clone());
    }

    #[test]
    fn violation_sets_after_inserting_f1() {
        let kb = parse_kb(EXAMPLE).unwrap();
        let mut atoms = kb.abox().clone();
        atoms.extend([c("RD", "p"), c("OD", "b"), Atom::role("mf", "b", "t1")]);
        let cl = closure(kb.tbox(), &atoms);
        let found: Vec<BTreeSet<Atom>> = violation_sets(kb.tbox(), cl.atoms())
            .into_iter()
            .map(|v| v.atoms)
            .collect();
        assert!(found.contains(&set(&[c("RD", "p"), c("TM", "p")])));
        assert!(found.contains(&set(&[
            c("OD", "s"),
            c("OD", "b"),
            Atom::role("mf", "s", "t1"),
            Atom::role("mf", "b", "t1"),
        ])));
        assert!(found.contains(&set(&[c("OD", "b"), c("TD", "b")])));
    }

    #[test]
    fn functionality_pairs_and_satisfiable_sets() {
        let sig = Signature::new().with_attributes(["age"]);
        let tbox = TBox::from_iter([TBoxAssertion::AttributeFunctionality("age".into())]);
        let kb = crate::model::KnowledgeBase::new(
            sig,
            tbox,
            [
                Atom::attribute("age", "s", TypedValue::integer(3)),
                Atom::attribute("age", "s", TypedValue::integer(4)),
            ],
        )
        .unwrap();
        let v = violation_sets(kb.tbox(), kb.abox());
        assert_eq!(v.len(), 1);
        assert_eq!(&v[0].atoms, kb.abox());

        let ex = parse_kb(EXAMPLE).unwrap();
        let cl = closure(ex.tbox(), ex.abox());
        assert!(violation_sets(ex.tbox(), cl.atoms()).is_empty());
    }

    #[test]
    fn satisfiability_examples() {
        let kb = parse_kb(EXAMPLE).unwrap();
        assert!(is_satisfiable(kb.tbox(), kb.abox()));
        let mut with_rd = kb.abox().clone();
        with_rd.insert(c("RD", "p"));
        assert!(!is_satisfiable(kb.tbox(), &with_rd));
        assert!(is_satisfiable(kb.tbox(), &BTreeSet::new()));
    }

    #[test]
    fn empty_concepts_through_anonymous_fillers() {
        // every p-filler is both B and C, which are disjoint
        let kb = parse_kb(
            "SIGNATURE concept A. concept B. concept C. role p.
             TBOX A ISA exists p. exists inv(p) ISA B. exists inv(p) ISA C. B ISA not C.
             ABOX A(x).",
        )
        .unwrap();
        assert!(!is_satisfiable(kb.tbox(), kb.abox()));
        let v = violation_sets(kb.tbox(), kb.abox());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].atoms, set(&[c("A", "x")]));
    }

    #[test]
    fn role_disjointness_with_inverse() {
        let kb = parse_kb(
            "SIGNATURE role p. role q. TBOX inv(p) ISA not q. ABOX p(a,b). q(b,a). q(a,b).",
        )
        .unwrap();
        let v = violation_sets(kb.tbox(), kb.abox());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].atoms, set(&[Atom::role("p", "a", "b"), Atom::role("q", "b", "a")]));
    }

    #[test]
    fn value_domain_violation() {
        let kb = parse_kb(
            "SIGNATURE attr u. attr v. TBOX range(v) ISA integer. attr u ISA v.
             ABOX u(a, \"x\"). v(a, 3). u(b, 4).",
        )
        .unwrap();
        let v = violation_sets(kb.tbox(), kb.abox());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].atoms, set(&[Atom::attribute("u", "a", TypedValue::string("x"))]));
    }

    #[test]
    fn violation_sets_use_subsumed_witnesses() {
        // A(x) alone clashes with C(x) through A ⊑ B, B ⊑ ¬C
        let kb = parse_kb(
            "SIGNATURE concept A. concept B. concept C.
             TBOX A ISA B. B ISA not C. ABOX A(x). B(x). C(x).",
        )
        .unwrap();
        let found: BTreeSet<BTreeSet<Atom>> = violation_sets(kb.tbox(), kb.abox())
            .into_iter()
            .map(|v| v.atoms)
            .collect();
        assert_eq!(
            found,
            BTreeSet::from([set(&[c("A", "x"), c("C", "x")]), set(&[c("B", "x"), c("C", "x")])])
        );
    }
}
