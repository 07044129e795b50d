//! Random small knowledge bases for differential tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dlevo_core::model::{
    Atom, BasicConcept, Datatype, Identification, KnowledgeBase, Path, PathStep, RoleExpr,
    Signature, TBox, TBoxAssertion, TypedValue,
};
use dlevo_core::reasoner::Reasoner;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RUNNING_EXAMPLE: &str = "\
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

pub const CHAIN_EXAMPLE: &str = "\
SIGNATURE concept B. concept C. concept D. concept E.
TBOX B ISA C. C ISA D. E ISA D.
ABOX B(a). E(a).
";

const CONCEPTS: [&str; 4] = ["A", "B", "C", "D"];
const ROLES: [&str; 2] = ["p", "q"];
const ATTRIBUTES: [&str; 2] = ["u", "v"];
const INDIVIDUALS: [&str; 5] = ["a", "b", "c", "d", "e"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn signature() -> Signature {
    Signature::new()
        .with_concepts(CONCEPTS)
        .with_roles(ROLES)
        .with_attributes(ATTRIBUTES)
}

fn role(rng: &mut impl Rng) -> RoleExpr {
    let name = *ROLES.choose(rng).unwrap();
    if rng.gen_bool(0.3) {
        RoleExpr::inverse(name)
    } else {
        RoleExpr::direct(name)
    }
}

fn attribute(rng: &mut impl Rng) -> String {
    ATTRIBUTES.choose(rng).unwrap().to_string()
}

fn basic(rng: &mut impl Rng) -> BasicConcept {
    match rng.gen_range(0..10) {
        0..=5 => BasicConcept::atomic(*CONCEPTS.choose(rng).unwrap()),
        6..=8 => BasicConcept::Exists(role(rng)),
        _ => BasicConcept::Domain(attribute(rng)),
    }
}

fn value(rng: &mut impl Rng) -> TypedValue {
    match rng.gen_range(0..5) {
        0 | 1 => TypedValue::integer(rng.gen_range(1..3)),
        2 => TypedValue::string("x"),
        3 => TypedValue::new("true", Datatype::Boolean).unwrap(),
        _ => TypedValue::new("1/2", Datatype::Rational).unwrap(),
    }
}

fn identification(rng: &mut impl Rng) -> Identification {
    let key = if rng.gen_bool(0.75) {
        PathStep::Role(role(rng))
    } else {
        PathStep::Attribute(attribute(rng))
    };
    let mut paths = vec![Path::single(key)];
    if rng.gen_bool(0.4) {
        let mut steps = Vec::new();
        if rng.gen_bool(0.5) {
            steps.push(PathStep::Test(basic(rng)));
        }
        steps.push(PathStep::Role(role(rng)));
        match rng.gen_range(0..3) {
            0 => steps.push(PathStep::Role(role(rng))),
            1 => steps.push(PathStep::Test(basic(rng))),
            _ => {}
        }
        paths.push(Path::new(steps).unwrap());
    }
    Identification::new(basic(rng), paths).unwrap()
}

pub fn assertion(rng: &mut impl Rng) -> TBoxAssertion {
    match rng.gen_range(0..100) {
        0..=34 => TBoxAssertion::concept_inclusion(basic(rng), basic(rng)),
        35..=54 => TBoxAssertion::concept_disjointness(basic(rng), basic(rng)),
        55..=66 => TBoxAssertion::RoleInclusion {
            lhs: role(rng),
            rhs: role(rng),
            negated: rng.gen_bool(0.3),
        },
        67..=74 => TBoxAssertion::AttributeInclusion {
            lhs: attribute(rng),
            rhs: attribute(rng),
            negated: rng.gen_bool(0.3),
        },
        75..=81 => TBoxAssertion::ValueDomainInclusion {
            attribute: attribute(rng),
            domain: *[Datatype::Integer, Datatype::String, Datatype::Top]
                .choose(rng)
                .unwrap(),
        },
        82..=89 => TBoxAssertion::AttributeFunctionality(attribute(rng)),
        _ => TBoxAssertion::Identification(identification(rng)),
    }
}

/// Up to `max` assertions, at least one of them an identification.
pub fn tbox(rng: &mut impl Rng, max: usize) -> TBox {
    let n = rng.gen_range(1..=max);
    let mut out = vec![TBoxAssertion::Identification(identification(rng))];
    out.extend((1..n).map(|_| assertion(rng)));
    out.into_iter().collect()
}

pub fn atom(rng: &mut impl Rng, individuals: &[&str]) -> Atom {
    let ind = |rng: &mut dyn rand::RngCore| individuals.choose(rng).unwrap().to_string();
    match rng.gen_range(0..10) {
        0..=3 => Atom::concept(*CONCEPTS.choose(rng).unwrap(), ind(rng)),
        4..=7 => Atom::role(*ROLES.choose(rng).unwrap(), ind(rng), ind(rng)),
        _ => Atom::attribute(attribute(rng), ind(rng), value(rng)),
    }
}

/// A satisfiable KB: random atoms are added one by one, skipping any
/// that would make the ABox unsatisfiable.
pub fn knowledge_base(rng: &mut impl Rng, max_tbox: usize, max_abox: usize) -> KnowledgeBase {
    let tbox = tbox(rng, max_tbox);
    let r = Reasoner::new(&tbox);
    let n = rng.gen_range(0..=max_abox);
    let individuals = &INDIVIDUALS[..rng.gen_range(2..=INDIVIDUALS.len())];
    let mut abox = BTreeSet::new();
    let ids: Vec<&TBoxAssertion> = tbox.iter().filter(|t| t.is_identification()).collect();
    if n > 0 && rng.gen_bool(0.6) {
        let t = *ids.choose(rng).unwrap();
        let x = *individuals.choose(rng).unwrap();
        for group in clash_groups(rng, t, x, x, individuals) {
            let mut next = abox.clone();
            next.extend(group);
            if next.len() <= n && r.is_satisfiable(&next) {
                abox = next;
            }
        }
    }
    for _ in 0..n * 3 {
        if abox.len() >= n {
            break;
        }
        let a = atom(rng, individuals);
        let mut next = abox.clone();
        next.insert(a);
        if r.is_satisfiable(&next) {
            abox = next;
        }
    }
    KnowledgeBase::new(signature(), tbox, abox).unwrap()
}

/// `atom` with one individual, predicate or value replaced.
fn mutate(rng: &mut impl Rng, atom: &Atom, individuals: &[&str]) -> Atom {
    let ind = individuals.choose(rng).unwrap().to_string();
    match atom.clone() {
        Atom::Concept {
            concept,
            individual,
        } => match rng.gen_bool(0.5) {
            true => Atom::concept(concept, ind),
            false => Atom::concept(*CONCEPTS.choose(rng).unwrap(), individual),
        },
        Atom::Role {
            role,
            subject,
            object,
        } => match rng.gen_range(0..3) {
            0 => Atom::role(role, ind, object),
            1 => Atom::role(role, subject, ind),
            _ => Atom::role(*ROLES.choose(rng).unwrap(), object, subject),
        },
        Atom::Attribute {
            attribute,
            subject,
            value: v,
        } => match rng.gen_range(0..3) {
            0 => Atom::attribute(attribute, ind, v),
            1 => Atom::attribute(attribute, subject, value(rng)),
            _ => Atom::attribute(ATTRIBUTES.choose(rng).unwrap().to_string(), subject, v),
        },
    }
}

/// An atom making `x` an instance of `b`.
fn member_atom(rng: &mut impl Rng, b: &BasicConcept, x: &str, individuals: &[&str]) -> Atom {
    let other = individuals.choose(rng).unwrap().to_string();
    match b {
        BasicConcept::Atomic(a) => Atom::concept(a.clone(), x),
        BasicConcept::Exists(q) if q.inverted => Atom::role(q.name.clone(), other, x),
        BasicConcept::Exists(q) => Atom::role(q.name.clone(), x, other),
        BasicConcept::Domain(u) => Atom::attribute(u.clone(), x, value(rng)),
    }
}

fn role_atom(q: &RoleExpr, x: &str, y: &str) -> Atom {
    if q.inverted {
        Atom::role(q.name.clone(), y, x)
    } else {
        Atom::role(q.name.clone(), x, y)
    }
}

/// Small groups of atoms that could clash with the KB through `t`.
fn clash_groups(rng: &mut impl Rng, t: &TBoxAssertion, x: &str, y: &str, individuals: &[&str]) -> Vec<Vec<Atom>> {
    match t {
        TBoxAssertion::ConceptInclusion { lhs, rhs, .. } => vec![
            vec![member_atom(rng, lhs, x, individuals)],
            vec![member_atom(rng, rhs, x, individuals)],
        ],
        TBoxAssertion::RoleInclusion { lhs, rhs, .. } => {
            vec![vec![role_atom(lhs, x, y)], vec![role_atom(rhs, x, y)]]
        }
        TBoxAssertion::AttributeInclusion { lhs, rhs, .. } => {
            let v = value(rng);
            vec![
                vec![Atom::attribute(lhs.clone(), x, v.clone())],
                vec![Atom::attribute(rhs.clone(), x, v)],
            ]
        }
        TBoxAssertion::ValueDomainInclusion { attribute, .. }
        | TBoxAssertion::AttributeFunctionality(attribute) => {
            vec![vec![Atom::attribute(attribute.clone(), x, value(rng))]]
        }
        TBoxAssertion::Identification(id) => {
            let mut group = vec![member_atom(rng, id.concept(), x, individuals)];
            for path in id.paths() {
                let mut at = x;
                for step in path.steps() {
                    let next = *individuals.choose(rng).unwrap();
                    match step {
                        PathStep::Role(q) => {
                            group.push(role_atom(q, at, next));
                            at = next;
                        }
                        PathStep::Attribute(u) => {
                            group.push(Atom::attribute(u.clone(), at, TypedValue::integer(1)))
                        }
                        PathStep::Test(b) => group.push(member_atom(rng, b, at, individuals)),
                    }
                }
            }
            // any non-empty part of the group may be enough
            let k = rng.gen_range(1..=group.len());
            group.shuffle(rng);
            group.truncate(k);
            vec![group]
        }
    }
}

/// Satisfiable facts that are unsatisfiable together with the KB, when
/// some can be found.
fn clashing_facts(rng: &mut impl Rng, kb: &KnowledgeBase, individuals: &[&str]) -> Vec<Atom> {
    let r = Reasoner::new(kb.tbox());
    let mut candidates = Vec::new();
    for t in kb.tbox().iter().filter(|t| !t.is_positive()) {
        for _ in 0..6 {
            let x = *individuals.choose(rng).unwrap();
            let y = *individuals.choose(rng).unwrap();
            for group in clash_groups(rng, t, x, y, individuals) {
                if r.is_satisfiable(&group) && !r.is_satisfiable(kb.abox().iter().chain(&group)) {
                    candidates.push(group);
                }
            }
        }
    }
    candidates.choose(rng).cloned().unwrap_or_default()
}

/// One to `max` facts over the KB individuals and one fresh individual.
/// Most are entailed atoms or small mutations of them, which makes
/// conflicts with the KB likely.
pub fn facts(rng: &mut impl Rng, kb: &KnowledgeBase, max: usize) -> Vec<Atom> {
    let closure: Vec<Atom> = Reasoner::new(kb.tbox())
        .closure(kb.abox())
        .into_atoms()
        .into_iter()
        .collect();
    let mut inds: Vec<&str> = INDIVIDUALS.to_vec();
    inds.push("f");
    if rng.gen_bool(0.5) {
        let mut out = clashing_facts(rng, kb, &inds);
        if !out.is_empty() && out.len() < max && rng.gen_bool(0.3) {
            out.push(atom(rng, &inds));
        }
        if !out.is_empty() && out.len() <= max {
            return out;
        }
    }
    let n = rng.gen_range(1..=max);
    (0..n)
        .map(|_| {
            if closure.is_empty() {
                return atom(rng, &inds);
            }
            let base = closure.choose(rng).unwrap();
            match rng.gen_range(0..10) {
                0..=2 => base.clone(),
                3..=7 => mutate(rng, base, &inds),
                _ => atom(rng, &inds),
            }
        })
        .collect()
}

/// A random ABox whose closure equals that of `kb`: the original atoms
/// plus some entailed ones.
pub fn closed_variant(rng: &mut impl Rng, kb: &KnowledgeBase) -> KnowledgeBase {
    let closure = Reasoner::new(kb.tbox()).closure(kb.abox());
    let mut abox = kb.abox().clone();
    for a in closure.atoms() {
        if rng.gen_bool(0.5) {
            abox.insert(a.clone());
        }
    }
    kb.with_abox(abox).unwrap()
}
