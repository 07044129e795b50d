//! Worked examples with hand-checked results.

mod common;

use std::collections::BTreeSet;

use dlevo_core::evolution::{compute_deletion, compute_insertion};
use dlevo_core::model::{Atom, KnowledgeBase};
use dlevo_core::oracle::{self, ChangeKind, DEFAULT_BOUND};
use dlevo_core::parser::{parse_facts, parse_kb, serialize_kb};
use dlevo_core::reasoner::Reasoner;

fn running() -> KnowledgeBase {
    parse_kb(include_str!("data/running_example.kb")).unwrap()
}

fn facts(kb: &KnowledgeBase, text: &str) -> Vec<Atom> {
    parse_facts(text, kb.signature()).unwrap()
}

fn set(kb: &KnowledgeBase, text: &str) -> BTreeSet<Atom> {
    facts(kb, text).into_iter().collect()
}

fn closure(kb: &KnowledgeBase, text: &str) -> BTreeSet<Atom> {
    Reasoner::new(kb.tbox()).closure(&facts(kb, text)).into_atoms()
}

#[test]
fn canonical_serialization() {
    let kb = running();
    let text = serialize_kb(&kb);
    assert_eq!(text, include_str!("data/running_example.canonical"));
    assert_eq!(parse_kb(&text).unwrap(), kb);
}

#[test]
fn running_example_closure() {
    let kb = running();
    let expected = set(&kb, "OD(s). TM(s). mf(s,t1). FT(t1). TD(b). TM(b). TM(p).");
    assert_eq!(Reasoner::new(kb.tbox()).closure(kb.abox()).into_atoms(), expected);
    assert_eq!(oracle::closure(kb.tbox(), kb.abox()), expected);
}

#[test]
fn insertion_with_conflicts() {
    let kb = running();
    let f1 = facts(&kb, "RD(p). OD(b). mf(b,t1).");
    let res = compute_insertion(&kb, &f1).unwrap();
    assert_eq!(res.closure(), &closure(&kb, "RD(p). OD(b). mf(b,t1). TM(s)."));
    assert_eq!(res.closure(), &set(&kb, "RD(p). OD(b). TM(b). mf(b,t1). FT(t1). TM(s)."));
    assert_eq!(res.dropped, set(&kb, "TM(p). TD(b). OD(s). mf(s,t1)."));
    assert_eq!(res.added, set(&kb, "RD(p). OD(b). mf(b,t1)."));

    let minimal: Vec<BTreeSet<Atom>> = oracle::enumerate_minimal(&kb, &f1, ChangeKind::Insertion, DEFAULT_BOUND)
        .unwrap()
        .into_iter()
        .map(|m| m.closed_abox)
        .collect();
    let k1 = closure(&kb, "RD(p). OD(b). mf(b,t1). TM(s). mf(s,t1).");
    let k2 = closure(&kb, "RD(p). OD(b). mf(b,t1). OD(s).");
    assert_eq!(minimal.len(), 2);
    assert!(minimal.contains(&k1) && minimal.contains(&k2));
    let both: BTreeSet<Atom> = k1.intersection(&k2).cloned().collect();
    assert_eq!(res.closure(), &both);
}

#[test]
fn insertion_without_conflicts() {
    let kb = running();
    let res = compute_insertion(&kb, &facts(&kb, "TM(c).")).unwrap();
    let mut expected = Reasoner::new(kb.tbox()).closure(kb.abox()).into_atoms();
    expected.insert(Atom::concept("TM", "c"));
    assert_eq!(res.closure(), &expected);
    assert!(res.closure().contains(&Atom::concept("TD", "b")));
    assert!(res.closure().contains(&Atom::concept("TM", "p")));
}

#[test]
fn deletion_after_insertion() {
    let kb = running();
    let k3 = kb.with_abox(facts(&kb, "RD(p). OD(b). mf(b,t1). TM(s).")).unwrap();
    let res = compute_deletion(&k3, &facts(&kb, "TM(b). mf(b,t1).")).unwrap();
    // FT(t1) does not entail mf(b,t1) on its own, so it stays
    assert_eq!(res.closure(), &set(&kb, "RD(p). OD(b). TM(b). TM(s). FT(t1)."));
    assert_eq!(res.dropped, set(&kb, "mf(b,t1)."));
    let oracle = oracle::widtio(&k3, &facts(&kb, "TM(b). mf(b,t1)."), ChangeKind::Deletion, DEFAULT_BOUND).unwrap();
    assert_eq!(oracle.closure(), res.closure());
}

#[test]
fn deletion_on_a_chain() {
    let kb = parse_kb(common::CHAIN_EXAMPLE).unwrap();
    let res = compute_deletion(&kb, &facts(&kb, "C(a). D(a).")).unwrap();
    assert_eq!(res.closure(), &set(&kb, "E(a). D(a)."));
    assert_eq!(res.closure(), &closure(&kb, "E(a)."));

    let first = compute_deletion(&kb, &facts(&kb, "C(a).")).unwrap();
    assert_eq!(first.closure(), &set(&kb, "E(a). D(a)."));
    let second = compute_deletion(&first.kb, &facts(&kb, "D(a).")).unwrap();
    assert!(second.closure().is_empty());
    assert_ne!(res.closure(), second.closure());
}
