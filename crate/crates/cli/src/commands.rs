use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use dlevo_core::evolution::{compute_deletion, compute_insertion, EvolutionError, EvolutionResult};
use dlevo_core::model::{Atom, KnowledgeBase};
use dlevo_core::oracle::{self, ChangeKind, OracleError};
use dlevo_core::parser::{self, parse_changelog, parse_facts, parse_kb, serialize_atoms, serialize_kb};
use dlevo_core::reasoner::{Reasoner, ViolationSet};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Unsat,
    ParseError,
    PreconditionError,
    BoundExceeded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unsat => "unsat",
            Status::ParseError => "parse-error",
            Status::PreconditionError => "precondition-error",
            Status::BoundExceeded => "bound-exceeded",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Unsat => 1,
            Status::ParseError => 2,
            Status::PreconditionError => 3,
            Status::BoundExceeded => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub status: Status,
    pub text: String,
    pub atoms: Vec<String>,
    pub dropped: Vec<String>,
    pub added: Vec<String>,
    pub violations: Vec<Value>,
    pub journal: Option<Vec<Value>>,
    pub diagnostics: Vec<String>,
}

impl Report {
    fn new(status: Status) -> Report {
        Report {
            status,
            text: String::new(),
            atoms: Vec::new(),
            dropped: Vec::new(),
            added: Vec::new(),
            violations: Vec::new(),
            journal: None,
            diagnostics: Vec::new(),
        }
    }

    fn failure(status: Status, message: impl Into<String>) -> Report {
        let mut r = Report::new(status);
        r.diagnostics.push(message.into());
        r
    }

    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "status": self.status.as_str(),
            "atoms": self.atoms,
            "dropped": self.dropped,
            "added": self.added,
            "violations": self.violations,
            "diagnostics": self.diagnostics,
        });
        if let Some(journal) = &self.journal {
            doc["journal"] = Value::Array(journal.clone());
        }
        doc
    }
}

fn read(path: &Path) -> Result<String, Report> {
    fs::read_to_string(path).map_err(|e| {
        Report::failure(Status::ParseError, format!("cannot read {}: {e}", path.display()))
    })
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Report> {
    let text = read(path)?;
    parse_kb(&text).map_err(|e| parse_failure(path, e))
}

fn parse_failure(path: &Path, e: parser::ParseError) -> Report {
    Report::failure(Status::ParseError, format!("{}:{e}", path.display()))
}

/// Atoms as sorted strings, without the terminating dot.
fn lines(atoms: &BTreeSet<Atom>) -> Vec<String> {
    let mut v: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
    v.sort();
    v
}

fn violation_json(v: &ViolationSet) -> Value {
    json!({
        "assertion": v.violated.to_string(),
        "atoms": lines(&v.atoms),
    })
}

fn violation_line(v: &ViolationSet) -> String {
    let atoms: Vec<String> = v.atoms.iter().map(|a| a.to_string()).collect();
    format!("{}: {}\n", v.violated, atoms.join(" "))
}

pub fn validate(file: &Path) -> Report {
    let kb = match load_kb(file) {
        Ok(kb) => kb,
        Err(r) => return r,
    };
    let mut r = Report::new(Status::Ok);
    r.text = format!(
        "valid: {} TBox assertions, {} ABox atoms\n",
        kb.tbox().len(),
        kb.abox().len()
    );
    r.atoms = lines(kb.abox());
    r
}

pub fn closure(file: &Path) -> Report {
    let kb = match load_kb(file) {
        Ok(kb) => kb,
        Err(r) => return r,
    };
    let cl = Reasoner::new(kb.tbox()).closure(kb.abox());
    let mut r = Report::new(Status::Ok);
    r.atoms = lines(cl.atoms());
    r.text = serialize_atoms(cl.atoms()).iter().map(|l| format!("{l}\n")).collect();
    r
}

pub fn sat(file: &Path) -> Report {
    let kb = match load_kb(file) {
        Ok(kb) => kb,
        Err(r) => return r,
    };
    let violations = Reasoner::new(kb.tbox()).violation_sets(kb.abox());
    if violations.is_empty() {
        let mut r = Report::new(Status::Ok);
        r.text = "SAT\n".into();
        return r;
    }
    let mut r = Report::new(Status::Unsat);
    r.text = "UNSAT\n".into();
    for v in &violations {
        r.text.push_str(&violation_line(v));
    }
    r.violations = violations.iter().map(violation_json).collect();
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Insert,
    Delete,
}

fn evolution_failure(e: EvolutionError) -> Report {
    let status = match e {
        EvolutionError::UnsatisfiableKb => Status::Unsat,
        EvolutionError::UnsatisfiableFacts => Status::PreconditionError,
        EvolutionError::Model(_) => Status::ParseError,
    };
    Report::failure(status, e.to_string())
}

/// Runs one change. `bound` selects the exhaustive implementation.
fn change(kb: &KnowledgeBase, facts: &[Atom], op: Op, bound: Option<usize>) -> Result<EvolutionResult, Report> {
    // both implementations refuse unsatisfiable facts for deletion
    let r = Reasoner::new(kb.tbox());
    if op == Op::Delete && r.is_satisfiable(kb.abox()) && !r.is_satisfiable(facts) {
        return Err(evolution_failure(EvolutionError::UnsatisfiableFacts));
    }
    let Some(bound) = bound else {
        let res = match op {
            Op::Insert => compute_insertion(kb, facts),
            Op::Delete => compute_deletion(kb, facts),
        };
        return res.map_err(evolution_failure);
    };
    let kind = match op {
        Op::Insert => ChangeKind::Insertion,
        Op::Delete => ChangeKind::Deletion,
    };
    oracle::widtio(kb, facts, kind, bound).map_err(|e| match e {
        OracleError::BoundExceeded { .. } => Report::failure(Status::BoundExceeded, e.to_string()),
        OracleError::Evolution(e) => evolution_failure(e),
    })
}

fn diff_text(res: &EvolutionResult) -> String {
    if res.no_op {
        return "# noop\n".into();
    }
    let mut out = format!("# dropped: {}\n", res.dropped.len());
    for l in serialize_atoms(&res.dropped) {
        out.push_str(&format!("# - {l}\n"));
    }
    out.push_str(&format!("# added: {}\n", res.added.len()));
    for l in serialize_atoms(&res.added) {
        out.push_str(&format!("# + {l}\n"));
    }
    out
}

pub fn evolve(file: &Path, facts_file: &Path, op: Op, bound: Option<usize>) -> Report {
    let kb = match load_kb(file) {
        Ok(kb) => kb,
        Err(r) => return r,
    };
    let text = match read(facts_file) {
        Ok(t) => t,
        Err(r) => return r,
    };
    let facts = match parse_facts(&text, kb.signature()) {
        Ok(f) => f,
        Err(e) => return parse_failure(facts_file, e),
    };
    let res = match change(&kb, &facts, op, bound) {
        Ok(res) => res,
        Err(r) => return r,
    };
    let mut r = Report::new(Status::Ok);
    r.text = serialize_kb(&res.kb) + &diff_text(&res);
    r.atoms = lines(res.closure());
    r.dropped = lines(&res.dropped);
    r.added = lines(&res.added);
    r.violations = res.fired_violations.iter().map(violation_json).collect();
    r
}

pub fn apply(file: &Path, changelog: &Path, out: &Path) -> Report {
    let mut kb = match load_kb(file) {
        Ok(kb) => kb,
        Err(r) => return r,
    };
    let text = match read(changelog) {
        Ok(t) => t,
        Err(r) => return r,
    };
    let steps = match parse_changelog(&text, kb.signature()) {
        Ok(s) => s,
        Err(e) => return parse_failure(changelog, e),
    };
    let mut journal = Vec::new();
    let mut text = String::new();
    for (i, step) in steps.iter().enumerate() {
        let n = i + 1;
        let op = match step.kind {
            parser::ChangeKind::Insert => Op::Insert,
            parser::ChangeKind::Delete => Op::Delete,
        };
        let res = match change(&kb, &step.atoms, op, None) {
            Ok(res) => res,
            Err(mut r) => {
                r.diagnostics = r.diagnostics.into_iter().map(|d| format!("step {n}: {d}")).collect();
                r.text = text;
                return r;
            }
        };
        let outcome = if res.no_op {
            "noop".to_string()
        } else {
            format!("dropped {}, added {}", res.dropped.len(), res.added.len())
        };
        text.push_str(&format!("step {n}: {} {}: {outcome}\n", step.kind, step.atoms.len()));
        journal.push(json!({
            "step": n,
            "kind": step.kind.to_string(),
            "facts": step.atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "noop": res.no_op,
            "dropped": lines(&res.dropped),
            "added": lines(&res.added),
        }));
        kb = res.kb;
    }
    if let Err(e) = fs::write(out, serialize_kb(&kb)) {
        return Report::failure(Status::ParseError, format!("cannot write {}: {e}", out.display()));
    }
    let mut r = Report::new(Status::Ok);
    r.text = text;
    r.atoms = lines(kb.abox());
    r.journal = Some(journal);
    r
}
