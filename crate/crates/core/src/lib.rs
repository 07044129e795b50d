//! Instance-level evolution of DL-Lite_{A,id} knowledge bases under the
//! WIDTIO ("when in doubt, throw it out") semantics.
//!
//! * [`model`]: signature, TBox, ABox and atoms.
//! * [`parser`]: the textual KB, fact-list and changelog formats.
//! * [`reasoner`]: closure, single-atom entailment, violation sets.
//! * [`evolution`]: polynomial insertion and deletion.
//! * [`oracle`]: exhaustive reference implementation for small inputs.

pub mod evolution;
pub mod model;
pub mod oracle;
pub mod parser;
pub mod reasoner;

pub use evolution::{compute_deletion, compute_insertion, EvolutionError, EvolutionResult};
pub use model::{Atom, KnowledgeBase, Signature, TBox, TBoxAssertion};
pub use parser::{parse_facts, parse_kb, serialize_kb, ParseError};
pub use reasoner::{ClosedAtomSet, Reasoner, ViolationSet};
