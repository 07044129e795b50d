//! Signature, TBox, ABox and atom vocabulary.
//!
//! Every type here is an immutable value once built. Constructors that can
//! break a structural invariant return [`ModelError`]; name resolution
//! against a [`Signature`] happens when a [`KnowledgeBase`] is assembled.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Words with a fixed meaning in the concrete syntax. They can never be
/// used as concept, role, attribute or object names.
pub const RESERVED_WORDS: &[&str] = &[
    "SIGNATURE", "TBOX", "ABOX", "concept", "role", "attr", "ISA", "not", "funct", "id", "exists",
    "inv", "delta", "range", "test", "o", "integer", "string", "boolean", "rational", "top",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("undeclared {expected} name `{name}`")]
    Undeclared { name: String, expected: Category },
    #[error("`{name}` is declared as a {found}, expected a {expected}")]
    CategoryMismatch {
        name: String,
        expected: Category,
        found: Category,
    },
    #[error("`{0}` is declared more than once")]
    DuplicateDeclaration(String),
    #[error("identification assertion is not local: no path has length 1")]
    NonLocalIdentification,
    #[error("identification assertion needs at least one path")]
    EmptyIdentification,
    #[error("path is empty")]
    EmptyPath,
    #[error("attribute step `{0}` must be the last step of a path")]
    AttributeStepNotFinal(String),
    #[error("`{lexical}` is not a valid {datatype} literal")]
    BadLiteral { lexical: String, datatype: Datatype },
}

/// The kind of symbol an identifier is declared as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Concept,
    Role,
    Attribute,
    Object,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Concept => "concept",
            Category::Role => "role",
            Category::Attribute => "attribute",
            Category::Object => "object constant",
        })
    }
}

pub fn is_valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED_WORDS.contains(&name)
}

fn check_identifier(name: &str) -> Result<(), ModelError> {
    if is_valid_identifier(name) {
        Ok(())
    } else {
        Err(ModelError::InvalidIdentifier(name.to_string()))
    }
}

/// Value domains. `Top` is the union of all the others and never types a
/// concrete value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    Top,
    Integer,
    String,
    Boolean,
    Rational,
}

impl Datatype {
    pub const ALL: [Datatype; 5] = [
        Datatype::Top,
        Datatype::Integer,
        Datatype::String,
        Datatype::Boolean,
        Datatype::Rational,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Datatype::Top => "top",
            Datatype::Integer => "integer",
            Datatype::String => "string",
            Datatype::Boolean => "boolean",
            Datatype::Rational => "rational",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Datatype> {
        Datatype::ALL.into_iter().find(|d| d.keyword() == word)
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A value constant. The lexical form is stored normalized, so derived
/// equality is equality of values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedValue {
    datatype: Datatype,
    lexical: String,
}

impl TypedValue {
    pub fn new(lexical: &str, datatype: Datatype) -> Result<TypedValue, ModelError> {
        let bad = || ModelError::BadLiteral {
            lexical: lexical.to_string(),
            datatype,
        };
        let lexical = match datatype {
            Datatype::Top => return Err(bad()),
            Datatype::Integer => normalize_integer(lexical).ok_or_else(bad)?,
            Datatype::Boolean => match lexical {
                "true" | "1" => "true".to_string(),
                "false" | "0" => "false".to_string(),
                _ => return Err(bad()),
            },
            Datatype::Rational => normalize_rational(lexical).ok_or_else(bad)?,
            Datatype::String => lexical.to_string(),
        };
        Ok(TypedValue { datatype, lexical })
    }

    pub fn integer(n: i64) -> TypedValue {
        TypedValue {
            datatype: Datatype::Integer,
            lexical: n.to_string(),
        }
    }

    pub fn string(s: &str) -> TypedValue {
        TypedValue {
            datatype: Datatype::String,
            lexical: s.to_string(),
        }
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    /// Re-normalizes the lexical form. Always returns an equal value.
    pub fn normalized(&self) -> TypedValue {
        TypedValue::new(&self.lexical, self.datatype).expect("stored lexical forms are valid")
    }
}

fn normalize_integer(lexical: &str) -> Option<String> {
    let (negative, digits) = match lexical.as_bytes().first()? {
        b'+' => (false, &lexical[1..]),
        b'-' => (true, &lexical[1..]),
        _ => (false, lexical),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let trimmed = digits.trim_start_matches('0');
    Some(match (negative, trimmed) {
        (_, "") => "0".to_string(),
        (true, t) => format!("-{t}"),
        (false, t) => t.to_string(),
    })
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

fn normalize_rational(lexical: &str) -> Option<String> {
    let (num, den) = if let Some((n, d)) = lexical.split_once('/') {
        let n: i128 = normalize_integer(n)?.parse().ok()?;
        let d: i128 = normalize_integer(d)?.parse().ok()?;
        (n, d)
    } else if let Some((int, frac)) = lexical.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
            return None;
        }
        let negative = int.starts_with('-');
        let int: i128 = normalize_integer(int)?.parse().ok()?;
        let scale = 10i128.checked_pow(frac.len() as u32)?;
        let frac: i128 = frac.parse().ok()?;
        let magnitude = int.abs().checked_mul(scale)?.checked_add(frac)?;
        (if negative { -magnitude } else { magnitude }, scale)
    } else {
        (normalize_integer(lexical)?.parse().ok()?, 1)
    };
    if den == 0 {
        return None;
    }
    let g = gcd(num, den).max(1);
    let (mut num, mut den) = (num / g, den / g);
    if den < 0 {
        num = -num;
        den = -den;
    }
    Some(if den == 1 {
        num.to_string()
    } else {
        format!("{num}/{den}")
    })
}

impl fmt::Display for TypedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.datatype {
            Datatype::Integer => f.write_str(&self.lexical),
            Datatype::String => {
                f.write_str("\"")?;
                for c in self.lexical.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            dt => write!(f, "{}^^{}", self.lexical, dt),
        }
    }
}

/// `Q`: an atomic role, possibly inverted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleExpr {
    pub name: String,
    pub inverted: bool,
}

impl RoleExpr {
    pub fn direct(name: impl Into<String>) -> RoleExpr {
        RoleExpr {
            name: name.into(),
            inverted: false,
        }
    }

    pub fn inverse(name: impl Into<String>) -> RoleExpr {
        RoleExpr {
            name: name.into(),
            inverted: true,
        }
    }

    pub fn inv(&self) -> RoleExpr {
        RoleExpr {
            name: self.name.clone(),
            inverted: !self.inverted,
        }
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "inv({})", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// `B`: atomic concept, unqualified existential, or attribute domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicConcept {
    Atomic(String),
    Exists(RoleExpr),
    Domain(String),
}

impl BasicConcept {
    pub fn atomic(name: impl Into<String>) -> BasicConcept {
        BasicConcept::Atomic(name.into())
    }
}

impl fmt::Display for BasicConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicConcept::Atomic(a) => f.write_str(a),
            BasicConcept::Exists(q) => write!(f, "exists {q}"),
            BasicConcept::Domain(u) => write!(f, "delta({u})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathStep {
    Role(RoleExpr),
    Attribute(String),
    Test(BasicConcept),
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathStep::Role(q) => write!(f, "{q}"),
            PathStep::Attribute(u) => write!(f, "attr {u}"),
            PathStep::Test(b) => write!(f, "test({b})"),
        }
    }
}

/// A non-empty composition of steps. Attribute steps can only come last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    steps: Vec<PathStep>,
}

impl Path {
    pub fn new(steps: Vec<PathStep>) -> Result<Path, ModelError> {
        if steps.is_empty() {
            return Err(ModelError::EmptyPath);
        }
        for step in &steps[..steps.len() - 1] {
            if let PathStep::Attribute(u) = step {
                return Err(ModelError::AttributeStepNotFinal(u.clone()));
            }
        }
        Ok(Path { steps })
    }

    pub fn single(step: PathStep) -> Path {
        Path { steps: vec![step] }
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    /// Number of role and attribute steps; tests do not count.
    pub fn len(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| !matches!(s, PathStep::Test(_)))
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" o ")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

/// `(id B π1,...,πn)`, guaranteed local.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identification {
    concept: BasicConcept,
    paths: Vec<Path>,
}

impl Identification {
    pub fn new(concept: BasicConcept, paths: Vec<Path>) -> Result<Identification, ModelError> {
        if paths.is_empty() {
            return Err(ModelError::EmptyIdentification);
        }
        if !paths.iter().any(|p| p.len() == 1) {
            return Err(ModelError::NonLocalIdentification);
        }
        Ok(Identification { concept, paths })
    }

    pub fn concept(&self) -> &BasicConcept {
        &self.concept
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TBoxAssertion {
    ConceptInclusion {
        lhs: BasicConcept,
        rhs: BasicConcept,
        negated: bool,
    },
    RoleInclusion {
        lhs: RoleExpr,
        rhs: RoleExpr,
        negated: bool,
    },
    AttributeInclusion {
        lhs: String,
        rhs: String,
        negated: bool,
    },
    /// `ρ(U) ⊑ T`
    ValueDomainInclusion { attribute: String, domain: Datatype },
    AttributeFunctionality(String),
    Identification(Identification),
}

impl TBoxAssertion {
    pub fn concept_inclusion(lhs: BasicConcept, rhs: BasicConcept) -> TBoxAssertion {
        TBoxAssertion::ConceptInclusion {
            lhs,
            rhs,
            negated: false,
        }
    }

    pub fn concept_disjointness(lhs: BasicConcept, rhs: BasicConcept) -> TBoxAssertion {
        TBoxAssertion::ConceptInclusion {
            lhs,
            rhs,
            negated: true,
        }
    }

    /// Positive inclusions are the only assertions that derive atoms.
    pub fn is_positive(&self) -> bool {
        match self {
            TBoxAssertion::ConceptInclusion { negated, .. }
            | TBoxAssertion::RoleInclusion { negated, .. }
            | TBoxAssertion::AttributeInclusion { negated, .. } => !negated,
            _ => false,
        }
    }

    pub fn is_identification(&self) -> bool {
        matches!(self, TBoxAssertion::Identification(_))
    }
}

impl fmt::Display for TBoxAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let not = |negated: &bool| if *negated { "not " } else { "" };
        match self {
            TBoxAssertion::ConceptInclusion { lhs, rhs, negated } => {
                write!(f, "{lhs} ISA {}{rhs}", not(negated))
            }
            TBoxAssertion::RoleInclusion { lhs, rhs, negated } => {
                write!(f, "{lhs} ISA {}{rhs}", not(negated))
            }
            TBoxAssertion::AttributeInclusion { lhs, rhs, negated } => {
                write!(f, "attr {lhs} ISA {}{rhs}", not(negated))
            }
            TBoxAssertion::ValueDomainInclusion { attribute, domain } => {
                write!(f, "range({attribute}) ISA {domain}")
            }
            TBoxAssertion::AttributeFunctionality(u) => write!(f, "funct {u}"),
            TBoxAssertion::Identification(id) => {
                write!(f, "id {}: ", id.concept)?;
                for (i, p) in id.paths.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// A ground ABox assertion. Role atoms always use the plain role name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Concept {
        concept: String,
        individual: String,
    },
    Role {
        role: String,
        subject: String,
        object: String,
    },
    Attribute {
        attribute: String,
        subject: String,
        value: TypedValue,
    },
}

impl Atom {
    pub fn concept(concept: impl Into<String>, individual: impl Into<String>) -> Atom {
        Atom::Concept {
            concept: concept.into(),
            individual: individual.into(),
        }
    }

    pub fn role(
        role: impl Into<String>,
        subject: impl Into<String>,
        object: impl Into<String>,
    ) -> Atom {
        Atom::Role {
            role: role.into(),
            subject: subject.into(),
            object: object.into(),
        }
    }

    pub fn attribute(
        attribute: impl Into<String>,
        subject: impl Into<String>,
        value: TypedValue,
    ) -> Atom {
        Atom::Attribute {
            attribute: attribute.into(),
            subject: subject.into(),
            value,
        }
    }

    pub fn predicate(&self) -> &str {
        match self {
            Atom::Concept { concept, .. } => concept,
            Atom::Role { role, .. } => role,
            Atom::Attribute { attribute, .. } => attribute,
        }
    }

    /// Object constants mentioned by the atom (values excluded).
    pub fn individuals(&self) -> impl Iterator<Item = &str> {
        let (first, second) = match self {
            Atom::Concept { individual, .. } => (individual.as_str(), None),
            Atom::Role {
                subject, object, ..
            } => (subject.as_str(), Some(object.as_str())),
            Atom::Attribute { subject, .. } => (subject.as_str(), None),
        };
        std::iter::once(first).chain(second)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Concept {
                concept,
                individual,
            } => write!(f, "{concept}({individual})"),
            Atom::Role {
                role,
                subject,
                object,
            } => write!(f, "{role}({subject},{object})"),
            Atom::Attribute {
                attribute,
                subject,
                value,
            } => write!(f, "{attribute}({subject},{value})"),
        }
    }
}

/// Object constants occurring in a set of atoms.
pub fn atoms_individuals<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<String> {
    atoms
        .into_iter()
        .flat_map(|a| a.individuals())
        .map(str::to_string)
        .collect()
}

/// Declared symbols. Concept, role and attribute names are pairwise
/// disjoint; object constants may not reuse any of them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    concepts: BTreeSet<String>,
    roles: BTreeSet<String>,
    attributes: BTreeSet<String>,
    objects: BTreeSet<String>,
    values: BTreeSet<TypedValue>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare(&mut self, category: Category, name: &str) -> Result<(), ModelError> {
        check_identifier(name)?;
        if let Some(existing) = self.category_of(name) {
            if category == Category::Object && existing == Category::Object {
                return Ok(());
            }
            return Err(if existing == category || category != Category::Object {
                ModelError::DuplicateDeclaration(name.to_string())
            } else {
                ModelError::CategoryMismatch {
                    name: name.to_string(),
                    expected: category,
                    found: existing,
                }
            });
        }
        let set = match category {
            Category::Concept => &mut self.concepts,
            Category::Role => &mut self.roles,
            Category::Attribute => &mut self.attributes,
            Category::Object => &mut self.objects,
        };
        set.insert(name.to_string());
        Ok(())
    }

    pub fn with_concepts<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.declare(Category::Concept, n).expect("valid concept name");
        }
        self
    }

    pub fn with_roles<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.declare(Category::Role, n).expect("valid role name");
        }
        self
    }

    pub fn with_attributes<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for n in names {
            self.declare(Category::Attribute, n).expect("valid attribute name");
        }
        self
    }

    pub fn category_of(&self, name: &str) -> Option<Category> {
        if self.concepts.contains(name) {
            Some(Category::Concept)
        } else if self.roles.contains(name) {
            Some(Category::Role)
        } else if self.attributes.contains(name) {
            Some(Category::Attribute)
        } else if self.objects.contains(name) {
            Some(Category::Object)
        } else {
            None
        }
    }

    pub fn concepts(&self) -> &BTreeSet<String> {
        &self.concepts
    }

    pub fn roles(&self) -> &BTreeSet<String> {
        &self.roles
    }

    pub fn attributes(&self) -> &BTreeSet<String> {
        &self.attributes
    }

    pub fn objects(&self) -> &BTreeSet<String> {
        &self.objects
    }

    pub fn values(&self) -> &BTreeSet<TypedValue> {
        &self.values
    }

    pub fn expect(&self, name: &str, expected: Category) -> Result<(), ModelError> {
        match self.category_of(name) {
            Some(found) if found == expected => Ok(()),
            Some(found) => Err(ModelError::CategoryMismatch {
                name: name.to_string(),
                expected,
                found,
            }),
            None => Err(ModelError::Undeclared {
                name: name.to_string(),
                expected,
            }),
        }
    }

    /// An object constant is acceptable if it is new or already an object.
    pub fn expect_object(&self, name: &str) -> Result<(), ModelError> {
        check_identifier(name)?;
        match self.category_of(name) {
            None | Some(Category::Object) => Ok(()),
            Some(found) => Err(ModelError::CategoryMismatch {
                name: name.to_string(),
                expected: Category::Object,
                found,
            }),
        }
    }

    pub fn check_role(&self, q: &RoleExpr) -> Result<(), ModelError> {
        self.expect(&q.name, Category::Role)
    }

    pub fn check_basic(&self, b: &BasicConcept) -> Result<(), ModelError> {
        match b {
            BasicConcept::Atomic(a) => self.expect(a, Category::Concept),
            BasicConcept::Exists(q) => self.check_role(q),
            BasicConcept::Domain(u) => self.expect(u, Category::Attribute),
        }
    }

    pub fn check_path(&self, path: &Path) -> Result<(), ModelError> {
        for step in path.steps() {
            match step {
                PathStep::Role(q) => self.check_role(q)?,
                PathStep::Attribute(u) => self.expect(u, Category::Attribute)?,
                PathStep::Test(b) => self.check_basic(b)?,
            }
        }
        Ok(())
    }

    pub fn check_assertion(&self, t: &TBoxAssertion) -> Result<(), ModelError> {
        match t {
            TBoxAssertion::ConceptInclusion { lhs, rhs, .. } => {
                self.check_basic(lhs)?;
                self.check_basic(rhs)
            }
            TBoxAssertion::RoleInclusion { lhs, rhs, .. } => {
                self.check_role(lhs)?;
                self.check_role(rhs)
            }
            TBoxAssertion::AttributeInclusion { lhs, rhs, .. } => {
                self.expect(lhs, Category::Attribute)?;
                self.expect(rhs, Category::Attribute)
            }
            TBoxAssertion::ValueDomainInclusion { attribute, .. }
            | TBoxAssertion::AttributeFunctionality(attribute) => {
                self.expect(attribute, Category::Attribute)
            }
            TBoxAssertion::Identification(id) => {
                self.check_basic(id.concept())?;
                id.paths().iter().try_for_each(|p| self.check_path(p))
            }
        }
    }

    pub fn check_atom(&self, atom: &Atom) -> Result<(), ModelError> {
        match atom {
            Atom::Concept {
                concept,
                individual,
            } => {
                self.expect(concept, Category::Concept)?;
                self.expect_object(individual)
            }
            Atom::Role {
                role,
                subject,
                object,
            } => {
                self.expect(role, Category::Role)?;
                self.expect_object(subject)?;
                self.expect_object(object)
            }
            Atom::Attribute {
                attribute, subject, ..
            } => {
                self.expect(attribute, Category::Attribute)?;
                self.expect_object(subject)
            }
        }
    }

    /// Adds the constants of an already-checked atom.
    fn register(&mut self, atom: &Atom) {
        for ind in atom.individuals() {
            if !self.objects.contains(ind) {
                self.objects.insert(ind.to_string());
            }
        }
        if let Atom::Attribute { value, .. } = atom {
            self.values.insert(value.clone());
        }
    }
}

/// A set of TBox assertions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TBox {
    assertions: BTreeSet<TBoxAssertion>,
}

/// `T⁺`, `T⁻` and `T_id` of a TBox.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TBoxPartition {
    pub positive: BTreeSet<TBoxAssertion>,
    pub negative: BTreeSet<TBoxAssertion>,
    pub identification: BTreeSet<TBoxAssertion>,
}

impl TBox {
    pub fn new() -> TBox {
        TBox::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TBoxAssertion> {
        self.assertions.iter()
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn contains(&self, t: &TBoxAssertion) -> bool {
        self.assertions.contains(t)
    }

    pub fn assertions(&self) -> &BTreeSet<TBoxAssertion> {
        &self.assertions
    }

    /// Splits into positive inclusions, constraints that never derive
    /// atoms (negated inclusions, functionality, value domains), and
    /// identification assertions.
    pub fn partition(&self) -> TBoxPartition {
        let mut part = TBoxPartition::default();
        for t in &self.assertions {
            let target = if t.is_positive() {
                &mut part.positive
            } else if t.is_identification() {
                &mut part.identification
            } else {
                &mut part.negative
            };
            target.insert(t.clone());
        }
        part
    }

    /// `T⁺ ∪ {t}`.
    pub fn positive_with(&self, t: &TBoxAssertion) -> TBox {
        self.iter()
            .filter(|a| a.is_positive())
            .chain(std::iter::once(t))
            .cloned()
            .collect()
    }
}

impl FromIterator<TBoxAssertion> for TBox {
    fn from_iter<I: IntoIterator<Item = TBoxAssertion>>(iter: I) -> Self {
        TBox {
            assertions: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a TBox {
    type Item = &'a TBoxAssertion;
    type IntoIter = std::collections::btree_set::Iter<'a, TBoxAssertion>;

    fn into_iter(self) -> Self::IntoIter {
        self.assertions.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    signature: Signature,
    tbox: TBox,
    abox: BTreeSet<Atom>,
}

impl KnowledgeBase {
    /// Resolves every name against `signature`. Object and value constants
    /// of the ABox are added to the signature.
    pub fn new(
        mut signature: Signature,
        tbox: TBox,
        abox: impl IntoIterator<Item = Atom>,
    ) -> Result<KnowledgeBase, ModelError> {
        for t in &tbox {
            signature.check_assertion(t)?;
        }
        let abox: BTreeSet<Atom> = abox.into_iter().collect();
        for atom in &abox {
            signature.check_atom(atom)?;
            signature.register(atom);
        }
        Ok(KnowledgeBase {
            signature,
            tbox,
            abox,
        })
    }

    /// Same signature and TBox, new ABox.
    pub fn with_abox(
        &self,
        abox: impl IntoIterator<Item = Atom>,
    ) -> Result<KnowledgeBase, ModelError> {
        let mut signature = self.signature.clone();
        let abox: BTreeSet<Atom> = abox.into_iter().collect();
        for atom in &abox {
            signature.check_atom(atom)?;
            signature.register(atom);
        }
        Ok(KnowledgeBase {
            signature,
            tbox: self.tbox.clone(),
            abox,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn tbox(&self) -> &TBox {
        &self.tbox
    }

    pub fn abox(&self) -> &BTreeSet<Atom> {
        &self.abox
    }
}
