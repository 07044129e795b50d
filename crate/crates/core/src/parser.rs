//! Text format for knowledge bases, fact lists and changelogs.
//!
//! ```text
//! SIGNATURE
//! concept OD. concept TM. role mf.
//! TBOX
//! OD ISA TM.
//! exists inv(mf) ISA FT.
//! id OD: mf.
//! ABOX
//! OD(s). mf(s,t1).
//! ```
//!
//! Names must be declared before use. `#` starts a comment that runs to the
//! end of the line. Every parse stops at the first error.

use std::fmt;

use thiserror::Error;

use crate::model::{
    Atom, BasicConcept, Category, Datatype, Identification, KnowledgeBase, ModelError, Path,
    PathStep, RoleExpr, Signature, TBox, TBoxAssertion, TypedValue, RESERVED_WORDS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntactic,
    UndeclaredName,
    CategoryMismatch,
    NonLocalId,
    BadLiteral,
    DuplicateDeclaration,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Lexical => "lexical",
            ParseErrorKind::Syntactic => "syntactic",
            ParseErrorKind::UndeclaredName => "undeclared-name",
            ParseErrorKind::CategoryMismatch => "category-mismatch",
            ParseErrorKind::NonLocalId => "non-local-id",
            ParseErrorKind::BadLiteral => "bad-literal",
            ParseErrorKind::DuplicateDeclaration => "duplicate-declaration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    fn at(pos: Pos, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            kind,
            message: message.into(),
        }
    }

    fn model(pos: Pos, err: ModelError) -> ParseError {
        let kind = match err {
            ModelError::Undeclared { .. } => ParseErrorKind::UndeclaredName,
            ModelError::CategoryMismatch { .. } => ParseErrorKind::CategoryMismatch,
            ModelError::DuplicateDeclaration(_) => ParseErrorKind::DuplicateDeclaration,
            ModelError::NonLocalIdentification => ParseErrorKind::NonLocalId,
            ModelError::BadLiteral { .. } => ParseErrorKind::BadLiteral,
            ModelError::InvalidIdentifier(_)
            | ModelError::EmptyIdentification
            | ModelError::EmptyPath
            | ModelError::AttributeStepNotFinal(_) => ParseErrorKind::Syntactic,
        };
        ParseError::at(pos, kind, err.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Dot,
    LParen,
    RParen,
    Comma,
    Colon,
    Semi,
    Caret2,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Str(_) => f.write_str("string literal"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Caret2 => f.write_str("`^^`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let single = match c {
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = single {
            bump!();
            out.push((tok, pos));
            continue;
        }
        if c == '^' {
            if chars.get(i + 1) == Some(&'^') {
                bump!();
                bump!();
                out.push((Tok::Caret2, pos));
                continue;
            }
            return Err(ParseError::at(pos, ParseErrorKind::Lexical, "expected `^^`"));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        let digit_at = |k: usize| chars.get(k).is_some_and(|c| c.is_ascii_digit());
        if c.is_ascii_digit() || ((c == '+' || c == '-') && digit_at(i + 1)) {
            let start = i;
            bump!();
            while digit_at(i) {
                bump!();
            }
            if chars.get(i) == Some(&'.') && digit_at(i + 1) {
                bump!();
                while digit_at(i) {
                    bump!();
                }
            }
            if chars.get(i) == Some(&'/') {
                bump!();
                if matches!(chars.get(i), Some('+' | '-')) {
                    bump!();
                }
                if !digit_at(i) {
                    let p = Pos { line, column: col };
                    return Err(ParseError::at(p, ParseErrorKind::Lexical, "expected digits after `/`"));
                }
                while digit_at(i) {
                    bump!();
                }
            }
            out.push((Tok::Number(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => {
                        return Err(ParseError::at(
                            pos,
                            ParseErrorKind::Lexical,
                            "unterminated string literal",
                        ))
                    }
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some('\\') => {
                        let esc_pos = Pos { line, column: col };
                        bump!();
                        let escaped = match chars.get(i) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            _ => {
                                return Err(ParseError::at(
                                    esc_pos,
                                    ParseErrorKind::Lexical,
                                    "unknown escape sequence",
                                ))
                            }
                        };
                        s.push(escaped);
                        bump!();
                    }
                    Some(&ch) => {
                        s.push(ch);
                        bump!();
                    }
                }
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        return Err(ParseError::at(
            pos,
            ParseErrorKind::Lexical,
            format!("unexpected character `{c}`"),
        ));
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    sig: &'s Signature,
}

impl<'s> Parser<'s> {
    fn new(text: &str, sig: &'s Signature) -> Result<Parser<'s>, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            sig,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::at(
            self.pos(),
            ParseErrorKind::Syntactic,
            format!("expected {wanted}, found {}", self.peek()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// A non-reserved identifier.
    fn name(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED_WORDS.contains(&s.as_str()) => {
                let (_, pos) = self.next();
                Ok((s, pos))
            }
            Tok::Ident(s) => Err(ParseError::at(
                self.pos(),
                ParseErrorKind::Syntactic,
                format!("`{s}` is a reserved word"),
            )),
            _ => Err(self.unexpected("a name")),
        }
    }

    fn name_of(&mut self, category: Category) -> Result<String, ParseError> {
        let (name, pos) = self.name()?;
        self.sig
            .expect(&name, category)
            .map_err(|e| ParseError::model(pos, e))?;
        Ok(name)
    }

    fn object(&mut self) -> Result<String, ParseError> {
        let (name, pos) = self.name()?;
        self.sig
            .expect_object(&name)
            .map_err(|e| ParseError::model(pos, e))?;
        Ok(name)
    }

    fn datatype(&mut self) -> Result<Datatype, ParseError> {
        if let Tok::Ident(s) = self.peek() {
            if let Some(d) = Datatype::from_keyword(s) {
                self.next();
                return Ok(d);
            }
        }
        Err(self.unexpected("a datatype"))
    }

    fn role_expr(&mut self) -> Result<RoleExpr, ParseError> {
        if self.eat_keyword("inv") {
            self.expect(Tok::LParen)?;
            let name = self.name_of(Category::Role)?;
            self.expect(Tok::RParen)?;
            Ok(RoleExpr::inverse(name))
        } else {
            Ok(RoleExpr::direct(self.name_of(Category::Role)?))
        }
    }

    fn basic(&mut self) -> Result<BasicConcept, ParseError> {
        if self.eat_keyword("exists") {
            Ok(BasicConcept::Exists(self.role_expr()?))
        } else if self.eat_keyword("delta") {
            self.expect(Tok::LParen)?;
            let u = self.name_of(Category::Attribute)?;
            self.expect(Tok::RParen)?;
            Ok(BasicConcept::Domain(u))
        } else {
            Ok(BasicConcept::Atomic(self.name_of(Category::Concept)?))
        }
    }

    fn path(&mut self) -> Result<Path, ParseError> {
        let start = self.pos();
        let mut steps = vec![self.step()?];
        while self.eat_keyword("o") {
            steps.push(self.step()?);
        }
        Path::new(steps).map_err(|e| ParseError::model(start, e))
    }

    fn step(&mut self) -> Result<PathStep, ParseError> {
        if self.eat_keyword("attr") {
            Ok(PathStep::Attribute(self.name_of(Category::Attribute)?))
        } else if self.eat_keyword("test") {
            self.expect(Tok::LParen)?;
            let b = self.basic()?;
            self.expect(Tok::RParen)?;
            Ok(PathStep::Test(b))
        } else {
            Ok(PathStep::Role(self.role_expr()?))
        }
    }

    fn declaration(&mut self, sig: &mut Signature) -> Result<(), ParseError> {
        let category = match self.peek() {
            Tok::Ident(s) if s == "concept" => Category::Concept,
            Tok::Ident(s) if s == "role" => Category::Role,
            Tok::Ident(s) if s == "attr" => Category::Attribute,
            _ => return Err(self.unexpected("`concept`, `role`, `attr` or `TBOX`")),
        };
        self.next();
        let (name, pos) = self.name()?;
        sig.declare(category, &name)
            .map_err(|e| ParseError::model(pos, e))?;
        self.expect(Tok::Dot)
    }

    fn tbox_assertion(&mut self) -> Result<TBoxAssertion, ParseError> {
        let start = self.pos();
        let t = if self.eat_keyword("funct") {
            TBoxAssertion::AttributeFunctionality(self.name_of(Category::Attribute)?)
        } else if self.eat_keyword("id") {
            let concept = self.basic()?;
            self.expect(Tok::Colon)?;
            let mut paths = vec![self.path()?];
            while *self.peek() == Tok::Comma {
                self.next();
                paths.push(self.path()?);
            }
            let id = Identification::new(concept, paths).map_err(|e| ParseError::model(start, e))?;
            TBoxAssertion::Identification(id)
        } else if self.eat_keyword("attr") {
            let lhs = self.name_of(Category::Attribute)?;
            self.expect_keyword("ISA")?;
            let negated = self.eat_keyword("not");
            let rhs = self.name_of(Category::Attribute)?;
            TBoxAssertion::AttributeInclusion { lhs, rhs, negated }
        } else if self.at_keyword("range") && *self.peek2() == Tok::LParen {
            self.next();
            self.next();
            let attribute = self.name_of(Category::Attribute)?;
            self.expect(Tok::RParen)?;
            self.expect_keyword("ISA")?;
            TBoxAssertion::ValueDomainInclusion {
                attribute,
                domain: self.datatype()?,
            }
        } else if self.lhs_is_role() {
            let lhs = self.role_expr()?;
            self.expect_keyword("ISA")?;
            let negated = self.eat_keyword("not");
            let rhs = self.role_expr()?;
            TBoxAssertion::RoleInclusion { lhs, rhs, negated }
        } else {
            let lhs = self.basic()?;
            self.expect_keyword("ISA")?;
            let negated = self.eat_keyword("not");
            let rhs = self.basic()?;
            TBoxAssertion::ConceptInclusion { lhs, rhs, negated }
        };
        self.expect(Tok::Dot)?;
        Ok(t)
    }

    fn lhs_is_role(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) if s == "inv" => true,
            Tok::Ident(s) => self.sig.category_of(s) == Some(Category::Role),
            _ => false,
        }
    }

    fn literal(&mut self) -> Result<TypedValue, ParseError> {
        let pos = self.pos();
        let (lexical, default) = match self.next().0 {
            Tok::Number(n) => {
                let dt = if n.contains(['.', '/']) {
                    Datatype::Rational
                } else {
                    Datatype::Integer
                };
                (n, Some(dt))
            }
            Tok::Str(s) => (s, Some(Datatype::String)),
            Tok::Ident(s) => (s, None),
            other => {
                return Err(ParseError::at(
                    pos,
                    ParseErrorKind::Syntactic,
                    format!("expected a literal, found {other}"),
                ))
            }
        };
        let datatype = if *self.peek() == Tok::Caret2 {
            self.next();
            self.datatype()?
        } else {
            default.ok_or_else(|| {
                ParseError::at(
                    pos,
                    ParseErrorKind::BadLiteral,
                    format!("`{lexical}` needs a `^^datatype` suffix to be a value"),
                )
            })?
        };
        TypedValue::new(&lexical, datatype).map_err(|e| ParseError::model(pos, e))
    }

    /// An atom without its terminating dot.
    fn atom(&mut self) -> Result<Atom, ParseError> {
        let (pred, pos) = self.name()?;
        let category = self.sig.category_of(&pred);
        self.expect(Tok::LParen)?;
        let subject = self.object()?;
        let atom = if *self.peek() == Tok::Comma {
            self.next();
            match category {
                Some(Category::Role) => Atom::role(pred, subject, self.object()?),
                Some(Category::Attribute) => Atom::attribute(pred, subject, self.literal()?),
                Some(found) => {
                    return Err(ParseError::model(
                        pos,
                        ModelError::CategoryMismatch {
                            name: pred,
                            expected: Category::Role,
                            found,
                        },
                    ))
                }
                None => {
                    return Err(ParseError::model(
                        pos,
                        ModelError::Undeclared {
                            name: pred,
                            expected: Category::Role,
                        },
                    ))
                }
            }
        } else {
            self.sig
                .expect(&pred, Category::Concept)
                .map_err(|e| ParseError::model(pos, e))?;
            Atom::concept(pred, subject)
        };
        self.expect(Tok::RParen)?;
        Ok(atom)
    }
}

/// Parses a complete KB file. The `SIGNATURE` header may be omitted, in
/// which case nothing is declared.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let empty = Signature::new();
    let mut p = Parser::new(text, &empty)?;
    let mut sig = Signature::new();
    if p.eat_keyword("SIGNATURE") {
        while !p.at_keyword("TBOX") {
            p.declaration(&mut sig)?;
        }
    }
    p.expect_keyword("TBOX")?;

    let mut p = Parser {
        toks: p.toks,
        at: p.at,
        sig: &sig,
    };
    let mut tbox = Vec::new();
    while !p.at_keyword("ABOX") {
        if *p.peek() == Tok::Eof {
            return Err(p.unexpected("`ABOX`"));
        }
        tbox.push(p.tbox_assertion()?);
    }
    p.expect_keyword("ABOX")?;
    let mut abox = Vec::new();
    while *p.peek() != Tok::Eof {
        abox.push(p.atom()?);
        p.expect(Tok::Dot)?;
    }
    let pos = p.pos();
    KnowledgeBase::new(sig.clone(), tbox.into_iter().collect::<TBox>(), abox)
        .map_err(|e| ParseError::model(pos, e))
}

/// Parses `atom.` repeated; order and duplicates are kept.
pub fn parse_facts(text: &str, sig: &Signature) -> Result<Vec<Atom>, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let mut atoms = Vec::new();
    while *p.peek() != Tok::Eof {
        atoms.push(p.atom()?);
        p.expect(Tok::Dot)?;
    }
    Ok(atoms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeKind {
    Insert,
    Delete,
}

impl fmt::Display for ChangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChangeKind::Insert => "insert",
            ChangeKind::Delete => "delete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeStep {
    pub kind: ChangeKind,
    pub atoms: Vec<Atom>,
}

/// Parses a changelog: `insert: A(a); P(a,b)` / `delete: A(a).` steps, in
/// order. A trailing dot after each atom is optional.
pub fn parse_changelog(text: &str, sig: &Signature) -> Result<Vec<ChangeStep>, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let mut steps = Vec::new();
    while *p.peek() != Tok::Eof {
        let kind = if p.eat_keyword("insert") {
            ChangeKind::Insert
        } else if p.eat_keyword("delete") {
            ChangeKind::Delete
        } else {
            return Err(p.unexpected("`insert:` or `delete:`"));
        };
        p.expect(Tok::Colon)?;
        let mut atoms = Vec::new();
        let step_starts = |p: &Parser| {
            matches!(p.peek(), Tok::Ident(s) if s == "insert" || s == "delete")
                && *p.peek2() == Tok::Colon
        };
        if *p.peek() != Tok::Eof && !step_starts(&p) {
            loop {
                atoms.push(p.atom()?);
                if *p.peek() == Tok::Dot {
                    p.next();
                }
                if *p.peek() == Tok::Semi {
                    p.next();
                } else {
                    break;
                }
            }
        }
        steps.push(ChangeStep { kind, atoms });
    }
    Ok(steps)
}

fn sorted_lines(lines: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = lines.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

/// Canonical rendering: each section sorted lexicographically, one item per
/// line.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let sig = kb.signature();
    let decls = sorted_lines(
        sig.concepts()
            .iter()
            .map(|c| format!("concept {c}."))
            .chain(sig.roles().iter().map(|r| format!("role {r}.")))
            .chain(sig.attributes().iter().map(|u| format!("attr {u}."))),
    );
    let mut out = String::from("SIGNATURE\n");
    for line in decls {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("TBOX\n");
    for line in sorted_lines(kb.tbox().iter().map(|t| format!("{t}."))) {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("ABOX\n");
    for line in serialize_atoms(kb.abox()) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// `atom.` lines in lexicographic order.
pub fn serialize_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<String> {
    sorted_lines(atoms.into_iter().map(|a| format!("{a}.")))
}
