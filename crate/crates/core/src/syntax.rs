//! Signatures, terms, and formulas of a function-free first-order language,
//! with an ASCII parser and a printer whose output parses back to the same
//! tree.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! formula := iff
//! iff     := implies ("<->" implies)*        left-associative
//! implies := or ("->" implies)?              right-associative
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | quant | primary
//! quant   := ("forall" | "exists") ident "." formula
//! primary := "true" | "false" | "(" formula ")" | ident ["(" ident ("," ident)* ")"]
//! ```
//!
//! A quantifier body extends as far right as possible. Inside an atom, an
//! identifier declared as a constant of the signature is a constant; any other
//! identifier is a variable.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

const RESERVED: [&str; 4] = ["forall", "exists", "true", "false"];

pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic())
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn check_name(kind: &str, name: &str) -> Result<()> {
    if !is_identifier(name) {
        return Err(Error::InvalidSignature(format!(
            "`{name}` is not a valid {kind} name"
        )));
    }
    if RESERVED.contains(&name) {
        return Err(Error::InvalidSignature(format!(
            "`{name}` is a reserved word"
        )));
    }
    Ok(())
}

/// Predicate symbols with their arities plus the ordered constant domain.
///
/// Declaration order is significant: it fixes the ground-atom indexing and
/// therefore the canonical world order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    predicates: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Signature {
    pub fn new<P, C>(predicates: P, constants: C) -> Result<Self>
    where
        P: IntoIterator<Item = (String, usize)>,
        C: IntoIterator<Item = String>,
    {
        let predicates: Vec<_> = predicates.into_iter().collect();
        let constants: Vec<_> = constants.into_iter().collect();
        let mut seen = BTreeSet::new();
        for (name, _) in &predicates {
            check_name("predicate", name)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate predicate `{name}`"
                )));
            }
        }
        let mut seen_constants = BTreeSet::new();
        for name in &constants {
            check_name("constant", name)?;
            if !seen_constants.insert(name.as_str()) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate constant `{name}`"
                )));
            }
            if seen.contains(name.as_str()) {
                return Err(Error::InvalidSignature(format!(
                    "`{name}` is declared both as a predicate and as a constant"
                )));
            }
        }
        Ok(Self {
            predicates,
            constants,
        })
    }

    /// Zero-ary predicates only, no constants.
    pub fn propositional<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(symbols.into_iter().map(|s| (s.into(), 0)), [])
    }

    pub fn predicates(&self) -> &[(String, usize)] {
        &self.predicates
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn arity(&self, predicate: &str) -> Option<usize> {
        self.predicates
            .iter()
            .find(|(n, _)| n == predicate)
            .map(|(_, a)| *a)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom { predicate: String, args: Vec<Term> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Zero-ary atom.
    pub fn prop(name: impl Into<String>) -> Self {
        Self::atom(name, Vec::new())
    }

    /// Atom applied to constants.
    pub fn ground(predicate: impl Into<String>, constants: &[&str]) -> Self {
        Self::atom(
            predicate,
            constants
                .iter()
                .map(|c| Term::Const((*c).to_owned()))
                .collect(),
        )
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::ForAll(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => {
                for t in args {
                    if let Term::Var(v) = t {
                        if !bound.contains(&v.as_str()) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                bound.push(v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::ForAll(..) | Formula::Exists(..) => false,
        }
    }

    /// Replaces every free occurrence of `var` by the constant `constant`.
    /// Occurrences bound by an inner quantifier over the same name are left
    /// alone.
    pub fn substitute(&self, var: &str, constant: &str) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom { predicate, args } => Formula::Atom {
                predicate: predicate.clone(),
                args: args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) if v == var => Term::Const(constant.to_owned()),
                        other => other.clone(),
                    })
                    .collect(),
            },
            Formula::Not(a) => Formula::not(a.substitute(var, constant)),
            Formula::And(a, b) => {
                Formula::and(a.substitute(var, constant), b.substitute(var, constant))
            }
            Formula::Or(a, b) => {
                Formula::or(a.substitute(var, constant), b.substitute(var, constant))
            }
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(var, constant), b.substitute(var, constant))
            }
            Formula::Iff(a, b) => {
                Formula::iff(a.substitute(var, constant), b.substitute(var, constant))
            }
            Formula::ForAll(v, _) | Formula::Exists(v, _) if v == var => self.clone(),
            Formula::ForAll(v, body) => Formula::forall(v.clone(), body.substitute(var, constant)),
            Formula::Exists(v, body) => Formula::exists(v.clone(), body.substitute(var, constant)),
        }
    }

    /// Checks every atom against the signature.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom { predicate, args } => {
                let expected = sig
                    .arity(predicate)
                    .ok_or_else(|| Error::UnknownPredicate(predicate.clone()))?;
                if expected != args.len() {
                    return Err(Error::ArityMismatch {
                        predicate: predicate.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                for t in args {
                    if let Term::Const(c) = t {
                        if !sig.is_constant(c) {
                            return Err(Error::InvalidSignature(format!(
                                "undeclared constant `{c}`"
                            )));
                        }
                    }
                }
                Ok(())
            }
            Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => a.check(sig),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
        }
    }

    /// Well-formed over `sig` and without free variables.
    pub fn check_sentence(&self, sig: &Signature) -> Result<()> {
        self.check(sig)?;
        let free = self.free_variables();
        if free.is_empty() {
            Ok(())
        } else {
            Err(Error::NotASentence(free.into_iter().collect()))
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::ForAll(..) | Formula::Exists(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            Formula::True | Formula::False | Formula::Atom { .. } => 6,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        // quantifiers swallow everything to their right, so they are always
        // wrapped when used as an operand
        if prec < min || prec == 0 {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom { predicate, args } => {
                f.write_str(predicate)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, t) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{t}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Not(a) => {
                f.write_str("~")?;
                a.write_operand(f, 5)
            }
            Formula::And(a, b) => {
                a.write_operand(f, 4)?;
                f.write_str(" & ")?;
                b.write_operand(f, 5)
            }
            Formula::Or(a, b) => {
                a.write_operand(f, 3)?;
                f.write_str(" | ")?;
                b.write_operand(f, 4)
            }
            Formula::Implies(a, b) => {
                a.write_operand(f, 3)?;
                f.write_str(" -> ")?;
                b.write_operand(f, 2)
            }
            Formula::Iff(a, b) => {
                a.write_operand(f, 1)?;
                f.write_str(" <-> ")?;
                b.write_operand(f, 2)
            }
            Formula::ForAll(v, body) => write!(f, "forall {v}. {body}"),
            Formula::Exists(v, body) => write!(f, "exists {v}. {body}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => s.as_str(),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Not => "~",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Iff => "<->",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self) -> Result<T> {
        let (tok, position) = &self.toks[self.pos];
        Err(Error::Syntax {
            position: *position,
            message: format!("unexpected token `{tok}`"),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let (tok, position) = &self.toks[self.pos];
            Err(Error::Syntax {
                position: *position,
                message: format!("expected `{want}`, found `{tok}`"),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let (var, position) = match self.bump() {
                    (Tok::Ident(v), p) if !RESERVED.contains(&v.as_str()) => (v, p),
                    _ => {
                        self.pos -= 1;
                        return self.unexpected();
                    }
                };
                if self.sig.is_constant(&var) {
                    return Err(Error::Syntax {
                        position,
                        message: format!("`{var}` is a declared constant and cannot be bound"),
                    });
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if kw == "forall" {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    loop {
                        match self.bump() {
                            (Tok::Ident(t), _) if !RESERVED.contains(&t.as_str()) => {
                                args.push(if self.sig.is_constant(&t) {
                                    Term::Const(t)
                                } else {
                                    Term::Var(t)
                                })
                            }
                            _ => {
                                self.pos -= 1;
                                return self.unexpected();
                            }
                        }
                        match self.peek() {
                            Tok::Comma => {
                                self.bump();
                            }
                            Tok::RParen => {
                                self.bump();
                                break;
                            }
                            _ => return self.unexpected(),
                        }
                    }
                }
                let expected = self
                    .sig
                    .arity(&name)
                    .ok_or_else(|| Error::UnknownPredicate(name.clone()))?;
                if expected != args.len() {
                    return Err(Error::ArityMismatch {
                        predicate: name,
                        expected,
                        found: args.len(),
                    });
                }
                Ok(Formula::Atom {
                    predicate: name,
                    args,
                })
            }
            _ => self.unexpected(),
        }
    }
}

/// Parses `text` against `sig`. The result may contain free variables; use
/// [`parse_sentence`] when a closed formula is required.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        sig,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.unexpected();
    }
    Ok(f)
}

pub fn parse_sentence(text: &str, sig: &Signature) -> Result<Formula> {
    let f = parse_formula(text, sig)?;
    f.check_sentence(sig)?;
    Ok(f)
}
