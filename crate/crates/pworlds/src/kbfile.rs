//! Knowledge-base files.
//!
//! ```text
//! # comment
//! domain: t1, t2
//! predicates: Bird/1, Fly/1, Penguin/1
//! epsilon: 1/100
//! P(forall x. Penguin(x) -> Bird(x)) = 1
//! P(Fly(x) | Bird(x)) ~ 1 for all x
//! P(A) in [1/4, 3/4]
//! P(A | B) >= 0.9
//! ```
//!
//! Inside `P(...)` a `|` outside parentheses separates the target from the
//! condition, so a disjunctive target must be parenthesized: `P((A | B)) = 1/2`.
//! Header lines must come before the first assertion.

use pworlds_core::entailment::{KnowledgeBase, ProbabilityAssertion, Relation, SourcedAssertion};
use pworlds_core::rational::{self, Rational};
use pworlds_core::syntax::{is_identifier, parse_formula, Formula, Signature};
use pworlds_core::Error as CoreError;

use crate::error::FileError;

/// Header lines shared by knowledge-base and distribution files.
#[derive(Debug, Default)]
pub(crate) struct Header {
    pub domain: Option<Vec<String>>,
    pub predicates: Option<Vec<(String, usize)>>,
    pub epsilon: Option<Rational>,
}

impl Header {
    /// Consumes `line` if it is a header line.
    pub fn accept(&mut self, file: &str, lineno: usize, line: &str) -> Result<bool, FileError> {
        let Some((key, value)) = line.split_once(':') else {
            return Ok(false);
        };
        let key = key.trim();
        let err = |m: String| FileError::new(file, lineno, m);
        match key {
            "domain" => {
                if self.domain.is_some() {
                    return Err(err("duplicate `domain:` line".into()));
                }
                let names = split_list(value);
                for n in &names {
                    if !is_identifier(n) {
                        return Err(err(format!("invalid constant name `{n}`")));
                    }
                }
                self.domain = Some(names);
            }
            "predicates" => {
                if self.predicates.is_some() {
                    return Err(err("duplicate `predicates:` line".into()));
                }
                let mut preds = Vec::new();
                for item in split_list(value) {
                    let (name, arity) = match item.split_once('/') {
                        Some((n, a)) => {
                            let arity = a
                                .trim()
                                .parse::<usize>()
                                .map_err(|_| err(format!("invalid arity in `{item}`")))?;
                            (n.trim().to_string(), arity)
                        }
                        None => (item.clone(), 0),
                    };
                    preds.push((name, arity));
                }
                self.predicates = Some(preds);
            }
            "epsilon" => {
                if self.epsilon.is_some() {
                    return Err(err("duplicate `epsilon:` line".into()));
                }
                self.epsilon = Some(rational::parse(value).map_err(|e| err(e.to_string()))?);
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn signature(&self, file: &str, lineno: usize) -> Result<Option<Signature>, FileError> {
        if self.domain.is_none() && self.predicates.is_none() {
            return Ok(None);
        }
        Signature::new(
            self.predicates.clone().unwrap_or_default(),
            self.domain.clone().unwrap_or_default(),
        )
        .map(Some)
        .map_err(|e| FileError::new(file, lineno, e.to_string()))
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(String::from)
        .collect()
}

/// Text up to a `#` comment, trimmed.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(code, _)| code).trim()
}

pub fn parse_kb(file: &str, text: &str) -> Result<KnowledgeBase, FileError> {
    let mut header = Header::default();
    let mut kb: Option<KnowledgeBase> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if !line.starts_with("P(") {
            if !header.accept(file, lineno, line)? {
                return Err(FileError::new(
                    file,
                    lineno,
                    format!("unrecognized line `{line}`"),
                ));
            }
            if kb.is_some() {
                return Err(FileError::new(
                    file,
                    lineno,
                    "header lines must precede the assertions",
                ));
            }
            continue;
        }
        if kb.is_none() {
            let sig = header
                .signature(file, lineno)?
                .unwrap_or(Signature::new([], []).expect("empty signature is valid"));
            kb = Some(KnowledgeBase::new(sig));
        }
        let kb = kb.as_mut().expect("initialized above");
        let offset = raw.find("P(").unwrap_or(0);
        let sourced = parse_assertion(line, kb.signature())
            .map_err(|(col, m)| FileError::new(file, lineno, m).at_column(offset + col + 1))?
            .at_line(lineno);
        kb.push(sourced);
    }
    let mut kb = match kb {
        Some(kb) => kb,
        None => KnowledgeBase::new(
            header
                .signature(file, text.lines().count().max(1))?
                .unwrap_or(Signature::new([], []).expect("empty signature is valid")),
        ),
    };
    kb.set_epsilon(header.epsilon);
    kb.validate().map_err(|e| {
        let line = match &e {
            CoreError::InvalidAssertion { assertion, .. } => assertion
                .strip_prefix("line ")
                .and_then(|s| s.split(':').next())
                .and_then(|n| n.parse().ok())
                .unwrap_or(0),
            _ => 0,
        };
        FileError::new(file, line, e.to_string())
    })?;
    Ok(kb)
}

type Located<T> = Result<T, (usize, String)>;

/// Parses one `P(...) ...` line. Errors carry a byte column within `line`.
pub fn parse_assertion(line: &str, sig: &Signature) -> Located<SourcedAssertion> {
    let (body, schema_var) = split_schema_suffix(line);
    if !body.starts_with("P(") {
        return Err((0, "assertion must start with `P(`".into()));
    }
    let close = matching_paren(body, 1).ok_or((1, "unbalanced parentheses".to_string()))?;
    let inner = &body[2..close];
    let rest = body[close + 1..].trim();
    let rest_col = close + 1 + (body[close + 1..].len() - body[close + 1..].trim_start().len());

    let bars = top_level_bars(inner);
    if bars.len() > 1 {
        return Err((
            2 + bars[1],
            "more than one `|` at the top level; parenthesize disjunctions inside P(...)".into(),
        ));
    }
    let formula = |text: &str, col: usize| -> Located<Formula> {
        parse_formula(text, sig).map_err(|e| match e {
            CoreError::Syntax { position, message } => (col + position, message),
            other => (col, other.to_string()),
        })
    };
    let (target, condition) = match bars.first() {
        Some(&bar) => (
            formula(&inner[..bar], 2)?,
            Some(formula(&inner[bar + 1..], 2 + bar + 1)?),
        ),
        None => (formula(inner, 2)?, None),
    };

    let value = |text: &str, col: usize| -> Located<Rational> {
        rational::parse(text).map_err(|e| (col, e.to_string()))
    };
    let mut strict = false;
    let assertion = if let Some(range) = rest.strip_prefix("in") {
        if condition.is_some() {
            return Err((rest_col, "interval assertions take no condition".into()));
        }
        let range = range.trim();
        let inside = range
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or((rest_col, "expected `in [lo, hi]`".to_string()))?;
        let (lo, hi) = inside
            .split_once(',')
            .ok_or((rest_col, "expected `in [lo, hi]`".to_string()))?;
        ProbabilityAssertion::interval(target, value(lo, rest_col)?, value(hi, rest_col)?)
    } else if let Some(one) = rest.strip_prefix("~=").or_else(|| rest.strip_prefix('~')) {
        if value(one, rest_col)? != Rational::from_integer(1.into()) {
            return Err((rest_col, "`~` is only defined for `~ 1`".into()));
        }
        ProbabilityAssertion::NearlyCertain {
            target,
            condition: condition.unwrap_or(Formula::True),
        }
    } else {
        let (relation, r) = if let Some(r) = rest.strip_prefix(">=") {
            (Relation::Ge, r)
        } else if let Some(r) = rest.strip_prefix("<=") {
            (Relation::Le, r)
        } else if let Some(r) = rest.strip_prefix('>') {
            strict = true;
            (Relation::Ge, r)
        } else if let Some(r) = rest.strip_prefix('<') {
            strict = true;
            (Relation::Le, r)
        } else if let Some(r) = rest.strip_prefix('=') {
            (Relation::Eq, r)
        } else {
            return Err((
                rest_col,
                format!("expected `=`, `in`, `>=`, `<=` or `~` after P(...), found `{rest}`"),
            ));
        };
        let v = value(r, rest_col)?;
        match (condition, relation) {
            (Some(cond), rel) => ProbabilityAssertion::conditional(target, cond, rel, v),
            (None, Relation::Eq) => ProbabilityAssertion::point(target, v),
            (None, Relation::Ge) => {
                ProbabilityAssertion::interval(target, v, Rational::from_integer(1.into()))
            }
            (None, Relation::Le) => {
                ProbabilityAssertion::interval(target, Rational::from_integer(0.into()), v)
            }
        }
    };
    let assertion = match schema_var {
        Some(var) => ProbabilityAssertion::schema(var, assertion),
        None => assertion,
    };
    let mut sourced = SourcedAssertion::new(assertion);
    sourced.relaxed_strict = strict;
    Ok(sourced)
}

/// Splits off a trailing `for all <var>`.
fn split_schema_suffix(line: &str) -> (&str, Option<String>) {
    let words: Vec<&str> = line.split_whitespace().collect();
    if words.len() >= 3 {
        let n = words.len();
        if words[n - 3] == "for" && words[n - 2] == "all" && is_identifier(words[n - 1]) {
            if let Some(idx) = line.rfind("for") {
                return (line[..idx].trim_end(), Some(words[n - 1].to_string()));
            }
        }
    }
    (line, None)
}

fn matching_paren(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices().skip_while(|(i, _)| *i < open) {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn top_level_bars(s: &str) -> Vec<usize> {
    let mut depth = 0i32;
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => out.push(i),
            _ => {}
        }
    }
    out
}
