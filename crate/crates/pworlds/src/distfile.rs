//! Distribution files.
//!
//! Either world weights by canonical index,
//!
//! ```text
//! predicates: A, B
//! w 0 1/5
//! w 1 1/10
//! w 2 1/5
//! w 3 1/2
//! ```
//!
//! or one weight per atom sentence:
//!
//! ```text
//! predicates: A, B
//! A & B = 1/2
//! A & ~B = 0.1
//! ~A & B = 1/5
//! ~A & ~B = 1/5
//! ```
//!
//! The header is optional when the signature comes from a knowledge base.

use pworlds_core::rational::{self, Rational};
use pworlds_core::syntax::{parse_formula, Formula, Signature};
use pworlds_core::{Distribution, Error as CoreError, WorldSpace};

use crate::error::{CliError, FileError};
use crate::kbfile::{strip_comment, Header};

#[derive(Debug, Clone)]
enum Entries {
    Indexed(Vec<(usize, usize, Rational)>),
    Atoms(Vec<(usize, String, Rational)>),
}

/// A parsed distribution file, not yet bound to a world space.
#[derive(Debug, Clone)]
pub struct DistFile {
    name: String,
    signature: Option<Signature>,
    entries: Entries,
}

pub fn parse_dist(file: &str, text: &str) -> Result<DistFile, FileError> {
    let mut header = Header::default();
    let mut entries: Option<Entries> = None;
    let mut header_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let err = |m: String| FileError::new(file, lineno, m);
        if let Some(rest) = line.strip_prefix("w ") {
            let mut parts = rest.split_whitespace();
            let (Some(k), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected `w <index> <weight>`".into()));
            };
            let k = k
                .parse::<usize>()
                .map_err(|_| err(format!("invalid world index `{k}`")))?;
            let w = rational::parse(w).map_err(|e| err(e.to_string()))?;
            match entries.get_or_insert_with(|| Entries::Indexed(Vec::new())) {
                Entries::Indexed(v) => v.push((lineno, k, w)),
                Entries::Atoms(_) => {
                    return Err(err("cannot mix `w` lines with atom-sentence lines".into()))
                }
            }
        } else if header.accept(file, lineno, line)? {
            if entries.is_some() {
                return Err(err("header lines must precede the weights".into()));
            }
            if header.epsilon.is_some() {
                return Err(err(
                    "`epsilon:` has no meaning in a distribution file".into()
                ));
            }
            header_line = lineno;
        } else if let Some((atom, w)) = line.rsplit_once('=') {
            let w = rational::parse(w).map_err(|e| err(e.to_string()))?;
            match entries.get_or_insert_with(|| Entries::Atoms(Vec::new())) {
                Entries::Atoms(v) => v.push((lineno, atom.trim().to_string(), w)),
                Entries::Indexed(_) => {
                    return Err(err("cannot mix `w` lines with atom-sentence lines".into()))
                }
            }
        } else {
            return Err(err(format!("unrecognized line `{line}`")));
        }
    }
    let signature = header.signature(file, header_line)?;
    let entries = entries.ok_or_else(|| FileError::new(file, 0, "no weights given"))?;
    Ok(DistFile {
        name: file.to_string(),
        signature,
        entries,
    })
}

impl DistFile {
    /// The signature declared in the file's header, if any.
    pub fn signature(&self) -> Option<&Signature> {
        self.signature.as_ref()
    }

    /// Binds the weights to `space`. The file's own signature, when present,
    /// must agree with the space's.
    pub fn distribution(&self, space: &WorldSpace) -> Result<Distribution, CliError> {
        if let Some(sig) = &self.signature {
            if sig != space.signature() {
                return Err(CoreError::SignatureMismatch(format!(
                    "{} declares a signature different from the knowledge base's",
                    self.name
                ))
                .into());
            }
        }
        let d = match &self.entries {
            Entries::Indexed(v) => {
                Distribution::from_weights(space, v.iter().map(|(_, k, w)| (*k, w.clone())))?
            }
            Entries::Atoms(v) => {
                let mut pairs: Vec<(Formula, Rational)> = Vec::with_capacity(v.len());
                for (line, text, w) in v {
                    let f = parse_formula(text, space.signature()).map_err(|e| match e {
                        CoreError::Syntax { position, message } => {
                            FileError::new(&self.name, *line, message).at_column(position + 1)
                        }
                        other => FileError::new(&self.name, *line, other.to_string()),
                    })?;
                    pairs.push((f, w.clone()));
                }
                Distribution::from_atom_probs(space, &pairs)?
            }
        };
        Ok(d)
    }
}
