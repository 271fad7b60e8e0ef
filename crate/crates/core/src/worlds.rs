//! Ground atoms, possible worlds, and truth vectors.
//!
//! World `k` assigns ground atom `i` the value of bit `i` of `k` (1 = true),
//! so a space over `n` atoms holds exactly `2^n` worlds in a fixed order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::error::{Error, Result};
use crate::syntax::{Formula, Signature, Term};

/// Default ceiling on the number of ground atoms (2^20 worlds).
pub const DEFAULT_MAX_ATOMS: usize = 20;

/// Absolute ceiling accepted as a cap override.
pub const HARD_MAX_ATOMS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

/// The Herbrand base of a signature: every predicate applied to every tuple of
/// constants, predicates in declaration order, tuples lexicographic in
/// constant declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAtomSet {
    atoms: Vec<GroundAtom>,
    index: BTreeMap<GroundAtom, usize>,
}

impl GroundAtomSet {
    /// Number of ground atoms `sig` generates, or `None` on overflow.
    pub fn count(sig: &Signature) -> Option<usize> {
        let c = sig.constants().len();
        sig.predicates().iter().try_fold(0usize, |acc, (_, arity)| {
            acc.checked_add(c.checked_pow(u32::try_from(*arity).ok()?)?)
        })
    }

    pub fn new(sig: &Signature, cap: usize) -> Result<Self> {
        let n = Self::count(sig).unwrap_or(usize::MAX);
        if n > cap {
            return Err(Error::WorldSpaceTooLarge { atoms: n, cap });
        }
        let constants = sig.constants();
        let mut atoms = Vec::with_capacity(n);
        for (name, arity) in sig.predicates() {
            let total = constants.len().pow(*arity as u32);
            for mut code in 0..total {
                let mut args = vec![String::new(); *arity];
                for slot in args.iter_mut().rev() {
                    *slot = constants[code % constants.len()].clone();
                    code /= constants.len();
                }
                atoms.push(GroundAtom {
                    predicate: name.clone(),
                    args,
                });
            }
        }
        let index = atoms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        Ok(Self { atoms, index })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn position(&self, atom: &GroundAtom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    fn resolve(&self, predicate: &str, args: &[Term]) -> Result<usize> {
        let mut names = Vec::with_capacity(args.len());
        for t in args {
            match t {
                Term::Const(c) => names.push(c.clone()),
                Term::Var(v) => {
                    return Err(Error::NotGroundQuantifierFree(format!(
                        "free variable `{v}` in {predicate}"
                    )))
                }
            }
        }
        let atom = GroundAtom {
            predicate: predicate.into(),
            args: names,
        };
        self.position(&atom)
            .ok_or_else(|| Error::UnknownGroundAtom(format!("{atom}")))
    }
}

/// One total truth assignment, identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    index: usize,
    atom_count: usize,
}

impl World {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn value(&self, atom: usize) -> bool {
        debug_assert!(atom < self.atom_count);
        (self.index >> atom) & 1 == 1
    }

    pub fn values(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.atom_count).map(|i| self.value(i))
    }
}

/// All `2^n` worlds over the ground atoms of a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSpace {
    signature: Signature,
    atoms: GroundAtomSet,
}

impl WorldSpace {
    pub fn new(sig: &Signature) -> Result<Self> {
        Self::with_cap(sig, DEFAULT_MAX_ATOMS)
    }

    pub fn with_cap(sig: &Signature, cap: usize) -> Result<Self> {
        if cap > HARD_MAX_ATOMS {
            return Err(Error::InvalidParameter(format!(
                "atom cap {cap} exceeds the supported maximum of {HARD_MAX_ATOMS}"
            )));
        }
        Ok(Self {
            signature: sig.clone(),
            atoms: GroundAtomSet::new(sig, cap)?,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn atoms(&self) -> &GroundAtomSet {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn world_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    pub fn world(&self, index: usize) -> Option<World> {
        (index < self.world_count()).then_some(World {
            index,
            atom_count: self.atoms.len(),
        })
    }

    pub fn worlds(&self) -> impl ExactSizeIterator<Item = World> + '_ {
        let n = self.atoms.len();
        (0..self.world_count()).map(move |index| World {
            index,
            atom_count: n,
        })
    }

    /// Truth of a ground, quantifier-free formula in `w`.
    pub fn satisfies(&self, w: &World, f: &Formula) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { predicate, args } => w.value(self.atoms.resolve(predicate, args)?),
            Formula::Not(a) => !self.satisfies(w, a)?,
            Formula::And(a, b) => self.satisfies(w, a)? & self.satisfies(w, b)?,
            Formula::Or(a, b) => self.satisfies(w, a)? | self.satisfies(w, b)?,
            Formula::Implies(a, b) => !self.satisfies(w, a)? | self.satisfies(w, b)?,
            Formula::Iff(a, b) => self.satisfies(w, a)? == self.satisfies(w, b)?,
            Formula::ForAll(..) | Formula::Exists(..) => {
                return Err(Error::NotGroundQuantifierFree(format!("{f}")))
            }
        })
    }

    /// Truth profile of a ground, quantifier-free formula across every world.
    pub fn truth_vector(&self, f: &Formula) -> Result<TruthVector> {
        let len = self.world_count();
        Ok(match f {
            Formula::True => TruthVector::filled(len, true),
            Formula::False => TruthVector::filled(len, false),
            Formula::Atom { predicate, args } => {
                TruthVector::atom(len, self.atoms.resolve(predicate, args)?)
            }
            Formula::Not(a) => self.truth_vector(a)?.not(),
            Formula::And(a, b) => self.truth_vector(a)?.and(&self.truth_vector(b)?),
            Formula::Or(a, b) => self.truth_vector(a)?.or(&self.truth_vector(b)?),
            Formula::Implies(a, b) => self.truth_vector(a)?.not().or(&self.truth_vector(b)?),
            Formula::Iff(a, b) => self.truth_vector(a)?.xor(&self.truth_vector(b)?).not(),
            Formula::ForAll(..) | Formula::Exists(..) => {
                return Err(Error::NotGroundQuantifierFree(format!("{f}")))
            }
        })
    }

    /// The complete conjunction of literals true exactly in `w`.
    pub fn atom_sentence(&self, w: &World) -> Formula {
        Formula::conjunction(self.atoms.atoms().iter().enumerate().map(|(i, a)| {
            let lit = Formula::Atom {
                predicate: a.predicate.clone(),
                args: a.args.iter().cloned().map(Term::Const).collect(),
            };
            if w.value(i) {
                lit
            } else {
                Formula::not(lit)
            }
        }))
    }

    /// `world k: A=t B=f ...`
    pub fn describe(&self, w: &World) -> String {
        let mut out = format!("world {}:", w.index());
        for (atom, v) in self.atoms.atoms().iter().zip(w.values()) {
            let _ = write!(out, " {atom}={}", if v { 't' } else { 'f' });
        }
        out
    }
}

/// One truth value per world of a space, packed into 64-bit words. Bits past
/// the end are kept clear so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthVector {
    len: usize,
    words: Vec<u64>,
}

impl TruthVector {
    pub fn filled(len: usize, value: bool) -> Self {
        let fill = if value { u64::MAX } else { 0 };
        let mut v = Self {
            len,
            words: vec![fill; len.div_ceil(64)],
        };
        v.trim();
        v
    }

    fn atom(len: usize, atom: usize) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        if atom >= 6 {
            for (wi, word) in words.iter_mut().enumerate() {
                if (wi >> (atom - 6)) & 1 == 1 {
                    *word = u64::MAX;
                }
            }
        } else {
            let mask = (0..64)
                .filter(|k| (k >> atom) & 1 == 1)
                .fold(0u64, |m, k| m | (1 << k));
            words.iter_mut().for_each(|w| *w = mask);
        }
        let mut v = Self { len, words };
        v.trim();
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        Self { len, words }
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(
            self.len, other.len,
            "truth vectors over different world spaces"
        );
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| op(*a, *b))
            .collect();
        Self {
            len: self.len,
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, k: usize) -> bool {
        k < self.len && (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn not(&self) -> Self {
        let mut v = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.trim();
        v
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn count_true(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_false(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_all_true(&self) -> bool {
        self.count_true() == self.len
    }

    /// Componentwise `self <= other`.
    pub fn implies(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Indices of the worlds where the formula holds, ascending.
    pub fn iter_true(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|k| self.get(k)).collect()
    }
}
