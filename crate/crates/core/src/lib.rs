//! Exact probabilistic logic over possible worlds.
//!
//! Sentences of a propositional or function-free first-order language over a
//! finite constant domain are evaluated in every total truth assignment to the
//! ground atoms. A probability distribution over those worlds assigns each
//! sentence the weight of the worlds where it holds. Knowledge bases of
//! probability assertions compile to a linear program over the world weights,
//! solved exactly over the rationals, which yields consistency verdicts and
//! tight bounds for query sentences.
//!
//! ```
//! use pworlds_core::entailment::{query_bounds, CompileOptions};
//! use pworlds_core::rational::ratio;
//! use pworlds_core::syntax::parse_sentence;
//! use pworlds_core::{KnowledgeBase, ProbabilityAssertion, Signature};
//!
//! # fn main() -> Result<(), pworlds_core::Error> {
//! let sig = Signature::propositional(["A", "B"])?;
//! let kb = KnowledgeBase::new(sig.clone())
//!     .with(ProbabilityAssertion::point(parse_sentence("A", &sig)?, ratio(1, 2)))
//!     .with(ProbabilityAssertion::point(parse_sentence("A -> B", &sig)?, ratio(3, 4)));
//! let b = query_bounds(&kb, &parse_sentence("B", &sig)?, &CompileOptions::default())?;
//! assert_eq!((b.lo, b.hi), (ratio(1, 4), ratio(3, 4)));
//! # Ok(())
//! # }
//! ```
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command-line
//! front end live in the `pworlds` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod defaults;
pub mod entailment;
pub mod error;
pub mod lp;
pub mod measure;
pub mod quantifier;
pub mod rational;
pub mod syntax;
pub mod worlds;

pub use defaults::{AnomalyReport, ChainLine, DefaultRule};
pub use entailment::{
    Bounds, Consistency, KnowledgeBase, ProbabilityAssertion, Relation, SourcedAssertion,
};
pub use error::Error;
pub use lp::{LinearConstraint, LpOutcome, LpProblem};
pub use measure::Distribution;
pub use quantifier::HerbrandDomain;
pub use rational::Rational;
pub use syntax::{Formula, Signature, Term};
pub use worlds::{GroundAtomSet, TruthVector, World, WorldSpace};
