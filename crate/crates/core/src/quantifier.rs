//! Quantifier elimination over a finite constant domain, and the exact
//! quantifier-probability laws that follow from it.
//!
//! An existential becomes the disjunction of its instances and a universal
//! their conjunction. Nested quantifiers are expanded innermost first.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;

use crate::entailment::{KnowledgeBase, ProbabilityAssertion};
use crate::error::{Error, Result};
use crate::measure::Distribution;
use crate::rational::Rational;
use crate::syntax::{Formula, Signature};

/// The nonempty, ordered set of constants quantifiers range over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerbrandDomain(Vec<String>);

impl HerbrandDomain {
    pub fn new(constants: Vec<String>) -> Result<Self> {
        if constants.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(Self(constants))
    }

    pub fn of(sig: &Signature) -> Result<Self> {
        Self::new(sig.constants().to_vec())
    }

    pub fn constants(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Replaces every quantifier by the finite conjunction or disjunction of its
/// instances. The result is quantifier-free.
pub fn expand(f: &Formula, dom: &HerbrandDomain) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } => f.clone(),
        Formula::Not(a) => Formula::not(expand(a, dom)),
        Formula::And(a, b) => Formula::and(expand(a, dom), expand(b, dom)),
        Formula::Or(a, b) => Formula::or(expand(a, dom), expand(b, dom)),
        Formula::Implies(a, b) => Formula::implies(expand(a, dom), expand(b, dom)),
        Formula::Iff(a, b) => Formula::iff(expand(a, dom), expand(b, dom)),
        Formula::ForAll(v, body) => {
            let body = expand(body, dom);
            Formula::conjunction(dom.constants().iter().map(|t| body.substitute(v, t)))
        }
        Formula::Exists(v, body) => {
            let body = expand(body, dom);
            Formula::disjunction(dom.constants().iter().map(|t| body.substitute(v, t)))
        }
    }
}

/// Expands `f` over the constants of `sig`, requiring a nonempty domain only
/// when `f` actually contains a quantifier.
pub fn ground(f: &Formula, sig: &Signature) -> Result<Formula> {
    if f.is_quantifier_free() {
        Ok(f.clone())
    } else {
        Ok(expand(f, &HerbrandDomain::of(sig)?))
    }
}

/// Probability of a sentence that may contain quantifiers.
pub fn sentence_probability(d: &Distribution, f: &Formula) -> Result<Rational> {
    d.probability(&ground(f, d.space().signature())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    ForAll,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub quantifier: Quantifier,
    pub variable: String,
    /// Probability of the expanded quantified sentence.
    pub quantified: Rational,
    /// `(constant, probability of the instance)` in domain order.
    pub instances: Vec<(String, Rational)>,
    /// `1 - p` of the dual sentence (`forall x. ~phi` for an existential,
    /// `exists x. ~phi` for a universal).
    pub dual_complement: Rational,
    /// Existential at least every instance, universal at most every instance.
    pub monotone: bool,
    /// `quantified == dual_complement`.
    pub duality: bool,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.monotone && self.duality
    }
}

/// Checks, under `d`, that an existential is at least as probable as each of
/// its instances (a universal at most as probable), and that the quantifier
/// duality holds exactly.
pub fn check_quantifier_monotonicity(
    d: &Distribution,
    f: &Formula,
    dom: &HerbrandDomain,
) -> Result<MonotonicityReport> {
    let (quantifier, var, body) = match f {
        Formula::Exists(v, b) => (Quantifier::Exists, v, b.as_ref()),
        Formula::ForAll(v, b) => (Quantifier::ForAll, v, b.as_ref()),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "`{f}` does not start with a quantifier"
            )))
        }
    };
    let quantified = d.probability(&expand(f, dom))?;
    let mut instances = Vec::with_capacity(dom.len());
    for t in dom.constants() {
        let p = d.probability(&expand(&body.substitute(var, t), dom))?;
        instances.push((t.clone(), p));
    }
    let negated = Formula::not(body.clone());
    let dual = match quantifier {
        Quantifier::Exists => Formula::forall(var.clone(), negated),
        Quantifier::ForAll => Formula::exists(var.clone(), negated),
    };
    let dual_complement = Rational::one() - d.probability(&expand(&dual, dom))?;
    let monotone = instances.iter().all(|(_, p)| match quantifier {
        Quantifier::Exists => &quantified >= p,
        Quantifier::ForAll => &quantified <= p,
    });
    let duality = quantified == dual_complement;
    Ok(MonotonicityReport {
        quantifier,
        variable: var.clone(),
        quantified,
        instances,
        dual_complement,
        monotone,
        duality,
    })
}

/// A comparison between sentence probabilities implied by a certain
/// universal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivedFact {
    /// `p[instance] = 1`
    Certain(Formula),
    /// `p[larger] >= p[smaller]`
    AtLeast { larger: Formula, smaller: Formula },
    /// `p[left] = p[right]`
    Equal { left: Formula, right: Formula },
}

impl DerivedFact {
    pub fn holds(&self, d: &Distribution) -> Result<bool> {
        Ok(match self {
            DerivedFact::Certain(f) => sentence_probability(d, f)?.is_one(),
            DerivedFact::AtLeast { larger, smaller } => {
                sentence_probability(d, larger)? >= sentence_probability(d, smaller)?
            }
            DerivedFact::Equal { left, right } => {
                sentence_probability(d, left)? == sentence_probability(d, right)?
            }
        })
    }
}

impl fmt::Display for DerivedFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivedFact::Certain(a) => write!(f, "p[{a}] = 1"),
            DerivedFact::AtLeast { larger, smaller } => write!(f, "p[{larger}] >= p[{smaller}]"),
            DerivedFact::Equal { left, right } => write!(f, "p[{left}] = p[{right}]"),
        }
    }
}

/// For every `P(forall x. phi) = 1` in `kb` and every constant `t`: the
/// instance `phi(t)` is certain, and when `phi` is an implication `a -> b`,
/// also `p[b(t)] >= p[a(t)]` and `p[b(t) & a(t)] = p[a(t)]`.
pub fn certain_universal_facts(kb: &KnowledgeBase) -> Vec<DerivedFact> {
    let mut out = Vec::new();
    let constants = kb.signature().constants();
    for sourced in kb.assertions() {
        let sentence = match &sourced.assertion {
            ProbabilityAssertion::Point { sentence, value } if value.is_one() => sentence,
            ProbabilityAssertion::Interval { sentence, lo, .. } if lo.is_one() => sentence,
            _ => continue,
        };
        let Formula::ForAll(var, body) = sentence else {
            continue;
        };
        for t in constants {
            let instance = body.substitute(var, t);
            out.push(DerivedFact::Certain(instance.clone()));
            if let Formula::Implies(a, b) = &instance {
                out.push(DerivedFact::AtLeast {
                    larger: (**b).clone(),
                    smaller: (**a).clone(),
                });
                out.push(DerivedFact::Equal {
                    left: Formula::and((**b).clone(), (**a).clone()),
                    right: (**a).clone(),
                });
            }
        }
    }
    out
}
