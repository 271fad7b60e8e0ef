//! Default rules read as conditional probabilities within epsilon of one, and
//! the exact analysis of the bird/penguin hierarchy they induce.
//!
//! With `p[Fly(t) | Bird(t)] >= 1 - e`, `p[~Fly(t) | Penguin(t)] >= 1 - e` for
//! every term and `forall x. Penguin(x) -> Bird(x)` certain, the probability of
//! any single `Penguin(t)` is at most `e / (1 - e)`. The textbook chain of
//! inequalities through `p[~Penguin(t)] / p[Penguin(t)]` gives the weaker
//! ceiling `1 / (2 - 2e)`; both are reported, together with the exact maximum
//! of the expanded `exists x. Penguin(x)` over the finite domain.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::entailment::{
    compile, CompileOptions, Consistency, KnowledgeBase, ProbabilityAssertion, Relation,
};
use crate::error::{Error, Result};
use crate::measure::Distribution;
use crate::quantifier::{expand, HerbrandDomain};
use crate::rational::{self, Rational};
use crate::syntax::{Formula, Signature, Term};
use crate::worlds::GroundAtomSet;

/// `for all x: p[conclusion(x) | condition(x)] ~ 1`, with the conclusion
/// optionally negated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefaultRule {
    pub var: String,
    pub condition: Formula,
    pub conclusion: Formula,
    pub negated: bool,
}

impl DefaultRule {
    pub fn new(
        var: impl Into<String>,
        condition: Formula,
        conclusion: Formula,
        negated: bool,
    ) -> Result<Self> {
        let var = var.into();
        let mut free = condition.free_variables();
        free.extend(conclusion.free_variables());
        if free.len() != 1 || !free.contains(&var) {
            return Err(Error::InvalidParameter(format!(
                "default rule must share exactly the free variable `{var}`"
            )));
        }
        Ok(Self {
            var,
            condition,
            conclusion,
            negated,
        })
    }

    /// Unary-predicate rule `P(x) => Q(x)` (or `=> ~Q(x)`).
    pub fn unary(condition: &str, conclusion: &str, negated: bool) -> Self {
        let x = || alloc::vec![Term::Var("x".into())];
        Self {
            var: "x".into(),
            condition: Formula::atom(condition, x()),
            conclusion: Formula::atom(conclusion, x()),
            negated,
        }
    }

    pub fn to_assertion(&self) -> ProbabilityAssertion {
        let target = if self.negated {
            Formula::not(self.conclusion.clone())
        } else {
            self.conclusion.clone()
        };
        ProbabilityAssertion::schema(
            self.var.clone(),
            ProbabilityAssertion::NearlyCertain {
                target,
                condition: self.condition.clone(),
            },
        )
    }
}

fn check_params(epsilon: &Rational, n_terms: usize) -> Result<()> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie strictly between 0 and 1, got {}",
            rational::format(epsilon)
        )));
    }
    if n_terms == 0 {
        return Err(Error::InvalidParameter(
            "at least one term is required".into(),
        ));
    }
    Ok(())
}

pub fn term(i: usize) -> String {
    format!("t{i}")
}

fn bird_signature(n_terms: usize) -> Result<Signature> {
    Signature::new(
        [("Bird".into(), 1), ("Fly".into(), 1), ("Penguin".into(), 1)],
        (1..=n_terms).map(term),
    )
}

/// The default-reasoning knowledge base over constants `t1..tn`: birds fly,
/// penguins do not, and every penguin is certainly a bird.
pub fn penguin_kb(
    epsilon: &Rational,
    n_terms: usize,
    options: &CompileOptions,
) -> Result<KnowledgeBase> {
    check_params(epsilon, n_terms)?;
    let sig = bird_signature(n_terms)?;
    let atoms = GroundAtomSet::count(&sig).unwrap_or(usize::MAX);
    if atoms > options.max_atoms {
        return Err(Error::WorldSpaceTooLarge {
            atoms,
            cap: options.max_atoms,
        });
    }
    let certain = Formula::forall(
        "x",
        Formula::implies(
            Formula::atom("Penguin", alloc::vec![Term::Var("x".into())]),
            Formula::atom("Bird", alloc::vec![Term::Var("x".into())]),
        ),
    );
    Ok(KnowledgeBase::new(sig)
        .with(DefaultRule::unary("Bird", "Fly", false).to_assertion())
        .with(DefaultRule::unary("Penguin", "Fly", true).to_assertion())
        .with(ProbabilityAssertion::point(certain, Rational::one()))
        .with_epsilon(epsilon.clone()))
}

/// `e / (1 - e)`, the exact per-term ceiling (capped at one).
pub fn instance_closed_form(epsilon: &Rational) -> Rational {
    let v = epsilon / (Rational::one() - epsilon);
    if v > Rational::one() {
        Rational::one()
    } else {
        v
    }
}

/// `1 / (2 - 2e)`, the ceiling implied by the chain of inequalities.
pub fn chain_bound(epsilon: &Rational) -> Rational {
    let two = rational::int(2);
    (&two - &two * epsilon).recip()
}

/// `n e / (1 - e)`, the union bound for the existential.
pub fn union_bound(epsilon: &Rational, n_terms: usize) -> Rational {
    rational::int(n_terms as i64) * epsilon / (Rational::one() - epsilon)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremum {
    pub value: Rational,
    pub witness: Distribution,
}

fn maximize(kb: &KnowledgeBase, query: &Formula, options: &CompileOptions) -> Result<Extremum> {
    let bounds = compile(kb, options)?.bounds(query)?;
    Ok(Extremum {
        value: bounds.hi,
        witness: bounds.hi_witness,
    })
}

/// Largest achievable `p[Penguin(t1)]`.
pub fn max_penguin_instance(
    epsilon: &Rational,
    n_terms: usize,
    options: &CompileOptions,
) -> Result<Extremum> {
    let kb = penguin_kb(epsilon, n_terms, options)?;
    maximize(&kb, &Formula::ground("Penguin", &[&term(1)]), options)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistentialBound {
    pub value: Rational,
    pub witness: Distribution,
    pub union_bound: Rational,
    /// `min(1, union_bound)`
    pub capped_union_bound: Rational,
}

/// Largest achievable probability of `exists x. Penguin(x)` expanded over
/// `t1..tn`.
pub fn existential_penguin_bound(
    epsilon: &Rational,
    n_terms: usize,
    options: &CompileOptions,
) -> Result<ExistentialBound> {
    let kb = penguin_kb(epsilon, n_terms, options)?;
    let dom = HerbrandDomain::of(kb.signature())?;
    let exists = Formula::exists(
        "x",
        Formula::atom("Penguin", alloc::vec![Term::Var("x".into())]),
    );
    let Extremum { value, witness } = maximize(&kb, &expand(&exists, &dom), options)?;
    let union = union_bound(epsilon, n_terms);
    let capped = if union > Rational::one() {
        Rational::one()
    } else {
        union.clone()
    };
    Ok(ExistentialBound {
        value,
        witness,
        union_bound: union,
        capped_union_bound: capped,
    })
}

/// One line of the chain; `relation` links it to the previous line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLine {
    pub relation: Option<Relation>,
    pub expression: String,
    pub value: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityChain {
    pub epsilon: Rational,
    pub lines: Vec<ChainLine>,
    /// `p[Penguin(t1)]` at the witness.
    pub penguin: Rational,
    /// `1 / (2 - 2e)`
    pub implied_bound: Rational,
    pub witness: Distribution,
}

impl InequalityChain {
    pub fn verified(&self) -> bool {
        self.lines.iter().all(|l| l.holds) && self.penguin <= self.implied_bound
    }
}

/// Instantiates the chain from `1 ~ p[Fly | Bird]` down to
/// `p[~Penguin] / p[Penguin] + ~0` at the witness maximizing
/// `p[Penguin(t1)]` (one term), checking every step exactly.
pub fn inequality_chain(epsilon: &Rational, options: &CompileOptions) -> Result<InequalityChain> {
    let Extremum { witness, .. } = max_penguin_instance(epsilon, 1, options)?;
    let t = term(1);
    let bird = Formula::ground("Bird", &[&t]);
    let fly = Formula::ground("Fly", &[&t]);
    let peng = Formula::ground("Penguin", &[&t]);
    let p = |f: Formula| witness.probability(&f);
    let p_bird = p(bird.clone())?;
    let p_peng = p(peng.clone())?;
    if p_peng.is_zero() || p_bird.is_zero() {
        return Err(Error::InvariantViolation(
            "chain witness gives a penguin probability of zero".into(),
        ));
    }
    let fly_bird_not_peng = p(Formula::and(
        Formula::and(fly.clone(), bird.clone()),
        Formula::not(peng.clone()),
    ))?;
    let fly_bird_peng = p(Formula::and(
        Formula::and(fly.clone(), bird.clone()),
        peng.clone(),
    ))?;
    let not_peng = p(Formula::not(peng.clone()))?;
    let fly_peng = p(Formula::and(fly.clone(), peng.clone()))?;
    let fly_given_bird = p(Formula::and(fly, bird))? / &p_bird;

    let steps: [(Option<Relation>, &str, Rational); 6] = [
        (None, "1 - e", Rational::one() - epsilon),
        (Some(Relation::Le), "p[Fly|Bird]", fly_given_bird),
        (
            Some(Relation::Eq),
            "p[Fly&Bird&~Peng]/p[Bird] + p[Fly&Bird&Peng]/p[Bird]",
            &fly_bird_not_peng / &p_bird + &fly_bird_peng / &p_bird,
        ),
        (
            Some(Relation::Le),
            "p[Fly&Bird&~Peng]/p[Peng] + p[Fly&Bird&Peng]/p[Peng]",
            &fly_bird_not_peng / &p_peng + &fly_bird_peng / &p_peng,
        ),
        (
            Some(Relation::Le),
            "p[~Peng]/p[Peng] + p[Fly&Peng]/p[Peng]",
            &not_peng / &p_peng + &fly_peng / &p_peng,
        ),
        (
            Some(Relation::Le),
            "p[~Peng]/p[Peng] + e",
            &not_peng / &p_peng + epsilon,
        ),
    ];
    let mut lines: Vec<ChainLine> = Vec::with_capacity(steps.len());
    for (relation, expression, value) in steps {
        let holds = match (relation, lines.last()) {
            (Some(rel), Some(prev)) => rel.holds(&prev.value, &value),
            _ => true,
        };
        lines.push(ChainLine {
            relation,
            expression: expression.to_string(),
            value,
            holds,
        });
    }
    Ok(InequalityChain {
        epsilon: epsilon.clone(),
        lines,
        penguin: p_peng,
        implied_bound: chain_bound(epsilon),
        witness,
    })
}

/// Consistency of `{p[Fly(c) | Bird(c)] >= 1 - e, p[Bird(c)] >= bird_lo,
/// p[Fly(c)] <= fly_hi}`: the known non-flying bird `c` refutes the
/// meta-quantified conditional no matter what else is known about `c`.
pub fn exception_inconsistency(
    epsilon: &Rational,
    bird_lo: &Rational,
    fly_hi: &Rational,
) -> Result<Consistency> {
    let in_unit = |v: &Rational| !v.is_negative() && *v <= Rational::one();
    if !(in_unit(epsilon) && in_unit(bird_lo) && in_unit(fly_hi)) {
        return Err(Error::InvalidParameter(
            "epsilon, bird_lo and fly_hi must lie in [0, 1]".into(),
        ));
    }
    let sig = Signature::new([("Bird".into(), 1), ("Fly".into(), 1)], ["c".into()])?;
    let bird = Formula::ground("Bird", &["c"]);
    let fly = Formula::ground("Fly", &["c"]);
    let kb = KnowledgeBase::new(sig)
        .with(ProbabilityAssertion::conditional(
            fly.clone(),
            bird.clone(),
            Relation::Ge,
            Rational::one() - epsilon,
        ))
        .with(ProbabilityAssertion::interval(
            bird,
            bird_lo.clone(),
            Rational::one(),
        ))
        .with(ProbabilityAssertion::interval(
            fly,
            Rational::zero(),
            fly_hi.clone(),
        ));
    compile(&kb, &CompileOptions::default())?.consistency()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnomalyReport {
    pub epsilon: Rational,
    pub n_terms: usize,
    pub per_term_max: Rational,
    pub chain_bound: Rational,
    pub existential_max: Rational,
    pub union_bound: Rational,
    pub capped_union_bound: Rational,
    pub per_term_witness: Distribution,
    pub existential_witness: Distribution,
}

impl AnomalyReport {
    /// The ordering relations every row must satisfy.
    pub fn consistent(&self) -> bool {
        let unit = |v: &Rational| !v.is_negative() && *v <= Rational::one();
        unit(&self.per_term_max)
            && unit(&self.existential_max)
            && self.per_term_max <= self.chain_bound
            && self.per_term_max <= self.existential_max
            && self.existential_max <= self.capped_union_bound
    }
}

pub fn anomaly_report(
    epsilon: &Rational,
    n_terms: usize,
    options: &CompileOptions,
) -> Result<AnomalyReport> {
    let per_term = max_penguin_instance(epsilon, n_terms, options)?;
    let existential = existential_penguin_bound(epsilon, n_terms, options)?;
    Ok(AnomalyReport {
        epsilon: epsilon.clone(),
        n_terms,
        per_term_max: per_term.value,
        chain_bound: chain_bound(epsilon),
        existential_max: existential.value,
        union_bound: existential.union_bound,
        capped_union_bound: existential.capped_union_bound,
        per_term_witness: per_term.witness,
        existential_witness: existential.witness,
    })
}
