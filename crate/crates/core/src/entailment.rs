//! Knowledge bases of probability assertions, compiled to a linear program
//! over world weights.
//!
//! Variables are the weights of the worlds; every assertion becomes one or two
//! linear rows built from the truth vectors of its sentences. Conditional
//! assertions `p[a | b] cmp c` are linearized as `p[a & b] cmp c * p[b]`, so
//! they hold vacuously when `p[b] = 0`. Consistency is LP feasibility and the
//! tight bounds of a query are its minimum and maximum probability over the
//! feasible region, each with a witness distribution that is re-checked
//! against every assertion by direct evaluation.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{Direction, LinearConstraint, LpOutcome, LpProblem};
use crate::measure::Distribution;
use crate::quantifier;
use crate::rational::{self, Rational};
use crate::syntax::{Formula, Signature};
use crate::worlds::{WorldSpace, DEFAULT_MAX_ATOMS};

pub use crate::lp::Cmp as Relation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbabilityAssertion {
    /// `p[sentence] = value`
    Point { sentence: Formula, value: Rational },
    /// `lo <= p[sentence] <= hi`
    Interval {
        sentence: Formula,
        lo: Rational,
        hi: Rational,
    },
    /// `p[target | condition] relation threshold`, linearized.
    Conditional {
        target: Formula,
        condition: Formula,
        relation: Relation,
        threshold: Rational,
    },
    /// `p[target | condition] >= 1 - epsilon`, with the knowledge base's
    /// epsilon.
    NearlyCertain { target: Formula, condition: Formula },
    /// The template asserted once per domain constant substituted for `var`.
    Schema {
        var: String,
        template: Box<ProbabilityAssertion>,
    },
}

impl ProbabilityAssertion {
    pub fn point(sentence: Formula, value: Rational) -> Self {
        Self::Point { sentence, value }
    }

    pub fn interval(sentence: Formula, lo: Rational, hi: Rational) -> Self {
        Self::Interval { sentence, lo, hi }
    }

    pub fn conditional(
        target: Formula,
        condition: Formula,
        relation: Relation,
        threshold: Rational,
    ) -> Self {
        Self::Conditional {
            target,
            condition,
            relation,
            threshold,
        }
    }

    pub fn schema(var: impl Into<String>, template: ProbabilityAssertion) -> Self {
        Self::Schema {
            var: var.into(),
            template: Box::new(template),
        }
    }

    fn formulas(&self) -> Vec<&Formula> {
        match self {
            Self::Point { sentence, .. } | Self::Interval { sentence, .. } => vec![sentence],
            Self::Conditional {
                target, condition, ..
            }
            | Self::NearlyCertain { target, condition } => {
                vec![target, condition]
            }
            Self::Schema { template, .. } => template.formulas(),
        }
    }

    fn map_formulas(&self, f: &mut impl FnMut(&Formula) -> Result<Formula>) -> Result<Self> {
        Ok(match self {
            Self::Point { sentence, value } => Self::Point {
                sentence: f(sentence)?,
                value: value.clone(),
            },
            Self::Interval { sentence, lo, hi } => Self::Interval {
                sentence: f(sentence)?,
                lo: lo.clone(),
                hi: hi.clone(),
            },
            Self::Conditional {
                target,
                condition,
                relation,
                threshold,
            } => Self::Conditional {
                target: f(target)?,
                condition: f(condition)?,
                relation: *relation,
                threshold: threshold.clone(),
            },
            Self::NearlyCertain { target, condition } => Self::NearlyCertain {
                target: f(target)?,
                condition: f(condition)?,
            },
            Self::Schema { var, template } => Self::Schema {
                var: var.clone(),
                template: Box::new(template.map_formulas(f)?),
            },
        })
    }
}

/// Wraps a formula in parentheses when its text has a `|` outside any
/// parentheses, which the assertion syntax reserves for conditioning.
fn operand(f: &Formula) -> String {
    let text = f.to_string();
    let mut depth = 0i32;
    let bare_bar = text.chars().any(|c| {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => return true,
            _ => {}
        }
        false
    });
    if bare_bar {
        format!("({text})")
    } else {
        text
    }
}

impl fmt::Display for ProbabilityAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = rational::format;
        match self {
            Self::Point { sentence, value } => write!(f, "P({}) = {}", operand(sentence), r(value)),
            Self::Interval { sentence, lo, hi } => {
                write!(f, "P({}) in [{}, {}]", operand(sentence), r(lo), r(hi))
            }
            Self::Conditional {
                target,
                condition,
                relation,
                threshold,
            } => {
                let rel = match relation {
                    Relation::Le => "<=",
                    Relation::Eq => "=",
                    Relation::Ge => ">=",
                };
                if *condition == Formula::True {
                    write!(f, "P({}) {rel} {}", operand(target), r(threshold))
                } else {
                    write!(
                        f,
                        "P({} | {}) {rel} {}",
                        operand(target),
                        operand(condition),
                        r(threshold)
                    )
                }
            }
            Self::NearlyCertain { target, condition } => {
                if *condition == Formula::True {
                    write!(f, "P({}) ~ 1", operand(target))
                } else {
                    write!(f, "P({} | {}) ~ 1", operand(target), operand(condition))
                }
            }
            Self::Schema { var, template } => write!(f, "{template} for all {var}"),
        }
    }
}

/// An assertion with its origin in a source document, when it has one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcedAssertion {
    pub assertion: ProbabilityAssertion,
    pub line: Option<usize>,
    /// The source used a strict inequality, compiled as non-strict.
    pub relaxed_strict: bool,
}

impl SourcedAssertion {
    pub fn new(assertion: ProbabilityAssertion) -> Self {
        Self {
            assertion,
            line: None,
            relaxed_strict: false,
        }
    }

    pub fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

impl fmt::Display for SourcedAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.assertion),
            None => write!(f, "{}", self.assertion),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    signature: Signature,
    assertions: Vec<SourcedAssertion>,
    epsilon: Option<Rational>,
}

impl KnowledgeBase {
    pub fn new(signature: Signature) -> Self {
        Self {
            signature,
            assertions: Vec::new(),
            epsilon: None,
        }
    }

    pub fn with(mut self, assertion: ProbabilityAssertion) -> Self {
        self.assertions.push(SourcedAssertion::new(assertion));
        self
    }

    pub fn push(&mut self, assertion: SourcedAssertion) {
        self.assertions.push(assertion);
    }

    pub fn with_epsilon(mut self, epsilon: Rational) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn set_epsilon(&mut self, epsilon: Option<Rational>) {
        self.epsilon = epsilon;
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn assertions(&self) -> &[SourcedAssertion] {
        &self.assertions
    }

    pub fn epsilon(&self) -> Option<&Rational> {
        self.epsilon.as_ref()
    }

    fn invalid(&self, index: usize, reason: impl Into<String>) -> Error {
        Error::InvalidAssertion {
            assertion: self.assertions[index].to_string(),
            reason: reason.into(),
        }
    }

    /// Checks ranges, well-formedness over the signature, and that every
    /// sentence is closed (schema templates: closed except for the schema
    /// variable, which must occur).
    pub fn validate(&self) -> Result<()> {
        if let Some(eps) = &self.epsilon {
            if !eps.is_positive() || *eps >= Rational::one() {
                return Err(Error::InvalidParameter(format!(
                    "epsilon must lie strictly between 0 and 1, got {}",
                    rational::format(eps)
                )));
            }
        }
        let unit = |v: &Rational| !v.is_negative() && *v <= Rational::one();
        for (i, sourced) in self.assertions.iter().enumerate() {
            let (inner, var) = match &sourced.assertion {
                ProbabilityAssertion::Schema { var, template } => {
                    if matches!(**template, ProbabilityAssertion::Schema { .. }) {
                        return Err(self.invalid(i, "schemas cannot be nested"));
                    }
                    if self.signature.is_constant(var) {
                        return Err(self.invalid(
                            i,
                            format!("schema variable `{var}` is a declared constant"),
                        ));
                    }
                    (template.as_ref(), Some(var.as_str()))
                }
                other => (other, None),
            };
            match inner {
                ProbabilityAssertion::Point { value, .. } if !unit(value) => {
                    return Err(self.invalid(i, "probability must lie in [0, 1]"));
                }
                ProbabilityAssertion::Interval { lo, hi, .. }
                    if !(unit(lo) && unit(hi) && lo <= hi) =>
                {
                    return Err(self.invalid(i, "interval must satisfy 0 <= lo <= hi <= 1"));
                }
                ProbabilityAssertion::Conditional { threshold, .. } if !unit(threshold) => {
                    return Err(self.invalid(i, "threshold must lie in [0, 1]"));
                }
                ProbabilityAssertion::NearlyCertain { .. } if self.epsilon.is_none() => {
                    return Err(self.invalid(i, "`~ 1` needs an epsilon"));
                }
                _ => {}
            }
            let mut free = BTreeSet::new();
            for f in inner.formulas() {
                f.check(&self.signature)
                    .map_err(|e| self.invalid(i, e.to_string()))?;
                free.extend(f.free_variables());
            }
            match var {
                None if !free.is_empty() => {
                    let names: Vec<String> = free.into_iter().collect();
                    return Err(self.invalid(i, format!("free variable(s) {}", names.join(", "))));
                }
                Some(v) if free.len() != 1 || !free.contains(v) => {
                    return Err(self.invalid(
                        i,
                        format!("schema template must have exactly the free variable `{v}`"),
                    ));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Schemas instantiated per constant and quantifiers expanded, each
    /// paired with the index of the assertion it came from.
    pub fn ground_assertions(&self) -> Result<Vec<(usize, ProbabilityAssertion)>> {
        self.validate()?;
        let sig = &self.signature;
        let mut out = Vec::new();
        for (i, sourced) in self.assertions.iter().enumerate() {
            match &sourced.assertion {
                ProbabilityAssertion::Schema { var, template } => {
                    if sig.constants().is_empty() {
                        return Err(self.invalid(i, "schema over an empty domain"));
                    }
                    for t in sig.constants() {
                        let inst = template.map_formulas(&mut |f| {
                            quantifier::ground(&f.substitute(var, t), sig)
                        })?;
                        out.push((i, inst));
                    }
                }
                other => out.push((i, other.map_formulas(&mut |f| quantifier::ground(f, sig))?)),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    pub max_atoms: usize,
    /// Adds `p[condition] >= delta` for every conditional assertion.
    pub require_positive_conditions: Option<Rational>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            max_atoms: DEFAULT_MAX_ATOMS,
            require_positive_conditions: None,
        }
    }
}

/// A knowledge base lowered to linear rows over the world weights.
#[derive(Debug, Clone)]
pub struct CompiledKb {
    kb: KnowledgeBase,
    space: WorldSpace,
    ground: Vec<(usize, ProbabilityAssertion)>,
    constraints: Vec<LinearConstraint>,
    /// Assertion index per row; `None` for the normalization row.
    origins: Vec<Option<usize>>,
    options: CompileOptions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent {
        witness: Distribution,
    },
    /// `clashing` is a minimal set of assertion indices that is already
    /// unsatisfiable.
    Inconsistent {
        clashing: Vec<usize>,
        note: String,
    },
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// The query after quantifier expansion.
    pub query: Formula,
    pub lo: Rational,
    pub hi: Rational,
    pub lo_witness: Distribution,
    pub hi_witness: Distribution,
}

pub fn compile(kb: &KnowledgeBase, options: &CompileOptions) -> Result<CompiledKb> {
    let space = WorldSpace::with_cap(kb.signature(), options.max_atoms)?;
    let ground = kb.ground_assertions()?;
    let eps = kb.epsilon().cloned();
    if let Some(delta) = &options.require_positive_conditions {
        if !delta.is_positive() || *delta > Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "positive-condition threshold must lie in (0, 1], got {}",
                rational::format(delta)
            )));
        }
    }
    let n = space.world_count();
    let mut constraints = vec![LinearConstraint::new(
        (0..n).map(|k| (k, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    )];
    let mut origins = vec![None];
    let mut push = |row: LinearConstraint, origin: usize| {
        if row.coefficients.is_empty() && row.cmp.holds(&Rational::zero(), &row.bound) {
            return;
        }
        constraints.push(row);
        origins.push(Some(origin));
    };
    let indicator = |f: &Formula| -> Result<Vec<(usize, Rational)>> {
        Ok(space
            .truth_vector(f)?
            .iter_true()
            .map(|k| (k, Rational::one()))
            .collect())
    };
    for (origin, assertion) in &ground {
        let (target, condition, relation, threshold) = match assertion {
            ProbabilityAssertion::Point { sentence, value } => {
                push(
                    LinearConstraint::new(indicator(sentence)?, Relation::Eq, value.clone()),
                    *origin,
                );
                continue;
            }
            ProbabilityAssertion::Interval { sentence, lo, hi } => {
                let row = indicator(sentence)?;
                if lo.is_positive() {
                    push(
                        LinearConstraint::new(row.clone(), Relation::Ge, lo.clone()),
                        *origin,
                    );
                }
                if *hi < Rational::one() {
                    push(
                        LinearConstraint::new(row, Relation::Le, hi.clone()),
                        *origin,
                    );
                }
                continue;
            }
            ProbabilityAssertion::Conditional {
                target,
                condition,
                relation,
                threshold,
            } => (target, condition, *relation, threshold.clone()),
            ProbabilityAssertion::NearlyCertain { target, condition } => {
                let eps = eps.clone().expect("validated");
                (target, condition, Relation::Ge, Rational::one() - eps)
            }
            ProbabilityAssertion::Schema { .. } => unreachable!("schemas are instantiated"),
        };
        let a = space.truth_vector(target)?;
        let b = space.truth_vector(condition)?;
        let hit = Rational::one() - &threshold;
        let miss = -&threshold;
        let mut row = Vec::new();
        for k in b.iter_true() {
            let coeff = if a.get(k) { &hit } else { &miss };
            if !coeff.is_zero() {
                row.push((k, coeff.clone()));
            }
        }
        push(
            LinearConstraint::new(row, relation, Rational::zero()),
            *origin,
        );
        if let Some(delta) = &options.require_positive_conditions {
            push(
                LinearConstraint::new(indicator(condition)?, Relation::Ge, delta.clone()),
                *origin,
            );
        }
    }
    Ok(CompiledKb {
        kb: kb.clone(),
        space,
        ground,
        constraints,
        origins,
        options: options.clone(),
    })
}

impl CompiledKb {
    pub fn space(&self) -> &WorldSpace {
        &self.space
    }

    pub fn knowledge_base(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// Ground assertions after schema and quantifier expansion.
    pub fn ground(&self) -> &[(usize, ProbabilityAssertion)] {
        &self.ground
    }

    /// The feasibility LP: world weights subject to every row.
    pub fn problem(&self) -> LpProblem {
        self.problem_for(|_| true)
    }

    fn problem_for(&self, keep: impl Fn(usize) -> bool) -> LpProblem {
        let rows = self
            .constraints
            .iter()
            .zip(&self.origins)
            .filter(|(_, o)| o.is_none_or(&keep))
            .map(|(c, _)| c.clone())
            .collect();
        LpProblem::feasibility(self.space.world_count(), rows)
    }

    fn distribution(&self, witness: Vec<Rational>) -> Result<Distribution> {
        Distribution::from_weights(
            &self.space,
            witness
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero()),
        )
    }

    /// Indices of the assertions `d` violates, by direct evaluation of
    /// sentence probabilities rather than through the LP rows.
    pub fn violations(&self, d: &Distribution) -> Result<Vec<usize>> {
        let eps = self.kb.epsilon().cloned();
        let mut bad = BTreeSet::new();
        for (origin, assertion) in &self.ground {
            let ok = match assertion {
                ProbabilityAssertion::Point { sentence, value } => {
                    d.probability(sentence)? == *value
                }
                ProbabilityAssertion::Interval { sentence, lo, hi } => {
                    let p = d.probability(sentence)?;
                    *lo <= p && p <= *hi
                }
                ProbabilityAssertion::Conditional {
                    target,
                    condition,
                    relation,
                    threshold,
                } => self.conditional_holds(d, target, condition, *relation, threshold)?,
                ProbabilityAssertion::NearlyCertain { target, condition } => {
                    let c = Rational::one() - eps.clone().expect("validated");
                    self.conditional_holds(d, target, condition, Relation::Ge, &c)?
                }
                ProbabilityAssertion::Schema { .. } => unreachable!("schemas are instantiated"),
            };
            if !ok {
                bad.insert(*origin);
            }
        }
        Ok(bad.into_iter().collect())
    }

    fn conditional_holds(
        &self,
        d: &Distribution,
        target: &Formula,
        condition: &Formula,
        relation: Relation,
        threshold: &Rational,
    ) -> Result<bool> {
        let pb = d.probability(condition)?;
        let pab = d.probability(&Formula::and(target.clone(), condition.clone()))?;
        let linear = relation.holds(&pab, &(threshold * &pb));
        let positive = match &self.options.require_positive_conditions {
            Some(delta) => pb >= *delta,
            None => true,
        };
        Ok(linear && positive)
    }

    fn checked(&self, witness: Vec<Rational>) -> Result<Distribution> {
        let d = self.distribution(witness)?;
        let bad = self.violations(&d)?;
        if bad.is_empty() {
            Ok(d)
        } else {
            Err(Error::InvariantViolation(format!(
                "solver witness violates {}",
                self.describe(&bad)
            )))
        }
    }

    /// `line 3: P(A) = 1/2; line 4: ...`
    pub fn describe(&self, indices: &[usize]) -> String {
        let parts: Vec<String> = indices
            .iter()
            .map(|&i| self.kb.assertions()[i].to_string())
            .collect();
        parts.join("; ")
    }

    /// Feasibility with a witness, or a minimal clashing subset of the
    /// assertions found by a deletion filter.
    pub fn consistency(&self) -> Result<Consistency> {
        match self.problem().solve() {
            LpOutcome::Optimal { witness, .. } => Ok(Consistency::Consistent {
                witness: self.checked(witness)?,
            }),
            LpOutcome::Unbounded => Err(Error::InvariantViolation(
                "feasibility LP reported unbounded".into(),
            )),
            LpOutcome::Infeasible => {
                let mut kept: BTreeSet<usize> = self.origins.iter().flatten().copied().collect();
                for i in kept.clone() {
                    kept.remove(&i);
                    if self.problem_for(|o| kept.contains(&o)).solve() != LpOutcome::Infeasible {
                        kept.insert(i);
                    }
                }
                let clashing: Vec<usize> = kept.into_iter().collect();
                let note = if clashing.is_empty() {
                    String::from("no probability distribution exists over the world space")
                } else {
                    format!(
                        "no distribution satisfies together: {}",
                        self.describe(&clashing)
                    )
                };
                Ok(Consistency::Inconsistent { clashing, note })
            }
        }
    }

    /// Tight lower and upper probability of `query` over every distribution
    /// satisfying the knowledge base.
    pub fn bounds(&self, query: &Formula) -> Result<Bounds> {
        query.check_sentence(self.kb.signature())?;
        let q = quantifier::ground(query, self.kb.signature())?;
        let tv = self.space.truth_vector(&q)?;
        let mut objective = vec![Rational::zero(); self.space.world_count()];
        for k in tv.iter_true() {
            objective[k] = Rational::one();
        }
        let base = self.problem();
        let solve = |direction| -> Result<(Rational, Distribution)> {
            let lp = base.clone().with_objective(objective.clone(), direction);
            match lp.solve() {
                LpOutcome::Optimal { value, witness } => {
                    let d = self.checked(witness)?;
                    if d.probability(&q)? != value {
                        return Err(Error::InvariantViolation(format!(
                            "witness does not attain the bound {}",
                            rational::format(&value)
                        )));
                    }
                    Ok((value, d))
                }
                LpOutcome::Unbounded => Err(Error::InvariantViolation(
                    "probability LP reported unbounded".into(),
                )),
                LpOutcome::Infeasible => match self.consistency()? {
                    Consistency::Inconsistent { clashing, note } => Err(Error::Inconsistent {
                        note,
                        clashing: clashing
                            .iter()
                            .map(|&i| self.kb.assertions()[i].to_string())
                            .collect(),
                    }),
                    Consistency::Consistent { .. } => Err(Error::InvariantViolation(
                        "feasibility disagrees between solves".into(),
                    )),
                },
            }
        };
        let (lo, lo_witness) = solve(Direction::Minimize)?;
        let (hi, hi_witness) = solve(Direction::Maximize)?;
        Ok(Bounds {
            query: q,
            lo,
            hi,
            lo_witness,
            hi_witness,
        })
    }
}

pub fn is_consistent(kb: &KnowledgeBase, options: &CompileOptions) -> Result<Consistency> {
    compile(kb, options)?.consistency()
}

pub fn query_bounds(
    kb: &KnowledgeBase,
    query: &Formula,
    options: &CompileOptions,
) -> Result<Bounds> {
    compile(kb, options)?.bounds(query)
}
