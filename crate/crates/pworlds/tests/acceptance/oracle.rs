//! Brute-force entailment: enumerate every basic feasible solution of the
//! world-weight polytope and take the extreme query probabilities. Shares no
//! code with the engine beyond the formula and assertion data types.

use num_traits::{One, Signed, Zero};
use pworlds_core::rational::Rational;
use pworlds_core::{Formula, KnowledgeBase, ProbabilityAssertion, Relation, Signature, Term};

pub struct Worlds {
    atoms: Vec<(String, Vec<String>)>,
    constants: Vec<String>,
}

impl Worlds {
    pub fn new(sig: &Signature) -> Self {
        let constants = sig.constants().to_vec();
        let mut atoms = Vec::new();
        for (p, arity) in sig.predicates() {
            let mut tuples: Vec<Vec<String>> = vec![vec![]];
            for _ in 0..*arity {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        constants.iter().map(move |c| {
                            let mut t = t.clone();
                            t.push(c.clone());
                            t
                        })
                    })
                    .collect();
            }
            for t in tuples {
                atoms.push((p.clone(), t));
            }
        }
        Self { atoms, constants }
    }

    pub fn count(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn assignment(&self, k: usize) -> Vec<bool> {
        (0..self.atoms.len()).map(|i| (k >> i) & 1 == 1).collect()
    }

    /// Direct recursive truth evaluation with an environment for bound
    /// variables.
    pub fn holds(&self, f: &Formula, world: &[bool], env: &mut Vec<(String, String)>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom { predicate, args } => {
                let names: Vec<String> = args
                    .iter()
                    .map(|t| match t {
                        Term::Const(c) => c.clone(),
                        Term::Var(v) => env
                            .iter()
                            .rev()
                            .find(|(name, _)| name == v)
                            .map(|(_, c)| c.clone())
                            .unwrap_or_else(|| panic!("unbound variable {v}")),
                    })
                    .collect();
                let i = self
                    .atoms
                    .iter()
                    .position(|(p, a)| p == predicate && *a == names)
                    .unwrap_or_else(|| panic!("unknown atom {predicate}{names:?}"));
                world[i]
            }
            Formula::Not(a) => !self.holds(a, world, env),
            Formula::And(a, b) => self.holds(a, world, env) && self.holds(b, world, env),
            Formula::Or(a, b) => self.holds(a, world, env) || self.holds(b, world, env),
            Formula::Implies(a, b) => !self.holds(a, world, env) || self.holds(b, world, env),
            Formula::Iff(a, b) => self.holds(a, world, env) == self.holds(b, world, env),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let universal = matches!(f, Formula::ForAll(..));
                for c in self.constants.clone() {
                    env.push((v.clone(), c));
                    let r = self.holds(body, world, env);
                    env.pop();
                    if universal && !r {
                        return false;
                    }
                    if !universal && r {
                        return true;
                    }
                }
                universal
            }
        }
    }

    /// Indicator of `f` over the worlds, with `env` bindings in force.
    pub fn indicator(&self, f: &Formula, env: &[(String, String)]) -> Vec<Rational> {
        (0..self.count())
            .map(|k| {
                let mut env = env.to_vec();
                if self.holds(f, &self.assignment(k), &mut env) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    }

    pub fn probability(&self, weights: &[Rational], f: &Formula) -> Rational {
        self.indicator(f, &[])
            .iter()
            .zip(weights)
            .map(|(a, w)| a * w)
            .sum()
    }
}

struct Row {
    coefficients: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

fn rows_for(
    w: &Worlds,
    a: &ProbabilityAssertion,
    eps: Option<&Rational>,
    env: &[(String, String)],
    out: &mut Vec<Row>,
) {
    let cond_row = |target: &Formula, condition: &Formula, relation, c: &Rational| {
        let both = w.indicator(&Formula::and(target.clone(), condition.clone()), env);
        let cond = w.indicator(condition, env);
        Row {
            coefficients: both.iter().zip(&cond).map(|(x, y)| x - c * y).collect(),
            relation,
            rhs: Rational::zero(),
        }
    };
    match a {
        ProbabilityAssertion::Point { sentence, value } => out.push(Row {
            coefficients: w.indicator(sentence, env),
            relation: Relation::Eq,
            rhs: value.clone(),
        }),
        ProbabilityAssertion::Interval { sentence, lo, hi } => {
            let ind = w.indicator(sentence, env);
            out.push(Row {
                coefficients: ind.clone(),
                relation: Relation::Ge,
                rhs: lo.clone(),
            });
            out.push(Row {
                coefficients: ind,
                relation: Relation::Le,
                rhs: hi.clone(),
            });
        }
        ProbabilityAssertion::Conditional {
            target,
            condition,
            relation,
            threshold,
        } => out.push(cond_row(target, condition, *relation, threshold)),
        ProbabilityAssertion::NearlyCertain { target, condition } => {
            let t = Rational::one() - eps.expect("epsilon set");
            out.push(cond_row(target, condition, Relation::Ge, &t))
        }
        ProbabilityAssertion::Schema { var, template } => {
            for c in &w.constants {
                let mut env = env.to_vec();
                env.push((var.clone(), c.clone()));
                rows_for(w, template, eps, &env, out);
            }
        }
    }
}

/// Reduced row echelon form in place; returns the pivot count, or `None` if
/// a row reads `0 = nonzero`.
fn rref(m: &mut Vec<Vec<Rational>>, cols: usize) -> Option<usize> {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    m.truncate(r);
    Some(r)
}

fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// `Some((lo, hi))` of the query probability, or `None` if the knowledge base
/// is unsatisfiable.
pub fn bounds(kb: &KnowledgeBase, query: &Formula) -> Option<(Rational, Rational)> {
    let w = Worlds::new(kb.signature());
    let n = w.count();
    let mut rows = vec![Row {
        coefficients: vec![Rational::one(); n],
        relation: Relation::Eq,
        rhs: Rational::one(),
    }];
    for a in kb.assertions() {
        rows_for(&w, &a.assertion, kb.epsilon(), &[], &mut rows);
    }
    // standard form: one slack per inequality
    let slacks = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let cols = n + slacks;
    let mut m: Vec<Vec<Rational>> = Vec::new();
    let mut s = n;
    for r in &rows {
        let mut line = r.coefficients.clone();
        line.resize(cols, Rational::zero());
        match r.relation {
            Relation::Le => {
                line[s] = Rational::one();
                s += 1;
            }
            Relation::Ge => {
                line[s] = -Rational::one();
                s += 1;
            }
            Relation::Eq => {}
        }
        line.push(r.rhs.clone());
        m.push(line);
    }
    let rank = rref(&mut m, cols)?;
    let q = w.indicator(query, &[]);
    let mut best: Option<(Rational, Rational)> = None;
    combinations(cols, rank, &mut |basis| {
        let mut sub: Vec<Vec<Rational>> = m
            .iter()
            .map(|row| {
                basis
                    .iter()
                    .map(|&j| row[j].clone())
                    .chain([row[cols].clone()])
                    .collect()
            })
            .collect();
        if rref(&mut sub, rank) != Some(rank) || (0..rank).any(|i| sub[i][i].is_zero()) {
            return;
        }
        let x: Vec<Rational> = sub.iter().map(|row| row[rank].clone()).collect();
        if x.iter().any(|v| v.is_negative()) {
            return;
        }
        let mut value = Rational::zero();
        for (&j, v) in basis.iter().zip(&x) {
            if j < n {
                value += &q[j] * v;
            }
        }
        best = Some(match best.take() {
            None => (value.clone(), value),
            Some((lo, hi)) => (
                if value < lo { value.clone() } else { lo },
                if value > hi { value } else { hi },
            ),
        });
    });
    best
}
