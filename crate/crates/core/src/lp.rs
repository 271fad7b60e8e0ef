//! Exact rational linear programming.
//!
//! Two-phase primal simplex on a dense tableau with Bland's rule for both the
//! entering and the leaving variable, so it never cycles. All variables are
//! implicitly nonnegative.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

impl Cmp {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Cmp::Le => lhs <= rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Ge => lhs >= rhs,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Cmp::Le => Cmp::Ge,
            Cmp::Eq => Cmp::Eq,
            Cmp::Ge => Cmp::Le,
        }
    }
}

/// `sum(coefficients) cmp bound`, coefficients given sparsely as
/// `(variable, value)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: Vec<(usize, Rational)>,
    pub cmp: Cmp,
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<(usize, Rational)>, cmp: Cmp, bound: Rational) -> Self {
        Self {
            coefficients,
            cmp,
            bound,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.cmp.holds(&self.lhs(x), &self.bound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
    /// Dense objective, one coefficient per variable.
    pub objective: Vec<Rational>,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        witness: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

impl LpProblem {
    /// A feasibility problem: zero objective.
    pub fn feasibility(num_vars: usize, constraints: Vec<LinearConstraint>) -> Self {
        Self {
            num_vars,
            constraints,
            objective: vec![Rational::zero(); num_vars],
            direction: Direction::Maximize,
        }
    }

    pub fn with_objective(mut self, objective: Vec<Rational>, direction: Direction) -> Self {
        assert_eq!(
            objective.len(),
            self.num_vars,
            "objective length must match variable count"
        );
        self.objective = objective;
        self.direction = direction;
        self
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    /// Nonnegativity plus every constraint, checked exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    /// An `Optimal` outcome is valid when its witness is feasible and attains
    /// the reported value.
    pub fn verify(&self, outcome: &LpOutcome) -> bool {
        match outcome {
            LpOutcome::Optimal { value, witness } => {
                self.is_feasible_point(witness) && &self.objective_value(witness) == value
            }
            _ => true,
        }
    }

    pub fn solve(&self) -> LpOutcome {
        let mut tableau = Tableau::build(self);
        if !tableau.phase_one() {
            return LpOutcome::Infeasible;
        }
        let cost: Vec<Rational> = match self.direction {
            Direction::Maximize => self.objective.clone(),
            Direction::Minimize => self.objective.iter().map(|c| -c).collect(),
        };
        if !tableau.optimize(&cost, false) {
            return LpOutcome::Unbounded;
        }
        let witness = tableau.primal(self.num_vars);
        let value = self.objective_value(&witness);
        LpOutcome::Optimal { value, witness }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
    cols: usize,
    /// Reduced costs of the current objective and its value.
    reduced: Vec<Rational>,
    value: Rational,
}

impl Tableau {
    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars;
        let mut normalized = Vec::with_capacity(p.constraints.len());
        for c in &p.constraints {
            let mut row = vec![Rational::zero(); n];
            for (j, a) in &c.coefficients {
                row[*j] += a;
            }
            let (row, cmp, b) = if c.bound.is_negative() {
                (
                    row.into_iter().map(|v| -v).collect(),
                    c.cmp.flipped(),
                    -&c.bound,
                )
            } else {
                (row, c.cmp, c.bound.clone())
            };
            normalized.push((row, cmp, b));
        }
        let slack_count = normalized
            .iter()
            .filter(|(_, cmp, _)| *cmp != Cmp::Eq)
            .count();
        let artificial_count = normalized
            .iter()
            .filter(|(_, cmp, _)| *cmp != Cmp::Le)
            .count();
        let first_artificial = n + slack_count;
        let cols = first_artificial + artificial_count;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut rhs = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for (mut row, cmp, b) in normalized {
            row.resize(cols, Rational::zero());
            match cmp {
                Cmp::Le => {
                    row[next_slack] = Rational::from_integer(1.into());
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Cmp::Ge => {
                    row[next_slack] = Rational::from_integer((-1).into());
                    next_slack += 1;
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
                Cmp::Eq => {
                    row[next_art] = Rational::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        Self {
            rows,
            rhs,
            basis,
            first_artificial,
            cols,
            reduced: vec![Rational::zero(); cols],
            value: Rational::zero(),
        }
    }

    /// Drives the artificial variables to zero. Returns false when that is
    /// impossible, i.e. the constraints are infeasible.
    fn phase_one(&mut self) -> bool {
        if self.first_artificial == self.cols {
            return true;
        }
        let mut cost = vec![Rational::zero(); self.cols];
        for c in cost.iter_mut().skip(self.first_artificial) {
            *c = Rational::from_integer((-1).into());
        }
        let bounded = self.optimize(&cost, true);
        debug_assert!(bounded, "phase one objective is bounded by zero");
        if !self.value.is_zero() {
            return false;
        }
        // pivot remaining (zero-valued) artificials out of the basis; rows
        // with no other nonzero entry are redundant and dropped
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        true
    }

    fn price(&mut self, cost: &[Rational]) {
        let mut reduced: Vec<Rational> = (0..self.cols)
            .map(|j| cost.get(j).cloned().unwrap_or_else(Rational::zero))
            .collect();
        let mut value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = match cost.get(b) {
                Some(c) if !c.is_zero() => c,
                _ => continue,
            };
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    reduced[j] -= cb * a;
                }
            }
            value += cb * &self.rhs[r];
        }
        self.reduced = reduced;
        self.value = value;
    }

    /// Maximizes `cost . x` from the current basic feasible solution. Returns
    /// false if unbounded. Artificial columns may enter only in phase one.
    fn optimize(&mut self, cost: &[Rational], allow_artificial: bool) -> bool {
        self.price(cost);
        let limit = if allow_artificial {
            self.cols
        } else {
            self.first_artificial
        };
        loop {
            let Some(enter) = (0..limit).find(|&j| self.reduced[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[r] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let support: Vec<usize> = (0..self.cols)
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !self.reduced[c].is_zero() {
            let factor = self.reduced[c].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= delta;
            }
            self.value += &factor * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn primal(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[r].clone();
            }
        }
        x
    }
}
