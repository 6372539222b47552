//! Dense linear programs solved by a bounded-variable two-phase simplex with Bland's rule.
//!
//! The same pivot code runs over exact rationals and over `f64`; the float backend only
//! differs in the tolerance used for sign tests.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("row {row} has {got} coefficients, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, got: usize },
    #[error("variable {0} has lower bound above upper bound")]
    InvalidBounds(usize),
    #[error("numeric overflow in float backend")]
    NumericOverflow,
    #[error("iteration limit reached")]
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// Variable bound; `None` on either side is the infinite sentinel.
pub type VarBounds<S> = (Option<S>, Option<S>);

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<S> {
    pub direction: Direction,
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
    pub bounds: Vec<VarBounds<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Objective value, present when optimal.
    pub value: Option<S>,
    /// Optimal point, empty unless optimal.
    pub point: Vec<S>,
}

impl<S: Scalar> LpSolution<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn to_f64(&self) -> LpSolution<f64> {
        LpSolution {
            status: self.status,
            value: self.value.as_ref().map(Scalar::to_f64),
            point: self.point.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl<S: Scalar> LinearProgram<S> {
    /// Program with the given objective and default bounds `0 ≤ x_j < ∞`.
    pub fn new(direction: Direction, objective: Vec<S>) -> Self {
        let bounds = vec![(Some(S::zero()), None); objective.len()];
        Self { direction, objective, constraints: Vec::new(), bounds }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lo: Option<S>, hi: Option<S>) {
        self.bounds[var] = (lo, hi);
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinearProgram<T> {
        LinearProgram {
            direction: self.direction,
            objective: self.objective.iter().map(&f).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    coeffs: c.coeffs.iter().map(&f).collect(),
                    relation: c.relation,
                    rhs: f(&c.rhs),
                })
                .collect(),
            bounds: self.bounds.iter().map(|(lo, hi)| (lo.as_ref().map(&f), hi.as_ref().map(&f))).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch { row: usize::MAX, expected: n, got: self.bounds.len() });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::DimensionMismatch { row, expected: n, got: c.coeffs.len() });
            }
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo > hi {
                    return Err(LpError::InvalidBounds(j));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of constraints and bounds at `point` (zero when feasible).
    pub fn max_violation(&self, point: &[S]) -> S {
        let mut worst = S::zero();
        let mut bump = |v: S| {
            if v > worst {
                worst = v;
            }
        };
        for c in &self.constraints {
            let lhs = dot(&c.coeffs, point);
            match c.relation {
                Relation::Le => bump(lhs - c.rhs.clone()),
                Relation::Ge => bump(c.rhs.clone() - lhs),
                Relation::Eq => bump((lhs - c.rhs.clone()).abs()),
            }
        }
        for (x, (lo, hi)) in point.iter().zip(&self.bounds) {
            if let Some(lo) = lo {
                bump(lo.clone() - x.clone());
            }
            if let Some(hi) = hi {
                bump(x.clone() - hi.clone());
            }
        }
        worst
    }

    pub fn objective_at(&self, point: &[S]) -> S {
        dot(&self.objective, point)
    }
}

impl LinearProgram<Rational> {
    pub fn to_float(&self) -> LinearProgram<f64> {
        self.map(Scalar::to_f64)
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Solves a rational program with the chosen backend, reporting results as `f64` for the float
/// backend and exactly otherwise.
pub fn solve_with(lp: &LinearProgram<Rational>, backend: Backend) -> Result<LpSolution<f64>, LpError> {
    match backend {
        Backend::Rational => solve(lp).map(|s| s.to_f64()),
        Backend::Float => solve(&lp.to_float()),
    }
}

#[derive(Clone, Debug)]
enum VarMap<S> {
    /// x = offset + y
    Shift(usize, S),
    /// x = offset − y
    Reflect(usize, S),
    /// x = y⁺ − y⁻
    Split(usize, usize),
}

const ITERATION_LIMIT: usize = 200_000;

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    x: Vec<S>,
    upper: Vec<Option<S>>,
    /// Reduced costs of the current phase.
    d: Vec<S>,
    in_basis: Vec<bool>,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

impl<S: Scalar> Tableau<S> {
    fn reduced_costs(&mut self, cost: &[S]) {
        let mut d = cost.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(row) {
                if !a.is_zero() {
                    *dj = dj.clone() - cb.clone() * a.clone();
                }
            }
        }
        self.d = d;
    }

    fn at_upper(&self, j: usize) -> bool {
        match &self.upper[j] {
            Some(u) => u.is_pos() && !(u.clone() - self.x[j].clone()).is_pos(),
            None => false,
        }
    }

    fn fixed(&self, j: usize) -> bool {
        matches!(&self.upper[j], Some(u) if !u.is_pos())
    }

    fn step(&mut self) -> Result<Step, LpError> {
        let ncols = self.x.len();
        let mut entering = None;
        for j in 0..ncols {
            if self.in_basis[j] || self.fixed(j) {
                continue;
            }
            let up = self.at_upper(j);
            if (!up && self.d[j].is_neg()) || (up && self.d[j].is_pos()) {
                entering = Some((j, if up { -S::one() } else { S::one() }));
                break;
            }
        }
        let Some((j, dir)) = entering else { return Ok(Step::Optimal) };

        let mut best: Option<S> = self.upper[j].clone();
        let mut leave: Option<usize> = None;
        for i in 0..self.rows.len() {
            let rate = self.rows[i][j].clone() * dir.clone();
            let bvar = self.basis[i];
            let limit = if rate.is_pos() {
                self.x[bvar].clone() / rate
            } else if rate.is_neg() {
                match &self.upper[bvar] {
                    Some(u) => (u.clone() - self.x[bvar].clone()) / (-rate),
                    None => continue,
                }
            } else {
                continue;
            };
            let limit = if limit.is_neg() { S::zero() } else { limit };
            let better = match (&best, leave) {
                (None, _) => true,
                (Some(b), None) => limit <= *b,
                (Some(b), Some(r)) => limit < *b || (limit == *b && bvar < self.basis[r]),
            };
            if better {
                best = Some(limit);
                leave = Some(i);
            }
        }
        let Some(theta) = best else { return Ok(Step::Unbounded) };

        let delta = theta.clone() * dir;
        if !delta.is_zero() {
            self.x[j] = self.x[j].clone() + delta.clone();
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    let b = self.basis[i];
                    self.x[b] = self.x[b].clone() - a.clone() * delta.clone();
                }
            }
        }
        match leave {
            None => {
                if let Some(u) = &self.upper[j] {
                    self.x[j] = if self.x[j].clone() * S::from_int(2) > u.clone() { u.clone() } else { S::zero() };
                }
            }
            Some(r) => {
                let out = self.basis[r];
                // Snap the leaving variable onto the bound it reached.
                self.x[out] = match &self.upper[out] {
                    Some(u) if self.x[out].clone() * S::from_int(2) > u.clone() => u.clone(),
                    _ => S::zero(),
                };
                self.pivot(r, j);
            }
        }
        for v in &self.x {
            if !v.is_finite_value() {
                return Err(LpError::NumericOverflow);
            }
        }
        Ok(Step::Moved)
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        if !p.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a = a.clone() / p.clone();
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j].clone();
            if f.is_zero() {
                continue;
            }
            for (a, pr) in row.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *a = a.clone() - f.clone() * pr.clone();
                }
            }
        }
        let f = self.d[j].clone();
        if !f.is_zero() {
            for (a, pr) in self.d.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *a = a.clone() - f.clone() * pr.clone();
                }
            }
        }
        self.rows[r] = pivot_row;
        self.in_basis[self.basis[r]] = false;
        self.in_basis[j] = true;
        self.basis[r] = j;
    }

    fn run(&mut self) -> Result<bool, LpError> {
        for _ in 0..ITERATION_LIMIT {
            match self.step()? {
                Step::Optimal => return Ok(true),
                Step::Unbounded => return Ok(false),
                Step::Moved => {}
            }
        }
        Err(LpError::IterationLimit)
    }
}

/// Solves `lp` exactly (rationals) or with tolerance `FLOAT_EPS` (floats).
pub fn solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpSolution<S>, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Substitute bounded variables by nonnegative ones.
    let mut maps = Vec::with_capacity(n);
    let mut upper: Vec<Option<S>> = Vec::new();
    for (lo, hi) in &lp.bounds {
        match (lo, hi) {
            (Some(lo), hi) => {
                maps.push(VarMap::Shift(upper.len(), lo.clone()));
                upper.push(hi.as_ref().map(|h| h.clone() - lo.clone()));
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Reflect(upper.len(), hi.clone()));
                upper.push(None);
            }
            (None, None) => {
                maps.push(VarMap::Split(upper.len(), upper.len() + 1));
                upper.push(None);
                upper.push(None);
            }
        }
    }
    let ny = upper.len();
    let expand = |coeffs: &[S]| -> (Vec<S>, S) {
        let mut out = vec![S::zero(); ny];
        let mut constant = S::zero();
        for (a, m) in coeffs.iter().zip(&maps) {
            match m {
                VarMap::Shift(c, off) => {
                    out[*c] = out[*c].clone() + a.clone();
                    constant = constant + a.clone() * off.clone();
                }
                VarMap::Reflect(c, off) => {
                    out[*c] = out[*c].clone() - a.clone();
                    constant = constant + a.clone() * off.clone();
                }
                VarMap::Split(p, q) => {
                    out[*p] = out[*p].clone() + a.clone();
                    out[*q] = out[*q].clone() - a.clone();
                }
            }
        }
        (out, constant)
    };

    let mut rows = Vec::with_capacity(lp.constraints.len());
    for c in &lp.constraints {
        let (mut coeffs, constant) = expand(&c.coeffs);
        let mut rhs = c.rhs.clone() - constant;
        let mut rel = c.relation;
        if rhs.is_negative() {
            coeffs.iter_mut().for_each(|a| *a = -a.clone());
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push((coeffs, rel, rhs));
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = ny + n_slack + n_art;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        x: vec![S::zero(); ncols],
        upper: upper.clone(),
        d: Vec::new(),
        in_basis: vec![false; ncols],
    };
    tab.upper.resize(ncols, None);
    let mut slack = ny;
    let mut art = ny + n_slack;
    let mut artificial = Vec::new();
    for (coeffs, rel, rhs) in rows {
        let mut row = coeffs;
        row.resize(ncols, S::zero());
        let basic = match rel {
            Relation::Le => {
                row[slack] = S::one();
                slack += 1;
                slack - 1
            }
            Relation::Ge => {
                row[slack] = -S::one();
                slack += 1;
                row[art] = S::one();
                art += 1;
                art - 1
            }
            Relation::Eq => {
                row[art] = S::one();
                art += 1;
                art - 1
            }
        };
        if basic >= ny + n_slack {
            artificial.push(basic);
        }
        tab.x[basic] = rhs;
        tab.basis.push(basic);
        tab.in_basis[basic] = true;
        tab.rows.push(row);
    }

    if !artificial.is_empty() {
        let mut cost = vec![S::zero(); ncols];
        for &a in &artificial {
            cost[a] = S::one();
        }
        tab.reduced_costs(&cost);
        tab.run()?;
        let infeasibility = artificial.iter().fold(S::zero(), |acc, &a| acc + tab.x[a].clone());
        if infeasibility.is_pos() {
            return Ok(LpSolution { status: LpStatus::Infeasible, value: None, point: Vec::new() });
        }
        for &a in &artificial {
            tab.x[a] = S::zero();
            tab.upper[a] = Some(S::zero());
        }
    }

    let (mut cost_y, _) = expand(&lp.objective);
    if lp.direction == Direction::Maximize {
        cost_y.iter_mut().for_each(|c| *c = -c.clone());
    }
    cost_y.resize(ncols, S::zero());
    tab.reduced_costs(&cost_y);
    if !tab.run()? {
        return Ok(LpSolution { status: LpStatus::Unbounded, value: None, point: Vec::new() });
    }

    let point: Vec<S> = maps
        .iter()
        .map(|m| match m {
            VarMap::Shift(c, off) => off.clone() + tab.x[*c].clone(),
            VarMap::Reflect(c, off) => off.clone() - tab.x[*c].clone(),
            VarMap::Split(p, q) => tab.x[*p].clone() - tab.x[*q].clone(),
        })
        .collect();
    let value = lp.objective_at(&point);
    if !value.is_finite_value() {
        return Err(LpError::NumericOverflow);
    }
    Ok(LpSolution { status: LpStatus::Optimal, value: Some(value), point })
}
