//! Dense two-phase simplex over exact rationals, with Bland's rule so it
//! cannot cycle.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{one, Rational};

/// `min c·x` subject to `A_ub x ≤ b_ub`, `A_eq x = b_eq`, and `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub a_ub: Vec<Vec<Rational>>,
    pub b_ub: Vec<Rational>,
    pub a_eq: Vec<Vec<Rational>>,
    pub b_eq: Vec<Rational>,
    pub lower: Vec<Rational>,
    /// `None` leaves the variable unbounded above.
    pub upper: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpProblem {
    /// Checks that every row and bound vector matches the variable count.
    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let rows_ok = |rows: &[Vec<Rational>]| rows.iter().all(|r| r.len() == n);
        if !rows_ok(&self.a_ub) || !rows_ok(&self.a_eq) {
            return Err(Error::invalid("constraint row length differs from the variable count"));
        }
        if self.a_ub.len() != self.b_ub.len() {
            return Err(Error::LengthMismatch { expected: self.a_ub.len(), got: self.b_ub.len() });
        }
        if self.a_eq.len() != self.b_eq.len() {
            return Err(Error::LengthMismatch { expected: self.a_eq.len(), got: self.b_eq.len() });
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::invalid("bound vectors differ from the variable count"));
        }
        Ok(())
    }

    /// True when `x` satisfies every constraint exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        let dot = |row: &[Rational]| -> Rational { row.iter().zip(x).map(|(a, b)| a * b).sum() };
        x.len() == self.objective.len()
            && self.a_ub.iter().zip(&self.b_ub).all(|(r, b)| &dot(r) <= b)
            && self.a_eq.iter().zip(&self.b_eq).all(|(r, b)| &dot(r) == b)
            && x.iter().zip(&self.lower).all(|(v, l)| v >= l)
            && x.iter().zip(&self.upper).all(|(v, u)| u.as_ref().is_none_or(|u| v <= u))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Solves the problem exactly; the optimizer is a vertex of the feasible set.
pub fn solve_lp(problem: &LpProblem) -> Result<LpOutcome> {
    problem.validate()?;
    let n = problem.objective.len();

    // Shift to x' = x − lower ≥ 0. Finite upper bounds become extra ≤ rows.
    let shift = |row: &[Rational], rhs: &Rational| -> Rational {
        rhs - row.iter().zip(&problem.lower).map(|(a, l)| a * l).sum::<Rational>()
    };
    let mut rows: Vec<(Vec<Rational>, Rational, bool)> = Vec::new();
    for (r, b) in problem.a_ub.iter().zip(&problem.b_ub) {
        rows.push((r.clone(), shift(r, b), true));
    }
    for (j, u) in problem.upper.iter().enumerate() {
        if let Some(u) = u {
            let mut r = vec![Rational::zero(); n];
            r[j] = one();
            rows.push((r, u - &problem.lower[j], true));
        }
    }
    for (r, b) in problem.a_eq.iter().zip(&problem.b_eq) {
        rows.push((r.clone(), shift(r, b), false));
    }

    let slacks = rows.iter().filter(|r| r.2).count();
    let m = rows.len();
    let width = n + slacks + m;
    let art0 = n + slacks;
    let mut t = Tableau { rows: Vec::with_capacity(m), basis: Vec::with_capacity(m), width };
    let mut slack = n;
    for (k, (coef, rhs, inequality)) in rows.into_iter().enumerate() {
        let mut row = vec![Rational::zero(); width + 1];
        row[..n].clone_from_slice(&coef);
        if inequality {
            row[slack] = one();
            slack += 1;
        }
        row[width] = rhs;
        if row[width].is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[art0 + k] = one();
        t.rows.push(row);
        t.basis.push(art0 + k);
    }

    // Phase 1: drive the artificials to zero.
    let mut phase1 = vec![Rational::zero(); width];
    for c in phase1.iter_mut().skip(art0) {
        *c = one();
    }
    if t.optimize(&phase1, width) == Step::Unbounded {
        return Err(Error::invalid("phase one cannot be unbounded"));
    }
    if t.value(&phase1).is_positive() {
        return Ok(LpOutcome::Infeasible);
    }
    t.evict_artificials(art0);

    // Phase 2 on the original objective; artificial columns may no longer enter.
    let mut cost = vec![Rational::zero(); width];
    cost[..n].clone_from_slice(&problem.objective);
    if t.optimize(&cost, art0) == Step::Unbounded {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x: Vec<Rational> = problem.lower.clone();
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] += &t.rows[r][width];
        }
    }
    let value = problem.objective_value(&x);
    Ok(LpOutcome::Optimal { value, x })
}

#[derive(Debug, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rows).map(|(&b, r)| &cost[b] * &r[self.width]).sum()
    }

    /// Reduced cost of column `j`.
    fn reduced(&self, cost: &[Rational], j: usize) -> Rational {
        let basic: Rational = self.basis.iter().zip(&self.rows).map(|(&b, r)| &cost[b] * &r[j]).sum();
        &cost[j] - basic
    }

    /// Minimizes `cost` letting columns `< enter_limit` enter the basis.
    fn optimize(&mut self, cost: &[Rational], enter_limit: usize) -> Step {
        loop {
            // Bland: lowest-index improving column, lowest-index basic variable among ratio ties.
            let Some(col) = (0..enter_limit).find(|&j| !self.basis.contains(&j) && self.reduced(cost, j).is_negative()) else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                None => return Step::Unbounded,
                Some((r, _)) => self.pivot(r, col),
            }
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Pivots zero-level artificials out of the basis, dropping redundant rows.
    fn evict_artificials(&mut self, art0: usize) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < art0 {
                r += 1;
                continue;
            }
            match (0..art0).find(|&j| !self.rows[r][j].is_zero()) {
                Some(col) => {
                    self.pivot(r, col);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }
}
