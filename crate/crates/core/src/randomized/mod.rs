//! Randomized gain strategies: expected risks, their worst cases, the linear
//! programs trading one attack model against the other, and Pareto frontiers.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::adversary::{BroadAttack, FocusedAttack};
use crate::error::{Error, Result};
use crate::parallel::try_map;
use crate::graph::Graph;
use crate::rational::{int, one, ratio, to_fraction, zero, Rational};
use crate::risk::{self, interval_index, worst_case_broad, worst_case_focused, RiskValue};

pub mod lp;

pub use lp::{solve_lp, LpOutcome, LpProblem};

/// Strictly increasing gains, none below the system gain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gains {
    #[serde(with = "crate::rational::fraction::vec")]
    values: Vec<Rational>,
    #[serde(with = "crate::rational::fraction")]
    alpha_sys: Rational,
}

impl Gains {
    pub fn new(values: Vec<Rational>, alpha_sys: Rational) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("a gain vector needs at least one gain"));
        }
        if alpha_sys.is_negative() {
            return Err(Error::invalid("system gain must be non-negative"));
        }
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!("gains must be strictly increasing: {} then {}", to_fraction(&w[0]), to_fraction(&w[1]))));
        }
        // Gains below the system gain are dominated; reject them outright.
        if values[0] < alpha_sys || !values[0].is_positive() {
            return Err(Error::invalid(format!("gain {} is below the system gain or not positive", to_fraction(&values[0]))));
        }
        Ok(Gains { values, alpha_sys })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn alpha_sys(&self) -> &Rational {
        &self.alpha_sys
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `R_b*(α_j)` for every gain.
    pub fn broad_curve(&self) -> Vec<Rational> {
        self.values.iter().map(|a| worst_case_broad(a, &self.alpha_sys).expect("validated gain").into_inner()).collect()
    }

    /// `R_f*(α_j)` for every gain.
    pub fn focused_curve(&self) -> Vec<Rational> {
        self.values.iter().map(|a| worst_case_focused(a, &self.alpha_sys).expect("validated gain").into_inner()).collect()
    }
}

/// Gains plus a probability vector on them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainStrategy {
    pub gains: Gains,
    #[serde(with = "crate::rational::fraction::vec")]
    probs: Vec<Rational>,
}

impl GainStrategy {
    pub fn new(gains: Gains, probs: Vec<Rational>) -> Result<Self> {
        if probs.len() != gains.len() {
            return Err(Error::LengthMismatch { expected: gains.len(), got: probs.len() });
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::invalid("probabilities must be non-negative"));
        }
        let total: Rational = probs.iter().sum();
        if total != one() {
            return Err(Error::invalid(format!("probabilities sum to {}, not 1", to_fraction(&total))));
        }
        Ok(GainStrategy { gains, probs })
    }

    /// All mass on one gain.
    pub fn deterministic(alpha: Rational, alpha_sys: Rational) -> Result<Self> {
        GainStrategy::new(Gains::new(vec![alpha], alpha_sys)?, vec![one()])
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }
}

/// `Σ p_j R_b(α_j, S; G)` on a concrete instance.
pub fn expected_risk_broad(strategy: &GainStrategy, g: &Graph, attack: &BroadAttack) -> Result<Rational> {
    weighted(strategy, |a, s| risk::risk_broad(g, attack, a, s))
}

/// `Σ p_j R_f(α_j, F; G)` on a concrete instance.
pub fn expected_risk_focused(strategy: &GainStrategy, g: &Graph, attack: &FocusedAttack) -> Result<Rational> {
    weighted(strategy, |a, s| risk::risk_focused(g, attack, a, s))
}

fn weighted(strategy: &GainStrategy, f: impl Fn(&Rational, &Rational) -> Result<RiskValue>) -> Result<Rational> {
    let s = strategy.gains.alpha_sys();
    let mut total = zero();
    for (a, p) in strategy.gains.values().iter().zip(strategy.probs()) {
        if !p.is_zero() {
            total += p * f(a, s)?.into_inner();
        }
    }
    Ok(total)
}

/// `max_k (Σ_{j≤k} p_j)·R_b*(α_k)`.
pub fn worst_case_expected_broad(strategy: &GainStrategy) -> RiskValue {
    let curve = strategy.gains.broad_curve();
    let mut mass = zero();
    let mut best = zero();
    for (p, r) in strategy.probs().iter().zip(&curve) {
        mass += p;
        best = best.max(&mass * r);
    }
    RiskValue::new(best).expect("convex combination of risks")
}

/// `max_k (Σ_{j≥k} p_j)·R_f*(α_k)`.
pub fn worst_case_expected_focused(strategy: &GainStrategy) -> RiskValue {
    let curve = strategy.gains.focused_curve();
    let mut mass = zero();
    let mut best = zero();
    for (p, r) in strategy.probs().iter().zip(&curve).rev() {
        mass += p;
        best = best.max(&mass * r);
    }
    RiskValue::new(best).expect("convex combination of risks")
}

/// Constraint matrix of the tradeoff programs, `2M × (M+1)`.
///
/// Rows `0..M` hold the objective-side block (lower triangular in `R_b*`
/// for the broad program) with `−1` in the last column; rows `M..2M` hold
/// the budget-side block with `0` there.
pub fn lp_matrix(gains: &Gains) -> Vec<Vec<Rational>> {
    stacked(&gains.broad_curve(), true, &gains.focused_curve())
}

/// Mirror of [`lp_matrix`]: objective block upper triangular in `R_f*`,
/// budget block lower triangular in `R_b*`.
fn mirror_matrix(gains: &Gains) -> Vec<Vec<Rational>> {
    stacked(&gains.focused_curve(), false, &gains.broad_curve())
}

/// Objective rows `(triangle of obj | −1)` over budget rows `(opposite triangle of budget | 0)`.
fn stacked(obj: &[Rational], obj_lower: bool, budget: &[Rational]) -> Vec<Vec<Rational>> {
    let m = obj.len();
    let block = |curve: &[Rational], lower: bool, last: Rational| -> Vec<Vec<Rational>> {
        curve
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row: Vec<Rational> = (0..m).map(|j| if (j <= i) == lower || j == i { r.clone() } else { zero() }).collect();
                row.push(last.clone());
                row
            })
            .collect()
    };
    let mut rows = block(obj, obj_lower, int(-1));
    rows.extend(block(budget, !obj_lower, zero()));
    rows
}

/// Optimal value and distribution of a tradeoff program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpSolution {
    #[serde(with = "crate::rational::fraction")]
    pub value: Rational,
    #[serde(with = "crate::rational::fraction::vec")]
    pub probs: Vec<Rational>,
}

/// Assembles `min v` s.t. `A p − v ≤ 0` on the objective block, `B p ≤ γ`,
/// `Σp = 1`, `p ≥ 0`, `v ∈ [0, 1]`.
fn tradeoff_problem(matrix: Vec<Vec<Rational>>, gamma: &Rational) -> LpProblem {
    let m = matrix.len() / 2;
    let mut objective = vec![zero(); m + 1];
    objective[m] = one();
    let mut b_ub = vec![zero(); m];
    b_ub.extend(std::iter::repeat_n(gamma.clone(), m));
    let mut simplex = vec![one(); m];
    simplex.push(zero());
    let mut upper = vec![None; m];
    upper.push(Some(one()));
    LpProblem { objective, a_ub: matrix, b_ub, a_eq: vec![simplex], b_eq: vec![one()], lower: vec![zero(); m + 1], upper }
}

fn run_tradeoff(matrix: Vec<Vec<Rational>>, gamma: &Rational) -> Result<Option<LpSolution>> {
    let problem = tradeoff_problem(matrix, gamma);
    match solve_lp(&problem)? {
        LpOutcome::Optimal { value, mut x } => {
            x.pop();
            Ok(Some(LpSolution { value, probs: x }))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::invalid("tradeoff program is bounded by construction")),
    }
}

/// The broad-objective program at focused budget `gamma_f`.
pub fn broad_program(gains: &Gains, gamma_f: &Rational) -> LpProblem {
    tradeoff_problem(lp_matrix(gains), gamma_f)
}

/// The focused-objective program at broad budget `gamma_b`.
pub fn focused_program(gains: &Gains, gamma_b: &Rational) -> LpProblem {
    tradeoff_problem(mirror_matrix(gains), gamma_b)
}

/// `v_b(γ_f)`: least worst-case expected broad risk with focused risk at most
/// `gamma_f`. `None` when `γ_f < R_f*(α_1)`.
pub fn min_broad_given_focused(gains: &Gains, gamma_f: &Rational) -> Result<Option<LpSolution>> {
    check_budget(gamma_f)?;
    run_tradeoff(lp_matrix(gains), gamma_f)
}

/// `v_f(γ_b)`: least worst-case expected focused risk with broad risk at most
/// `gamma_b`. `None` when `γ_b < R_b*(α_M)`.
pub fn min_focused_given_broad(gains: &Gains, gamma_b: &Rational) -> Result<Option<LpSolution>> {
    check_budget(gamma_b)?;
    run_tradeoff(mirror_matrix(gains), gamma_b)
}

fn check_budget(gamma: &Rational) -> Result<()> {
    if gamma.is_negative() || gamma > &one() {
        return Err(Error::invalid(format!("risk budget {} outside [0, 1]", to_fraction(gamma))));
    }
    Ok(())
}

/// One point of `Par(α)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrontierPoint {
    pub expected_focused: RiskValue,
    pub expected_broad: RiskValue,
    #[serde(with = "crate::rational::fraction::vec")]
    pub distribution: Vec<Rational>,
}

/// Default number of budget points on a frontier grid.
pub const DEFAULT_GRID: usize = 200;

/// `grid_size` evenly spaced budgets from `lo` to `hi`, both included.
pub fn budget_grid(lo: &Rational, hi: &Rational, grid_size: usize) -> Vec<Rational> {
    if lo == hi || grid_size < 2 {
        return vec![lo.clone()];
    }
    let steps = int(grid_size as i64 - 1);
    (0..grid_size).map(|i| lo + (hi - lo) * int(i as i64) / &steps).collect()
}

/// Raw `(γ_b, v_f(γ_b))` over the feasible budget range, before Pareto filtering.
pub fn focused_curve_on(gains: &Gains, budgets: &[Rational]) -> Result<Vec<(Rational, Option<LpSolution>)>> {
    try_map(budgets, |g| min_focused_given_broad(gains, g).map(|s| (g.clone(), s)))
}

/// `Par(α)` sampled at `grid_size` budgets in `[R_b*(α_M), R_b*(α_1)]`.
///
/// Points are ordered by increasing broad budget; a point whose focused value
/// repeats an earlier one is dominated and dropped.
pub fn pareto_frontier(gains: &Gains, grid_size: usize) -> Result<Vec<FrontierPoint>> {
    if grid_size < 2 {
        return Err(Error::invalid("frontier grid needs at least two points"));
    }
    let rb = gains.broad_curve();
    let budgets = budget_grid(rb.last().expect("non-empty"), &rb[0], grid_size);
    let mut out: Vec<FrontierPoint> = Vec::new();
    for (gamma, sol) in focused_curve_on(gains, &budgets)? {
        let sol = sol.ok_or_else(|| Error::invalid(format!("budget {} unexpectedly infeasible", to_fraction(&gamma))))?;
        if out.last().is_some_and(|p| p.expected_focused.value() <= &sol.value) {
            continue;
        }
        out.push(FrontierPoint { expected_focused: RiskValue::new(sol.value)?, expected_broad: RiskValue::new(gamma)?, distribution: sol.probs });
    }
    Ok(out)
}

/// Which improvement hypothesis relates two gain vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Improvement {
    /// Same length and interval classes, every gain weakly lowered.
    Lowered,
    /// The second vector contains the first.
    Superset,
}

/// A grid point where the candidate frontier is worse than the baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// `"v_f"` or `"v_b"`.
    pub program: &'static str,
    #[serde(with = "crate::rational::fraction")]
    pub budget: Rational,
    pub baseline: Option<String>,
    pub candidate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceReport {
    pub hypothesis: Improvement,
    pub points_checked: usize,
    pub violations: Vec<Violation>,
    /// True when both programs agree exactly at every point.
    pub identical: bool,
}

impl DominanceReport {
    pub fn dominates(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Identifies which improvement hypothesis takes `baseline` to `candidate`.
pub fn improvement_hypothesis(baseline: &Gains, candidate: &Gains) -> Result<Improvement> {
    if baseline.alpha_sys() != candidate.alpha_sys() {
        return Err(Error::invalid("gain vectors use different system gains"));
    }
    let lowered = baseline.len() == candidate.len()
        && baseline.values().iter().zip(candidate.values()).all(|(a, b)| b <= a && interval_index(a).ok() == interval_index(b).ok());
    if lowered {
        return Ok(Improvement::Lowered);
    }
    if baseline.values().iter().all(|a| candidate.values().contains(a)) {
        return Ok(Improvement::Superset);
    }
    Err(Error::invalid("neither lowered-gain nor superset hypothesis holds"))
}

/// Checks `v_f(·, candidate) ≤ v_f(·, baseline)` and the same for `v_b` on
/// `grid_size` budgets covering the range where either program is feasible.
pub fn compare_frontiers(baseline: &Gains, candidate: &Gains, grid_size: usize) -> Result<DominanceReport> {
    let hypothesis = improvement_hypothesis(baseline, candidate)?;
    let span = |a: &[Rational], b: &[Rational], lo_last: bool| -> (Rational, Rational) {
        let (ea, eb) = if lo_last { (a.last().unwrap(), b.last().unwrap()) } else { (&a[0], &b[0]) };
        let (oa, ob) = if lo_last { (&a[0], &b[0]) } else { (a.last().unwrap(), b.last().unwrap()) };
        (ea.max(eb).clone(), oa.max(ob).clone())
    };
    let (rb_a, rb_b) = (baseline.broad_curve(), candidate.broad_curve());
    let (rf_a, rf_b) = (baseline.focused_curve(), candidate.focused_curve());
    // v_f is feasible from R_b*(α_M) up; v_b from R_f*(α_1) up. Past R_b*(α_1), resp. R_f*(α_M), both are flat.
    let (blo, bhi) = span(&rb_a, &rb_b, true);
    let (flo, fhi) = span(&rf_a, &rf_b, false);
    let mut violations = Vec::new();
    let mut identical = true;
    let mut checked = 0;
    type Program = fn(&Gains, &Rational) -> Result<Option<LpSolution>>;
    let programs: [(&'static str, Program, Rational, Rational); 2] =
        [("v_f", min_focused_given_broad, blo, bhi), ("v_b", min_broad_given_focused, flo, fhi)];
    for (name, program, lo, hi) in programs {
        let budgets = budget_grid(&lo, &hi, grid_size);
        let results = try_map(&budgets, |g| Ok((program(baseline, g)?, program(candidate, g)?)))?;
        for (gamma, (a, b)) in budgets.into_iter().zip(results) {
            checked += 1;
            let worse = match (&a, &b) {
                (Some(a), Some(b)) => b.value > a.value,
                (Some(_), None) => true,
                _ => false,
            };
            identical &= a.as_ref().map(|s| &s.value) == b.as_ref().map(|s| &s.value);
            if worse {
                violations.push(Violation {
                    program: name,
                    budget: gamma,
                    baseline: a.map(|s| to_fraction(&s.value)),
                    candidate: b.map(|s| to_fraction(&s.value)),
                });
            }
        }
    }
    Ok(DominanceReport { hypothesis, points_checked: checked, violations, identical })
}

/// Staircase gains over `m ≥ 3` entries: `α_sys`, one gain inside each `I_j`
/// for `j = 2..m−2` at weight `eps` toward the right endpoint, then `1 + eps`
/// and `3/2 + eps`.
pub fn staircase_gains(m: usize, eps: &Rational, alpha_sys: &Rational) -> Result<Gains> {
    if m < 3 {
        return Err(Error::invalid("staircase gains need at least three entries"));
    }
    if !eps.is_positive() || eps > &ratio(1, 2) {
        return Err(Error::invalid("eps must lie in (0, 1/2]"));
    }
    let mut values = vec![alpha_sys.clone()];
    for j in 2..=(m - 2) as i64 {
        values.push((one() - eps) * ratio(j - 1, j) + eps * ratio(j, j + 1));
    }
    values.push(one() + eps);
    values.push(ratio(3, 2) + eps);
    Gains::new(values, alpha_sys.clone())
}
