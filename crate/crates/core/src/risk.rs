//! Deterministic risk: measured risk of concrete instances, closed-form
//! worst-case curves, and the tradeoff bounds between the two attack models.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::adversary::{Attack, BroadAttack, FocusedAttack};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{ceil, int, one, ratio, to_fraction, zero, Rational};
use crate::sss;

/// A risk in `[0, 1]`: one minus the efficiency of the worst stable outcome.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RiskValue(#[serde(with = "crate::rational::fraction")] Rational);

impl RiskValue {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value > one() {
            return Err(Error::invalid(format!("risk {} outside [0, 1]", to_fraction(&value))));
        }
        Ok(RiskValue(value))
    }

    pub fn zero() -> Self {
        RiskValue(zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }
}

impl fmt::Display for RiskValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_fraction(&self.0))
    }
}

/// Where a gain sits relative to the intervals `I_k = ((k−1)/k, k/(k+1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase", tag = "class", content = "k")]
pub enum IntervalIndex {
    /// `α ∈ I_k`, `k ≥ 1`.
    Step(u64),
    /// `α ∈ [1, 3/2]`.
    Unit,
    /// `α > 3/2`.
    Safe,
}

impl fmt::Display for IntervalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalIndex::Step(k) => write!(f, "I_{k}"),
            IntervalIndex::Unit => f.write_str("[1, 3/2]"),
            IntervalIndex::Safe => f.write_str("(3/2, inf)"),
        }
    }
}

fn check_gain(alpha: &Rational) -> Result<()> {
    if !alpha.is_positive() {
        return Err(Error::invalid(format!("gain must be positive, got {}", to_fraction(alpha))));
    }
    Ok(())
}

fn check_system_gain(alpha_sys: &Rational) -> Result<()> {
    if alpha_sys.is_negative() {
        return Err(Error::invalid(format!("system gain must be non-negative, got {}", to_fraction(alpha_sys))));
    }
    Ok(())
}

/// Classifies `alpha > 0`; right endpoints `k/(k+1)` belong to `I_k`.
pub fn interval_index(alpha: &Rational) -> Result<IntervalIndex> {
    check_gain(alpha)?;
    if alpha > &ratio(3, 2) {
        return Ok(IntervalIndex::Safe);
    }
    if alpha >= &one() {
        return Ok(IntervalIndex::Unit);
    }
    // Smallest k with α ≤ k/(k+1), i.e. k ≥ α/(1−α).
    let k = ceil(&(alpha / (one() - alpha)));
    let k = k.max(BigInt::one()).to_u64().ok_or(Error::Overflow)?;
    Ok(IntervalIndex::Step(k))
}

/// Left and right endpoints of `I_k`.
pub fn interval_bounds(k: u64) -> (Rational, Rational) {
    let k = k as i64;
    (ratio(k - 1, k), ratio(k, k + 1))
}

/// Gains below the system gain are dominated: raising them lowers both risks.
pub fn is_dominated_gain(alpha: &Rational, alpha_sys: &Rational) -> bool {
    alpha < alpha_sys
}

/// Measured broad risk `1 − W(â)/max W` of a concrete instance.
pub fn risk_broad(g: &Graph, attack: &BroadAttack, alpha: &Rational, alpha_sys: &Rational) -> Result<RiskValue> {
    measured(g, &Attack::Broad(attack.clone()), alpha, alpha_sys)
}

/// Measured focused risk; the optimum is taken over the restricted space.
pub fn risk_focused(g: &Graph, attack: &FocusedAttack, alpha: &Rational, alpha_sys: &Rational) -> Result<RiskValue> {
    measured(g, &Attack::Focused(attack.clone()), alpha, alpha_sys)
}

/// Measured risk for either attack model.
pub fn risk(g: &Graph, attack: &Attack, alpha: &Rational, alpha_sys: &Rational) -> Result<RiskValue> {
    measured(g, attack, alpha, alpha_sys)
}

fn measured(g: &Graph, attack: &Attack, alpha: &Rational, alpha_sys: &Rational) -> Result<RiskValue> {
    check_system_gain(alpha_sys)?;
    if alpha.is_negative() {
        return Err(Error::invalid(format!("gain must be non-negative, got {}", to_fraction(alpha))));
    }
    let solved = sss::solve(g, alpha, attack, alpha_sys)?;
    RiskValue::new(one() - solved.efficiency())
}

/// Worst broad risk over all graphs and target sets at gain `alpha`.
pub fn worst_case_broad(alpha: &Rational, alpha_sys: &Rational) -> Result<RiskValue> {
    check_system_gain(alpha_sys)?;
    let value = match interval_index(alpha)? {
        IntervalIndex::Step(k) => one() - interval_bounds(k).1 / (one() + alpha_sys),
        IntervalIndex::Unit => one() - one() / (one() + alpha_sys),
        IntervalIndex::Safe => zero(),
    };
    RiskValue::new(value)
}

/// Worst focused risk over all graphs and fixed sets at gain `alpha`.
pub fn worst_case_focused(alpha: &Rational, alpha_sys: &Rational) -> Result<RiskValue> {
    check_system_gain(alpha_sys)?;
    check_gain(alpha)?;
    let (lo, hi) = if alpha < alpha_sys { (alpha, alpha_sys) } else { (alpha_sys, alpha) };
    RiskValue::new(one() - (one() + lo) / (one() + hi))
}

/// Lower bound on the broad risk of any gain whose focused risk is at most `gamma_f`.
pub fn tradeoff_focused_to_broad(gamma_f: &Rational, alpha_sys: &Rational) -> Result<RiskValue> {
    check_system_gain(alpha_sys)?;
    if gamma_f.is_negative() || gamma_f >= &one() {
        return Err(Error::invalid(format!("gamma_f must lie in [0, 1), got {}", to_fraction(gamma_f))));
    }
    let alpha_star = (one() + alpha_sys) / (one() - gamma_f) - one();
    if alpha_star.is_zero() {
        // α_sys = 0 and γ_f = 0: the limit from the right, inside I_1.
        return RiskValue::new(one() - interval_bounds(1).1);
    }
    worst_case_broad(&alpha_star, alpha_sys)
}

/// Focused-risk lower bound from the broad-risk budget `gamma_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TradeoffBound {
    pub value: RiskValue,
    /// The focused risk strictly exceeds `value` when set, and can equal it otherwise.
    pub strict: bool,
}

/// Infimum of the worst focused risk over gains whose worst broad risk is at most `gamma_b`.
pub fn tradeoff_broad_to_focused(gamma_b: &Rational, alpha_sys: &Rational) -> Result<TradeoffBound> {
    check_system_gain(alpha_sys)?;
    if gamma_b.is_negative() || gamma_b > &one() {
        return Err(Error::invalid(format!("gamma_b must lie in [0, 1], got {}", to_fraction(gamma_b))));
    }
    let exact = |alpha: Rational, strict: bool| -> Result<TradeoffBound> {
        Ok(TradeoffBound { value: worst_case_focused(&alpha, alpha_sys)?, strict })
    };
    let free = TradeoffBound { value: RiskValue::zero(), strict: false };
    let unit_risk = one() - one() / (one() + alpha_sys);
    // Interval of the system gain; 0 stands for α_sys = 0, which lies left of I_1.
    let ks = if alpha_sys.is_zero() {
        0
    } else {
        match interval_index(alpha_sys)? {
            IntervalIndex::Safe => return Ok(free),
            IntervalIndex::Unit if gamma_b >= &unit_risk => return Ok(free),
            IntervalIndex::Unit => return exact(ratio(3, 2), true),
            IntervalIndex::Step(ks) => ks,
        }
    };
    if ks > 0 && gamma_b >= &(one() - interval_bounds(ks).1 / (one() + alpha_sys)) {
        return Ok(free);
    }
    if let Some(b) = step_branch(gamma_b, alpha_sys, ks + 1)? {
        return Ok(b);
    }
    if gamma_b == &unit_risk {
        exact(one(), false)
    } else {
        exact(ratio(3, 2), true)
    }
}

/// Cheapest `I_k` (with `k ≥ k_min`) whose broad risk fits in `gamma_b`, if one exists.
fn step_branch(gamma_b: &Rational, alpha_sys: &Rational, k_min: u64) -> Result<Option<TradeoffBound>> {
    // I_k is affordable iff k/(k+1) ≥ t with t = (1 − γ_b)(1 + α_sys).
    let t = (one() - gamma_b) * (one() + alpha_sys);
    if t >= one() {
        return Ok(None);
    }
    let k = if t.is_positive() { ceil(&(&t / (one() - &t))).to_u64().ok_or(Error::Overflow)? } else { 1 };
    let k = k.max(k_min);
    let left = interval_bounds(k).0;
    // Only I_1 starts at 0, reachable when α_sys = 0; its infimum risk is 0.
    let value = if left.is_zero() { RiskValue::zero() } else { worst_case_focused(&left, alpha_sys)? };
    Ok(Some(TradeoffBound { value, strict: true }))
}

/// `Σn_i / Σd_i`, which is at least `min n_i/d_i`.
pub fn mediant_sum(pairs: &[(Rational, Rational)]) -> Result<Rational> {
    if pairs.is_empty() {
        return Err(Error::invalid("mediant of an empty list"));
    }
    if let Some((_, d)) = pairs.iter().find(|(_, d)| !d.is_positive()) {
        return Err(Error::invalid(format!("nonpositive denominator {}", to_fraction(d))));
    }
    if let Some((n, _)) = pairs.iter().find(|(n, _)| n.is_negative()) {
        return Err(Error::invalid(format!("negative numerator {}", to_fraction(n))));
    }
    let n: Rational = pairs.iter().map(|(n, _)| n.clone()).sum();
    let d: Rational = pairs.iter().map(|(_, d)| d.clone()).sum();
    Ok(n / d)
}

/// Evenly spaced gains `lo + (hi − lo)·i/n` for `i = 1..=n`.
pub fn gain_grid(lo: &Rational, hi: &Rational, n: usize) -> Vec<Rational> {
    let step = (hi - lo) / int(n as i64);
    (1..=n).map(|i| lo + &step * int(i as i64)).collect()
}
