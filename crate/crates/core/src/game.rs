//! The base coordination game: pairwise payoffs, benefits, welfare, efficiency.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::adversary::ActionSpace;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{one, Rational};
use crate::space::{self, Scaled};

/// The two conventions. `X` is the one carrying the gain premium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

impl Action {
    pub fn flip(self) -> Action {
        match self {
            Action::X => Action::Y,
            Action::Y => Action::X,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::X => "x",
            Action::Y => "y",
        })
    }
}

/// One action per node. Ordered lexicographically with `x < y`, node 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile(Vec<Action>);

impl ActionProfile {
    pub fn new(actions: Vec<Action>) -> Self {
        ActionProfile(actions)
    }

    pub fn uniform(n: usize, action: Action) -> Self {
        ActionProfile(vec![action; n])
    }

    /// Bit `i` of `mask` set means node `i` plays `x`.
    pub fn from_x_mask(n: usize, mask: u64) -> Self {
        ActionProfile((0..n).map(|i| if mask >> i & 1 == 1 { Action::X } else { Action::Y }).collect())
    }

    pub fn x_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == Action::X)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn with(&self, i: usize, action: Action) -> Self {
        let mut next = self.0.clone();
        next[i] = action;
        ActionProfile(next)
    }

    pub fn iter(&self) -> impl Iterator<Item = Action> + '_ {
        self.0.iter().copied()
    }
}

impl Index<usize> for ActionProfile {
    type Output = Action;
    fn index(&self, i: usize) -> &Action {
        &self.0[i]
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.0 {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for ActionProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                'x' | 'X' => Ok(Action::X),
                'y' | 'Y' => Ok(Action::Y),
                other => Err(Error::Parse(format!("unknown action {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ActionProfile)
    }
}

impl Serialize for ActionProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ActionProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `V^α(a_i, a_j)`: `1 + α` for coordinating on `x`, `1` on `y`, `0` otherwise.
pub fn pairwise_payoff(ai: Action, aj: Action, alpha: &Rational) -> Rational {
    match (ai, aj) {
        (Action::X, Action::X) => one() + alpha,
        (Action::Y, Action::Y) => one(),
        _ => Rational::zero(),
    }
}

/// Sum of pairwise payoffs of node `i` against its neighbors.
pub fn agent_benefit(g: &Graph, a: &ActionProfile, i: usize, alpha: &Rational) -> Result<Rational> {
    check_len(g, a)?;
    if i >= g.node_count() {
        return Err(Error::NodeOutOfRange { index: i, n: g.node_count() });
    }
    Ok(g.neighbors(i).iter().map(|&j| pairwise_payoff(a[i], a[j], alpha)).sum())
}

/// Sum of all agent benefits; every edge contributes once per endpoint.
pub fn welfare(g: &Graph, a: &ActionProfile, alpha: &Rational) -> Result<Rational> {
    check_len(g, a)?;
    Ok(edge_welfare_unchecked(g.edges(), a, alpha) * Rational::from_integer(2.into()))
}

/// Welfare due to an edge set, each edge counted once.
pub fn edge_welfare(g: &Graph, edges: &[(usize, usize)], a: &ActionProfile, alpha: &Rational) -> Result<Rational> {
    check_len(g, a)?;
    if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| !g.has_edge(i, j)) {
        return Err(Error::EdgeNotInGraph(i, j));
    }
    Ok(edge_welfare_unchecked(edges, a, alpha))
}

fn edge_welfare_unchecked(edges: &[(usize, usize)], a: &ActionProfile, alpha: &Rational) -> Rational {
    edges.iter().map(|&(i, j)| pairwise_payoff(a[i], a[j], alpha)).sum()
}

/// `W(a) / max_{a' ∈ space} W(a')` at the system gain, the maximum found by
/// enumerating the space.
pub fn efficiency(g: &Graph, a: &ActionProfile, space: &ActionSpace, alpha_sys: &Rational) -> Result<Rational> {
    check_len(g, a)?;
    if !space.contains(a) {
        return Err(Error::invalid(format!("profile {a} is not in the action space")));
    }
    let gain = Scaled::new(alpha_sys)?;
    let (ctx, best) = if space.free_count() == space.len() {
        // Unrestricted: a uniform profile coordinates on every edge.
        let ctx = space::Context::unbounded(g, space)?;
        let best = [ctx.welfare_score(ctx.full), ctx.welfare_score(0)].into_iter().max_by(|l, r| gain.cmp(l, r));
        (ctx, best)
    } else {
        let ctx = space::Context::new(g, space)?;
        let best = ctx.profiles().map(|m| ctx.welfare_score(m)).max_by(|l, r| gain.cmp(l, r));
        (ctx, best)
    };
    let best = best.ok_or_else(|| Error::invalid("empty action space"))?;
    let current = ctx.welfare_score(a.x_mask());
    let denom = gain.value(&best);
    if denom.is_zero() {
        // Only possible without edges, which connected graphs exclude.
        return Ok(one());
    }
    Ok(gain.value(&current) / denom)
}

fn check_len(g: &Graph, a: &ActionProfile) -> Result<()> {
    if a.len() != g.node_count() {
        Err(Error::LengthMismatch { expected: g.node_count(), got: a.len() })
    } else {
        Ok(())
    }
}
