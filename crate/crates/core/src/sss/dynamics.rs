//! Finite-β log-linear learning: closed-form Gibbs measure, exact stationary
//! solve of the chain, and a seeded simulator.
//!
//! This is the only floating-point zone of the crate. It exists to
//! cross-check the exact potential argmax.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{Attack, PotentialModel};
use crate::error::{Error, Result};
use crate::game::ActionProfile;
use crate::graph::Graph;
use crate::rational::{to_f64, Rational};
use crate::space::{Context, Score};

/// Largest graph [`gibbs_distribution`] accepts.
pub const GIBBS_CAP: usize = 16;
/// Largest graph [`exact_stationary`] accepts; its transition matrix is dense.
pub const STATIONARY_CAP: usize = 12;

/// Log-linear learning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub beta: f64,
    pub steps: u64,
    pub seed: u64,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        // β = 0 is allowed: it is the uniform baseline the checks rely on.
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::invalid(format!("beta must be finite and non-negative, got {}", self.beta)));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps must be positive"));
        }
        Ok(())
    }
}

/// Probabilities over the profiles of an action space, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probs: BTreeMap<ActionProfile, f64>,
}

impl Distribution {
    fn from_masks(n: usize, entries: impl IntoIterator<Item = (u64, f64)>) -> Self {
        Distribution { probs: entries.into_iter().map(|(x, p)| (ActionProfile::from_x_mask(n, x), p)).collect() }
    }

    /// Probability of `a`; zero for profiles outside the support.
    pub fn get(&self, a: &ActionProfile) -> f64 {
        self.probs.get(a).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActionProfile, f64)> {
        self.probs.iter().map(|(a, &p)| (a, p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Profiles whose probability is within `tol` of the largest.
    pub fn argmax(&self, tol: f64) -> Vec<ActionProfile> {
        let top = self.probs.values().copied().fold(f64::NEG_INFINITY, f64::max);
        self.probs.iter().filter(|(_, &p)| p >= top - tol).map(|(a, _)| a.clone()).collect()
    }

    /// Most likely profile, lexicographically first on ties.
    pub fn mode(&self) -> Option<&ActionProfile> {
        let mut best: Option<(&ActionProfile, f64)> = None;
        for (a, &p) in &self.probs {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((a, p));
            }
        }
        best.map(|(a, _)| a)
    }

    fn keys_union<'a>(&'a self, other: &'a Distribution) -> impl Iterator<Item = &'a ActionProfile> {
        self.probs.keys().chain(other.probs.keys().filter(|k| !self.probs.contains_key(*k)))
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.keys_union(other).map(|a| (self.get(a) - other.get(a)).abs()).fold(0.0, f64::max)
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self.keys_union(other).map(|a| (self.get(a) - other.get(a)).abs()).sum::<f64>()
    }
}

fn score_f64(alpha: f64, s: &Score) -> f64 {
    (1.0 + alpha) * s.a as f64 + s.b as f64
}

fn check_beta(beta: f64) -> Result<()> {
    ChainSpec { beta, steps: 1, seed: 0 }.validate()
}

fn capped_context(g: &Graph, attack: &Attack, cap: usize) -> Result<Context> {
    let space = attack.space(g)?;
    if g.node_count() > cap {
        return Err(Error::CapExceeded { what: "node count", got: g.node_count(), limit: cap });
    }
    Context::new(g, &space)
}

/// `π(a) ∝ exp(β·Φ(a))` over the attack's action space.
pub fn gibbs_distribution(g: &Graph, alpha: &Rational, attack: &Attack, beta: f64) -> Result<Distribution> {
    check_beta(beta)?;
    let ctx = capped_context(g, attack, GIBBS_CAP)?;
    let model = PotentialModel::for_attack(attack);
    let a = to_f64(alpha);
    let phis: Vec<(u64, f64)> = ctx.profiles().map(|x| (x, score_f64(a, &model.potential(&ctx, x)))).collect();
    let top = phis.iter().map(|&(_, p)| p).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<(u64, f64)> = phis.into_iter().map(|(x, p)| (x, (beta * (p - top)).exp())).collect();
    let z: f64 = weights.iter().map(|&(_, w)| w).sum();
    Ok(Distribution::from_masks(ctx.n, weights.into_iter().map(|(x, w)| (x, w / z))))
}

/// Softmax choice of a single agent given everyone else.
struct Chooser {
    alpha: f64,
    adj: Vec<u64>,
    s_x: u64,
    s_y: u64,
}

impl Chooser {
    fn new(ctx: &Context, alpha: f64, model: &PotentialModel) -> Self {
        Chooser { alpha, adj: ctx.adj.clone(), s_x: model.s_x, s_y: model.s_y }
    }

    /// Probability that node `i` picks `x` at rationality `beta`.
    fn prob_x(&self, i: usize, x: u64, beta: f64) -> f64 {
        self.probs(i, x, beta).0
    }

    /// `(P(x), P(y))` for node `i`, each computed directly so tiny values keep their precision.
    fn probs(&self, i: usize, x: u64, beta: f64) -> (f64, f64) {
        let nx = (self.adj[i] & x).count_ones() as f64;
        let ny = (self.adj[i] & !x).count_ones() as f64;
        let bonus_x = if self.s_x >> i & 1 == 1 { 1.0 + self.alpha } else { 0.0 };
        let bonus_y = if self.s_y >> i & 1 == 1 { 1.0 } else { 0.0 };
        let ux = (1.0 + self.alpha) * nx + bonus_x;
        let uy = ny + bonus_y;
        let d = beta * (uy - ux);
        (1.0 / (1.0 + d.exp()), 1.0 / (1.0 + (-d).exp()))
    }
}

/// Stationary distribution of the chain that picks one of the `N` agents
/// uniformly (fixed agents then stay put) and resamples its action by the
/// softmax of its perceived utility.
pub fn exact_stationary(g: &Graph, alpha: &Rational, attack: &Attack, beta: f64) -> Result<Distribution> {
    check_beta(beta)?;
    let ctx = capped_context(g, attack, STATIONARY_CAP)?;
    let chooser = Chooser::new(&ctx, to_f64(alpha), &PotentialModel::for_attack(attack));
    let states: Vec<u64> = ctx.profiles().collect();
    let index: HashMap<u64, usize> = states.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let m = states.len();
    let n = ctx.n as f64;

    // Off-diagonal transition rates; self-loops do not affect the stationary law.
    let mut p = vec![vec![0.0f64; m]; m];
    for (k, &x) in states.iter().enumerate() {
        for i in (0..ctx.n).filter(|&i| ctx.free >> i & 1 == 1) {
            let (px, py) = chooser.probs(i, x, beta);
            let (to_x, to_y) = (index[&(x | 1 << i)], index[&(x & !(1 << i))]);
            if to_x != k {
                p[k][to_x] += px / n;
            }
            if to_y != k {
                p[k][to_y] += py / n;
            }
        }
    }
    let pi = gth_stationary(p)?;
    Ok(Distribution::from_masks(ctx.n, states.iter().copied().zip(pi)))
}

/// Grassmann–Taksar–Heyman state reduction. It uses no subtractions, so
/// stationary masses far below machine epsilon relative to the mode stay accurate.
fn gth_stationary(mut p: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let m = p.len();
    for k in (1..m).rev() {
        let s: f64 = p[k][..k].iter().sum();
        if s <= 0.0 {
            return Err(Error::invalid("transition chain is not irreducible"));
        }
        let (head, tail) = p.split_at_mut(k);
        let row_k = &tail[0];
        for row in head.iter_mut() {
            let w = row[k] / s;
            row[k] = w;
            if w != 0.0 {
                for (v, &r) in row[..k].iter_mut().zip(&row_k[..k]) {
                    *v += w * r;
                }
            }
        }
    }
    let mut pi = vec![0.0f64; m];
    pi[0] = 1.0;
    for k in 1..m {
        pi[k] = (0..k).map(|i| pi[i] * p[i][k]).sum();
    }
    let total: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|v| v / total).collect())
}

/// Runs the chain from the lexicographically first profile and returns visit
/// frequencies after a 10% burn-in. Deterministic given the seed.
pub fn simulate_lll(g: &Graph, alpha: &Rational, attack: &Attack, chain: &ChainSpec) -> Result<Distribution> {
    chain.validate()?;
    let space = attack.space(g)?;
    let ctx = Context::unbounded(g, &space)?;
    let chooser = Chooser::new(&ctx, to_f64(alpha), &PotentialModel::for_attack(attack));
    let mut rng = ChaCha8Rng::seed_from_u64(chain.seed);
    let burn = chain.steps / 10;
    let mut x = ctx.fixed_x | ctx.free;
    let mut visits: HashMap<u64, u64> = HashMap::new();
    for t in 0..chain.steps {
        let i = rng.random_range(0..ctx.n);
        if ctx.free >> i & 1 == 1 {
            let px = chooser.prob_x(i, x, chain.beta);
            x = if rng.random::<f64>() < px { x | 1 << i } else { x & !(1 << i) };
        }
        if t >= burn {
            *visits.entry(x).or_insert(0) += 1;
        }
    }
    let total = (chain.steps - burn) as f64;
    Ok(Distribution::from_masks(ctx.n, visits.into_iter().map(|(x, c)| (x, c as f64 / total))))
}
