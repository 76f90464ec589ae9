//! Worst-case instance families and the reduction of arbitrary broad
//! instances to imposter stars.

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::adversary::{Attack, BroadAttack, FocusedAttack};
use crate::error::{Error, Result};
use crate::game::Action;
use crate::graph::{edges_between, make_star, partitions_of, Graph, NodeSet, Partition};
use crate::rational::{ceil, int, one, ratio, to_fraction, Rational};
use crate::sss;

/// A graph with a broad attack on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadInstance {
    pub graph: Graph,
    pub attack: BroadAttack,
}

/// A graph with a focused attack on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusedInstance {
    pub graph: Graph,
    pub attack: FocusedAttack,
}

impl BroadInstance {
    /// Membership in the imposter-star family: a star whose center carries a
    /// `y` imposter, with every other node split freely between the two sets.
    pub fn is_imposter_star(&self) -> bool {
        match self.graph.star_center() {
            Some(c) => self.attack.s_y.contains(c) && self.attack.validate(&self.graph).is_ok(),
            None => false,
        }
    }

    pub fn into_attack(self) -> (Graph, Attack) {
        (self.graph, Attack::Broad(self.attack))
    }
}

impl FocusedInstance {
    pub fn into_attack(self) -> (Graph, Attack) {
        (self.graph, Attack::Focused(self.attack))
    }
}

/// Star on `k + 2` nodes whose center and first `k` leaves carry `y`
/// imposters and whose last leaf carries an `x` imposter. Its `y` set is
/// stable exactly for `α ≤ k/(k+1)`.
pub fn broad_worst_star(k: usize) -> Result<BroadInstance> {
    if k < 1 {
        return Err(Error::invalid("broad worst star needs k >= 1"));
    }
    imposter_star(k, 1)
}

/// Star with `y_leaves` y-imposter leaves, `x_leaves` x-imposter leaves and a y-imposter center.
pub fn imposter_star(y_leaves: usize, x_leaves: usize) -> Result<BroadInstance> {
    let n = 1 + y_leaves + x_leaves;
    let graph = make_star(n)?;
    let attack = BroadAttack::new(NodeSet::new(y_leaves + 1..n), NodeSet::new(0..=y_leaves));
    Ok(BroadInstance { graph, attack })
}

/// Least efficiency over imposter stars of `n` nodes at gain `0 < α < 1`.
pub fn star_min_efficiency(n: usize, alpha: &Rational, alpha_sys: &Rational) -> Result<Rational> {
    if n < 3 {
        return Err(Error::invalid(format!("star needs at least 3 nodes, got {n}")));
    }
    check_unit_gain(alpha)?;
    let leaves = int(n as i64 - 1);
    let ny = ceil(&(((one() + alpha) * &leaves - one()) / int(2)));
    Ok(Rational::from_integer(ny) / ((one() + alpha_sys) * leaves))
}

fn check_unit_gain(alpha: &Rational) -> Result<()> {
    if !alpha.is_positive() || alpha >= &one() {
        return Err(Error::invalid(format!("gain must lie in (0, 1), got {}", to_fraction(alpha))));
    }
    Ok(())
}

/// Star whose single unfixed center faces `n_x` fixed-x and `n_y` fixed-y leaves.
///
/// Node 0 is the center, nodes `1..=n_x` are fixed to `x`, the rest to `y`.
pub fn focused_worst_star(n_x: usize, n_y: usize) -> Result<FocusedInstance> {
    if n_x == 0 || n_y == 0 {
        return Err(Error::invalid("focused worst star needs at least one leaf of each kind"));
    }
    let n = 1 + n_x + n_y;
    let graph = make_star(n)?;
    let attack = FocusedAttack::new(NodeSet::new(1..=n_x), NodeSet::new(n_x + 1..n));
    Ok(FocusedInstance { graph, attack })
}

/// Smallest `(n_x, n_y)` with `n_y / n_x = 1 + α`.
pub fn ratio_for_gain(alpha: &Rational) -> Result<(usize, usize)> {
    if alpha.is_negative() {
        return Err(Error::invalid("gain must be non-negative"));
    }
    let q = one() + alpha;
    let n_x = q.denom().to_usize().ok_or(Error::Overflow)?;
    let n_y = q.numer().to_usize().ok_or(Error::Overflow)?;
    Ok((n_x, n_y))
}

/// `N/(N−1)`: on `N` nodes every broad attack is harmless exactly above it.
pub fn safeguard_threshold(n: usize) -> Result<Rational> {
    if n < 3 {
        return Err(Error::invalid(format!("threshold is defined for N >= 3, got {n}")));
    }
    Ok(ratio(n as i64, n as i64 - 1))
}

/// How [`star_reduction`] produced its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionOutcome {
    /// The input was an imposter star without coordinating x-edges.
    AlreadyStar,
    /// The worst stable state has no y-partition; a harmless star is returned.
    NoYPartition,
    /// Built from the y-partition of least efficiency.
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarReduction {
    pub outcome: ReductionOutcome,
    pub instance: BroadInstance,
    /// Efficiency of the output's y-configuration at the system gain.
    #[serde(with = "crate::rational::fraction")]
    pub efficiency: Rational,
    /// Node set of the enlarged y-partition in the output.
    pub y_partition: NodeSet,
}

/// Turns any broad instance into an imposter star of no greater efficiency.
///
/// Each y-partition of the welfare-minimizing stable state becomes a star
/// keeping its internal edges as y-leaves. Internal edges of each x-partition
/// are moved onto the lowest-index adjacent y-partition as extra y-leaves, and
/// every boundary edge of a y-partition becomes an x-imposter leaf of its
/// center. The component of least efficiency is returned.
pub fn star_reduction(g: &Graph, attack: &BroadAttack, alpha: &Rational, alpha_sys: &Rational) -> Result<StarReduction> {
    check_unit_gain(alpha)?;
    let solved = sss::solve(g, alpha, &Attack::Broad(attack.clone()), alpha_sys)?;
    let profile = &solved.result.welfare_min;
    let parts = partitions_of(g, profile)?;
    let (ys, xs): (Vec<&Partition>, Vec<&Partition>) = parts.iter().partition(|p| p.convention == Action::Y);

    let input = BroadInstance { graph: g.clone(), attack: attack.clone() };
    let x_nodes = NodeSet::new((0..g.node_count()).filter(|&i| profile[i] == Action::X));
    let coordinating_x = !edges_between(g, &x_nodes, &x_nodes)?.is_empty();
    if input.is_imposter_star() && !coordinating_x {
        let center = g.star_center().expect("star");
        let y_partition = ys.iter().find(|p| p.nodes.contains(center)).map(|p| p.nodes.clone()).unwrap_or_default();
        return Ok(StarReduction { outcome: ReductionOutcome::AlreadyStar, efficiency: solved.efficiency(), instance: input, y_partition });
    }
    if ys.is_empty() {
        return Ok(StarReduction {
            outcome: ReductionOutcome::NoYPartition,
            instance: imposter_star(0, g.node_count() - 1)?,
            efficiency: one(),
            y_partition: NodeSet::empty(),
        });
    }

    // Per y-partition: internal edges, boundary edges, absorbed x-internal edges.
    let mut internal = Vec::with_capacity(ys.len());
    let mut boundary = Vec::with_capacity(ys.len());
    for p in &ys {
        internal.push(edges_between(g, &p.nodes, &p.nodes)?.len());
        let rest = NodeSet::new((0..g.node_count()).filter(|&i| !p.nodes.contains(i)));
        boundary.push(edges_between(g, &p.nodes, &rest)?.len());
    }
    let mut absorbed = vec![0usize; ys.len()];
    for x in &xs {
        let host = ys
            .iter()
            .position(|y| x.nodes.iter().any(|i| g.neighbors(i).iter().any(|&j| y.nodes.contains(j))))
            .ok_or_else(|| Error::invalid("x-partition without a y neighbor"))?;
        absorbed[host] += edges_between(g, &x.nodes, &x.nodes)?.len();
    }

    let efficiencies: Vec<Rational> = (0..ys.len())
        .map(|j| {
            let y_edges = int((internal[j] + absorbed[j]) as i64);
            let total = &y_edges + int(boundary[j] as i64);
            y_edges / ((one() + alpha_sys) * total)
        })
        .collect();
    // First component of least efficiency.
    let best = (0..efficiencies.len()).fold(0, |b, j| if efficiencies[j] < efficiencies[b] { j } else { b });
    let efficiency = efficiencies[best].clone();
    let y_leaves = internal[best] + absorbed[best];
    let instance = imposter_star(y_leaves, boundary[best])?;
    Ok(StarReduction { outcome: ReductionOutcome::Reduced, instance, efficiency, y_partition: NodeSet::new(0..=y_leaves) })
}
