//! Attack models and their potentials.
//!
//! Broad attacks attach one imposter to every agent; focused attacks pin a
//! strict subset of agents to a fixed action. Both induce exact potential
//! games, which is what the stochastically stable state solver relies on.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{welfare, Action, ActionProfile};
use crate::graph::{Graph, NodeSet, Partition};
use crate::rational::{ratio, Rational};
use crate::space::{submasks, Context, Scaled, Score};

/// Largest partition whose deviations the stability checks will enumerate.
pub const STABILITY_CAP: usize = 20;

/// Imposter placement: `s_x` agents get an `x` imposter, `s_y` a `y` imposter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BroadAttack {
    pub s_x: NodeSet,
    pub s_y: NodeSet,
}

impl BroadAttack {
    pub fn new(s_x: NodeSet, s_y: NodeSet) -> Self {
        BroadAttack { s_x, s_y }
    }

    /// Bit `i` of `mask` set means node `i` carries a `y` imposter.
    pub fn from_y_mask(n: usize, mask: u64) -> Self {
        let (y, x): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| mask >> i & 1 == 1);
        BroadAttack { s_x: NodeSet::new(x), s_y: NodeSet::new(y) }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.s_x.validate(g)?;
        self.s_y.validate(g)?;
        if !self.s_x.is_disjoint(&self.s_y) {
            return Err(Error::invalid("target sets s_x and s_y overlap"));
        }
        if self.s_x.len() + self.s_y.len() != g.node_count() {
            return Err(Error::invalid("target sets must cover every node"));
        }
        Ok(())
    }
}

/// Fixed agents: `f_x` locked to `x`, `f_y` locked to `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FocusedAttack {
    pub f_x: NodeSet,
    pub f_y: NodeSet,
}

impl FocusedAttack {
    pub fn new(f_x: NodeSet, f_y: NodeSet) -> Self {
        FocusedAttack { f_x, f_y }
    }

    pub fn fixed(&self) -> NodeSet {
        self.f_x.union(&self.f_y)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.f_x.validate(g)?;
        self.f_y.validate(g)?;
        if !self.f_x.is_disjoint(&self.f_y) {
            return Err(Error::invalid("fixed sets f_x and f_y overlap"));
        }
        let fixed = self.f_x.len() + self.f_y.len();
        if fixed == 0 {
            return Err(Error::invalid("a focused attack fixes at least one agent"));
        }
        if fixed >= g.node_count() {
            return Err(Error::invalid("fixed agents must be a strict subset of the nodes"));
        }
        Ok(())
    }
}

/// Either attack model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Attack {
    Broad(BroadAttack),
    Focused(FocusedAttack),
}

impl Attack {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self {
            Attack::Broad(b) => b.validate(g),
            Attack::Focused(f) => f.validate(g),
        }
    }

    /// Action space the attack leaves to the agents.
    pub fn space(&self, g: &Graph) -> Result<ActionSpace> {
        match self {
            Attack::Broad(b) => {
                b.validate(g)?;
                Ok(ActionSpace::unrestricted(g.node_count()))
            }
            Attack::Focused(f) => restricted_space(g, f),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Attack::Broad(_) => "broad",
            Attack::Focused(_) => "focused",
        }
    }
}

/// Per-node allowed actions: `None` is free, `Some(a)` is pinned to `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    nodes: Vec<Option<Action>>,
}

impl ActionSpace {
    pub fn unrestricted(n: usize) -> Self {
        ActionSpace { nodes: vec![None; n] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn allowed(&self, i: usize) -> &'static [Action] {
        match self.nodes[i] {
            None => &[Action::X, Action::Y],
            Some(Action::X) => &[Action::X],
            Some(Action::Y) => &[Action::Y],
        }
    }

    pub fn is_free(&self, i: usize) -> bool {
        self.nodes[i].is_none()
    }

    pub fn free_count(&self) -> usize {
        self.nodes.iter().filter(|a| a.is_none()).count()
    }

    /// Number of profiles, `2^(free nodes)`; `None` if it overflows.
    pub fn size(&self) -> Option<u128> {
        1u128.checked_shl(self.free_count() as u32)
    }

    pub fn contains(&self, a: &ActionProfile) -> bool {
        a.len() == self.nodes.len() && self.nodes.iter().zip(a.iter()).all(|(fixed, ai)| fixed.is_none_or(|f| f == ai))
    }

    pub(crate) fn free_mask(&self) -> u64 {
        self.mask_where(|a| a.is_none())
    }

    pub(crate) fn fixed_x_mask(&self) -> u64 {
        self.mask_where(|a| *a == Some(Action::X))
    }

    fn mask_where(&self, pred: impl Fn(&Option<Action>) -> bool) -> u64 {
        self.nodes.iter().enumerate().filter(|(_, a)| pred(a)).fold(0u64, |m, (i, _)| m | (1 << i))
    }
}

/// `𝒜(F)`: fixed agents keep their prescribed action, all others stay free.
pub fn restricted_space(g: &Graph, attack: &FocusedAttack) -> Result<ActionSpace> {
    attack.validate(g)?;
    let mut nodes = vec![None; g.node_count()];
    for i in attack.f_x.iter() {
        nodes[i] = Some(Action::X);
    }
    for i in attack.f_y.iter() {
        nodes[i] = Some(Action::Y);
    }
    Ok(ActionSpace { nodes })
}

/// Utility agent `i` perceives under gain `alpha`: its benefit at `alpha`
/// plus the imposter bonus (`1` for playing `y` with a `y` imposter,
/// `1 + alpha` for playing `x` with an `x` imposter).
pub fn perceived_utility(g: &Graph, a: &ActionProfile, i: usize, alpha: &Rational, attack: &BroadAttack) -> Result<Rational> {
    attack.validate(g)?;
    let base = crate::game::agent_benefit(g, a, i, alpha)?;
    Ok(base + imposter_bonus(a[i], i, alpha, attack))
}

fn imposter_bonus(action: Action, i: usize, alpha: &Rational, attack: &BroadAttack) -> Rational {
    match action {
        Action::Y if attack.s_y.contains(i) => ratio(1, 1),
        Action::X if attack.s_x.contains(i) => ratio(1, 1) + alpha,
        _ => Rational::zero(),
    }
}

/// `½W^α(a) + (1+α)·#{S_x playing x} + #{S_y playing y}`.
pub fn broad_potential(g: &Graph, a: &ActionProfile, alpha: &Rational, attack: &BroadAttack) -> Result<Rational> {
    attack.validate(g)?;
    let half = welfare(g, a, alpha)? / ratio(2, 1);
    let bonus: Rational = (0..g.node_count()).map(|i| imposter_bonus(a[i], i, alpha, attack)).sum();
    Ok(half + bonus)
}

/// `½W^α(a)`, the potential of the game restricted by fixed agents.
pub fn focused_potential(g: &Graph, a: &ActionProfile, alpha: &Rational) -> Result<Rational> {
    Ok(welfare(g, a, alpha)? / ratio(2, 1))
}

/// Terms of the potential that a group of nodes controls.
pub(crate) struct PotentialModel {
    pub s_x: u64,
    pub s_y: u64,
}

impl PotentialModel {
    pub fn broad(attack: &BroadAttack) -> Self {
        PotentialModel { s_x: attack.s_x.mask(), s_y: attack.s_y.mask() }
    }

    pub fn focused() -> Self {
        PotentialModel { s_x: 0, s_y: 0 }
    }

    pub fn for_attack(attack: &Attack) -> Self {
        match attack {
            Attack::Broad(b) => Self::broad(b),
            Attack::Focused(_) => Self::focused(),
        }
    }

    pub fn potential(&self, ctx: &Context, x: u64) -> Score {
        let (xx, yy) = ctx.coordinating(x);
        self.with_bonus(ctx, x, ctx.full, Score { a: xx, b: yy })
    }

    /// Potential terms touching `part`: its incident edges once, plus its imposter bonuses.
    pub fn local(&self, ctx: &Context, x: u64, part: u64) -> Score {
        let (xx, yy) = ctx.local_coordinating(x, part);
        self.with_bonus(ctx, x, part, Score { a: xx, b: yy })
    }

    fn with_bonus(&self, ctx: &Context, x: u64, within: u64, s: Score) -> Score {
        let y = !x & ctx.full;
        s + Score {
            a: (x & self.s_x & within).count_ones() as i64,
            b: (y & self.s_y & within).count_ones() as i64,
        }
    }
}

/// (CY): no deviation of the y-partition's members raises its share of the
/// broad potential.
pub fn check_stability_y_broad(g: &Graph, partition: &Partition, a: &ActionProfile, alpha: &Rational, attack: &BroadAttack) -> Result<bool> {
    attack.validate(g)?;
    let space = ActionSpace::unrestricted(g.node_count());
    partition_stable(g, &space, partition, Action::Y, a, alpha, &PotentialModel::broad(attack))
}

/// (CX): mirror of [`check_stability_y_broad`] for an x-partition.
pub fn check_stability_x_broad(g: &Graph, partition: &Partition, a: &ActionProfile, alpha: &Rational, attack: &BroadAttack) -> Result<bool> {
    attack.validate(g)?;
    let space = ActionSpace::unrestricted(g.node_count());
    partition_stable(g, &space, partition, Action::X, a, alpha, &PotentialModel::broad(attack))
}

/// (CYE): deviations range over the partition's unfixed members only.
pub fn check_stability_y_focused(g: &Graph, partition: &Partition, a: &ActionProfile, alpha: &Rational, attack: &FocusedAttack) -> Result<bool> {
    let space = restricted_space(g, attack)?;
    partition_stable(g, &space, partition, Action::Y, a, alpha, &PotentialModel::focused())
}

/// (CXE): x-partition counterpart of [`check_stability_y_focused`].
pub fn check_stability_x_focused(g: &Graph, partition: &Partition, a: &ActionProfile, alpha: &Rational, attack: &FocusedAttack) -> Result<bool> {
    let space = restricted_space(g, attack)?;
    partition_stable(g, &space, partition, Action::X, a, alpha, &PotentialModel::focused())
}

fn partition_stable(
    g: &Graph,
    space: &ActionSpace,
    partition: &Partition,
    convention: Action,
    a: &ActionProfile,
    alpha: &Rational,
    model: &PotentialModel,
) -> Result<bool> {
    if a.len() != g.node_count() {
        return Err(Error::LengthMismatch { expected: g.node_count(), got: a.len() });
    }
    partition.nodes.validate(g)?;
    if partition.convention != convention || partition.nodes.iter().any(|i| a[i] != convention) {
        return Err(Error::invalid(format!("partition is not uniformly {convention} in profile {a}")));
    }
    if !space.contains(a) {
        return Err(Error::invalid(format!("profile {a} is not in the action space")));
    }
    let members = partition.nodes.mask();
    let movable = members & space.free_mask();
    let count = movable.count_ones() as usize;
    if count > STABILITY_CAP {
        return Err(Error::CapExceeded { what: "partition size", got: count, limit: STABILITY_CAP });
    }
    let ctx = Context::unbounded(g, space)?;
    let gain = Scaled::new(alpha)?;
    let x = a.x_mask();
    let current = x & movable;
    let base = x & !movable;
    let held = model.local(&ctx, x, members);
    for sub in submasks(movable) {
        if sub != current && gain.cmp(&model.local(&ctx, base | sub, members), &held).is_gt() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Action::{X, Y};
    use crate::graph::{make_line, make_star, random_connected};
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn p(s: &str) -> ActionProfile {
        s.parse().unwrap()
    }

    fn set(v: &[usize]) -> NodeSet {
        NodeSet::new(v.iter().copied())
    }

    /// Three-node line; node 0 carries an x imposter, nodes 1 and 2 a y imposter.
    fn line_attack() -> (Graph, BroadAttack) {
        (make_line(3).unwrap(), BroadAttack::new(set(&[0]), set(&[1, 2])))
    }

    #[test]
    fn attack_validation() {
        let g = make_line(3).unwrap();
        assert!(BroadAttack::new(set(&[0]), set(&[1, 2])).validate(&g).is_ok());
        assert!(BroadAttack::new(set(&[0, 1]), set(&[1, 2])).validate(&g).is_err());
        assert!(BroadAttack::new(set(&[0]), set(&[1])).validate(&g).is_err());
        assert!(FocusedAttack::new(set(&[0]), set(&[])).validate(&g).is_ok());
        assert!(FocusedAttack::new(set(&[]), set(&[])).validate(&g).is_err());
        assert!(FocusedAttack::new(set(&[0, 1]), set(&[2])).validate(&g).is_err());
        assert!(FocusedAttack::new(set(&[0]), set(&[0])).validate(&g).is_err());
        assert!(FocusedAttack::new(set(&[7]), set(&[])).validate(&g).is_err());
    }

    #[test]
    fn perceived_utilities() {
        let (g, attack) = line_attack();
        let alpha = ratio(2, 5);
        assert_eq!(perceived_utility(&g, &p("xyy"), 2, &alpha, &attack).unwrap(), int(2));
        assert_eq!(perceived_utility(&g, &p("xyy"), 0, &alpha, &attack).unwrap(), ratio(7, 5));
        // y-imposter node playing x gets no bonus.
        assert_eq!(perceived_utility(&g, &p("xxy"), 1, &alpha, &attack).unwrap(), ratio(7, 5));
    }

    #[test]
    fn broad_potentials() {
        let (g, attack) = line_attack();
        let alpha = ratio(2, 5);
        assert_eq!(broad_potential(&g, &p("xyy"), &alpha, &attack).unwrap(), ratio(22, 5));
        assert_eq!(broad_potential(&g, &p("xxx"), &alpha, &attack).unwrap(), ratio(21, 5));
        assert_eq!(broad_potential(&g, &p("yyy"), &alpha, &attack).unwrap(), int(4));
    }

    #[test]
    fn focused_potentials() {
        let star = make_star(4).unwrap();
        let alpha = ratio(9, 10);
        assert_eq!(focused_potential(&star, &p("yyyx"), &alpha).unwrap(), int(2));
        assert_eq!(focused_potential(&star, &p("xyyx"), &alpha).unwrap(), ratio(19, 10));
    }

    #[test]
    fn restricted_space_sizes() {
        let star = make_star(4).unwrap();
        let f = FocusedAttack::new(set(&[3]), set(&[1, 2]));
        assert_eq!(restricted_space(&star, &f).unwrap().size(), Some(2));
        let line = make_line(3).unwrap();
        let one = FocusedAttack::new(set(&[1]), set(&[]));
        assert_eq!(restricted_space(&line, &one).unwrap().size(), Some(4));
        let all = FocusedAttack::new(set(&[0, 1]), set(&[2]));
        assert!(restricted_space(&line, &all).is_err());
    }

    /// Four-node star: center and two leaves carry y imposters, one leaf an x imposter.
    fn two_leaf_star() -> (Graph, BroadAttack) {
        (make_star(4).unwrap(), BroadAttack::new(set(&[3]), set(&[0, 1, 2])))
    }

    #[test]
    fn cy_on_star() {
        let (g, attack) = two_leaf_star();
        let part = Partition { nodes: set(&[0, 1, 2]), convention: Y };
        let a = p("yyyx");
        assert!(check_stability_y_broad(&g, &part, &a, &ratio(3, 5), &attack).unwrap());
        assert!(!check_stability_y_broad(&g, &part, &a, &ratio(7, 10), &attack).unwrap());
        // Boundary: 2k + 1 = (1 + α)(k + 1) at α = 2/3.
        assert!(check_stability_y_broad(&g, &part, &a, &ratio(2, 3), &attack).unwrap());
    }

    #[test]
    fn cy_singleton_line_end() {
        // Node 2 alone playing y next to an x neighbor: 1 < (1 + α)·1.
        let g = make_line(3).unwrap();
        let attack = BroadAttack::new(set(&[0, 1]), set(&[2]));
        let part = Partition { nodes: set(&[2]), convention: Y };
        assert!(!check_stability_y_broad(&g, &part, &p("xxy"), &ratio(1, 10), &attack).unwrap());
        assert!(check_stability_y_broad(&g, &part, &p("xxy"), &int(0), &attack).unwrap());
    }

    #[test]
    fn cx_examples() {
        let (g, attack) = two_leaf_star();
        let leaf = Partition { nodes: set(&[3]), convention: X };
        assert!(check_stability_x_broad(&g, &leaf, &p("yyyx"), &ratio(1, 100), &attack).unwrap());
        // x node surrounded by y's without imposter support.
        let line = make_line(3).unwrap();
        let attack = BroadAttack::new(set(&[]), set(&[0, 1, 2]));
        let mid = Partition { nodes: set(&[1]), convention: X };
        assert!(!check_stability_x_broad(&line, &mid, &p("yxy"), &ratio(1, 2), &attack).unwrap());
        let all_x = BroadAttack::new(set(&[0, 1, 2]), set(&[]));
        let whole = Partition { nodes: set(&[0, 1, 2]), convention: X };
        assert!(check_stability_x_broad(&line, &whole, &p("xxx"), &ratio(1, 2), &all_x).unwrap());
    }

    #[test]
    fn focused_checks() {
        let star = make_star(4).unwrap();
        let f = FocusedAttack::new(set(&[3]), set(&[1, 2]));
        let part = Partition { nodes: set(&[0, 1, 2]), convention: Y };
        let a = p("yyyx");
        assert!(check_stability_y_focused(&star, &part, &a, &ratio(9, 10), &f).unwrap());
        assert!(!check_stability_y_focused(&star, &part, &a, &ratio(11, 10), &f).unwrap());
        let fixed_only = Partition { nodes: set(&[1]), convention: Y };
        assert!(check_stability_y_focused(&star, &fixed_only, &p("xyyx"), &ratio(11, 10), &f).unwrap());
        let xs = Partition { nodes: set(&[0, 3]), convention: X };
        assert!(check_stability_x_focused(&star, &xs, &p("xyyx"), &ratio(11, 10), &f).unwrap());
        assert!(!check_stability_x_focused(&star, &xs, &p("xyyx"), &ratio(9, 10), &f).unwrap());
    }

    #[test]
    fn stability_rejects_wrong_convention() {
        let (g, attack) = two_leaf_star();
        let part = Partition { nodes: set(&[0, 3]), convention: Y };
        assert!(check_stability_y_broad(&g, &part, &p("yyyx"), &ratio(1, 2), &attack).is_err());
        let flagged_x = Partition { nodes: set(&[0]), convention: X };
        assert!(check_stability_y_broad(&g, &flagged_x, &p("yyyx"), &ratio(1, 2), &attack).is_err());
    }

    proptest! {
        #[test]
        fn broad_potential_tracks_unilateral_gains(n in 3usize..6, seed: u64, ymask: u64, mask: u64, i in 0usize..6, num in 0i64..30, den in 1i64..10) {
            let i = i % n;
            let g = random_connected(n, 0.5, seed).unwrap();
            let attack = BroadAttack::from_y_mask(n, ymask);
            let alpha = ratio(num, den);
            let a = ActionProfile::from_x_mask(n, mask);
            let b = a.with(i, a[i].flip());
            let dphi = broad_potential(&g, &b, &alpha, &attack).unwrap() - broad_potential(&g, &a, &alpha, &attack).unwrap();
            let du = perceived_utility(&g, &b, i, &alpha, &attack).unwrap() - perceived_utility(&g, &a, i, &alpha, &attack).unwrap();
            prop_assert_eq!(dphi, du);
        }

        #[test]
        fn focused_potential_tracks_unilateral_gains(n in 3usize..6, seed: u64, mask: u64, i in 0usize..6, num in 0i64..30, den in 1i64..10) {
            let i = i % n;
            let g = random_connected(n, 0.5, seed).unwrap();
            let alpha = ratio(num, den);
            let a = ActionProfile::from_x_mask(n, mask);
            let b = a.with(i, a[i].flip());
            let dphi = focused_potential(&g, &b, &alpha).unwrap() - focused_potential(&g, &a, &alpha).unwrap();
            let du = crate::game::agent_benefit(&g, &b, i, &alpha).unwrap() - crate::game::agent_benefit(&g, &a, i, &alpha).unwrap();
            prop_assert_eq!(dphi, du);
        }
    }

    #[test]
    fn unilateral_identity_exhaustive_small() {
        // Every graph-free check above is sampled; here N = 3, 4 exhaustively on fixed graphs.
        for g in [make_line(3).unwrap(), make_star(4).unwrap(), make_line(4).unwrap()] {
            let n = g.node_count();
            let alpha = ratio(3, 7);
            for ymask in 0..(1u64 << n) {
                let attack = BroadAttack::from_y_mask(n, ymask);
                for mask in 0..(1u64 << n) {
                    let a = ActionProfile::from_x_mask(n, mask);
                    for i in 0..n {
                        let b = a.with(i, if a[i] == X { Y } else { X });
                        let dphi = broad_potential(&g, &b, &alpha, &attack).unwrap() - broad_potential(&g, &a, &alpha, &attack).unwrap();
                        let du = perceived_utility(&g, &b, i, &alpha, &attack).unwrap() - perceived_utility(&g, &a, i, &alpha, &attack).unwrap();
                        assert_eq!(dphi, du);
                    }
                }
            }
        }
    }
}
