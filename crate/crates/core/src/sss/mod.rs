//! Stochastically stable states, computed exactly as potential maximizers.

use serde::Serialize;

use crate::adversary::{Attack, PotentialModel};
use crate::error::Result;
use crate::game::ActionProfile;
use crate::graph::Graph;
use crate::rational::Rational;
use crate::space::{Context, Scaled, Score};

pub mod dynamics;

pub use dynamics::{exact_stationary, gibbs_distribution, simulate_lll, ChainSpec, Distribution};

/// Potential maximizers of an attacked game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SSSResult {
    /// All maximizers in lexicographic order.
    pub stable_set: Vec<ActionProfile>,
    /// Maximizer of least welfare at the system gain; lexicographically first on ties.
    pub welfare_min: ActionProfile,
    #[serde(with = "crate::rational::fraction")]
    pub potential_value: Rational,
}

/// SSS result plus the efficiency bookkeeping risk computations need.
#[derive(Debug, Clone)]
pub(crate) struct Solved {
    pub result: SSSResult,
    /// Half-welfare of `welfare_min` and the best profile of the space, at `alpha_sys`.
    pub min_welfare: Rational,
    pub max_welfare: Rational,
}

impl Solved {
    pub fn efficiency(&self) -> Rational {
        &self.min_welfare / &self.max_welfare
    }
}

struct Acc {
    best: Option<Score>,
    argmax: Vec<u64>,
    top_welfare: Option<Score>,
}

/// Computes the potential maximizers of the game at gain `alpha` under `attack`.
///
/// `alpha_sys` only decides which maximizer is reported as `welfare_min`.
pub fn exact_sss(g: &Graph, alpha: &Rational, attack: &Attack, alpha_sys: &Rational) -> Result<SSSResult> {
    Ok(solve(g, alpha, attack, alpha_sys)?.result)
}

pub(crate) fn solve(g: &Graph, alpha: &Rational, attack: &Attack, alpha_sys: &Rational) -> Result<Solved> {
    let space = attack.space(g)?;
    let ctx = Context::new(g, &space)?;
    let gain = Scaled::new(alpha)?;
    let sys = Scaled::new(alpha_sys)?;
    let model = PotentialModel::for_attack(attack);

    let acc = ctx.scan(
        || Acc { best: None, argmax: Vec::new(), top_welfare: None },
        |acc, x| {
            let phi = model.potential(&ctx, x);
            match acc.best.map(|b| gain.cmp(&phi, &b)) {
                None | Some(std::cmp::Ordering::Greater) => {
                    acc.best = Some(phi);
                    acc.argmax.clear();
                    acc.argmax.push(x);
                }
                Some(std::cmp::Ordering::Equal) => acc.argmax.push(x),
                Some(std::cmp::Ordering::Less) => {}
            }
            let w = ctx.welfare_score(x);
            if acc.top_welfare.is_none_or(|t| sys.cmp(&w, &t).is_gt()) {
                acc.top_welfare = Some(w);
            }
        },
        |mut l, mut r| {
            let top_welfare = match (l.top_welfare, r.top_welfare) {
                (Some(a), Some(b)) => Some(if sys.cmp(&a, &b).is_ge() { a } else { b }),
                (a, b) => a.or(b),
            };
            let (best, argmax) = match (l.best, r.best) {
                (None, _) => (r.best, r.argmax),
                (_, None) => (l.best, l.argmax),
                (Some(a), Some(b)) => match gain.cmp(&a, &b) {
                    std::cmp::Ordering::Greater => (l.best, l.argmax),
                    std::cmp::Ordering::Less => (r.best, r.argmax),
                    std::cmp::Ordering::Equal => {
                        l.argmax.append(&mut r.argmax);
                        (l.best, l.argmax)
                    }
                },
            };
            Acc { best, argmax, top_welfare }
        },
    );

    let mut argmax = acc.argmax;
    argmax.sort_unstable_by_key(|&x| ctx.lex_key(x));
    // Non-empty: every space holds at least one profile.
    let welfare_min = *argmax
        .iter()
        .min_by(|&&l, &&r| sys.cmp(&ctx.welfare_score(l), &ctx.welfare_score(r)).then(ctx.lex_key(l).cmp(&ctx.lex_key(r))))
        .expect("non-empty action space");
    let best = acc.best.expect("non-empty action space");
    let n = ctx.n;
    Ok(Solved {
        min_welfare: sys.value(&ctx.welfare_score(welfare_min)),
        max_welfare: sys.value(&acc.top_welfare.expect("non-empty action space")),
        result: SSSResult {
            stable_set: argmax.iter().map(|&x| ActionProfile::from_x_mask(n, x)).collect(),
            welfare_min: ActionProfile::from_x_mask(n, welfare_min),
            potential_value: gain.value(&best),
        },
    })
}
