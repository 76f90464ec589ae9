//! Executable property suites: exhaustive and randomized checks of the
//! closed forms against brute-force oracles.
//!
//! Each suite returns a [`CheckReport`] rather than panicking, so the same
//! code backs the test harness and the `verify` command.

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adversary::{check_stability_y_broad, Attack, BroadAttack, FocusedAttack};
use crate::constructions::{ReductionOutcome, broad_worst_star, focused_worst_star, ratio_for_gain, star_reduction};
use crate::error::Result;
use crate::game::{Action, ActionProfile};
use crate::graph::{make_line, make_star, random_connected, Graph, NodeSet, Partition};
use crate::parallel::try_map;
use crate::randomized::{
    compare_frontiers, expected_risk_broad, expected_risk_focused, min_broad_given_focused, min_focused_given_broad, staircase_gains,
    worst_case_expected_broad, worst_case_expected_focused, Gains, GainStrategy, LpSolution,
};
use crate::rational::{int, one, ratio, to_decimal, to_fraction, zero, Rational};
use crate::risk::{interval_index, mediant_sum, risk, tradeoff_broad_to_focused, worst_case_broad, worst_case_focused, IntervalIndex};
use crate::sss::{exact_sss, exact_stationary, gibbs_distribution, simulate_lll, ChainSpec};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(id: u8, name: &'static str, failures: Vec<String>, summary: String) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            summary
        } else {
            let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
            format!("{summary}; {} failure(s), first: {}", failures.len(), shown.join(" | "))
        };
        CheckReport { id, name, passed, detail }
    }

    fn errored(id: u8, name: &'static str, e: crate::error::Error) -> Self {
        CheckReport { id, name, passed: false, detail: format!("error: {e}") }
    }
}

/// Suite ids with their names.
pub const SUITES: [(u8, &str); 11] = [
    (1, "line instance under broad attack"),
    (2, "star instance under focused attack"),
    (3, "broad worst case: dominance and attainment"),
    (4, "focused worst case: dominance and attainment"),
    (5, "broad safeguard threshold and unit plateau"),
    (6, "worst-case expected risks of randomized gains"),
    (7, "tradeoff programs against brute force"),
    (8, "staircase frontiers"),
    (9, "dynamics oracles agree"),
    (10, "star reduction soundness"),
    (11, "mediant and plane inequalities"),
];

/// Runs suite `id` (1 to 11).
pub fn run(id: u8) -> CheckReport {
    let name = SUITES.iter().find(|s| s.0 == id).map(|s| s.1).unwrap_or("unknown suite");
    let res = match id {
        1 => line_instance(),
        2 => star_instance(),
        3 => broad_worst_case(),
        4 => focused_worst_case(),
        5 => threshold_and_plateau(),
        6 => expected_closed_forms(),
        7 => lp_brute_force(),
        8 => staircase_frontiers(),
        9 => dynamics_oracles(),
        10 => reduction_soundness(),
        11 => fact_inequalities(),
        _ => return CheckReport { id, name, passed: false, detail: "no such suite".into() },
    };
    match res {
        Ok((failures, summary)) => CheckReport::new(id, name, failures, summary),
        Err(e) => CheckReport::errored(id, name, e),
    }
}

pub fn run_all() -> Vec<CheckReport> {
    SUITES.iter().map(|&(id, _)| run(id)).collect()
}

type Outcome = Result<(Vec<String>, String)>;

fn fr(q: &Rational) -> String {
    to_fraction(q)
}

/// All connected labeled graphs on `n` nodes, by edge subset in increasing bitmask order.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .filter_map(|mask| Graph::new(n, pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e)).ok())
        .collect()
}

/// Every broad attack on `n` nodes, indexed by the y-imposter mask.
pub fn all_broad_attacks(n: usize) -> Vec<BroadAttack> {
    (0u64..1 << n).map(|m| BroadAttack::from_y_mask(n, m)).collect()
}

/// Every focused attack on `n` nodes: each node free, fixed to `x`, or fixed to `y`,
/// with at least one fixed and one free node.
pub fn all_focused_attacks(n: usize) -> Vec<FocusedAttack> {
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut fx = Vec::new();
        let mut fy = Vec::new();
        let mut c = code;
        for i in 0..n {
            match c % 3 {
                1 => fx.push(i),
                2 => fy.push(i),
                _ => {}
            }
            c /= 3;
        }
        let fixed = fx.len() + fy.len();
        if fixed > 0 && fixed < n {
            out.push(FocusedAttack::new(NodeSet::new(fx), NodeSet::new(fy)));
        }
    }
    out
}

/// Largest measured risk over every connected graph on `n` nodes and every attack from `attacks`.
fn max_risk(n: usize, attacks: &[Attack], alpha: &Rational, alpha_sys: &Rational) -> Result<Rational> {
    let graphs = connected_graphs(n);
    let per_graph = try_map(&graphs, |g| {
        let mut best = zero();
        for a in attacks {
            best = best.max(risk(g, a, alpha, alpha_sys)?.into_inner());
        }
        Ok(best)
    })?;
    Ok(per_graph.into_iter().fold(zero(), Rational::max))
}

fn broad_attacks(n: usize) -> Vec<Attack> {
    all_broad_attacks(n).into_iter().map(Attack::Broad).collect()
}

fn focused_attacks(n: usize) -> Vec<Attack> {
    all_focused_attacks(n).into_iter().map(Attack::Focused).collect()
}

fn profile(s: &str) -> ActionProfile {
    s.parse().expect("literal profile")
}

fn line_instance() -> Outcome {
    let g = make_line(3)?;
    let attack = Attack::Broad(BroadAttack::new(NodeSet::new([0]), NodeSet::new([1, 2])));
    let alpha_sys = ratio(1, 4);
    let mut failures = Vec::new();
    let low: Vec<Rational> = (1..=20).map(|i| ratio(i, 40)).collect();
    let high: Vec<Rational> = (1..=20).map(|i| ratio(1, 2) + ratio(3 * i, 40)).collect();
    for (alpha, want, want_risk) in low.iter().map(|a| (a, "xyy", ratio(3, 5))).chain(high.iter().map(|a| (a, "xxx", zero()))) {
        let sss = exact_sss(&g, alpha, &attack, &alpha_sys)?;
        if sss.welfare_min != profile(want) {
            failures.push(format!("alpha {}: welfare-min {} not {want}", fr(alpha), sss.welfare_min));
        }
        if alpha > &ratio(1, 2) && sss.stable_set != vec![profile("xxx")] {
            failures.push(format!("alpha {}: stable set has {} members", fr(alpha), sss.stable_set.len()));
        }
        let r = risk(&g, &attack, alpha, &alpha_sys)?;
        if r.value() != &want_risk {
            failures.push(format!("alpha {}: risk {r} not {}", fr(alpha), fr(&want_risk)));
        }
    }
    let tie = exact_sss(&g, &ratio(1, 2), &attack, &alpha_sys)?;
    if tie.stable_set != vec![profile("xxx"), profile("xyy")] || tie.welfare_min != profile("xyy") {
        failures.push(format!("tie at 1/2: stable set {:?}", tie.stable_set));
    }
    Ok((failures, "40 gains, risk 3/5 up to 1/2 and 0 above".into()))
}

fn star_instance() -> Outcome {
    let g = make_star(4)?;
    let attack = Attack::Focused(FocusedAttack::new(NodeSet::new([3]), NodeSet::new([1, 2])));
    let alpha_sys = ratio(3, 4);
    let mut failures = Vec::new();
    let mut gains: Vec<Rational> = (1..20).map(|i| ratio(i, 20)).collect();
    gains.extend((0..=20).map(|i| one() + ratio(i, 10)));
    for alpha in &gains {
        let want = if alpha < &one() { zero() } else { ratio(1, 8) };
        let r = risk(&g, &attack, alpha, &alpha_sys)?;
        if r.value() != &want {
            failures.push(format!("alpha {}: risk {r} not {}", fr(alpha), fr(&want)));
        }
    }
    let tie = exact_sss(&g, &one(), &attack, &alpha_sys)?;
    if tie.welfare_min[0] != Action::X || tie.stable_set.len() != 2 {
        failures.push(format!("tie at 1: welfare-min {}", tie.welfare_min));
    }
    Ok((failures, format!("{} gains, risk 0 below 1 and 1/8 from 1 on", gains.len())))
}

fn broad_worst_case() -> Outcome {
    let alpha_sys = ratio(1, 4);
    let gains = [ratio(1, 5), ratio(1, 2), ratio(11, 20), ratio(9, 10), ratio(6, 5), ratio(8, 5)];
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for n in 3..=5 {
        let attacks = broad_attacks(n);
        for alpha in &gains {
            let worst = max_risk(n, &attacks, alpha, &alpha_sys)?;
            let bound = worst_case_broad(alpha, &alpha_sys)?.into_inner();
            checked += 1;
            if worst > bound {
                failures.push(format!("N={n} alpha {}: measured {} above bound {}", fr(alpha), fr(&worst), fr(&bound)));
            }
        }
    }
    let attain: [(usize, [Rational; 2]); 4] = [
        (1, [ratio(1, 5), ratio(1, 2)]),
        (2, [ratio(11, 20), ratio(3, 5)]),
        (3, [ratio(7, 10), ratio(3, 4)]),
        (4, [ratio(39, 50), ratio(4, 5)]),
    ];
    for (k, alphas) in attain {
        let (g, attack) = broad_worst_star(k)?.into_attack();
        for alpha in alphas {
            let got = risk(&g, &attack, &alpha, &alpha_sys)?;
            let want = worst_case_broad(&alpha, &alpha_sys)?;
            if interval_index(&alpha)? != IntervalIndex::Step(k as u64) || got != want {
                failures.push(format!("star k={k} alpha {}: risk {got}, bound {want}", fr(&alpha)));
            }
        }
    }
    Ok((failures, format!("{checked} (N, gain) maxima within bound; stars attain on I_1..I_4")))
}

fn focused_worst_case() -> Outcome {
    let alpha_sys = ratio(1, 4);
    let gains = [ratio(1, 10), ratio(1, 4), ratio(1, 2), one(), int(2)];
    let mut failures = Vec::new();
    for n in 3..=5 {
        let attacks = focused_attacks(n);
        for alpha in &gains {
            let worst = max_risk(n, &attacks, alpha, &alpha_sys)?;
            let bound = worst_case_focused(alpha, &alpha_sys)?.into_inner();
            if worst > bound {
                failures.push(format!("N={n} alpha {}: measured {} above bound {}", fr(alpha), fr(&worst), fr(&bound)));
            }
        }
    }
    for alpha in &gains {
        let (nx, ny) = ratio_for_gain(alpha)?;
        let (g, attack) = focused_worst_star(nx, ny)?.into_attack();
        let got = risk(&g, &attack, alpha, &alpha_sys)?;
        let want = worst_case_focused(alpha, &alpha_sys)?;
        if got != want {
            failures.push(format!("star ({nx},{ny}) alpha {}: risk {got}, bound {want}", fr(alpha)));
        }
    }
    Ok((failures, "exhaustive N<=5 within bound; ratio stars attain at all 5 gains".into()))
}

fn threshold_and_plateau() -> Outcome {
    let alpha_sys = ratio(1, 4);
    let plateau = one() / (one() + &alpha_sys);
    let step = ratio(1, 100);
    let mut failures = Vec::new();
    for n in 3..=4usize {
        let attacks = broad_attacks(n);
        let t = ratio(n as i64, n as i64 - 1);
        let min_eff = |alpha: &Rational| -> Result<Rational> { Ok(one() - max_risk(n, &attacks, alpha, &alpha_sys)?) };
        for alpha in [&t - &step, t.clone(), &t + &step] {
            let eff = min_eff(&alpha)?;
            if (eff == one()) != (alpha > t) {
                failures.push(format!("N={n} alpha {}: min efficiency {}", fr(&alpha), fr(&eff)));
            }
        }
        for alpha in [one(), one() + &step, &t - &step, t.clone()] {
            let eff = min_eff(&alpha)?;
            if eff != plateau {
                failures.push(format!("N={n} alpha {}: plateau efficiency {} not {}", fr(&alpha), fr(&eff), fr(&plateau)));
            }
        }
    }
    Ok((failures, "N in {3,4}: harmless exactly above N/(N-1), efficiency 4/5 on [1, N/(N-1)]".into()))
}

/// Random distribution on `m` points with small integer weights.
fn random_probs(rng: &mut ChaCha8Rng, m: usize) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..m).map(|_| rng.random_range(0..=12)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| ratio(x, total)).collect();
        }
    }
}

fn expected_closed_forms() -> Outcome {
    let alpha_sys = ratio(1, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let broad = Gains::new(vec![ratio(2, 5), ratio(3, 5), ratio(7, 10), ratio(39, 50)], alpha_sys.clone())?;
    let stars: Vec<(Graph, BroadAttack)> = (1..=4).map(|k| broad_worst_star(k).map(|i| (i.graph, i.attack))).collect::<Result<_>>()?;
    let focused = Gains::new(vec![alpha_sys.clone(), ratio(1, 2), one(), int(2)], alpha_sys.clone())?;
    let fstars: Vec<(Graph, FocusedAttack)> = focused
        .values()
        .iter()
        .map(|a| {
            let (nx, ny) = ratio_for_gain(a)?;
            focused_worst_star(nx, ny).map(|i| (i.graph, i.attack))
        })
        .collect::<Result<_>>()?;
    for trial in 0..25 {
        let s = GainStrategy::new(broad.clone(), random_probs(&mut rng, 4))?;
        let mut best = zero();
        for (g, a) in &stars {
            best = best.max(expected_risk_broad(&s, g, a)?);
        }
        let closed = worst_case_expected_broad(&s).into_inner();
        if best != closed {
            failures.push(format!("broad trial {trial}: stars {} vs closed form {}", fr(&best), fr(&closed)));
        }
        let s = GainStrategy::new(focused.clone(), random_probs(&mut rng, 4))?;
        let mut best = zero();
        for (g, a) in &fstars {
            best = best.max(expected_risk_focused(&s, g, a)?);
        }
        let closed = worst_case_expected_focused(&s).into_inner();
        if best != closed {
            failures.push(format!("focused trial {trial}: stars {} vs closed form {}", fr(&best), fr(&closed)));
        }
    }
    Ok((failures, "25 random distributions per model, star maxima equal the closed forms".into()))
}

/// Prefix-sum form of the two worst-case expectations at `p`.
fn expectations(rb: &[Rational], rf: &[Rational], p: &[Rational]) -> (Rational, Rational) {
    let m = p.len();
    let mut eb = zero();
    let mut acc = zero();
    for i in 0..m {
        acc += &p[i];
        eb = eb.max(&acc * &rb[i]);
    }
    let mut ef = zero();
    let mut acc = zero();
    for i in (0..m).rev() {
        acc += &p[i];
        ef = ef.max(&acc * &rf[i]);
    }
    (eb, ef)
}

/// Points of the simplex with coordinates in multiples of `1/res`.
fn simplex_grid(m: usize, res: i64) -> Vec<Vec<Rational>> {
    fn rec(m: usize, left: i64, res: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<Rational>>) {
        if m == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| ratio(c, res)).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(m - 1, left - c, res, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, res, res, &mut Vec::new(), &mut out);
    out
}

fn lp_brute_force() -> Outcome {
    let alpha_sys = ratio(1, 4);
    let res = 400;
    let tol = ratio(1, res);
    let sets: Vec<Vec<Rational>> = vec![
        vec![alpha_sys.clone()],
        vec![ratio(3, 5)],
        vec![alpha_sys.clone(), ratio(8, 5)],
        vec![ratio(2, 5), ratio(6, 5)],
        vec![alpha_sys.clone(), ratio(3, 5), ratio(8, 5)],
        vec![ratio(3, 10), ratio(7, 10), ratio(6, 5)],
    ];
    let budgets: Vec<Rational> = (0..=10).map(|i| ratio(i, 10)).collect();
    let mut failures = Vec::new();
    let mut solves = 0;
    for set in sets {
        let gains = Gains::new(set, alpha_sys.clone())?;
        let (rb, rf) = (gains.broad_curve(), gains.focused_curve());
        let grid: Vec<(Rational, Rational)> = simplex_grid(gains.len(), res).iter().map(|p| expectations(&rb, &rf, p)).collect();
        let label = gains.values().iter().map(fr).collect::<Vec<_>>().join(",");
        for gamma in &budgets {
            for focused_objective in [false, true] {
                solves += 1;
                let sol = if focused_objective { min_focused_given_broad(&gains, gamma)? } else { min_broad_given_focused(&gains, gamma)? };
                // (objective, budget) pair at every grid point.
                let pick = |pair: &(Rational, Rational)| if focused_objective { (pair.1.clone(), pair.0.clone()) } else { pair.clone() };
                let strict = grid.iter().map(pick).filter(|(_, c)| c <= gamma).map(|(o, _)| o).min();
                let relaxed = grid.iter().map(pick).filter(|(_, c)| c <= &(gamma + &tol)).map(|(o, _)| o).min();
                let which = if focused_objective { "v_f" } else { "v_b" };
                match (&sol, strict, relaxed) {
                    (None, None, _) => {}
                    (Some(LpSolution { value, probs }), strict, relaxed) => {
                        let (eb, ef) = expectations(&rb, &rf, probs);
                        let (obj, cons) = if focused_objective { (ef, eb) } else { (eb, ef) };
                        if &obj != value || &cons > gamma || probs.iter().any(|p| p.is_negative()) || probs.iter().sum::<Rational>() != one() {
                            failures.push(format!("{which} [{label}] gamma {}: optimizer inconsistent", fr(gamma)));
                        }
                        if strict.as_ref().is_some_and(|s| s < value) {
                            failures.push(format!("{which} [{label}] gamma {}: grid beats LP", fr(gamma)));
                        }
                        if relaxed.is_none_or(|r| r > value + &tol) {
                            failures.push(format!("{which} [{label}] gamma {}: LP {} not within grid resolution", fr(gamma), fr(value)));
                        }
                    }
                    (None, Some(_), _) => failures.push(format!("{which} [{label}] gamma {}: LP infeasible but grid feasible", fr(gamma))),
                }
            }
        }
        // Infeasibility exactly below the thresholds.
        let f1 = &rf[0];
        let bm = rb.last().expect("non-empty");
        if min_broad_given_focused(&gains, f1)?.is_none() || min_focused_given_broad(&gains, bm)?.is_none() {
            failures.push(format!("[{label}] infeasible at the threshold itself"));
        }
        if f1.is_positive() && min_broad_given_focused(&gains, &(f1 - ratio(1, 1000)))?.is_some() {
            failures.push(format!("[{label}] v_b feasible below R_f*(alpha_1)"));
        }
        if bm.is_positive() && min_focused_given_broad(&gains, &(bm - ratio(1, 1000)))?.is_some() {
            failures.push(format!("[{label}] v_f feasible below R_b*(alpha_M)"));
        }
    }
    Ok((failures, format!("{solves} programs match the 1/{res} simplex grid; infeasibility thresholds exact")))
}

fn staircase_frontiers() -> Outcome {
    let alpha_sys = ratio(1, 4);
    let coarse = staircase_gains(5, &ratio(1, 2), &alpha_sys)?;
    let fine = staircase_gains(5, &ratio(1, 100), &alpha_sys)?;
    let grid = 101;
    let mut failures = Vec::new();
    let report = compare_frontiers(&coarse, &fine, grid)?;
    for v in &report.violations {
        failures.push(format!("fine worse than coarse: {} at {}", v.program, fr(&v.budget)));
    }
    // Deterministic comparison on the broad-budget grid of each frontier.
    let mut worst_gap: Option<(Rational, Rational, &'static str)> = None;
    for (label, gains) in [("coarse", &coarse), ("fine", &fine)] {
        let rb = gains.broad_curve();
        let budgets = crate::randomized::budget_grid(rb.last().expect("non-empty"), &rb[0], grid);
        for gamma in budgets {
            let Some(sol) = min_focused_given_broad(gains, &gamma)? else { continue };
            let det = tradeoff_broad_to_focused(&gamma, &alpha_sys)?;
            if &sol.value > det.value.value() {
                let gap = &sol.value - det.value.value();
                if worst_gap.as_ref().is_none_or(|w| gap > w.1) {
                    worst_gap = Some((gamma.clone(), gap, label));
                }
                failures.push(format!("{label} gamma_b {}: v_f {} above deterministic bound {}", to_decimal(&gamma, 4), to_decimal(&sol.value, 6), det.value));
            }
        }
    }
    let summary = match &worst_gap {
        None => format!("fine dominates coarse on {} points; both under the deterministic curve", report.points_checked),
        Some((g, gap, label)) => format!(
            "fine dominates coarse: {}; largest excess over the deterministic curve {} ({label}, gamma_b {})",
            report.dominates(),
            to_decimal(gap, 6),
            to_decimal(g, 4)
        ),
    };
    Ok((failures, summary))
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, focused: bool) -> Result<(Graph, Attack)> {
    let g = random_connected(n, 0.4, rng.random())?;
    let attack = if focused {
        loop {
            let assign: Vec<u8> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let fx: Vec<usize> = (0..n).filter(|&i| assign[i] == 1).collect();
            let fy: Vec<usize> = (0..n).filter(|&i| assign[i] == 2).collect();
            let a = FocusedAttack::new(NodeSet::new(fx), NodeSet::new(fy));
            if a.validate(&g).is_ok() {
                break Attack::Focused(a);
            }
        }
    } else {
        Attack::Broad(BroadAttack::from_y_mask(n, rng.random()))
    };
    Ok((g, attack))
}

fn dynamics_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    let betas = [1.0, 5.0, 20.0];
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let n = 3 + trial % 6;
        let (g, attack) = random_instance(&mut rng, n, trial % 2 == 1)?;
        let alpha = ratio(rng.random_range(1..=40), 20);
        let beta = betas[trial % 3];
        let gibbs = gibbs_distribution(&g, &alpha, &attack, beta)?;
        let chain = exact_stationary(&g, &alpha, &attack, beta)?;
        let diff = gibbs.max_abs_diff(&chain);
        worst = worst.max(diff);
        if diff > 1e-10 {
            failures.push(format!("trial {trial} (N={n}, {}, beta {beta}): max diff {diff:e}", attack.kind()));
        }
    }
    let mut worst_tv = 0.0f64;
    for trial in 0..4 {
        let n = 3 + trial % 2;
        let (g, attack) = random_instance(&mut rng, n, trial >= 2)?;
        let alpha = ratio(rng.random_range(1..=40), 20);
        let beta = if trial % 2 == 0 { 1.0 } else { 5.0 };
        let exact = exact_stationary(&g, &alpha, &attack, beta)?;
        let sim = simulate_lll(&g, &alpha, &attack, &ChainSpec { beta, steps: 1_000_000, seed: 100 + trial as u64 })?;
        let tv = exact.total_variation(&sim);
        worst_tv = worst_tv.max(tv);
        if tv > 0.02 {
            failures.push(format!("simulation {trial} (N={n}, beta {beta}): TV {tv:.4}"));
        }
    }
    Ok((failures, format!("Gibbs vs chain max diff {worst:.1e} over 20 instances; simulation TV at most {worst_tv:.4}")))
}

fn reduction_soundness() -> Outcome {
    let alpha_sys = ratio(1, 4);
    let gains = [ratio(3, 10), ratio(9, 20), ratio(7, 10)];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cases: Vec<(Graph, BroadAttack, Rational)> = (0..200)
        .map(|k| {
            let n = rng.random_range(3..=6);
            let g = random_connected(n, rng.random_range(0.1..0.8), rng.random())?;
            // Dense y targets, so most worst stable states contain a y-partition.
            let y_mask = (0..n).filter(|_| rng.random_bool(0.8)).fold(0u64, |m, i| m | 1 << i);
            Ok((g, BroadAttack::from_y_mask(n, y_mask), gains[k % 3].clone()))
        })
        .collect::<Result<_>>()?;
    let results = try_map(&cases, |(g, attack, alpha)| {
        let out = star_reduction(g, attack, alpha, &alpha_sys)?;
        let before = one() - risk(g, &Attack::Broad(attack.clone()), alpha, &alpha_sys)?.into_inner();
        let (g2, a2) = (out.instance.graph.clone(), Attack::Broad(out.instance.attack.clone()));
        let after = one() - risk(&g2, &a2, alpha, &alpha_sys)?.into_inner();
        let mut issues = Vec::new();
        if !out.instance.is_imposter_star() {
            issues.push("output is not an imposter star".to_string());
        }
        if after > before {
            issues.push(format!("efficiency rose from {} to {}", fr(&before), fr(&after)));
        }
        if !out.y_partition.is_empty() {
            let ys = ActionProfile::from_x_mask(g2.node_count(), !out.y_partition.as_slice().iter().fold(0u64, |m, &i| m | 1 << i));
            let part = Partition { nodes: out.y_partition.clone(), convention: Action::Y };
            if !check_stability_y_broad(&g2, &part, &ys, alpha, &out.instance.attack)? {
                issues.push("enlarged y-partition is unstable".to_string());
            }
        }
        let issues: Vec<String> = issues.into_iter().map(|i| format!("N={} alpha {}: {i}", g.node_count(), fr(alpha))).collect();
        Ok((out.outcome, issues))
    })?;
    let count = |o: ReductionOutcome| results.iter().filter(|r| r.0 == o).count();
    let summary = format!(
        "200 random instances reduce to imposter stars without raising efficiency ({} reduced, {} already stars, {} without y-partition)",
        count(ReductionOutcome::Reduced),
        count(ReductionOutcome::AlreadyStar),
        count(ReductionOutcome::NoYPartition)
    );
    let failures: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();
    Ok((failures, summary))
}

fn random_positive(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.random_range(1..=30), rng.random_range(1..=12))
}

fn fact_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = Vec::new();
    for trial in 0..10_000 {
        let m = rng.random_range(1..=6);
        // Mediant: n_i ≥ 0, d_i > 0.
        let pairs: Vec<(Rational, Rational)> = (0..m).map(|_| (ratio(rng.random_range(0..=30), rng.random_range(1..=12)), random_positive(&mut rng))).collect();
        let med = mediant_sum(&pairs)?;
        let min = pairs.iter().map(|(n, d)| n / d).min().expect("non-empty");
        if med < min {
            failures.push(format!("mediant trial {trial}"));
        }

        // Planes: ν_i < n_i/d_i ≤ 1.
        let d: Vec<Rational> = (0..m).map(|_| random_positive(&mut rng)).collect();
        let n: Vec<Rational> = d.iter().map(|di| di * ratio(rng.random_range(1..=20), 20)).collect();
        let nu: Vec<Rational> = n.iter().zip(&d).map(|(ni, di)| ni / di - ratio(rng.random_range(1..=40), 20)).collect();
        let p = random_probs(&mut rng, m);
        let total: Rational = d.iter().sum();
        let sum = |v: &[Rational]| v.iter().sum::<Rational>();
        let s: Vec<Rational> = (0..m).map(|i| (sum(&d[..i]) + sum(&n[i..])) / &total).collect();
        let s_rev: Vec<Rational> = (0..m).map(|i| (sum(&n[..=i]) + sum(&d[i + 1..])) / &total).collect();
        let s_printed: Vec<Rational> = (0..m).map(|i| (sum(&n[..=i]) + sum(&d[i..])) / &total).collect();
        let lhs = |s: &[Rational]| p.iter().zip(s).map(|(a, b)| a * b).sum::<Rational>();
        let fwd = (0..m).map(|i| sum(&p[..=i]) * (&nu[i] - one())).min().expect("non-empty");
        let bwd = (0..m).map(|i| sum(&p[i..]) * (&nu[i] - one())).min().expect("non-empty");
        if lhs(&s) < one() + fwd {
            failures.push(format!("forward planes trial {trial}"));
        }
        if lhs(&s_rev) < one() + &bwd {
            failures.push(format!("reversed planes trial {trial}"));
        }
        if lhs(&s_printed) < one() + &bwd {
            failures.push(format!("printed reversed planes trial {trial}"));
        }
    }
    Ok((failures, "10000 random inputs satisfy all three inequalities".into()))
}
