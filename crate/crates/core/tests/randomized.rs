use coord_risk::adversary::{BroadAttack, FocusedAttack};
use coord_risk::constructions::broad_worst_star;
use coord_risk::graph::{make_line, make_star, NodeSet};
use coord_risk::randomized::lp::{solve_lp, LpOutcome, LpProblem};
use coord_risk::randomized::{
    budget_grid, compare_frontiers, expected_risk_broad, expected_risk_focused, improvement_hypothesis, min_broad_given_focused, min_focused_given_broad,
    pareto_frontier, staircase_gains, worst_case_expected_broad, worst_case_expected_focused, GainStrategy, Gains, Improvement,
};
use coord_risk::rational::{int, one, parse, zero, Rational};
use coord_risk::risk::{risk_broad, worst_case_broad, worst_case_focused};

fn q(s: &str) -> Rational {
    parse(s).unwrap()
}

fn qs(items: &[&str]) -> Vec<Rational> {
    items.iter().map(|s| q(s)).collect()
}

fn gains(items: &[&str], alpha_sys: &str) -> Gains {
    Gains::new(qs(items), q(alpha_sys)).unwrap()
}

fn strategy(items: &[&str], probs: &[&str], alpha_sys: &str) -> GainStrategy {
    GainStrategy::new(gains(items, alpha_sys), qs(probs)).unwrap()
}

#[test]
fn gains_are_validated() {
    assert!(Gains::new(qs(&["0.2"]), q("0.25")).is_err(), "below the system gain");
    assert!(Gains::new(qs(&["0.5", "0.4"]), q("0.25")).is_err(), "not increasing");
    assert!(Gains::new(qs(&["0.5", "0.5"]), q("0.25")).is_err(), "repeated");
    assert!(Gains::new(vec![], q("0.25")).is_err());
    assert!(Gains::new(qs(&["0"]), q("0")).is_err(), "gains must be positive");
    let g = gains(&["0.3", "1.6"], "0.25");
    assert!(GainStrategy::new(g.clone(), qs(&["1/2", "1/3"])).is_err(), "not a distribution");
    assert!(GainStrategy::new(g.clone(), qs(&["3/2", "-1/2"])).is_err(), "negative mass");
    assert!(GainStrategy::new(g, qs(&["1"])).is_err(), "length mismatch");
}

#[test]
fn expected_measured_risks() {
    let line = make_line(3).unwrap();
    let attack = BroadAttack::new(NodeSet::new([0]), NodeSet::new([1, 2]));
    let s = strategy(&["0.4", "0.6"], &["1/2", "1/2"], "0.25");
    assert_eq!(expected_risk_broad(&s, &line, &attack).unwrap(), q("0.3"));
    let single = GainStrategy::deterministic(q("0.4"), q("0.25")).unwrap();
    assert_eq!(expected_risk_broad(&single, &line, &attack).unwrap(), risk_broad(&line, &attack, &q("0.4"), &q("0.25")).unwrap().into_inner());
    let last = strategy(&["0.4", "0.6"], &["0", "1"], "0.25");
    assert_eq!(expected_risk_broad(&last, &line, &attack).unwrap(), zero());

    let star = make_star(4).unwrap();
    let f = FocusedAttack::new(NodeSet::new([3]), NodeSet::new([1, 2]));
    let s = strategy(&["0.9", "1.2"], &["1/4", "3/4"], "0.75");
    assert_eq!(expected_risk_focused(&s, &star, &f).unwrap(), q("3/32"));
}

#[test]
fn expected_worst_cases() {
    let s = strategy(&["0.3", "1.6"], &["1/2", "1/2"], "0.25");
    assert_eq!(worst_case_expected_broad(&s).value(), &q("0.3"));
    assert_eq!(worst_case_expected_focused(&s).value(), &q("27/104"));
    let single = GainStrategy::deterministic(q("0.3"), q("0.25")).unwrap();
    assert_eq!(worst_case_expected_broad(&single), worst_case_broad(&q("0.3"), &q("0.25")).unwrap());
    assert_eq!(worst_case_expected_focused(&single), worst_case_focused(&q("0.3"), &q("0.25")).unwrap());
    let tail = strategy(&["0.3", "1.6"], &["0", "1"], "0.25");
    assert_eq!(worst_case_expected_broad(&tail).value(), &zero());
    let head = strategy(&["0.25", "1.6"], &["1", "0"], "0.25");
    assert_eq!(worst_case_expected_focused(&head).value(), &zero());
}

#[test]
fn expected_risk_on_a_worst_star_matches_the_closed_form_term() {
    // Star k=2 is harmful exactly for gains up to 2/3.
    let (g, a) = (broad_worst_star(2).unwrap().graph, broad_worst_star(2).unwrap().attack);
    let s = strategy(&["0.4", "0.6", "0.7"], &["1/5", "1/2", "3/10"], "0.25");
    let r = |x: &str| risk_broad(&g, &a, &q(x), &q("0.25")).unwrap().into_inner();
    let want = q("1/5") * r("0.4") + q("1/2") * r("0.6");
    assert_eq!(expected_risk_broad(&s, &g, &a).unwrap(), want);
}

#[test]
fn lp_basics() {
    // min v, v ≥ 3/10, v ∈ [0, 1].
    let p = LpProblem { objective: vec![one()], a_ub: vec![vec![-one()]], b_ub: vec![q("-0.3")], a_eq: vec![], b_eq: vec![], lower: vec![zero()], upper: vec![Some(one())] };
    assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Optimal { value: q("0.3"), x: vec![q("0.3")] });

    // v ≤ 1/10 and v ≥ 3/10 cannot both hold.
    let mut bad = p.clone();
    bad.a_ub.push(vec![one()]);
    bad.b_ub.push(q("0.1"));
    assert_eq!(solve_lp(&bad).unwrap(), LpOutcome::Infeasible);

    // max 3x + 2y s.t. x + y ≤ 4, x + 3y ≤ 6, x ≤ 3: vertex (3, 1), value 11.
    let p = LpProblem {
        objective: vec![int(-3), int(-2)],
        a_ub: vec![vec![one(), one()], vec![one(), int(3)]],
        b_ub: vec![int(4), int(6)],
        a_eq: vec![],
        b_eq: vec![],
        lower: vec![zero(), zero()],
        upper: vec![Some(int(3)), None],
    };
    assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Optimal { value: int(-11), x: vec![int(3), one()] });

    // Unbounded below without an upper bound on x.
    let p = LpProblem { objective: vec![-one()], a_ub: vec![], b_ub: vec![], a_eq: vec![], b_eq: vec![], lower: vec![zero()], upper: vec![None] };
    assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Unbounded);
}

#[test]
fn lp_handles_redundant_equalities_and_shifted_bounds() {
    // x + y = 2 twice, x ≥ 1/2, y ≥ 1/4; minimize x − y.
    let row = vec![one(), one()];
    let p = LpProblem {
        objective: vec![one(), -one()],
        a_ub: vec![],
        b_ub: vec![],
        a_eq: vec![row.clone(), row],
        b_eq: vec![int(2), int(2)],
        lower: vec![q("1/2"), q("1/4")],
        upper: vec![None, None],
    };
    match solve_lp(&p).unwrap() {
        LpOutcome::Optimal { value, x } => {
            assert_eq!(value, q("-1"));
            assert!(p.is_feasible(&x));
        }
        other => panic!("{other:?}"),
    }
    let mut broken = p.clone();
    broken.lower.pop();
    assert!(solve_lp(&broken).is_err());
}

#[test]
fn broad_program_examples() {
    let g = gains(&["0.25", "1.6"], "0.25");
    let s = min_broad_given_focused(&g, &one()).unwrap().unwrap();
    assert_eq!((s.value, s.probs), (zero(), qs(&["0", "1"])));
    let g = gains(&["0.4"], "0.25");
    let rf1 = worst_case_focused(&q("0.4"), &q("0.25")).unwrap().into_inner();
    assert_eq!(min_broad_given_focused(&g, &rf1).unwrap().unwrap().value, worst_case_broad(&q("0.4"), &q("0.25")).unwrap().into_inner());
    assert!(min_broad_given_focused(&g, &(rf1 - q("1/1000"))).unwrap().is_none());
    assert!(min_broad_given_focused(&g, &q("1.5")).is_err());
}

#[test]
fn focused_program_examples() {
    let g = gains(&["0.3", "0.7", "1.2"], "0.25");
    let rb = g.broad_curve();
    let rf = g.focused_curve();
    let loosest = min_focused_given_broad(&g, &rb[0]).unwrap().unwrap();
    assert_eq!(loosest.value, rf[0]);
    assert!(min_focused_given_broad(&g, &(rb[2].clone() - q("1/1000"))).unwrap().is_none());
    // At γ_b = R_b*(α_3) = 1/5 the smaller gains may still hold half the mass:
    // p_1 ≤ 1/3 and p_1 + p_2 ≤ 1/2, so v_f = R_f*(α_3)/2.
    let tight = min_focused_given_broad(&g, &rb[2]).unwrap().unwrap();
    assert_eq!(tight.value, rf[2].clone() / int(2));
    // With α_1 = α_sys, full broad budget admits zero focused risk.
    let g = gains(&["0.25", "1.6"], "0.25");
    assert_eq!(min_focused_given_broad(&g, &one()).unwrap().unwrap().value, zero());
}

#[test]
fn frontier_is_monotone_with_the_right_endpoints() {
    let g = staircase_gains(5, &q("1/2"), &q("1/4")).unwrap();
    let front = pareto_frontier(&g, 60).unwrap();
    let rb = g.broad_curve();
    assert_eq!(front[0].expected_broad.value(), rb.last().unwrap());
    assert!(front.windows(2).all(|w| w[0].expected_broad < w[1].expected_broad && w[0].expected_focused > w[1].expected_focused));
    let last = front.last().unwrap();
    assert!(last.expected_broad.value() <= &rb[0]);
    assert_eq!(last.expected_focused.value(), &g.focused_curve()[0]);
    for p in &front {
        assert_eq!(p.distribution.iter().sum::<Rational>(), one());
    }
    let single = pareto_frontier(&gains(&["0.4"], "0.25"), 10).unwrap();
    assert_eq!(single.len(), 1);
}

#[test]
fn frontier_comparisons() {
    let s = q("1/4");
    let coarse = staircase_gains(5, &q("1/2"), &s).unwrap();
    let fine = staircase_gains(5, &q("1/100"), &s).unwrap();
    let r = compare_frontiers(&coarse, &fine, 41).unwrap();
    assert_eq!(r.hypothesis, Improvement::Lowered);
    assert!(r.dominates() && !r.identical, "{r:?}");
    let same = compare_frontiers(&fine, &fine, 21).unwrap();
    assert!(same.dominates() && same.identical);

    let superset = gains(&["0.25", "0.4", "0.6", "1.01", "1.51", "2"], "0.25");
    let subset = gains(&["0.25", "0.6", "1.51"], "0.25");
    let r = compare_frontiers(&subset, &superset, 31).unwrap();
    assert_eq!(r.hypothesis, Improvement::Superset);
    assert!(r.dominates());

    assert!(improvement_hypothesis(&superset, &subset).is_err());
    assert!(compare_frontiers(&gains(&["0.4"], "0.25"), &gains(&["0.4"], "0.3"), 5).is_err());
}

#[test]
fn staircase_layout() {
    let g = staircase_gains(5, &q("1/2"), &q("1/4")).unwrap();
    assert_eq!(g.values(), &qs(&["1/4", "7/12", "17/24", "3/2", "2"])[..]);
    assert!(staircase_gains(2, &q("1/2"), &q("1/4")).is_err());
    assert!(staircase_gains(5, &q("0.6"), &q("1/4")).is_err());
}

#[test]
fn budget_grids() {
    assert_eq!(budget_grid(&zero(), &one(), 5), qs(&["0", "1/4", "1/2", "3/4", "1"]));
    assert_eq!(budget_grid(&one(), &one(), 5), vec![one()]);
}
