use coord_risk::adversary::{Attack, BroadAttack, FocusedAttack};
use coord_risk::game::ActionProfile;
use coord_risk::graph::{make_line, make_star, random_connected, Graph, NodeSet};
use coord_risk::rational::{parse, Rational};
use coord_risk::sss::{exact_sss, exact_stationary, gibbs_distribution, simulate_lll, ChainSpec};

fn q(s: &str) -> Rational {
    parse(s).unwrap()
}

fn p(s: &str) -> ActionProfile {
    s.parse().unwrap()
}

fn fig_1a() -> (Graph, Attack) {
    (make_line(3).unwrap(), Attack::Broad(BroadAttack::new(NodeSet::new([0]), NodeSet::new([1, 2]))))
}

#[test]
fn fig_1a_stable_sets() {
    let (g, attack) = fig_1a();
    let s = exact_sss(&g, &q("0.4"), &attack, &q("0.25")).unwrap();
    assert_eq!(s.welfare_min, p("xyy"));
    assert_eq!(s.potential_value, q("4.4"));
    let s = exact_sss(&g, &q("0.6"), &attack, &q("0.25")).unwrap();
    assert_eq!(s.stable_set, vec![p("xxx")]);
    let s = exact_sss(&g, &q("0.5"), &attack, &q("0.25")).unwrap();
    assert_eq!(s.stable_set, vec![p("xxx"), p("xyy")]);
    assert_eq!(s.welfare_min, p("xyy"));
}

#[test]
fn focused_solutions_stay_in_the_restricted_space() {
    let g = make_star(4).unwrap();
    let attack = Attack::Focused(FocusedAttack::new(NodeSet::new([3]), NodeSet::new([1, 2])));
    let s = exact_sss(&g, &q("1"), &attack, &q("0.75")).unwrap();
    assert_eq!(s.stable_set, vec![p("xyyx"), p("yyyx")]);
    assert_eq!(s.welfare_min, p("xyyx"));
}

#[test]
fn large_free_space_hits_the_cap() {
    let g = make_line(30).unwrap();
    let attack = Attack::Broad(BroadAttack::new(g.all_nodes(), NodeSet::empty()));
    let err = exact_sss(&g, &q("0.5"), &attack, &q("0.25")).unwrap_err();
    assert!(err.is_cap(), "{err}");
}

#[test]
fn gibbs_concentrates_and_flattens() {
    let (g, attack) = fig_1a();
    let hot = gibbs_distribution(&g, &q("0.4"), &attack, 50.0).unwrap();
    assert!(hot.get(&p("xyy")) > 0.999);
    let flat = gibbs_distribution(&g, &q("0.4"), &attack, 0.0).unwrap();
    assert_eq!(flat.len(), 8);
    assert!(flat.iter().all(|(_, w)| (w - 0.125).abs() < 1e-15));
    // Potential tie at 1/2 gives equal mass.
    let tie = gibbs_distribution(&g, &q("0.5"), &attack, 3.0).unwrap();
    assert!((tie.get(&p("xyy")) - tie.get(&p("xxx"))).abs() < 1e-15);
    assert_eq!(tie.argmax(1e-12), vec![p("xxx"), p("xyy")]);
}

#[test]
fn stationary_matches_gibbs() {
    let (g, attack) = fig_1a();
    let exact = exact_stationary(&g, &q("0.4"), &attack, 10.0).unwrap();
    // Potentials 4.4, 4.2, 4.0 for xyy, xxx, yyy cap the mode's mass below 1/(1 + e^-2 + e^-4).
    assert_eq!(exact.mode(), Some(&p("xyy")));
    assert!(exact.get(&p("xyy")) > 0.85);
    let gibbs = gibbs_distribution(&g, &q("0.4"), &attack, 10.0).unwrap();
    assert!(exact.max_abs_diff(&gibbs) < 1e-12);
    let uniform = exact_stationary(&g, &q("0.4"), &attack, 0.0).unwrap();
    assert!(uniform.iter().all(|(_, w)| (w - 0.125).abs() < 1e-12));

    let g = random_connected(6, 0.5, 3).unwrap();
    let attack = Attack::Focused(FocusedAttack::new(NodeSet::new([0]), NodeSet::new([5])));
    let a = exact_stationary(&g, &q("0.7"), &attack, 20.0).unwrap();
    let b = gibbs_distribution(&g, &q("0.7"), &attack, 20.0).unwrap();
    assert_eq!(a.len(), 16);
    assert!(a.max_abs_diff(&b) < 1e-10);
}

#[test]
fn simulation_tracks_the_chain() {
    let (g, attack) = fig_1a();
    let chain = ChainSpec { beta: 10.0, steps: 1_000_000, seed: 7 };
    let sim = simulate_lll(&g, &q("0.4"), &attack, &chain).unwrap();
    let exact = exact_stationary(&g, &q("0.4"), &attack, 10.0).unwrap();
    assert!((sim.get(&p("xyy")) - exact.get(&p("xyy"))).abs() < 0.02);
    assert_eq!(sim.mode(), Some(&p("xyy")));
    assert_eq!(sim, simulate_lll(&g, &q("0.4"), &attack, &chain).unwrap());
}

#[test]
fn zero_beta_simulation_is_near_uniform() {
    let (g, attack) = fig_1a();
    let steps = 400_000u64;
    let sim = simulate_lll(&g, &q("0.4"), &attack, &ChainSpec { beta: 0.0, steps, seed: 1 }).unwrap();
    assert_eq!(sim.len(), 8);
    // Generous: consecutive states are correlated, so allow well beyond 3 binomial sigmas.
    let sigma = (0.125f64 * 0.875 / (0.9 * steps as f64)).sqrt();
    assert!(sim.iter().all(|(_, w)| (w - 0.125).abs() < 10.0 * sigma));
}

#[test]
fn chain_spec_validation() {
    let (g, attack) = fig_1a();
    for bad in [ChainSpec { beta: -1.0, steps: 10, seed: 0 }, ChainSpec { beta: f64::NAN, steps: 10, seed: 0 }, ChainSpec { beta: 1.0, steps: 0, seed: 0 }] {
        assert!(simulate_lll(&g, &q("0.4"), &attack, &bad).is_err());
    }
    assert!(gibbs_distribution(&g, &q("0.4"), &attack, f64::INFINITY).is_err());
}
