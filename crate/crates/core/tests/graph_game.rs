use coord_risk::adversary::{broad_potential, focused_potential, perceived_utility, restricted_space, BroadAttack, FocusedAttack};
use coord_risk::game::{agent_benefit, edge_welfare, efficiency, pairwise_payoff, welfare, Action, ActionProfile};
use coord_risk::graph::{edges_between, make_complete, make_line, make_ring, make_star, partitions_of, random_connected, Graph, NodeSet};
use coord_risk::rational::{int, parse, zero, Rational};
use coord_risk::ActionSpace;

fn q(s: &str) -> Rational {
    parse(s).unwrap()
}

fn p(s: &str) -> ActionProfile {
    s.parse().unwrap()
}

fn fig_1a() -> (Graph, BroadAttack) {
    (make_line(3).unwrap(), BroadAttack::new(NodeSet::new([0]), NodeSet::new([1, 2])))
}

fn fig_1b() -> (Graph, FocusedAttack) {
    (make_star(4).unwrap(), FocusedAttack::new(NodeSet::new([3]), NodeSet::new([1, 2])))
}

#[test]
fn edges_between_examples() {
    let star = make_star(3).unwrap();
    assert_eq!(edges_between(&star, &NodeSet::new([0]), &NodeSet::new([1, 2])).unwrap().len(), 2);
    assert!(edges_between(&star, &NodeSet::new([1]), &NodeSet::new([2])).unwrap().is_empty());
    let line = make_line(3).unwrap();
    assert_eq!(edges_between(&line, &line.all_nodes(), &line.all_nodes()).unwrap().len(), 2);
}

#[test]
fn generators() {
    assert_eq!(make_star(3).unwrap().edges(), &[(0, 1), (0, 2)]);
    assert_eq!(make_star(4).unwrap().degree(0), 3);
    assert!(make_star(2).is_err());
    assert_eq!(make_line(3).unwrap().edges(), &[(0, 1), (1, 2)]);
    let ring = make_ring(4).unwrap();
    assert_eq!(ring.edge_count(), 4);
    assert!((0..4).all(|i| ring.degree(i) == 2));
    assert_eq!(make_complete(5).unwrap().edge_count(), 10);
    assert_eq!(random_connected(6, 0.3, 7).unwrap(), random_connected(6, 0.3, 7).unwrap());
}

#[test]
fn rejects_disconnected_and_bad_edges() {
    assert!(Graph::new(4, [(0, 1), (2, 3)]).is_err());
    assert!(Graph::new(3, [(0, 3), (1, 2)]).is_err());
    assert!(Graph::new(3, [(0, 0), (1, 2)]).is_err());
}

#[test]
fn partitions() {
    let parts = partitions_of(&make_line(3).unwrap(), &p("xyy")).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!((parts[0].nodes.as_slice(), parts[0].convention), (&[0][..], Action::X));
    assert_eq!((parts[1].nodes.as_slice(), parts[1].convention), (&[1, 2][..], Action::Y));

    let g = random_connected(7, 0.4, 1).unwrap();
    let all_x = partitions_of(&g, &ActionProfile::uniform(7, Action::X)).unwrap();
    assert_eq!(all_x.len(), 1);
    assert_eq!(all_x[0].nodes, g.all_nodes());

    assert_eq!(partitions_of(&make_ring(4).unwrap(), &p("xyxy")).unwrap().len(), 4);
}

#[test]
fn payoffs_and_benefits() {
    assert_eq!(pairwise_payoff(Action::X, Action::X, &q("0.25")), q("1.25"));
    assert_eq!(pairwise_payoff(Action::Y, Action::Y, &q("7")), int(1));
    assert_eq!(pairwise_payoff(Action::X, Action::Y, &q("7")), zero());
    assert_eq!(pairwise_payoff(Action::Y, Action::X, &q("7")), zero());

    let line = make_line(3).unwrap();
    assert_eq!(agent_benefit(&line, &p("xyy"), 1, &q("0.25")).unwrap(), int(1));
    assert_eq!(agent_benefit(&line, &p("xyy"), 0, &q("0.25")).unwrap(), zero());
    assert_eq!(agent_benefit(&make_star(4).unwrap(), &p("xxxx"), 0, &q("0.25")).unwrap(), q("3.75"));
}

#[test]
fn welfare_examples() {
    let line = make_line(3).unwrap();
    let a = q("0.25");
    assert_eq!(welfare(&line, &p("xxx"), &a).unwrap(), int(4) * q("1.25"));
    assert_eq!(welfare(&line, &p("xyy"), &q("3")).unwrap(), int(2));
    assert_eq!(welfare(&make_star(4).unwrap(), &p("yyyx"), &a).unwrap(), int(4));

    assert_eq!(edge_welfare(&line, line.edges(), &p("xyy"), &a).unwrap(), int(1));
    assert_eq!(edge_welfare(&line, line.edges(), &p("xxx"), &a).unwrap(), int(2) * q("1.25"));
    assert_eq!(edge_welfare(&line, &[], &p("xxx"), &a).unwrap(), zero());
}

#[test]
fn efficiency_examples() {
    let line = make_line(3).unwrap();
    let free = ActionSpace::unrestricted(3);
    assert_eq!(efficiency(&line, &p("xxx"), &free, &q("0.25")).unwrap(), int(1));
    assert_eq!(efficiency(&line, &p("xyy"), &free, &q("0.25")).unwrap(), q("2/5"));

    let (star, attack) = fig_1b();
    let space = restricted_space(&star, &attack).unwrap();
    assert_eq!(efficiency(&star, &p("xyyx"), &space, &q("0.75")).unwrap(), q("0.875"));
    assert_eq!(efficiency(&star, &p("yyyx"), &space, &q("0.75")).unwrap(), int(1));
    // Profiles outside the space are rejected.
    assert!(efficiency(&star, &p("xxxx"), &space, &q("0.75")).is_err());
}

#[test]
fn perceived_utility_examples() {
    let (g, attack) = fig_1a();
    let a = p("xyy");
    assert_eq!(perceived_utility(&g, &a, 2, &q("0.4"), &attack).unwrap(), int(2));
    assert_eq!(perceived_utility(&g, &a, 0, &q("0.4"), &attack).unwrap(), q("1.4"));
    // A y-imposter node playing x gets no bonus.
    assert_eq!(perceived_utility(&g, &p("xxx"), 2, &q("0.4"), &attack).unwrap(), q("1.4"));
}

#[test]
fn potentials() {
    let (g, attack) = fig_1a();
    assert_eq!(broad_potential(&g, &p("xyy"), &q("0.4"), &attack).unwrap(), q("4.4"));
    assert_eq!(broad_potential(&g, &p("xxx"), &q("0.4"), &attack).unwrap(), q("4.2"));
    assert_eq!(broad_potential(&g, &p("yyy"), &q("0.4"), &attack).unwrap(), int(4));

    let (star, _) = fig_1b();
    assert_eq!(focused_potential(&star, &p("yyyx"), &q("0.9")).unwrap(), int(2));
    assert_eq!(focused_potential(&star, &p("xyyx"), &q("0.9")).unwrap(), q("1.9"));
    assert_eq!(focused_potential(&star, &p("xyyy"), &q("0.9")).unwrap(), zero());
}

#[test]
fn restricted_spaces() {
    let (star, attack) = fig_1b();
    assert_eq!(restricted_space(&star, &attack).unwrap().size(), Some(2));
    let line = make_line(3).unwrap();
    let one_fixed = FocusedAttack::new(NodeSet::new([1]), NodeSet::empty());
    assert_eq!(restricted_space(&line, &one_fixed).unwrap().size(), Some(4));
    let everything = FocusedAttack::new(NodeSet::new([0, 1]), NodeSet::new([2]));
    assert!(restricted_space(&line, &everything).is_err());
    let overlap = FocusedAttack::new(NodeSet::new([0]), NodeSet::new([0]));
    assert!(restricted_space(&line, &overlap).is_err());
}

#[test]
fn broad_attack_must_cover_every_node_once() {
    let g = make_line(3).unwrap();
    assert!(BroadAttack::new(NodeSet::new([0]), NodeSet::new([1])).validate(&g).is_err());
    assert!(BroadAttack::new(NodeSet::new([0, 1]), NodeSet::new([1, 2])).validate(&g).is_err());
    assert!(BroadAttack::from_y_mask(3, 0b110).validate(&g).is_ok());
}
