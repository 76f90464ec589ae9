use std::io::Write;

use coord_risk::adversary::{Attack, BroadAttack, FocusedAttack};
use coord_risk::graph::{make_line, NodeSet};
use coord_risk::io::{
    graph_to_json, load_graph, load_instance, parse_attack_json, parse_edge_list, parse_generator, parse_graph_json, parse_instance_json,
    parse_rational_list, parse_strategy_json,
};
use coord_risk::rational::{parse, Rational};

fn q(s: &str) -> Rational {
    parse(s).unwrap()
}

#[test]
fn rationals_read_exactly() {
    assert_eq!(parse_rational_list("1/4, 0.55,2 ,1e-2").unwrap(), vec![q("1/4"), q("11/20"), q("2"), q("1/100")]);
    assert!(parse_rational_list("1/0").is_err());
    assert!(parse_rational_list("abc").is_err());
}

#[test]
fn graph_json_round_trip() {
    let g = make_line(4).unwrap();
    let text = graph_to_json(&g);
    assert_eq!(parse_graph_json(&text).unwrap(), g);
    assert!(parse_graph_json(r#"{"n": 4, "edges": [[0,1],[2,3]]}"#).is_err(), "disconnected");
    assert!(parse_graph_json(r#"{"n": 2, "edges": [[0,5]]}"#).is_err());
}

#[test]
fn edge_lists() {
    let g = parse_edge_list("# path\n3\n0 1\n1 2  # tail\n").unwrap();
    assert_eq!(g, make_line(3).unwrap());
    assert_eq!(parse_edge_list("0 1\n1 2\n").unwrap(), g);
    assert!(parse_edge_list("0 1 2\n").is_err());
    assert!(parse_edge_list("0 x\n").is_err());
}

#[test]
fn attacks_and_instances() {
    let a = parse_attack_json(r#"{"type": "broad", "s_x": [0], "s_y": [2, 1]}"#).unwrap();
    assert_eq!(a, Attack::Broad(BroadAttack::new(NodeSet::new([0]), NodeSet::new([1, 2]))));
    let f = parse_attack_json(r#"{"type": "focused", "f_x": [3], "f_y": [1, 2]}"#).unwrap();
    assert_eq!(f, Attack::Focused(FocusedAttack::new(NodeSet::new([3]), NodeSet::new([1, 2]))));
    assert!(parse_attack_json(r#"{"type": "other"}"#).is_err());

    let inst = parse_instance_json(r#"{"graph": {"n": 3, "edges": [[0,1],[1,2]]}, "attack": {"type": "broad", "s_x": [0], "s_y": [1, 2]}}"#).unwrap();
    assert_eq!(inst.graph, make_line(3).unwrap());
    let bad = r#"{"graph": {"n": 3, "edges": [[0,1],[1,2]]}, "attack": {"type": "broad", "s_x": [0], "s_y": [1]}}"#;
    assert!(parse_instance_json(bad).is_err(), "node 2 has no imposter");
}

#[test]
fn strategies_accept_numbers_and_strings() {
    let s = parse_strategy_json(r#"{"gains": [0.4, "3/5", 2], "probs": ["1/2", 0.25, 0.25]}"#).unwrap();
    assert_eq!(s.gains, vec![q("2/5"), q("3/5"), q("2")]);
    assert_eq!(s.probs, Some(vec![q("1/2"), q("1/4"), q("1/4")]));
    assert_eq!(parse_strategy_json(r#"{"gains": [0.1]}"#).unwrap().probs, None);
    assert!(parse_strategy_json(r#"{"gain": [0.1]}"#).is_err());
}

#[test]
fn generators() {
    assert_eq!(parse_generator("line:3").unwrap(), make_line(3).unwrap());
    assert_eq!(parse_generator("star:5").unwrap().degree(0), 4);
    assert_eq!(parse_generator("ring:5").unwrap().edge_count(), 5);
    assert_eq!(parse_generator("complete:4").unwrap().edge_count(), 6);
    assert_eq!(parse_generator("random:6:0.3:7").unwrap(), parse_generator("random:6:0.3:7").unwrap());
    for bad in ["line", "line:x", "tree:4", "random:6:p:1", "star:2"] {
        assert!(parse_generator(bad).is_err(), "{bad}");
    }
}

#[test]
fn files() {
    let dir = std::env::temp_dir().join(format!("coord-risk-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let edges = dir.join("g.txt");
    std::fs::File::create(&edges).unwrap().write_all(b"0 1\n1 2\n").unwrap();
    assert_eq!(load_graph(&edges).unwrap(), make_line(3).unwrap());
    let json = dir.join("g.json");
    std::fs::write(&json, graph_to_json(&make_line(3).unwrap())).unwrap();
    assert_eq!(load_graph(&json).unwrap(), make_line(3).unwrap());
    let missing = load_instance(&dir.join("absent.json")).unwrap_err();
    assert!(matches!(missing, coord_risk::Error::Io(_)), "{missing}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn attack_shorthands() {
    use coord_risk::io::parse_attack_spec;
    assert_eq!(parse_attack_spec("broad:1,2", 3).unwrap(), Attack::Broad(BroadAttack::new(NodeSet::new([0]), NodeSet::new([1, 2]))));
    assert_eq!(parse_attack_spec("broad:", 2).unwrap(), Attack::Broad(BroadAttack::new(NodeSet::new([0, 1]), NodeSet::empty())));
    assert_eq!(parse_attack_spec("focused:3/1,2", 4).unwrap(), Attack::Focused(FocusedAttack::new(NodeSet::new([3]), NodeSet::new([1, 2]))));
    assert!(parse_attack_spec("focused:3", 4).is_err());
    assert!(parse_attack_spec("broad:a", 4).is_err());
    assert!(parse_attack_spec("mixed:1", 4).is_err());
    assert!(parse_attack_spec(r#"{"type":"broad","s_x":[0],"s_y":[1]}"#, 2).is_ok());
}
