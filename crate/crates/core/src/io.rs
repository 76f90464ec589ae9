//! File formats: graphs (JSON or edge lists), attacks, instances, strategies,
//! and generator specs such as `line:3` or `random:6:0.3:7`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adversary::{Attack, BroadAttack, FocusedAttack};
use crate::error::{Error, Result};
use crate::graph::{make_complete, make_line, make_ring, make_star, random_connected, Graph, NodeSet};
use crate::rational::{parse, Rational};

/// A graph with an attack, as stored in instance files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub graph: Graph,
    pub attack: Attack,
}

impl Instance {
    pub fn new(graph: Graph, attack: Attack) -> Result<Self> {
        attack.validate(&graph)?;
        Ok(Instance { graph, attack })
    }
}

/// Gains with optional probabilities. Entries may be JSON numbers or
/// strings such as `"1/4"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySpec {
    pub gains: Vec<Rational>,
    pub probs: Option<Vec<Rational>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Number {
    fn exact(self) -> Result<Rational> {
        match self {
            Number::Text(t) => parse(&t),
            Number::Int(v) => Ok(crate::rational::int(v)),
            // Shortest round-trip text, so 0.1 reads as 1/10.
            Number::Float(v) => parse(&v.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    gains: Vec<Number>,
    #[serde(default)]
    probs: Option<Vec<Number>>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_strategy_json(text: &str) -> Result<StrategySpec> {
    let raw: RawStrategy = serde_json::from_str(text).map_err(json_error)?;
    let gains = raw.gains.into_iter().map(Number::exact).collect::<Result<_>>()?;
    let probs = raw.probs.map(|p| p.into_iter().map(Number::exact).collect::<Result<_>>()).transpose()?;
    Ok(StrategySpec { gains, probs })
}

/// Comma-separated rationals, e.g. `"1/4, 0.5, 2"`.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(parse).collect()
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string(g).expect("graphs always serialize")
}

/// Whitespace-separated `i j` pairs, one edge per line; `#` starts a comment.
/// An optional first line holding a single integer gives the node count,
/// otherwise it is one more than the largest index.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("line {}: bad node index {s:?}", lineno + 1)));
        match fields.as_slice() {
            [count] if n.is_none() && edges.is_empty() => n = Some(num(count)?),
            [i, j] => edges.push((num(i)?, num(j)?)),
            _ => return Err(Error::Parse(format!("line {}: expected two node indices", lineno + 1))),
        }
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    Graph::new(n, edges)
}

pub fn parse_attack_json(text: &str) -> Result<Attack> {
    serde_json::from_str(text).map_err(json_error)
}

/// Reads an attack written as JSON or as a shorthand on `n` nodes:
/// `broad:Y_NODES` gives the listed nodes y imposters and every other node an
/// x imposter; `focused:X_NODES/Y_NODES` fixes the two lists.
pub fn parse_attack_spec(spec: &str, n: usize) -> Result<Attack> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return parse_attack_json(spec);
    }
    if let Some(ys) = spec.strip_prefix("broad:") {
        let s_y = parse_node_list(ys)?;
        let s_x = NodeSet::new((0..n).filter(|&i| !s_y.contains(i)));
        return Ok(Attack::Broad(BroadAttack::new(s_x, s_y)));
    }
    if let Some(rest) = spec.strip_prefix("focused:") {
        let (xs, ys) = rest.split_once('/').ok_or_else(|| Error::Parse("focused shorthand is focused:X_NODES/Y_NODES".into()))?;
        return Ok(Attack::Focused(FocusedAttack::new(parse_node_list(xs)?, parse_node_list(ys)?)));
    }
    Err(Error::Parse(format!("unknown attack spec {spec:?}")))
}

/// Comma-separated node indices; empty entries are skipped.
pub fn parse_node_list(text: &str) -> Result<NodeSet> {
    let nodes = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad node index {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeSet::new(nodes))
}

pub fn parse_instance_json(text: &str) -> Result<Instance> {
    let inst: Instance = serde_json::from_str(text).map_err(json_error)?;
    inst.attack.validate(&inst.graph)?;
    Ok(inst)
}

/// Builds a graph from `kind:args`: `line:N`, `star:N`, `ring:N`,
/// `complete:N`, or `random:N:P:SEED`.
pub fn parse_generator(spec: &str) -> Result<Graph> {
    let parts: Vec<&str> = spec.split(':').collect();
    let size = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad node count {s:?}")));
    match parts.as_slice() {
        ["line", n] => make_line(size(n)?),
        ["star", n] => make_star(size(n)?),
        ["ring", n] => make_ring(size(n)?),
        ["complete", n] => make_complete(size(n)?),
        ["random", n, p, seed] => {
            let p: f64 = p.parse().map_err(|_| Error::Parse(format!("bad edge probability {p:?}")))?;
            let seed: u64 = seed.parse().map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?;
            random_connected(size(n)?, p, seed)
        }
        _ => Err(Error::Parse(format!("unknown graph spec {spec:?}"))),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads a graph file: `.json` as JSON, anything else as an edge list.
pub fn load_graph(path: &Path) -> Result<Graph> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_graph_json(&text)
    } else {
        parse_edge_list(&text)
    }
}

pub fn load_attack(path: &Path) -> Result<Attack> {
    parse_attack_json(&read(path)?)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance_json(&read(path)?)
}

pub fn load_strategy(path: &Path) -> Result<StrategySpec> {
    parse_strategy_json(&read(path)?)
}
