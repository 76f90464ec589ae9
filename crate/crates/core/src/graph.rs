//! Undirected connected graphs, generators, and edge-counting primitives.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, ActionProfile};

/// Smallest graph the risk definitions quantify over.
pub const MIN_NODES: usize = 3;

/// Undirected, connected, simple graph on nodes `0..n`.
///
/// Edges are stored canonically as `(min, max)` pairs in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphData", into = "GraphData")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

/// Wire form of a graph: `{"n": 3, "edges": [[0, 1], [1, 2]]}`.
#[derive(Serialize, Deserialize)]
struct GraphData {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphData> for Graph {
    type Error = Error;
    fn try_from(d: GraphData) -> Result<Self> {
        Graph::new(d.n, d.edges)
    }
}

impl From<Graph> for GraphData {
    fn from(g: Graph) -> Self {
        GraphData { n: g.n, edges: g.edges }
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, out-of-range endpoints,
    /// fewer than three nodes, and disconnected edge sets. Duplicate edges
    /// (in either orientation) collapse to one.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::invalid(format!("graph needs at least {MIN_NODES} nodes, got {n}")));
        }
        let mut canon = Vec::new();
        for (i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::NodeOutOfRange { index: v, n });
                }
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at node {i}")));
            }
            canon.push((i.min(j), i.max(j)));
        }
        canon.sort_unstable();
        canon.dedup();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &canon {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let g = Graph { n, edges: canon, neighbors };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Every node as a set.
    pub fn all_nodes(&self) -> NodeSet {
        NodeSet((0..self.n).collect())
    }

    /// Adjacency bitmasks, one per node. Only meaningful for `n <= 64`.
    pub(crate) fn adjacency_masks(&self) -> Vec<u64> {
        self.neighbors
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &j| m | (1 << j)))
            .collect()
    }

    /// The center of a star graph, if this graph is one.
    pub fn star_center(&self) -> Option<usize> {
        let center = (0..self.n).find(|&i| self.degree(i) == self.n - 1)?;
        (self.edge_count() == self.n - 1).then_some(center)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbors[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::NodeOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// Sorted, duplicate-free set of node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct NodeSet(Vec<usize>);

impl From<Vec<usize>> for NodeSet {
    fn from(v: Vec<usize>) -> Self {
        NodeSet::new(v)
    }
}

impl From<NodeSet> for Vec<usize> {
    fn from(s: NodeSet) -> Self {
        s.0
    }
}

impl NodeSet {
    pub fn new(nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = nodes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }

    pub fn empty() -> Self {
        NodeSet(Vec::new())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.iter().all(|i| !other.contains(i))
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet::new(self.iter().chain(other.iter()))
    }

    /// Fails if any member is not a node of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self.0.last() {
            Some(&max) => g.check_node(max),
            None => Ok(()),
        }
    }

    pub(crate) fn mask(&self) -> u64 {
        self.iter().fold(0u64, |m, i| m | (1 << i))
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        NodeSet::new(iter)
    }
}

/// Maximal connected set of nodes sharing one action in a profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub nodes: NodeSet,
    pub convention: Action,
}

/// `e(A, B)`: edges with one endpoint in `a` and the other in `b`.
/// Symmetric in its arguments; `e(A, A)` lists each internal edge once.
pub fn edges_between(g: &Graph, a: &NodeSet, b: &NodeSet) -> Result<Vec<(usize, usize)>> {
    a.validate(g)?;
    b.validate(g)?;
    Ok(g
        .edges()
        .iter()
        .copied()
        .filter(|&(i, j)| (a.contains(i) && b.contains(j)) || (a.contains(j) && b.contains(i)))
        .collect())
}

pub fn make_star(n: usize) -> Result<Graph> {
    check_size(n)?;
    Graph::new(n, (1..n).map(|leaf| (0, leaf)))
}

pub fn make_line(n: usize) -> Result<Graph> {
    check_size(n)?;
    Graph::new(n, (1..n).map(|i| (i - 1, i)))
}

pub fn make_ring(n: usize) -> Result<Graph> {
    check_size(n)?;
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn make_complete(n: usize) -> Result<Graph> {
    check_size(n)?;
    Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// Uniform random labeled spanning tree (decoded from a random Prüfer
/// sequence), plus every remaining pair independently with `edge_prob`.
/// Deterministic for a given seed.
pub fn random_connected(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    check_size(n)?;
    if !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(Error::invalid(format!("edge probability must be in (0, 1], got {edge_prob}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut edges = prufer_tree(n, &prufer);
    let mut extra: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|e| !edges.contains(e))
        .collect();
    // Fixed pair order, so only the coin flips depend on the RNG stream.
    extra.sort_unstable();
    for e in extra {
        if rng.random_bool(edge_prob) {
            edges.push(e);
        }
    }
    Graph::new(n, edges)
}

/// Random permutation of node labels; handy for relabeling tests.
pub fn relabel(g: &Graph, seed: u64) -> Graph {
    let mut perm: Vec<usize> = (0..g.node_count()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Graph::new(g.node_count(), g.edges().iter().map(|&(i, j)| (perm[i], perm[j])))
        .expect("relabeling preserves validity")
}

fn prufer_tree(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always exists");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn check_size(n: usize) -> Result<()> {
    if n < MIN_NODES {
        Err(Error::invalid(format!("graph needs at least {MIN_NODES} nodes, got {n}")))
    } else {
        Ok(())
    }
}

/// Connected components of the same-action subgraphs, ordered by their
/// smallest node.
pub fn partitions_of(g: &Graph, a: &ActionProfile) -> Result<Vec<Partition>> {
    if a.len() != g.node_count() {
        return Err(Error::LengthMismatch { expected: g.node_count(), got: a.len() });
    }
    let mut seen = vec![false; g.node_count()];
    let mut parts = Vec::new();
    for start in 0..g.node_count() {
        if seen[start] {
            continue;
        }
        let action = a[start];
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if !seen[v] && a[v] == action {
                    seen[v] = true;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        parts.push(Partition { nodes: NodeSet::new(members), convention: action });
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Action::{X, Y};
    use proptest::prelude::*;

    fn set(v: &[usize]) -> NodeSet {
        NodeSet::new(v.iter().copied())
    }

    #[test]
    fn star_edges_between_center_and_leaves() {
        let g = make_star(3).unwrap();
        assert_eq!(edges_between(&g, &set(&[0]), &set(&[1, 2])).unwrap().len(), 2);
        assert!(edges_between(&g, &set(&[1]), &set(&[2])).unwrap().is_empty());
        let line = make_line(3).unwrap();
        assert_eq!(edges_between(&line, &line.all_nodes(), &line.all_nodes()).unwrap().len(), 2);
    }

    #[test]
    fn edges_between_rejects_bad_index() {
        let g = make_star(3).unwrap();
        assert!(matches!(
            edges_between(&g, &set(&[5]), &set(&[0])),
            Err(Error::NodeOutOfRange { index: 5, n: 3 })
        ));
    }

    #[test]
    fn generators() {
        assert_eq!(make_star(3).unwrap().edges(), &[(0, 1), (0, 2)]);
        assert_eq!(make_star(4).unwrap().degree(0), 3);
        assert!(make_star(2).is_err());
        assert_eq!(make_line(3).unwrap().edges(), &[(0, 1), (1, 2)]);
        assert_eq!(make_ring(4).unwrap().edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(make_complete(5).unwrap().edge_count(), 10);
        assert!(make_ring(1).is_err());
        assert_eq!(make_star(5).unwrap().star_center(), Some(0));
        assert_eq!(make_line(4).unwrap().star_center(), None);
        assert_eq!(make_line(3).unwrap().star_center(), Some(1));
    }

    #[test]
    fn random_connected_is_deterministic() {
        let a = random_connected(6, 0.3, 7).unwrap();
        let b = random_connected(6, 0.3, 7).unwrap();
        assert_eq!(a, b);
        assert!(random_connected(6, 0.0, 7).is_err());
        assert!(random_connected(6, 1.5, 7).is_err());
        assert_eq!(random_connected(6, 1.0, 1).unwrap().edge_count(), 15);
    }

    #[test]
    fn rejects_disconnected_and_loops() {
        assert_eq!(Graph::new(4, [(0, 1), (2, 3)]), Err(Error::Disconnected));
        assert!(Graph::new(3, [(0, 0), (0, 1), (1, 2)]).is_err());
        assert_eq!(Graph::new(3, [(0, 1), (1, 0), (1, 2)]).unwrap().edge_count(), 2);
    }

    #[test]
    fn partitions_examples() {
        let line = make_line(3).unwrap();
        let parts = partitions_of(&line, &ActionProfile::new(vec![X, Y, Y])).unwrap();
        assert_eq!(
            parts,
            vec![
                Partition { nodes: set(&[0]), convention: X },
                Partition { nodes: set(&[1, 2]), convention: Y },
            ]
        );
        let ring = make_ring(4).unwrap();
        let parts = partitions_of(&ring, &ActionProfile::new(vec![X, Y, X, Y])).unwrap();
        assert_eq!(parts.len(), 4);
        let all_x = partitions_of(&ring, &ActionProfile::uniform(4, X)).unwrap();
        assert_eq!(all_x, vec![Partition { nodes: ring.all_nodes(), convention: X }]);
        assert!(partitions_of(&ring, &ActionProfile::uniform(3, X)).is_err());
    }

    fn induced_connected(g: &Graph, nodes: &NodeSet) -> bool {
        let first = match nodes.iter().next() {
            Some(f) => f,
            None => return false,
        };
        let mut seen = vec![first];
        let mut i = 0;
        while i < seen.len() {
            for &v in g.neighbors(seen[i]) {
                if nodes.contains(v) && !seen.contains(&v) {
                    seen.push(v);
                }
            }
            i += 1;
        }
        seen.len() == nodes.len()
    }

    proptest! {
        #[test]
        fn edge_count_splits_over_bipartition(n in 3usize..9, p in 0.05f64..1.0, seed: u64, mask: u64) {
            let g = random_connected(n, p, seed).unwrap();
            let a = NodeSet::new((0..n).filter(|&i| mask >> i & 1 == 1));
            let b = NodeSet::new((0..n).filter(|&i| !a.contains(i)));
            let total = edges_between(&g, &a, &a).unwrap().len()
                + edges_between(&g, &b, &b).unwrap().len()
                + edges_between(&g, &a, &b).unwrap().len();
            prop_assert_eq!(total, g.edge_count());
            prop_assert_eq!(edges_between(&g, &a, &b).unwrap(), edges_between(&g, &b, &a).unwrap());
        }

        #[test]
        fn partitions_cover_and_are_connected(n in 3usize..10, p in 0.05f64..1.0, seed: u64, mask: u64) {
            let g = random_connected(n, p, seed).unwrap();
            prop_assert!(g.edge_count() >= n - 1);
            let a = ActionProfile::from_x_mask(n, mask);
            let parts = partitions_of(&g, &a).unwrap();
            let mut covered = vec![0usize; n];
            for part in &parts {
                prop_assert!(induced_connected(&g, &part.nodes));
                for i in part.nodes.iter() {
                    covered[i] += 1;
                    prop_assert_eq!(a[i], part.convention);
                }
            }
            prop_assert!(covered.iter().all(|&c| c == 1));
        }
    }
}
