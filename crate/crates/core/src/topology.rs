//! Undirected network graph with hop-distance and coverage queries.
//!
//! Node identifiers are small integers. A [`Graph`] is an immutable value once
//! built; the simulator derives a new graph when a node joins.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a network node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl FromStr for NodeId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse().map(NodeId)
    }
}

/// Maximum number of hops a monitor covers. Always at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct HopRadius(NonZeroU32);

impl HopRadius {
    pub const ONE: HopRadius = HopRadius(NonZeroU32::MIN);

    pub fn new(r: u32) -> Option<Self> {
        NonZeroU32::new(r).map(HopRadius)
    }

    pub fn get(self) -> u32 {
        self.0.get()
    }

    pub fn next(self) -> Self {
        HopRadius(self.0.saturating_add(1))
    }
}

impl TryFrom<u32> for HopRadius {
    type Error = String;

    fn try_from(v: u32) -> Result<Self, Self::Error> {
        HopRadius::new(v).ok_or_else(|| "hop radius must be at least 1".to_string())
    }
}

impl From<HopRadius> for u32 {
    fn from(r: HopRadius) -> u32 {
        r.get()
    }
}

impl fmt::Display for HopRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.get().fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An undirected edge, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub NodeId, pub NodeId);

impl Edge {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Nodes and edges left unrepresented by a monitor selection.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageGap {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<Edge>,
}

impl CoverageGap {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl Graph {
    /// Builds a graph from explicit nodes plus edges. Edge endpoints are added
    /// as nodes automatically.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, TopologyError> {
        let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for n in nodes {
            adjacency.entry(n).or_default();
        }
        for (a, b) in edges {
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            adjacency.entry(a).or_default().insert(b);
            adjacency.entry(b).or_default().insert(a);
        }
        Ok(Graph { adjacency })
    }

    pub fn from_edges(edges: &[(u32, u32)]) -> Result<Self, TopologyError> {
        Graph::new([], edges.iter().map(|&(a, b)| (NodeId(a), NodeId(b))))
    }

    /// Returns a copy of this graph with `node` added and linked to `links`.
    pub fn with_node(&self, node: NodeId, links: &[NodeId]) -> Result<Self, TopologyError> {
        if self.contains(node) {
            return Err(TopologyError::DuplicateNode(node));
        }
        for &l in links {
            if l == node {
                return Err(TopologyError::SelfLoop(node));
            }
            self.check(l)?;
        }
        let mut g = self.clone();
        g.adjacency.insert(node, links.iter().copied().collect());
        for &l in links {
            g.adjacency.get_mut(&l).expect("checked").insert(node);
        }
        Ok(g)
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.adjacency.contains_key(&n)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.nodes().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| Edge(a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, n: NodeId) -> Result<&BTreeSet<NodeId>, TopologyError> {
        self.adjacency.get(&n).ok_or(TopologyError::UnknownNode(n))
    }

    fn check(&self, n: NodeId) -> Result<(), TopologyError> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(TopologyError::UnknownNode(n))
        }
    }

    /// Breadth-first hop distances from `src`, optionally bounded by `limit`
    /// hops. Unreachable nodes are absent from the map.
    pub fn distances_from(
        &self,
        src: NodeId,
        limit: Option<u32>,
    ) -> Result<BTreeMap<NodeId, u32>, TopologyError> {
        self.check(src)?;
        let mut dist = BTreeMap::new();
        dist.insert(src, 0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if limit.is_some_and(|l| d >= l) {
                continue;
            }
            for &v in &self.adjacency[&u] {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                    e.insert(d + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path hop count, or `None` when `b` is unreachable from `a`.
    pub fn hop_distance(&self, a: NodeId, b: NodeId) -> Result<Option<u32>, TopologyError> {
        self.check(b)?;
        Ok(self.distances_from(a, None)?.get(&b).copied())
    }

    /// Every node within `r` hops of `n`, excluding `n`.
    pub fn neighborhood(&self, n: NodeId, r: HopRadius) -> Result<BTreeSet<NodeId>, TopologyError> {
        let mut set: BTreeSet<NodeId> = self.distances_from(n, Some(r.get()))?.into_keys().collect();
        set.remove(&n);
        Ok(set)
    }

    /// Nodes within `r` hops of at least one monitor (monitors cover themselves).
    /// Monitors that are not in the graph are ignored.
    pub fn covered_by(&self, monitors: &BTreeSet<NodeId>, r: HopRadius) -> BTreeSet<NodeId> {
        let mut covered = BTreeSet::new();
        for &m in monitors {
            if let Ok(d) = self.distances_from(m, Some(r.get())) {
                covered.extend(d.into_keys());
            }
        }
        covered
    }

    /// Nodes with no monitor within `r` hops, and edges neither endpoint of
    /// which is covered.
    pub fn coverage_gap(&self, monitors: &BTreeSet<NodeId>, r: HopRadius) -> CoverageGap {
        let covered = self.covered_by(monitors, r);
        let nodes = self.nodes().filter(|n| !covered.contains(n)).collect();
        let edges = self
            .edges()
            .filter(|e| !covered.contains(&e.0) && !covered.contains(&e.1))
            .collect();
        CoverageGap { nodes, edges }
    }

    /// Largest finite hop distance between any two nodes (0 for graphs with
    /// fewer than two connected nodes).
    pub fn diameter(&self) -> u32 {
        self.nodes()
            .filter_map(|n| self.distances_from(n, None).ok())
            .flat_map(|d| d.into_values())
            .max()
            .unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        match self.nodes().next() {
            None => true,
            Some(n) => self.distances_from(n, None).map(|d| d.len()).unwrap_or(0) == self.len(),
        }
    }

    /// Lexicographically smallest shortest path from `src` to `dst`, both
    /// endpoints included. `None` when unreachable.
    pub fn shortest_path(&self, src: NodeId, dst: NodeId) -> Result<Option<Vec<NodeId>>, TopologyError> {
        self.check(src)?;
        let to_dst = self.distances_from(dst, None)?;
        let Some(&hops) = to_dst.get(&src) else {
            return Ok(None);
        };
        let mut path = Vec::with_capacity(hops as usize + 1);
        let mut cur = src;
        path.push(cur);
        while cur != dst {
            let d = to_dst[&cur];
            cur = *self.adjacency[&cur]
                .iter()
                .find(|v| to_dst.get(v) == Some(&(d - 1)))
                .expect("BFS layer has a predecessor");
            path.push(cur);
        }
        Ok(Some(path))
    }

    /// Parses the line-oriented topology format: `a b` per edge, `node a` for
    /// isolated nodes, `#` comments.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| TopologyError::Parse { line: line_no, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_id = |s: &str| {
                s.parse::<NodeId>()
                    .map_err(|_| err(format!("invalid node id {s:?}")))
            };
            match fields.as_slice() {
                ["node", id] => nodes.push(parse_id(id)?),
                [a, b] => {
                    let (a, b) = (parse_id(a)?, parse_id(b)?);
                    if a == b {
                        return Err(err(format!("self-loop on node {a}")));
                    }
                    edges.push((a, b));
                }
                _ => return Err(err(format!("expected \"a b\" or \"node a\", got {line:?}"))),
            }
        }
        if nodes.is_empty() && edges.is_empty() {
            return Err(TopologyError::Parse { line: 0, msg: "topology declares no nodes".into() });
        }
        Graph::new(nodes, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (&n, ns) in &self.adjacency {
            if ns.is_empty() {
                out.push_str(&format!("node {n}\n"));
            }
        }
        for e in self.edges() {
            out.push_str(&format!("{} {}\n", e.0, e.1));
        }
        out
    }
}
