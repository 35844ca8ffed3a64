//! PHIDS monitor election, cluster-local re-election, and the full re-run
//! baseline used for comparison.
//!
//! Election proceeds over a PLANE-ordered candidate list. The working set
//! grows one candidate at a time (a candidate that adds no newly represented
//! node is skipped) until every node and link is represented within the hop
//! radius. If the list is exhausted the radius grows and the search restarts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::power::{BatteryState, PlaneValue};
use crate::topology::{Graph, HopRadius, NodeId, TopologyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElectionError {
    #[error("no feasible monitor selection up to hop radius {r_max}")]
    NoFeasibleSelection { r_max: HopRadius },
    #[error("initial radius {r0} exceeds maximum radius {r_max}")]
    InvalidRadius { r0: HopRadius, r_max: HopRadius },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Candidates with PLANE at or above the threshold, highest PLANE first.
/// Ties are broken by ascending node id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlaneOrderedList {
    entries: Vec<(NodeId, PlaneValue)>,
}

impl PlaneOrderedList {
    pub fn entries(&self) -> &[(NodeId, PlaneValue)] {
        &self.entries
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn plane_values(&self) -> BTreeMap<NodeId, PlaneValue> {
        self.entries.iter().copied().collect()
    }
}

fn by_plane_desc(a: &(NodeId, PlaneValue), b: &(NodeId, PlaneValue)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

pub fn build_pol(plane_values: &BTreeMap<NodeId, PlaneValue>, threshold: PlaneValue) -> PlaneOrderedList {
    let mut entries: Vec<_> = plane_values
        .iter()
        .filter(|(_, &p)| p >= threshold)
        .map(|(&n, &p)| (n, p))
        .collect();
    entries.sort_by(by_plane_desc);
    PlaneOrderedList { entries }
}

/// Candidates currently eligible as monitors, in POL order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkingSet {
    pub members: Vec<NodeId>,
}

impl WorkingSet {
    pub fn new(members: Vec<NodeId>) -> Self {
        WorkingSet { members }
    }

    pub fn as_set(&self) -> BTreeSet<NodeId> {
        self.members.iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterId(pub u32);

/// A monitor and the nodes it watches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: ClusterId,
    pub root: NodeId,
    pub children: BTreeSet<NodeId>,
}

impl Cluster {
    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::once(self.root).chain(self.children.iter().copied())
    }

    pub fn size(&self) -> usize {
        1 + self.children.len()
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.root == n || self.children.contains(&n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectionOutcome {
    pub clusters: Vec<Cluster>,
    pub hop_radius_used: HopRadius,
    /// Number of times a candidate joined the working set, over all radii tried.
    pub ws_expansions: usize,
    /// Nodes that exchanged election messages.
    pub nodes_touched: usize,
}

impl ElectionOutcome {
    pub fn monitors(&self) -> BTreeSet<NodeId> {
        self.clusters.iter().map(|c| c.root).collect()
    }

    pub fn cluster_of(&self, n: NodeId) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.contains(n))
    }
}

/// Each node's chosen monitor: the working-set member within `r` hops with the
/// highest PLANE, then the nearest, then the lowest id. Working-set members
/// choose themselves; nodes with no member in range are absent.
pub fn assign_votes(
    g: &Graph,
    ws: &WorkingSet,
    r: HopRadius,
    plane_values: &BTreeMap<NodeId, PlaneValue>,
) -> Result<BTreeMap<NodeId, NodeId>, TopologyError> {
    // (plane, distance, id) of the best candidate seen so far for each node
    let mut best: BTreeMap<NodeId, (PlaneValue, u32, NodeId)> = BTreeMap::new();
    for &m in &ws.members {
        let plane = plane_values.get(&m).copied().unwrap_or(PlaneValue::ZERO);
        for (n, d) in g.distances_from(m, Some(r.get()))? {
            let cand = (plane, d, m);
            let better = match best.get(&n) {
                None => true,
                Some(cur) => cur
                    .0
                    .total_cmp(&cand.0)
                    .then(cand.1.cmp(&cur.1))
                    .then(cand.2.cmp(&cur.2))
                    == Ordering::Less,
            };
            if better {
                best.insert(n, cand);
            }
        }
    }
    let ws_set = ws.as_set();
    Ok(best
        .into_iter()
        .map(|(n, (_, _, m))| if ws_set.contains(&n) { (n, n) } else { (n, m) })
        .collect())
}

/// Groups votes into clusters, one per working-set member, numbered in
/// working-set order starting at 1.
fn form_clusters(ws: &WorkingSet, votes: &BTreeMap<NodeId, NodeId>) -> Vec<Cluster> {
    ws.members
        .iter()
        .enumerate()
        .map(|(i, &root)| Cluster {
            id: ClusterId(i as u32 + 1),
            root,
            children: votes
                .iter()
                .filter(|&(&n, &m)| m == root && n != root)
                .map(|(&n, _)| n)
                .collect(),
        })
        .collect()
}

/// Runs the working-set expansion for radii `r0..=r_max`.
pub fn elect_monitors(
    g: &Graph,
    pol: &PlaneOrderedList,
    r0: HopRadius,
    r_max: HopRadius,
) -> Result<ElectionOutcome, ElectionError> {
    if r0 > r_max {
        return Err(ElectionError::InvalidRadius { r0, r_max });
    }
    for n in pol.nodes() {
        if !g.contains(n) {
            return Err(TopologyError::UnknownNode(n).into());
        }
    }
    let plane_values = pol.plane_values();
    let mut expansions = 0;
    let mut r = r0;
    loop {
        let mut ws = WorkingSet::default();
        let mut represented: BTreeSet<NodeId> = BTreeSet::new();
        for candidate in pol.nodes() {
            let reach = g.distances_from(candidate, Some(r.get()))?;
            if reach.keys().all(|n| represented.contains(n)) {
                continue;
            }
            represented.extend(reach.into_keys());
            ws.members.push(candidate);
            expansions += 1;
            if g.coverage_gap(&ws.as_set(), r).is_empty() {
                let votes = assign_votes(g, &ws, r, &plane_values)?;
                return Ok(ElectionOutcome {
                    clusters: form_clusters(&ws, &votes),
                    hop_radius_used: r,
                    ws_expansions: expansions,
                    nodes_touched: g.len(),
                });
            }
        }
        if r >= r_max {
            return Err(ElectionError::NoFeasibleSelection { r_max });
        }
        r = r.next();
    }
}

/// Default upper bound for the hop radius: the graph diameter, at least 1.
pub fn default_r_max(g: &Graph) -> HopRadius {
    HopRadius::new(g.diameter()).unwrap_or(HopRadius::ONE)
}

/// Result of a cluster-local re-election.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reelection {
    Unchanged,
    Rotated(Cluster),
    FullRerunRequired,
}

/// Re-votes within one cluster using current battery levels.
///
/// A member is eligible when its PLANE meets the threshold and it can reach
/// every other member within `r` hops. The root is handed over to the eligible
/// member with the highest BPR (lowest id on ties) when that member's BPR is
/// strictly above the root's, or unconditionally when the root itself is no
/// longer eligible. With no eligible member at all a full re-run is required.
pub fn intra_cluster_reelect(
    g: &Graph,
    c: &Cluster,
    battery: &BTreeMap<NodeId, BatteryState>,
    threshold: PlaneValue,
    r: HopRadius,
) -> Result<Reelection, ElectionError> {
    let members: Vec<NodeId> = c.members().collect();
    let mut levels = BTreeMap::new();
    for &m in &members {
        let b = battery.get(&m).ok_or(TopologyError::UnknownNode(m))?;
        levels.insert(m, b);
    }
    let mut eligible = Vec::new();
    for &m in &members {
        if levels[&m].effective_plane() < threshold {
            continue;
        }
        let reach = g.distances_from(m, Some(r.get()))?;
        if members.iter().all(|o| reach.contains_key(o)) {
            eligible.push(m);
        }
    }
    let root_ok = eligible.contains(&c.root);
    let best = eligible
        .iter()
        .copied()
        .filter(|&m| m != c.root)
        .max_by(|a, b| levels[a].bpr.total_cmp(&levels[b].bpr).then(b.cmp(a)));
    let new_root = match best {
        None if root_ok => return Ok(Reelection::Unchanged),
        None => return Ok(Reelection::FullRerunRequired),
        Some(b) if !root_ok || levels[&b].bpr > levels[&c.root].bpr => b,
        Some(_) => return Ok(Reelection::Unchanged),
    };
    let mut children = c.children.clone();
    children.remove(&new_root);
    children.insert(c.root);
    Ok(Reelection::Rotated(Cluster { id: c.id, root: new_root, children }))
}

/// Builds the candidate list and runs a complete election over the whole
/// network, the way the SPAID baseline reacts to any power change.
pub fn spaid_full_rerun(
    g: &Graph,
    plane_values: &BTreeMap<NodeId, PlaneValue>,
    threshold: PlaneValue,
    r0: HopRadius,
    r_max: HopRadius,
) -> Result<ElectionOutcome, ElectionError> {
    let pol = build_pol(plane_values, threshold);
    let mut out = elect_monitors(g, &pol, r0, r_max)?;
    out.nodes_touched = g.len();
    Ok(out)
}
