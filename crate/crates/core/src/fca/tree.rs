use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{basins, BinaryAutomaton, BinaryConfig, FcaError, FcaRuleVector, DEFAULT_ENUMERATION_LIMIT};
use super::BasinPartition;
use crate::label::Label;

/// One leaf of the inverted tree: a basin (or a merge of several) with the
/// training tallies that landed in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeLeaf {
    pub attractors: Vec<u64>,
    pub landed: usize,
    pub intrusions: usize,
    /// Malicious index: fraction of intrusion records among those that landed.
    pub rq: f64,
}

impl TreeLeaf {
    /// Distance of `rq` from the undecided value 0.5.
    pub fn purity(&self) -> f64 {
        (self.rq - 0.5).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CaTreeRepr {
    cells: usize,
    leaves: Vec<TreeLeaf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    partition: Option<BasinPartition>,
}

/// Basins reached by training data, ordered as the leaves of an inverted tree:
/// the most class-pure leaves come first (the bottom of the tree).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "CaTreeRepr", into = "CaTreeRepr")]
pub struct CaTree {
    pub cells: usize,
    pub leaves: Vec<TreeLeaf>,
    /// Full basin partition with per-attractor Rq, for lattices small enough
    /// to enumerate.
    pub partition: Option<BasinPartition>,
    index: BTreeMap<u64, usize>,
}

impl From<CaTreeRepr> for CaTree {
    fn from(r: CaTreeRepr) -> Self {
        CaTree::new(r.cells, r.leaves, r.partition)
    }
}

impl From<CaTree> for CaTreeRepr {
    fn from(t: CaTree) -> Self {
        CaTreeRepr { cells: t.cells, leaves: t.leaves, partition: t.partition }
    }
}

impl CaTree {
    fn new(cells: usize, leaves: Vec<TreeLeaf>, partition: Option<BasinPartition>) -> Self {
        let index = leaves
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.attractors.iter().map(move |&a| (a, i)))
            .collect();
        CaTree { cells, leaves, partition, index }
    }

    pub fn leaf_of(&self, attractor: u64) -> Option<&TreeLeaf> {
        self.index.get(&attractor).map(|&i| &self.leaves[i])
    }

    /// Rq of the leaf holding `attractor`; 0 for attractors no training
    /// record reached.
    pub fn rq_of(&self, attractor: u64) -> f64 {
        self.leaf_of(attractor).map_or(0.0, |l| l.rq)
    }
}

fn tally(
    training: &[(BinaryConfig, Label)],
    rules: &FcaRuleVector,
) -> Result<BTreeMap<u64, (usize, usize)>, FcaError> {
    if training.is_empty() {
        return Err(FcaError::EmptyTraining);
    }
    let a = BinaryAutomaton::new(rules)?;
    let mut counts: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
    for (cfg, label) in training {
        if cfg.len != rules.len() {
            return Err(FcaError::LengthMismatch { cells: cfg.len, rules: rules.len() });
        }
        let e = counts.entry(a.attractor_id(cfg.state)).or_default();
        e.0 += 1;
        if label.is_intrusion() {
            e.1 += 1;
        }
    }
    Ok(counts)
}

/// Evolves each training configuration to its attractor and groups the
/// attractors into `k` leaves: the `k - 1` most populated basins stay separate
/// and the remainder share one leaf. When exactly `k` basins are reached every
/// basin keeps its own leaf.
pub fn ca_tree_build(
    training: &[(BinaryConfig, Label)],
    k: usize,
    rules: &FcaRuleVector,
) -> Result<CaTree, FcaError> {
    let counts = tally(training, rules)?;
    let k = k.max(1);
    if counts.len() < k {
        return Err(FcaError::ResolutionError { wanted: k, found: counts.len() });
    }
    let mut by_size: Vec<(u64, usize, usize)> = counts.into_iter().map(|(a, (n, i))| (a, n, i)).collect();
    by_size.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let keep = if by_size.len() == k { k } else { k - 1 };
    let mut leaves: Vec<TreeLeaf> = by_size[..keep]
        .iter()
        .map(|&(a, n, i)| TreeLeaf { attractors: vec![a], landed: n, intrusions: i, rq: 0.0 })
        .collect();
    if keep < by_size.len() {
        let rest = &by_size[keep..];
        let mut attractors: Vec<u64> = rest.iter().map(|r| r.0).collect();
        attractors.sort_unstable();
        leaves.push(TreeLeaf {
            attractors,
            landed: rest.iter().map(|r| r.1).sum(),
            intrusions: rest.iter().map(|r| r.2).sum(),
            rq: 0.0,
        });
    }
    for leaf in &mut leaves {
        leaf.rq = leaf.intrusions as f64 / leaf.landed as f64;
    }
    leaves.sort_by(|a, b| {
        b.purity()
            .total_cmp(&a.purity())
            .then(b.landed.cmp(&a.landed))
            .then(a.attractors[0].cmp(&b.attractors[0]))
    });
    let mut tree = CaTree::new(rules.len(), leaves, None);
    if rules.len() <= DEFAULT_ENUMERATION_LIMIT {
        let mut partition = basins(rules, DEFAULT_ENUMERATION_LIMIT)?;
        partition.rq = partition.basins.iter().map(|b| (b.attractor, tree.rq_of(b.attractor))).collect();
        tree.partition = Some(partition);
    }
    Ok(tree)
}

/// [`ca_tree_build`] with one leaf per reached basin.
pub fn ca_tree_build_full(training: &[(BinaryConfig, Label)], rules: &FcaRuleVector) -> Result<CaTree, FcaError> {
    let k = tally(training, rules)?.len();
    ca_tree_build(training, k, rules)
}
