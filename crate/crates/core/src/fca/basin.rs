use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BinaryAutomaton, BinaryConfig, FcaError, FcaRuleVector};

/// Default cap on the lattice size for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Basin {
    /// Smallest state on the attractor cycle.
    pub attractor: u64,
    /// The cycle, starting at `attractor`.
    pub cycle: Vec<u64>,
    /// Every state whose trajectory ends on this cycle, ascending.
    pub members: Vec<u64>,
}

/// Exhaustive basin structure of a binary lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinPartition {
    pub cells: usize,
    /// Ordered by attractor id.
    pub basins: Vec<Basin>,
    /// Malicious index per attractor, when training data has been mapped.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rq: BTreeMap<u64, f64>,
}

impl BasinPartition {
    pub fn len(&self) -> usize {
        self.basins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basins.is_empty()
    }

    pub fn basin_of(&self, state: u64) -> Option<&Basin> {
        self.basins.iter().find(|b| b.members.binary_search(&state).is_ok())
    }

    pub fn member_count(&self) -> usize {
        self.basins.iter().map(|b| b.members.len()).sum()
    }

    pub fn attractor_config(&self, b: &Basin) -> BinaryConfig {
        BinaryConfig { len: self.cells, state: b.attractor }
    }
}

/// Enumerates all `2^n` binary states and groups them by attractor.
pub fn basins(rules: &FcaRuleVector, limit: usize) -> Result<BasinPartition, FcaError> {
    let n = rules.len();
    if n > limit || n > 32 {
        return Err(FcaError::TooLarge { n, limit: limit.min(32) });
    }
    let a = BinaryAutomaton::new(rules)?;
    let total = 1usize << n;
    const UNSEEN: u32 = u32::MAX;
    const ON_PATH: u32 = u32::MAX - 1;
    let mut owner = vec![UNSEEN; total];
    let mut cycles: Vec<Vec<u64>> = Vec::new();
    let mut path = Vec::new();
    for start in 0..total {
        if owner[start] != UNSEEN {
            continue;
        }
        path.clear();
        let mut s = start;
        while owner[s] == UNSEEN {
            owner[s] = ON_PATH;
            path.push(s);
            s = a.step(s as u64) as usize;
        }
        let basin = if owner[s] == ON_PATH {
            // closed a new cycle starting at s
            let pos = path.iter().position(|&p| p == s).expect("s is on the path");
            let mut cycle: Vec<u64> = path[pos..].iter().map(|&p| p as u64).collect();
            let min_pos = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap();
            cycle.rotate_left(min_pos);
            cycles.push(cycle);
            (cycles.len() - 1) as u32
        } else {
            owner[s]
        };
        for &p in &path {
            owner[p] = basin;
        }
    }
    let mut members: Vec<Vec<u64>> = vec![Vec::new(); cycles.len()];
    for (s, &b) in owner.iter().enumerate() {
        members[b as usize].push(s as u64);
    }
    let mut basins: Vec<Basin> = cycles
        .into_iter()
        .zip(members)
        .map(|(cycle, members)| Basin { attractor: cycle[0], cycle, members })
        .collect();
    basins.sort_by_key(|b| b.attractor);
    Ok(BasinPartition { cells: n, basins, rq: BTreeMap::new() })
}
