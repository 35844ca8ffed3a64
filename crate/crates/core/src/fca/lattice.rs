use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FcaError, FcaRuleVector};

/// Fuzzy cell states, each in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    cells: Vec<f64>,
}

impl Configuration {
    pub fn new(cells: Vec<f64>) -> Result<Self, FcaError> {
        if let Some(&bad) = cells.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(FcaError::StateOutOfRange(bad));
        }
        Ok(Configuration { cells })
    }

    pub fn zeros(n: usize) -> Self {
        Configuration { cells: vec![0.0; n] }
    }

    pub fn from_bits(bits: BinaryConfig) -> Self {
        Configuration {
            cells: (0..bits.len).map(|i| (bits.state >> i & 1) as f64).collect(),
        }
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.cells.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Packs a binary configuration; cells at or above 0.5 read as 1.
    pub fn to_bits(&self) -> Result<BinaryConfig, FcaError> {
        if self.len() > BinaryConfig::MAX_CELLS {
            return Err(FcaError::TooLarge { n: self.len(), limit: BinaryConfig::MAX_CELLS });
        }
        let state = self
            .cells
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| if v >= 0.5 { acc | 1 << i } else { acc });
        Ok(BinaryConfig { len: self.len(), state })
    }
}

/// A binary configuration packed into a word; bit `i` is cell `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BinaryConfig {
    pub len: usize,
    pub state: u64,
}

impl BinaryConfig {
    pub const MAX_CELLS: usize = 64;
}

impl fmt::Display for BinaryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.state >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// One synchronous update of every cell. Cells outside the lattice read as 0.
pub fn step(cfg: &Configuration, rules: &FcaRuleVector) -> Result<Configuration, FcaError> {
    let n = cfg.len();
    if n != rules.len() {
        return Err(FcaError::LengthMismatch { cells: n, rules: rules.len() });
    }
    let q = &cfg.cells;
    let cells = rules
        .rules()
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            let left = if i > 0 { q[i - 1] } else { 0.0 };
            let right = if i + 1 < n { q[i + 1] } else { 0.0 };
            rule.apply(left, q[i], right)
        })
        .collect();
    Ok(Configuration { cells })
}

/// `n x n` 0/1 matrix; entry (i, j) is 1 when cell i's rule reads cell j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyMatrix {
    rows: Vec<Vec<u8>>,
}

impl DependencyMatrix {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.rows[i][j]
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

impl fmt::Display for DependencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            for v in row {
                write!(f, "{v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn dependency_matrix(rules: &FcaRuleVector) -> DependencyMatrix {
    let n = rules.len();
    let rows = rules
        .rules()
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            let reads = rule.reads();
            let mut row = vec![0u8; n];
            if reads.left && i > 0 {
                row[i - 1] = 1;
            }
            if reads.center {
                row[i] = 1;
            }
            if reads.right && i + 1 < n {
                row[i + 1] = 1;
            }
            row
        })
        .collect();
    DependencyMatrix { rows }
}

/// Word-parallel evaluator for binary configurations.
///
/// Every supported rule is an OR over a subset of the neighborhood, optionally
/// complemented, so one step is three shifted masks and an XOR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryAutomaton {
    n: usize,
    full: u64,
    reads_left: u64,
    reads_center: u64,
    reads_right: u64,
    complement: u64,
}

impl BinaryAutomaton {
    pub fn new(rules: &FcaRuleVector) -> Result<Self, FcaError> {
        let n = rules.len();
        if n > BinaryConfig::MAX_CELLS {
            return Err(FcaError::TooLarge { n, limit: BinaryConfig::MAX_CELLS });
        }
        let mut a = BinaryAutomaton {
            n,
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            reads_left: 0,
            reads_center: 0,
            reads_right: 0,
            complement: 0,
        };
        for (i, rule) in rules.rules().iter().enumerate() {
            let reads = rule.reads();
            let bit = 1u64 << i;
            if reads.left {
                a.reads_left |= bit;
            }
            if reads.center {
                a.reads_center |= bit;
            }
            if reads.right {
                a.reads_right |= bit;
            }
            if rule.is_complemented() {
                a.complement |= bit;
            }
        }
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self, s: u64) -> u64 {
        let left = s << 1;
        let right = s >> 1;
        let or = (left & self.reads_left) | (s & self.reads_center) | (right & self.reads_right);
        (or ^ self.complement) & self.full
    }

    /// Iterates from `start` until a state repeats (Brent's cycle detection)
    /// and returns the cycle, rotated to begin at its smallest state.
    pub fn attractor(&self, start: u64) -> Vec<u64> {
        let mut power = 1usize;
        let mut lam = 1usize;
        let mut tortoise = start;
        let mut hare = self.step(start);
        while tortoise != hare {
            if power == lam {
                tortoise = hare;
                power *= 2;
                lam = 0;
            }
            hare = self.step(hare);
            lam += 1;
        }
        // `hare` is on the cycle of length `lam`
        let mut cycle = Vec::with_capacity(lam);
        let mut s = hare;
        for _ in 0..lam {
            cycle.push(s);
            s = self.step(s);
        }
        let min_pos = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        cycle.rotate_left(min_pos);
        cycle
    }

    /// Canonical attractor identifier: the smallest state on the cycle.
    pub fn attractor_id(&self, start: u64) -> u64 {
        self.attractor(start)[0]
    }
}
