//! Fuzzy cellular automata: rule semantics, dependency matrices, lattice
//! evolution, basin analysis, CA tree construction and GA rule evolution.

mod basin;
mod ga;
mod lattice;
mod rule;
mod tree;

pub use basin::{basins, Basin, BasinPartition, DEFAULT_ENUMERATION_LIMIT};
pub use ga::{ga_evolve, random_population, Chromosome, GaParams, GaRun};
pub use lattice::{dependency_matrix, step, BinaryAutomaton, BinaryConfig, Configuration, DependencyMatrix};
pub use rule::{apply_rule, FcaRule, FcaRuleVector, Reads};
pub use tree::{ca_tree_build, ca_tree_build_full, CaTree, TreeLeaf};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FcaError {
    #[error("rule {0} is not a supported FCA rule")]
    UnknownRule(u8),
    #[error("cell state {0} is outside [0, 1]")]
    StateOutOfRange(f64),
    #[error("configuration has {cells} cells but the rule vector has {rules}")]
    LengthMismatch { cells: usize, rules: usize },
    #[error("lattice of {n} cells exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("rule vector is empty")]
    EmptyRuleVector,
    #[error("cannot parse rule vector entry {0:?}")]
    BadRuleVector(String),
    #[error("training set is empty")]
    EmptyTraining,
    #[error("rules resolve training data into {found} basins, fewer than the {wanted} requested")]
    ResolutionError { wanted: usize, found: usize },
}
