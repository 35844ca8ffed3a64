//! Power-aware monitor election for ad hoc networks (PHIDS) together with a
//! fuzzy cellular-automata intrusion classifier and a deterministic
//! discrete-event simulator that compares cluster-local re-election against
//! full network re-runs.

pub mod detector;
pub mod election;
pub mod fca;
pub mod fixtures;
pub mod label;
pub mod power;
pub mod sim;
pub mod topology;

pub use election::{
    assign_votes, build_pol, elect_monitors, intra_cluster_reelect, spaid_full_rerun, Cluster, ClusterId,
    ElectionError, ElectionOutcome, PlaneOrderedList, Reelection, WorkingSet,
};
pub use label::Label;
pub use power::{drain, parse_plane_table, plane, plane_prime, BatteryState, PlaneValue, PowerError};
pub use topology::{CoverageGap, Edge, Graph, HopRadius, NodeId, TopologyError};
