//! Deterministic discrete-event simulation of monitor election under battery
//! drain, and the comparison between local and whole-network re-election.

mod engine;
mod report;
mod scenario;

pub use engine::{
    run, run_with_detector, BprSample, EventKind, EventQueue, MetricsTimeline, MonitorSnapshot, PacketStats,
    Payload, ReelectionKind, ReelectionRecord, SimEvent,
};
pub use report::{compare, ComparisonReport, ModeSummary, RunReport};
pub use scenario::{FeatureRanges, FlowSpec, JoinSpec, Mode, ResolvedScenario, Scenario};

use thiserror::Error;

use crate::detector::DetectorError;
use crate::election::ElectionError;
use crate::topology::TopologyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario at `{path}`: {msg}")]
    ScenarioInvalid { path: String, msg: String },
    #[error("runs cannot be compared: {0}")]
    IncompatibleRuns(String),
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
}
