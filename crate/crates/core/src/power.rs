//! Battery model and the PLANE metrics.
//!
//! Energies are in joules and rates in watts, so a PLANE value is the number of
//! seconds a node can keep running at the given rate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::NodeId;

/// Low and high ends of the ad hoc operating range, in watts.
pub const TEC_RANGE_W: (f64, f64) = (0.741, 0.843);
/// Default ratio between the monitoring and the plain consumption rate.
pub const DEFAULT_MONITORING_OVERHEAD: f64 = 1.15;
/// Default energy spent per packet handled, in joules.
pub const DEFAULT_PACKET_COST_J: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerError {
    #[error("monitoring consumption rate (tec_nm) is not known; use plane_prime")]
    MissingMonitoringRate,
    #[error("invalid battery state: {0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Remaining energy plus the node's consumption rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryState {
    /// Battery power remaining, joules.
    pub bpr: f64,
    /// Consumption rate without monitoring duties, watts.
    pub tec: f64,
    /// Consumption rate while running the monitoring processes, watts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tec_nm: Option<f64>,
}

impl BatteryState {
    pub fn new(bpr: f64, tec: f64, tec_nm: Option<f64>) -> Result<Self, PowerError> {
        let b = BatteryState { bpr, tec, tec_nm };
        b.validate()?;
        Ok(b)
    }

    /// Battery whose monitoring rate is `tec * overhead`.
    pub fn with_overhead(bpr: f64, tec: f64, overhead: f64) -> Result<Self, PowerError> {
        BatteryState::new(bpr, tec, Some(tec * overhead))
    }

    pub fn validate(&self) -> Result<(), PowerError> {
        if !(self.bpr.is_finite() && self.bpr >= 0.0) {
            return Err(PowerError::Invalid(format!("bpr must be finite and >= 0, got {}", self.bpr)));
        }
        if !(self.tec.is_finite() && self.tec > 0.0) {
            return Err(PowerError::Invalid(format!("tec must be finite and > 0, got {}", self.tec)));
        }
        if let Some(nm) = self.tec_nm {
            if !(nm.is_finite() && nm >= self.tec) {
                return Err(PowerError::Invalid(format!(
                    "tec_nm must be finite and >= tec ({}), got {nm}",
                    self.tec
                )));
            }
        }
        Ok(())
    }

    /// The rate used while monitoring: `tec_nm` when known, else `tec`.
    pub fn monitoring_rate(&self) -> f64 {
        self.tec_nm.unwrap_or(self.tec)
    }

    /// PLANE when the monitoring rate is known, PLANE' otherwise.
    pub fn effective_plane(&self) -> PlaneValue {
        plane(self).unwrap_or_else(|_| plane_prime(self))
    }
}

/// Seconds a node can sustain monitoring. Always finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlaneValue(f64);

impl PlaneValue {
    pub const ZERO: PlaneValue = PlaneValue(0.0);

    pub fn new(seconds: f64) -> Option<Self> {
        (seconds.is_finite() && seconds >= 0.0).then_some(PlaneValue(seconds))
    }

    pub fn seconds(self) -> f64 {
        self.0
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for PlaneValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `bpr / tec_nm`.
pub fn plane(b: &BatteryState) -> Result<PlaneValue, PowerError> {
    let nm = b.tec_nm.ok_or(PowerError::MissingMonitoringRate)?;
    Ok(PlaneValue(b.bpr / nm))
}

/// `bpr / tec`.
pub fn plane_prime(b: &BatteryState) -> PlaneValue {
    PlaneValue(b.bpr / b.tec)
}

/// Removes `rate * dt` joules, never going below zero.
pub fn drain(b: &BatteryState, rate: f64, dt: f64) -> BatteryState {
    debug_assert!(rate >= 0.0 && dt >= 0.0);
    BatteryState { bpr: (b.bpr - rate * dt).max(0.0), ..*b }
}

/// Reads `node value` pairs, one per line, or `node=value` pairs separated by
/// commas. `#` starts a comment.
pub fn parse_plane_table(text: &str) -> Result<BTreeMap<NodeId, PlaneValue>, PowerError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or_default();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let err = |msg: String| PowerError::Parse { line, msg };
            let fields: Vec<&str> = item.split(|c: char| c == '=' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let [id, value] = fields.as_slice() else {
                return Err(err(format!("expected \"node value\", got {item:?}")));
            };
            let id: NodeId = id.parse().map_err(|_| err(format!("invalid node id {id:?}")))?;
            let v = value
                .parse::<f64>()
                .ok()
                .and_then(PlaneValue::new)
                .ok_or_else(|| err(format!("invalid PLANE value {value:?}")))?;
            if out.insert(id, v).is_some() {
                return Err(err(format!("node {id} listed twice")));
            }
        }
    }
    if out.is_empty() {
        return Err(PowerError::Parse { line: 0, msg: "no PLANE values".into() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bat(bpr: f64, tec: f64, nm: Option<f64>) -> BatteryState {
        BatteryState::new(bpr, tec, nm).unwrap()
    }

    #[test]
    fn plane_table_formats() {
        let file = parse_plane_table("# id plane\n1 5.5\n2 7.2 # note\n").unwrap();
        let inline = parse_plane_table("1=5.5, 2=7.2").unwrap();
        assert_eq!(file, inline);
        assert_eq!(file[&NodeId(2)].seconds(), 7.2);
        assert!(matches!(parse_plane_table("1 5\n1 6"), Err(PowerError::Parse { line: 2, .. })));
        assert!(matches!(parse_plane_table("1 -3"), Err(PowerError::Parse { line: 1, .. })));
        assert!(matches!(parse_plane_table("# nothing"), Err(PowerError::Parse { line: 0, .. })));
    }

    #[test]
    fn plane_examples() {
        assert_eq!(plane(&bat(0.0, 0.7, Some(0.8))).unwrap().seconds(), 0.0);
        assert_eq!(plane(&bat(3600.0, 0.7, Some(0.8))).unwrap().seconds(), 4500.0);
        let p = plane(&bat(3600.0, 0.741, Some(0.741))).unwrap().seconds();
        assert!((p - 4858.3).abs() < 0.1, "{p}");
        assert_eq!(plane(&bat(10.0, 0.7, None)), Err(PowerError::MissingMonitoringRate));
    }

    #[test]
    fn plane_prime_examples() {
        assert_eq!(plane_prime(&bat(0.0, 0.75, None)).seconds(), 0.0);
        assert_eq!(plane_prime(&bat(1500.0, 0.75, None)).seconds(), 2000.0);
    }

    #[test]
    fn drain_examples() {
        let b = bat(100.0, 0.8, None);
        assert_eq!(drain(&b, 0.8, 0.0).bpr, 100.0);
        assert_eq!(drain(&b, 0.8, 50.0).bpr, 60.0);
        assert_eq!(drain(&bat(10.0, 0.8, None), 0.8, 50.0).bpr, 0.0);
        assert_eq!(drain(&b, 0.8, 50.0).tec, 0.8);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(BatteryState::new(-1.0, 0.8, None).is_err());
        assert!(BatteryState::new(1.0, 0.0, None).is_err());
        assert!(BatteryState::new(1.0, 0.8, Some(0.7)).is_err());
        assert!(BatteryState::new(f64::NAN, 0.8, None).is_err());
    }

    proptest! {
        #[test]
        fn drain_never_increases_or_negates(bpr in 0.0..1e4f64, rate in 0.0..5.0f64, dt in 0.0..1e4f64) {
            let after = drain(&bat(bpr, 0.8, None), rate, dt).bpr;
            prop_assert!(after <= bpr);
            prop_assert!(after >= 0.0);
        }

        #[test]
        fn plane_monotone(bpr in 0.0..1e4f64, more in 0.0..1e3f64, tec in 0.1..2.0f64, f in 1.0..2.0f64, g in 1.0..2.0f64) {
            let lo = bat(bpr, tec, Some(tec * f));
            let hi = bat(bpr + more, tec, Some(tec * f));
            prop_assert!(plane(&lo).unwrap() <= plane(&hi).unwrap());
            prop_assert!(plane_prime(&lo) <= plane_prime(&hi));
            let faster = bat(bpr, tec * g, Some(tec * g * f));
            prop_assert!(plane_prime(&faster) <= plane_prime(&lo));
            prop_assert!(plane(&faster).unwrap() <= plane(&lo).unwrap());
            prop_assert!(plane(&lo).unwrap() <= plane_prime(&lo));
        }
    }
}
