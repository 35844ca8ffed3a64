use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SimError;
use crate::election::default_r_max;
use crate::power::{BatteryState, PlaneValue, DEFAULT_MONITORING_OVERHEAD, DEFAULT_PACKET_COST_J, TEC_RANGE_W};
use crate::topology::{Graph, HopRadius, NodeId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Local re-election inside the affected cluster.
    #[default]
    Phids,
    /// Whole-network re-run on every power inversion.
    SpaidBaseline,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Phids => "phids",
            Mode::SpaidBaseline => "spaid_baseline",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phids" => Ok(Mode::Phids),
            "spaid" | "spaid_baseline" => Ok(Mode::SpaidBaseline),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Constant-rate traffic between two nodes. One batch of `rate` packets is
/// sent every second from `start` until `end` (exclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub source: NodeId,
    pub destination: NodeId,
    /// Packets per second.
    pub rate: u32,
    #[serde(default)]
    pub start: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    /// Probability that a packet is an intrusion.
    #[serde(default)]
    pub intrusion_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinSpec {
    pub time: f64,
    pub node: NodeId,
    pub links: Vec<NodeId>,
    pub battery: BatteryState,
}

/// Per-feature `[low, high]` ranges for encoded packet features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureRanges {
    pub benign: Vec<[f64; 2]>,
    pub anomalous: Vec<[f64; 2]>,
}

impl FeatureRanges {
    pub fn width(&self) -> usize {
        self.benign.len()
    }
}

fn default_overhead() -> f64 {
    DEFAULT_MONITORING_OVERHEAD
}

fn default_packet_cost() -> f64 {
    DEFAULT_PACKET_COST_J
}

fn default_interval() -> f64 {
    1.0
}

fn default_radius() -> HopRadius {
    HopRadius::ONE
}

/// A simulation run as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Topology file, relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<PathBuf>,
    /// Inline topology, used when no file is given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<[u32; 2]>,
    #[serde(default)]
    pub batteries: BTreeMap<NodeId, BatteryState>,
    /// Battery for nodes without an entry; its `tec` is drawn from the
    /// operating range using the seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_bpr: Option<f64>,
    #[serde(default = "default_overhead")]
    pub monitoring_overhead: f64,
    /// PLANE threshold, seconds.
    pub threshold: f64,
    #[serde(default = "default_radius")]
    pub r0: HopRadius,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<HopRadius>,
    /// Simulated seconds.
    pub duration: f64,
    #[serde(default)]
    pub flows: Vec<FlowSpec>,
    #[serde(default)]
    pub joins: Vec<JoinSpec>,
    #[serde(default = "default_interval")]
    pub check_interval: f64,
    /// Spacing of battery samples; defaults to `check_interval`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
    #[serde(default = "default_packet_cost")]
    pub packet_cost: f64,
    /// Energy a monitor spends inspecting one packet; defaults to `packet_cost`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inspection_cost: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<FeatureRanges>,
}

fn invalid(path: impl Into<String>, msg: impl Into<String>) -> SimError {
    SimError::ScenarioInvalid { path: path.into(), msg: msg.into() }
}

fn check_time(path: &str, v: f64) -> Result<(), SimError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(path, format!("must be a finite non-negative number, got {v}")))
    }
}

fn check_positive(path: &str, v: f64) -> Result<(), SimError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(path, format!("must be a finite positive number, got {v}")))
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(path, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Loads the topology (relative paths resolve against `base`), fills in
    /// default batteries and validates every field.
    pub fn resolve(&self, base: Option<&Path>) -> Result<ResolvedScenario, SimError> {
        let graph = match (&self.topology, self.edges.is_empty()) {
            (Some(_), false) => return Err(invalid("edges", "give either `topology` or `edges`, not both")),
            (None, true) => return Err(invalid("edges", "no topology given")),
            (Some(p), true) => {
                let full = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| invalid("topology", format!("{}: {e}", full.display())))?;
                Graph::parse(&text).map_err(|e| invalid("topology", e.to_string()))?
            }
            (None, false) => {
                let pairs: Vec<(u32, u32)> = self.edges.iter().map(|[a, b]| (*a, *b)).collect();
                Graph::from_edges(&pairs).map_err(|e| invalid("edges", e.to_string()))?
            }
        };

        check_positive("monitoring_overhead", self.monitoring_overhead)?;
        if self.monitoring_overhead < 1.0 {
            return Err(invalid("monitoring_overhead", "must be at least 1"));
        }
        let threshold = PlaneValue::new(self.threshold)
            .ok_or_else(|| invalid("threshold", format!("must be a finite non-negative number, got {}", self.threshold)))?;
        check_time("duration", self.duration)?;
        check_positive("check_interval", self.check_interval)?;
        let sample_interval = self.sample_interval.unwrap_or(self.check_interval);
        check_positive("sample_interval", sample_interval)?;
        check_time("packet_cost", self.packet_cost)?;
        let inspection_cost = self.inspection_cost.unwrap_or(self.packet_cost);
        check_time("inspection_cost", inspection_cost)?;
        let r_max = self.r_max.unwrap_or_else(|| default_r_max(&graph).max(self.r0));
        if r_max < self.r0 {
            return Err(invalid("r_max", format!("must be at least r0 ({})", self.r0.get())));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut batteries = BTreeMap::new();
        for (&id, b) in &self.batteries {
            if !graph.contains(id) {
                return Err(invalid(format!("batteries.{id}"), "node is not in the topology"));
            }
            batteries.insert(id, self.complete_battery(format!("batteries.{id}"), b)?);
        }
        for id in graph.nodes() {
            if batteries.contains_key(&id) {
                continue;
            }
            let bpr = self
                .default_bpr
                .ok_or_else(|| invalid(format!("batteries.{id}"), "missing, and no default_bpr given"))?;
            let tec = rng.random_range(TEC_RANGE_W.0..=TEC_RANGE_W.1);
            let b = BatteryState::with_overhead(bpr, tec, self.monitoring_overhead)
                .map_err(|e| invalid("default_bpr", e.to_string()))?;
            batteries.insert(id, b);
        }

        // nodes that exist at a given time: initial ones plus earlier joins
        let mut joins: Vec<(usize, &JoinSpec)> = self.joins.iter().enumerate().collect();
        joins.sort_by(|a, b| a.1.time.total_cmp(&b.1.time).then(a.0.cmp(&b.0)));
        let mut present: BTreeSet<NodeId> = graph.node_set();
        let mut join_times: BTreeMap<NodeId, f64> = BTreeMap::new();
        let mut resolved_joins = Vec::new();
        for (i, j) in joins {
            let path = format!("joins[{i}]");
            check_time(&format!("{path}.time"), j.time)?;
            if present.contains(&j.node) {
                return Err(invalid(format!("{path}.node"), format!("node {} already exists", j.node)));
            }
            for (k, l) in j.links.iter().enumerate() {
                if !present.contains(l) {
                    return Err(invalid(format!("{path}.links[{k}]"), format!("node {l} does not exist at time {}", j.time)));
                }
            }
            let battery = self.complete_battery(format!("{path}.battery"), &j.battery)?;
            present.insert(j.node);
            join_times.insert(j.node, j.time);
            resolved_joins.push(JoinSpec { battery, ..j.clone() });
        }
        let exists_at = |n: NodeId, t: f64| graph.contains(n) || join_times.get(&n).is_some_and(|&jt| jt <= t);

        for (i, f) in self.flows.iter().enumerate() {
            let path = format!("flows[{i}]");
            check_time(&format!("{path}.start"), f.start)?;
            if let Some(end) = f.end {
                check_time(&format!("{path}.end"), end)?;
                if end < f.start {
                    return Err(invalid(format!("{path}.end"), "ends before it starts"));
                }
            }
            if !(0.0..=1.0).contains(&f.intrusion_fraction) {
                return Err(invalid(format!("{path}.intrusion_fraction"), "must lie in [0, 1]"));
            }
            for (field, n) in [("source", f.source), ("destination", f.destination)] {
                if !exists_at(n, f.start) {
                    return Err(invalid(format!("{path}.{field}"), format!("node {n} does not exist at time {}", f.start)));
                }
            }
        }

        if let Some(fr) = &self.features {
            if fr.benign.is_empty() || fr.benign.len() != fr.anomalous.len() {
                return Err(invalid("features", "benign and anomalous need the same, non-zero number of ranges"));
            }
            for (name, ranges) in [("benign", &fr.benign), ("anomalous", &fr.anomalous)] {
                for (k, [lo, hi]) in ranges.iter().enumerate() {
                    if !(0.0 <= *lo && lo <= hi && *hi <= 1.0) {
                        return Err(invalid(format!("features.{name}[{k}]"), "need 0 <= low <= high <= 1"));
                    }
                }
            }
        }

        Ok(ResolvedScenario {
            nodes: graph.nodes().collect(),
            edges: graph.edges().map(|e| (e.0, e.1)).collect(),
            graph,
            batteries,
            threshold,
            r0: self.r0,
            r_max,
            duration: self.duration,
            flows: self.flows.clone(),
            joins: resolved_joins,
            check_interval: self.check_interval,
            sample_interval,
            packet_cost: self.packet_cost,
            inspection_cost,
            seed: self.seed,
            mode: self.mode,
            features: self.features.clone(),
        })
    }

    fn complete_battery(&self, path: String, b: &BatteryState) -> Result<BatteryState, SimError> {
        let full = BatteryState { tec_nm: Some(b.tec_nm.unwrap_or(b.tec * self.monitoring_overhead)), ..*b };
        full.validate().map_err(|e| invalid(path, e.to_string()))?;
        Ok(full)
    }
}

/// A validated scenario with its topology loaded and every battery filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedScenario {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<(NodeId, NodeId)>,
    #[serde(skip)]
    pub graph: Graph,
    /// Every battery carries a monitoring rate.
    pub batteries: BTreeMap<NodeId, BatteryState>,
    pub threshold: PlaneValue,
    pub r0: HopRadius,
    pub r_max: HopRadius,
    pub duration: f64,
    pub flows: Vec<FlowSpec>,
    /// Sorted by time.
    pub joins: Vec<JoinSpec>,
    pub check_interval: f64,
    pub sample_interval: f64,
    pub packet_cost: f64,
    pub inspection_cost: f64,
    pub seed: u64,
    pub mode: Mode,
    pub features: Option<FeatureRanges>,
}

impl ResolvedScenario {
    /// Fingerprint of everything but the mode, so the two runs of one
    /// comparison share it.
    pub fn hash(&self) -> String {
        let mut normalized = self.clone();
        normalized.mode = Mode::Phids;
        let json = serde_json::to_vec(&normalized).expect("scenario serializes");
        Sha256::digest(&json).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        ResolvedScenario { mode, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "edges": [[1, 2], [2, 3]],
        "default_bpr": 100.0,
        "threshold": 0.0,
        "duration": 10.0,
        "seed": 4
    }"#;

    fn with(extra: &str) -> String {
        BASE.replacen('{', &format!("{{ {extra},"), 1)
    }

    #[test]
    fn minimal_scenario_resolves() {
        let s = Scenario::from_json(BASE).unwrap();
        let r = s.resolve(None).unwrap();
        assert_eq!(r.batteries.len(), 3);
        for b in r.batteries.values() {
            assert!((TEC_RANGE_W.0..=TEC_RANGE_W.1).contains(&b.tec));
            assert!((b.tec_nm.unwrap() - b.tec * 1.15).abs() < 1e-12);
        }
        assert_eq!(r.r0, HopRadius::ONE);
        assert_eq!(r.sample_interval, 1.0);
        assert_eq!(r, Scenario::from_json(BASE).unwrap().resolve(None).unwrap());
    }

    #[test]
    fn bad_seed_type_names_the_field() {
        let err = Scenario::from_json(&BASE.replace("\"seed\": 4", "\"seed\": \"four\"")).unwrap_err();
        assert!(matches!(err, SimError::ScenarioInvalid { ref path, .. } if path == "seed"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let err = Scenario::from_json(&with(r#""colour": 3"#)).unwrap_err();
        assert!(matches!(err, SimError::ScenarioInvalid { .. }));
        let err = Scenario::from_json(&with(r#""flows": [{"source": 1, "destination": 3, "rate": 1, "speed": 2}]"#))
            .unwrap_err();
        assert!(matches!(err, SimError::ScenarioInvalid { ref path, .. } if path.starts_with("flows[0]")), "{err}");
    }

    #[test]
    fn validation_paths() {
        let cases = [
            (r#""flows": [{"source": 1, "destination": 9, "rate": 1}]"#, "flows[0].destination"),
            (r#""flows": [{"source": 1, "destination": 3, "rate": 1, "start": 5, "end": 2}]"#, "flows[0].end"),
            (r#""joins": [{"time": 1, "node": 2, "links": [1], "battery": {"bpr": 1, "tec": 1}}]"#, "joins[0].node"),
            (r#""joins": [{"time": 1, "node": 7, "links": [8], "battery": {"bpr": 1, "tec": 1}}]"#, "joins[0].links[0]"),
            (r#""batteries": {"1": {"bpr": -1, "tec": 1}}"#, "batteries.1"),
            (r#""check_interval": 0"#, "check_interval"),
        ];
        for (extra, want) in cases {
            let err = Scenario::from_json(&with(extra)).unwrap().resolve(None).unwrap_err();
            assert!(matches!(err, SimError::ScenarioInvalid { ref path, .. } if path == want), "{extra}: {err}");
        }
        let no_default = BASE.replace("\"default_bpr\": 100.0,", "");
        let err = Scenario::from_json(&no_default).unwrap().resolve(None).unwrap_err();
        assert!(matches!(err, SimError::ScenarioInvalid { ref path, .. } if path == "batteries.1"));
    }

    #[test]
    fn flow_may_use_a_node_after_it_joins() {
        let s = with(
            r#""joins": [{"time": 2, "node": 7, "links": [3], "battery": {"bpr": 1, "tec": 1}}],
               "flows": [{"source": 7, "destination": 1, "rate": 1, "start": 2}]"#,
        );
        assert!(Scenario::from_json(&s).unwrap().resolve(None).is_ok());
        let early = s.replace("\"start\": 2", "\"start\": 1");
        assert!(Scenario::from_json(&early).unwrap().resolve(None).is_err());
    }

    #[test]
    fn hash_ignores_mode_only() {
        let r = Scenario::from_json(BASE).unwrap().resolve(None).unwrap();
        assert_eq!(r.hash(), r.with_mode(Mode::SpaidBaseline).hash());
        let other = Scenario::from_json(&BASE.replace("\"seed\": 4", "\"seed\": 5")).unwrap().resolve(None).unwrap();
        assert_ne!(r.hash(), other.hash());
    }

    #[test]
    fn topology_file_resolves_relative_to_base() {
        let dir = std::env::temp_dir().join(format!("phids-scenario-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("net.topo"), "1 2\n2 3\n").unwrap();
        let s = BASE.replace("\"edges\": [[1, 2], [2, 3]]", "\"topology\": \"net.topo\"");
        let r = Scenario::from_json(&s).unwrap().resolve(Some(&dir)).unwrap();
        assert_eq!(r.graph.len(), 3);
        std::fs::remove_dir_all(&dir).ok();
    }
}
