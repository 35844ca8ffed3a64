use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Mode, ResolvedScenario, SimError};
use crate::detector::{Confusion, FcaClassifierModel};
use crate::election::{
    build_pol, elect_monitors, intra_cluster_reelect, spaid_full_rerun, Cluster, ClusterId, ElectionError,
    ElectionOutcome, Reelection,
};
use crate::label::Label;
use crate::power::{BatteryState, PlaneValue};
use crate::topology::{Graph, HopRadius, NodeId};

/// Event kinds in tie-break priority order: at equal times power state is
/// brought up to date before any decision fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    DrainTick,
    ReelectionCheck,
    PacketBatch,
    NodeJoin,
    ElectionRerun,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Sequence number of a periodic tick or check.
    Tick(u64),
    Batch { flow: usize, index: u64 },
    Join(usize),
    Rerun(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub kind: EventKind,
    pub payload: Payload,
    seq: u64,
}

impl Eq for SimEvent {}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pops events by time, then kind priority, then insertion order.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<SimEvent>>,
    next_seq: u64,
}

impl EventQueue {
    pub fn push(&mut self, time: f64, kind: EventKind, payload: Payload) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(SimEvent { time, kind, payload, seq }));
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop().map(|Reverse(e)| e)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReelectionKind {
    /// Root handed over inside one cluster.
    IntraCluster,
    /// Election re-run over the whole network.
    FullRerun,
    /// A joining node attached to an existing monitor.
    Attach,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReelectionRecord {
    pub time: f64,
    pub kind: ReelectionKind,
    /// The cluster that was repaired, or whose check caused a full re-run.
    pub cluster: Option<ClusterId>,
    pub previous_root: Option<NodeId>,
    pub new_root: Option<NodeId>,
    pub nodes_touched: usize,
    /// Size of the affected cluster, or of the network for a full re-run.
    pub scope: usize,
    /// False when a full re-run found no feasible selection and the previous
    /// clusters were kept.
    pub feasible: bool,
    pub coverage_ok: bool,
    pub cause: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSnapshot {
    pub time: f64,
    pub monitors: Vec<NodeId>,
    pub clusters: Vec<Cluster>,
    pub hop_radius: HopRadius,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BprSample {
    pub time: f64,
    pub bpr: BTreeMap<NodeId, f64>,
    /// Energy spent so far on monitoring: the monitoring rate over time held
    /// as monitor plus packet inspection, ignoring depletion.
    pub monitoring_energy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PacketStats {
    pub routed: u64,
    /// Packets whose endpoints were disconnected.
    pub dropped: u64,
    /// Detector verdicts against ground truth, when a model was configured.
    pub detection: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTimeline {
    pub mode: Mode,
    pub seed: u64,
    pub scenario_hash: String,
    pub duration: f64,
    pub initial: ElectionOutcome,
    pub events: Vec<ReelectionRecord>,
    pub monitor_sets: Vec<MonitorSnapshot>,
    pub bpr_samples: Vec<BprSample>,
    pub final_bpr: BTreeMap<NodeId, f64>,
    pub monitoring_energy: f64,
    /// Time-averaged number of monitors.
    pub g_s: f64,
    pub packets: PacketStats,
}

impl MetricsTimeline {
    pub fn total_nodes_touched(&self) -> usize {
        self.events.iter().map(|e| e.nodes_touched).sum()
    }

    pub fn count(&self, kind: ReelectionKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Lowest battery level seen in any sample or at the end.
    pub fn min_residual_bpr(&self) -> f64 {
        self.bpr_samples
            .iter()
            .flat_map(|s| s.bpr.values())
            .chain(self.final_bpr.values())
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn final_monitors(&self) -> &[NodeId] {
        self.monitor_sets.last().map_or(&[], |m| &m.monitors)
    }
}

/// Closed-form battery bookkeeping: the level at `t` is the initial level
/// minus time spent in each role times that role's rate, minus per-packet
/// charges.
#[derive(Debug, Clone)]
struct NodeEnergy {
    battery: BatteryState,
    /// Closed time spent monitoring and not monitoring.
    monitor_time: f64,
    idle_time: f64,
    since: f64,
    monitoring: bool,
    packets: u64,
    inspections: u64,
}

impl NodeEnergy {
    fn new(battery: BatteryState, t: f64) -> Self {
        NodeEnergy { battery, monitor_time: 0.0, idle_time: 0.0, since: t, monitoring: false, packets: 0, inspections: 0 }
    }

    fn times_at(&self, t: f64) -> (f64, f64) {
        let open = t - self.since;
        if self.monitoring {
            (self.monitor_time + open, self.idle_time)
        } else {
            (self.monitor_time, self.idle_time + open)
        }
    }

    fn bpr_at(&self, t: f64, packet_cost: f64, inspection_cost: f64) -> f64 {
        let (mon, idle) = self.times_at(t);
        let used = self.battery.monitoring_rate() * mon
            + self.battery.tec * idle
            + self.packets as f64 * packet_cost
            + self.inspections as f64 * inspection_cost;
        (self.battery.bpr - used).max(0.0)
    }

    fn monitoring_energy_at(&self, t: f64, inspection_cost: f64) -> f64 {
        self.battery.monitoring_rate() * self.times_at(t).0 + self.inspections as f64 * inspection_cost
    }
}

struct Engine<'a> {
    sc: &'a ResolvedScenario,
    detector: Option<(&'a FcaClassifierModel, &'a super::FeatureRanges)>,
    graph: Graph,
    energy: BTreeMap<NodeId, NodeEnergy>,
    clusters: Vec<Cluster>,
    radius: HopRadius,
    /// Set after an infeasible re-run; cleared by a join.
    stalled: bool,
    rng: ChaCha8Rng,
    queue: EventQueue,
    gs_area: f64,
    gs_mark: (f64, usize),
    out: MetricsTimeline,
}

impl<'a> Engine<'a> {
    fn bpr(&self, n: NodeId, t: f64) -> f64 {
        self.energy[&n].bpr_at(t, self.sc.packet_cost, self.sc.inspection_cost)
    }

    fn battery_at(&self, n: NodeId, t: f64) -> BatteryState {
        BatteryState { bpr: self.bpr(n, t), ..self.energy[&n].battery }
    }

    fn plane_at(&self, n: NodeId, t: f64) -> PlaneValue {
        self.battery_at(n, t).effective_plane()
    }

    fn set_role(&mut self, n: NodeId, t: f64, monitoring: bool) {
        let e = self.energy.get_mut(&n).expect("known node");
        if e.monitoring == monitoring {
            return;
        }
        (e.monitor_time, e.idle_time) = e.times_at(t);
        e.since = t;
        e.monitoring = monitoring;
    }

    fn monitoring_energy(&self, t: f64) -> f64 {
        self.energy.values().map(|e| e.monitoring_energy_at(t, self.sc.inspection_cost)).sum()
    }

    fn monitors(&self) -> BTreeSet<NodeId> {
        self.clusters.iter().map(|c| c.root).collect()
    }

    fn coverage_ok(&self) -> bool {
        self.graph.coverage_gap(&self.monitors(), self.radius).is_empty()
    }

    fn sample(&mut self, t: f64) {
        let bpr = self.energy.keys().map(|&n| (n, self.bpr(n, t))).collect();
        let monitoring_energy = self.monitoring_energy(t);
        self.out.bpr_samples.push(BprSample { time: t, bpr, monitoring_energy });
    }

    fn snapshot_monitors(&mut self, t: f64) {
        let monitors: Vec<NodeId> = self.monitors().into_iter().collect();
        if self.out.monitor_sets.last().is_some_and(|m| m.clusters == self.clusters && m.hop_radius == self.radius) {
            return;
        }
        let (since, count) = self.gs_mark;
        self.gs_area += count as f64 * (t - since);
        self.gs_mark = (t, monitors.len());
        self.out.monitor_sets.push(MonitorSnapshot { time: t, monitors, clusters: self.clusters.clone(), hop_radius: self.radius });
    }

    fn record(&mut self, mut r: ReelectionRecord) {
        r.coverage_ok = self.coverage_ok();
        self.snapshot_monitors(r.time);
        self.out.events.push(r);
    }

    fn adopt(&mut self, t: f64, outcome: &ElectionOutcome) {
        let next = outcome.monitors();
        let nodes: Vec<NodeId> = self.energy.keys().copied().collect();
        for n in nodes {
            self.set_role(n, t, next.contains(&n));
        }
        self.clusters = outcome.clusters.clone();
        self.radius = outcome.hop_radius_used;
    }

    /// `trigger` is the cluster whose check asked for the re-run, with its root.
    fn full_rerun(&mut self, t: f64, trigger: Option<(ClusterId, NodeId)>, cause: String) -> Result<(), SimError> {
        let planes: BTreeMap<NodeId, PlaneValue> = self.graph.nodes().map(|n| (n, self.plane_at(n, t))).collect();
        let scope = self.graph.len();
        let record = |feasible: bool, coverage_ok: bool| ReelectionRecord {
            time: t,
            kind: ReelectionKind::FullRerun,
            cluster: trigger.map(|c| c.0),
            previous_root: trigger.map(|c| c.1),
            new_root: None,
            nodes_touched: scope,
            scope,
            feasible,
            coverage_ok,
            cause: cause.clone(),
        };
        match spaid_full_rerun(&self.graph, &planes, self.sc.threshold, self.sc.r0, self.sc.r_max) {
            Ok(outcome) => {
                self.adopt(t, &outcome);
                self.stalled = false;
                self.record(record(true, true));
            }
            Err(ElectionError::NoFeasibleSelection { .. }) => {
                self.stalled = true;
                self.record(record(false, true));
            }
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }

    /// Both modes look for the same condition in every cluster: a member
    /// eligible to lead holds more battery than the root, or the root can no
    /// longer lead. PHIDS repairs the cluster in place; SPAID re-runs the
    /// whole election.
    fn check(&mut self, t: f64) -> Result<(), SimError> {
        if self.stalled {
            return Ok(());
        }
        for idx in 0..self.clusters.len() {
            let c = self.clusters[idx].clone();
            let levels: BTreeMap<NodeId, BatteryState> = c.members().map(|m| (m, self.battery_at(m, t))).collect();
            let verdict = intra_cluster_reelect(&self.graph, &c, &levels, self.sc.threshold, self.radius)?;
            match (self.sc.mode, verdict) {
                (_, Reelection::Unchanged) => {}
                (Mode::Phids, Reelection::Rotated(next)) => {
                    self.set_role(c.root, t, false);
                    self.set_role(next.root, t, true);
                    let new_root = next.root;
                    self.clusters[idx] = next;
                    self.record(ReelectionRecord {
                        time: t,
                        kind: ReelectionKind::IntraCluster,
                        cluster: Some(c.id),
                        previous_root: Some(c.root),
                        new_root: Some(new_root),
                        nodes_touched: c.size(),
                        scope: c.size(),
                        feasible: true,
                        coverage_ok: true,
                        cause: format!("root {} handed over to {new_root}", c.root),
                    });
                }
                (Mode::Phids, Reelection::FullRerunRequired) => {
                    return self.full_rerun(t, Some((c.id, c.root)), format!("no member of cluster {} can take over", c.id.0));
                }
                (Mode::SpaidBaseline, Reelection::Rotated(next)) => {
                    return self.full_rerun(t, Some((c.id, c.root)), format!("root {} dropped below member {}", c.root, next.root));
                }
                (Mode::SpaidBaseline, Reelection::FullRerunRequired) => {
                    return self.full_rerun(t, Some((c.id, c.root)), format!("root {} can no longer lead cluster {}", c.root, c.id.0));
                }
            }
        }
        Ok(())
    }

    fn packet_batch(&mut self, flow: usize) -> Result<(), SimError> {
        let sc = self.sc;
        let f = &sc.flows[flow];
        let count = f.rate as u64;
        let Some(path) = self.graph.shortest_path(f.source, f.destination)? else {
            self.out.packets.dropped += count;
            return Ok(());
        };
        for n in &path {
            self.energy.get_mut(n).expect("path nodes exist").packets += count;
        }
        let inspecting: Vec<NodeId> =
            self.clusters.iter().filter(|c| path.iter().any(|&n| c.contains(n))).map(|c| c.root).collect();
        for m in inspecting {
            self.energy.get_mut(&m).expect("monitors exist").inspections += count;
        }
        self.out.packets.routed += count;
        if let Some((model, ranges)) = self.detector {
            for _ in 0..count {
                let actual =
                    if self.rng.random_bool(f.intrusion_fraction) { Label::Intrusion } else { Label::Normal };
                let source = if actual.is_intrusion() { &ranges.anomalous } else { &ranges.benign };
                let values: Vec<f64> = source
                    .iter()
                    .map(|&[lo, hi]| if lo < hi { self.rng.random_range(lo..=hi) } else { lo })
                    .collect();
                let predicted = model.classify_encoded(&values)?;
                self.out.packets.detection.record(predicted, actual);
            }
        }
        Ok(())
    }

    fn join(&mut self, idx: usize, t: f64) -> Result<(), SimError> {
        let sc = self.sc;
        let j = &sc.joins[idx];
        self.graph = self.graph.with_node(j.node, &j.links)?;
        self.energy.insert(j.node, NodeEnergy::new(j.battery, t));
        self.stalled = false;
        let plane = self.plane_at(j.node, t);
        let best_monitor = self.monitors().into_iter().map(|m| self.plane_at(m, t)).max_by(PlaneValue::total_cmp);
        if best_monitor.is_none_or(|b| plane > b) {
            let cause = format!("node {} joined with the highest PLANE", j.node);
            self.queue.push(t, EventKind::ElectionRerun, Payload::Rerun(cause));
            return Ok(());
        }
        let reach = self.graph.distances_from(j.node, Some(self.radius.get()))?;
        let pick = self
            .clusters
            .iter()
            .enumerate()
            .filter_map(|(i, c)| reach.get(&c.root).map(|&d| (i, c.root, d)))
            .max_by(|a, b| {
                self.plane_at(a.1, t)
                    .total_cmp(&self.plane_at(b.1, t))
                    .then(b.2.cmp(&a.2))
                    .then(b.1.cmp(&a.1))
            });
        let Some((i, root, _)) = pick else {
            let cause = format!("node {} joined out of every monitor's reach", j.node);
            self.queue.push(t, EventKind::ElectionRerun, Payload::Rerun(cause));
            return Ok(());
        };
        self.clusters[i].children.insert(j.node);
        let (cluster, scope, node) = (self.clusters[i].id, self.clusters[i].size(), j.node);
        self.record(ReelectionRecord {
            time: t,
            kind: ReelectionKind::Attach,
            cluster: Some(cluster),
            previous_root: Some(root),
            new_root: Some(root),
            nodes_touched: 2,
            scope,
            feasible: true,
            coverage_ok: true,
            cause: format!("node {node} attached to monitor {root}"),
        });
        Ok(())
    }
}

/// Runs a scenario without a detector.
pub fn run(sc: &ResolvedScenario) -> Result<MetricsTimeline, SimError> {
    run_with_detector(sc, None)
}

/// Runs a scenario; when a model is given and the scenario defines packet
/// feature ranges, every routed packet is classified.
pub fn run_with_detector(sc: &ResolvedScenario, model: Option<&FcaClassifierModel>) -> Result<MetricsTimeline, SimError> {
    let detector = match (model, &sc.features) {
        (Some(m), Some(fr)) => {
            if fr.width() != m.dictionary.width() {
                return Err(SimError::ScenarioInvalid {
                    path: "features".into(),
                    msg: format!("{} ranges, but the model expects {} features", fr.width(), m.dictionary.width()),
                });
            }
            Some((m, fr))
        }
        (Some(_), None) => {
            return Err(SimError::ScenarioInvalid {
                path: "features".into(),
                msg: "a detector model needs packet feature ranges".into(),
            })
        }
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    rng.set_stream(1);
    let energy: BTreeMap<NodeId, NodeEnergy> = sc.batteries.iter().map(|(&n, &b)| (n, NodeEnergy::new(b, 0.0))).collect();
    let planes: BTreeMap<NodeId, PlaneValue> = sc.batteries.iter().map(|(&n, b)| (n, b.effective_plane())).collect();
    let initial = elect_monitors(&sc.graph, &build_pol(&planes, sc.threshold), sc.r0, sc.r_max)?;

    let mut e = Engine {
        sc,
        detector,
        graph: sc.graph.clone(),
        energy,
        clusters: Vec::new(),
        radius: initial.hop_radius_used,
        stalled: false,
        rng,
        queue: EventQueue::default(),
        gs_area: 0.0,
        gs_mark: (0.0, 0),
        out: MetricsTimeline {
            mode: sc.mode,
            seed: sc.seed,
            scenario_hash: sc.hash(),
            duration: sc.duration,
            initial: initial.clone(),
            events: Vec::new(),
            monitor_sets: Vec::new(),
            bpr_samples: Vec::new(),
            final_bpr: BTreeMap::new(),
            monitoring_energy: 0.0,
            g_s: 0.0,
            packets: PacketStats::default(),
        },
    };
    e.adopt(0.0, &initial);
    e.snapshot_monitors(0.0);

    let end = sc.duration;
    e.queue.push(0.0, EventKind::DrainTick, Payload::Tick(0));
    if sc.check_interval <= end {
        e.queue.push(sc.check_interval, EventKind::ReelectionCheck, Payload::Tick(1));
    }
    for (i, f) in sc.flows.iter().enumerate() {
        if f.start <= end && f.end.is_none_or(|fe| f.start < fe) {
            e.queue.push(f.start, EventKind::PacketBatch, Payload::Batch { flow: i, index: 0 });
        }
    }
    for (i, j) in sc.joins.iter().enumerate() {
        if j.time <= end {
            e.queue.push(j.time, EventKind::NodeJoin, Payload::Join(i));
        }
    }

    let mut last_sample = None;
    while let Some(ev) = e.queue.pop() {
        let t = ev.time;
        match ev.payload {
            Payload::Tick(k) if ev.kind == EventKind::DrainTick => {
                e.sample(t);
                last_sample = Some(t);
                let next = (k + 1) as f64 * sc.sample_interval;
                if next <= end {
                    e.queue.push(next, EventKind::DrainTick, Payload::Tick(k + 1));
                }
            }
            Payload::Tick(k) => {
                e.check(t)?;
                let next = (k + 1) as f64 * sc.check_interval;
                if next <= end {
                    e.queue.push(next, EventKind::ReelectionCheck, Payload::Tick(k + 1));
                }
            }
            Payload::Batch { flow, index } => {
                e.packet_batch(flow)?;
                let f = &sc.flows[flow];
                let next = f.start + (index + 1) as f64;
                if next <= end && f.end.is_none_or(|fe| next < fe) {
                    e.queue.push(next, EventKind::PacketBatch, Payload::Batch { flow, index: index + 1 });
                }
            }
            Payload::Join(i) => e.join(i, t)?,
            Payload::Rerun(cause) => e.full_rerun(t, None, cause)?,
        }
    }
    if last_sample != Some(end) {
        e.sample(end);
    }
    let (since, count) = e.gs_mark;
    e.gs_area += count as f64 * (end - since);
    e.out.g_s = if end > 0.0 { e.gs_area / end } else { count as f64 };
    e.out.final_bpr = e.energy.keys().map(|&n| (n, e.bpr(n, end))).collect();
    e.out.monitoring_energy = e.monitoring_energy(end);
    Ok(e.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sim::Scenario;

    #[test]
    fn queue_orders_by_time_kind_then_insertion() {
        let mut q = EventQueue::default();
        q.push(1.0, EventKind::PacketBatch, Payload::Tick(0));
        q.push(1.0, EventKind::NodeJoin, Payload::Tick(1));
        q.push(1.0, EventKind::DrainTick, Payload::Tick(2));
        q.push(0.5, EventKind::ElectionRerun, Payload::Tick(3));
        q.push(1.0, EventKind::PacketBatch, Payload::Tick(4));
        q.push(1.0, EventKind::ReelectionCheck, Payload::Tick(5));
        let order: Vec<Payload> = std::iter::from_fn(|| q.pop()).map(|e| e.payload).collect();
        let want: Vec<Payload> = [3, 2, 5, 0, 4, 1].into_iter().map(Payload::Tick).collect();
        assert_eq!(order, want);
    }

    /// Fixture network, batteries proportional to the example PLANE values.
    fn fixture_scenario(extra: &str) -> ResolvedScenario {
        let batteries: Vec<String> = fixtures::EXAMPLE_PLANE
            .iter()
            .map(|(n, p)| format!(r#""{n}": {{"bpr": {}, "tec": 0.8, "tec_nm": 1.0}}"#, p * 1000.0))
            .collect();
        let edges: Vec<String> = fixtures::EXAMPLE_EDGES.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
        let json = format!(
            r#"{{ "edges": [{}], "batteries": {{ {} }}, "threshold": 4000.0, {extra} }}"#,
            edges.join(", "),
            batteries.join(", ")
        );
        Scenario::from_json(&json).unwrap().resolve(None).unwrap()
    }

    #[test]
    fn zero_duration_is_initial_election_only() {
        let sc = fixture_scenario(r#""duration": 0"#);
        let tl = run(&sc).unwrap();
        assert!(tl.events.is_empty());
        assert_eq!(tl.final_monitors(), &[NodeId(3), NodeId(4), NodeId(7)]);
        assert_eq!(tl.initial.monitors().into_iter().collect::<Vec<_>>(), tl.final_monitors());
        assert_eq!(tl.g_s, 3.0);
        assert_eq!(tl.bpr_samples.len(), 1);
    }

    #[test]
    fn routing_through_one_cluster_rotates_its_root() {
        let sc = fixture_scenario(
            r#""duration": 1000, "flows": [{"source": 1, "destination": 3, "rate": 1000}]"#,
        );
        let tl = run(&sc).unwrap();
        let first = &tl.events[0];
        assert_eq!(first.kind, ReelectionKind::IntraCluster);
        assert_eq!(first.nodes_touched, 3);
        assert_eq!(first.new_root, Some(NodeId(2)));
        // node 3 pays 3 W and node 2 pays 0.8 W: 9000 - 3t = 7200 - 0.8t
        let crossing: f64 = 1800.0 / 2.2;
        assert_eq!(first.time, crossing.ceil());
        assert!(tl.events.iter().all(|e| e.coverage_ok));
    }

    #[test]
    fn spaid_reruns_the_whole_network() {
        let sc = fixture_scenario(
            r#""duration": 1000, "mode": "spaid_baseline", "flows": [{"source": 1, "destination": 3, "rate": 1000}]"#,
        );
        let tl = run(&sc).unwrap();
        assert_eq!(tl.events[0].time, 819.0);
        assert!(tl.events.iter().all(|e| e.kind == ReelectionKind::FullRerun && e.nodes_touched == 9));
        assert!(tl.events.iter().all(|e| e.coverage_ok));
    }

    #[test]
    fn local_rotation_touches_fewer_nodes_for_cluster_local_traffic() {
        // Two 4-cliques bridged by 4-5; only the first carries traffic.
        let json = r#"{
            "edges": [[1,2],[1,3],[1,4],[2,3],[2,4],[3,4],[4,5],[5,6],[5,7],[5,8],[6,7],[6,8],[7,8]],
            "batteries": {
                "1": {"bpr": 5000, "tec": 0.8, "tec_nm": 1.0}, "2": {"bpr": 8300, "tec": 0.8, "tec_nm": 1.0},
                "3": {"bpr": 8200, "tec": 0.8, "tec_nm": 1.0}, "4": {"bpr": 5000, "tec": 0.8, "tec_nm": 1.0},
                "5": {"bpr": 5000, "tec": 0.8, "tec_nm": 1.0}, "6": {"bpr": 9500, "tec": 0.8, "tec_nm": 1.0},
                "7": {"bpr": 7500, "tec": 0.8, "tec_nm": 1.0}, "8": {"bpr": 5000, "tec": 0.8, "tec_nm": 1.0}
            },
            "threshold": 3000, "duration": 2000,
            "flows": [{"source": 2, "destination": 3, "rate": 1000}]
        }"#;
        let sc = Scenario::from_json(json).unwrap().resolve(None).unwrap();
        let phids = run(&sc).unwrap();
        let spaid = run(&sc.with_mode(Mode::SpaidBaseline)).unwrap();
        assert!(phids.count(ReelectionKind::IntraCluster) > 0);
        assert!(phids.events.iter().all(|e| e.previous_root.is_some_and(|r| r.0 <= 4)));
        assert!(phids.total_nodes_touched() < spaid.total_nodes_touched());
        for e in phids.events.iter().filter(|e| e.kind == ReelectionKind::IntraCluster) {
            assert_eq!(e.nodes_touched, e.scope);
        }
    }

    #[test]
    fn high_plane_join_forces_full_rerun() {
        let sc = fixture_scenario(
            r#""duration": 5, "joins": [{"time": 2, "node": 10, "links": [4], "battery": {"bpr": 10000, "tec": 0.8, "tec_nm": 1.0}}]"#,
        );
        let tl = run(&sc).unwrap();
        assert_eq!(tl.events.len(), 1);
        assert_eq!(tl.events[0].kind, ReelectionKind::FullRerun);
        assert_eq!(tl.events[0].nodes_touched, 10);
        assert_eq!(tl.events[0].time, 2.0);
        assert!(tl.events[0].coverage_ok);
    }

    #[test]
    fn low_plane_join_attaches() {
        let sc = fixture_scenario(
            r#""duration": 5, "joins": [{"time": 2, "node": 10, "links": [4, 7], "battery": {"bpr": 5000, "tec": 0.8, "tec_nm": 1.0}}]"#,
        );
        let tl = run(&sc).unwrap();
        assert_eq!(tl.events.len(), 1);
        let e = &tl.events[0];
        assert_eq!((e.kind, e.nodes_touched, e.new_root), (ReelectionKind::Attach, 2, Some(NodeId(4))));
        assert!(e.coverage_ok);
    }

    #[test]
    fn runs_repeat_exactly() {
        let sc = fixture_scenario(
            r#""duration": 300, "default_bpr": 1.0, "flows": [{"source": 5, "destination": 9, "rate": 50}]"#,
        );
        assert_eq!(run(&sc).unwrap(), run(&sc).unwrap());
    }

    #[test]
    fn monitor_drain_matches_rate() {
        // no traffic: every node loses its own constant rate
        let sc = fixture_scenario(r#""duration": 100"#);
        let tl = run(&sc).unwrap();
        for (n, b) in &sc.batteries {
            let rate = if tl.final_monitors().contains(n) { b.tec_nm.unwrap() } else { b.tec };
            assert!((tl.final_bpr[n] - (b.bpr - rate * 100.0)).abs() < 1e-9);
        }
        assert!((tl.monitoring_energy - 300.0).abs() < 1e-9);
    }
}
