use serde::{Deserialize, Serialize};

use super::{MetricsTimeline, Mode, ReelectionKind, SimError};

/// Per-mode totals of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub reelections: usize,
    pub intra_cluster: usize,
    pub full_reruns: usize,
    pub nodes_touched: usize,
    pub monitoring_energy: f64,
    pub min_residual_bpr: f64,
    pub g_s: f64,
}

impl ModeSummary {
    pub fn of(tl: &MetricsTimeline) -> Self {
        ModeSummary {
            mode: tl.mode,
            reelections: tl.events.len(),
            intra_cluster: tl.count(ReelectionKind::IntraCluster),
            full_reruns: tl.count(ReelectionKind::FullRerun),
            nodes_touched: tl.total_nodes_touched(),
            monitoring_energy: tl.monitoring_energy,
            min_residual_bpr: tl.min_residual_bpr(),
            g_s: tl.g_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario_hash: String,
    pub seed: u64,
    pub phids: ModeSummary,
    pub spaid: ModeSummary,
}

/// Side-by-side totals for two runs of one scenario that differ only in mode.
pub fn compare(phids: &MetricsTimeline, spaid: &MetricsTimeline) -> Result<ComparisonReport, SimError> {
    if phids.scenario_hash != spaid.scenario_hash || phids.seed != spaid.seed {
        return Err(SimError::IncompatibleRuns(format!(
            "scenario {} (seed {}) vs {} (seed {})",
            phids.scenario_hash, phids.seed, spaid.scenario_hash, spaid.seed
        )));
    }
    if phids.mode != Mode::Phids || spaid.mode != Mode::SpaidBaseline {
        return Err(SimError::IncompatibleRuns(format!(
            "expected a phids and a spaid_baseline run, got {} and {}",
            phids.mode, spaid.mode
        )));
    }
    Ok(ComparisonReport {
        scenario_hash: phids.scenario_hash.clone(),
        seed: phids.seed,
        phids: ModeSummary::of(phids),
        spaid: ModeSummary::of(spaid),
    })
}

/// Results document written by a simulation run, with flat tables derived
/// from it for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario_hash: String,
    pub seed: u64,
    pub runs: Vec<MetricsTimeline>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
}

fn table<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

impl RunReport {
    pub fn new(runs: Vec<MetricsTimeline>) -> Result<Self, SimError> {
        let first = runs.first().ok_or_else(|| SimError::IncompatibleRuns("no runs".into()))?;
        let (scenario_hash, seed) = (first.scenario_hash.clone(), first.seed);
        if runs.iter().any(|r| r.scenario_hash != scenario_hash || r.seed != seed) {
            return Err(SimError::IncompatibleRuns("runs come from different scenarios".into()));
        }
        let phids = runs.iter().find(|r| r.mode == Mode::Phids);
        let spaid = runs.iter().find(|r| r.mode == Mode::SpaidBaseline);
        let comparison = match (phids, spaid) {
            (Some(p), Some(s)) => Some(compare(p, s)?),
            _ => None,
        };
        Ok(RunReport { scenario_hash, seed, runs, comparison })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// `(file name, csv text)` pairs.
    pub fn tables(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let tag = format!("{}-{}", self.scenario_hash, self.seed);
        out.push((
            "monitors.csv".into(),
            table(
                &["scenario", "mode", "time", "monitors"],
                self.runs.iter().flat_map(|r| {
                    r.monitor_sets.iter().map(|m| {
                        let ids: Vec<String> = m.monitors.iter().map(ToString::to_string).collect();
                        (tag.clone(), r.mode.to_string(), m.time, ids.join(" "))
                    })
                }),
            ),
        ));
        out.push((
            "bpr.csv".into(),
            table(
                &["scenario", "mode", "time", "node", "bpr_j", "monitoring_energy_j"],
                self.runs.iter().flat_map(|r| {
                    r.bpr_samples.iter().flat_map(|s| {
                        s.bpr.iter().map(|(n, b)| (tag.clone(), r.mode.to_string(), s.time, n.0, *b, s.monitoring_energy))
                    })
                }),
            ),
        ));
        out.push((
            "events.csv".into(),
            table(
                &["scenario", "mode", "time", "kind", "cluster", "previous_root", "new_root", "nodes_touched", "feasible", "coverage_ok"],
                self.runs.iter().flat_map(|r| {
                    r.events.iter().map(|e| {
                        let kind = match e.kind {
                            ReelectionKind::IntraCluster => "intra_cluster",
                            ReelectionKind::FullRerun => "full_rerun",
                            ReelectionKind::Attach => "attach",
                        };
                        (
                            tag.clone(),
                            r.mode.to_string(),
                            e.time,
                            kind,
                            e.cluster.map(|c| c.0),
                            e.previous_root.map(|n| n.0),
                            e.new_root.map(|n| n.0),
                            e.nodes_touched,
                            e.feasible,
                            e.coverage_ok,
                        )
                    })
                }),
            ),
        ));
        if let Some(c) = &self.comparison {
            out.push((
                "comparison.csv".into(),
                table(
                    &[
                        "scenario",
                        "mode",
                        "reelections",
                        "intra_cluster",
                        "full_reruns",
                        "nodes_touched",
                        "monitoring_energy_j",
                        "min_residual_bpr_j",
                        "g_s",
                    ],
                    [&c.phids, &c.spaid].into_iter().map(|s| {
                        (
                            tag.clone(),
                            s.mode.to_string(),
                            s.reelections,
                            s.intra_cluster,
                            s.full_reruns,
                            s.nodes_touched,
                            s.monitoring_energy,
                            s.min_residual_bpr,
                            s.g_s,
                        )
                    }),
                ),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run, Scenario};

    fn scenario(extra: &str) -> crate::sim::ResolvedScenario {
        let json = format!(
            r#"{{ "edges": [[1, 2], [2, 3], [3, 4], [4, 5]], "default_bpr": 50.0, "threshold": 0.0, "seed": 2, {extra} }}"#
        );
        Scenario::from_json(&json).unwrap().resolve(None).unwrap()
    }

    #[test]
    fn identical_idle_runs_give_identical_reports() {
        let sc = scenario(r#""duration": 0"#);
        let p = run(&sc).unwrap();
        let s = run(&sc.with_mode(Mode::SpaidBaseline)).unwrap();
        let c = compare(&p, &s).unwrap();
        assert_eq!(ModeSummary { mode: Mode::Phids, ..c.spaid.clone() }, c.phids);
        assert_eq!(c.phids.nodes_touched, 0);
    }

    #[test]
    fn different_scenarios_are_rejected() {
        let p = run(&scenario(r#""duration": 0"#)).unwrap();
        let s = run(&scenario(r#""duration": 1"#).with_mode(Mode::SpaidBaseline)).unwrap();
        assert!(matches!(compare(&p, &s), Err(SimError::IncompatibleRuns(_))));
        assert!(matches!(compare(&p, &p), Err(SimError::IncompatibleRuns(_))));
    }

    #[test]
    fn report_round_trips_and_tables_are_stable() {
        let sc = scenario(r#""duration": 20, "flows": [{"source": 1, "destination": 5, "rate": 3}]"#);
        let runs = vec![run(&sc).unwrap(), run(&sc.with_mode(Mode::SpaidBaseline)).unwrap()];
        let report = RunReport::new(runs).unwrap();
        let back = RunReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back.tables(), report.tables());
        let names: Vec<String> = report.tables().into_iter().map(|t| t.0).collect();
        assert_eq!(names, ["monitors.csv", "bpr.csv", "events.csv", "comparison.csv"]);
        let again = RunReport::new(vec![run(&sc).unwrap(), run(&sc.with_mode(Mode::SpaidBaseline)).unwrap()]).unwrap();
        assert_eq!(again.tables(), report.tables());
        let bpr = &report.tables()[1].1;
        assert!(bpr.starts_with("scenario,mode,time,node,bpr_j"));
        assert_eq!(bpr.lines().count(), 1 + 2 * 21 * 5);
    }
}
