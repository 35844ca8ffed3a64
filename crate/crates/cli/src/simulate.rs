use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use phids_core::detector::FcaClassifierModel;
use phids_core::sim::{run_with_detector, MetricsTimeline, Mode, ReelectionKind, RunReport, Scenario};
use phids_core::HopRadius;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Phids,
    Spaid,
    Both,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Directory for report.json and the CSV tables.
    #[arg(long, default_value = "phids-report")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the scenario PLANE threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Overrides the scenario's initial hop radius.
    #[arg(long)]
    radius: Option<u32>,
    /// Classifier applied to simulated packets.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Report holding the PHIDS run.
    phids: PathBuf,
    /// Report holding the SPAID baseline run.
    spaid: PathBuf,
    /// Directory for comparison.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// A report.json written by `simulate`.
    report: PathBuf,
    /// Directory for the regenerated tables.
    #[arg(long, default_value = "phids-report")]
    out: PathBuf,
}

fn summary(tl: &MetricsTimeline) -> String {
    format!(
        "{}: {} re-elections ({} intra-cluster, {} full re-runs), {} nodes touched, G_s {:.3}, monitoring energy {:.3} J",
        tl.mode,
        tl.events.len(),
        tl.count(ReelectionKind::IntraCluster),
        tl.count(ReelectionKind::FullRerun),
        tl.total_nodes_touched(),
        tl.g_s,
        tl.monitoring_energy
    )
}

fn write_report(report: &RunReport, out: &Path, with_json: bool) -> anyhow::Result<()> {
    if with_json {
        crate::write(&out.join("report.json"), &report.to_json())?;
    }
    for (name, text) in report.tables() {
        crate::write(&out.join(name), &text)?;
    }
    Ok(())
}

fn print_comparison(report: &RunReport) {
    if let Some(c) = &report.comparison {
        println!(
            "nodes touched: phids {} vs spaid_baseline {}; re-elections: {} vs {}",
            c.phids.nodes_touched, c.spaid.nodes_touched, c.phids.reelections, c.spaid.reelections
        );
    }
}

pub fn simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let mut sc = Scenario::from_json(&crate::read(&a.scenario)?)?;
    if let Some(s) = a.seed {
        sc.seed = s;
    }
    if let Some(t) = a.threshold {
        sc.threshold = t;
    }
    if let Some(r) = a.radius {
        sc.r0 = HopRadius::new(r).context("--radius must be at least 1")?;
    }
    let resolved = sc.resolve(a.scenario.parent())?;
    let model = match &a.model {
        Some(p) => Some(FcaClassifierModel::from_json(&crate::read(p)?).with_context(|| p.display().to_string())?),
        None => None,
    };
    let modes: &[Mode] = match a.mode {
        ModeArg::Phids => &[Mode::Phids],
        ModeArg::Spaid => &[Mode::SpaidBaseline],
        ModeArg::Both => &[Mode::Phids, Mode::SpaidBaseline],
    };
    let runs: Vec<MetricsTimeline> = std::thread::scope(|s| {
        let handles: Vec<_> = modes
            .iter()
            .map(|&m| {
                let sc = resolved.with_mode(m);
                let model = model.as_ref();
                s.spawn(move || run_with_detector(&sc, model))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread")).collect::<Result<_, _>>()
    })?;
    let report = RunReport::new(runs)?;
    write_report(&report, &a.out, true)?;
    println!("scenario {} seed {}", report.scenario_hash, report.seed);
    for r in &report.runs {
        println!("{}", summary(r));
        let d = r.packets.detection;
        if d.total() > 0 {
            let m = d.metrics();
            println!("  detector: {} packets, accuracy {:.4}", d.total(), m.accuracy);
        }
    }
    print_comparison(&report);
    println!("wrote {}", a.out.display());
    Ok(())
}

fn load(path: &PathBuf) -> anyhow::Result<RunReport> {
    RunReport::from_json(&crate::read(path)?).with_context(|| path.display().to_string())
}

fn pick(report: RunReport, mode: Mode, path: &Path) -> anyhow::Result<MetricsTimeline> {
    match report.runs.into_iter().find(|r| r.mode == mode) {
        Some(r) => Ok(r),
        None => bail!("{} holds no {mode} run", path.display()),
    }
}

pub fn compare(a: CompareArgs) -> anyhow::Result<()> {
    let phids = pick(load(&a.phids)?, Mode::Phids, &a.phids)?;
    let spaid = pick(load(&a.spaid)?, Mode::SpaidBaseline, &a.spaid)?;
    let report = RunReport::new(vec![phids, spaid])?;
    let c = report.comparison.as_ref().expect("both modes present");
    println!("{}", serde_json::to_string_pretty(c)?);
    if let Some(out) = &a.out {
        write_report(&report, out, false)?;
    }
    Ok(())
}

pub fn report(a: ReportArgs) -> anyhow::Result<()> {
    let report = load(&a.report)?;
    write_report(&report, &a.out, false)?;
    println!("scenario {} seed {}", report.scenario_hash, report.seed);
    for r in &report.runs {
        println!("{}", summary(r));
    }
    print_comparison(&report);
    Ok(())
}
