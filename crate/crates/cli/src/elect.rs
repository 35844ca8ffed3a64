use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use phids_core::{build_pol, elect_monitors, parse_plane_table, Graph, HopRadius, PlaneValue};

#[derive(Args)]
pub struct ElectArgs {
    /// Topology file: one `a b` edge or `node a` declaration per line.
    topology: PathBuf,
    /// File of `node value` PLANE pairs.
    #[arg(long, conflicts_with = "plane_values")]
    plane: Option<PathBuf>,
    /// Inline PLANE values, e.g. `1=5.5,2=7.2`.
    #[arg(long)]
    plane_values: Option<String>,
    /// Minimum PLANE for a monitor candidate.
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Initial hop radius.
    #[arg(long, default_value_t = 1)]
    radius: u32,
    /// Largest hop radius to try; defaults to the graph diameter.
    #[arg(long)]
    r_max: Option<u32>,
    /// Print the outcome as JSON.
    #[arg(long)]
    json: bool,
}

pub fn run(a: ElectArgs) -> anyhow::Result<()> {
    let g = Graph::parse(&crate::read(&a.topology)?).with_context(|| a.topology.display().to_string())?;
    let planes = match (&a.plane, &a.plane_values) {
        (Some(p), _) => parse_plane_table(&crate::read(p)?).with_context(|| p.display().to_string())?,
        (None, Some(v)) => parse_plane_table(v).context("--plane-values")?,
        (None, None) => bail!("give PLANE values with --plane or --plane-values"),
    };
    if let Some(missing) = planes.keys().find(|n| !g.contains(**n)) {
        bail!("PLANE value given for node {missing}, which is not in the topology");
    }
    let threshold = PlaneValue::new(a.threshold).context("--threshold must be finite and non-negative")?;
    let r0 = HopRadius::new(a.radius).context("--radius must be at least 1")?;
    let r_max = match a.r_max {
        Some(r) => HopRadius::new(r).context("--r-max must be at least 1")?,
        None => phids_core::election::default_r_max(&g).max(r0),
    };
    let outcome = elect_monitors(&g, &build_pol(&planes, threshold), r0, r_max)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&outcome)?);
        return Ok(());
    }
    let monitors: Vec<String> = outcome.monitors().iter().map(ToString::to_string).collect();
    println!("monitors: {}", monitors.join(" "));
    for c in &outcome.clusters {
        let children: Vec<String> = c.children.iter().map(ToString::to_string).collect();
        println!("cluster {}: root {} children {}", c.id.0, c.root, children.join(" "));
    }
    println!("hop radius: {}", outcome.hop_radius_used.get());
    println!("working-set expansions: {}", outcome.ws_expansions);
    Ok(())
}
