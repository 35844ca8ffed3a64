mod detect;
mod elect;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phids_core::detector::DetectorError;
use phids_core::fca::FcaError;
use phids_core::sim::SimError;
use phids_core::ElectionError;

/// Power-aware monitor election, network simulation and FCA intrusion detection.
#[derive(Parser)]
#[command(name = "phids", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Elect monitors for a topology and a table of PLANE values.
    Elect(elect::ElectArgs),
    /// Run a scenario and write a report with plot-ready tables.
    Simulate(simulate::SimulateArgs),
    /// Compare a PHIDS run with a SPAID baseline run of the same scenario.
    Compare(simulate::CompareArgs),
    /// Regenerate the tables of a report.
    Report(simulate::ReportArgs),
    /// Train the FCA basin classifier on a labeled dataset.
    Train(detect::TrainArgs),
    /// Label every record of a dataset with a trained model.
    Classify(detect::ClassifyArgs),
    /// Score a model, or a predictions file, against a labeled dataset.
    Evaluate(detect::EvaluateArgs),
}

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Failure {
    Input = 2,
    Infeasible = 3,
    Training = 4,
}

fn classify_failure(err: &anyhow::Error) -> Failure {
    for cause in err.chain() {
        if let Some(ElectionError::NoFeasibleSelection { .. }) = cause.downcast_ref::<ElectionError>() {
            return Failure::Infeasible;
        }
        if let Some(SimError::Election(ElectionError::NoFeasibleSelection { .. })) = cause.downcast_ref::<SimError>() {
            return Failure::Infeasible;
        }
        if let Some(e) = cause.downcast_ref::<DetectorError>() {
            return match e {
                DetectorError::SingleClassTraining
                | DetectorError::Fca(FcaError::ResolutionError { .. }) => Failure::Training,
                _ => Failure::Input,
            };
        }
    }
    Failure::Input
}

pub(crate) fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub(crate) fn write(path: &std::path::Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| anyhow::anyhow!("{}: {e}", dir.display()))?;
    }
    std::fs::write(path, text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Elect(a) => elect::run(a),
        Command::Simulate(a) => simulate::simulate(a),
        Command::Compare(a) => simulate::compare(a),
        Command::Report(a) => simulate::report(a),
        Command::Train(a) => detect::train(a),
        Command::Classify(a) => detect::classify(a),
        Command::Evaluate(a) => detect::evaluate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify_failure(&e) as u8)
        }
    }
}
