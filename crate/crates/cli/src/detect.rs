use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use phids_core::detector::{
    classify as fca_classify, encode, evaluate as score, parse_dataset, roc_points, train_fca, train_linear,
    FcaClassifierModel, FcaTrainParams, FeatureRecord, LinearParams, Metrics, Thresholds, FEATURE_COUNT,
};
use phids_core::fca::GaParams;
use phids_core::Label;

#[derive(Args)]
pub struct TrainArgs {
    /// Labeled dataset: feature columns then an `intrusion`/`normal` column.
    dataset: PathBuf,
    /// Where to write the model (JSON).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    generations: usize,
    #[arg(long, default_value_t = 50)]
    population: usize,
    /// Quantization cut-off applied to every encoded feature.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Number of feature columns.
    #[arg(long, default_value_t = FEATURE_COUNT)]
    width: usize,
    /// Also train the linear baseline and store it in the model.
    #[arg(long)]
    linear: bool,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Dataset to label; a label column, if present, is ignored.
    dataset: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Use the linear baseline stored in the model.
    #[arg(long)]
    baseline: bool,
    /// Write labels here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Labeled dataset holding the ground truth.
    dataset: PathBuf,
    #[arg(long, required_unless_present = "predictions")]
    model: Option<PathBuf>,
    /// File of predicted labels, one per line, instead of a model.
    #[arg(long, conflicts_with = "model")]
    predictions: Option<PathBuf>,
    /// Use the linear baseline stored in the model.
    #[arg(long)]
    baseline: bool,
    /// Number of feature columns when scoring a predictions file.
    #[arg(long, default_value_t = FEATURE_COUNT)]
    width: usize,
    /// Directory for metrics.json and, with a model, roc.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_model(path: &PathBuf) -> anyhow::Result<FcaClassifierModel> {
    FcaClassifierModel::from_json(&crate::read(path)?).with_context(|| path.display().to_string())
}

fn load_dataset(path: &PathBuf, width: usize) -> anyhow::Result<Vec<FeatureRecord>> {
    parse_dataset(&crate::read(path)?, width).with_context(|| path.display().to_string())
}

fn predict(model: &FcaClassifierModel, records: &[FeatureRecord], baseline: bool) -> anyhow::Result<Vec<Label>> {
    if baseline {
        let Some(linear) = &model.linear else {
            bail!("the model holds no linear baseline; train with --linear");
        };
        records.iter().map(|r| Ok(linear.predict(&encode(r, &model.dictionary)?.values))).collect()
    } else {
        records.iter().map(|r| Ok(fca_classify(model, r)?)).collect()
    }
}

fn rate(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.4}"))
}

fn print_metrics(m: &Metrics) {
    println!("accuracy: {:.4}", m.accuracy);
    println!("detection rate: {}", rate(m.detection_rate));
    println!("false positive rate: {}", rate(m.false_positive_rate));
    let c = m.confusion;
    println!(
        "tp {} fn {} fp {} tn {}",
        c.true_positives, c.false_negatives, c.false_positives, c.true_negatives
    );
}

fn labels_of(records: &[FeatureRecord]) -> anyhow::Result<Vec<Label>> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| r.label.with_context(|| format!("record {} has no label", i + 1)))
        .collect()
}

pub fn train(a: TrainArgs) -> anyhow::Result<()> {
    let records = load_dataset(&a.dataset, a.width)?;
    let params = FcaTrainParams {
        ga: GaParams { population: a.population, ..GaParams::default() },
        generations: a.generations,
        seed: a.seed,
        thresholds: Thresholds::Global(a.threshold),
        ..FcaTrainParams::default()
    };
    let mut trained = train_fca(&records, &params)?;
    if a.linear {
        let data: Vec<(Vec<f64>, Label)> = records
            .iter()
            .map(|r| Ok((encode(r, &trained.model.dictionary)?.values, r.label.expect("training records are labeled"))))
            .collect::<anyhow::Result<_>>()?;
        trained.model.linear = Some(train_linear(&data, &LinearParams { seed: a.seed, ..LinearParams::default() })?);
    }
    crate::write(&a.out, &trained.model.to_json())?;
    let predictions = predict(&trained.model, &records, false)?;
    let m = score(&predictions, &labels_of(&records)?)?;
    println!(
        "trained on {} records; best validation fitness {:.4}; training accuracy {:.4}",
        records.len(),
        trained.history.last().copied().unwrap_or(0.0),
        m.accuracy
    );
    println!("rules: {}", trained.model.rules);
    println!("wrote {}", a.out.display());
    Ok(())
}

pub fn classify(a: ClassifyArgs) -> anyhow::Result<()> {
    let model = load_model(&a.model)?;
    let records = load_dataset(&a.dataset, model.dictionary.width())?;
    let labels = predict(&model, &records, a.baseline)?;
    let mut text = String::new();
    for l in labels {
        text.push_str(&format!("{l}\n"));
    }
    match &a.out {
        Some(p) => crate::write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_predictions(text: &str) -> anyhow::Result<Vec<Label>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(n, l)| l.parse::<Label>().with_context(|| format!("predictions line {n}")))
        .collect()
}

pub fn evaluate(a: EvaluateArgs) -> anyhow::Result<()> {
    let (metrics, roc) = match (&a.model, &a.predictions) {
        (Some(mp), _) => {
            let model = load_model(mp)?;
            let records = load_dataset(&a.dataset, model.dictionary.width())?;
            let truth = labels_of(&records)?;
            let m = score(&predict(&model, &records, a.baseline)?, &truth)?;
            let roc = if a.baseline { None } else { Some(roc_points(&model, &records)?) };
            (m, roc)
        }
        (None, Some(pp)) => {
            let records = load_dataset(&a.dataset, a.width)?;
            let preds = parse_predictions(&crate::read(pp)?)?;
            (score(&preds, &labels_of(&records)?)?, None)
        }
        (None, None) => bail!("give --model or --predictions"),
    };
    print_metrics(&metrics);
    if let Some(out) = &a.out {
        crate::write(&out.join("metrics.json"), &serde_json::to_string_pretty(&metrics)?)?;
        if let Some(points) = roc {
            let mut csv = String::from("cutoff,detection_rate,false_positive_rate\n");
            for p in points {
                csv.push_str(&format!("{},{},{}\n", p.cutoff, p.detection_rate, p.false_positive_rate));
            }
            crate::write(&out.join("roc.csv"), &csv)?;
        }
    }
    Ok(())
}
