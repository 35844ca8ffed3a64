use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{encode, quantize, DetectorError, EncodingDictionary, FeatureRecord, LinearModel, Thresholds};
use crate::fca::{
    ca_tree_build_full, ga_evolve, random_population, BinaryAutomaton, BinaryConfig, CaTree, Chromosome,
    FcaRuleVector, GaParams,
};
use crate::label::Label;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Rq at or above this value classifies as an intrusion.
pub const RQ_CUTOFF: f64 = 0.5;

/// Trained basin classifier, serialized as a versioned JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcaClassifierModel {
    pub version: u32,
    pub rules: FcaRuleVector,
    pub thresholds: Thresholds,
    pub dictionary: EncodingDictionary,
    pub tree: CaTree,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<LinearModel>,
}

impl FcaClassifierModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DetectorError> {
        let m: FcaClassifierModel =
            serde_json::from_str(text).map_err(|e| DetectorError::Model(e.to_string()))?;
        if m.version != MODEL_FORMAT_VERSION {
            return Err(DetectorError::Model(format!("unsupported model version {}", m.version)));
        }
        if m.rules.len() != m.dictionary.width() {
            return Err(DetectorError::Model(format!(
                "rule vector has {} cells but the dictionary has {} columns",
                m.rules.len(),
                m.dictionary.width()
            )));
        }
        Ok(m)
    }

    /// Malicious index of the basin an already-encoded vector falls into.
    pub fn rq_encoded(&self, values: &[f64]) -> Result<f64, DetectorError> {
        let bits = quantize(values, &self.thresholds)?.to_bits()?;
        let automaton = BinaryAutomaton::new(&self.rules)?;
        if bits.len != automaton.len() {
            return Err(DetectorError::SchemaMismatch { expected: automaton.len(), found: bits.len, line: None });
        }
        Ok(self.tree.rq_of(automaton.attractor_id(bits.state)))
    }

    pub fn classify_encoded(&self, values: &[f64]) -> Result<Label, DetectorError> {
        Ok(if self.rq_encoded(values)? >= RQ_CUTOFF { Label::Intrusion } else { Label::Normal })
    }
}

pub fn classify(model: &FcaClassifierModel, record: &FeatureRecord) -> Result<Label, DetectorError> {
    let v = encode(record, &model.dictionary)?;
    model.classify_encoded(&v.values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcaTrainParams {
    pub ga: GaParams,
    pub generations: usize,
    pub seed: u64,
    /// Share of the training records held out to score candidate rules.
    pub validation_fraction: f64,
    pub thresholds: Thresholds,
}

impl Default for FcaTrainParams {
    fn default() -> Self {
        FcaTrainParams {
            ga: GaParams::default(),
            generations: 30,
            seed: 0,
            validation_fraction: 0.3,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcaTraining {
    pub model: FcaClassifierModel,
    /// Best validation accuracy per generation.
    pub history: Vec<f64>,
}

fn labeled(records: &[FeatureRecord]) -> Result<Vec<Label>, DetectorError> {
    let labels: Vec<Label> = records
        .iter()
        .enumerate()
        .map(|(i, r)| r.label.ok_or(DetectorError::Unlabeled { index: i }))
        .collect::<Result<_, _>>()?;
    if labels.is_empty() {
        return Err(DetectorError::EmptyInput);
    }
    if !labels.contains(&Label::Intrusion) || !labels.contains(&Label::Normal) {
        return Err(DetectorError::SingleClassTraining);
    }
    Ok(labels)
}

/// Accuracy of the Rq decision rule built from `fit` and scored on `score`.
fn holdout_accuracy(
    rules: &FcaRuleVector,
    fit: &[(BinaryConfig, Label)],
    score: &[(BinaryConfig, Label)],
) -> f64 {
    let Ok(tree) = ca_tree_build_full(fit, rules) else {
        return 0.0;
    };
    let automaton = BinaryAutomaton::new(rules).expect("width checked by caller");
    let correct = score
        .iter()
        .filter(|(cfg, label)| {
            let rq = tree.rq_of(automaton.attractor_id(cfg.state));
            (rq >= RQ_CUTOFF) == label.is_intrusion()
        })
        .count();
    correct as f64 / score.len() as f64
}

/// Evolves a rule vector whose basins separate the two classes, then stores
/// the Rq table computed over the whole training set.
pub fn train_fca(records: &[FeatureRecord], params: &FcaTrainParams) -> Result<FcaTraining, DetectorError> {
    let labels = labeled(records)?;
    let dictionary = EncodingDictionary::fit(records)?;
    let configs: Vec<(BinaryConfig, Label)> = records
        .iter()
        .zip(&labels)
        .map(|(r, &l)| {
            let v = encode(r, &dictionary)?;
            Ok((quantize(&v.values, &params.thresholds)?.to_bits()?, l))
        })
        .collect::<Result<_, DetectorError>>()?;
    let width = dictionary.width();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..configs.len()).collect();
    order.shuffle(&mut rng);
    let held = ((configs.len() as f64 * params.validation_fraction).round() as usize).clamp(1, configs.len() - 1);
    let score: Vec<_> = order[..held].iter().map(|&i| configs[i]).collect();
    let fit: Vec<_> = order[held..].iter().map(|&i| configs[i]).collect();

    let population = random_population(width, 0, params.ga.population.max(1), &mut rng);
    let run = ga_evolve(
        population,
        |c: &Chromosome| holdout_accuracy(&c.rules, &fit, &score),
        params.generations,
        &params.ga,
        &mut rng,
    );
    let rules = run.best().rules.clone();
    let tree = ca_tree_build_full(&configs, &rules)?;
    Ok(FcaTraining {
        model: FcaClassifierModel {
            version: MODEL_FORMAT_VERSION,
            rules,
            thresholds: params.thresholds.clone(),
            dictionary,
            tree,
            linear: None,
        },
        history: run.best_per_generation,
    })
}

/// One point of a detection-rate versus false-positive-rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub cutoff: f64,
    pub detection_rate: f64,
    pub false_positive_rate: f64,
}

/// Sweeps the Rq cut-off over every distinct Rq value seen on `records`
/// (plus one above all of them).
pub fn roc_points(model: &FcaClassifierModel, records: &[FeatureRecord]) -> Result<Vec<RocPoint>, DetectorError> {
    let labels = labeled(records)?;
    let scores: Vec<f64> = records
        .iter()
        .map(|r| model.rq_encoded(&encode(r, &model.dictionary)?.values))
        .collect::<Result<_, _>>()?;
    let mut cutoffs: Vec<f64> = scores.clone();
    cutoffs.push(f64::INFINITY);
    cutoffs.sort_by(f64::total_cmp);
    cutoffs.dedup();
    let positives = labels.iter().filter(|l| l.is_intrusion()).count() as f64;
    let negatives = labels.len() as f64 - positives;
    Ok(cutoffs
        .into_iter()
        .map(|cutoff| {
            let (mut tp, mut fp) = (0.0, 0.0);
            for (s, l) in scores.iter().zip(&labels) {
                if *s >= cutoff {
                    if l.is_intrusion() {
                        tp += 1.0;
                    } else {
                        fp += 1.0;
                    }
                }
            }
            RocPoint { cutoff, detection_rate: tp / positives, false_positive_rate: fp / negatives }
        })
        .collect())
}
