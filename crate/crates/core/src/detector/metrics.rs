use serde::{Deserialize, Serialize};

use super::DetectorError;
use crate::label::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    /// Intrusions flagged.
    pub true_positives: usize,
    /// Intrusions missed.
    pub false_negatives: usize,
    /// Normal traffic flagged.
    pub false_positives: usize,
    pub true_negatives: usize,
}

impl Confusion {
    pub fn record(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Intrusion, Label::Intrusion) => self.true_positives += 1,
            (Label::Normal, Label::Intrusion) => self.false_negatives += 1,
            (Label::Intrusion, Label::Normal) => self.false_positives += 1,
            (Label::Normal, Label::Normal) => self.true_negatives += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positives + self.false_negatives + self.false_positives + self.true_negatives
    }

    pub fn metrics(&self) -> Metrics {
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        Metrics {
            accuracy: ratio(self.true_positives + self.true_negatives, self.total()).unwrap_or(0.0),
            detection_rate: ratio(self.true_positives, self.true_positives + self.false_negatives),
            false_positive_rate: ratio(self.false_positives, self.false_positives + self.true_negatives),
            confusion: *self,
        }
    }
}

/// Rates are `None` when their denominator class is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub detection_rate: Option<f64>,
    pub false_positive_rate: Option<f64>,
    pub confusion: Confusion,
}

pub fn evaluate(predictions: &[Label], labels: &[Label]) -> Result<Metrics, DetectorError> {
    if predictions.len() != labels.len() {
        return Err(DetectorError::LengthMismatch { predictions: predictions.len(), labels: labels.len() });
    }
    if labels.is_empty() {
        return Err(DetectorError::EmptyInput);
    }
    let mut c = Confusion::default();
    for (&p, &a) in predictions.iter().zip(labels) {
        c.record(p, a);
    }
    Ok(c.metrics())
}
