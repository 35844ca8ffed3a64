//! Traffic-record ingestion, feature encoding, the basin classifier, the
//! linear baseline and detection metrics.

mod encode;
mod linear;
mod metrics;
mod model;
mod record;
pub mod synthetic;

pub use encode::{encode, quantize, ColumnEncoding, EncodedVector, EncodingDictionary, Thresholds};
pub use linear::{train_linear, LinearModel, LinearParams};
pub use metrics::{evaluate, Confusion, Metrics};
pub use model::{
    classify, roc_points, train_fca, FcaClassifierModel, FcaTrainParams, FcaTraining, RocPoint, MODEL_FORMAT_VERSION,
    RQ_CUTOFF,
};
pub use record::{parse_dataset, write_dataset, FeatureRecord, FieldValue, FEATURE_COUNT, FEATURE_NAMES};

use thiserror::Error;

use crate::fca::FcaError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectorError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("expected {expected} fields, found {found}{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    SchemaMismatch { expected: usize, found: usize, line: Option<usize> },
    #[error("column {column}: category {value:?} was not seen in training")]
    UnknownCategory { column: usize, value: String },
    #[error("column {column}: {value:?} is not numeric")]
    NonNumeric { column: usize, value: String },
    #[error("no records")]
    EmptyInput,
    #[error("training data must contain both intrusion and normal records")]
    SingleClassTraining,
    #[error("record {index} has no label")]
    Unlabeled { index: usize },
    #[error("{predictions} predictions for {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("invalid model: {0}")]
    Model(String),
    #[error(transparent)]
    Fca(#[from] FcaError),
}
