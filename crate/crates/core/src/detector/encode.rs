use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DetectorError, FeatureRecord, FieldValue};
use crate::fca::Configuration;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnEncoding {
    /// Min-max range observed in the training split.
    Continuous { min: f64, max: f64 },
    /// Categories in ascending order; category `i` of `k` encodes as
    /// `i / (k - 1)`.
    Nominal { categories: Vec<String> },
}

/// Frozen per-column encoding built from a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingDictionary {
    pub columns: Vec<ColumnEncoding>,
    /// Content fingerprint, carried by every vector encoded with this dictionary.
    pub id: String,
}

impl EncodingDictionary {
    pub fn new(columns: Vec<ColumnEncoding>) -> Self {
        let json = serde_json::to_vec(&columns).expect("column encodings serialize");
        let digest = Sha256::digest(&json);
        let id = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        EncodingDictionary { columns, id }
    }

    /// A column is nominal when any training value in it is non-numeric.
    pub fn fit(records: &[FeatureRecord]) -> Result<Self, DetectorError> {
        let first = records.first().ok_or(DetectorError::EmptyInput)?;
        let width = first.values.len();
        for r in records {
            if r.values.len() != width {
                return Err(DetectorError::SchemaMismatch { expected: width, found: r.values.len(), line: None });
            }
        }
        let columns = (0..width)
            .map(|c| {
                let col = records.iter().map(|r| &r.values[c]);
                if col.clone().any(|v| matches!(v, FieldValue::Nominal(_))) {
                    let cats: BTreeSet<String> = col.map(FieldValue::category_key).collect();
                    ColumnEncoding::Nominal { categories: cats.into_iter().collect() }
                } else {
                    let (min, max) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| match v {
                        FieldValue::Continuous(x) => (lo.min(*x), hi.max(*x)),
                        FieldValue::Nominal(_) => unreachable!(),
                    });
                    ColumnEncoding::Continuous { min, max }
                }
            })
            .collect();
        Ok(EncodingDictionary::new(columns))
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }
}

/// Feature values in [0, 1], tagged with the dictionary that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVector {
    pub values: Vec<f64>,
    pub dictionary: String,
}

pub fn encode(record: &FeatureRecord, dict: &EncodingDictionary) -> Result<EncodedVector, DetectorError> {
    if record.values.len() != dict.width() {
        return Err(DetectorError::SchemaMismatch {
            expected: dict.width(),
            found: record.values.len(),
            line: None,
        });
    }
    let values = record
        .values
        .iter()
        .zip(&dict.columns)
        .enumerate()
        .map(|(column, (v, enc))| match enc {
            ColumnEncoding::Nominal { categories } => {
                let key = v.category_key();
                let idx = categories
                    .binary_search(&key)
                    .map_err(|_| DetectorError::UnknownCategory { column, value: key })?;
                Ok(if categories.len() <= 1 { 0.0 } else { idx as f64 / (categories.len() - 1) as f64 })
            }
            ColumnEncoding::Continuous { min, max } => match v {
                FieldValue::Continuous(x) => {
                    if max > min {
                        Ok(((x - min) / (max - min)).clamp(0.0, 1.0))
                    } else {
                        Ok(0.0)
                    }
                }
                FieldValue::Nominal(s) => Err(DetectorError::NonNumeric { column, value: s.clone() }),
            },
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(EncodedVector { values, dictionary: dict.id.clone() })
}

/// Quantization cut-offs: one global value or one per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Thresholds {
    Global(f64),
    PerFeature(Vec<f64>),
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::Global(0.5)
    }
}

/// Cell `i` is 1 exactly when `v[i]` reaches its threshold.
pub fn quantize(v: &[f64], thresholds: &Thresholds) -> Result<Configuration, DetectorError> {
    let cells = match thresholds {
        Thresholds::Global(t) => v.iter().map(|&x| if x >= *t { 1.0 } else { 0.0 }).collect(),
        Thresholds::PerFeature(ts) => {
            if ts.len() != v.len() {
                return Err(DetectorError::SchemaMismatch { expected: ts.len(), found: v.len(), line: None });
            }
            v.iter().zip(ts).map(|(&x, &t)| if x >= t { 1.0 } else { 0.0 }).collect()
        }
    };
    Ok(Configuration::new(cells).expect("binary cells are in range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(vals: &[&str]) -> FeatureRecord {
        FeatureRecord::new(vals.iter().map(|v| FieldValue::parse(v)).collect(), None)
    }

    #[test]
    fn nominal_three_categories() {
        let train = [rec(&["tcp"]), rec(&["udp"]), rec(&["icmp"])];
        let dict = EncodingDictionary::fit(&train).unwrap();
        let got: Vec<f64> = train.iter().map(|r| encode(r, &dict).unwrap().values[0]).collect();
        // sorted categories: icmp, tcp, udp
        assert_eq!(got, vec![0.5, 1.0, 0.0]);
        assert!(matches!(
            encode(&rec(&["sctp"]), &dict),
            Err(DetectorError::UnknownCategory { column: 0, .. })
        ));
    }

    #[test]
    fn single_category_is_zero() {
        let dict = EncodingDictionary::fit(&[rec(&["tcp"]), rec(&["tcp"])]).unwrap();
        assert_eq!(encode(&rec(&["tcp"]), &dict).unwrap().values, vec![0.0]);
    }

    #[test]
    fn continuous_min_max() {
        let train = [rec(&["10", "5"]), rec(&["30", "5"])];
        let dict = EncodingDictionary::fit(&train).unwrap();
        assert_eq!(encode(&train[0], &dict).unwrap().values, vec![0.0, 0.0]);
        assert_eq!(encode(&train[1], &dict).unwrap().values, vec![1.0, 0.0]);
        assert_eq!(encode(&rec(&["20", "9"]), &dict).unwrap().values, vec![0.5, 0.0]);
        assert_eq!(encode(&rec(&["99", "5"]), &dict).unwrap().values, vec![1.0, 0.0]);
        assert!(matches!(encode(&rec(&["x", "5"]), &dict), Err(DetectorError::NonNumeric { column: 0, .. })));
    }

    #[test]
    fn width_mismatch() {
        let full: Vec<String> = (0..41).map(|i| i.to_string()).collect();
        let full: Vec<&str> = full.iter().map(String::as_str).collect();
        let dict = EncodingDictionary::fit(&[rec(&full)]).unwrap();
        assert_eq!(
            encode(&rec(&full[..40]), &dict),
            Err(DetectorError::SchemaMismatch { expected: 41, found: 40, line: None })
        );
    }

    #[test]
    fn quantize_cases() {
        assert_eq!(quantize(&[0.0, 0.0], &Thresholds::Global(0.5)).unwrap().cells(), &[0.0, 0.0]);
        assert_eq!(quantize(&[0.2, 0.8], &Thresholds::Global(0.5)).unwrap().cells(), &[0.0, 1.0]);
        assert_eq!(quantize(&[0.0, 0.3], &Thresholds::Global(0.0)).unwrap().cells(), &[1.0, 1.0]);
        assert_eq!(
            quantize(&[0.2, 0.8], &Thresholds::PerFeature(vec![0.1, 0.9])).unwrap().cells(),
            &[1.0, 0.0]
        );
        assert!(quantize(&[0.2], &Thresholds::PerFeature(vec![0.1, 0.9])).is_err());
    }

    proptest! {
        #[test]
        fn encoding_in_unit_interval_and_deterministic(
            train in proptest::collection::vec((-1e3..1e3f64, 0usize..4), 1..20),
            probe in (-2e3..2e3f64, 0usize..4),
        ) {
            let cats = ["a", "b", "c", "d"];
            let to_rec = |(x, c): (f64, usize)| FeatureRecord::new(
                vec![FieldValue::Continuous(x), FieldValue::Nominal(cats[c].into())], None);
            let recs: Vec<_> = train.iter().copied().map(to_rec).collect();
            let dict = EncodingDictionary::fit(&recs).unwrap();
            for r in &recs {
                let a = encode(r, &dict).unwrap();
                prop_assert!(a.values.iter().all(|v| (0.0..=1.0).contains(v)));
                prop_assert_eq!(&a, &encode(r, &dict).unwrap());
            }
            if let Ok(e) = encode(&to_rec(probe), &dict) {
                prop_assert!(e.values.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }
}
