//! Seeded generator for a small, linearly separable 41-feature dataset.
//!
//! Only `src_bytes` carries the class: intrusions send 600 to 1000 bytes,
//! normal connections 0 to 400. The nominal columns and a handful of rate
//! columns are label-independent noise; every other column is zero.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FeatureRecord, FieldValue, FEATURE_COUNT};
use crate::label::Label;

pub const SIGNAL_COLUMN: usize = 4;

const PROTOCOLS: [&str; 3] = ["icmp", "tcp", "udp"];
const SERVICES: [&str; 4] = ["ftp", "http", "private", "smtp"];
const FLAGS: [&str; 3] = ["REJ", "S0", "SF"];
const NOISE_COLUMNS: [usize; 4] = [5, 22, 28, 33];

/// `n` records alternating intrusion / normal, starting with an intrusion.
pub fn separable_dataset(n: usize, seed: u64) -> Vec<FeatureRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Intrusion } else { Label::Normal };
            let mut values = vec![FieldValue::Continuous(0.0); FEATURE_COUNT];
            values[1] = FieldValue::Nominal(PROTOCOLS.choose(&mut rng).unwrap().to_string());
            values[2] = FieldValue::Nominal(SERVICES.choose(&mut rng).unwrap().to_string());
            values[3] = FieldValue::Nominal(FLAGS.choose(&mut rng).unwrap().to_string());
            let bytes: u32 = match label {
                Label::Intrusion => rng.random_range(600..=1000),
                Label::Normal => rng.random_range(0..=400),
            };
            values[SIGNAL_COLUMN] = FieldValue::Continuous(bytes as f64);
            for c in NOISE_COLUMNS {
                let v: u32 = rng.random_range(0..=100);
                values[c] = FieldValue::Continuous(v as f64 / 100.0);
            }
            FeatureRecord::new(values, Some(label))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{parse_dataset, write_dataset};

    #[test]
    fn classes_split_on_src_bytes() {
        let recs = separable_dataset(100, 9);
        for r in &recs {
            let FieldValue::Continuous(b) = r.values[SIGNAL_COLUMN] else { panic!("numeric column") };
            match r.label.unwrap() {
                Label::Intrusion => assert!((600.0..=1000.0).contains(&b)),
                Label::Normal => assert!((0.0..=400.0).contains(&b)),
            }
        }
        assert_eq!(recs.iter().filter(|r| r.label == Some(Label::Intrusion)).count(), 50);
    }

    #[test]
    fn bundled_file_matches_generator() {
        let text = include_str!("../../../../data/separable_41.csv");
        let expected = separable_dataset(200, 41);
        assert_eq!(text, write_dataset(&expected, true));
        assert_eq!(parse_dataset(text, FEATURE_COUNT).unwrap(), expected);
    }
}
