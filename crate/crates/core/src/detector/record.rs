use std::fmt;

use super::DetectorError;
use crate::label::Label;

/// Number of feature columns in the connection-record format.
pub const FEATURE_COUNT: usize = 41;

/// Column names of the 41-feature connection-record format.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Continuous(f64),
    Nominal(String),
}

impl FieldValue {
    pub fn parse(raw: &str) -> Self {
        let t = raw.trim();
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => FieldValue::Continuous(v),
            _ => FieldValue::Nominal(t.to_string()),
        }
    }

    /// Text used as the category key when the column is nominal.
    pub fn category_key(&self) -> String {
        match self {
            FieldValue::Continuous(v) => v.to_string(),
            FieldValue::Nominal(s) => s.clone(),
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Continuous(v) => v.fmt(f),
            FieldValue::Nominal(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub values: Vec<FieldValue>,
    pub label: Option<Label>,
}

impl FeatureRecord {
    pub fn new(values: Vec<FieldValue>, label: Option<Label>) -> Self {
        FeatureRecord { values, label }
    }
}

fn is_header(first_row: &csv::StringRecord) -> bool {
    let Some(first) = first_row.get(0) else {
        return false;
    };
    let first = first.trim();
    if first.parse::<f64>().is_ok() {
        return false;
    }
    let lower = first.to_ascii_lowercase();
    FEATURE_NAMES.contains(&lower.as_str())
        || first_row
            .iter()
            .any(|f| matches!(f.trim().to_ascii_lowercase().as_str(), "label" | "class"))
}

/// Parses comma-separated records of `width` feature columns, optionally
/// followed by a label column. All rows must share one shape. A header row is
/// recognised by a non-numeric first field that names a known column, or by a
/// `label`/`class` column.
pub fn parse_dataset(text: &str, width: usize) -> Result<Vec<FeatureRecord>, DetectorError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    let mut labeled: Option<bool> = None;
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| DetectorError::Parse { line: idx + 1, msg: e.to_string() })?;
        let line = row.position().map_or(idx + 1, |p| p.line() as usize);
        if idx == 0 && is_header(&row) {
            continue;
        }
        if row.len() == 1 && row.get(0).is_some_and(str::is_empty) {
            continue;
        }
        let has_label = match row.len() {
            n if n == width => false,
            n if n == width + 1 => true,
            n => {
                return Err(DetectorError::SchemaMismatch {
                    expected: width,
                    found: n,
                    line: Some(line),
                })
            }
        };
        if *labeled.get_or_insert(has_label) != has_label {
            return Err(DetectorError::Parse {
                line,
                msg: "labeled and unlabeled rows are mixed".into(),
            });
        }
        let values = row.iter().take(width).map(FieldValue::parse).collect();
        let label = if has_label {
            let raw = row.get(width).unwrap_or_default();
            Some(raw.parse::<Label>().map_err(|e| DetectorError::Parse { line, msg: e.to_string() })?)
        } else {
            None
        };
        records.push(FeatureRecord { values, label });
    }
    if records.is_empty() {
        return Err(DetectorError::EmptyInput);
    }
    Ok(records)
}

/// Writes records in the dataset format, labels last when present.
pub fn write_dataset(records: &[FeatureRecord], header: bool) -> String {
    let mut out = String::new();
    if header {
        if let Some(r) = records.first() {
            let mut cols: Vec<String> = (0..r.values.len())
                .map(|i| FEATURE_NAMES.get(i).map_or_else(|| format!("f{i}"), |s| s.to_string()))
                .collect();
            if r.label.is_some() {
                cols.push("label".into());
            }
            out.push_str(&cols.join(","));
            out.push('\n');
        }
    }
    for r in records {
        let mut cols: Vec<String> = r.values.iter().map(ToString::to_string).collect();
        if let Some(l) = r.label {
            cols.push(l.to_string());
        }
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, label: Option<&str>) -> String {
        let mut cols: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        cols[1] = "tcp".into();
        if let Some(l) = label {
            cols.push(l.into());
        }
        cols.join(",")
    }

    #[test]
    fn parses_labeled_rows_with_header() {
        let text = format!("{}\n{}\n{}\n", FEATURE_NAMES.join(",") + ",label", row(41, Some("intrusion")), row(41, Some("normal")));
        let recs = parse_dataset(&text, FEATURE_COUNT).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].label, Some(Label::Intrusion));
        assert_eq!(recs[0].values[1], FieldValue::Nominal("tcp".into()));
        assert_eq!(recs[0].values[4], FieldValue::Continuous(4.0));
    }

    #[test]
    fn first_column_nominal_is_not_a_header() {
        let text = "udp,1\ntcp,2\n";
        let recs = parse_dataset(text, 2).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs.iter().all(|r| r.label.is_none()));
    }

    #[test]
    fn shape_errors() {
        let text = format!("{}\n", row(39, None));
        assert!(matches!(
            parse_dataset(&text, FEATURE_COUNT),
            Err(DetectorError::SchemaMismatch { expected: 41, found: 39, line: Some(1) })
        ));
        let mixed = format!("{}\n{}\n", row(41, Some("normal")), row(41, None));
        assert!(matches!(parse_dataset(&mixed, FEATURE_COUNT), Err(DetectorError::Parse { line: 2, .. })));
        let bad = format!("{}\n", row(41, Some("weird")));
        assert!(matches!(parse_dataset(&bad, FEATURE_COUNT), Err(DetectorError::Parse { .. })));
        assert_eq!(parse_dataset("", FEATURE_COUNT), Err(DetectorError::EmptyInput));
    }

    #[test]
    fn write_then_parse() {
        let recs = parse_dataset(&format!("{}\n", row(41, Some("normal"))), FEATURE_COUNT).unwrap();
        assert_eq!(parse_dataset(&write_dataset(&recs, true), FEATURE_COUNT).unwrap(), recs);
    }
}
