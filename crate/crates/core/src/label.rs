use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Ground truth or predicted class of a traffic record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Intrusion,
    Normal,
}

impl Label {
    pub fn is_intrusion(self) -> bool {
        self == Label::Intrusion
    }

    /// +1 for intrusions, -1 for normal traffic.
    pub fn sign(self) -> f64 {
        match self {
            Label::Intrusion => 1.0,
            Label::Normal => -1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Intrusion => "intrusion",
            Label::Normal => "normal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label {0:?} (expected \"intrusion\" or \"normal\")")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "intrusion" => Ok(Label::Intrusion),
            "normal" => Ok(Label::Normal),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}
