use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FcaError;

/// Which neighborhood cells a rule reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Reads {
    pub left: bool,
    pub center: bool,
    pub right: bool,
}

/// One cell's next-state function, drawn from the OR-family of rules (and
/// their complements) plus rule 254.
///
/// Under fuzzy semantics OR is the bounded sum `min(1, a + b)` and NOT is
/// `1 - x`; on {0, 1} both reduce to their Boolean counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct FcaRule(u8);

impl FcaRule {
    /// The fourteen rules of the rule table, non-complemented first.
    pub const TABLE: [u8; 14] = [0, 170, 204, 238, 240, 250, 252, 255, 85, 51, 17, 15, 5, 3];
    /// Every supported rule number, including 254.
    pub const SUPPORTED: [u8; 15] = [0, 170, 204, 238, 240, 250, 252, 254, 255, 85, 51, 17, 15, 5, 3];

    pub fn new(number: u8) -> Result<Self, FcaError> {
        if Self::SUPPORTED.contains(&number) {
            Ok(FcaRule(number))
        } else {
            Err(FcaError::UnknownRule(number))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn is_complemented(self) -> bool {
        // complemented rules are 255 minus an OR rule, so bit 0 (all-zero
        // neighborhood) is set
        self.0 & 1 == 1
    }

    /// The OR rule this one complements (itself when not complemented).
    pub fn base(self) -> FcaRule {
        if self.is_complemented() {
            FcaRule(255 - self.0)
        } else {
            self
        }
    }

    pub fn reads(self) -> Reads {
        match self.base().0 {
            0 => Reads::default(),
            170 => Reads { right: true, ..Reads::default() },
            204 => Reads { center: true, ..Reads::default() },
            238 => Reads { center: true, right: true, ..Reads::default() },
            240 => Reads { left: true, ..Reads::default() },
            250 => Reads { left: true, right: true, ..Reads::default() },
            252 => Reads { left: true, center: true, ..Reads::default() },
            254 => Reads { left: true, center: true, right: true },
            other => unreachable!("unsupported base rule {other}"),
        }
    }

    /// Fuzzy next state for the neighborhood `(left, center, right)`.
    pub fn apply(self, left: f64, center: f64, right: f64) -> f64 {
        let reads = self.reads();
        let mut sum = 0.0;
        if reads.left {
            sum += left;
        }
        if reads.center {
            sum += center;
        }
        if reads.right {
            sum += right;
        }
        let or = sum.min(1.0);
        if self.is_complemented() {
            1.0 - or
        } else {
            or
        }
    }
}

impl TryFrom<u8> for FcaRule {
    type Error = FcaError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        FcaRule::new(v)
    }
}

impl From<FcaRule> for u8 {
    fn from(r: FcaRule) -> u8 {
        r.0
    }
}

impl fmt::Display for FcaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Evaluates `rule` on a neighborhood with the boundary semantics of a fixed
/// zero outside the lattice. Inputs are checked to lie in [0, 1].
pub fn apply_rule(rule: u8, left: f64, center: f64, right: f64) -> Result<f64, FcaError> {
    let rule = FcaRule::new(rule)?;
    for v in [left, center, right] {
        if !(0.0..=1.0).contains(&v) {
            return Err(FcaError::StateOutOfRange(v));
        }
    }
    Ok(rule.apply(left, center, right))
}

/// Per-cell rules of a one-dimensional lattice with null boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FcaRuleVector {
    rules: Vec<FcaRule>,
}

impl FcaRuleVector {
    pub fn new(rules: Vec<FcaRule>) -> Result<Self, FcaError> {
        if rules.is_empty() {
            return Err(FcaError::EmptyRuleVector);
        }
        Ok(FcaRuleVector { rules })
    }

    pub fn from_numbers(numbers: &[u8]) -> Result<Self, FcaError> {
        FcaRuleVector::new(numbers.iter().map(|&n| FcaRule::new(n)).collect::<Result<_, _>>()?)
    }

    pub fn uniform(rule: FcaRule, n: usize) -> Result<Self, FcaError> {
        FcaRuleVector::new(vec![rule; n])
    }

    pub fn rules(&self) -> &[FcaRule] {
        &self.rules
    }

    pub fn rules_mut(&mut self) -> &mut [FcaRule] {
        &mut self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn hamming(&self, other: &FcaRuleVector) -> usize {
        let diff = self.rules.iter().zip(&other.rules).filter(|(a, b)| a != b).count();
        diff + self.len().abs_diff(other.len())
    }
}

impl fmt::Display for FcaRuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rules.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for FcaRuleVector {
    type Err = FcaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let numbers = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<u8>().map_err(|_| FcaError::BadRuleVector(t.to_string()))
            })
            .collect::<Result<Vec<u8>, _>>()?;
        FcaRuleVector::from_numbers(&numbers)
    }
}

impl TryFrom<String> for FcaRuleVector {
    type Error = FcaError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<FcaRuleVector> for String {
    fn from(v: FcaRuleVector) -> String {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Boolean truth tables written directly from the rule-table expressions.
    fn boolean_oracle(rule: u8, l: bool, s: bool, r: bool) -> bool {
        match rule {
            0 => false,
            170 => r,
            204 => s,
            238 => s || r,
            240 => l,
            250 => l || r,
            252 => l || s,
            254 => l || s || r,
            255 => true,
            85 => !r,
            51 => !s,
            17 => !(s || r),
            15 => !l,
            5 => !(l || r),
            3 => !(l || s),
            _ => unreachable!(),
        }
    }

    #[test]
    fn binary_truth_tables() {
        let mut checked = 0;
        for &rule in &FcaRule::SUPPORTED {
            for idx in 0..8u8 {
                let (l, s, r) = (idx & 4 != 0, idx & 2 != 0, idx & 1 != 0);
                let got = apply_rule(rule, l as u8 as f64, s as u8 as f64, r as u8 as f64).unwrap();
                assert_eq!(got, boolean_oracle(rule, l, s, r) as u8 as f64, "rule {rule} on {idx:03b}");
                // the rule number is the Wolfram encoding of the same function
                assert_eq!(got as u8, (rule >> idx) & 1);
                checked += 1;
            }
        }
        assert_eq!(checked, 120);
    }

    #[test]
    fn documented_examples() {
        assert_eq!(apply_rule(238, 0.0, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(apply_rule(0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((apply_rule(238, 0.9, 0.4, 0.3).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(apply_rule(85, 0.5, 0.5, 1.0).unwrap(), 0.0);
        assert_eq!(apply_rule(7, 0.0, 0.0, 0.0), Err(FcaError::UnknownRule(7)));
        assert_eq!(apply_rule(204, 0.0, 1.5, 0.0), Err(FcaError::StateOutOfRange(1.5)));
    }

    #[test]
    fn complement_pairs() {
        for base in [0u8, 170, 204, 238, 240, 250, 252] {
            let comp = FcaRule::new(255 - base).unwrap();
            assert!(comp.is_complemented());
            assert_eq!(comp.base().number(), base);
            for idx in 0..8u8 {
                let (l, s, r) = ((idx >> 2 & 1) as f64, (idx >> 1 & 1) as f64, (idx & 1) as f64);
                assert_eq!(comp.apply(l, s, r), 1.0 - FcaRule(base).apply(l, s, r));
            }
        }
    }

    #[test]
    fn rule_vector_text() {
        let v: FcaRuleVector = "238, 254,238,252".parse().unwrap();
        assert_eq!(v.to_string(), "238,254,238,252");
        assert_eq!("238,9".parse::<FcaRuleVector>(), Err(FcaError::UnknownRule(9)));
        assert!("".parse::<FcaRuleVector>().is_err());
        assert!("238,x".parse::<FcaRuleVector>().is_err());
    }

    proptest! {
        #[test]
        fn fuzzy_outputs_stay_in_unit_interval(
            idx in 0usize..15, l in 0.0..=1.0f64, s in 0.0..=1.0f64, r in 0.0..=1.0f64
        ) {
            let v = apply_rule(FcaRule::SUPPORTED[idx], l, s, r).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
