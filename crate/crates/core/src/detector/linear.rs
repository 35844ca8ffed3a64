use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DetectorError;
use crate::label::Label;

/// Separating hyperplane `w . x + b = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearModel {
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.b
    }

    /// `sign(w . x + b)`; a point on the hyperplane counts as an intrusion.
    pub fn predict(&self, x: &[f64]) -> Label {
        if self.decision_value(x) >= 0.0 {
            Label::Intrusion
        } else {
            Label::Normal
        }
    }

    /// Distance between the planes `w . x + b = +1` and `w . x + b = -1`.
    pub fn margin(&self) -> Option<f64> {
        let norm = self.w.iter().map(|w| w * w).sum::<f64>().sqrt();
        (norm > 0.0).then(|| 2.0 / norm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub epochs: usize,
    pub learning_rate: f64,
    /// L2 penalty weight.
    pub lambda: f64,
    pub seed: u64,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams { epochs: 200, learning_rate: 0.1, lambda: 0.01, seed: 0 }
    }
}

/// Minimizes `lambda/2 |w|^2 + mean(max(0, 1 - y (w . x + b)))` by per-sample
/// subgradient steps. The step size in epoch `e` (from 1) is `lr / e`.
pub fn train_linear(data: &[(Vec<f64>, Label)], params: &LinearParams) -> Result<LinearModel, DetectorError> {
    let first = data.first().ok_or(DetectorError::EmptyInput)?;
    let has = |l: Label| data.iter().any(|d| d.1 == l);
    if !has(Label::Intrusion) || !has(Label::Normal) {
        return Err(DetectorError::SingleClassTraining);
    }
    let dim = first.0.len();
    if let Some(bad) = data.iter().find(|d| d.0.len() != dim) {
        return Err(DetectorError::SchemaMismatch { expected: dim, found: bad.0.len(), line: None });
    }
    let mut model = LinearModel { w: vec![0.0; dim], b: 0.0 };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for epoch in 1..=params.epochs {
        let lr = params.learning_rate / epoch as f64;
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, label) = &data[i];
            let y = label.sign();
            let violated = y * model.decision_value(x) < 1.0;
            for (w, xj) in model.w.iter_mut().zip(x) {
                let grad = params.lambda * *w - if violated { y * xj } else { 0.0 };
                *w -= lr * grad;
            }
            if violated {
                model.b += lr * y;
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accuracy(m: &LinearModel, data: &[(Vec<f64>, Label)]) -> f64 {
        data.iter().filter(|(x, l)| m.predict(x) == *l).count() as f64 / data.len() as f64
    }

    /// Grid search over directions and offsets for a separating line.
    fn grid_separable(data: &[(Vec<f64>, Label)]) -> bool {
        (0..360).any(|deg| {
            let t = (deg as f64).to_radians();
            let (a, c) = (t.cos(), t.sin());
            (-400..=400).any(|k| {
                let b = k as f64 / 100.0;
                data.iter().all(|(x, l)| (a * x[0] + c * x[1] + b) * l.sign() > 0.0)
            })
        })
    }

    #[test]
    fn symmetric_pair() {
        let data = vec![(vec![1.0], Label::Intrusion), (vec![-1.0], Label::Normal)];
        let m = train_linear(&data, &LinearParams::default()).unwrap();
        assert!(m.w[0] > 0.0);
        assert_eq!(accuracy(&m, &data), 1.0);
    }

    #[test]
    fn separable_2d_set() {
        let mut data = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 10.0;
            data.push((vec![0.6 + 0.4 * t, 0.1 + 0.8 * ((i * 7) % 10) as f64 / 10.0], Label::Intrusion));
            data.push((vec![0.4 * t, 0.1 + 0.8 * ((i * 3) % 10) as f64 / 10.0], Label::Normal));
        }
        assert!(grid_separable(&data));
        let m = train_linear(&data, &LinearParams::default()).unwrap();
        assert_eq!(accuracy(&m, &data), 1.0);
    }

    #[test]
    fn margin_is_two_over_norm() {
        let m = LinearModel { w: vec![3.0, 4.0], b: 1.0 };
        assert!((m.margin().unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(LinearModel { w: vec![0.0], b: 0.0 }.margin(), None);
    }

    #[test]
    fn one_class_rejected() {
        let data = vec![(vec![1.0], Label::Normal), (vec![2.0], Label::Normal)];
        assert_eq!(train_linear(&data, &LinearParams::default()), Err(DetectorError::SingleClassTraining));
    }
}
