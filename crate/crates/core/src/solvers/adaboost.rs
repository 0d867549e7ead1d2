//! Embedding of boosting problems as diagonal partition-function problems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;

/// Threshold classifier on one feature: `polarity` if `x[feature] > threshold`,
/// `−polarity` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionStump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: f64,
}

impl DecisionStump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        if x[self.feature] > self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

/// `outputs[j][i] = h_j(x_i)`.
pub fn stump_outputs(stumps: &[DecisionStump], features: &[Vec<f64>]) -> Vec<Vec<f64>> {
    stumps
        .iter()
        .map(|s| features.iter().map(|x| s.eval(x)).collect())
        .collect()
}

fn check_labels(labels: &[f64], outputs: &[Vec<f64>]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("at least one example is required".into()));
    }
    for (i, &y) in labels.iter().enumerate() {
        if y != 1.0 && y != -1.0 {
            return Err(Error::LabelRange(format!("label y_{i} = {y} is not ±1")));
        }
    }
    for (j, row) in outputs.iter().enumerate() {
        if row.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                context: format!("outputs of hypothesis {j}"),
                expected: labels.len(),
                found: row.len(),
            });
        }
        if let Some((i, h)) = row.iter().enumerate().find(|(_, h)| !(h.abs() <= 1.0)) {
            return Err(Error::LabelRange(format!("h_{j}(x_{i}) = {h} lies outside [-1, 1]")));
        }
    }
    Ok(())
}

/// `F_j = Σ_i −y_i h_j(x_i) |i⟩⟨i|`, so that `tr exp(λ·F)` is the exponential
/// loss of the combined classifier `Σ_j λ_j h_j`.
pub fn adaboost_embed(labels: &[f64], outputs: &[Vec<f64>]) -> Result<Vec<HermitianMatrix>> {
    check_labels(labels, outputs)?;
    outputs
        .iter()
        .map(|row| {
            let d: Vec<f64> = row.iter().zip(labels).map(|(h, y)| -y * h).collect();
            HermitianMatrix::from_diagonal(&d)
        })
        .collect()
}

/// `Σ_i exp(−y_i Σ_j λ_j h_j(x_i))`.
pub fn exponential_loss(labels: &[f64], outputs: &[Vec<f64>], lambda: &[f64]) -> Result<f64> {
    check_labels(labels, outputs)?;
    if lambda.len() != outputs.len() {
        return Err(Error::DimensionMismatch {
            context: "weight vector".into(),
            expected: outputs.len(),
            found: lambda.len(),
        });
    }
    Ok(labels
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let margin: f64 = outputs.iter().zip(lambda).map(|(row, l)| l * row[i]).sum();
            (-y * margin).exp()
        })
        .sum())
}
