use serde::{Deserialize, Serialize};

use crate::{LossError, Result};

/// Hyperparameters of the open-set and triplet objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossHyperparams {
    /// Sharpness of the detection sigmoid.
    pub alpha: f64,
    /// Sharpness of the identification sigmoid.
    pub beta: f64,
    /// Sharpness of the soft-rank sigmoid.
    pub gamma: f64,
    /// Weight of the relative-threshold term.
    pub lambda: f64,
    pub margin: f64,
    /// Fraction of subjects drawn as mated when partitioning a batch.
    pub mated_fraction: f64,
    /// Whether soft-rank counts the mate against itself (adds a constant 0.5).
    pub softrank_self_term: bool,
}

impl Default for LossHyperparams {
    fn default() -> Self {
        Self {
            alpha: 16.0,
            beta: 16.0,
            gamma: 16.0,
            lambda: 0.5,
            margin: 0.3,
            mated_fraction: 0.5,
            softrank_self_term: true,
        }
    }
}

impl LossHyperparams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("margin", self.margin),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LossError::Hyperparameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(LossError::Hyperparameter(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.mated_fraction > 0.0 && self.mated_fraction <= 1.0) {
            return Err(LossError::Hyperparameter(format!(
                "mated_fraction must be in (0, 1], got {}",
                self.mated_fraction
            )));
        }
        Ok(())
    }
}
