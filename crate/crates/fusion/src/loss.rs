use lrid_core::is_missing;

use crate::{FusionError, Result};

/// Mean of `ReLU(S′_nm)` over present non-match entries, plus `ReLU(m − S′_mat)`
/// when the probe is mated. Returns the value and dL/dS′ (MISSING entries get 0).
pub fn score_triplet_loss(fused: &[f64], mate: Option<usize>, margin: f64) -> Result<(f64, Vec<f64>)> {
    if !(margin > 0.0) {
        return Err(FusionError::Hyperparameter("score triplet margin must be > 0".into()));
    }
    if let Some(m) = mate {
        if m >= fused.len() {
            return Err(FusionError::Shape(format!("mate index {m} outside gallery of {}", fused.len())));
        }
    }
    let mut grad = vec![0.0; fused.len()];
    let non_match: Vec<usize> = (0..fused.len())
        .filter(|g| Some(*g) != mate && !is_missing(fused[*g]))
        .collect();
    let mut value = 0.0;
    if !non_match.is_empty() {
        let n = non_match.len() as f64;
        let mut acc = 0.0;
        for &g in &non_match {
            if fused[g] > 0.0 {
                acc += fused[g];
                grad[g] = 1.0 / n;
            }
        }
        value += acc / n;
    }
    if let Some(m) = mate {
        let s = fused[m];
        if !is_missing(s) && margin - s > 0.0 {
            value += margin - s;
            grad[m] = -1.0;
        }
    }
    Ok((value, grad))
}
