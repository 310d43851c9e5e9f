use crate::{CoreError, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Returns `v / ‖v‖₂`.
pub fn normalize(v: &[f64]) -> Result<Vec<f64>> {
    let norm = l2_norm(v);
    if !norm.is_finite() || norm <= f64::MIN_POSITIVE {
        return Err(CoreError::Normalization(format!(
            "vector norm {norm} is zero or not finite"
        )));
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

/// Cosine similarity of two unit vectors, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(CoreError::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(dot(a, b).clamp(-1.0, 1.0))
}
