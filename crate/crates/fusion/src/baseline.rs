use lrid_core::{is_missing, ScoreMatrix};

use crate::{FusionError, Normalizer, Result};

/// Unweighted mean over the present modalities of each normalized row.
pub fn baseline_fuse(rows: &[[f64; 3]]) -> Result<Vec<f64>> {
    rows.iter()
        .enumerate()
        .map(|(g, row)| {
            let present: Vec<f64> = row.iter().copied().filter(|x| !is_missing(*x)).collect();
            if present.is_empty() {
                return Err(FusionError::MissingScore { row: g });
            }
            Ok(present.iter().sum::<f64>() / present.len() as f64)
        })
        .collect()
}

/// Normalizes a score matrix and takes the baseline mean.
pub fn baseline_fuse_matrix(s: &ScoreMatrix, normalizer: &Normalizer) -> Result<Vec<f64>> {
    baseline_fuse(&normalizer.rows(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lrid_core::MISSING;

    #[test]
    fn identical_columns() {
        let out = baseline_fuse(&[[0.3, 0.3, 0.3], [-1.0, -1.0, -1.0]]).unwrap();
        assert_eq!(out, vec![0.3, -1.0]);
    }

    #[test]
    fn missing_modality_is_skipped() {
        assert_eq!(baseline_fuse(&[[0.2, MISSING, 0.6]]).unwrap(), vec![0.4]);
        assert!(baseline_fuse(&[[MISSING; 3]]).is_err());
    }
}
