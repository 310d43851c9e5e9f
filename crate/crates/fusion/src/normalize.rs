use lrid_core::{is_missing, Modality, PerModality, ScoreMatrix, MISSING};
use serde::{Deserialize, Serialize};

use crate::{FusionError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    ZScore,
    MinMax,
}

/// `(s - shift) / scale`. For z-score, shift is the mean and scale the
/// population standard deviation; for min-max, the minimum and the range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalityStats {
    pub shift: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub kind: NormKind,
    pub stats: PerModality<ModalityStats>,
}

/// Fits per-modality statistics. MISSING entries are ignored; every modality
/// given must have at least two finite scores and a non-degenerate spread.
pub fn fit_normalizer(calibration: &PerModality<Vec<f64>>, kind: NormKind) -> Result<Normalizer> {
    let mut stats = PerModality::default();
    for (m, scores) in calibration.iter() {
        let xs: Vec<f64> = scores.iter().copied().filter(|s| !is_missing(*s)).collect();
        let fail = |reason: &str| FusionError::Normalization {
            modality: m.to_string(),
            reason: reason.to_string(),
        };
        if xs.len() < 2 {
            return Err(fail("fewer than two scores"));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(fail("non-finite score"));
        }
        let s = match kind {
            NormKind::ZScore => {
                let n = xs.len() as f64;
                let mean = xs.iter().sum::<f64>() / n;
                let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
                ModalityStats {
                    shift: mean,
                    scale: var.sqrt(),
                }
            }
            NormKind::MinMax => {
                let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                ModalityStats {
                    shift: lo,
                    scale: hi - lo,
                }
            }
        };
        if !(s.scale > 1e-12 * s.shift.abs().max(1.0)) {
            return Err(fail("zero spread"));
        }
        stats.set(m, s);
    }
    Ok(Normalizer { kind, stats })
}

/// Collects every non-MISSING score of each modality across the matrices.
pub fn calibration_scores(matrices: &[ScoreMatrix]) -> PerModality<Vec<f64>> {
    let mut out: PerModality<Vec<f64>> = PerModality::default();
    for s in matrices {
        for m in Modality::ALL {
            if let Some(col) = s.column(m) {
                let xs: Vec<f64> = col.into_iter().filter(|x| !is_missing(*x)).collect();
                if xs.is_empty() {
                    continue;
                }
                match out.0[m.index()].as_mut() {
                    Some(v) => v.extend(xs),
                    None => out.set(m, xs),
                }
            }
        }
    }
    out
}

impl Normalizer {
    pub fn apply(&self, m: Modality, score: f64) -> f64 {
        match self.stats.get(m) {
            Some(s) if !is_missing(score) => (score - s.shift) / s.scale,
            _ => MISSING,
        }
    }

    /// Normalized rows indexed by modality; a modality absent from the matrix
    /// or unknown to the normalizer reads as MISSING.
    pub fn rows(&self, s: &ScoreMatrix) -> Vec<[f64; 3]> {
        (0..s.n_gallery())
            .map(|g| {
                let mut row = [MISSING; 3];
                for m in Modality::ALL {
                    if let Some(c) = s.column_of(m) {
                        row[m.index()] = self.apply(m, s.row(g)[c]);
                    }
                }
                row
            })
            .collect()
    }
}
