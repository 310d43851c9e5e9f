use serde::{Deserialize, Serialize};

use crate::{cosine_similarity, CoreError, GalleryEntry, Modality, ProbeRecord, Result};

/// Sentinel for a score that could not be computed because one side lacks the
/// modality. Never compare against it; use [`is_missing`].
pub const MISSING: f64 = f64::NAN;

pub fn is_missing(score: f64) -> bool {
    score.is_nan()
}

/// Scores of one probe against every gallery identity, one column per
/// modality in canonical (face, gait, body) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub probe_id: String,
    pub gallery_ids: Vec<String>,
    pub modalities: Vec<Modality>,
    /// Row-major, `gallery_ids.len() × modalities.len()`.
    pub scores: Vec<f64>,
    pub fused: Option<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(
        probe_id: impl Into<String>,
        gallery_ids: Vec<String>,
        modalities: Vec<Modality>,
        scores: Vec<f64>,
    ) -> Result<Self> {
        if scores.len() != gallery_ids.len() * modalities.len() {
            return Err(CoreError::Dimension {
                expected: gallery_ids.len() * modalities.len(),
                found: scores.len(),
            });
        }
        if modalities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::Format(
                "score matrix columns must follow face, gait, body order".into(),
            ));
        }
        Ok(Self {
            probe_id: probe_id.into(),
            gallery_ids,
            modalities,
            scores,
            fused: None,
        })
    }

    pub fn n_gallery(&self) -> usize {
        self.gallery_ids.len()
    }

    pub fn n_modalities(&self) -> usize {
        self.modalities.len()
    }

    pub fn column_of(&self, m: Modality) -> Option<usize> {
        self.modalities.iter().position(|x| *x == m)
    }

    pub fn row(&self, g: usize) -> &[f64] {
        let n = self.n_modalities();
        &self.scores[g * n..(g + 1) * n]
    }

    /// Score for gallery row `g` and modality `m`; `None` when the column is
    /// absent or the entry is MISSING.
    pub fn score(&self, g: usize, m: Modality) -> Option<f64> {
        let c = self.column_of(m)?;
        let s = self.row(g)[c];
        (!is_missing(s)).then_some(s)
    }

    /// The full column for modality `m` (MISSING entries kept as NaN).
    pub fn column(&self, m: Modality) -> Option<Vec<f64>> {
        let c = self.column_of(m)?;
        Some((0..self.n_gallery()).map(|g| self.row(g)[c]).collect())
    }

    pub fn gallery_index(&self, subject_id: &str) -> Option<usize> {
        self.gallery_ids.iter().position(|g| g == subject_id)
    }
}

/// Cosine score of the probe against every gallery entry for each modality
/// the probe carries.
pub fn build_score_matrix(probe: &ProbeRecord, gallery: &[GalleryEntry]) -> Result<ScoreMatrix> {
    let modalities = probe.vectors.present();
    if modalities.is_empty() {
        return Err(CoreError::Format(format!(
            "probe {} has no modality vectors",
            probe.probe_id
        )));
    }
    if gallery.is_empty() {
        return Err(CoreError::Format("gallery is empty".into()));
    }
    let mut scores = Vec::with_capacity(gallery.len() * modalities.len());
    for entry in gallery {
        for &m in &modalities {
            let s = match (probe.vector(m), entry.vector(m)) {
                (Some(p), Some(g)) => cosine_similarity(p, g)?,
                _ => MISSING,
            };
            scores.push(s);
        }
    }
    ScoreMatrix::new(
        probe.probe_id.clone(),
        gallery.iter().map(|g| g.subject_id.clone()).collect(),
        modalities,
        scores,
    )
}
