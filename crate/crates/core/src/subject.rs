use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{aggregate_gallery, CoreError, Modality, PerModality, Result, Template};

/// One enrolled (or distractor) gallery identity with an aggregated unit
/// vector per available modality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalleryEntry {
    pub subject_id: String,
    pub is_distractor: bool,
    pub vectors: PerModality<Vec<f64>>,
    pub media_count: usize,
}

impl GalleryEntry {
    /// Aggregates all templates of one subject, modality by modality.
    pub fn from_templates(
        subject_id: &str,
        is_distractor: bool,
        templates: &[Template],
    ) -> Result<Self> {
        if templates.is_empty() {
            return Err(CoreError::EmptyAggregation);
        }
        let vectors = aggregate_by_modality(templates)?;
        let mut media: Vec<&str> = templates.iter().map(|t| t.media_id.as_str()).collect();
        media.sort_unstable();
        media.dedup();
        Ok(Self {
            subject_id: subject_id.to_string(),
            is_distractor,
            vectors,
            media_count: media.len(),
        })
    }

    pub fn vector(&self, m: Modality) -> Option<&[f64]> {
        self.vectors.get(m).map(Vec::as_slice)
    }
}

/// A search probe. `true_subject_id` is `None` for non-mated probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe_id: String,
    pub true_subject_id: Option<String>,
    pub vectors: PerModality<Vec<f64>>,
    pub quality: PerModality<f64>,
}

impl ProbeRecord {
    /// Builds a probe from the templates of one probe media item. Quality per
    /// modality is the mean template quality.
    pub fn from_templates(
        probe_id: &str,
        true_subject_id: Option<String>,
        templates: &[Template],
    ) -> Result<Self> {
        if templates.is_empty() {
            return Err(CoreError::EmptyAggregation);
        }
        let vectors = aggregate_by_modality(templates)?;
        let mut quality = PerModality::default();
        for m in vectors.present() {
            let qs: Vec<f64> = templates
                .iter()
                .filter(|t| t.modality == m)
                .map(|t| t.quality)
                .collect();
            quality.set(m, qs.iter().sum::<f64>() / qs.len() as f64);
        }
        Ok(Self {
            probe_id: probe_id.to_string(),
            true_subject_id,
            vectors,
            quality,
        })
    }

    pub fn vector(&self, m: Modality) -> Option<&[f64]> {
        self.vectors.get(m).map(Vec::as_slice)
    }
}

fn aggregate_by_modality(templates: &[Template]) -> Result<PerModality<Vec<f64>>> {
    let mut groups: BTreeMap<Modality, Vec<Template>> = BTreeMap::new();
    for t in templates {
        // aggregate_gallery insists on one subject; the caller has already
        // grouped by identity so the id is unified here.
        let mut t = t.clone();
        t.subject_id.clear();
        groups.entry(t.modality).or_default().push(t);
    }
    let mut out = PerModality::default();
    for (m, group) in groups {
        out.set(m, aggregate_gallery(&group)?);
    }
    Ok(out)
}
