use std::collections::HashMap;
use std::io::{Read, Write};

use lrid_core::{Modality, PerModality, ScoreMatrix};
use serde::Deserialize;

use crate::{FusionError, FusionModel, FusionSample, Result};

pub fn write_model_json<W: Write>(model: &FusionModel, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, model)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_model_json<R: Read>(r: R) -> Result<FusionModel> {
    let model: FusionModel = serde_json::from_reader(r)?;
    model.validate()?;
    Ok(model)
}

/// Per-probe labels: the mate's gallery id (empty for non-mated) and stored
/// per-modality quality (empty when absent).
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ProbeLabel {
    pub probe_id: String,
    #[serde(default)]
    pub mate_id: Option<String>,
    #[serde(default)]
    pub face_quality: Option<f64>,
    #[serde(default)]
    pub gait_quality: Option<f64>,
    #[serde(default)]
    pub body_quality: Option<f64>,
}

pub const LABELS_HEADER: [&str; 5] = ["probe_id", "mate_id", "face_quality", "gait_quality", "body_quality"];

impl ProbeLabel {
    pub fn quality(&self) -> PerModality<f64> {
        let mut q = PerModality::default();
        for (m, v) in [
            (Modality::Face, self.face_quality),
            (Modality::Gait, self.gait_quality),
            (Modality::Body, self.body_quality),
        ] {
            if let Some(v) = v {
                q.set(m, v);
            }
        }
        q
    }
}

pub fn read_labels_csv<R: Read>(r: R) -> Result<Vec<ProbeLabel>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(LABELS_HEADER.iter().copied()) {
        return Err(FusionError::Labels(format!(
            "expected header {}, found {}",
            LABELS_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        let mut label: ProbeLabel = rec?;
        if label.mate_id.as_deref() == Some("") {
            label.mate_id = None;
        }
        out.push(label);
    }
    Ok(out)
}

/// Joins score matrices with their labels. Stored quality doubles as the
/// one-element quality-feature vector of each modality.
pub fn samples_from_labels(matrices: &[ScoreMatrix], labels: &[ProbeLabel]) -> Result<Vec<FusionSample>> {
    let by_id: HashMap<&str, &ProbeLabel> = labels.iter().map(|l| (l.probe_id.as_str(), l)).collect();
    matrices
        .iter()
        .map(|s| {
            let label = by_id
                .get(s.probe_id.as_str())
                .ok_or_else(|| FusionError::Labels(format!("no label for probe {}", s.probe_id)))?;
            let mate = match &label.mate_id {
                Some(id) => Some(s.gallery_index(id).ok_or_else(|| {
                    FusionError::Labels(format!("mate {id} of probe {} not in gallery", s.probe_id))
                })?),
                None => None,
            };
            let quality = label.quality();
            let mut features = PerModality::default();
            for (m, q) in quality.iter() {
                features.set(m, vec![*q]);
            }
            Ok(FusionSample {
                scores: s.clone(),
                mate,
                quality,
                features: Some(features),
            })
        })
        .collect()
}
