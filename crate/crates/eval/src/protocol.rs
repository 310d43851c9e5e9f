use std::collections::{BTreeMap, BTreeSet, HashMap};

use lrid_core::{
    build_score_matrix, is_missing, GalleryEntry, Modality, ProbeRecord, ScoreMatrix, Template,
};
use serde::{Deserialize, Serialize};

use crate::{
    fnir_at_fpir, rank_k_accuracy, tar_at_far, EvalError, EvalReport, MatedSearch, MetricRow,
    ReportCounts, Result,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub far_targets: Vec<f64>,
    pub fpir_target: f64,
    pub rank_k: usize,
    pub modalities: Vec<Modality>,
    pub fusion: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            far_targets: vec![1e-3, 1e-4],
            fpir_target: 0.01,
            rank_k: 20,
            modalities: Modality::ALL.to_vec(),
            fusion: true,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        for &t in self.far_targets.iter().chain([&self.fpir_target]) {
            if !(t > 0.0 && t < 1.0) {
                return Err(EvalError::InvalidTarget(t));
            }
        }
        if self.rank_k == 0 {
            return Err(EvalError::Protocol("rank_k must be >= 1".into()));
        }
        Ok(())
    }
}

/// `protocol.json`: which media form the gallery and the probe set, and
/// which gallery identities are distractors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub gallery_media: Vec<String>,
    pub probes: Vec<ProbeSpec>,
    #[serde(default)]
    pub distractor_ids: Vec<String>,
    #[serde(default)]
    pub config: ProtocolConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub media_id: String,
    /// Declared mate; when omitted it is inferred from the probe's subject if
    /// that subject is enrolled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mate: Option<String>,
}

/// Gallery and probes resolved from a template store.
#[derive(Debug, Clone)]
pub struct ProtocolInputs {
    pub gallery: Vec<GalleryEntry>,
    pub probes: Vec<ProbeRecord>,
    pub config: ProtocolConfig,
}

/// Resolves `protocol` against a template store. Gallery identities are
/// ordered by subject id; probes keep protocol order.
pub fn load_protocol(protocol: &ProtocolFile, templates: &[Template]) -> Result<ProtocolInputs> {
    protocol.config.validate()?;
    let mut by_media: HashMap<&str, Vec<&Template>> = HashMap::new();
    for t in templates {
        by_media.entry(t.media_id.as_str()).or_default().push(t);
    }
    let distractors: BTreeSet<&str> = protocol.distractor_ids.iter().map(String::as_str).collect();

    let mut gallery_groups: BTreeMap<&str, Vec<Template>> = BTreeMap::new();
    for media in &protocol.gallery_media {
        let ts = by_media
            .get(media.as_str())
            .ok_or_else(|| EvalError::Protocol(format!("gallery media {media} not in store")))?;
        for t in ts {
            gallery_groups
                .entry(t.subject_id.as_str())
                .or_default()
                .push((*t).clone());
        }
    }
    for d in &distractors {
        if !gallery_groups.contains_key(d) {
            return Err(EvalError::Protocol(format!(
                "distractor {d} has no gallery media"
            )));
        }
    }
    let gallery = gallery_groups
        .iter()
        .map(|(subject, ts)| GalleryEntry::from_templates(subject, distractors.contains(subject), ts))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut seen = BTreeSet::new();
    let mut probes = Vec::with_capacity(protocol.probes.len());
    for spec in &protocol.probes {
        if !seen.insert(spec.media_id.as_str()) {
            return Err(EvalError::Protocol(format!("probe media {} listed twice", spec.media_id)));
        }
        let ts = by_media
            .get(spec.media_id.as_str())
            .ok_or_else(|| EvalError::Protocol(format!("probe media {} not in store", spec.media_id)))?;
        let subject = ts[0].subject_id.as_str();
        if ts.iter().any(|t| t.subject_id != subject) {
            return Err(EvalError::Protocol(format!(
                "probe media {} mixes subjects",
                spec.media_id
            )));
        }
        let enrolled = gallery_groups.contains_key(subject);
        let mate = match &spec.mate {
            Some(m) => {
                if m != subject {
                    return Err(EvalError::Protocol(format!(
                        "probe {} declares mate {m} but belongs to {subject}",
                        spec.media_id
                    )));
                }
                Some(m.clone())
            }
            None if enrolled => Some(subject.to_string()),
            None => None,
        };
        if let Some(m) = &mate {
            if !gallery_groups.contains_key(m.as_str()) {
                return Err(EvalError::Protocol(format!(
                    "mate {m} of probe {} is missing from the gallery",
                    spec.media_id
                )));
            }
            if distractors.contains(m.as_str()) {
                return Err(EvalError::Protocol(format!(
                    "probe {} is mated with distractor {m}",
                    spec.media_id
                )));
            }
        }
        let owned: Vec<Template> = ts.iter().map(|t| (*t).clone()).collect();
        probes.push(ProbeRecord::from_templates(&spec.media_id, mate, &owned)?);
    }
    Ok(ProtocolInputs {
        gallery,
        probes,
        config: protocol.config.clone(),
    })
}

/// Fills the fused column of a score matrix for one probe.
pub type Fuser<'a> = dyn Fn(&ScoreMatrix, &ProbeRecord) -> lrid_core::Result<Vec<f64>> + 'a;

/// Scores every probe against the gallery, optionally fuses, and computes
/// verification, closed-set and open-set metrics per modality and for the
/// fused column. Returns the report and the score matrices.
pub fn run_protocol(
    inputs: &ProtocolInputs,
    fuser: Option<&Fuser<'_>>,
) -> Result<(EvalReport, Vec<ScoreMatrix>)> {
    let config = &inputs.config;
    config.validate()?;
    if inputs.gallery.is_empty() {
        return Err(EvalError::Protocol("gallery is empty".into()));
    }
    let mut matrices = Vec::with_capacity(inputs.probes.len());
    let mut mates = Vec::with_capacity(inputs.probes.len());
    for probe in &inputs.probes {
        let mut s = build_score_matrix(probe, &inputs.gallery)?;
        let mate = match &probe.true_subject_id {
            Some(id) => {
                let g = s.gallery_index(id).ok_or_else(|| {
                    EvalError::Protocol(format!("mate {id} of {} missing", probe.probe_id))
                })?;
                if inputs.gallery[g].is_distractor {
                    return Err(EvalError::Protocol(format!(
                        "probe {} is mated with distractor {id}",
                        probe.probe_id
                    )));
                }
                Some(g)
            }
            None => None,
        };
        if config.fusion {
            if let Some(f) = fuser {
                s.fused = Some(f(&s, probe)?);
            }
        }
        matrices.push(s);
        mates.push(mate);
    }

    let mut sources: Vec<(String, Vec<Option<Vec<f64>>>)> = Vec::new();
    for &m in &config.modalities {
        sources.push((
            m.as_str().to_string(),
            matrices.iter().map(|s| s.column(m)).collect(),
        ));
    }
    if config.fusion && matrices.iter().any(|s| s.fused.is_some()) {
        sources.push((
            "fused".to_string(),
            matrices.iter().map(|s| s.fused.clone()).collect(),
        ));
    }

    let mut rows = Vec::new();
    for (name, columns) in &sources {
        rows.extend(source_metrics(name, columns, &mates, config)?);
    }
    let counts = ReportCounts {
        gallery_size: inputs.gallery.len(),
        distractors: inputs.gallery.iter().filter(|g| g.is_distractor).count(),
        mated_probes: mates.iter().filter(|m| m.is_some()).count(),
        non_mated_probes: mates.iter().filter(|m| m.is_none()).count(),
    };
    Ok((EvalReport { counts, rows }, matrices))
}

fn source_metrics(
    source: &str,
    columns: &[Option<Vec<f64>>],
    mates: &[Option<usize>],
    config: &ProtocolConfig,
) -> Result<Vec<MetricRow>> {
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    let mut mated: Vec<MatedSearch<'_>> = Vec::new();
    let mut non_mated: Vec<&[f64]> = Vec::new();
    for (col, mate) in columns.iter().zip(mates) {
        let Some(col) = col else { continue };
        if col.iter().all(|x| is_missing(*x)) {
            continue;
        }
        for (g, &s) in col.iter().enumerate() {
            if is_missing(s) {
                continue;
            }
            if Some(g) == *mate {
                genuine.push(s);
            } else {
                impostor.push(s);
            }
        }
        match mate {
            Some(m) => mated.push(MatedSearch {
                scores: col,
                mate: *m,
            }),
            None => non_mated.push(col),
        }
    }
    let mut rows = Vec::new();
    let base = MetricRow {
        source: source.to_string(),
        metric: String::new(),
        target: None,
        value: 0.0,
        threshold: None,
        mated_searches: mated.len(),
        non_mated_searches: non_mated.len(),
        genuine_pairs: genuine.len(),
        impostor_pairs: impostor.len(),
    };
    if !genuine.is_empty() && !impostor.is_empty() {
        for &far in &config.far_targets {
            let (tar, tau) = tar_at_far(&genuine, &impostor, far)?;
            rows.push(MetricRow {
                metric: "tar_at_far".into(),
                target: Some(far),
                value: tar,
                threshold: Some(tau),
                ..base.clone()
            });
        }
    }
    if !mated.is_empty() {
        rows.push(MetricRow {
            metric: "rank_k".into(),
            target: Some(config.rank_k as f64),
            value: rank_k_accuracy(&mated, config.rank_k)?,
            ..base.clone()
        });
        rows.push(MetricRow {
            metric: "rank_1".into(),
            target: Some(1.0),
            value: rank_k_accuracy(&mated, 1)?,
            ..base.clone()
        });
        if !non_mated.is_empty() {
            let (fnir, tau) = fnir_at_fpir(&mated, &non_mated, config.fpir_target)?;
            rows.push(MetricRow {
                metric: "fnir_at_fpir".into(),
                target: Some(config.fpir_target),
                value: fnir,
                threshold: Some(tau),
                ..base
            });
        }
    }
    Ok(rows)
}
