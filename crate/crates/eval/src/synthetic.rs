//! Seeded synthetic protocol generator: Gaussian clusters around per-subject
//! centers, close-range gallery media, long-range probe media, distractor
//! gallery identities and unenrolled (non-mated) probe subjects.

use lrid_core::{normalize, Modality, ModalityDims, RangeClass, Template};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{ProbeSpec, ProtocolConfig, ProtocolFile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub enrolled: usize,
    pub distractors: usize,
    pub gallery_media_per_subject: usize,
    pub probes_per_subject: usize,
    pub non_mated_probes: usize,
    pub dim: usize,
    /// Per-coordinate noise std of gallery media.
    pub gallery_noise: f64,
    /// Per-coordinate noise std of probe media.
    pub probe_noise: f64,
    /// Probability that a probe media item lacks a given non-face modality.
    pub modality_dropout: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            enrolled: 20,
            distractors: 5,
            gallery_media_per_subject: 2,
            probes_per_subject: 2,
            non_mated_probes: 10,
            dim: 16,
            gallery_noise: 0.15,
            probe_noise: 0.35,
            modality_dropout: 0.2,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn dims(&self) -> ModalityDims {
        ModalityDims::uniform(self.dim)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticProtocol {
    pub templates: Vec<Template>,
    pub protocol: ProtocolFile,
}

pub fn generate(cfg: &SyntheticConfig) -> SyntheticProtocol {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut templates = Vec::new();
    let mut gallery_media = Vec::new();
    let mut probes = Vec::new();
    let mut distractor_ids = Vec::new();

    let mut subjects: Vec<(String, bool, bool)> = Vec::new(); // (id, in gallery, distractor)
    for i in 0..cfg.enrolled {
        subjects.push((format!("s{i:03}"), true, false));
    }
    for i in 0..cfg.distractors {
        subjects.push((format!("d{i:03}"), true, true));
    }
    for i in 0..cfg.non_mated_probes {
        subjects.push((format!("u{i:03}"), false, false));
    }

    for (id, in_gallery, distractor) in &subjects {
        let centers: Vec<Vec<f64>> = Modality::ALL
            .iter()
            .map(|_| gaussian_unit(&mut rng, cfg.dim))
            .collect();
        if *in_gallery {
            if *distractor {
                distractor_ids.push(id.clone());
            }
            for k in 0..cfg.gallery_media_per_subject {
                let media = format!("{id}-g{k}");
                for m in Modality::ALL {
                    templates.push(sample(&mut rng, id, &media, m, &centers[m.index()], cfg.gallery_noise, RangeClass::Close));
                }
                gallery_media.push(media);
            }
        }
        let n_probes = match (in_gallery, distractor) {
            (true, false) => cfg.probes_per_subject,
            (false, _) => 1,
            (true, true) => 0,
        };
        for k in 0..n_probes {
            let media = format!("{id}-p{k}");
            for m in Modality::ALL {
                if m != Modality::Face && rng.random_bool(cfg.modality_dropout) {
                    continue;
                }
                templates.push(sample(&mut rng, id, &media, m, &centers[m.index()], cfg.probe_noise, RangeClass::Long));
            }
            probes.push(ProbeSpec {
                media_id: media,
                mate: None,
            });
        }
    }
    SyntheticProtocol {
        templates,
        protocol: ProtocolFile {
            gallery_media,
            probes,
            distractor_ids,
            config: ProtocolConfig::default(),
        },
    }
}

fn gaussian_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(u) = normalize(&v) {
            return u;
        }
    }
}

fn sample(
    rng: &mut ChaCha8Rng,
    subject: &str,
    media: &str,
    modality: Modality,
    center: &[f64],
    noise: f64,
    range_class: RangeClass,
) -> Template {
    let raw: Vec<f64> = center
        .iter()
        .map(|c| { let z: f64 = StandardNormal.sample(rng); c + noise * z })
        .collect();
    Template {
        subject_id: subject.to_string(),
        media_id: media.to_string(),
        modality,
        vector: normalize(&raw).unwrap_or_else(|_| center.to_vec()),
        quality: rng.random_range(0.2..1.0),
        range_class,
    }
}
