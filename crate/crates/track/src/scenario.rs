//! Scripted two-subject crossing with a mutual occlusion, for ID-switch
//! audits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{BBox, Detection, DetectionKind, DetectionSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub video_id: String,
    pub frames: u64,
    pub occlusion_start: u64,
    pub occlusion_len: u64,
    pub box_w: f64,
    pub box_h: f64,
    pub speed: f64,
    pub embedding_dim: usize,
    pub embedding_noise: f64,
    /// Add an unverified false-positive body every 10 frames.
    pub false_positives: bool,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            video_id: "crossing".into(),
            frames: 60,
            occlusion_start: 25,
            occlusion_len: 10,
            box_w: 40.0,
            box_h: 100.0,
            speed: 4.0,
            embedding_dim: 16,
            embedding_noise: 0.05,
            false_positives: true,
            seed: 0,
        }
    }
}

/// Subject 1 walks right and subject 2 walks left along the same line; their
/// boxes meet mid-occlusion. While they overlap, the detector reports one
/// merged box labelled with, and carrying the appearance of, subject 1 (in
/// front). Every primary body has a verifier twin and a face inside its head.
pub fn generate_crossing(cfg: &ScenarioConfig) -> Vec<Detection> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut center = || -> Vec<f64> { (0..cfg.embedding_dim).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let centers = [center(), center()];
    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut embed = |s: usize| -> Vec<f64> {
        centers[s]
            .iter()
            .map(|c| {
                let z: f64 = StandardNormal.sample(&mut noise_rng);
                c + cfg.embedding_noise * z
            })
            .collect()
    };

    let meet = cfg.occlusion_start as f64 + cfg.occlusion_len as f64 / 2.0;
    let cx = 320.0;
    let y = 130.0;
    let body = |s: usize, f: u64| {
        let dir = if s == 0 { 1.0 } else { -1.0 };
        BBox::new(cx - cfg.box_w / 2.0 + dir * cfg.speed * (f as f64 - meet), y, cfg.box_w, cfg.box_h)
    };
    let face = |b: &BBox| BBox::new(b.x + 0.3 * b.w, b.y + 0.05 * b.h, 0.4 * b.w, 0.16 * b.h);
    let det = |frame, kind, bbox, confidence, embedding, source, gt_id| Detection {
        video_id: cfg.video_id.clone(),
        frame,
        kind,
        bbox,
        confidence,
        embedding,
        source,
        gt_id,
    };

    let mut out = Vec::new();
    for f in 0..cfg.frames {
        let occluded = f >= cfg.occlusion_start && f < cfg.occlusion_start + cfg.occlusion_len;
        let visible: Vec<(usize, BBox, f64)> = if occluded {
            vec![(0, body(0, f).union_box(&body(1, f)), 0.8)]
        } else {
            vec![(0, body(0, f), 0.9), (1, body(1, f), 0.9)]
        };
        for (s, b, conf) in visible {
            out.push(det(f, DetectionKind::Body, b, conf, Some(embed(s)), DetectionSource::Primary, Some(s as u64 + 1)));
            let front = if occluded { body(0, f) } else { b };
            out.push(det(f, DetectionKind::Face, face(&front), conf, None, DetectionSource::Primary, Some(s as u64 + 1)));
            let shifted = BBox::new(b.x + 1.0, b.y, b.w, b.h);
            out.push(det(f, DetectionKind::Body, shifted, 0.85, None, DetectionSource::Verifier, None));
        }
        if cfg.false_positives && f % 10 == 0 {
            out.push(det(
                f,
                DetectionKind::Body,
                BBox::new(550.0, 250.0, 30.0, 30.0),
                0.65,
                Some(embed(0).iter().map(|v| -v).collect()),
                DetectionSource::Primary,
                None,
            ));
        }
    }
    out
}
