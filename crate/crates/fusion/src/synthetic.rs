//! Score matrices for fusion experiments in which the face modality's
//! reliability is governed by a per-probe quality.

use lrid_core::{build_score_matrix, normalize, GalleryEntry, Modality, PerModality, ProbeRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{FusionSample, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QualityDataConfig {
    pub subjects: usize,
    pub dim: usize,
    pub probes: usize,
    pub mated_fraction: f64,
    pub gallery_noise: f64,
    /// Face noise is `face_noise_min + face_noise_gain * (1 - quality)`.
    pub face_noise_min: f64,
    pub face_noise_gain: f64,
    pub other_noise: f64,
    /// Noise on the observed quality feature.
    pub feature_noise: f64,
    pub seed: u64,
}

impl Default for QualityDataConfig {
    fn default() -> Self {
        Self {
            subjects: 30,
            dim: 32,
            probes: 600,
            mated_fraction: 0.7,
            gallery_noise: 0.1,
            face_noise_min: 0.5,
            face_noise_gain: 8.0,
            other_noise: 2.0,
            feature_noise: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QualityData {
    pub samples: Vec<FusionSample>,
    pub true_quality: Vec<f64>,
}

fn noisy(center: &[f64], sigma: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let scale = sigma / (center.len() as f64).sqrt();
    let v: Vec<f64> = center
        .iter()
        .map(|c| {
            let z: f64 = StandardNormal.sample(rng);
            c + scale * z
        })
        .collect();
    Ok(normalize(&v)?)
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    Ok(normalize(&v)?)
}

/// Generates one shared gallery and `probes` probes, all three modalities
/// present. Quality features are given for face only.
pub fn generate_quality_data(cfg: &QualityDataConfig) -> Result<QualityData> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let centers: Vec<[Vec<f64>; 3]> = (0..cfg.subjects)
        .map(|_| {
            Ok([
                random_unit(cfg.dim, &mut rng)?,
                random_unit(cfg.dim, &mut rng)?,
                random_unit(cfg.dim, &mut rng)?,
            ])
        })
        .collect::<Result<_>>()?;
    let gallery: Vec<GalleryEntry> = centers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut vectors = PerModality::default();
            for m in Modality::ALL {
                vectors.set(m, noisy(&c[m.index()], cfg.gallery_noise, &mut rng)?);
            }
            Ok(GalleryEntry {
                subject_id: format!("s{i:03}"),
                is_distractor: false,
                vectors,
                media_count: 1,
            })
        })
        .collect::<Result<_>>()?;

    let mut samples = Vec::with_capacity(cfg.probes);
    let mut true_quality = Vec::with_capacity(cfg.probes);
    for p in 0..cfg.probes {
        let q: f64 = rng.random();
        let mated = rng.random::<f64>() < cfg.mated_fraction;
        let (mate, source) = if mated {
            let s = rng.random_range(0..cfg.subjects);
            (Some(s), centers[s].clone())
        } else {
            (
                None,
                [
                    random_unit(cfg.dim, &mut rng)?,
                    random_unit(cfg.dim, &mut rng)?,
                    random_unit(cfg.dim, &mut rng)?,
                ],
            )
        };
        let face_sigma = cfg.face_noise_min + cfg.face_noise_gain * (1.0 - q);
        let mut vectors = PerModality::default();
        vectors.set(Modality::Face, noisy(&source[0], face_sigma, &mut rng)?);
        vectors.set(Modality::Gait, noisy(&source[1], cfg.other_noise, &mut rng)?);
        vectors.set(Modality::Body, noisy(&source[2], cfg.other_noise, &mut rng)?);
        let z: f64 = StandardNormal.sample(&mut rng);
        let observed = q + cfg.feature_noise * z;
        let mut quality = PerModality::default();
        quality.set(Modality::Face, observed.clamp(0.0, 1.0));
        quality.set(Modality::Gait, 0.5);
        quality.set(Modality::Body, 0.5);
        let mut features = PerModality::default();
        features.set(Modality::Face, vec![observed]);
        let probe = ProbeRecord {
            probe_id: format!("p{p:04}"),
            true_subject_id: mate.map(|s| gallery[s].subject_id.clone()),
            vectors,
            quality: quality.clone(),
        };
        samples.push(FusionSample {
            scores: build_score_matrix(&probe, &gallery)?,
            mate,
            quality,
            features: Some(features),
        });
        true_quality.push(q);
    }
    Ok(QualityData {
        samples,
        true_quality,
    })
}
