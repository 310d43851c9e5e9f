//! Two-dimensional open-set toy: exemplar embeddings drawn from Gaussian
//! clusters in the plane are optimized directly by plain gradient descent
//! on [`l_open`], one random batch partition per step, and scored on a
//! fixed open-set split (first half of the subjects enrolled).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{cosine_backward, cosine_table, l_open, partition_batch, BatchPartition, LossError, LossHyperparams, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyConfig {
    pub subjects: usize,
    pub samples_per_subject: usize,
    /// Exemplars averaged into each enrolled gallery template at evaluation.
    pub gallery_samples: usize,
    /// Std of the cluster centers around the origin.
    pub center_spread: f64,
    /// Std of the exemplars around their center.
    pub cluster_spread: f64,
    pub steps: usize,
    pub lr: f64,
    pub seed: u64,
    pub hyper: LossHyperparams,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            subjects: 10,
            samples_per_subject: 8,
            gallery_samples: 2,
            center_spread: 1.0,
            cluster_spread: 0.3,
            steps: 200,
            lr: 0.5,
            seed: 0,
            hyper: LossHyperparams::default(),
        }
    }
}

/// Exemplar embeddings, `points[subject][exemplar]`.
pub type ToyEmbeddings = Vec<Vec<Vec<f64>>>;

pub fn generate_toy(cfg: &ToyConfig) -> Result<ToyEmbeddings> {
    if cfg.subjects < 4 || cfg.samples_per_subject <= cfg.gallery_samples || cfg.gallery_samples == 0 {
        return Err(LossError::Hyperparameter(
            "toy needs >= 4 subjects and more samples per subject than gallery samples".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut points = Vec::with_capacity(cfg.subjects);
    for _ in 0..cfg.subjects {
        let c = [cfg.center_spread * normal(), cfg.center_spread * normal()];
        points.push(
            (0..cfg.samples_per_subject)
                .map(|_| vec![c[0] + cfg.cluster_spread * normal(), c[1] + cfg.cluster_spread * normal()])
                .collect(),
        );
    }
    Ok(points)
}

/// `L_open` of one random batch partition and its gradient with respect to
/// every exemplar embedding (zero for exemplars the loss ignores).
pub fn toy_objective(points: &ToyEmbeddings, hp: &LossHyperparams, seed: u64) -> Result<(f64, ToyEmbeddings)> {
    let ids: Vec<String> = (0..points.len()).map(|s| format!("s{s}")).collect();
    let counts: Vec<usize> = points.iter().map(Vec::len).collect();
    let split = partition_batch(&ids, &counts, hp.mated_fraction, seed)?;
    let probe_refs = split.probe_order();
    let probes: Vec<Vec<f64>> = probe_refs.iter().map(|e| points[e.subject][e.exemplar].clone()).collect();
    let gallery: Vec<Vec<f64>> = split.gallery.iter().map(|e| points[e.subject][e.exemplar].clone()).collect();
    let part = BatchPartition::from_split(&split, &ids, cosine_table(&probes, &gallery)?)?;
    let loss = l_open(&part, hp)?;
    let (gp, gg) = cosine_backward(&probes, &gallery, &loss.grad)?;
    let mut grad: ToyEmbeddings = points.iter().map(|s| vec![vec![0.0; 2]; s.len()]).collect();
    for (e, g) in probe_refs.iter().zip(&gp).chain(split.gallery.iter().zip(&gg)) {
        for (a, b) in grad[e.subject][e.exemplar].iter_mut().zip(g) {
            *a += b;
        }
    }
    Ok((loss.total, grad))
}

/// Plain gradient descent; step `t` uses the batch partition seeded by
/// `(seed, t)`. Returns the final embeddings and the per-step losses.
pub fn train_toy(points: &ToyEmbeddings, cfg: &ToyConfig) -> Result<(ToyEmbeddings, Vec<f64>)> {
    cfg.hyper.validate()?;
    if !(cfg.lr >= 0.0 && cfg.lr.is_finite()) {
        return Err(LossError::Hyperparameter(format!("lr must be >= 0, got {}", cfg.lr)));
    }
    let mut p = points.clone();
    let mut history = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(step as u64);
        let (loss, grad) = toy_objective(&p, &cfg.hyper, seed)?;
        history.push(loss);
        for (ps, gs) in p.iter_mut().zip(&grad) {
            for (pe, ge) in ps.iter_mut().zip(gs) {
                for (a, b) in pe.iter_mut().zip(ge) {
                    *a -= cfg.lr * b;
                }
            }
        }
    }
    Ok((p, history))
}

/// Mated score rows with their mate column, and non-mated rows.
pub type ToySearches = (Vec<(Vec<f64>, usize)>, Vec<Vec<f64>>);

/// Fixed open-set split: subjects `0..n/2` are enrolled with the mean of
/// their first `gallery_samples` exemplars and probe with the rest; every
/// exemplar of the other subjects is a non-mated probe.
pub fn toy_searches(points: &ToyEmbeddings, gallery_samples: usize) -> Result<ToySearches> {
    let enrolled = points.len() / 2;
    let gallery: Vec<Vec<f64>> = points[..enrolled]
        .iter()
        .map(|s| {
            let mut m = vec![0.0; 2];
            for e in &s[..gallery_samples] {
                let n = lrid_core::l2_norm(e);
                for (a, b) in m.iter_mut().zip(e) {
                    *a += b / n;
                }
            }
            m
        })
        .collect();
    let mut mated = Vec::new();
    let mut non_mated = Vec::new();
    for (s, exemplars) in points.iter().enumerate() {
        let probes = if s < enrolled { &exemplars[gallery_samples..] } else { &exemplars[..] };
        let table = cosine_table(probes, &gallery)?;
        for r in 0..table.rows {
            let row = table.row(r).to_vec();
            if s < enrolled {
                mated.push((row, s));
            } else {
                non_mated.push(row);
            }
        }
    }
    Ok((mated, non_mated))
}
