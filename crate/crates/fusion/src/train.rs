use log::debug;
use lrid_core::{Modality, PerModality, ScoreMatrix};
use serde::{Deserialize, Serialize};

use crate::{
    calibration_scores, fit_normalizer, genuine_margin, score_triplet_loss, train_quality_estimator,
    FusionError, FusionModel, NormKind, QualitySample, QualityTrainConfig, Result,
};

/// One training or evaluation probe for fusion.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionSample {
    pub scores: ScoreMatrix,
    /// Gallery row of the mate; `None` for a non-mated probe.
    pub mate: Option<usize>,
    /// Stored per-modality quality, used when no estimator is attached.
    pub quality: PerModality<f64>,
    /// Quality-estimator input features, when available.
    pub features: Option<PerModality<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionTrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub margin: f64,
}

impl Default for FusionTrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            lr: 0.5,
            margin: 1.0,
        }
    }
}

struct Prepared {
    rows: Vec<[f64; 3]>,
    quality: [f64; 3],
    mate: Option<usize>,
}

fn prepare(model: &FusionModel, samples: &[FusionSample]) -> Result<Vec<Prepared>> {
    samples
        .iter()
        .map(|s| {
            Ok(Prepared {
                rows: model.normalizer.rows(&s.scores),
                quality: model.quality_for(s.features.as_ref(), &s.quality)?,
                mate: s.mate,
            })
        })
        .collect()
}

fn objective(model: &FusionModel, data: &[Prepared], margin: f64, want_grad: bool) -> Result<(f64, Vec<f64>)> {
    let mut total = 0.0;
    let mut grad = vec![0.0; model.n_params()];
    for p in data {
        let fused: Vec<f64> = {
            let gate = model.gate.weights(&p.quality);
            p.rows
                .iter()
                .map(|row| {
                    let mut acc = 0.0;
                    for (e, w) in model.experts.iter().zip(&gate) {
                        match e.eval(row) {
                            Some(o) => acc += w * o,
                            None => return f64::NAN,
                        }
                    }
                    acc
                })
                .collect()
        };
        let (v, up) = score_triplet_loss(&fused, p.mate, margin)?;
        total += v;
        if want_grad {
            let g = model.backward_rows(&p.rows, &p.quality, &up);
            grad.iter_mut().zip(g).for_each(|(a, b)| *a += b);
        }
    }
    let n = data.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    Ok((total / n, grad))
}

/// Mean score triplet loss of `model` over `samples` and its gradient with
/// respect to [`FusionModel::params`]. The quality estimator is treated as
/// frozen.
pub fn fusion_objective(model: &FusionModel, samples: &[FusionSample], margin: f64) -> Result<(f64, Vec<f64>)> {
    if samples.is_empty() {
        return Err(FusionError::Shape("no training samples".into()));
    }
    objective(model, &prepare(model, samples)?, margin, true)
}

/// Full-batch gradient descent on the mean score triplet loss with the
/// quality estimator frozen. A step that would raise the loss is retried at
/// half the step size (up to 30 times); if none helps, training stops.
/// Returns the model and the loss after every accepted epoch, starting with
/// the initial loss.
pub fn train_fusion(
    model: &FusionModel,
    samples: &[FusionSample],
    cfg: &FusionTrainConfig,
) -> Result<(FusionModel, Vec<f64>)> {
    if !(cfg.lr >= 0.0 && cfg.lr.is_finite()) {
        return Err(FusionError::Hyperparameter("lr must be finite and >= 0".into()));
    }
    if !samples.iter().any(|s| s.mate.is_some()) {
        return Err(FusionError::NoMatedProbe);
    }
    model.validate()?;
    let data = prepare(model, samples)?;
    let mut model = model.clone();
    let (mut loss, mut grad) = objective(&model, &data, cfg.margin, true)?;
    let mut history = vec![loss];
    if cfg.lr == 0.0 {
        return Ok((model, history));
    }
    for epoch in 0..cfg.epochs {
        let params = model.params();
        let mut step = cfg.lr;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
            let mut candidate = model.clone();
            candidate.set_params(&trial)?;
            let (l, g) = objective(&candidate, &data, cfg.margin, true)?;
            if l <= loss {
                accepted = Some((candidate, l, g));
                break;
            }
            step *= 0.5;
        }
        let Some((m, l, g)) = accepted else {
            debug!("fusion training stalled at epoch {epoch}, loss {loss}");
            break;
        };
        model = m;
        loss = l;
        grad = g;
        history.push(loss);
        if loss == 0.0 {
            break;
        }
    }
    Ok((model, history))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QmeConfig {
    pub norm: NormKind,
    pub experts: usize,
    /// Modality whose quality drives a two-expert `(W, 1 - W)` gate; `None`
    /// selects the softmax gate.
    pub paired_on: Option<Modality>,
    pub jitter: f64,
    pub seed: u64,
    pub quality: QualityTrainConfig,
    pub fusion: FusionTrainConfig,
}

impl Default for QmeConfig {
    fn default() -> Self {
        Self {
            norm: NormKind::ZScore,
            experts: 2,
            paired_on: Some(Modality::Face),
            jitter: 0.05,
            seed: 0,
            quality: QualityTrainConfig::default(),
            fusion: FusionTrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub quality: PerModality<Vec<f64>>,
    pub fusion: Vec<f64>,
}

/// Per-modality ranking samples: quality features paired with the
/// genuine-score margin of each mated probe.
pub fn quality_samples(samples: &[FusionSample]) -> PerModality<Vec<QualitySample>> {
    let mut out: PerModality<Vec<QualitySample>> = PerModality::default();
    for s in samples {
        let (Some(mate), Some(features)) = (s.mate, &s.features) else {
            continue;
        };
        for (m, x) in features.iter() {
            let Some(col) = s.scores.column(m) else { continue };
            let Some(target) = genuine_margin(&col, mate) else { continue };
            let q = QualitySample {
                features: x.clone(),
                target,
            };
            match out.0[m.index()].as_mut() {
                Some(v) => v.push(q),
                None => out.set(m, vec![q]),
            }
        }
    }
    out
}

/// Two-stage training: fit the normalizer, train the quality estimator, then
/// train the experts and gate with the estimator frozen.
pub fn train_qme(samples: &[FusionSample], cfg: &QmeConfig) -> Result<(FusionModel, TrainLog)> {
    let matrices: Vec<ScoreMatrix> = samples.iter().map(|s| s.scores.clone()).collect();
    let normalizer = fit_normalizer(&calibration_scores(&matrices), cfg.norm)?;
    let mut qs = quality_samples(samples);
    for m in Modality::ALL {
        if qs.get(m).is_some_and(|v| v.len() < 2) {
            qs.take(m);
        }
    }
    let mut quality_cfg = cfg.quality.clone();
    quality_cfg.seed = cfg.seed;
    let (qe, quality_log) = train_quality_estimator(&qs, &quality_cfg)?;
    let mut model = FusionModel::init(normalizer, cfg.experts, cfg.paired_on, cfg.jitter, cfg.seed)?;
    if !qe.heads.present().is_empty() {
        model.quality_estimator = Some(qe);
    }
    let (model, fusion_log) = train_fusion(&model, samples, &cfg.fusion)?;
    Ok((
        model,
        TrainLog {
            quality: quality_log,
            fusion: fusion_log,
        },
    ))
}
