use lrid_core::{is_missing, PerModality};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{FusionError, Result};

/// `W = sigmoid(w·x + b)` for one modality's quality-feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityHead {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl QualityHead {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(FusionError::Shape(format!(
                "quality features have {} entries, estimator expects {}",
                x.len(),
                self.weights.len()
            )));
        }
        let z: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        Ok(sigmoid(z))
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QualityEstimator {
    pub heads: PerModality<QualityHead>,
}

impl QualityEstimator {
    /// Quality weight for every modality that has both a head and features.
    pub fn estimate(&self, features: &PerModality<Vec<f64>>) -> Result<PerModality<f64>> {
        let mut out = PerModality::default();
        for (m, x) in features.iter() {
            if let Some(h) = self.heads.get(m) {
                out.set(m, h.eval(x)?);
            }
        }
        Ok(out)
    }
}

/// One training probe for a quality head.
#[derive(Debug, Clone, PartialEq)]
pub struct QualitySample {
    pub features: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityTrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub margin: f64,
    pub init_std: f64,
    pub seed: u64,
}

impl Default for QualityTrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            lr: 1.0,
            margin: 0.1,
            init_std: 0.01,
            seed: 0,
        }
    }
}

/// Mate score minus the best non-mate score; `None` when the mate score is
/// MISSING or there is no present non-mate.
pub fn genuine_margin(column: &[f64], mate: usize) -> Option<f64> {
    let s = *column.get(mate)?;
    if is_missing(s) {
        return None;
    }
    let best = column
        .iter()
        .enumerate()
        .filter(|(g, x)| *g != mate && !is_missing(**x))
        .map(|(_, x)| *x)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    best.map(|b| s - b)
}

/// Mean pairwise margin ranking loss over ordered pairs `t_i > t_j`:
/// `max(0, margin - (W_i - W_j))`. Returns the value and dL/dW.
pub fn ranking_loss(w: &[f64], targets: &[f64], margin: f64) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; w.len()];
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..w.len() {
        for j in 0..w.len() {
            if targets[i] > targets[j] {
                pairs += 1;
                let h = margin - (w[i] - w[j]);
                if h > 0.0 {
                    total += h;
                    grad[i] -= 1.0;
                    grad[j] += 1.0;
                }
            }
        }
    }
    if pairs == 0 {
        return (0.0, grad);
    }
    let n = pairs as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (total / n, grad)
}

/// Fraction of ordered pairs whose predicted order matches the targets.
pub fn ranking_accuracy(w: &[f64], targets: &[f64]) -> f64 {
    let mut ok = 0usize;
    let mut pairs = 0usize;
    for i in 0..w.len() {
        for j in 0..w.len() {
            if targets[i] > targets[j] {
                pairs += 1;
                if w[i] > w[j] {
                    ok += 1;
                }
            }
        }
    }
    if pairs == 0 {
        1.0
    } else {
        ok as f64 / pairs as f64
    }
}

/// Loss of a head over a sample set, plus the gradient with respect to
/// `(weights.., bias)`.
pub fn head_loss(head: &QualityHead, samples: &[QualitySample], margin: f64) -> Result<(f64, Vec<f64>)> {
    let w = samples
        .iter()
        .map(|s| head.eval(&s.features))
        .collect::<Result<Vec<f64>>>()?;
    let t: Vec<f64> = samples.iter().map(|s| s.target).collect();
    let (value, dw) = ranking_loss(&w, &t, margin);
    let d = head.weights.len();
    let mut grad = vec![0.0; d + 1];
    for ((s, wi), gi) in samples.iter().zip(&w).zip(&dw) {
        let dz = gi * wi * (1.0 - wi);
        for k in 0..d {
            grad[k] += dz * s.features[k];
        }
        grad[d] += dz;
    }
    Ok((value, grad))
}

/// Trains one quality head by full-batch gradient descent on the ranking
/// loss. Returns the head and the loss before each epoch plus the final one.
pub fn train_quality_head(
    samples: &[QualitySample],
    cfg: &QualityTrainConfig,
) -> Result<(QualityHead, Vec<f64>)> {
    if !(cfg.lr >= 0.0 && cfg.lr.is_finite()) || !(cfg.margin >= 0.0) || !(cfg.init_std >= 0.0) {
        return Err(FusionError::Hyperparameter("lr, margin and init_std must be >= 0".into()));
    }
    let first = samples.first().ok_or(FusionError::RankingDegenerate)?;
    let d = first.features.len();
    if samples.iter().any(|s| s.features.len() != d) {
        return Err(FusionError::Shape("quality feature lengths differ".into()));
    }
    if samples.iter().all(|s| s.target == first.target) {
        return Err(FusionError::RankingDegenerate);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(0.0, cfg.init_std).unwrap();
    let mut head = QualityHead {
        weights: (0..d).map(|_| normal.sample(&mut rng)).collect(),
        bias: 0.0,
    };
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    for _ in 0..cfg.epochs {
        let (value, grad) = head_loss(&head, samples, cfg.margin)?;
        history.push(value);
        for k in 0..d {
            head.weights[k] -= cfg.lr * grad[k];
        }
        head.bias -= cfg.lr * grad[d];
    }
    history.push(head_loss(&head, samples, cfg.margin)?.0);
    Ok((head, history))
}

/// Trains an independent head for every modality that has samples.
pub fn train_quality_estimator(
    samples: &PerModality<Vec<QualitySample>>,
    cfg: &QualityTrainConfig,
) -> Result<(QualityEstimator, PerModality<Vec<f64>>)> {
    let mut qe = QualityEstimator::default();
    let mut logs = PerModality::default();
    for (m, s) in samples.iter() {
        let (head, log) = train_quality_head(s, cfg)?;
        qe.heads.set(m, head);
        logs.set(m, log);
    }
    Ok((qe, logs))
}
