use serde::{Deserialize, Serialize};

use crate::sigmoid::{sigmoid, sigmoid_grad};
use crate::{BatchPartition, LossError, LossHyperparams, Result, ScoreTable};

/// Soft detection success of a genuine score against one threshold.
/// Returns `(value, d value / d s_ig)`; the gradient with respect to `tau`
/// is the negation.
pub fn r_det_tau(s_ig: f64, tau: f64, alpha: f64) -> (f64, f64) {
    (sigmoid(s_ig - tau, alpha), sigmoid_grad(s_ig - tau, alpha))
}

/// Sorted non-mated scores against one gallery subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub values: Vec<f64>,
}

/// Thresholds for the mated pair whose gallery subject sits in column
/// `gallery_col`: the scores of every non-mated probe against that subject.
pub fn detection_thresholds(part: &BatchPartition, gallery_col: usize) -> Result<ThresholdSet> {
    if part.non_mated.is_empty() {
        return Err(LossError::EmptyThresholdSet);
    }
    let mut values: Vec<f64> = part
        .non_mated
        .iter()
        .map(|&n| part.scores.get(n, gallery_col))
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(ThresholdSet { values })
}

/// Mean soft detection over a threshold set, with gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct RDet {
    pub value: f64,
    pub d_score: f64,
    /// Gradient with respect to each threshold, aligned with the input.
    pub d_thresholds: Vec<f64>,
}

pub fn r_det(s_ig: f64, thresholds: &[f64], alpha: f64) -> Result<RDet> {
    if thresholds.is_empty() {
        return Err(LossError::EmptyThresholdSet);
    }
    let n = thresholds.len() as f64;
    let mut value = 0.0;
    let mut d_score = 0.0;
    let mut d_thresholds = Vec::with_capacity(thresholds.len());
    for &tau in thresholds {
        let (v, d) = r_det_tau(s_ig, tau, alpha);
        value += v / n;
        d_score += d / n;
        d_thresholds.push(-d / n);
    }
    Ok(RDet {
        value,
        d_score,
        d_thresholds,
    })
}

/// Differentiable rank of the mate: `Σ_j σ_γ(s_j − s_mate)` over the row.
/// Returns the value and its gradient with respect to every entry of `row`.
pub fn softrank(row: &[f64], mate: usize, gamma: f64, include_self: bool) -> (f64, Vec<f64>) {
    let s_mate = row[mate];
    let mut value = if include_self { 0.5 } else { 0.0 };
    let mut grad = vec![0.0; row.len()];
    for (j, &s) in row.iter().enumerate() {
        if j == mate {
            continue;
        }
        value += sigmoid(s - s_mate, gamma);
        let d = sigmoid_grad(s - s_mate, gamma);
        grad[j] += d;
        grad[mate] -= d;
    }
    (value, grad)
}

/// Soft identification success `σ_β(1 − softrank)`, with its derivative
/// with respect to the soft-rank value.
pub fn r_id(softrank_value: f64, beta: f64) -> (f64, f64) {
    let x = 1.0 - softrank_value;
    (sigmoid(x, beta), -sigmoid_grad(x, beta))
}

/// Identification-detection loss `−mean(R_det · R_id)` over mated probes,
/// with the gradient over the whole score table.
pub fn l_idl(part: &BatchPartition, hp: &LossHyperparams) -> Result<(f64, ScoreTable)> {
    if part.mated.is_empty() {
        return Err(LossError::EmptyMatedSet);
    }
    if part.non_mated.is_empty() {
        return Err(LossError::EmptyThresholdSet);
    }
    let k = part.mated.len() as f64;
    let mut grad = ScoreTable::zeros(part.scores.rows, part.scores.cols);
    let mut loss = 0.0;
    for m in &part.mated {
        let s_ig = part.scores.get(m.probe, m.gallery);
        let thresholds: Vec<f64> = part
            .non_mated
            .iter()
            .map(|&n| part.scores.get(n, m.gallery))
            .collect();
        let det = r_det(s_ig, &thresholds, hp.alpha)?;
        let row = part.scores.row(m.probe);
        let (rank, d_rank) = softrank(row, m.gallery, hp.gamma, hp.softrank_self_term);
        let (id, d_id) = r_id(rank, hp.beta);
        loss -= det.value * id / k;

        // d(−det·id/k): product rule through both factors
        grad.add(m.probe, m.gallery, -id * det.d_score / k);
        for (&n, d_tau) in part.non_mated.iter().zip(&det.d_thresholds) {
            grad.add(n, m.gallery, -id * d_tau / k);
        }
        for (j, d) in d_rank.iter().enumerate() {
            grad.add(m.probe, j, -det.value * d_id * d / k);
        }
    }
    Ok((loss, grad))
}

/// Softmax-weighted mean of the scores, with gradient
/// `∂L/∂s_k = w_k (1 + s_k − L)`.
pub fn l_rtm(scores: &[f64]) -> Result<(f64, Vec<f64>)> {
    let max = scores
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if scores.is_empty() {
        return Err(LossError::EmptyThresholdSet);
    }
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    let value: f64 = exps.iter().zip(scores).map(|(e, s)| e * s).sum::<f64>() / z;
    let grad = exps
        .iter()
        .zip(scores)
        .map(|(e, s)| e / z * (1.0 + s - value))
        .collect();
    Ok((value, grad))
}

/// Components of the combined open-set objective.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSetLoss {
    pub idl: f64,
    pub rtm: f64,
    pub total: f64,
    pub grad: ScoreTable,
}

/// `L_IDL + λ·L_RTM`, where the relative-threshold term pools every
/// non-mated probe's score against every gallery subject.
pub fn l_open(part: &BatchPartition, hp: &LossHyperparams) -> Result<OpenSetLoss> {
    hp.validate()?;
    let (idl, mut grad) = l_idl(part, hp)?;
    let pooled: Vec<(usize, usize)> = part
        .non_mated
        .iter()
        .flat_map(|&n| (0..part.scores.cols).map(move |c| (n, c)))
        .collect();
    let values: Vec<f64> = pooled.iter().map(|&(r, c)| part.scores.get(r, c)).collect();
    let (rtm, d_rtm) = l_rtm(&values)?;
    if hp.lambda != 0.0 {
        for (&(r, c), d) in pooled.iter().zip(&d_rtm) {
            grad.add(r, c, hp.lambda * d);
        }
    }
    Ok(OpenSetLoss {
        idl,
        rtm,
        total: idl + hp.lambda * rtm,
        grad,
    })
}
