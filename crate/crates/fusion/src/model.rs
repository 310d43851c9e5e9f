use lrid_core::{is_missing, Modality, PerModality, ScoreMatrix, MISSING};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{FusionError, Normalizer, QualityEstimator, Result};

/// Affine map from the normalized (face, gait, body) scores to one score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionExpert {
    pub weights: [f64; 3],
    pub bias: f64,
}

impl FusionExpert {
    pub fn mean() -> Self {
        Self {
            weights: [1.0 / 3.0; 3],
            bias: 0.0,
        }
    }

    /// Output on a row that may contain MISSING entries. Present weights are
    /// rescaled by `Σ|w| / Σ_present |w|` so the expert keeps its overall mass.
    pub fn eval(&self, row: &[f64; 3]) -> Option<f64> {
        let (k, _) = self.rescale(row)?;
        let mut acc = 0.0;
        for m in 0..3 {
            if !is_missing(row[m]) {
                acc += self.weights[m] * row[m];
            }
        }
        Some(k * acc + self.bias)
    }

    /// Rescale factor and its derivative with respect to each weight.
    fn rescale(&self, row: &[f64; 3]) -> Option<(f64, [f64; 3])> {
        if row.iter().all(|x| is_missing(*x)) {
            return None;
        }
        if row.iter().all(|x| !is_missing(*x)) {
            return Some((1.0, [0.0; 3]));
        }
        let total: f64 = self.weights.iter().map(|w| w.abs()).sum();
        let present: f64 = (0..3)
            .filter(|m| !is_missing(row[*m]))
            .map(|m| self.weights[m].abs())
            .sum();
        if present == 0.0 {
            return Some((1.0, [0.0; 3]));
        }
        let mut dk = [0.0; 3];
        for m in 0..3 {
            let sg = self.weights[m].signum();
            dk[m] = sg / present;
            if !is_missing(row[m]) {
                dk[m] -= total * sg / (present * present);
            }
        }
        Some((total / present, dk))
    }

    /// d(output)/d(w_face, w_gait, w_body, bias).
    fn grad(&self, row: &[f64; 3]) -> [f64; 4] {
        let Some((k, dk)) = self.rescale(row) else {
            return [0.0; 4];
        };
        let mut lin = 0.0;
        for m in 0..3 {
            if !is_missing(row[m]) {
                lin += self.weights[m] * row[m];
            }
        }
        let mut g = [0.0, 0.0, 0.0, 1.0];
        for m in 0..3 {
            let r = if is_missing(row[m]) { 0.0 } else { row[m] };
            g[m] = k * r + lin * dk[m];
        }
        g
    }
}

/// How per-modality quality weights become expert weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum GateRule {
    /// Two experts weighted `(W, 1 - W)` by one modality's quality.
    Paired { modality: Modality },
    /// `softmax_z(Σ_m v[z][m]·W_m + c[z])`; absent modalities contribute 0.
    Softmax { v: Vec<[f64; 3]>, c: Vec<f64> },
}

impl GateRule {
    fn n_params(&self) -> usize {
        match self {
            GateRule::Paired { .. } => 0,
            GateRule::Softmax { v, .. } => v.len() * 4,
        }
    }

    /// Expert weights for the given quality vector (absent = 0).
    pub fn weights(&self, q: &[f64; 3]) -> Vec<f64> {
        match self {
            GateRule::Paired { modality } => {
                let w = q[modality.index()];
                vec![w, 1.0 - w]
            }
            GateRule::Softmax { v, c } => {
                let u: Vec<f64> = v
                    .iter()
                    .zip(c)
                    .map(|(vz, cz)| vz[0] * q[0] + vz[1] * q[1] + vz[2] * q[2] + cz)
                    .collect();
                let mx = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = u.iter().map(|x| (x - mx).exp()).collect();
                let s: f64 = e.iter().sum();
                e.iter().map(|x| x / s).collect()
            }
        }
    }
}

/// Normalizer, experts, gate and the frozen quality estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionModel {
    pub normalizer: Normalizer,
    pub experts: Vec<FusionExpert>,
    pub gate: GateRule,
    pub quality_estimator: Option<QualityEstimator>,
}

/// Quality weights as a fixed (face, gait, body) array with absent = 0.
pub fn quality_array(q: &PerModality<f64>) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (m, w) in q.iter() {
        out[m.index()] = *w;
    }
    out
}

impl FusionModel {
    /// Two experts under a paired gate, or `z` experts under a softmax gate,
    /// initialized near the plain mean with seeded jitter.
    pub fn init(
        normalizer: Normalizer,
        z: usize,
        paired_on: Option<Modality>,
        jitter: f64,
        seed: u64,
    ) -> Result<Self> {
        if z == 0 {
            return Err(FusionError::Hyperparameter("need at least one expert".into()));
        }
        if paired_on.is_some() && z != 2 {
            return Err(FusionError::Hyperparameter("paired gate needs exactly 2 experts".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jit = |rng: &mut ChaCha8Rng| jitter * (rng.random::<f64>() * 2.0 - 1.0);
        let experts = (0..z)
            .map(|_| {
                let mut e = FusionExpert::mean();
                for w in &mut e.weights {
                    *w += jit(&mut rng);
                }
                e
            })
            .collect();
        let gate = match paired_on {
            Some(modality) => GateRule::Paired { modality },
            None => GateRule::Softmax {
                v: (0..z).map(|_| [jit(&mut rng), jit(&mut rng), jit(&mut rng)]).collect(),
                c: vec![0.0; z],
            },
        };
        Ok(Self {
            normalizer,
            experts,
            gate,
            quality_estimator: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let z = self.experts.len();
        let ok = match &self.gate {
            GateRule::Paired { .. } => z == 2,
            GateRule::Softmax { v, c } => z >= 1 && v.len() == z && c.len() == z,
        };
        if !ok {
            return Err(FusionError::Shape(format!("gate does not match {z} experts")));
        }
        let finite = self.params().iter().all(|p| p.is_finite())
            && self.normalizer.stats.iter().all(|(_, s)| s.scale > 0.0 && s.shift.is_finite());
        if !finite {
            return Err(FusionError::Hyperparameter("non-finite model parameter".into()));
        }
        Ok(())
    }

    /// Trainable parameters: each expert's (w_face, w_gait, w_body, bias),
    /// then for a softmax gate each expert's (v_face, v_gait, v_body, c).
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for e in &self.experts {
            p.extend_from_slice(&e.weights);
            p.push(e.bias);
        }
        if let GateRule::Softmax { v, c } = &self.gate {
            for (vz, cz) in v.iter().zip(c) {
                p.extend_from_slice(vz);
                p.push(*cz);
            }
        }
        p
    }

    pub fn n_params(&self) -> usize {
        self.experts.len() * 4 + self.gate.n_params()
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.n_params() {
            return Err(FusionError::Shape(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                p.len()
            )));
        }
        let mut it = p.chunks_exact(4);
        for e in &mut self.experts {
            let c = it.next().unwrap();
            e.weights = [c[0], c[1], c[2]];
            e.bias = c[3];
        }
        if let GateRule::Softmax { v, c } = &mut self.gate {
            for (vz, cz) in v.iter_mut().zip(c.iter_mut()) {
                let ch = it.next().unwrap();
                *vz = [ch[0], ch[1], ch[2]];
                *cz = ch[3];
            }
        }
        Ok(())
    }

    /// Fuses already-normalized rows. A row with no present modality is an
    /// error.
    pub fn fuse_rows(&self, rows: &[[f64; 3]], quality: &[f64; 3]) -> Result<Vec<f64>> {
        let gate = self.gate.weights(quality);
        rows.iter()
            .enumerate()
            .map(|(g, row)| {
                let mut acc = 0.0;
                for (e, w) in self.experts.iter().zip(&gate) {
                    acc += w * e.eval(row).ok_or(FusionError::MissingScore { row: g })?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// Gradient of `Σ_g upstream[g]·S′[g]` with respect to [`Self::params`].
    /// Rows whose upstream is zero or that have no present modality are
    /// skipped.
    pub fn backward_rows(&self, rows: &[[f64; 3]], quality: &[f64; 3], upstream: &[f64]) -> Vec<f64> {
        let z = self.experts.len();
        let gate = self.gate.weights(quality);
        let mut grad = vec![0.0; self.n_params()];
        for (row, &up) in rows.iter().zip(upstream) {
            if up == 0.0 || row.iter().all(|x| is_missing(*x)) {
                continue;
            }
            let outs: Vec<f64> = self.experts.iter().map(|e| e.eval(row).unwrap()).collect();
            let fused: f64 = outs.iter().zip(&gate).map(|(o, w)| o * w).sum();
            for (i, e) in self.experts.iter().enumerate() {
                let ge = e.grad(row);
                for k in 0..4 {
                    grad[i * 4 + k] += up * gate[i] * ge[k];
                }
            }
            if let GateRule::Softmax { .. } = self.gate {
                for i in 0..z {
                    let du = up * gate[i] * (outs[i] - fused);
                    let base = z * 4 + i * 4;
                    for m in 0..3 {
                        grad[base + m] += du * quality[m];
                    }
                    grad[base + 3] += du;
                }
            }
        }
        grad
    }

    /// Quality weights for a probe: the estimator's output when one is
    /// attached and features are given, otherwise the supplied raw quality.
    pub fn quality_for(
        &self,
        features: Option<&PerModality<Vec<f64>>>,
        raw: &PerModality<f64>,
    ) -> Result<[f64; 3]> {
        match (&self.quality_estimator, features) {
            (Some(qe), Some(f)) => Ok(quality_array(&qe.estimate(f)?)),
            _ => Ok(quality_array(raw)),
        }
    }

    /// Normalizes then fuses one score matrix.
    pub fn fuse(&self, s: &ScoreMatrix, quality: &[f64; 3]) -> Result<Vec<f64>> {
        self.fuse_rows(&self.normalizer.rows(s), quality)
    }

    /// As [`Self::fuse`], but rows with no present modality become MISSING.
    pub fn fuse_lenient(&self, s: &ScoreMatrix, quality: &[f64; 3]) -> Vec<f64> {
        let gate = self.gate.weights(quality);
        self.normalizer
            .rows(s)
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                for (e, w) in self.experts.iter().zip(&gate) {
                    match e.eval(row) {
                        Some(o) => acc += w * o,
                        None => return MISSING,
                    }
                }
                acc
            })
            .collect()
    }
}

/// Quality-gated mixture-of-experts fusion of one probe's score matrix.
pub fn moe_fuse(s: &ScoreMatrix, quality: &PerModality<f64>, model: &FusionModel) -> Result<Vec<f64>> {
    model.fuse(s, &quality_array(quality))
}
