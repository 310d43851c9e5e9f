use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{LossError, Result};

/// Dense row-major matrix of scores (or of gradients with respect to them).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl ScoreTable {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LossError::Shape("ragged score rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatedProbe {
    /// Row of the probe in the score table.
    pub probe: usize,
    /// Column of its mate in the gallery.
    pub gallery: usize,
}

/// A training batch split into a simulated gallery, mated probes and
/// non-mated probes, with the probe × gallery score table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchPartition {
    /// Subject of each gallery column.
    pub gallery: Vec<String>,
    /// Subject of each score-table row.
    pub probe_subjects: Vec<String>,
    pub mated: Vec<MatedProbe>,
    pub non_mated: Vec<usize>,
    pub scores: ScoreTable,
}

impl BatchPartition {
    /// Validates the disjointness and mate-membership invariants.
    pub fn new(
        gallery: Vec<String>,
        probe_subjects: Vec<String>,
        mated: Vec<MatedProbe>,
        non_mated: Vec<usize>,
        scores: ScoreTable,
    ) -> Result<Self> {
        if scores.rows != probe_subjects.len() || scores.cols != gallery.len() {
            return Err(LossError::Shape(format!(
                "score table is {}x{}, expected {}x{}",
                scores.rows,
                scores.cols,
                probe_subjects.len(),
                gallery.len()
            )));
        }
        let mut seen = HashSet::new();
        for m in &mated {
            if m.probe >= scores.rows || m.gallery >= scores.cols {
                return Err(LossError::Partition("mated index out of range".into()));
            }
            if gallery[m.gallery] != probe_subjects[m.probe] {
                return Err(LossError::Partition(format!(
                    "probe row {} is paired with gallery subject {} but belongs to {}",
                    m.probe, gallery[m.gallery], probe_subjects[m.probe]
                )));
            }
            if !seen.insert(m.probe) {
                return Err(LossError::Partition(format!("probe row {} listed twice", m.probe)));
            }
        }
        for &n in &non_mated {
            if n >= scores.rows {
                return Err(LossError::Partition("non-mated index out of range".into()));
            }
            if !seen.insert(n) {
                return Err(LossError::Partition(format!(
                    "probe row {n} is both mated and non-mated"
                )));
            }
            if gallery.contains(&probe_subjects[n]) {
                return Err(LossError::Partition(format!(
                    "non-mated probe row {n} has subject {} enrolled in the gallery",
                    probe_subjects[n]
                )));
            }
        }
        Ok(Self {
            gallery,
            probe_subjects,
            mated,
            non_mated,
            scores,
        })
    }

    /// Builds the partition from an exemplar split and a score table whose
    /// rows follow [`ExemplarSplit::probe_order`] and whose columns follow
    /// `split.gallery`.
    pub fn from_split(split: &ExemplarSplit, subject_ids: &[String], scores: ScoreTable) -> Result<Self> {
        let gallery: Vec<String> = split
            .gallery
            .iter()
            .map(|e| subject_ids[e.subject].clone())
            .collect();
        let probes = split.probe_order();
        let probe_subjects: Vec<String> =
            probes.iter().map(|e| subject_ids[e.subject].clone()).collect();
        let mated = split
            .mated_probes
            .iter()
            .enumerate()
            .map(|(row, e)| MatedProbe {
                probe: row,
                gallery: split
                    .gallery
                    .iter()
                    .position(|g| g.subject == e.subject)
                    .expect("mated subject has a gallery exemplar"),
            })
            .collect();
        let offset = split.mated_probes.len();
        let non_mated = (offset..offset + split.non_mated_probes.len()).collect();
        Self::new(gallery, probe_subjects, mated, non_mated, scores)
    }
}

/// Index of one exemplar: subject position and exemplar position within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExemplarRef {
    pub subject: usize,
    pub exemplar: usize,
}

/// Output of [`partition_batch`]: which exemplars act as gallery, mated
/// probes and non-mated probes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExemplarSplit {
    pub mated_subjects: Vec<usize>,
    /// One exemplar per mated subject, in `mated_subjects` order.
    pub gallery: Vec<ExemplarRef>,
    pub mated_probes: Vec<ExemplarRef>,
    pub non_mated_probes: Vec<ExemplarRef>,
}

impl ExemplarSplit {
    /// Probe rows: mated probes first, then non-mated.
    pub fn probe_order(&self) -> Vec<ExemplarRef> {
        self.mated_probes
            .iter()
            .chain(&self.non_mated_probes)
            .copied()
            .collect()
    }
}

/// Draws `round(p·n)` mated subjects (at least one) among those with two or
/// more exemplars. Each mated subject gives one randomly chosen exemplar to
/// the gallery and the rest to the probe set; every exemplar of the other
/// subjects becomes a non-mated probe.
pub fn partition_batch(
    subject_ids: &[String],
    exemplar_counts: &[usize],
    mated_fraction: f64,
    seed: u64,
) -> Result<ExemplarSplit> {
    if subject_ids.len() != exemplar_counts.len() {
        return Err(LossError::Shape("one exemplar count per subject required".into()));
    }
    let n = subject_ids.len();
    if n < 2 {
        return Err(LossError::Partition("need at least two subjects".into()));
    }
    if !(mated_fraction > 0.0 && mated_fraction <= 1.0) {
        return Err(LossError::Hyperparameter(format!(
            "mated fraction {mated_fraction} outside (0, 1]"
        )));
    }
    let n_mated = ((mated_fraction * n as f64).round() as usize).clamp(1, n);
    let mut eligible: Vec<usize> = (0..n).filter(|&i| exemplar_counts[i] >= 2).collect();
    if eligible.len() < n_mated {
        return Err(LossError::Partition(format!(
            "{n_mated} mated subjects requested but only {} have two or more exemplars",
            eligible.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    eligible.shuffle(&mut rng);
    let mut mated_subjects = eligible[..n_mated].to_vec();
    mated_subjects.sort_unstable();

    let mut split = ExemplarSplit {
        mated_subjects: mated_subjects.clone(),
        gallery: Vec::new(),
        mated_probes: Vec::new(),
        non_mated_probes: Vec::new(),
    };
    for s in 0..n {
        let mut order: Vec<usize> = (0..exemplar_counts[s]).collect();
        if mated_subjects.binary_search(&s).is_ok() {
            order.shuffle(&mut rng);
            split.gallery.push(ExemplarRef {
                subject: s,
                exemplar: order[0],
            });
            let mut rest = order[1..].to_vec();
            rest.sort_unstable();
            split
                .mated_probes
                .extend(rest.into_iter().map(|e| ExemplarRef { subject: s, exemplar: e }));
        } else {
            split
                .non_mated_probes
                .extend(order.into_iter().map(|e| ExemplarRef { subject: s, exemplar: e }));
        }
    }
    Ok(split)
}

/// Cosine similarity between every probe and gallery vector. Inputs need
/// not be normalized.
pub fn cosine_table(probes: &[Vec<f64>], gallery: &[Vec<f64>]) -> Result<ScoreTable> {
    let mut out = ScoreTable::zeros(probes.len(), gallery.len());
    for (r, p) in probes.iter().enumerate() {
        let pn = norm_of(p)?;
        for (c, g) in gallery.iter().enumerate() {
            if g.len() != p.len() {
                return Err(LossError::Shape(format!(
                    "probe dim {} vs gallery dim {}",
                    p.len(),
                    g.len()
                )));
            }
            let gn = norm_of(g)?;
            out.set(r, c, lrid_core::dot(p, g) / (pn * gn));
        }
    }
    Ok(out)
}

/// Back-propagates a gradient over the cosine table to the raw vectors,
/// using `∂cos/∂a = b/(‖a‖‖b‖) − cos·a/‖a‖²`.
pub fn cosine_backward(
    probes: &[Vec<f64>],
    gallery: &[Vec<f64>],
    grad: &ScoreTable,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut gp: Vec<Vec<f64>> = probes.iter().map(|p| vec![0.0; p.len()]).collect();
    let mut gg: Vec<Vec<f64>> = gallery.iter().map(|g| vec![0.0; g.len()]).collect();
    for (r, p) in probes.iter().enumerate() {
        let pn = norm_of(p)?;
        for (c, g) in gallery.iter().enumerate() {
            let d = grad.get(r, c);
            if d == 0.0 {
                continue;
            }
            let gn = norm_of(g)?;
            let cos = lrid_core::dot(p, g) / (pn * gn);
            for k in 0..p.len() {
                gp[r][k] += d * (g[k] / (pn * gn) - cos * p[k] / (pn * pn));
                gg[c][k] += d * (p[k] / (pn * gn) - cos * g[k] / (gn * gn));
            }
        }
    }
    Ok((gp, gg))
}

fn norm_of(v: &[f64]) -> Result<f64> {
    let n = lrid_core::l2_norm(v);
    if n > 0.0 && n.is_finite() {
        Ok(n)
    } else {
        Err(lrid_core::CoreError::Normalization("zero-norm embedding".into()).into())
    }
}
