use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{linear_assignment, Result, TrackError};

/// How an id's stored patches are reduced to one distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MemoryReduce {
    #[default]
    Min,
    Mean,
}

pub fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Appearance memory keyed by corrected track id. Entries are never evicted.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchMemory {
    pub refresh: u64,
    pub mse_threshold: f64,
    pub reduce: MemoryReduce,
    entries: BTreeMap<u64, Vec<(u64, Vec<f64>)>>,
    dim: Option<usize>,
    next_id: u64,
}

impl PatchMemory {
    pub fn new(refresh: u64, mse_threshold: f64, reduce: MemoryReduce) -> Result<Self> {
        if refresh == 0 {
            return Err(TrackError::Config("memory refresh period must be > 0".into()));
        }
        if !(mse_threshold > 0.0) {
            return Err(TrackError::Config("mse_threshold must be > 0".into()));
        }
        Ok(Self {
            refresh,
            mse_threshold,
            reduce,
            entries: BTreeMap::new(),
            dim: None,
            next_id: 1,
        })
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn patches(&self, id: u64) -> &[(u64, Vec<f64>)] {
        self.entries.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Patch count per id.
    pub fn sizes(&self) -> BTreeMap<u64, usize> {
        self.entries.iter().map(|(k, v)| (*k, v.len())).collect()
    }

    /// Distance of an embedding to one id: min or mean MSE over its patches.
    pub fn distance(&self, id: u64, e: &[f64]) -> Option<f64> {
        let patches = self.entries.get(&id)?;
        let d = patches.iter().map(|(_, p)| mse(e, p));
        Some(match self.reduce {
            MemoryReduce::Min => d.fold(f64::INFINITY, f64::min),
            MemoryReduce::Mean => d.sum::<f64>() / patches.len() as f64,
        })
    }

    fn check_dim(&mut self, e: &[f64]) -> Result<()> {
        match self.dim {
            Some(d) if d != e.len() => Err(TrackError::Dimension {
                expected: d,
                found: e.len(),
            }),
            Some(_) => Ok(()),
            None if e.is_empty() => Err(TrackError::Dimension { expected: 1, found: 0 }),
            None => {
                self.dim = Some(e.len());
                Ok(())
            }
        }
    }

    /// Assigns each embedding of one frame to a memory id. Embeddings are
    /// matched one-to-one to ids by minimum distance, accepting only
    /// distances within the threshold; the rest become new ids with their
    /// patch stored. A matched id receives the current patch when its newest
    /// patch is at least `refresh` frames old.
    pub fn correct(&mut self, frame: u64, embeddings: &[&[f64]]) -> Result<Vec<u64>> {
        for e in embeddings {
            self.check_dim(e)?;
        }
        let ids: Vec<u64> = self.entries.keys().copied().collect();
        let mut out = vec![0u64; embeddings.len()];
        let mut matched = vec![false; embeddings.len()];
        if !ids.is_empty() && !embeddings.is_empty() {
            let cost: Vec<Vec<f64>> = embeddings
                .iter()
                .map(|e| {
                    ids.iter()
                        .map(|id| {
                            let d = self.distance(*id, e).unwrap();
                            if d <= self.mse_threshold {
                                d
                            } else {
                                f64::INFINITY
                            }
                        })
                        .collect()
                })
                .collect();
            for (r, c) in linear_assignment(&cost) {
                out[r] = ids[c];
                matched[r] = true;
            }
        }
        for (i, e) in embeddings.iter().enumerate() {
            if matched[i] {
                let patches = self.entries.get_mut(&out[i]).unwrap();
                let newest = patches.last().map(|p| p.0).unwrap_or(0);
                if frame >= newest + self.refresh {
                    patches.push((frame, e.to_vec()));
                }
            } else {
                let id = self.next_id;
                self.next_id += 1;
                self.entries.insert(id, vec![(frame, e.to_vec())]);
                out[i] = id;
            }
        }
        Ok(out)
    }
}

/// Free-function form of [`PatchMemory::correct`].
pub fn psr_correct(memory: &mut PatchMemory, frame: u64, embeddings: &[&[f64]]) -> Result<Vec<u64>> {
    memory.correct(frame, embeddings)
}
