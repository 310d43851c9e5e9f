use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CoreError;

/// Biometric modality. The declaration order is the canonical column order
/// of every score matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Face,
    Gait,
    Body,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::Face, Modality::Gait, Modality::Body];

    pub fn index(self) -> usize {
        match self {
            Modality::Face => 0,
            Modality::Gait => 1,
            Modality::Body => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Modality> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Face => "face",
            Modality::Gait => "gait",
            Modality::Body => "body",
        }
    }

    fn code(self) -> u8 {
        self.index() as u8
    }

    pub(crate) fn from_code(code: u8) -> Option<Modality> {
        Self::from_index(code as usize)
    }

    pub(crate) fn to_code(self) -> u8 {
        self.code()
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "face" => Ok(Modality::Face),
            "gait" => Ok(Modality::Gait),
            "body" => Ok(Modality::Body),
            other => Err(CoreError::Format(format!("unknown modality {other:?}"))),
        }
    }
}

/// Acquisition range of a media item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeClass {
    Close,
    Long,
}

impl RangeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RangeClass::Close => "close",
            RangeClass::Long => "long",
        }
    }
}

/// Configured embedding dimension per modality.
///
/// The face dimension counts identity features only; the stored face record
/// carries one extra float for the quality score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModalityDims {
    pub face: usize,
    pub gait: usize,
    pub body: usize,
}

impl Default for ModalityDims {
    fn default() -> Self {
        Self {
            face: 512,
            gait: 8192,
            body: 2048,
        }
    }
}

impl ModalityDims {
    pub fn uniform(dim: usize) -> Self {
        Self {
            face: dim,
            gait: dim,
            body: dim,
        }
    }

    pub fn get(&self, modality: Modality) -> usize {
        match modality {
            Modality::Face => self.face,
            Modality::Gait => self.gait,
            Modality::Body => self.body,
        }
    }
}

/// Fixed-size per-modality slot array indexed by [`Modality::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerModality<T>(pub [Option<T>; 3]);

impl<T> Default for PerModality<T> {
    fn default() -> Self {
        Self([None, None, None])
    }
}

impl<T> PerModality<T> {
    pub fn get(&self, m: Modality) -> Option<&T> {
        self.0[m.index()].as_ref()
    }

    pub fn set(&mut self, m: Modality, value: T) {
        self.0[m.index()] = Some(value);
    }

    pub fn take(&mut self, m: Modality) -> Option<T> {
        self.0[m.index()].take()
    }

    pub fn contains(&self, m: Modality) -> bool {
        self.0[m.index()].is_some()
    }

    /// Present modalities in canonical order.
    pub fn present(&self) -> Vec<Modality> {
        Modality::ALL
            .into_iter()
            .filter(|m| self.contains(*m))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Modality, &T)> {
        Modality::ALL
            .into_iter()
            .filter_map(move |m| self.get(m).map(|v| (m, v)))
    }
}
