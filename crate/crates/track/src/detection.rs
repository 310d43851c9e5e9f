use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::{BBox, Result, TrackError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionKind {
    Body,
    Face,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DetectionSource {
    #[default]
    Primary,
    Verifier,
}

/// One detector output in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detection {
    pub video_id: String,
    pub frame: u64,
    pub kind: DetectionKind,
    #[serde(rename = "box")]
    pub bbox: BBox,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f64>>,
    #[serde(default)]
    pub source: DetectionSource,
    /// Ground-truth subject, carried through for auditing only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_id: Option<u64>,
}

impl Detection {
    pub fn validate(&self) -> Result<()> {
        if !self.bbox.is_valid() {
            return Err(TrackError::InvalidDetection(format!(
                "frame {}: box needs finite coordinates and positive size",
                self.frame
            )));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(TrackError::InvalidDetection(format!(
                "frame {}: confidence {} outside [0, 1]",
                self.frame, self.confidence
            )));
        }
        Ok(())
    }
}

pub fn read_detections_jsonl<R: BufRead>(r: R) -> Result<Vec<Detection>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let d: Detection = serde_json::from_str(&line).map_err(|e| TrackError::Schema {
            line: i + 1,
            message: e.to_string(),
        })?;
        d.validate().map_err(|e| TrackError::Schema {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(d);
    }
    Ok(out)
}

pub fn write_detections_jsonl<W: Write>(dets: &[Detection], mut w: W) -> Result<()> {
    for d in dets {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
