use std::collections::BTreeMap;
use std::io::{Read, Write};

use lrid_core::io::fmt_sig9;
use serde::{Deserialize, Serialize};

use crate::{
    associate_body_face, cross_verify, BBox, ByteTrackConfig, Detection, DetectionKind,
    DetectionSource, MemoryReduce, PatchMemory, Result, TrackError, Tracker,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub bytetrack: ByteTrackConfig,
    /// Drop primary bodies that no verifier body confirms.
    pub cross_verify: bool,
    pub verify_conf: f64,
    pub verify_iou: f64,
    pub min_inner_iou: f64,
    pub psr: bool,
    pub psr_refresh: u64,
    pub mse_threshold: f64,
    pub psr_reduce: MemoryReduce,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            bytetrack: ByteTrackConfig::default(),
            cross_verify: true,
            verify_conf: 0.7,
            verify_iou: 0.5,
            min_inner_iou: 0.5,
            psr: true,
            psr_refresh: 30,
            mse_threshold: 0.5,
            psr_reduce: MemoryReduce::Min,
        }
    }
}

/// One tracked body in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRow {
    pub video_id: String,
    pub frame: u64,
    pub track_id: u64,
    pub bbox: BBox,
    pub face: Option<BBox>,
    pub gt_id: Option<u64>,
}

struct VideoState {
    tracker: Tracker,
    memory: Option<PatchMemory>,
}

fn process_frame(state: &mut VideoState, cfg: &TrackerConfig, dets: &[&Detection], rows: &mut Vec<TrackRow>) -> Result<()> {
    let frame = dets[0].frame;
    let bodies: Vec<&Detection> = dets
        .iter()
        .copied()
        .filter(|d| d.kind == DetectionKind::Body && d.source == DetectionSource::Primary)
        .collect();
    let bodies: Vec<&Detection> = if cfg.cross_verify {
        let verifier: Vec<(BBox, f64)> = dets
            .iter()
            .filter(|d| d.kind == DetectionKind::Body && d.source == DetectionSource::Verifier)
            .map(|d| (d.bbox, d.confidence))
            .collect();
        let boxes: Vec<BBox> = bodies.iter().map(|d| d.bbox).collect();
        cross_verify(&boxes, &verifier, cfg.verify_conf, cfg.verify_iou)
            .into_iter()
            .map(|i| bodies[i])
            .collect()
    } else {
        bodies
    };
    let faces: Vec<BBox> = dets
        .iter()
        .filter(|d| d.kind == DetectionKind::Face && d.source == DetectionSource::Primary)
        .map(|d| d.bbox)
        .collect();
    let body_boxes: Vec<BBox> = bodies.iter().map(|d| d.bbox).collect();
    let face_of = associate_body_face(&body_boxes, &faces, cfg.min_inner_iou);

    let input: Vec<(BBox, f64)> = bodies.iter().map(|d| (d.bbox, d.confidence)).collect();
    let assigned = state.tracker.step(frame, &input)?;
    let ids: Vec<u64> = match state.memory.as_mut() {
        Some(memory) => {
            let embs = assigned
                .iter()
                .map(|(d, _)| bodies[*d].embedding.as_deref().ok_or(TrackError::MissingEmbedding { frame }))
                .collect::<Result<Vec<&[f64]>>>()?;
            memory.correct(frame, &embs)?
        }
        None => assigned.iter().map(|p| p.1).collect(),
    };
    let mut out: Vec<TrackRow> = assigned
        .iter()
        .zip(ids)
        .map(|((d, _), id)| TrackRow {
            video_id: bodies[*d].video_id.clone(),
            frame,
            track_id: id,
            bbox: bodies[*d].bbox,
            face: face_of[*d].map(|f| faces[f]),
            gt_id: bodies[*d].gt_id,
        })
        .collect();
    out.sort_by_key(|r| r.track_id);
    rows.extend(out);
    Ok(())
}

/// Runs verification, body-face pairing, two-stage tracking and (optionally)
/// appearance correction over a detection stream. Videos are processed
/// independently, in order of first appearance; within a video, frames must
/// not decrease.
pub fn run_tracker(dets: &[Detection], cfg: &TrackerConfig) -> Result<Vec<TrackRow>> {
    cfg.bytetrack.validate()?;
    let mut order: Vec<&str> = Vec::new();
    let mut by_video: BTreeMap<&str, Vec<&Detection>> = BTreeMap::new();
    for d in dets {
        d.validate()?;
        let v = by_video.entry(d.video_id.as_str()).or_insert_with(|| {
            order.push(d.video_id.as_str());
            Vec::new()
        });
        if let Some(last) = v.last() {
            if d.frame < last.frame {
                return Err(TrackError::StreamOrder {
                    video: d.video_id.clone(),
                    frame: d.frame,
                    last: last.frame,
                });
            }
        }
        v.push(d);
    }
    let mut rows = Vec::new();
    for video in order {
        let mut state = VideoState {
            tracker: Tracker::new(video, cfg.bytetrack.clone())?,
            memory: if cfg.psr {
                Some(PatchMemory::new(cfg.psr_refresh, cfg.mse_threshold, cfg.psr_reduce)?)
            } else {
                None
            },
        };
        let stream = &by_video[video];
        let mut start = 0;
        while start < stream.len() {
            let frame = stream[start].frame;
            let end = start + stream[start..].iter().take_while(|d| d.frame == frame).count();
            process_frame(&mut state, cfg, &stream[start..end], &mut rows)?;
            start = end;
        }
    }
    Ok(rows)
}

pub const TRACKS_HEADER: [&str; 12] = [
    "video_id", "frame", "track_id", "x", "y", "w", "h", "face_x", "face_y", "face_w", "face_h", "gt_id",
];

pub fn write_tracks_csv<W: Write>(rows: &[TrackRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(TRACKS_HEADER)?;
    for r in rows {
        let mut rec = vec![r.video_id.clone(), r.frame.to_string(), r.track_id.to_string()];
        rec.extend(r.bbox.as_array().iter().map(|v| fmt_sig9(*v)));
        match r.face {
            Some(f) => rec.extend(f.as_array().iter().map(|v| fmt_sig9(*v))),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        rec.push(r.gt_id.map(|g| g.to_string()).unwrap_or_default());
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_tracks_csv<R: Read>(r: R) -> Result<Vec<TrackRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().ne(TRACKS_HEADER.iter().copied()) {
        return Err(TrackError::Schema {
            line: 1,
            message: format!("expected header {}", TRACKS_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |m: String| TrackError::Schema { line, message: m };
        let num = |k: usize| -> Result<f64> { rec[k].parse().map_err(|e| bad(format!("column {k}: {e}"))) };
        let int = |k: usize| -> Result<u64> { rec[k].parse().map_err(|e| bad(format!("column {k}: {e}"))) };
        let bbox = BBox::new(num(3)?, num(4)?, num(5)?, num(6)?);
        let face = if rec[7].is_empty() {
            None
        } else {
            Some(BBox::new(num(7)?, num(8)?, num(9)?, num(10)?))
        };
        let gt_id = if rec[11].is_empty() { None } else { Some(int(11)?) };
        rows.push(TrackRow {
            video_id: rec[0].to_string(),
            frame: int(1)?,
            track_id: int(2)?,
            bbox,
            face,
            gt_id,
        });
    }
    Ok(rows)
}

/// Number of times a ground-truth subject's output id changes between
/// consecutive appearances, summed over subjects and videos.
pub fn count_id_switches(rows: &[TrackRow]) -> usize {
    let mut last: BTreeMap<(&str, u64), u64> = BTreeMap::new();
    let mut switches = 0;
    for r in rows {
        let Some(gt) = r.gt_id else { continue };
        if let Some(prev) = last.insert((r.video_id.as_str(), gt), r.track_id) {
            if prev != r.track_id {
                switches += 1;
            }
        }
    }
    switches
}
