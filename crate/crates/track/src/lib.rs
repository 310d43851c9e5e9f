//! Detection post-processing and multi-subject tracking.
//!
//! Body detections are confirmed by a second detector, paired with faces by
//! inner IoU, linked across frames by a two-stage (high then low confidence)
//! IoU tracker with constant-velocity prediction, and finally re-labelled by
//! patch similarity retrieval against an appearance memory.

mod assignment;
mod association;
mod detection;
mod error;
mod geometry;
mod pipeline;
mod psr;
pub mod scenario;
mod tracker;

pub use assignment::linear_assignment;
pub use association::{associate_body_face, cross_verify};
pub use detection::{read_detections_jsonl, write_detections_jsonl, Detection, DetectionKind, DetectionSource};
pub use error::{Result, TrackError};
pub use geometry::{inner_iou, iou, BBox};
pub use pipeline::{
    count_id_switches, read_tracks_csv, run_tracker, write_tracks_csv, TrackRow, TrackerConfig, TRACKS_HEADER,
};
pub use psr::{mse, psr_correct, MemoryReduce, PatchMemory};
pub use tracker::{bytetrack_step, ByteTrackConfig, Track, TrackState, Tracker};
