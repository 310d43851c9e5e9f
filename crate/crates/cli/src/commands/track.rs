//! `track` and `scenario-gen`.

use clap::{Arg, ArgMatches, Command};
use lrid_track::scenario::{generate_crossing, ScenarioConfig};
use lrid_track::{
    count_id_switches, read_detections_jsonl, run_tracker, write_detections_jsonl, write_tracks_csv, ByteTrackConfig,
    MemoryReduce, TrackerConfig,
};
use serde_json::json;

use super::{path_arg, print_json};
use crate::config::{create, key, read_bytes, with_keys, Key, Resolved};
use crate::{CliError, Result};

pub const TRACK_KEYS: &[Key] = &[
    key("seed", "0", "run seed; this command draws no random numbers"),
    key("tau_high", "0.6", "first-stage detection confidence"),
    key("tau_low", "0.1", "second-stage detection confidence"),
    key("iou_min", "0.2", "minimum IoU for a track-detection match"),
    key("patience", "1", "frames without a match before a track is lost"),
    key("max_age", "30", "frames without a match before a track is removed"),
    key("cross_verify", "true", "keep only bodies confirmed by a verifier detection"),
    key("verify_conf", "0.7", "verifier confidence threshold"),
    key("verify_iou", "0.5", "verifier IoU threshold"),
    key("min_inner_iou", "0.5", "minimum inner IoU for body-face pairing"),
    key("psr", "true", "reassign ids from the appearance memory"),
    key("psr_refresh", "30", "frames before a memory id stores a new patch"),
    key("mse_threshold", "0.5", "largest patch MSE accepted as the same identity"),
    key("psr_reduce", "min", "memory distance reduction: min or mean"),
];

pub fn track_command() -> Command {
    with_keys(
        Command::new("track")
            .about("Track bodies in detections.jsonl and write tracks.csv")
            .arg(Arg::new("detections").required(true).value_name("DETECTIONS_JSONL").help("Detections, one JSON object per line"))
            .arg(Arg::new("output").required(true).value_name("TRACKS_CSV").help("Track table to write")),
        TRACK_KEYS,
    )
}

pub fn tracker_config(cfg: &Resolved) -> Result<TrackerConfig> {
    let reduce = match cfg.raw("psr_reduce") {
        "min" => MemoryReduce::Min,
        "mean" => MemoryReduce::Mean,
        s => return Err(CliError::Input(format!("unknown psr_reduce '{s}' (min or mean)"))),
    };
    Ok(TrackerConfig {
        bytetrack: ByteTrackConfig {
            tau_high: cfg.get("tau_high")?,
            tau_low: cfg.get("tau_low")?,
            iou_min: cfg.get("iou_min")?,
            patience: cfg.get("patience")?,
            max_age: cfg.get("max_age")?,
        },
        cross_verify: cfg.get("cross_verify")?,
        verify_conf: cfg.get("verify_conf")?,
        verify_iou: cfg.get("verify_iou")?,
        min_inner_iou: cfg.get("min_inner_iou")?,
        psr: cfg.get("psr")?,
        psr_refresh: cfg.get("psr_refresh")?,
        mse_threshold: cfg.get("mse_threshold")?,
        psr_reduce: reduce,
    })
}

pub fn track(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, TRACK_KEYS)?;
    cfg.log("track");
    cfg.get::<u64>("seed")?;
    let tc = tracker_config(&cfg)?;
    let dets = read_detections_jsonl(read_bytes(&path_arg(m, "detections"))?.as_slice())?;
    let rows = run_tracker(&dets, &tc)?;
    let mut w = create(&path_arg(m, "output"))?;
    write_tracks_csv(&rows, &mut w)?;
    std::io::Write::flush(&mut w)?;
    let mut ids: Vec<(&str, u64)> = rows.iter().map(|r| (r.video_id.as_str(), r.track_id)).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut summary = json!({ "rows": rows.len(), "tracks": ids.len() });
    if rows.iter().any(|r| r.gt_id.is_some()) {
        summary["id_switches"] = json!(count_id_switches(&rows));
    }
    print_json(&summary);
    Ok(())
}

pub const SCENARIO_KEYS: &[Key] = &[
    key("video_id", "crossing", "video identifier"),
    key("frames", "60", "number of frames"),
    key("occlusion_start", "25", "first frame of the merged detection"),
    key("occlusion_len", "10", "frames of merged detection"),
    key("box_w", "40", "body box width"),
    key("box_h", "100", "body box height"),
    key("speed", "4", "pixels per frame"),
    key("embedding_dim", "16", "appearance embedding length"),
    key("embedding_noise", "0.05", "per-frame embedding noise std"),
    key("false_positives", "true", "add an unverified false-positive body every 10 frames"),
    key("seed", "0", "random seed"),
];

pub fn scenario_command() -> Command {
    with_keys(
        Command::new("scenario-gen")
            .about("Write the two-subject crossing scenario as detections.jsonl with ground-truth ids")
            .arg(Arg::new("output").required(true).value_name("DETECTIONS_JSONL").help("Detections to write")),
        SCENARIO_KEYS,
    )
}

pub fn scenario(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, SCENARIO_KEYS)?;
    cfg.log("scenario-gen");
    let sc = ScenarioConfig {
        video_id: cfg.raw("video_id").to_string(),
        frames: cfg.get("frames")?,
        occlusion_start: cfg.get("occlusion_start")?,
        occlusion_len: cfg.get("occlusion_len")?,
        box_w: cfg.get("box_w")?,
        box_h: cfg.get("box_h")?,
        speed: cfg.get("speed")?,
        embedding_dim: cfg.get("embedding_dim")?,
        embedding_noise: cfg.get("embedding_noise")?,
        false_positives: cfg.get("false_positives")?,
        seed: cfg.get("seed")?,
    };
    let dets = generate_crossing(&sc);
    let mut w = create(&path_arg(m, "output"))?;
    write_detections_jsonl(&dets, &mut w)?;
    std::io::Write::flush(&mut w)?;
    print_json(&json!({ "detections": dets.len() }));
    Ok(())
}
