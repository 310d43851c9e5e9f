//! `fuse-train` and `fuse-apply`.

use std::path::Path;

use clap::{Arg, ArgMatches, Command};
use lrid_core::io::{read_scores_csv, write_scores_csv};
use lrid_core::Modality;
use lrid_fusion::io::{read_labels_csv, read_model_json, samples_from_labels, write_model_json};
use lrid_fusion::{train_qme, FusionTrainConfig, NormKind, QmeConfig, QualityTrainConfig};
use serde_json::json;

use super::{path_arg, print_json};
use crate::config::{create, key, read_bytes, with_keys, Key, Resolved};
use crate::{CliError, Result};

pub const TRAIN_KEYS: &[Key] = &[
    key("norm", "zscore", "score normalization: zscore or minmax"),
    key("experts", "2", "number of experts (softmax gate only)"),
    key("paired_on", "face", "modality driving a two-expert (W, 1-W) gate, or none for a softmax gate"),
    key("jitter", "0.05", "std of the random perturbation of initial expert weights"),
    key("seed", "0", "random seed for initialization"),
    key("epochs", "300", "fusion gradient-descent epochs"),
    key("lr", "0.5", "fusion initial step size"),
    key("margin", "1", "score triplet margin"),
    key("quality_epochs", "300", "quality-estimator epochs"),
    key("quality_lr", "1", "quality-estimator step size"),
    key("quality_margin", "0.1", "quality ranking margin"),
    key("quality_init_std", "0.01", "std of the initial quality-head weights"),
];

pub fn train_command() -> Command {
    with_keys(
        Command::new("fuse-train")
            .about("Train quality-guided fusion from scores.csv and labels.csv into fusion_model.json")
            .arg(Arg::new("scores").required(true).value_name("SCORES_CSV").help("Per-probe score table"))
            .arg(Arg::new("labels").required(true).value_name("LABELS_CSV").help("Probe-to-mate labels with per-modality quality"))
            .arg(Arg::new("output").required(true).value_name("MODEL_JSON").help("Trained model to write")),
        TRAIN_KEYS,
    )
}

fn parse_norm(s: &str) -> Result<NormKind> {
    match s {
        "zscore" | "z_score" => Ok(NormKind::ZScore),
        "minmax" | "min_max" => Ok(NormKind::MinMax),
        _ => Err(CliError::Input(format!("unknown norm '{s}' (zscore or minmax)"))),
    }
}

fn load_samples(scores: &Path, labels: &Path) -> Result<Vec<lrid_fusion::FusionSample>> {
    let matrices = read_scores_csv(read_bytes(scores)?.as_slice())?;
    let labels = read_labels_csv(read_bytes(labels)?.as_slice())?;
    Ok(samples_from_labels(&matrices, &labels)?)
}

pub fn train(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, TRAIN_KEYS)?;
    cfg.log("fuse-train");
    let paired_on = match cfg.raw("paired_on") {
        "none" => None,
        s => Some(s.parse::<Modality>().map_err(|e| CliError::Input(format!("paired_on: {e}")))?),
    };
    let seed = cfg.get("seed")?;
    let qme = QmeConfig {
        norm: parse_norm(cfg.raw("norm"))?,
        experts: cfg.get("experts")?,
        paired_on,
        jitter: cfg.get("jitter")?,
        seed,
        quality: QualityTrainConfig {
            epochs: cfg.get("quality_epochs")?,
            lr: cfg.get("quality_lr")?,
            margin: cfg.get("quality_margin")?,
            init_std: cfg.get("quality_init_std")?,
            seed,
        },
        fusion: FusionTrainConfig {
            epochs: cfg.get("epochs")?,
            lr: cfg.get("lr")?,
            margin: cfg.get("margin")?,
        },
    };
    let samples = load_samples(&path_arg(m, "scores"), &path_arg(m, "labels"))?;
    let (model, log) = train_qme(&samples, &qme)?;
    let mut w = create(&path_arg(m, "output"))?;
    write_model_json(&model, &mut w)?;
    std::io::Write::flush(&mut w)?;
    print_json(&json!({
        "probes": samples.len(),
        "epochs": log.fusion.len(),
        "initial_loss": log.fusion.first(),
        "final_loss": log.fusion.last(),
    }));
    Ok(())
}

pub const APPLY_KEYS: &[Key] = &[key("seed", "0", "run seed; this command draws no random numbers")];

pub fn apply_command() -> Command {
    with_keys(
        Command::new("fuse-apply")
            .about("Fill the fused column of scores.csv with a trained fusion model")
            .arg(Arg::new("model").required(true).value_name("MODEL_JSON").help("Trained fusion model"))
            .arg(Arg::new("scores").required(true).value_name("SCORES_CSV").help("Per-probe score table"))
            .arg(Arg::new("labels").required(true).value_name("LABELS_CSV").help("Probe-to-mate labels with per-modality quality"))
            .arg(Arg::new("output").required(true).value_name("OUT_SCORES_CSV").help("Score table with the fused column filled")),
        APPLY_KEYS,
    )
}

pub fn apply(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, APPLY_KEYS)?;
    cfg.log("fuse-apply");
    cfg.get::<u64>("seed")?;
    let model = read_model_json(read_bytes(&path_arg(m, "model"))?.as_slice())?;
    let samples = load_samples(&path_arg(m, "scores"), &path_arg(m, "labels"))?;
    let mut matrices = Vec::with_capacity(samples.len());
    for s in samples {
        let q = model.quality_for(s.features.as_ref(), &s.quality)?;
        let mut matrix = s.scores;
        matrix.fused = Some(model.fuse_lenient(&matrix, &q));
        matrices.push(matrix);
    }
    let mut w = create(&path_arg(m, "output"))?;
    write_scores_csv(&mut w, &matrices)?;
    std::io::Write::flush(&mut w)?;
    print_json(&json!({ "probes": matrices.len() }));
    Ok(())
}
