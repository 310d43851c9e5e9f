//! `eval`: run a protocol against template stores and write the metric
//! report, the score table and the per-probe labels.

use std::path::Path;

use clap::{Arg, ArgMatches, Command};
use lrid_core::io::{fmt_sig9, write_scores_csv};
use lrid_core::{Modality, ProbeRecord, ScoreMatrix};
use lrid_eval::{load_protocol, run_protocol, Fuser, ProtocolFile};
use lrid_fusion::io::{read_model_json, LABELS_HEADER};
use lrid_fusion::{baseline_fuse, FusionModel};
use serde_json::json;

use super::data::load_templates;
use super::{path_arg, print_json};
use crate::config::{create, key, read_bytes, with_keys, Key, Resolved, Source};
use crate::{CliError, Result};

pub const EVAL_KEYS: &[Key] = &[
    key("face_dim", "auto", "face vector length, or auto"),
    key("gait_dim", "auto", "gait vector length, or auto"),
    key("body_dim", "auto", "body vector length, or auto"),
    key("far_targets", "0.001,0.0001", "comma-separated FAR targets (overrides protocol.json when set)"),
    key("fpir_target", "0.01", "FPIR target (overrides protocol.json when set)"),
    key("rank_k", "20", "closed-set rank k (overrides protocol.json when set)"),
    key("modalities", "face,gait,body", "modalities to report (overrides protocol.json when set)"),
    key("fusion", "true", "emit fused rows (overrides protocol.json when set)"),
    key("fusion_model", "", "fusion_model.json; without it the fused score is the mean of present raw scores"),
];

pub fn command() -> Command {
    with_keys(
        Command::new("eval")
            .about("Evaluate a protocol: report.json, report.csv, scores.csv and labels.csv in OUT_DIR")
            .arg(Arg::new("protocol").required(true).value_name("PROTOCOL_JSON").help("Protocol definition"))
            .arg(Arg::new("out_dir").required(true).value_name("OUT_DIR").help("Directory for report.json, report.csv, scores.csv and labels.csv"))
            .arg(
                Arg::new("stores")
                    .required(true)
                    .num_args(1..)
                    .value_name("STORE")
                    .help("templates.bin or templates.jsonl files"),
            ),
        EVAL_KEYS,
    )
}

fn raw_mean_fuser(s: &ScoreMatrix, _: &ProbeRecord) -> lrid_core::Result<Vec<f64>> {
    let rows: Vec<[f64; 3]> = (0..s.n_gallery())
        .map(|g| {
            let mut row = [lrid_core::MISSING; 3];
            for m in Modality::ALL {
                if let Some(v) = s.score(g, m) {
                    row[m.index()] = v;
                }
            }
            row
        })
        .collect();
    // a gallery row with no shared modality stays MISSING
    Ok(rows
        .iter()
        .map(|r| baseline_fuse(&[*r]).map(|v| v[0]).unwrap_or(lrid_core::MISSING))
        .collect())
}

fn model_fuser(model: &FusionModel) -> impl Fn(&ScoreMatrix, &ProbeRecord) -> lrid_core::Result<Vec<f64>> + '_ {
    move |s, p| {
        let mut features = lrid_core::PerModality::default();
        for (m, q) in p.quality.iter() {
            features.set(m, vec![*q]);
        }
        let q = model
            .quality_for(Some(&features), &p.quality)
            .map_err(|e| lrid_core::CoreError::Format(e.to_string()))?;
        Ok(model.fuse_lenient(s, &q))
    }
}

fn apply_overrides(protocol: &mut ProtocolFile, cfg: &Resolved) -> Result<()> {
    let c = &mut protocol.config;
    if cfg.source("far_targets") != Source::Default {
        c.far_targets = cfg.get_list("far_targets")?;
    }
    if cfg.source("fpir_target") != Source::Default {
        c.fpir_target = cfg.get("fpir_target")?;
    }
    if cfg.source("rank_k") != Source::Default {
        c.rank_k = cfg.get("rank_k")?;
    }
    if cfg.source("modalities") != Source::Default {
        c.modalities = cfg.get_list("modalities")?;
    }
    if cfg.source("fusion") != Source::Default {
        c.fusion = cfg.get("fusion")?;
    }
    Ok(())
}

fn write_labels(path: &Path, probes: &[ProbeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(LABELS_HEADER).map_err(err)?;
    for p in probes {
        let q = |m: Modality| p.quality.get(m).map(|v| fmt_sig9(*v)).unwrap_or_default();
        w.write_record([
            p.probe_id.clone(),
            p.true_subject_id.clone().unwrap_or_default(),
            q(Modality::Face),
            q(Modality::Gait),
            q(Modality::Body),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, EVAL_KEYS)?;
    cfg.log("eval");
    let protocol_path = path_arg(m, "protocol");
    let mut protocol: ProtocolFile = serde_json::from_slice(&read_bytes(&protocol_path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", protocol_path.display())))?;
    apply_overrides(&mut protocol, &cfg)?;
    log::info!("effective protocol config: {}", serde_json::to_string(&protocol.config)?);

    let mut templates = Vec::new();
    for store in m.get_many::<String>("stores").expect("required") {
        templates.extend(load_templates(Path::new(store), &cfg)?);
    }
    let inputs = load_protocol(&protocol, &templates)?;

    let model = match cfg.get_opt::<String>("fusion_model")? {
        Some(p) => Some(read_model_json(read_bytes(Path::new(&p))?.as_slice())?),
        None => None,
    };
    let (report, matrices) = match &model {
        Some(model) => {
            let f = model_fuser(model);
            run_protocol(&inputs, Some(&f as &Fuser<'_>))?
        }
        None => run_protocol(&inputs, Some(&raw_mean_fuser as &Fuser<'_>))?,
    };

    let out = path_arg(m, "out_dir");
    std::fs::create_dir_all(&out)?;
    let mut w = create(&out.join("report.json"))?;
    report.write_json(&mut w)?;
    std::io::Write::flush(&mut w)?;
    let mut w = create(&out.join("report.csv"))?;
    report.write_csv(&mut w)?;
    std::io::Write::flush(&mut w)?;
    let mut w = create(&out.join("scores.csv"))?;
    write_scores_csv(&mut w, &matrices)?;
    std::io::Write::flush(&mut w)?;
    write_labels(&out.join("labels.csv"), &inputs.probes)?;

    print_json(&json!({
        "gallery": report.counts.gallery_size,
        "mated_probes": report.counts.mated_probes,
        "non_mated_probes": report.counts.non_mated_probes,
        "rows": report.rows.len(),
    }));
    Ok(())
}
