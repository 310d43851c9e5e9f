//! Template stores and synthetic protocols: `ingest`, `export`,
//! `protocol-gen`.

use std::collections::BTreeMap;
use std::path::Path;

use clap::{Arg, ArgMatches, Command};
use lrid_core::io::{
    deserialize_template, parse_templates_jsonl, read_store, write_store, write_templates_jsonl, STORE_MAGIC,
};
use lrid_core::{Modality, ModalityDims, Template};
use lrid_eval::synthetic::{generate, SyntheticConfig};
use serde_json::json;

use super::{path_arg, print_json};
use crate::config::{create, key, read_bytes, read_text, with_keys, Key, Resolved};
use crate::{CliError, Result};

pub const DIM_KEYS: &[Key] = &[
    key("face_dim", "auto", "face vector length, or auto to take it from the first face template"),
    key("gait_dim", "auto", "gait vector length, or auto"),
    key("body_dim", "auto", "body vector length, or auto"),
];

pub fn ingest_command() -> Command {
    with_keys(
        Command::new("ingest")
            .about("Validate and normalize templates.jsonl into a packed templates.bin store")
            .arg(Arg::new("input").required(true).value_name("TEMPLATES_JSONL").help("Template records, one JSON object per line"))
            .arg(Arg::new("output").required(true).value_name("TEMPLATES_BIN").help("Binary template store to write")),
        DIM_KEYS,
    )
}

pub fn export_command() -> Command {
    with_keys(
        Command::new("export")
            .about("Write a packed templates.bin store back out as templates.jsonl")
            .arg(Arg::new("input").required(true).value_name("TEMPLATES_BIN").help("Binary template store"))
            .arg(Arg::new("output").required(true).value_name("TEMPLATES_JSONL").help("JSONL file to write")),
        DIM_KEYS,
    )
}

/// Resolved dimensions; `auto` entries take the first observed length.
pub fn resolve_dims(cfg: &Resolved, observed: &BTreeMap<Modality, usize>) -> Result<ModalityDims> {
    let mut dims = ModalityDims::default();
    for (m, k) in [(Modality::Face, "face_dim"), (Modality::Gait, "gait_dim"), (Modality::Body, "body_dim")] {
        let v = if cfg.raw(k) == "auto" {
            observed.get(&m).copied().unwrap_or(dims.get(m))
        } else {
            cfg.get::<usize>(k)?
        };
        match m {
            Modality::Face => dims.face = v,
            Modality::Gait => dims.gait = v,
            Modality::Body => dims.body = v,
        }
    }
    Ok(dims)
}

fn observed_jsonl(text: &str) -> BTreeMap<Modality, usize> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let Ok(v) = serde_json::from_str::<serde_json::Value>(line) else { continue };
        let (Some(m), Some(vec)) = (v.get("modality").and_then(|m| m.as_str()), v.get("vector").and_then(|x| x.as_array()))
        else {
            continue;
        };
        if let Ok(m) = m.parse::<Modality>() {
            out.entry(m).or_insert(vec.len());
        }
    }
    out
}

fn observed_store(bytes: &[u8]) -> BTreeMap<Modality, usize> {
    let mut out = BTreeMap::new();
    if bytes.len() < 12 {
        return out;
    }
    let mut pos = 12;
    while pos < bytes.len() {
        match deserialize_template(&bytes[pos..]) {
            Ok((t, used)) => {
                out.entry(t.modality).or_insert(t.vector.len());
                pos += used;
            }
            Err(_) => break,
        }
    }
    out
}

/// Reads a packed store or a JSONL file, chosen by the leading magic bytes.
pub fn load_templates(path: &Path, cfg: &Resolved) -> Result<Vec<Template>> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(STORE_MAGIC) {
        let dims = resolve_dims(cfg, &observed_store(&bytes))?;
        Ok(read_store(bytes.as_slice(), &dims)?)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::Input(format!("{} is neither a store nor UTF-8 JSONL", path.display())))?;
        let dims = resolve_dims(cfg, &observed_jsonl(&text))?;
        let ts = parse_templates_jsonl(&text, &dims)?;
        ts.into_iter()
            .map(|t| t.into_normalized(&dims).map_err(CliError::from))
            .collect()
    }
}

fn counts(ts: &[Template]) -> serde_json::Value {
    let n = |m: Modality| ts.iter().filter(|t| t.modality == m).count();
    json!({
        "templates": ts.len(),
        "face": n(Modality::Face),
        "gait": n(Modality::Gait),
        "body": n(Modality::Body),
    })
}

pub fn ingest(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, DIM_KEYS)?;
    cfg.log("ingest");
    let input = path_arg(m, "input");
    let text = read_text(&input)?;
    let dims = resolve_dims(&cfg, &observed_jsonl(&text))?;
    let templates = parse_templates_jsonl(&text, &dims)?
        .into_iter()
        .map(|t| t.into_normalized(&dims))
        .collect::<lrid_core::Result<Vec<_>>>()?;
    let mut w = create(&path_arg(m, "output"))?;
    write_store(&mut w, &templates)?;
    std::io::Write::flush(&mut w)?;
    let report = counts(&templates);
    log::info!("ingested {report}");
    print_json(&report);
    Ok(())
}

pub fn export(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, DIM_KEYS)?;
    cfg.log("export");
    let templates = load_templates(&path_arg(m, "input"), &cfg)?;
    let mut w = create(&path_arg(m, "output"))?;
    write_templates_jsonl(&mut w, &templates)?;
    std::io::Write::flush(&mut w)?;
    print_json(&counts(&templates));
    Ok(())
}

pub const PROTOCOL_GEN_KEYS: &[Key] = &[
    key("enrolled", "20", "enrolled gallery subjects"),
    key("distractors", "5", "distractor gallery identities"),
    key("gallery_media_per_subject", "2", "gallery media items per gallery identity"),
    key("probes_per_subject", "2", "probe media items per enrolled subject"),
    key("non_mated_probes", "10", "unenrolled probe subjects (one probe each)"),
    key("dim", "16", "embedding length of every modality"),
    key("gallery_noise", "0.15", "per-coordinate noise std of gallery media"),
    key("probe_noise", "0.35", "per-coordinate noise std of probe media"),
    key("modality_dropout", "0.2", "probability a probe lacks a given non-face modality"),
    key("seed", "0", "random seed"),
];

pub fn protocol_gen_command() -> Command {
    with_keys(
        Command::new("protocol-gen")
            .about("Generate a synthetic templates.jsonl and protocol.json")
            .arg(Arg::new("out_dir").required(true).value_name("OUT_DIR").help("Directory for templates.jsonl and protocol.json")),
        PROTOCOL_GEN_KEYS,
    )
}

pub fn protocol_gen(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, PROTOCOL_GEN_KEYS)?;
    cfg.log("protocol-gen");
    let sc = SyntheticConfig {
        enrolled: cfg.get("enrolled")?,
        distractors: cfg.get("distractors")?,
        gallery_media_per_subject: cfg.get("gallery_media_per_subject")?,
        probes_per_subject: cfg.get("probes_per_subject")?,
        non_mated_probes: cfg.get("non_mated_probes")?,
        dim: cfg.get("dim")?,
        gallery_noise: cfg.get("gallery_noise")?,
        probe_noise: cfg.get("probe_noise")?,
        modality_dropout: cfg.get("modality_dropout")?,
        seed: cfg.get("seed")?,
    };
    if sc.dim == 0 || sc.enrolled == 0 {
        return Err(CliError::Input("dim and enrolled must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&sc.modality_dropout) {
        return Err(CliError::Input("modality_dropout must lie in [0, 1]".into()));
    }
    let out = path_arg(m, "out_dir");
    std::fs::create_dir_all(&out)?;
    let generated = generate(&sc);
    let mut w = create(&out.join("templates.jsonl"))?;
    write_templates_jsonl(&mut w, &generated.templates)?;
    std::io::Write::flush(&mut w)?;
    let mut w = create(&out.join("protocol.json"))?;
    serde_json::to_writer_pretty(&mut w, &generated.protocol)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    std::io::Write::flush(&mut w)?;
    print_json(&counts(&generated.templates));
    Ok(())
}
