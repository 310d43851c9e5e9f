//! `loss-demo`: open-set loss components of one batch.

use clap::{Arg, ArgMatches, Command};
use lrid_losses::batch::read_batch;
use lrid_losses::{l_open, LossHyperparams};
use serde_json::json;

use super::{path_arg, print_json};
use crate::config::{key, read_bytes, with_keys, Key, Resolved};
use crate::Result;

pub const KEYS: &[Key] = &[
    key("seed", "0", "run seed; this command draws no random numbers"),
    key("alpha", "16", "detection sigmoid sharpness"),
    key("beta", "16", "identification sigmoid sharpness"),
    key("gamma", "16", "soft-rank sigmoid sharpness"),
    key("lambda", "0.5", "weight of the relative-threshold term"),
    key("softrank_self_term", "true", "count the mate against itself in soft-rank"),
];

pub fn command() -> Command {
    with_keys(
        Command::new("loss-demo")
            .about("Print the open-set loss components and gradient norm of a batch.jsonl")
            .arg(Arg::new("batch").required(true).value_name("BATCH_JSONL").help("Batch of embeddings with subject, split and range class")),
        KEYS,
    )
}

pub fn hyperparams(cfg: &Resolved) -> Result<LossHyperparams> {
    Ok(LossHyperparams {
        alpha: cfg.get("alpha")?,
        beta: cfg.get("beta")?,
        gamma: cfg.get("gamma")?,
        lambda: cfg.get("lambda")?,
        softrank_self_term: cfg.get("softrank_self_term")?,
        ..LossHyperparams::default()
    })
}

pub fn run(m: &ArgMatches) -> Result<()> {
    let cfg = Resolved::from_matches(m, KEYS)?;
    cfg.log("loss-demo");
    cfg.get::<u64>("seed")?;
    let hp = hyperparams(&cfg)?;
    let batch = read_batch(read_bytes(&path_arg(m, "batch"))?.as_slice())?;
    let loss = l_open(&batch.partition, &hp)?;
    print_json(&json!({
        "l_idl": loss.idl,
        "l_rtm": loss.rtm,
        "l_open": loss.total,
        "grad_norm": loss.grad.norm(),
        "gallery": batch.partition.gallery.len(),
        "mated_probes": batch.partition.mated.len(),
        "non_mated_probes": batch.partition.non_mated.len(),
    }));
    Ok(())
}
