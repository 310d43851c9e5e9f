//! Brute-force protocol evaluator shared by the oracle tests and the
//! workspace acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeMap;

use lrid_core::{Modality, ProbeRecord, ScoreMatrix, Template};
use lrid_eval::synthetic::{generate, SyntheticConfig};
use lrid_eval::ProtocolFile;
use lrid_testkit::{oracle_fnir_at_fpir, oracle_rank_k, oracle_tar_at_far};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mean_fuser(s: &ScoreMatrix, _p: &ProbeRecord) -> lrid_core::Result<Vec<f64>> {
    Ok((0..s.n_gallery())
        .map(|g| {
            let present: Vec<f64> = s.row(g).iter().cloned().filter(|x| !x.is_nan()).collect();
            present.iter().sum::<f64>() / present.len() as f64
        })
        .collect())
}

/// Aggregates templates the long way: weighted sum then divide by norm.
fn oracle_aggregate(ts: &[&Template]) -> Vec<f64> {
    let dim = ts[0].vector.len();
    let total: f64 = ts.iter().map(|t| t.quality).sum();
    let mut acc = vec![0.0; dim];
    for t in ts {
        let w = if total > 0.0 { t.quality } else { 1.0 };
        for k in 0..dim {
            acc[k] += w * t.vector[k];
        }
    }
    let mut n = 0.0;
    for x in &acc {
        n += x * x;
    }
    let n = n.sqrt();
    acc.iter().map(|x| x / n).collect()
}

pub struct OracleRows {
    // source -> (metric, target) -> (value, threshold)
    pub rows: BTreeMap<(String, String, u64), (f64, Option<f64>)>,
}

pub fn oracle_evaluate(templates: &[Template], protocol: &ProtocolFile, fused: bool) -> OracleRows {
    let cfg = &protocol.config;
    // gallery: subject -> modality -> aggregated vector
    let mut gal: BTreeMap<String, BTreeMap<usize, Vec<&Template>>> = BTreeMap::new();
    for t in templates {
        if protocol.gallery_media.contains(&t.media_id) {
            gal.entry(t.subject_id.clone())
                .or_default()
                .entry(t.modality.index())
                .or_default()
                .push(t);
        }
    }
    let gallery_ids: Vec<String> = gal.keys().cloned().collect();
    let gvec: Vec<BTreeMap<usize, Vec<f64>>> = gal
        .values()
        .map(|m| m.iter().map(|(k, v)| (*k, oracle_aggregate(v))).collect())
        .collect();

    // per probe: mate index and per-source score rows
    let mut per_source: BTreeMap<String, Vec<(Option<usize>, Vec<f64>)>> = BTreeMap::new();
    for spec in &protocol.probes {
        let ts: Vec<&Template> = templates.iter().filter(|t| t.media_id == spec.media_id).collect();
        let subject = &ts[0].subject_id;
        let mate = if protocol.distractor_ids.contains(subject) {
            None
        } else {
            gallery_ids.iter().position(|g| g == subject)
        };
        let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for m in 0..3 {
            let mts: Vec<&Template> = ts.iter().cloned().filter(|t| t.modality.index() == m).collect();
            if mts.is_empty() {
                continue;
            }
            let p = oracle_aggregate(&mts);
            let row = gvec
                .iter()
                .map(|g| match g.get(&m) {
                    Some(v) => {
                        let mut d = 0.0;
                        for k in 0..v.len() {
                            d += p[k] * v[k];
                        }
                        d.clamp(-1.0, 1.0)
                    }
                    None => f64::NAN,
                })
                .collect();
            rows.insert(m, row);
        }
        for (m, row) in &rows {
            per_source
                .entry(Modality::from_index(*m).unwrap().as_str().to_string())
                .or_default()
                .push((mate, row.clone()));
        }
        if fused {
            let n = gallery_ids.len();
            let f: Vec<f64> = (0..n)
                .map(|g| {
                    let vals: Vec<f64> = rows.values().map(|r| r[g]).filter(|x| !x.is_nan()).collect();
                    vals.iter().sum::<f64>() / vals.len() as f64
                })
                .collect();
            per_source.entry("fused".into()).or_default().push((mate, f));
        }
    }

    let mut out = BTreeMap::new();
    for (source, searches) in &per_source {
        let searches: Vec<&(Option<usize>, Vec<f64>)> =
            searches.iter().filter(|(_, r)| r.iter().any(|x| !x.is_nan())).collect();
        let mut genuine = Vec::new();
        let mut impostor = Vec::new();
        for (mate, row) in &searches {
            for (g, s) in row.iter().enumerate() {
                if s.is_nan() {
                    continue;
                }
                if Some(g) == *mate {
                    genuine.push(*s);
                } else {
                    impostor.push(*s);
                }
            }
        }
        let mated: Vec<(Vec<f64>, usize)> = searches
            .iter()
            .filter_map(|(m, r)| m.map(|m| (r.clone(), m)))
            .collect();
        let non_mated: Vec<Vec<f64>> = searches
            .iter()
            .filter(|(m, _)| m.is_none())
            .map(|(_, r)| r.clone())
            .collect();
        if !genuine.is_empty() && !impostor.is_empty() {
            for &far in &cfg.far_targets {
                let (v, t) = oracle_tar_at_far(&genuine, &impostor, far);
                out.insert((source.clone(), "tar_at_far".into(), far.to_bits()), (v, Some(t)));
            }
        }
        if !mated.is_empty() {
            let k = cfg.rank_k as f64;
            out.insert(
                (source.clone(), "rank_k".into(), k.to_bits()),
                (oracle_rank_k(&mated, cfg.rank_k), None),
            );
            out.insert(
                (source.clone(), "rank_1".into(), 1f64.to_bits()),
                (oracle_rank_k(&mated, 1), None),
            );
            if !non_mated.is_empty() {
                let (v, t) = oracle_fnir_at_fpir(&mated, &non_mated, cfg.fpir_target);
                out.insert(
                    (source.clone(), "fnir_at_fpir".into(), cfg.fpir_target.to_bits()),
                    (v, Some(t)),
                );
            }
        }
    }
    OracleRows { rows: out }
}

pub fn random_protocol(seed: u64) -> (Vec<Template>, ProtocolFile) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SyntheticConfig {
        enrolled: rng.random_range(1..=16),
        distractors: rng.random_range(0..=4),
        non_mated_probes: 10,
        probes_per_subject: rng.random_range(1..=2),
        dim: 8,
        probe_noise: rng.random_range(0.1..0.8),
        seed,
        ..Default::default()
    };
    let mut p = generate(&cfg);
    p.protocol.config.far_targets = vec![0.1, 0.01, 1e-3];
    p.protocol.config.fpir_target = rng.random_range(0.05..0.5);
    p.protocol.config.rank_k = rng.random_range(1..=5);
    (p.templates, p.protocol)
}
