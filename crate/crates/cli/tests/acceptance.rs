//! Workspace acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line each and exits non-zero if any criterion fails.

#[path = "../../eval/tests/common/mod.rs"]
mod eval_oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lrid_core::io::template_payload;
use lrid_core::{dot, l2_norm, Modality, ModalityDims, RangeClass, Template};
use lrid_eval::{fnir_at_fpir, load_protocol, rank_k_accuracy, run_protocol, tar_at_far, MatedSearch};
use lrid_losses::{
    l_div, l_idl, l_open, l_rec, l_rtm, l_smo, partition_batch, range_triplet_loss, BatchPartition,
    FeatureMap, LossHyperparams, RangedVector, ScoreTable, Triplet, SOBEL_X, SOBEL_Y,
};
use lrid_testkit::{
    brute_force_assignment, central_diff, oracle_fnir_at_fpir, oracle_rank_k, oracle_tar_at_far,
    relative_error, spearman,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- 1

const H: f64 = 1e-5;
const GRAD_TOL: f64 = 1e-4;
const GRAD_INSTANCES: usize = 50;

/// Runs `instance` until `GRAD_INSTANCES` of them report an error (`None`
/// means the draw sat on a kink and was skipped); returns the worst error.
fn fd_sweep(seed: u64, mut instance: impl FnMut(&mut ChaCha8Rng, u64) -> Option<f64>) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut draw = 0;
    while done < GRAD_INSTANCES {
        if let Some(e) = instance(&mut rng, draw) {
            worst = worst.max(e);
            done += 1;
        }
        draw += 1;
    }
    worst
}

fn random_partition(rng: &mut ChaCha8Rng, seed: u64) -> BatchPartition {
    let ids: Vec<String> = (0..4).map(|i| format!("s{i}")).collect();
    let counts: Vec<usize> = (0..4).map(|_| rng.random_range(2..4)).collect();
    let split = partition_batch(&ids, &counts, 0.5, seed).unwrap();
    let rows = split.mated_probes.len() + split.non_mated_probes.len();
    let cols = split.gallery.len();
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    BatchPartition::from_split(&split, &ids, ScoreTable { rows, cols, data }).unwrap()
}

fn with_scores(part: &BatchPartition, data: &[f64]) -> BatchPartition {
    let mut p = part.clone();
    p.scores.data = data.to_vec();
    p
}

fn random_map(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize, lo: f64, hi: f64) -> FeatureMap {
    FeatureMap::new(c, h, w, (0..c * h * w).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

fn min_abs_sobel_response(f: &FeatureMap) -> f64 {
    let (h, w) = (f.height as isize, f.width as isize);
    let mut min = f64::INFINITY;
    for k in [&SOBEL_X, &SOBEL_Y] {
        for c in 0..f.channels {
            for y in 0..h {
                for x in 0..w {
                    let mut r = 0.0;
                    for ky in 0..3isize {
                        for kx in 0..3isize {
                            let (yy, xx) = (y + ky - 1, x + kx - 1);
                            if (0..h).contains(&yy) && (0..w).contains(&xx) {
                                r += k[ky as usize][kx as usize] * f.at(c, yy as usize, xx as usize);
                            }
                        }
                    }
                    min = min.min(r.abs());
                }
            }
        }
    }
    min
}

fn range_triplets(x: &[f64], n: usize, dim: usize) -> Vec<Triplet> {
    (0..n)
        .map(|t| {
            let v = |k: usize, range_class| RangedVector {
                vector: x[(t * 3 + k) * dim..(t * 3 + k + 1) * dim].to_vec(),
                range_class,
            };
            Triplet {
                anchor: v(0, RangeClass::Close),
                positive: v(1, RangeClass::Long),
                negative: v(2, RangeClass::Long),
            }
        })
        .collect()
}

fn gradient_fidelity() -> Outcome {
    let hp = LossHyperparams::default();
    let mut worst: Vec<(&str, f64)> = Vec::new();

    worst.push(("l_idl", fd_sweep(1, |rng, seed| {
        let part = random_partition(rng, seed);
        let (_, g) = l_idl(&part, &hp).unwrap();
        let fd = central_diff(|x| l_idl(&with_scores(&part, x), &hp).unwrap().0, &part.scores.data, H);
        Some(relative_error(&g.data, &fd))
    })));
    worst.push(("l_rtm", fd_sweep(2, |rng, _| {
        let s: Vec<f64> = (0..rng.random_range(1..20)).map(|_| rng.random_range(-3.0..3.0)).collect();
        let (_, g) = l_rtm(&s).unwrap();
        Some(relative_error(&g, &central_diff(|x| l_rtm(x).unwrap().0, &s, H)))
    })));
    worst.push(("l_open", fd_sweep(3, |rng, seed| {
        let hp = LossHyperparams { lambda: rng.random_range(0.0..2.0), ..Default::default() };
        let part = random_partition(rng, seed);
        let out = l_open(&part, &hp).unwrap();
        let fd = central_diff(|x| l_open(&with_scores(&part, x), &hp).unwrap().total, &part.scores.data, H);
        Some(relative_error(&out.grad.data, &fd))
    })));
    worst.push(("range_triplet_loss", fd_sweep(4, |rng, _| {
        let (margin, dim) = (0.3, 4);
        let n = rng.random_range(1..5);
        let flat: Vec<f64> = (0..n * 3 * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let triplets = range_triplets(&flat, n, dim);
        let cos = |a: &[f64], b: &[f64]| dot(a, b) / (l2_norm(a) * l2_norm(b));
        let near_kink = triplets.iter().any(|t| {
            (margin - cos(&t.anchor.vector, &t.positive.vector) + cos(&t.anchor.vector, &t.negative.vector)).abs() < 1e-6
        });
        if near_kink {
            return None;
        }
        let out = range_triplet_loss(&triplets, margin).unwrap();
        let analytic: Vec<f64> = out.grads.iter().flat_map(|g| g.concat()).collect();
        let fd = central_diff(|x| range_triplet_loss(&range_triplets(x, n, dim), margin).unwrap().value, &flat, H);
        Some(relative_error(&analytic, &fd))
    })));
    worst.push(("score_triplet_loss", fd_sweep(5, |rng, _| {
        let n = rng.random_range(2..12);
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let mate = (rng.random::<f64>() < 0.8).then(|| rng.random_range(0..n));
        let margin = rng.random_range(0.1..2.0);
        let (_, g) = lrid_fusion::score_triplet_loss(&s, mate, margin).unwrap();
        let fd = central_diff(|x| lrid_fusion::score_triplet_loss(x, mate, margin).unwrap().0, &s, H);
        Some(relative_error(&g, &fd))
    })));
    worst.push(("l_rec", fd_sweep(6, |rng, _| {
        let f = random_map(rng, 2, 4, 5, -1.0, 1.0);
        let t = random_map(rng, 2, 4, 5, -1.0, 1.0);
        let (_, g) = l_rec(&f, &t).unwrap();
        let fd = central_diff(|x| l_rec(&FeatureMap { data: x.to_vec(), ..f.clone() }, &t).unwrap().0, &f.data, H);
        Some(relative_error(&g, &fd))
    })));
    worst.push(("l_smo", fd_sweep(7, |rng, _| {
        let f = random_map(rng, 2, 4, 5, -1.0, 1.0);
        if min_abs_sobel_response(&f) < 1e-4 {
            return None;
        }
        let (_, g) = l_smo(&f).unwrap();
        let fd = central_diff(|x| l_smo(&FeatureMap { data: x.to_vec(), ..f.clone() }).unwrap().0, &f.data, H);
        Some(relative_error(&g, &fd))
    })));
    worst.push(("l_div", fd_sweep(8, |rng, _| {
        let f = FeatureMap::softmax_channels(&random_map(rng, 4, 3, 3, -2.0, 2.0));
        let (_, g) = l_div(&f).unwrap();
        let fd = central_diff(|x| l_div(&FeatureMap { data: x.to_vec(), ..f.clone() }).unwrap().0, &f.data, H);
        Some(relative_error(&g, &fd))
    })));

    let (name, max) = worst.iter().cloned().fold(("", 0.0), |a, b| if b.1 > a.1 { b } else { a });
    check(max < GRAD_TOL, || format!("{name} relative error {max:.3e}"))?;
    Ok(format!("8 losses x {GRAD_INSTANCES} instances, worst {max:.2e} ({name})"))
}

// ---------------------------------------------------------------- 2

fn metric_oracles() -> Outcome {
    let mut rows = 0;
    for seed in 0..100 {
        let (templates, protocol) = eval_oracle::random_protocol(seed);
        let inputs = load_protocol(&protocol, &templates).map_err(|e| e.to_string())?;
        let n_gallery = inputs.gallery.len();
        check(n_gallery <= 20, || format!("protocol {seed}: {n_gallery} gallery subjects"))?;
        let (report, _) = run_protocol(&inputs, Some(&eval_oracle::mean_fuser)).map_err(|e| e.to_string())?;
        let oracle = eval_oracle::oracle_evaluate(&templates, &protocol, true);
        check(report.rows.len() == oracle.rows.len(), || format!("protocol {seed}: row count"))?;
        for row in &report.rows {
            let key = (row.source.clone(), row.metric.clone(), row.target.unwrap().to_bits());
            let (v, t) = oracle.rows.get(&key).ok_or_else(|| format!("protocol {seed}: missing {key:?}"))?;
            check((row.value - v).abs() <= 1e-12, || format!("protocol {seed} {key:?}: {} vs {v}", row.value))?;
            let same_threshold = match (row.threshold, t) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                (None, None) => true,
                _ => false,
            };
            check(same_threshold, || format!("protocol {seed} {key:?}: threshold"))?;
            rows += 1;
        }

        // the bare metric functions on the same kind of score rows
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.random_range(2..=20);
        let draw = |rng: &mut ChaCha8Rng| f64::from(rng.random_range(0..40)) / 20.0 - 1.0;
        let mated: Vec<(Vec<f64>, usize)> = (0..rng.random_range(1..15))
            .map(|_| ((0..n).map(|_| draw(&mut rng)).collect(), rng.random_range(0..n)))
            .collect();
        let non_mated: Vec<Vec<f64>> = (0..10).map(|_| (0..n).map(|_| draw(&mut rng)).collect()).collect();
        let searches: Vec<MatedSearch> = mated.iter().map(|(s, m)| MatedSearch { scores: s, mate: *m }).collect();
        let nm: Vec<&[f64]> = non_mated.iter().map(Vec::as_slice).collect();
        let k = rng.random_range(1..=n);
        let fpir = rng.random_range(0.01..0.9);
        let far = rng.random_range(0.001..0.5);
        let genuine: Vec<f64> = mated.iter().map(|(s, m)| s[*m]).collect();
        let impostor = non_mated.concat();
        let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12;
        check((rank_k_accuracy(&searches, k).unwrap() - oracle_rank_k(&mated, k)).abs() <= 1e-12, || {
            format!("rank_k_accuracy, draw {seed}")
        })?;
        check(
            close(fnir_at_fpir(&searches, &nm, fpir).unwrap(), oracle_fnir_at_fpir(&mated, &non_mated, fpir)),
            || format!("fnir_at_fpir, draw {seed}"),
        )?;
        check(
            close(tar_at_far(&genuine, &impostor, far).unwrap(), oracle_tar_at_far(&genuine, &impostor, far)),
            || format!("tar_at_far, draw {seed}"),
        )?;
    }
    Ok(format!("100 protocols, {rows} report rows and 300 metric calls within 1e-12"))
}

// ---------------------------------------------------------------- 3

fn toy_open_set() -> Outcome {
    use lrid_losses::toy::{generate_toy, toy_searches, train_toy, ToyConfig, ToyEmbeddings};
    let fnir = |points: &ToyEmbeddings, gallery: usize| -> f64 {
        let (mated, non_mated) = toy_searches(points, gallery).unwrap();
        let m: Vec<MatedSearch> = mated.iter().map(|(s, g)| MatedSearch { scores: s, mate: *g }).collect();
        let n: Vec<&[f64]> = non_mated.iter().map(Vec::as_slice).collect();
        fnir_at_fpir(&m, &n, 0.10).unwrap().0
    };
    let mut wins = 0;
    let mut before = 0.0;
    let mut after = 0.0;
    for seed in 0..10 {
        let cfg = ToyConfig { seed, ..ToyConfig::default() };
        let init = generate_toy(&cfg).map_err(|e| e.to_string())?;
        let (trained, _) = train_toy(&init, &cfg).map_err(|e| e.to_string())?;
        let (a, b) = (fnir(&init, cfg.gallery_samples), fnir(&trained, cfg.gallery_samples));
        before += a / 10.0;
        after += b / 10.0;
        if b < a {
            wins += 1;
        }
    }
    check(wins >= 9, || format!("{wins}/10 seeds improved"))?;
    Ok(format!("{wins}/10 seeds improved, mean FNIR@10%FPIR {before:.3} -> {after:.3}"))
}

// ---------------------------------------------------------------- 4

fn fusion_efficacy() -> Outcome {
    use lrid_fusion::synthetic::{generate_quality_data, QualityDataConfig};
    use lrid_fusion::{baseline_fuse_matrix, train_qme, FusionSample, QmeConfig};
    let tar = |samples: &[FusionSample], fused: &[Vec<f64>]| -> f64 {
        let mut genuine = Vec::new();
        let mut impostor = Vec::new();
        for (s, f) in samples.iter().zip(fused) {
            for (g, v) in f.iter().enumerate() {
                if Some(g) == s.mate {
                    genuine.push(*v);
                } else {
                    impostor.push(*v);
                }
            }
        }
        tar_at_far(&genuine, &impostor, 0.01).unwrap().0
    };
    let (mut qme, mut base) = (0.0, 0.0);
    for seed in 0..10 {
        let data = generate_quality_data(&QualityDataConfig { seed, ..Default::default() }).map_err(|e| e.to_string())?;
        let (train, test) = data.samples.split_at(data.samples.len() / 2);
        let (model, _) = train_qme(train, &QmeConfig { seed, ..Default::default() }).map_err(|e| e.to_string())?;
        let fused: Vec<Vec<f64>> = test
            .iter()
            .map(|s| model.fuse(&s.scores, &model.quality_for(s.features.as_ref(), &s.quality).unwrap()).unwrap())
            .collect();
        let mean: Vec<Vec<f64>> = test.iter().map(|s| baseline_fuse_matrix(&s.scores, &model.normalizer).unwrap()).collect();
        qme += tar(test, &fused) / 10.0;
        base += tar(test, &mean) / 10.0;
    }
    check(qme >= base, || format!("QME {qme:.4} < mean fusion {base:.4}"))?;
    Ok(format!("mean TAR@1%FAR: QME {qme:.4}, mean fusion {base:.4}"))
}

// ---------------------------------------------------------------- 5

fn crossing_scenario() -> Outcome {
    use lrid_track::scenario::{generate_crossing, ScenarioConfig};
    use lrid_track::{count_id_switches, run_tracker, TrackerConfig};
    let dets = generate_crossing(&ScenarioConfig::default());
    let switches = |psr: bool| -> Result<usize, String> {
        let rows = run_tracker(&dets, &TrackerConfig { psr, ..Default::default() }).map_err(|e| e.to_string())?;
        Ok(count_id_switches(&rows))
    };
    let (off, on) = (switches(false)?, switches(true)?);
    check(off >= 1 && on == 0, || format!("{off} switches without PSR, {on} with"))?;
    Ok(format!("{off} switch(es) without PSR, {on} with"))
}

// ---------------------------------------------------------------- 6

fn assignment_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..200 {
        let (n, m) = (rng.random_range(1..=7), rng.random_range(1..=7));
        let forbid = if trial % 2 == 0 { 0.0 } else { 0.3 };
        let cost: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        if rng.random::<f64>() < forbid {
                            f64::INFINITY
                        } else if trial % 3 == 0 {
                            f64::from(rng.random_range(0..5))
                        } else {
                            rng.random_range(-10.0..10.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let pairs = lrid_track::linear_assignment(&cost);
        let total: f64 = pairs.iter().map(|&(r, c)| cost[r][c]).sum();
        let (count, best) = brute_force_assignment(&cost);
        check(pairs.len() == count && (total - best).abs() < 1e-9, || {
            format!("trial {trial} ({n}x{m}): {} pairs cost {total} vs {count} pairs cost {best}", pairs.len())
        })?;
    }
    Ok("200 matrices up to 7x7 match exhaustive search".into())
}

// ---------------------------------------------------------------- 7

fn turbulence_physics() -> Outcome {
    use lrid_turbsim::*;
    // zero-phase symmetry
    let spec = ZernikeSpec::default();
    let p = spec.grid;
    let kernel = psf_from_phase(&vec![0.0; p * p], &spec, 33, 63).map_err(|e| e.to_string())?.kernel;
    let n = kernel.size;
    let mut asym = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            asym = asym.max((kernel.at(r, c) - kernel.at(n - 1 - r, n - 1 - c)).abs());
        }
    }
    check(asym < 1e-9, || format!("zero-phase asymmetry {asym:.2e}"))?;

    // tilt at P = 256
    let tilt_spec = ZernikeSpec { j_max: 3, grid: 256, aperture_radius: 64.0 };
    let tilt_basis = ZernikeBasis::new(&tilt_spec).map_err(|e| e.to_string())?;
    let (r0, c0) = centroid(&full_psf(&tilt_basis.phase(&[0.0; 3]), &tilt_spec).unwrap(), 256);
    let mut tilt_err = 0.0f64;
    for a in [-2.0, -0.7, 0.3, 1.0, 2.5] {
        let want = a * 256.0 / (std::f64::consts::PI * tilt_spec.aperture_radius);
        let (_, c) = centroid(&full_psf(&tilt_basis.phase(&[0.0, a, 0.0]), &tilt_spec).unwrap(), 256);
        let (r, _) = centroid(&full_psf(&tilt_basis.phase(&[0.0, 0.0, a]), &tilt_spec).unwrap(), 256);
        tilt_err = tilt_err.max((c - c0 - want).abs()).max((r - r0 - want).abs());
    }
    check(tilt_err < 0.1, || format!("tilt centroid error {tilt_err:.3} px"))?;

    // every sampled PSF valid; blur monotone in D/r0
    let basis = ZernikeBasis::new(&spec).map_err(|e| e.to_string())?;
    let weights = mode_weights(spec.j_max).map_err(|e| e.to_string())?;
    let levels: Vec<f64> = (1..=10).map(f64::from).collect();
    let mut mean_blur = Vec::new();
    let mut worst_sum = 0.0f64;
    for &dr0 in &levels {
        let mut acc = 0.0;
        for seed in 0..100 {
            let phase = basis.phase(&sample_coefficients(&weights, dr0, &mut substream(seed, 0, 0)));
            let k = psf_from_phase(&phase, &spec, 33, 63).map_err(|e| e.to_string())?.kernel;
            check(k.data.iter().all(|v| *v >= 0.0 && v.is_finite()), || format!("negative PSF at D/r0 {dr0}"))?;
            worst_sum = worst_sum.max((k.sum() - 1.0).abs());
            acc += blur_metric(&k) / 100.0;
        }
        mean_blur.push(acc);
    }
    check(worst_sum < 1e-6, || format!("PSF sum off by {worst_sum:.2e}"))?;
    let rho = spearman(&levels, &mean_blur);
    check(rho > 0.9, || format!("blur Spearman {rho:.3}"))?;
    Ok(format!(
        "asymmetry {asym:.1e}, tilt error {tilt_err:.3} px, sum error {worst_sum:.1e}, Spearman {rho:.3}"
    ))
}

// ---------------------------------------------------------------- 8

fn zernike_gram() -> Outcome {
    use lrid_turbsim::{ZernikeBasis, ZernikeSpec};
    let spec = ZernikeSpec { j_max: 15, grid: 256, aperture_radius: 128.0 };
    let gram = ZernikeBasis::new(&spec).map_err(|e| e.to_string())?.gram(15);
    let mut worst = 0.0f64;
    for (a, row) in gram.iter().enumerate() {
        for (b, g) in row.iter().enumerate() {
            worst = worst.max((g - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    check(worst < 2e-2, || format!("max Gram deviation {worst:.4}"))?;
    Ok(format!("modes 1..15 at P=256, max deviation {worst:.4}"))
}

// ---------------------------------------------------------------- 9

fn template_bytes() -> Outcome {
    let dims = ModalityDims::default();
    let size = |modality: Modality| {
        template_payload(&Template {
            subject_id: "s".into(),
            media_id: "m".into(),
            modality,
            vector: vec![0.5; dims.get(modality)],
            quality: 0.5,
            range_class: RangeClass::Close,
        })
        .len()
    };
    let (face, gait, body) = (size(Modality::Face), size(Modality::Gait), size(Modality::Body));
    let total = face + gait + body;
    check((face, gait, body, total) == (2052, 32768, 8192, 43012), || {
        format!("face {face}, gait {gait}, body {body}, combined {total}")
    })?;
    Ok(format!("face {face} B, gait {gait} B, body {body} B, combined {total} B"))
}

// ---------------------------------------------------------------- 10

fn lrid(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lrid")).args(args).output().map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!("lrid {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
    })
}

fn digest_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .iter()
        .filter(|f| f.is_file())
        .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), Sha256::digest(std::fs::read(f).unwrap()).to_vec()))
        .collect()
}

fn run_pipeline(root: &Path) -> Result<(), String> {
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let proto = root.join("proto");
    let out = root.join("out");
    std::fs::create_dir_all(&out).map_err(|e| e.to_string())?;
    lrid(&["protocol-gen", "--seed", "11", &s(&proto)])?;
    lrid(&["ingest", &s(&proto.join("templates.jsonl")), &s(&out.join("templates.bin"))])?;
    lrid(&["eval", &s(&proto.join("protocol.json")), &s(&out.join("eval")), &s(&out.join("templates.bin"))])?;
    let eval = out.join("eval");
    lrid(&["fuse-train", "--seed", "3", &s(&eval.join("scores.csv")), &s(&eval.join("labels.csv")), &s(&out.join("model.json"))])?;
    lrid(&["scenario-gen", "--seed", "5", &s(&out.join("det.jsonl"))])?;
    lrid(&["track", &s(&out.join("det.jsonl")), &s(&out.join("tracks.csv"))])?;

    let mut pgm = b"P5\n96 80\n255\n".to_vec();
    pgm.extend((0..96 * 80u32).map(|i| ((i % 96) * 2 + (i / 96) * 3 % 256) as u8));
    std::fs::write(out.join("in.pgm"), pgm).map_err(|e| e.to_string())?;
    lrid(&["turbsim", "--dr0", "3", "--noise", "2", "--tile", "48", "--seed", "7", &s(&out.join("in.pgm")), &s(&out.join("turb.fsimg"))])?;
    Ok(())
}

fn cli_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_pipeline(a.path())?;
    run_pipeline(b.path())?;
    let mut files = 0;
    for sub in ["proto", "out", "out/eval"] {
        let (x, y) = (digest_dir(&a.path().join(sub)), digest_dir(&b.path().join(sub)));
        check(x.len() == y.len() && !x.is_empty(), || format!("{sub}: file lists differ"))?;
        for ((name, hx), (_, hy)) in x.iter().zip(&y) {
            check(hx == hy, || format!("{sub}/{name}: SHA-256 differs between reruns"))?;
            files += 1;
        }
    }
    Ok(format!("{files} output files byte-identical across reruns (eval, fuse-train, track, turbsim)"))
}

// ----------------------------------------------------------------

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "gradient fidelity", budget: secs(30), run: gradient_fidelity },
        Criterion { id: 2, name: "metric oracle equivalence", budget: secs(60), run: metric_oracles },
        Criterion { id: 3, name: "open-set loss efficacy", budget: secs(60), run: toy_open_set },
        Criterion { id: 4, name: "fusion efficacy", budget: secs(120), run: fusion_efficacy },
        Criterion { id: 5, name: "tracking ID-switch correction", budget: secs(10), run: crossing_scenario },
        Criterion { id: 6, name: "assignment optimality", budget: secs(10), run: assignment_optimality },
        Criterion { id: 7, name: "turbulence physics", budget: secs(120), run: turbulence_physics },
        Criterion { id: 8, name: "Zernike orthonormality", budget: None, run: zernike_gram },
        Criterion { id: 9, name: "template byte layout", budget: None, run: template_bytes },
        Criterion { id: 10, name: "CLI determinism", budget: None, run: cli_determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {:.1} s, budget {} s", elapsed.as_secs_f64(), b.as_secs())),
            (o, _) => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {}: {detail} [{:.2} s]", c.id, c.name, elapsed.as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
