use lrid_core::io::{deserialize_template, read_store, serialize_template, write_store};
use lrid_core::{
    aggregate_gallery, build_score_matrix, cosine_similarity, normalize, GalleryEntry, Modality,
    ModalityDims, PerModality, ProbeRecord, RangeClass, Template,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(&v).unwrap()
}

fn modality_strategy() -> impl Strategy<Value = Modality> {
    prop_oneof![Just(Modality::Face), Just(Modality::Gait), Just(Modality::Body)]
}

proptest! {
    #[test]
    fn binary_round_trip(
        modality in modality_strategy(),
        vector in prop::collection::vec(-10.0f64..10.0, 1..64),
        quality in 0.0f64..=1.0,
        long in any::<bool>(),
        subject in "[a-z0-9_-]{0,12}",
        media in "[a-z0-9_.]{0,12}",
    ) {
        let t = Template {
            subject_id: subject,
            media_id: media,
            modality,
            vector,
            quality,
            range_class: if long { RangeClass::Long } else { RangeClass::Close },
        };
        let bytes = serialize_template(&t).unwrap();
        let (back, used) = deserialize_template(&bytes).unwrap();
        prop_assert_eq!(used, bytes.len());
        prop_assert_eq!(&back.subject_id, &t.subject_id);
        prop_assert_eq!(&back.media_id, &t.media_id);
        prop_assert_eq!(back.modality, t.modality);
        prop_assert_eq!(back.range_class, t.range_class);
        prop_assert_eq!(back.quality, t.quality);
        for (a, b) in back.vector.iter().zip(&t.vector) {
            prop_assert_eq!(*a as f32, *b as f32);
            prop_assert_eq!(*a, (*b as f32) as f64);
        }
    }

    #[test]
    fn aggregation_is_permutation_invariant(seed in any::<u64>(), n in 1usize..8, shift in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut templates: Vec<Template> = (0..n)
            .map(|i| Template {
                subject_id: "s".into(),
                media_id: format!("m{i}"),
                modality: Modality::Body,
                vector: unit(&mut rng, 16),
                quality: rng.random_range(0.05..1.0),
                range_class: RangeClass::Close,
            })
            .collect();
        let a = aggregate_gallery(&templates).unwrap();
        templates.rotate_left(shift % n);
        templates.reverse();
        let b = aggregate_gallery(&templates).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-9);
    }
}

#[test]
fn cosine_is_symmetric_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let dim = 2 + i % 30;
        let a = unit(&mut rng, dim);
        let b = unit(&mut rng, dim);
        let ab = cosine_similarity(&a, &b).unwrap();
        let ba = cosine_similarity(&b, &a).unwrap();
        assert_eq!(ab, ba);
        assert!((-1.0..=1.0).contains(&ab));
    }
}

#[test]
fn score_matrix_matches_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let dims = [8usize, 12, 6];
    for _ in 0..100 {
        let n_gallery = rng.random_range(1..8);
        let mut probe = ProbeRecord {
            probe_id: "p".into(),
            true_subject_id: None,
            vectors: PerModality::default(),
            quality: PerModality::default(),
        };
        for m in Modality::ALL {
            if m == Modality::Face || rng.random_bool(0.7) {
                probe.vectors.set(m, unit(&mut rng, dims[m.index()]));
            }
        }
        let gallery: Vec<GalleryEntry> = (0..n_gallery)
            .map(|g| {
                let mut vectors = PerModality::default();
                for m in Modality::ALL {
                    if rng.random_bool(0.8) {
                        vectors.set(m, unit(&mut rng, dims[m.index()]));
                    }
                }
                GalleryEntry {
                    subject_id: format!("g{g}"),
                    is_distractor: false,
                    vectors,
                    media_count: 1,
                }
            })
            .collect();
        let s = build_score_matrix(&probe, &gallery).unwrap();
        for (g, entry) in gallery.iter().enumerate() {
            for m in Modality::ALL {
                let expected = match (probe.vectors.get(m), entry.vectors.get(m)) {
                    (Some(p), Some(q)) => {
                        let mut acc = 0.0;
                        for k in 0..p.len() {
                            acc += p[k] * q[k];
                        }
                        Some(acc)
                    }
                    _ => None,
                };
                match (s.score(g, m), expected) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                    (None, None) => {}
                    (a, b) => panic!("presence mismatch at ({g}, {m}): {a:?} vs {b:?}"),
                }
            }
        }
    }
}

#[test]
fn store_round_trip_through_file_layout() {
    let dims = ModalityDims::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let templates: Vec<Template> = Modality::ALL
        .iter()
        .map(|&m| Template {
            subject_id: "subject".into(),
            media_id: format!("{m}-media"),
            modality: m,
            vector: unit(&mut rng, dims.get(m)),
            quality: 0.5,
            range_class: RangeClass::Close,
        })
        .collect();
    let mut buf = Vec::new();
    write_store(&mut buf, &templates).unwrap();
    assert_eq!(&buf[..8], b"FSTPLT01");
    let back = read_store(&buf[..], &dims).unwrap();
    assert_eq!(back.len(), 3);
    for (a, b) in back.iter().zip(&templates) {
        assert_eq!(a.modality, b.modality);
        assert!(a.vector.iter().zip(&b.vector).all(|(x, y)| *x as f32 == *y as f32));
    }
}
