use std::path::PathBuf;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ucurve::cost::{oscillating_chain_fraction, PenalizedMce};
use ucurve::data::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn bundled_fixtures_have_their_documented_shapes() {
    let votes = load_dataset(fixture("votes16.csv"), DataFormat::CsvLabeledLast).unwrap();
    assert_eq!((votes.feature_count(), votes.class_count(), votes.sample_count()), (16, 2, 435));

    let pen = load_dataset(fixture("pendigits16.csv"), DataFormat::CsvLabeledLast).unwrap();
    assert_eq!((pen.feature_count(), pen.class_count()), (16, 10));

    let wop = load_dataset(fixture("woperator16.csv"), DataFormat::CsvLabeledLast).unwrap();
    assert_eq!((wop.feature_count(), wop.class_count()), (16, 2));
    assert!(wop.row(0).iter().all(|&v| v == 0.0 || v == 1.0));

    let bio = load_dataset(fixture("bio27.csv"), DataFormat::CsvLabeledFirst).unwrap();
    assert_eq!((bio.feature_count(), bio.class_count(), bio.sample_count()), (27, 3, 15));
    let q = quantize_levels(&bio, 3).unwrap();
    assert_eq!(q.feature_count(), 27);
    assert!((0..27).all(|j| q.column(j).all(|v| v == 0.0 || v == 1.0 || v == 2.0)));
}

#[test]
fn sparse_fixture_filters_to_sixteen_features() {
    let raw = load_dataset(fixture("dorothea_style.svm"), DataFormat::SvmlightLike).unwrap();
    assert!(raw.feature_count() > 300);
    let kept = filter_sparse_features(&raw, 100).unwrap();
    assert_eq!(kept.feature_count(), 16);
    assert_eq!(kept.sample_count(), raw.sample_count());
    assert_eq!(kept.labels(), raw.labels());
    for (j, &orig) in kept.provenance().kept_features.iter().enumerate() {
        let nonnull = raw.column(orig).filter(|&v| v != 0.0).count();
        assert!(nonnull >= 100);
        assert!(kept.column(j).eq(raw.column(orig)));
    }
    assert!(matches!(
        filter_sparse_features(&raw, 100_000),
        Err(DataError::AllFeaturesDropped { .. })
    ));
}

#[test]
fn real_data_chains_oscillate_sometimes() {
    // Measured, not asserted: real costs are not guaranteed U-shaped.
    let d = zscore_binarize(&load_dataset(fixture("pendigits16.csv"), DataFormat::CsvLabeledLast).unwrap());
    let cost = PenalizedMce::new(&d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = oscillating_chain_fraction(&cost, 200, &mut rng);
    assert!((0.0..=1.0).contains(&f));
}

fn raw_rows() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<u8>)> {
    (1usize..6, 1usize..30).prop_flat_map(|(n, t)| {
        (
            prop::collection::vec(prop::collection::vec(-50.0f64..50.0, n), t),
            prop::collection::vec(0u8..4, t),
        )
    })
}

fn build(rows: &[Vec<f64>], labels: &[u8]) -> Dataset {
    let names: Vec<String> = labels.iter().map(|l| format!("y{l}")).collect();
    Dataset::from_rows(rows, &names).unwrap()
}

proptest! {
    #[test]
    fn preprocessing_preserves_samples_and_labels((rows, labels) in raw_rows(), k in 2usize..6) {
        let d = build(&rows, &labels);
        let b = zscore_binarize(&d);
        let q = quantize_levels(&d, k).unwrap();
        let f = filter_sparse_features(&d, 0).unwrap();
        for out in [&b, &q, &f] {
            prop_assert_eq!(out.sample_count(), d.sample_count());
            prop_assert_eq!(out.labels(), d.labels());
        }
        prop_assert_eq!(f.feature_count(), d.feature_count());
        for j in 0..d.feature_count() {
            prop_assert!(b.column(j).all(|v| v == 0.0 || v == 1.0));
            prop_assert!(q.column(j).all(|v| v >= 0.0 && v < k as f64 && v.fract() == 0.0));
            prop_assert!(f.column(j).eq(d.column(j)));
        }
        let twice = zscore_binarize(&b);
        for j in 0..d.feature_count() {
            prop_assert!(twice.column(j).all(|v| v == 0.0 || v == 1.0));
        }
    }

    #[test]
    fn quantization_preserves_value_order((rows, labels) in raw_rows(), k in 2usize..6) {
        let d = build(&rows, &labels);
        let q = quantize_levels(&d, k).unwrap();
        for j in 0..d.feature_count() {
            let raw: Vec<f64> = d.column(j).collect();
            let lv: Vec<f64> = q.column(j).collect();
            for a in 0..raw.len() {
                for b in 0..raw.len() {
                    if raw[a] < raw[b] {
                        prop_assert!(lv[a] <= lv[b]);
                    }
                    if raw[a] == raw[b] {
                        prop_assert_eq!(lv[a], lv[b]);
                    }
                }
            }
        }
    }

    #[test]
    fn csv_export_round_trips((rows, labels) in raw_rows()) {
        let d = build(&rows, &labels);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = parse_dataset(std::str::from_utf8(&buf).unwrap(), DataFormat::CsvLabeledLast).unwrap();
        prop_assert_eq!(back.labels(), d.labels());
        prop_assert_eq!(back.class_names(), d.class_names());
        for i in 0..d.sample_count() {
            prop_assert_eq!(back.row(i), d.row(i));
        }
    }
}
