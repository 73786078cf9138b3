use std::fs;
use std::path::Path;

use hsmix_core::pipeline::{
    load_entry, read_soft_mask, run_batch, scan_dataset, write_class_ids, write_image,
    BatchOptions, EmitSet, OutputKind, PairStatus, SOFT_SCALE,
};
use hsmix_core::{argmax_decode, hsmix_pair, AugConfig, ImageTensor, PairRng};

fn make_dataset(root: &Path, sizes: &[(usize, usize)]) {
    fs::create_dir_all(root.join("images")).unwrap();
    fs::create_dir_all(root.join("masks")).unwrap();
    for (i, &(h, w)) in sizes.iter().enumerate() {
        let img = ImageTensor::from_fn(h, w, 3, |r, c, ch| {
            ((r * 3 + c * (i + 1) + ch * 11) % 23) as f64 / 22.0
        })
        .unwrap();
        write_image(&root.join(format!("images/e{i}.png")), &img).unwrap();
        let ids: Vec<u32> = (0..h * w)
            .map(|p| ((p / w / 5 + p % w / 7 + i) % 3) as u32)
            .collect();
        write_class_ids(&root.join(format!("masks/e{i}.png")), h, w, &ids).unwrap();
    }
}

#[test]
fn scan_records_issues_without_dropping_good_entries() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    make_dataset(root, &[(20, 24), (20, 24), (20, 24)]);
    fs::write(root.join("images/broken.png"), b"not a png").unwrap();
    fs::write(root.join("masks/broken.png"), b"not a png either").unwrap();
    write_class_ids(&root.join("masks/lonely.png"), 2, 2, &[0, 1, 1, 0]).unwrap();
    // same stem, wrong size
    write_image(
        &root.join("images/wrong.png"),
        &ImageTensor::filled(5, 5, 1, 0.5).unwrap(),
    )
    .unwrap();
    write_class_ids(&root.join("masks/wrong.png"), 4, 5, &[0; 20]).unwrap();
    fs::write(root.join("images/notes.txt"), "ignored").unwrap();
    // 16-bit masks would lose class ids on conversion
    write_image(
        &root.join("images/deep.png"),
        &ImageTensor::filled(4, 4, 3, 0.2).unwrap(),
    )
    .unwrap();
    image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_raw(4, 4, vec![1; 16])
        .unwrap()
        .save(root.join("masks/deep.png"))
        .unwrap();

    let index = scan_dataset(&root.join("images"), &root.join("masks")).unwrap();
    let ids: Vec<&str> = index.entries.iter().map(|e| e.id.as_str()).collect();
    assert_eq!(ids, ["e0", "e1", "e2"]);
    assert_eq!(index.issues.len(), 4);
    assert_eq!(index.num_classes, 3);
    assert_eq!(index.channels, 3);
    assert!(index.clone().with_num_classes(2).is_err());
    assert_eq!(index.with_num_classes(5).unwrap().num_classes, 5);
}

#[test]
fn missing_directory_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(scan_dataset(&tmp.path().join("nope"), tmp.path()).is_err());
}

#[test]
fn written_outputs_match_in_memory_mixing() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    make_dataset(root, &[(24, 20), (24, 20), (24, 20), (24, 20)]);
    let index = scan_dataset(&root.join("images"), &root.join("masks")).unwrap();
    let cfg = AugConfig {
        l_min: 5,
        l_max: 15,
        seed: 77,
        ..AugConfig::default()
    };
    let out = root.join("out");
    let manifest = run_batch(&index, &cfg, &out, &BatchOptions::default()).unwrap();
    assert_eq!(manifest.failures, 0);
    let pairs = hsmix_core::pipeline::form_pairs(index.len(), cfg.seed).unwrap();

    for (record, &(a, b)) in manifest.records.iter().zip(&pairs) {
        assert_eq!(record.status, PairStatus::Ok);
        assert_eq!(
            (record.first.as_str(), record.second.as_str()),
            (index.entries[a].id.as_str(), index.entries[b].id.as_str())
        );
        let (x1, y1) = load_entry(&index, &index.entries[a]).unwrap();
        let (x2, y2) = load_entry(&index, &index.entries[b]).unwrap();
        let mixed = hsmix_pair(
            &x1,
            &x2,
            &y1,
            &y2,
            &cfg,
            &PairRng::new(cfg.seed, record.pair_index as u64),
        )
        .unwrap();
        let stats = record.stats.as_ref().unwrap();
        assert_eq!(stats.num_selected, mixed.diagnostics.selection.len());
        assert_eq!(stats.labels_mixed, mixed.diagnostics.spm.num_labels());

        let path_of = |kind: OutputKind| {
            out.join(&record.outputs.iter().find(|f| f.kind == kind).unwrap().path)
        };
        let hard_ids = image::open(path_of(OutputKind::HardMask))
            .unwrap()
            .to_luma8();
        let want: Vec<u8> = argmax_decode(&mixed.hard.mask)
            .iter()
            .map(|&v| v as u8)
            .collect();
        assert_eq!(hard_ids.as_raw(), &want);

        let hard_img = image::open(path_of(OutputKind::HardImage))
            .unwrap()
            .to_rgb8();
        assert_eq!(hard_img.as_raw(), &mixed.hard.image.to_u8());

        let (meta, soft) = read_soft_mask(&path_of(OutputKind::SoftMaskSidecar)).unwrap();
        assert_eq!(meta.num_classes, 3);
        let worst = soft
            .iter()
            .zip(mixed.soft.mask.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 0.5 / SOFT_SCALE + 1e-12, "{worst}");
    }
}

#[test]
fn hard_only_run_lists_no_soft_files() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    make_dataset(root, &[(16, 16), (16, 16)]);
    let index = scan_dataset(&root.join("images"), &root.join("masks")).unwrap();
    let opts = BatchOptions {
        emit: EmitSet {
            hard: true,
            soft: false,
        },
        ..BatchOptions::default()
    };
    let cfg = AugConfig {
        l_min: 4,
        l_max: 8,
        ..AugConfig::default()
    };
    let m = run_batch(&index, &cfg, &root.join("out"), &opts).unwrap();
    assert_eq!(m.output_files().count(), 4);
    assert!(m
        .output_files()
        .all(|f| matches!(f.kind, OutputKind::HardImage | OutputKind::HardMask)));
    let none = BatchOptions {
        emit: EmitSet {
            hard: false,
            soft: false,
        },
        ..BatchOptions::default()
    };
    assert!(run_batch(&index, &cfg, &root.join("out2"), &none).is_err());
}

fn sweep_corpus() -> (
    Vec<(ImageTensor, hsmix_core::ClassMap)>,
    Vec<(usize, usize)>,
) {
    let samples: Vec<_> = (0..20usize)
        .map(|i| {
            let img = ImageTensor::from_fn(32, 32, 3, |r, c, ch| {
                let cell = (r / (4 + i % 5)) * 7 + c / (3 + i % 4) + ch;
                ((cell * 37 + i * 11) % 64) as f64 / 63.0
            })
            .unwrap();
            let ids: Vec<u32> = (0..1024)
                .map(|p| u32::from((p / 32 + p % 32 + i) % 9 < 3))
                .collect();
            (img, hsmix_core::one_hot(32, 32, &ids, 2).unwrap())
        })
        .collect();
    let pairs = (0..100)
        .map(|k| (k % 20, (k % 20 + 1 + k / 20) % 20))
        .collect();
    (samples, pairs)
}

#[test]
fn sweep_over_p_is_monotone_in_coverage() {
    use hsmix_core::pipeline::{default_metrics, grid_settings, sweep_samples};
    let (samples, pairs) = sweep_corpus();
    let base = AugConfig {
        seed: 12,
        ..AugConfig::default()
    };
    let settings = grid_settings(&[(20, 40)], &[0.1, 0.3, 0.5, 0.7, 0.9]);
    let report = sweep_samples(&samples, &pairs, &base, &settings, &default_metrics()).unwrap();
    assert_eq!(report.rows.len(), 5);
    assert!(report.rows.iter().all(|r| r.pairs == 100));
    let cov = report.column("hard_coverage").unwrap();
    assert!(cov.windows(2).all(|w| w[0] < w[1]), "{cov:?}");
    assert!(sweep_samples(&samples, &pairs, &base, &[], &default_metrics()).is_err());
}

#[test]
fn sweep_over_l_grows_realized_counts() {
    use hsmix_core::pipeline::{default_metrics, grid_settings, sweep_samples};
    let (samples, pairs) = sweep_corpus();
    let base = AugConfig {
        seed: 5,
        ..AugConfig::default()
    };
    let settings = grid_settings(&[(5, 15), (30, 50), (80, 120)], &[0.3]);
    let report = sweep_samples(&samples, &pairs, &base, &settings, &default_metrics()).unwrap();
    for column in ["labels_first", "labels_second", "labels_mixed"] {
        let v = report.column(column).unwrap();
        assert!(v.windows(2).all(|w| w[0] < w[1]), "{column}: {v:?}");
    }
}
